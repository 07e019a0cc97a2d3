#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sve/gaussian.hpp"
#include "sve/rng.hpp"

namespace {

TEST(Philox, KnownAnswerVectors) {
  using sve::Philox;
  EXPECT_EQ(Philox::bijection({0, 0, 0, 0}, {0, 0}),
            (Philox::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox::bijection({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                              {0xffffffffu, 0xffffffffu}),
            (Philox::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox::bijection({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                              {0xa4093822u, 0x299f31d0u}),
            (Philox::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(PathStream, DeterministicAndIndependentOfOrder) {
  sve::PathStream a(7, 3, sve::kNormalStream), b(7, 3, sve::kNormalStream);
  std::vector<double> xs;
  for (int i = 0; i < 100; ++i) xs.push_back(a.normal());
  sve::PathStream other(7, 4, sve::kNormalStream);
  for (int i = 0; i < 50; ++i) other.normal();
  for (int i = 0; i < 100; ++i) EXPECT_EQ(b.normal(), xs[i]);
  sve::PathStream c(8, 3, sve::kNormalStream);
  EXPECT_NE(c.normal(), xs[0]);
}

TEST(PathStream, UniformRangeAndMoments) {
  sve::PathStream s(1, 0, sve::kUniformStream);
  const int n = 400000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sum2 / n, 1.0 / 3.0, 5e-3);
}

TEST(PathStream, NormalMomentsAndTail) {
  sve::PathStream s(99, 12, sve::kNormalStream);
  const int n = 400000;
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  int below = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    m1 += z;
    m2 += z * z;
    m3 += z * z * z;
    m4 += z * z * z * z;
    below += z < -1.5;
  }
  EXPECT_NEAR(m1 / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(m2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m3 / n, 0.0, 5.0 * std::sqrt(15.0 / n));
  EXPECT_NEAR(m4 / n, 3.0, 5.0 * std::sqrt(96.0 / n));
  const double p = sve::norm_cdf(-1.5);
  EXPECT_NEAR(static_cast<double>(below) / n, p, 5.0 * std::sqrt(p * (1 - p) / n));
}

}  // namespace

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace sve {

/// Philox4x32-10 counter-based block cipher.
class Philox {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter bijection(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }
};

/// Stream ids occupy the last counter word.
inline constexpr std::uint32_t kNormalStream = 0;
inline constexpr std::uint32_t kUniformStream = 1;

inline double to_unit(std::uint32_t u) { return (static_cast<double>(u) + 0.5) * 0x1p-32; }

/// Deterministic stream for one path: draw k is a pure function of
/// (seed, path, stream, k), so scheduling cannot change it.
class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path, std::uint32_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        path_(path),
        stream_(stream) {}

  /// Uniform in (0, 1), never 0 or 1.
  double uniform() {
    if (used_ == 4) refill();
    return to_unit(buf_[used_++]);
  }

  /// Standard normal by the polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double a, b, q;
    do {
      a = 2.0 * uniform() - 1.0;
      b = 2.0 * uniform() - 1.0;
      q = a * a + b * b;
    } while (q >= 1.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = b * f;
    has_spare_ = true;
    return a * f;
  }

 private:
  void refill() {
    buf_ = Philox::bijection({block_++, static_cast<std::uint32_t>(path_),
                              static_cast<std::uint32_t>(path_ >> 32), stream_},
                             key_);
    used_ = 0;
  }

  Philox::Key key_;
  std::uint64_t path_;
  std::uint32_t stream_;
  std::uint32_t block_ = 0;
  Philox::Counter buf_{};
  int used_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sve

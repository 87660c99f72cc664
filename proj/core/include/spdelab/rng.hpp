#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace spdelab {

// Counter-based random stream (Philox4x32-10).
//
// A stream is addressed by (master_seed, path_index); every sampling event
// consumes one value of the monotone step counter. Draws depend only on the
// triple (master_seed, path_index, step_counter), so replay is bit-identical
// and ensemble paths can run on any number of workers without shared state.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t path_index,
            std::uint64_t step_counter = 0)
      : master_seed_(master_seed),
        path_index_(path_index),
        step_counter_(step_counter) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t path_index() const { return path_index_; }
  std::uint64_t step_counter() const { return step_counter_; }

  // Fills out[0..n) with independent standard normal draws for the current
  // step event, then advances the step counter. One event may hold at most
  // 2^33 draws (counter layout), far beyond any mode count used here.
  void fill_normals(double* out, int n) {
    if (n < 0) throw std::invalid_argument("RngStream: negative draw count");
    const std::uint64_t event = step_counter_++;
    std::uint64_t blk = 0;
    int i = 0;
    while (i < n) {
      const auto words = block(event, blk++);
      const double u1 = to_unit(join(words[0], words[1]));
      const double u2 = to_unit(join(words[2], words[3]));
      const double rad = std::sqrt(-2.0 * std::log(u1));
      out[i++] = rad * std::cos(two_pi * u2);
      if (i < n) out[i++] = rad * std::sin(two_pi * u2);
    }
  }

  // Single normal draw; consumes one step event.
  double normal() {
    double z;
    fill_normals(&z, 1);
    return z;
  }

 private:
  static constexpr double two_pi = 6.283185307179586476925286766559;

  static std::uint64_t join(std::uint32_t hi, std::uint32_t lo) {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
  }

  // Maps a 64-bit word to (0, 1]; never returns 0, so log(u) is finite.
  static double to_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 1.0) * 0x1p-53;
  }

  std::array<std::uint32_t, 4> block(std::uint64_t event,
                                     std::uint64_t blk) const {
    std::uint32_t x0 = static_cast<std::uint32_t>(blk);
    std::uint32_t x1 = static_cast<std::uint32_t>(event);
    std::uint32_t x2 = static_cast<std::uint32_t>(path_index_);
    std::uint32_t x3 = static_cast<std::uint32_t>(path_index_ >> 32);
    // Fold the upper halves of the event/block counters into the key so no
    // information is dropped for very long runs.
    std::uint32_t k0 = static_cast<std::uint32_t>(master_seed_) ^
                       static_cast<std::uint32_t>(event >> 32);
    std::uint32_t k1 = static_cast<std::uint32_t>(master_seed_ >> 32) ^
                       static_cast<std::uint32_t>(blk >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(mult0) * x0;
      const std::uint64_t p1 = static_cast<std::uint64_t>(mult1) * x2;
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      const std::uint32_t y0 = hi1 ^ x1 ^ k0;
      const std::uint32_t y1 = lo1;
      const std::uint32_t y2 = hi0 ^ x3 ^ k1;
      const std::uint32_t y3 = lo0;
      x0 = y0;
      x1 = y1;
      x2 = y2;
      x3 = y3;
      k0 += weyl0;
      k1 += weyl1;
    }
    return {x0, x1, x2, x3};
  }

  static constexpr std::uint32_t mult0 = 0xD2511F53u;
  static constexpr std::uint32_t mult1 = 0xCD9E8D57u;
  static constexpr std::uint32_t weyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t weyl1 = 0xBB67AE85u;

  std::uint64_t master_seed_;
  std::uint64_t path_index_;
  std::uint64_t step_counter_;
};

}  // namespace spdelab

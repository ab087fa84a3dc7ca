#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include "l1pca/matrix.hpp"

namespace l1pca {

// Philox4x32-10 counter-based generator. The 64-bit seed is the key and the
// 64-bit stream id occupies the upper half of the 128-bit counter, so
// independent streams (one per matrix, per sample, per restart) never
// overlap and never depend on how many draws another stream made.
class Philox {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0);

  static Block block(Block counter, Key key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // [0, 1) with 53 random bits.
  double uniform();
  // (0, 1), never returns an endpoint.
  double uniform_open();
  double normal();
  // Laplace(0, scale): variance 2 scale^2.
  double laplace(double scale);
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  void refill();

  Key key_;
  std::uint64_t block_index_ = 0;
  std::uint64_t stream_;
  Block buffer_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

Matrix gaussian_matrix(Index rows, Index cols, Philox& rng);

}  // namespace l1pca

#pragma once

#include <array>
#include <cstdint>

namespace icegsa {

/// Philox4x32-10 counter-based generator. Every draw is a pure function of
/// (key, counter), so any element of any stream can be produced independently
/// and chunking work across threads cannot change the values.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t key)
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  Block operator()(Block counter) const;

 private:
  std::array<std::uint32_t, 2> key_;
};

/// Root-seed stream offsets. Each consumer draws from its own stream so adding a
/// metric never perturbs another metric's samples.
namespace streams {
inline constexpr std::uint64_t complement = 1;   // ICE / PDP complement instances
inline constexpr std::uint64_t sobol_a = 10;
inline constexpr std::uint64_t sobol_b = 11;
inline constexpr std::uint64_t shap_points = 20;
inline constexpr std::uint64_t shap_background = 21;
inline constexpr std::uint64_t train_split = 30;
inline constexpr std::uint64_t surrogate_train = 31;
inline constexpr std::uint64_t surrogate_holdout = 32;
inline constexpr std::uint64_t oracle_dense = 40;
inline constexpr std::uint64_t oracle_functions = 41;
inline constexpr std::uint64_t replication_base = 1000;
}  // namespace streams

/// Uniform draws in the open interval (0, 1) addressed by (seed, stream, index).
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream) : philox_(seed), stream_(stream) {}

  double uniform(std::uint64_t index) const;
  std::uint64_t bits(std::uint64_t index) const;

 private:
  Philox4x32 philox_;
  std::uint64_t stream_;
};

}  // namespace icegsa

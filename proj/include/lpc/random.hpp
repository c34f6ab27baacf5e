#pragma once

#include <cstdint>
#include <random>

namespace lpc {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for an independent substream, keyed by (seed, stream, index). Columns
/// drawn from distinct substreams do not depend on generation order.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Stream tags so that features, flips and test draws never share a substream.
namespace stream {
inline constexpr std::uint64_t features = 1;
inline constexpr std::uint64_t flips = 2;
inline constexpr std::uint64_t candidates = 3;
inline constexpr std::uint64_t test = 4;
} // namespace stream

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace lpc

#pragma once

#include <cstdint>
#include <vector>

namespace idecode {

// Counter-based pseudo-random stream addressed by (seed, path). Identical
// (seed, path) replays the identical sequence on every platform; sibling
// paths are statistically independent. Derivation is pure, drawing mutates
// only the local counter.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed,
                     std::vector<std::uint64_t> path = {});

  // Child stream with path extended by `index`. Does not disturb this
  // stream's draw position.
  RngStream derive(std::uint64_t index) const;

  std::uint64_t next_u64();
  double next_f64();  // uniform on [0, 1)

  // Uniform integer in [0, n), n >= 1.
  std::uint64_t next_below(std::uint64_t n);

  // Standard normal via Box-Muller (two uniforms per call, no caching).
  double next_gaussian();

  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint64_t>& path() const { return path_; }

 private:
  std::uint64_t seed_;
  std::vector<std::uint64_t> path_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// splitmix64 finalizer; also used for config fingerprints and the
// deterministic model noise.
std::uint64_t mix64(std::uint64_t x);

}  // namespace idecode

#include "idecode/rng.hpp"

#include <cmath>

namespace idecode {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t absorb(std::uint64_t key, std::uint64_t word) {
  return mix64(key ^ mix64(word + kGolden));
}
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::vector<std::uint64_t> path)
    : seed_(seed), path_(std::move(path)) {
  key_ = mix64(seed_);
  for (auto p : path_) key_ = absorb(key_, p);
}

RngStream RngStream::derive(std::uint64_t index) const {
  auto child_path = path_;
  child_path.push_back(index);
  return RngStream(seed_, std::move(child_path));
}

std::uint64_t RngStream::next_u64() {
  return mix64(key_ + counter_++ * kGolden);
}

double RngStream::next_f64() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
  return next_u64() % n;
}

double RngStream::next_gaussian() {
  const double u1 = 1.0 - next_f64();  // (0, 1], keeps log finite
  const double u2 = next_f64();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace idecode

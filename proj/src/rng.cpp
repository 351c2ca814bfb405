#include "priosim/rng.hpp"

#include <cmath>

namespace priosim {

namespace rng_detail {

// splitmix64 finalizer (Steele, Lea, Flood 2014)
uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace rng_detail

RngStream::RngStream(uint64_t seed, uint64_t tag, uint64_t a, uint64_t b) {
  uint64_t s = rng_detail::mix64(seed);
  s = rng_detail::mix64(s ^ tag);
  s = rng_detail::mix64(s ^ a);
  s = rng_detail::mix64(s ^ b);
  state_ = s;
}

uint64_t RngStream::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double t = 2.0 * M_PI * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

Eigen::VectorXd RngStream::gaussian_vector(int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = gaussian();
  return v;
}

}  // namespace priosim

#ifndef PRIOSIM_RNG_HPP_
#define PRIOSIM_RNG_HPP_

#include <cstdint>

#include <Eigen/Dense>

namespace priosim {

// Streams are keyed by (seed, tag, a, b) so that e.g. the noise of agent a at
// round b is the same value no matter how many other streams were consumed.
// Core generator is splitmix64, which is plenty for simulation noise and,
// unlike std::normal_distribution, produces identical bits on every platform.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t tag, uint64_t a = 0, uint64_t b = 0);

  uint64_t next_u64();
  double uniform();   // [0, 1)
  double gaussian();  // standard normal, Box-Muller
  Eigen::VectorXd gaussian_vector(int n);

 private:
  uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

namespace rng_detail {
uint64_t mix64(uint64_t x);
}

}  // namespace priosim

#endif  // PRIOSIM_RNG_HPP_

#ifndef PRIOSIM_ESTIMATION_HPP_
#define PRIOSIM_ESTIMATION_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "priosim/control.hpp"
#include "priosim/dynamics.hpp"

namespace priosim {

// What one receiving agent observed in a communication round: per sender j,
// whether j transmitted (kappa), whether the message arrived here (phi), and
// the payload x_j(k-1) when kappa*phi = 1. For the bank owner's own entry,
// phi is set to kappa: the triggering design ignores loss of own messages.
struct RoundObservation {
  int64_t round = 0;
  std::vector<uint8_t> kappa;
  std::vector<uint8_t> phi;
  std::vector<std::optional<Eigen::VectorXd>> payload;
};

// Agent-owned bank of model-propagated estimates, one per agent, updated by
// the delayed/lossy exchange recursion. The owner's own entry doubles as the
// reference for the triggering error e_i = x_i - xhat_ii.
class EstimatorBank {
 public:
  EstimatorBank(int owner, std::vector<Eigen::VectorXd> initial, int64_t round0 = 0);

  // Advances the whole bank from round k-1 to k. All coupling sums read the
  // previous-round values, so per-agent results do not depend on update order.
  void update(const RoundObservation& obs, const std::vector<LtiModel>& models,
              const GainSet& gains);

  const Eigen::VectorXd& estimate(int agent) const { return estimates_[agent]; }
  Eigen::VectorXd self_error(const Eigen::VectorXd& x_owner) const;
  int owner() const { return owner_; }
  int64_t round() const { return round_; }

 private:
  int owner_;
  int64_t round_;
  std::vector<Eigen::VectorXd> estimates_;
  std::vector<Eigen::VectorXd> scratch_;
};

}  // namespace priosim

#endif  // PRIOSIM_ESTIMATION_HPP_

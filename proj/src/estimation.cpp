#include "priosim/estimation.hpp"

#include "priosim/errors.hpp"

namespace priosim {

EstimatorBank::EstimatorBank(int owner, std::vector<Eigen::VectorXd> initial, int64_t round0)
    : owner_(owner), round_(round0), estimates_(std::move(initial)) {
  scratch_.resize(estimates_.size());
}

void EstimatorBank::update(const RoundObservation& obs, const std::vector<LtiModel>& models,
                           const GainSet& gains) {
  const int N = static_cast<int>(estimates_.size());
  if (obs.round != round_ + 1)
    throw ContractError("EstimatorBank::update: observation round is not previous+1");
  if (static_cast<int>(obs.kappa.size()) != N || static_cast<int>(obs.phi.size()) != N ||
      static_cast<int>(obs.payload.size()) != N)
    throw ContractError("EstimatorBank::update: observation size mismatch");

  for (int j = 0; j < N; ++j) {
    const LtiModel& model = models[j];
    const bool received = obs.kappa[j] && obs.phi[j];
    if (received && !obs.payload[j])
      throw ContractError("EstimatorBank::update: delivered message without payload");

    // coupling term B_j sum_{l in omega_j} F_jl xhat_il, previous-round values
    Eigen::VectorXd coupled = Eigen::VectorXd::Zero(model.state_dim());
    if (!gains.omega[j].empty()) {
      Eigen::VectorXd u_coupled = Eigen::VectorXd::Zero(model.input_dim());
      for (int l : gains.omega[j]) u_coupled.noalias() += gains.block(j, l) * estimates_[l];
      coupled.noalias() = model.B * u_coupled;
    }

    const Eigen::VectorXd& base = received ? *obs.payload[j] : estimates_[j];
    scratch_[j] = model.A * base + model.B * (gains.block(j, j) * base) + coupled;
  }

  estimates_.swap(scratch_);
  round_ = obs.round;
}

Eigen::VectorXd EstimatorBank::self_error(const Eigen::VectorXd& x_owner) const {
  return x_owner - estimates_[owner_];
}

}  // namespace priosim

#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "priosim/config.hpp"
#include "priosim/control.hpp"
#include "priosim/errors.hpp"

using namespace priosim;

namespace {

std::vector<LtiModel> reference_models() { return build_models(reference_scenario()); }

}  // namespace

TEST_CASE("scalar Riccati equation has the closed-form fixed point") {
  // a=0.5, b=1, q=r=1: p^2 - p/4 - 1 = 0, positive root
  Eigen::MatrixXd A(1, 1), B(1, 1), Q(1, 1), R(1, 1);
  A << 0.5;
  B << 1.0;
  Q << 1.0;
  R << 1.0;
  const double p_exact = (0.25 + std::sqrt(0.0625 + 4.0)) / 2.0;
  const Eigen::MatrixXd P = solve_dare(A, B, Q, R);
  CHECK(P(0, 0) == doctest::Approx(p_exact).epsilon(1e-9));
  const Eigen::MatrixXd K = lqr_gain(A, B, Q, R);
  CHECK(K(0, 0) == doctest::Approx(-p_exact * 0.5 / (1.0 + p_exact)).epsilon(1e-9));
}

TEST_CASE("Riccati solution satisfies the equation residual on a cart-pole") {
  const auto models = reference_models();
  const Eigen::MatrixXd& A = models[0].A;
  const Eigen::MatrixXd& B = models[0].B;
  Eigen::MatrixXd Q = Eigen::Vector4d(5, 1, 0.5, 0.5).asDiagonal();
  Eigen::MatrixXd R = Eigen::MatrixXd::Constant(1, 1, 0.1);
  const Eigen::MatrixXd P = solve_dare(A, B, Q, R);

  const Eigen::MatrixXd BtP = B.transpose() * P;
  const Eigen::MatrixXd residual =
      Q + A.transpose() * P * A -
      A.transpose() * P * B * (R + BtP * B).inverse() * BtP * A - P;
  CHECK(residual.cwiseAbs().maxCoeff() < 1e-8);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
  CHECK(es.eigenvalues().minCoeff() > 0.0);

  const Eigen::MatrixXd K = lqr_gain(A, B, Q, R);
  CHECK(spectral_radius(A + B * K) < 1.0);
}

TEST_CASE("non-stabilizable systems are rejected") {
  Eigen::MatrixXd A(1, 1), B(1, 1), Q(1, 1), R(1, 1);
  A << 2.0;
  B << 0.0;
  Q << 1.0;
  R << 1.0;
  CHECK_THROWS_AS(solve_dare(A, B, Q, R, 1e-10, 200), ContractError);
}

TEST_CASE("augmented cost equals the pairwise synchronization expansion") {
  ScenarioConfig cfg = reference_scenario();
  cfg.roster.resize(3);
  cfg.network.n_agents = 3;
  const auto models = build_models(cfg);
  const CostSpec cost = build_cost(cfg);
  const auto [Qt, Rt] = build_augmented_cost(models, cost);
  REQUIRE(Qt.rows() == 12);
  REQUIRE(Rt.rows() == 3);

  RngStream rng(5, 9, 0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Eigen::VectorXd> x{rng.gaussian_vector(4), rng.gaussian_vector(4),
                                   rng.gaussian_vector(4)};
    Eigen::VectorXd stacked(12);
    stacked << x[0], x[1], x[2];
    double direct = 0.0;
    for (int i = 0; i < 3; ++i) direct += x[i].dot(cost.Q[i] * x[i]);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        direct += (x[i] - x[j]).dot(cost.Q_sync * (x[i] - x[j]));
    CHECK(stacked.dot(Qt * stacked) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("synthesized gains stabilize the full formation") {
  const auto models = reference_models();
  const GainSet gains = synthesize_gains(models, build_cost(reference_scenario()));
  CHECK(gains.n_agents == 20);
  CHECK(closed_loop_spectral_radius(models, gains) < 1.0);
  // synchronization coupling is present for every agent
  for (int i = 0; i < gains.n_agents; ++i) CHECK(!gains.omega[i].empty());
}

TEST_CASE("zero synchronization weight decouples the agents") {
  ScenarioConfig cfg = reference_scenario();
  cfg.roster.resize(4);
  cfg.network.n_agents = 4;
  cfg.q_sync_diag.setZero();
  const auto models = build_models(cfg);
  const GainSet gains = synthesize_gains(models, build_cost(cfg));
  for (int i = 0; i < 4; ++i) {
    CHECK(gains.omega[i].empty());
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(gains.block(i, j).isZero(0.0));
  }
}

TEST_CASE("control_input combines local state with coupled estimates") {
  ScenarioConfig cfg = reference_scenario();
  cfg.roster.resize(3);
  cfg.network.n_agents = 3;
  const auto models = build_models(cfg);
  const GainSet gains = synthesize_gains(models, build_cost(cfg));

  RngStream rng(8, 3, 0, 0);
  const Eigen::VectorXd x = rng.gaussian_vector(4);
  std::vector<Eigen::VectorXd> est{rng.gaussian_vector(4), rng.gaussian_vector(4),
                                   rng.gaussian_vector(4)};
  const Eigen::VectorXd u =
      control_input(0, x, [&](int j) -> const Eigen::VectorXd& { return est[j]; }, gains);
  Eigen::VectorXd expected = gains.block(0, 0) * x;
  for (int j : gains.omega[0]) expected += gains.block(0, j) * est[j];
  CHECK(u.isApprox(expected, 1e-14));
}

TEST_CASE("gain files round-trip exactly") {
  ScenarioConfig cfg = reference_scenario();
  cfg.roster.resize(3);
  cfg.network.n_agents = 3;
  const GainSet gains = synthesize_gains(build_models(cfg), build_cost(cfg));
  const std::string path = "test_gains_roundtrip.txt";
  save_gains(gains, path);
  const GainSet loaded = load_gains(path);
  std::remove(path.c_str());

  REQUIRE(loaded.n_agents == gains.n_agents);
  REQUIRE(loaded.state_dim == gains.state_dim);
  REQUIRE(loaded.input_dim == gains.input_dim);
  for (int i = 0; i < 3; ++i) {
    CHECK(loaded.omega[i] == gains.omega[i]);
    for (int j = 0; j < 3; ++j)
      CHECK((loaded.block(i, j) - gains.block(i, j)).cwiseAbs().maxCoeff() == 0.0);
  }
}

#include <doctest.h>

#include <cmath>

#include "priosim/config.hpp"
#include "priosim/control.hpp"
#include "priosim/errors.hpp"
#include "priosim/gamma.hpp"
#include "priosim/triggering.hpp"

using namespace priosim;

TEST_CASE("propagated variance closed form for A = I") {
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(4, 4);
  const Eigen::MatrixXd sigma = 0.01 * Eigen::MatrixXd::Identity(4, 4);
  // H = 1 means two accumulated noise terms
  CHECK(propagated_variance(A, sigma, 2).isApprox(2.0 * sigma, 1e-14));
  CHECK(propagated_variance(A, sigma, 1).isApprox(sigma, 1e-14));
  CHECK(propagated_variance(A, sigma, 0).isZero(0.0));
}

TEST_CASE("propagated variance accumulates through the dynamics") {
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 0.1, 0.0, 1.0;
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1e-4, 0.0, 0.0, 4e-4;
  const Eigen::MatrixXd expected = sigma + A * sigma * A.transpose();
  CHECK(propagated_variance(A, sigma, 2).isApprox(expected, 1e-14));
}

TEST_CASE("squared Mahalanobis distance examples") {
  CHECK(mahalanobis_sq(Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Identity(4, 4)) == 0.0);
  CHECK(mahalanobis_sq(Eigen::VectorXd::Ones(4), Eigen::MatrixXd::Identity(4, 4)) ==
        doctest::Approx(4.0));
  const Eigen::MatrixXd v_inv = Eigen::Vector4d(4, 1, 1, 1).asDiagonal().inverse();
  CHECK(mahalanobis_sq((Eigen::VectorXd(4) << 2, 0, 0, 0).finished(), v_inv) ==
        doctest::Approx(1.0));
}

TEST_CASE("error mean propagation applies the closed loop horizon+1 times") {
  Eigen::MatrixXd cl(2, 2);
  cl << 0.9, 0.1, 0.0, 0.8;
  const Eigen::VectorXd e = (Eigen::VectorXd(2) << 1.0, -2.0).finished();
  CHECK(propagate_error_mean(cl, e, 0).isApprox(cl * e, 1e-14));
  CHECK(propagate_error_mean(cl, e, 1).isApprox(cl * cl * e, 1e-14));
  CHECK(propagate_error_mean(cl, e, 3).isApprox(cl * cl * cl * cl * e, 1e-14));
}

TEST_CASE("exceedance probability saturates at the threshold") {
  CHECK(priority_exceedance(10.0, 10.0, 4) == 1.0);
  CHECK(priority_exceedance(10.0, 12.0, 4) == 1.0);
  CHECK(priority_exceedance(10.0, 0.0, 4) == doctest::Approx(chi_square_tail(10.0, 4)));
  CHECK(priority_exceedance(10.0, 4.0, 4) == doctest::Approx(chi_square_tail(6.0, 4)));
}

TEST_CASE("priority crosses one half exactly at the threshold") {
  for (int n : {2, 4}) {
    const double delta = 9.0;
    CHECK(priority(delta, delta, n) == doctest::Approx(0.5));
    CHECK(priority_chernoff(delta, delta, n) == doctest::Approx(0.5));
    CHECK(priority(delta, delta - 1e-3, n) < 0.5);
    CHECK(priority(delta, delta + 1e-3, n) > 0.5);
  }
}

TEST_CASE("priority is strictly increasing in the squared distance") {
  for (int n : {2, 4}) {
    double prev_exact = -1.0, prev_cher = -1.0;
    for (double d = 0.0; d <= 30.0; d += 0.1) {
      const double pe = priority(12.0, d, n);
      const double pc = priority_chernoff(12.0, d, n);
      REQUIRE(pe >= 0.0);
      REQUIRE(pe <= 1.0);
      REQUIRE(pe > prev_exact);
      REQUIRE(pc > prev_cher);
      prev_exact = pe;
      prev_cher = pc;
    }
  }
}

TEST_CASE("quantization at four bits") {
  CHECK(quantize_priority(0.0, 4) == 0);
  CHECK(quantize_priority(1.0, 4) == 15);
  CHECK(quantize_priority(0.5, 4) == 8);  // the transmit threshold value
  CHECK(quantize_priority(0.49, 4) == 7);
}

TEST_CASE("quantization preserves order") {
  RngStream rng(21, 6, 0, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = rng.uniform();
    const double b = rng.uniform();
    if (a <= b)
      CHECK(quantize_priority(a, 4) <= quantize_priority(b, 4));
    else
      CHECK(quantize_priority(a, 4) >= quantize_priority(b, 4));
  }
}

TEST_CASE("component saturation forces the top value") {
  const Eigen::VectorXd e_max = (Eigen::VectorXd(4) << 0.03, 0.03, 0.1, 0.3).finished();
  const Eigen::VectorXd e = (Eigen::VectorXd(4) << 0.05, 0.0, 0.0, 0.0).finished();
  CHECK(quantize_with_saturation(0.0, e, e_max, 4) == 15);
  const Eigen::VectorXd small = (Eigen::VectorXd(4) << 0.01, 0.0, 0.0, 0.0).finished();
  CHECK(quantize_with_saturation(0.2, small, e_max, 4) == quantize_priority(0.2, 4));
}

TEST_CASE("error statistics cache consistent inverses and thresholds") {
  const ScenarioConfig cfg = reference_scenario();
  const auto models = build_models(cfg);
  const GainSet gains = synthesize_gains(models, build_cost(cfg));
  for (int i : {0, 2, 7}) {
    const ErrorStatistics st = ErrorStatistics::make(models[i], gains.block(i, i), cfg.e_max, 1);
    CHECK((st.var_h * st.var_h_inv - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <
          1e-9);
    CHECK((st.var_0 * st.var_0_inv - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <
          1e-9);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(st.var_h);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK(st.delta_h == doctest::Approx(mahalanobis_sq(cfg.e_max, st.var_h_inv)));
    CHECK(st.delta_0 > st.delta_h);  // less accumulated noise, tighter variance
    CHECK(st.closed_loop.isApprox(models[i].A + models[i].B * gains.block(i, i), 1e-14));
  }
}

TEST_CASE("noiseless statistics yield zero priority for finite errors") {
  const LtiModel m = make_cartpole_model(CartpoleParams{}, 0.1, 0.0);
  const Eigen::VectorXd e_max = (Eigen::VectorXd(4) << 0.03, 0.03, 0.1, 0.3).finished();
  const ErrorStatistics st =
      ErrorStatistics::make(m, Eigen::MatrixXd::Zero(1, 4), e_max, 1);
  const Eigen::VectorXd e = Eigen::VectorXd::Zero(4);
  const double d = mahalanobis_sq(e, st.var_h_inv);
  CHECK(d == 0.0);
  CHECK(priority_chernoff(st.delta_h, d, 4) == 0.0);
}

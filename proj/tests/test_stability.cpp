#include <doctest.h>

#include <cmath>

#include "priosim/config.hpp"
#include "priosim/control.hpp"
#include "priosim/sim.hpp"
#include "priosim/stability.hpp"

using namespace priosim;

TEST_CASE("service horizon is the ceiling of 2N over the slot count") {
  CHECK(horizon_rounds(20, 2) == 20);
  CHECK(horizon_rounds(20, 3) == 14);
  CHECK(horizon_rounds(2, 1) == 4);
  for (int n = 2; n <= 64; n += 3)
    for (int m = 1; m <= n; m += 2)
      CHECK(horizon_rounds(n, m) == (2 * n + m - 1) / m);
}

TEST_CASE("spectral norm on hand-checkable matrices") {
  CHECK(spectral_norm(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));
  Eigen::MatrixXd D = Eigen::Vector3d(0.5, -2.0, 1.0).asDiagonal();
  CHECK(spectral_norm(D) == doctest::Approx(2.0));
  Eigen::MatrixXd J(2, 2);
  J << 0.0, 1.0, 0.0, 0.0;  // nilpotent, spectral radius 0, norm 1
  CHECK(spectral_norm(J) == doctest::Approx(1.0));
}

TEST_CASE("whitening transform normalizes the noise covariance") {
  RngStream rng(3, 11, 0, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd G = Eigen::MatrixXd::NullaryExpr(
        4, 4, [&](Eigen::Index, Eigen::Index) { return rng.gaussian(); });
    const Eigen::MatrixXd sigma =
        G * G.transpose() + 0.1 * Eigen::MatrixXd::Identity(4, 4);
    const Eigen::MatrixXd W = whitening_transform(sigma);
    CHECK((W * sigma * W.transpose() - Eigen::MatrixXd::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK(W.isApprox(W.transpose(), 1e-10));
  }
}

TEST_CASE("whitening rejects a singular covariance") {
  CHECK_THROWS(whitening_transform(Eigen::MatrixXd::Zero(3, 3)));
}

TEST_CASE("drift bound from the origin is the noise dimension") {
  const ScenarioConfig cfg = reference_scenario();
  const auto models = build_models(cfg);
  const GainSet gains = synthesize_gains(models, build_cost(cfg));
  const DriftCheck chk = drift_bound_mc(models[0], gains.block(0, 0),
                                        Eigen::VectorXd::Zero(4), 40000, 77);
  // e0 = 0: next error is pure whitened noise, expectation exactly n
  CHECK(chk.rhs == doctest::Approx(4.0));
  CHECK(std::abs(chk.lhs_mean - 4.0) < 3.0 * chk.lhs_stderr + 1e-9);
  CHECK(chk.pass);
}

TEST_CASE("drift bound holds away from the origin") {
  const ScenarioConfig cfg = reference_scenario();
  const auto models = build_models(cfg);
  const GainSet gains = synthesize_gains(models, build_cost(cfg));
  RngStream rng(13, 11, 0, 1);
  for (int i : {2, 7}) {
    const Eigen::VectorXd e0 = 0.05 * rng.gaussian_vector(4);
    const DriftCheck chk = drift_bound_mc(models[i], gains.block(i, i), e0, 20000, 78);
    CHECK(chk.pass);
    CHECK(chk.lhs_mean <= chk.rhs + 3.0 * chk.lhs_stderr);
  }
}

TEST_CASE("monitor accepts a flat series and rejects exponential growth") {
  std::vector<double> flat(400, 3.0);
  const MsbVerdict ok = msb_monitor(flat, 20, 1.2);
  CHECK(ok.stable);
  CHECK(ok.windows == 20);
  CHECK(ok.growth == doctest::Approx(1.0));

  std::vector<double> blowup(400);
  for (int k = 0; k < 400; ++k) blowup[k] = std::exp(0.02 * k);
  const MsbVerdict bad = msb_monitor(blowup, 20, 1.2);
  CHECK(!bad.stable);
  CHECK(bad.growth > 1.2);
}

TEST_CASE("monitor tolerates bounded oscillation within the growth factor") {
  std::vector<double> series(300);
  for (int k = 0; k < 300; ++k) series[k] = 2.0 + 0.1 * std::sin(0.3 * k);
  CHECK(msb_monitor(series, 15, 1.2).stable);
}

TEST_CASE("a series too short to split is reported unstable") {
  std::vector<double> series(25, 1.0);
  const MsbVerdict v = msb_monitor(series, 20, 1.2);
  CHECK(!v.stable);
  CHECK(v.windows == 1);
}

TEST_CASE("state norm series matches a manual recomputation") {
  ScenarioConfig cfg = reference_scenario();
  cfg.rounds = 40;
  cfg.disturbances.clear();
  const SimResult res = run_scenario(cfg);
  const std::vector<double> series = state_norm_series(res);
  REQUIRE(series.size() == res.records.size());
  for (size_t k = 0; k < series.size(); k += 7) {
    double want = 0.0;
    for (const auto& xi : res.records[k].x) want += xi.squaredNorm();
    CHECK(series[k] == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("window classification is exhaustive and bounded") {
  ScenarioConfig cfg = reference_scenario();
  cfg.rounds = 600;
  cfg.disturbances.clear();
  const SimResult res = run_scenario(cfg);

  const int K = horizon_rounds(cfg.network.n_agents, cfg.resolved_m_ctrl());
  const int64_t per_agent = cfg.rounds / K;
  const auto classes = classify_windows(res);
  CHECK(static_cast<int64_t>(classes.size()) == per_agent * cfg.network.n_agents);

  const CaseReport rep = stability_case_report(res);
  CHECK(rep.windows == static_cast<int64_t>(classes.size()));
  CHECK(rep.counts[0] + rep.counts[1] + rep.counts[2] + rep.counts[3] == rep.windows);
  // healthy run: most windows end below the trigger threshold
  CHECK(rep.counts[0] > rep.windows / 2);
  for (const auto& w : classes) {
    if (w.kind == WindowCase::BelowThreshold)
      CHECK(w.final_d_sq <= res.stats[w.agent].delta_0);
    if (w.kind == WindowCase::Transmitted) CHECK(w.bound > 0.0);
  }
  CHECK(rep.c2_pass);
}

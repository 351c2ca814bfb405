#include "priosim/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "priosim/errors.hpp"

namespace priosim {

using nlohmann::json;

std::string to_string(Mode mode) {
  return mode == Mode::Predictive ? "predictive" : "periodic";
}

Mode mode_from_string(const std::string& s) {
  if (s == "predictive") return Mode::Predictive;
  if (s == "periodic") return Mode::Periodic;
  throw ConfigError("unknown mode: " + s);
}

void ScenarioConfig::validate() const {
  const int N = static_cast<int>(roster.size());
  if (N < 1) throw ConfigError("config: roster is empty");
  if (network.n_agents != N) throw ConfigError("config: network.n_agents != roster size");
  if (N > 32) throw ConfigError("config: at most 32 agents supported");
  if (rounds < 1) throw ConfigError("config: rounds must be positive");
  if (update_interval_s <= 0.0) throw ConfigError("config: update interval must be positive");
  if (horizon < 0) throw ConfigError("config: horizon must be non-negative");
  if (p_delta <= 0.0 || p_delta >= 1.0) throw ConfigError("config: p_delta must be in (0, 1)");
  if (r_scalar <= 0.0) throw ConfigError("config: r must be positive");
  if (network.p_loss < 0.0 || network.p_loss >= 1.0)
    throw ConfigError("config: p_loss must be in [0, 1)");
  if (network.q_noagg < 0.0 || network.q_noagg >= 1.0)
    throw ConfigError("config: q_noagg must be in [0, 1)");
  if (network.m_app < 0) throw ConfigError("config: m_app must be non-negative");
  for (const std::string& cls : roster)
    if (!classes.count(cls)) throw ConfigError("config: roster references unknown class " + cls);
  for (const auto& [name, params] : classes) {
    if (params.noise_std < 0.0)
      throw ConfigError("config: class " + name + " needs non-negative noise_std");
    if (params.cartpole.cart_mass <= 0.0 || params.cartpole.pole_mass <= 0.0 ||
        params.cartpole.pole_com_length <= 0.0)
      throw ConfigError("config: class " + name + " has non-positive physical parameters");
  }
  for (const DisturbanceSpec& d : disturbances) {
    if (d.agent < 0 || d.agent >= N) throw ConfigError("config: disturbance agent out of range");
    if (d.component < 0 || d.component >= e_max.size())
      throw ConfigError("config: disturbance component out of range");
  }
  if (e_max.size() != q_diag.size() || e_max.size() != q_sync_diag.size())
    throw ConfigError("config: e_max, q, q_sync dimensions disagree");
  if ((e_max.array() <= 0.0).any()) throw ConfigError("config: e_max must be positive");
  if (cost_window < 1) throw ConfigError("config: cost_window must be positive");
}

int ScenarioConfig::resolved_m_ctrl() const {
  if (network.m_ctrl > 0) return network.m_ctrl;
  return control_bandwidth(network, mode == Mode::Predictive);
}

NetworkConfig ScenarioConfig::resolved_network() const {
  NetworkConfig net = network;
  net.m_ctrl = resolved_m_ctrl();
  return net;
}

ScenarioConfig reference_scenario() {
  ScenarioConfig c;
  c.mode = Mode::Predictive;
  c.seed = 1;
  c.rounds = 10000;
  c.update_interval_s = 0.1;

  c.network.n_agents = 20;
  c.network.m_app = 18;
  c.network.m_ctrl = 0;  // derived from the budget per mode
  c.network.p_loss = 2e-5;
  c.network.q_noagg = 1e-4;

  c.p_delta = 0.5;
  c.horizon = 1;
  c.e_max = (Eigen::VectorXd(4) << 0.03, 0.03, 0.1, 0.3).finished();

  c.q_diag = (Eigen::VectorXd(4) << 5.0, 1.0, 0.5, 0.5).finished();
  c.q_sync_diag = (Eigen::VectorXd(4) << 0.0, 10.0, 0.0, 0.0).finished();
  c.r_scalar = 0.1;

  // Three hardware classes: hand-built pendulums, noisier off-the-shelf units,
  // and simulated agents whose "process noise" is only numerical.
  c.classes["self_built"] = ClassParams{CartpoleParams{0.5, 0.1, 0.25, 9.81}, 0.002};
  c.classes["off_the_shelf"] = ClassParams{CartpoleParams{0.94, 0.23, 0.32, 9.81}, 0.004};
  c.classes["simulated"] = ClassParams{CartpoleParams{0.94, 0.23, 0.32, 9.81}, 1e-4};

  c.roster.assign(20, "simulated");
  for (int id : {2, 3, 5, 6}) c.roster[id] = "self_built";
  for (int id : {7, 8}) c.roster[id] = "off_the_shelf";

  // Held cart displacement on one agent over the second half of the run.
  DisturbanceSpec d;
  d.agent = 11;
  d.start_step = c.rounds / 2;
  d.end_step = c.rounds;
  d.component = 1;
  d.held_value = 0.2;
  c.disturbances.push_back(d);

  c.track_clamp = false;
  c.track_half_length = 0.25;
  c.cost_window = 50;
  c.msb_growth_factor = 1.2;
  return c;
}

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
  Eigen::VectorXd v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

}  // namespace

void save_config(const ScenarioConfig& c, const std::string& path) {
  json j;
  j["schema_version"] = c.schema_version;
  j["mode"] = to_string(c.mode);
  j["seed"] = c.seed;
  j["rounds"] = c.rounds;
  j["update_interval_s"] = c.update_interval_s;

  json net;
  net["n_agents"] = c.network.n_agents;
  net["m_app"] = c.network.m_app;
  net["m_ctrl"] = c.network.m_ctrl;
  net["p_loss"] = c.network.p_loss;
  net["q_noagg"] = c.network.q_noagg;
  net["priority_bits"] = c.network.priority_bits;
  net["slot_us"] = c.network.slot_us;
  net["slots_per_message"] = c.network.slots_per_message;
  net["round_budget_us"] = c.network.round_budget_us;
  j["network"] = net;

  j["p_delta"] = c.p_delta;
  j["horizon"] = c.horizon;
  j["e_max"] = vec_to_json(c.e_max);
  j["q_diag"] = vec_to_json(c.q_diag);
  j["q_sync_diag"] = vec_to_json(c.q_sync_diag);
  j["r"] = c.r_scalar;
  j["roster"] = c.roster;

  json classes = json::object();
  for (const auto& [name, params] : c.classes) {
    json cls;
    cls["cart_mass"] = params.cartpole.cart_mass;
    cls["pole_mass"] = params.cartpole.pole_mass;
    cls["pole_com_length"] = params.cartpole.pole_com_length;
    cls["gravity"] = params.cartpole.gravity;
    cls["noise_std"] = params.noise_std;
    classes[name] = cls;
  }
  j["classes"] = classes;

  json dists = json::array();
  for (const DisturbanceSpec& d : c.disturbances) {
    json jd;
    jd["agent"] = d.agent;
    jd["start_step"] = d.start_step;
    jd["end_step"] = d.end_step;
    jd["component"] = d.component;
    jd["held_value"] = d.held_value;
    dists.push_back(jd);
  }
  j["disturbances"] = dists;

  j["track_clamp"] = c.track_clamp;
  j["track_half_length"] = c.track_half_length;
  j["cost_window"] = c.cost_window;
  j["msb_growth_factor"] = c.msb_growth_factor;
  if (!c.trace_path.empty()) j["trace_path"] = c.trace_path;
  if (!c.gains_path.empty()) j["gains_path"] = c.gains_path;

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open config for writing: " + path);
  out << j.dump(2) << "\n";
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse failure: " + std::string(e.what()));
  }

  ScenarioConfig c;
  try {
    c.schema_version = j.at("schema_version").get<int>();
    if (c.schema_version != 1) throw ConfigError("unsupported schema_version");
    c.mode = mode_from_string(j.at("mode").get<std::string>());
    c.seed = j.at("seed").get<uint64_t>();
    c.rounds = j.at("rounds").get<int64_t>();
    c.update_interval_s = j.at("update_interval_s").get<double>();

    const json& net = j.at("network");
    c.network.n_agents = net.at("n_agents").get<int>();
    c.network.m_app = net.at("m_app").get<int>();
    c.network.m_ctrl = net.at("m_ctrl").get<int>();
    c.network.p_loss = net.at("p_loss").get<double>();
    c.network.q_noagg = net.at("q_noagg").get<double>();
    c.network.priority_bits = net.value("priority_bits", 4);
    c.network.slot_us = net.value("slot_us", 380.0);
    c.network.slots_per_message = net.value("slots_per_message", 9.5);
    c.network.round_budget_us = net.value("round_budget_us", 76000.0);

    c.p_delta = j.at("p_delta").get<double>();
    c.horizon = j.at("horizon").get<int>();
    c.e_max = vec_from_json(j.at("e_max"));
    c.q_diag = vec_from_json(j.at("q_diag"));
    c.q_sync_diag = vec_from_json(j.at("q_sync_diag"));
    c.r_scalar = j.at("r").get<double>();
    c.roster = j.at("roster").get<std::vector<std::string>>();

    for (const auto& [name, cls] : j.at("classes").items()) {
      ClassParams p;
      p.cartpole.cart_mass = cls.at("cart_mass").get<double>();
      p.cartpole.pole_mass = cls.at("pole_mass").get<double>();
      p.cartpole.pole_com_length = cls.at("pole_com_length").get<double>();
      p.cartpole.gravity = cls.value("gravity", 9.81);
      p.noise_std = cls.at("noise_std").get<double>();
      c.classes[name] = p;
    }

    for (const json& jd : j.value("disturbances", json::array())) {
      DisturbanceSpec d;
      d.agent = jd.at("agent").get<int>();
      d.start_step = jd.at("start_step").get<int64_t>();
      d.end_step = jd.at("end_step").get<int64_t>();
      d.component = jd.at("component").get<int>();
      d.held_value = jd.at("held_value").get<double>();
      c.disturbances.push_back(d);
    }

    c.track_clamp = j.value("track_clamp", false);
    c.track_half_length = j.value("track_half_length", 0.25);
    c.cost_window = j.value("cost_window", 50);
    c.msb_growth_factor = j.value("msb_growth_factor", 1.2);
    c.trace_path = j.value("trace_path", std::string());
    c.gains_path = j.value("gains_path", std::string());
  } catch (const json::exception& e) {
    throw ConfigError("config field error: " + std::string(e.what()));
  }

  c.validate();
  return c;
}

std::vector<LtiModel> build_models(const ScenarioConfig& c) {
  std::vector<LtiModel> models;
  models.reserve(c.roster.size());
  for (const std::string& cls : c.roster) {
    const ClassParams& p = c.classes.at(cls);
    models.push_back(make_cartpole_model(p.cartpole, c.update_interval_s, p.noise_std));
  }
  return models;
}

CostSpec build_cost(const ScenarioConfig& c) {
  CostSpec cost;
  const int N = static_cast<int>(c.roster.size());
  const Eigen::MatrixXd Q = c.q_diag.asDiagonal();
  Eigen::MatrixXd R(1, 1);
  R(0, 0) = c.r_scalar;
  cost.Q.assign(N, Q);
  cost.R.assign(N, R);
  cost.Q_sync = c.q_sync_diag.asDiagonal();
  return cost;
}

}  // namespace priosim

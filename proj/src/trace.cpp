#include "priosim/trace.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "priosim/errors.hpp"

namespace priosim {

using nlohmann::json;

namespace {

void append_double(std::string& row, double v) {
  char buf[40];
  // 17 significant digits: enough to round-trip any double exactly.
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  row.append(buf, res.ptr);
}

double parse_double(const std::string& field) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{}) throw ConfigError("trace: bad float field '" + field + "'");
  return v;
}

int64_t parse_int(const std::string& field) {
  int64_t v = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{}) throw ConfigError("trace: bad integer field '" + field + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

void write_trace_csv(const SimResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open trace for writing: " + path);

  const int N = result.summary.n_agents;
  const int n = result.gains.state_dim;
  const int m = result.gains.input_dim;

  std::string row = "round,cost,lyapunov,realized_slots";
  for (int i = 0; i < N; ++i) {
    const std::string id = std::to_string(i);
    for (int c = 0; c < n; ++c) row += ",x" + id + "_" + std::to_string(c);
    for (int c = 0; c < m; ++c) row += ",u" + id + "_" + std::to_string(c);
    for (int c = 0; c < n; ++c) row += ",e" + id + "_" + std::to_string(c);
    row += ",dsq" + id + ",p" + id + ",p0_" + id + ",q" + id + ",q0_" + id + ",granted" + id +
           ",tx" + id + ",skip" + id + ",agg" + id + ",deliv" + id;
  }
  out << row << "\n";

  for (const RoundRecord& r : result.records) {
    row.clear();
    row += std::to_string(r.round);
    row += ',';
    append_double(row, r.cost);
    row += ',';
    append_double(row, r.lyapunov);
    row += ',';
    append_double(row, r.realized_slots);
    for (int i = 0; i < N; ++i) {
      for (int c = 0; c < n; ++c) {
        row += ',';
        append_double(row, r.x[i](c));
      }
      for (int c = 0; c < m; ++c) {
        row += ',';
        append_double(row, r.u[i](c));
      }
      for (int c = 0; c < n; ++c) {
        row += ',';
        append_double(row, r.e[i](c));
      }
      row += ',';
      append_double(row, r.d_sq[i]);
      row += ',';
      append_double(row, r.p_raw[i]);
      row += ',';
      append_double(row, r.p0_raw[i]);
      row += ',' + std::to_string(r.q[i]);
      row += ',' + std::to_string(r.q0[i]);
      row += ',' + std::to_string(static_cast<int>(r.granted[i]));
      row += ',' + std::to_string(static_cast<int>(r.transmitted[i]));
      row += ',' + std::to_string(static_cast<int>(r.skip_mark[i]));
      row += ',' + std::to_string(static_cast<int>(r.has_aggregate[i]));
      row += ',' + std::to_string(r.delivered_to[i]);
    }
    out << row << "\n";
  }
  if (!out) throw ConfigError("trace write failed: " + path);
}

TraceData read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace is empty: " + path);

  const std::vector<std::string> header = split_csv(line);
  TraceData trace;
  // Deduce layout from the header: count x0_*/u0_* columns and agents.
  for (const std::string& h : header) {
    if (h.rfind("x0_", 0) == 0) ++trace.state_dim;
    if (h.rfind("u0_", 0) == 0) ++trace.input_dim;
    if (h.rfind("deliv", 0) == 0) ++trace.n_agents;
  }
  if (trace.n_agents < 1 || trace.state_dim < 1 || trace.input_dim < 1)
    throw ConfigError("trace header not recognized: " + path);
  const size_t per_agent = 2 * trace.state_dim + trace.input_dim + 10;
  if (header.size() != 4 + trace.n_agents * per_agent)
    throw ConfigError("trace header column count mismatch: " + path);

  const int N = trace.n_agents;
  const int n = trace.state_dim;
  const int m = trace.input_dim;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != header.size()) throw ConfigError("trace row column count mismatch");
    RoundRecord r;
    size_t c = 0;
    r.round = parse_int(f[c++]);
    r.cost = parse_double(f[c++]);
    r.lyapunov = parse_double(f[c++]);
    r.realized_slots = parse_double(f[c++]);
    r.x.resize(N);
    r.u.resize(N);
    r.e.resize(N);
    r.d_sq.resize(N);
    r.p_raw.resize(N);
    r.p0_raw.resize(N);
    r.q.resize(N);
    r.q0.resize(N);
    r.granted.resize(N);
    r.transmitted.resize(N);
    r.skip_mark.resize(N);
    r.has_aggregate.resize(N);
    r.delivered_to.resize(N);
    for (int i = 0; i < N; ++i) {
      r.x[i].resize(n);
      for (int k = 0; k < n; ++k) r.x[i](k) = parse_double(f[c++]);
      r.u[i].resize(m);
      for (int k = 0; k < m; ++k) r.u[i](k) = parse_double(f[c++]);
      r.e[i].resize(n);
      for (int k = 0; k < n; ++k) r.e[i](k) = parse_double(f[c++]);
      r.d_sq[i] = parse_double(f[c++]);
      r.p_raw[i] = parse_double(f[c++]);
      r.p0_raw[i] = parse_double(f[c++]);
      r.q[i] = static_cast<int>(parse_int(f[c++]));
      r.q0[i] = static_cast<int>(parse_int(f[c++]));
      r.granted[i] = static_cast<uint8_t>(parse_int(f[c++]));
      r.transmitted[i] = static_cast<uint8_t>(parse_int(f[c++]));
      r.skip_mark[i] = static_cast<uint8_t>(parse_int(f[c++]));
      r.has_aggregate[i] = static_cast<uint8_t>(parse_int(f[c++]));
      r.delivered_to[i] = static_cast<uint32_t>(parse_int(f[c++]));
    }
    trace.records.push_back(std::move(r));
  }
  return trace;
}

void write_summary_json(const SimSummary& s, const std::string& path) {
  json j;
  j["rounds"] = s.rounds;
  j["n_agents"] = s.n_agents;
  j["m_ctrl"] = s.m_ctrl;
  j["mean_cost"] = s.mean_cost;
  j["mean_cost_first_half"] = s.mean_cost_first_half;
  j["mean_cost_second_half"] = s.mean_cost_second_half;
  j["mean_realized_slots"] = s.mean_realized_slots;
  j["total_transmissions"] = s.total_transmissions;
  j["total_grants"] = s.total_grants;
  j["total_skip_marks"] = s.total_skip_marks;
  j["transmissions"] = s.transmissions;
  j["grants"] = s.grants;
  j["priority_histogram"] = s.priority_histogram;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open summary for writing: " + path);
  out << j.dump(2) << "\n";
}

SimSummary read_summary_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open summary: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("summary parse failure: " + std::string(e.what()));
  }
  SimSummary s;
  try {
    s.rounds = j.at("rounds").get<int64_t>();
    s.n_agents = j.at("n_agents").get<int>();
    s.m_ctrl = j.at("m_ctrl").get<int>();
    s.mean_cost = j.at("mean_cost").get<double>();
    s.mean_cost_first_half = j.at("mean_cost_first_half").get<double>();
    s.mean_cost_second_half = j.at("mean_cost_second_half").get<double>();
    s.mean_realized_slots = j.at("mean_realized_slots").get<double>();
    s.total_transmissions = j.at("total_transmissions").get<int64_t>();
    s.total_grants = j.at("total_grants").get<int64_t>();
    s.total_skip_marks = j.at("total_skip_marks").get<int64_t>();
    s.transmissions = j.at("transmissions").get<std::vector<int64_t>>();
    s.grants = j.at("grants").get<std::vector<int64_t>>();
    s.priority_histogram = j.at("priority_histogram").get<std::vector<std::vector<int64_t>>>();
  } catch (const json::exception& e) {
    throw ConfigError("summary field error: " + std::string(e.what()));
  }
  return s;
}

namespace {

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::vector<std::string> recompute_check(const ScenarioConfig& config, const TraceData& trace,
                                         const SimSummary& stored) {
  std::vector<std::string> issues;
  const CostSpec cost = build_cost(config);
  constexpr double kTol = 1e-9;

  for (const RoundRecord& r : trace.records) {
    const double c = evaluate_cost(r.x, r.u, cost);
    if (!close(c, r.cost, kTol)) {
      issues.push_back("round " + std::to_string(r.round) + ": cost recomputes to " +
                       std::to_string(c) + " but trace stores " + std::to_string(r.cost));
      break;  // one mismatch per kind keeps the report readable
    }
  }

  const SimSummary fresh = summarize(config, trace.records);
  if (fresh.rounds != stored.rounds) issues.push_back("summary: rounds mismatch");
  if (fresh.total_transmissions != stored.total_transmissions)
    issues.push_back("summary: total transmissions mismatch");
  if (fresh.total_grants != stored.total_grants) issues.push_back("summary: total grants mismatch");
  if (fresh.total_skip_marks != stored.total_skip_marks)
    issues.push_back("summary: total skip marks mismatch");
  if (!close(fresh.mean_cost, stored.mean_cost, kTol)) issues.push_back("summary: mean cost mismatch");
  if (!close(fresh.mean_cost_first_half, stored.mean_cost_first_half, kTol))
    issues.push_back("summary: first-half mean cost mismatch");
  if (!close(fresh.mean_cost_second_half, stored.mean_cost_second_half, kTol))
    issues.push_back("summary: second-half mean cost mismatch");
  if (!close(fresh.mean_realized_slots, stored.mean_realized_slots, kTol))
    issues.push_back("summary: mean realized slots mismatch");
  if (fresh.transmissions != stored.transmissions)
    issues.push_back("summary: per-agent transmissions mismatch");
  if (fresh.grants != stored.grants) issues.push_back("summary: per-agent grants mismatch");
  if (fresh.priority_histogram != stored.priority_histogram)
    issues.push_back("summary: priority histogram mismatch");
  return issues;
}

}  // namespace priosim

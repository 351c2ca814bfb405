#include "priosim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "priosim/errors.hpp"

namespace priosim {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

struct Frame {
  double x_min, x_max, y_min, y_max;

  double px(double x) const {
    return kMargin + (x - x_min) / std::max(1e-300, x_max - x_min) * (kWidth - 2 * kMargin);
  }
  double py(double y) const {
    return kHeight - kMargin -
           (y - y_min) / std::max(1e-300, y_max - y_min) * (kHeight - 2 * kMargin);
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void open_svg(std::ostream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
      << "font-family=\"sans-serif\">" << title << "</text>\n";
}

void axes(std::ostream& out, const Frame& f, const std::string& x_label,
          const std::string& y_label) {
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
      << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = f.x_min + (f.x_max - f.x_min) * t / 4.0;
    const double yv = f.y_min + (f.y_max - f.y_min) * t / 4.0;
    out << "<text x=\"" << f.px(xv) << "\" y=\"" << kHeight - kMargin + 18
        << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(xv)
        << "</text>\n"
        << "<text x=\"" << kMargin - 8 << "\" y=\"" << f.py(yv) + 4
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << x_label
      << "</text>\n"
      << "<text x=\"16\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
      << "transform=\"rotate(-90 16 " << kHeight / 2 << ")\">" << y_label << "</text>\n";
}

std::ofstream open_file(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open figure for writing: " + path);
  return out;
}

}  // namespace

std::string svg_polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                         const std::string& color) {
  if (xs.size() != ys.size()) throw ConfigError("svg_polyline: size mismatch");
  std::ostringstream os;
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ' ';
    os << fmt(xs[i]) << ',' << fmt(ys[i]);
  }
  os << "\"/>";
  return os.str();
}

void plot_cost(const TraceData& trace, int window, const std::string& path) {
  std::vector<double> cost;
  cost.reserve(trace.records.size());
  for (const RoundRecord& r : trace.records) cost.push_back(r.cost);
  const std::vector<double> avg = moving_average(cost, window);
  if (avg.empty()) throw ConfigError("plot_cost: trace shorter than the averaging window");

  Frame f{static_cast<double>(window - 1), static_cast<double>(window - 1 + avg.size() - 1),
          0.0, *std::max_element(avg.begin(), avg.end()) * 1.05 + 1e-12};
  // Thin long series to at most ~2000 points to keep figures small.
  const size_t stride = std::max<size_t>(1, avg.size() / 2000);
  std::vector<double> pxs, pys;
  for (size_t i = 0; i < avg.size(); i += stride) {
    pxs.push_back(f.px(static_cast<double>(window - 1 + i)));
    pys.push_back(f.py(avg[i]));
  }
  std::ofstream out = open_file(path);
  open_svg(out, "Moving-average control cost (window " + std::to_string(window) + ")");
  axes(out, f, "round", "cost");
  out << svg_polyline(pxs, pys, "#1f5fa8") << "\n</svg>\n";
}

void plot_allocation(const TraceData& trace, const std::string& path) {
  const int N = trace.n_agents;
  std::vector<int64_t> grants(N, 0), txs(N, 0);
  for (const RoundRecord& r : trace.records)
    for (int i = 0; i < N; ++i) {
      grants[i] += r.granted[i];
      txs[i] += r.transmitted[i];
    }
  const int64_t top = std::max<int64_t>(1, *std::max_element(grants.begin(), grants.end()));

  Frame f{-0.5, N - 0.5, 0.0, static_cast<double>(top) * 1.05};
  std::ofstream out = open_file(path);
  open_svg(out, "Per-agent slot grants (blue) and transmissions (orange)");
  axes(out, f, "agent id", "count");
  const double band = (kWidth - 2 * kMargin) / N;
  for (int i = 0; i < N; ++i) {
    const double x0 = kMargin + i * band;
    const double gh = f.py(0.0) - f.py(static_cast<double>(grants[i]));
    const double th = f.py(0.0) - f.py(static_cast<double>(txs[i]));
    out << "<rect x=\"" << x0 + band * 0.1 << "\" y=\"" << f.py(0.0) - gh << "\" width=\""
        << band * 0.35 << "\" height=\"" << gh << "\" fill=\"#1f5fa8\"/>\n"
        << "<rect x=\"" << x0 + band * 0.55 << "\" y=\"" << f.py(0.0) - th << "\" width=\""
        << band * 0.35 << "\" height=\"" << th << "\" fill=\"#e58a2f\"/>\n"
        << "<text x=\"" << x0 + band / 2 << "\" y=\"" << kHeight - kMargin + 18
        << "\" text-anchor=\"middle\" font-size=\"10\" font-family=\"sans-serif\">" << i
        << "</text>\n";
  }
  out << "</svg>\n";
}

void plot_priority_histogram(const TraceData& trace, const std::string& path) {
  const int N = trace.n_agents;
  int bins = 0;
  for (const RoundRecord& r : trace.records)
    for (int i = 0; i < N; ++i) bins = std::max(bins, r.q[i] + 1);
  bins = std::max(bins, 2);

  std::vector<int64_t> pooled(bins, 0);
  std::vector<int64_t> per_agent(N, 0);
  for (const RoundRecord& r : trace.records)
    for (int i = 0; i < N; ++i) {
      pooled[r.q[i]] += 1;
      per_agent[i] += r.q[i];
    }
  const int talker = static_cast<int>(
      std::max_element(per_agent.begin(), per_agent.end()) - per_agent.begin());
  std::vector<int64_t> talker_hist(bins, 0);
  for (const RoundRecord& r : trace.records) talker_hist[r.q[talker]] += 1;

  const int64_t top = std::max<int64_t>(1, *std::max_element(pooled.begin(), pooled.end()));
  Frame f{-0.5, bins - 0.5, 0.0, static_cast<double>(top) * 1.05};
  std::ofstream out = open_file(path);
  open_svg(out, "Quantized priority distribution: all agents (blue), agent " +
                    std::to_string(talker) + " (orange)");
  axes(out, f, "quantized priority", "rounds");
  const double band = (kWidth - 2 * kMargin) / bins;
  for (int b = 0; b < bins; ++b) {
    const double x0 = kMargin + b * band;
    const double ph = f.py(0.0) - f.py(static_cast<double>(pooled[b]));
    const double th = f.py(0.0) - f.py(static_cast<double>(talker_hist[b]));
    out << "<rect x=\"" << x0 + band * 0.1 << "\" y=\"" << f.py(0.0) - ph << "\" width=\""
        << band * 0.35 << "\" height=\"" << ph << "\" fill=\"#1f5fa8\"/>\n"
        << "<rect x=\"" << x0 + band * 0.55 << "\" y=\"" << f.py(0.0) - th << "\" width=\""
        << band * 0.35 << "\" height=\"" << th << "\" fill=\"#e58a2f\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace priosim

#ifndef PRIOSIM_PLOT_HPP_
#define PRIOSIM_PLOT_HPP_

#include <string>
#include <vector>

#include "priosim/trace.hpp"

namespace priosim {

// Self-contained SVG figures rendered straight from trace data.

// Moving-average cost curve over the run.
void plot_cost(const TraceData& trace, int window, const std::string& path);

// Per-agent grant and transmission counts as grouped bars.
void plot_allocation(const TraceData& trace, const std::string& path);

// Distribution of quantized priorities, one bar group per value, one series
// per agent class of interest (here: all agents pooled plus the top talker).
void plot_priority_histogram(const TraceData& trace, const std::string& path);

// Shared low-level helpers, exposed for tests.
std::string svg_polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                         const std::string& color);

}  // namespace priosim

#endif  // PRIOSIM_PLOT_HPP_

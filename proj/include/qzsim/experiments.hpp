// experiments.hpp: free decay, single quench, periodic quench and sweeps.

#pragma once

#include "qzsim/model.hpp"
#include "qzsim/observables.hpp"
#include "qzsim/propagator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qzsim {

inline constexpr double default_dt_ns = 0.01;
inline constexpr double default_zeno_margin = 0.05;
inline constexpr int default_cycles = 5;

struct FreeDecayResult {
    Trajectory trajectory;
    TimeSeries survival;
    Eigen::MatrixXd sites;
    RateSeries rates;
    ZenoFit fit;
};

FreeDecayResult run_free_decay(const SystemParams& params, double t_end_ns, double dt_ns = default_dt_ns,
                               double fit_window_ns = default_fit_window_ns);

struct SingleQuenchResult {
    Trajectory trajectory;
    TimeSeries survival;
    TimeSeries concurrence;
    // max over s in [0, tau] of |P(tau + delta + s) - P(s)|
    double shape_distance;
};

SingleQuenchResult run_single_quench(const SystemParams& params, double tau_ns, double delta_ns,
                                     double dt_ns = default_dt_ns);

enum class ZenoVerdict { qze, aze, neutral };

std::string to_string(ZenoVerdict v);

/// QZE if p_quench > p_free (1 + margin), AZE if p_quench < p_free (1 - margin).
ZenoVerdict classify_zeno(double p_quench, double p_free, double margin = default_zeno_margin);

/// Periodic-quench run mapped onto accumulated on-time. Off segments are
/// excised, so every point of the on-time axis belongs to an on stage.
struct ZenoRunResult {
    std::vector<double> on_time_axis_ns;
    std::vector<double> p_quench;
    std::vector<double> p_free;
    std::vector<double> p_ideal;  // P(tau)^k, k = completed on stages
    std::vector<std::size_t> stage_end_index;  // axis index at on-time k*tau, k = 1..stages
    TimeSeries concurrence_full;
    Trajectory trajectory;
    ZenoVerdict verdict{ZenoVerdict::neutral};
};

ZenoVerdict classify_zeno(const ZenoRunResult& result, double margin = default_zeno_margin);

ZenoRunResult run_periodic_quench(const SystemParams& params, double tau_ns, double delta_ns, int cycles,
                                  double dt_ns = default_dt_ns, double margin = default_zeno_margin);

struct SweepGrid {
    std::vector<double> tau_ns;
    std::vector<double> delta_ns;
    std::vector<double> omega0_ghz;
};

struct SweepRow {
    double tau_ns;
    double delta_ns;
    double omega0_ghz;
    std::optional<ZenoVerdict> verdict;  // empty when the row failed
    double p_quench;
    double p_free;
    std::string error;
};

/// One row per grid point in lexicographic (tau, delta, omega0) order. Rows
/// run concurrently on up to `threads` workers (0 = hardware concurrency);
/// a failing row records its error and the sweep continues.
std::vector<SweepRow> sweep(const SystemParams& base, const SweepGrid& grid, int cycles, double dt_ns = default_dt_ns,
                            double margin = default_zeno_margin, unsigned threads = 0);

}  // namespace qzsim

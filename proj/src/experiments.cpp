#include "qzsim/experiments.hpp"

#include "qzsim/eigensolver.hpp"
#include "qzsim/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace qzsim {

namespace {

Eigensystem on_eigensystem(const SystemParams& params) {
    Eigensystem es = eig_sym(assemble_hamiltonian(params, params.g0_ghz));
    es.source_coupling_ghz = params.g0_ghz;
    return es;
}

double free_survival(const StateVector& initial, const Eigensystem& on, double t_ns) {
    return std::norm(evolve_segment(initial, on, t_ns).emitter());
}

}  // namespace

FreeDecayResult run_free_decay(const SystemParams& params, double t_end_ns, double dt_ns, double fit_window_ns) {
    const auto protocol = protocol_segments({.kind = ProtocolKind::free, .total_ns = t_end_ns, .g0_ghz = params.g0_ghz});
    FreeDecayResult r;
    r.trajectory = propagate(params, protocol, dt_ns, StateVector::emitter_excited(params.n_sites));
    r.survival = survival_probability(r.trajectory);
    r.sites = site_populations(r.trajectory);
    r.rates = decay_rates(r.trajectory);
    r.fit = fit_zeno_time(r.survival, std::min(fit_window_ns, t_end_ns));
    return r;
}

SingleQuenchResult run_single_quench(const SystemParams& params, double tau_ns, double delta_ns, double dt_ns) {
    const auto protocol = protocol_segments(
        {.kind = ProtocolKind::single_quench, .tau_ns = tau_ns, .delta_ns = delta_ns, .g0_ghz = params.g0_ghz});
    const auto initial = StateVector::emitter_excited(params.n_sites);

    SingleQuenchResult r;
    r.trajectory = propagate(params, protocol, dt_ns, initial);
    r.survival = survival_probability(r.trajectory);
    r.concurrence = concurrence_qubit_site0(r.trajectory);

    // The first on stage is plain free decay, so P(s) is evaluated exactly
    // rather than read off the grid.
    const Eigensystem on = on_eigensystem(params);
    const double restart = tau_ns + delta_ns;
    const double tol = 1e-9 * dt_ns;
    r.shape_distance = 0.0;
    for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
        const double s = r.trajectory.times_ns[i] - restart;
        if (s < -tol) continue;
        const double p_first = free_survival(initial, on, std::max(s, 0.0));
        r.shape_distance = std::max(r.shape_distance, std::abs(r.survival.values[i] - p_first));
    }
    return r;
}

std::string to_string(ZenoVerdict v) {
    switch (v) {
    case ZenoVerdict::qze: return "QZE";
    case ZenoVerdict::aze: return "AZE";
    case ZenoVerdict::neutral: break;
    }
    return "neutral";
}

ZenoVerdict classify_zeno(double p_quench, double p_free, double margin) {
    if (p_quench > p_free * (1.0 + margin)) return ZenoVerdict::qze;
    if (p_quench < p_free * (1.0 - margin)) return ZenoVerdict::aze;
    return ZenoVerdict::neutral;
}

ZenoVerdict classify_zeno(const ZenoRunResult& result, double margin) {
    if (result.p_quench.empty() || result.p_free.size() != result.p_quench.size())
        throw InvalidValue("result", "curves are not aligned on the on-time axis");
    return classify_zeno(result.p_quench.back(), result.p_free.back(), margin);
}

ZenoRunResult run_periodic_quench(const SystemParams& params, double tau_ns, double delta_ns, int cycles,
                                  double dt_ns, double margin) {
    const auto protocol = protocol_segments({.kind = ProtocolKind::periodic,
                                             .tau_ns = tau_ns,
                                             .delta_ns = delta_ns,
                                             .cycles = cycles,
                                             .g0_ghz = params.g0_ghz});
    const auto initial = StateVector::emitter_excited(params.n_sites);

    ZenoRunResult r;
    r.trajectory = propagate(params, protocol, dt_ns, initial);
    r.concurrence_full = concurrence_qubit_site0(r.trajectory);

    const Eigensystem on = on_eigensystem(params);
    const double p_tau = free_survival(initial, on, tau_ns);

    // Segment boundaries rebuilt with the same summation order as propagate,
    // so boundary grid points compare exactly.
    const auto& segs = protocol.segments;
    std::vector<double> seg_end(segs.size());
    {
        double t = 0.0;
        for (std::size_t s = 0; s < segs.size(); ++s) seg_end[s] = t += segs[s].duration_ns;
    }
    auto is_on = [](std::size_t s) { return s % 2 == 0; };

    std::size_t seg = 0;
    double seg_start = 0.0;
    double on_before = 0.0;  // on-time of the segments that ended at or before seg_start
    const double tol = 1e-9 * dt_ns;
    const auto& times = r.trajectory.times_ns;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        while (seg + 1 < segs.size() && t >= seg_end[seg]) {
            if (is_on(seg)) on_before += segs[seg].duration_ns;
            seg_start = seg_end[seg];
            ++seg;
        }
        const double on_time = is_on(seg) ? on_before + (t - seg_start) : on_before;
        if (!r.on_time_axis_ns.empty() && on_time <= r.on_time_axis_ns.back()) continue;

        const int completed = static_cast<int>(std::floor((on_time + tol) / tau_ns));
        r.on_time_axis_ns.push_back(on_time);
        r.p_quench.push_back(std::norm(r.trajectory.emitter(i)));
        r.p_free.push_back(free_survival(initial, on, on_time));
        r.p_ideal.push_back(std::pow(p_tau, completed));
        if (completed > static_cast<int>(r.stage_end_index.size()))
            r.stage_end_index.push_back(r.on_time_axis_ns.size() - 1);
    }
    r.verdict = classify_zeno(r, margin);
    return r;
}

std::vector<SweepRow> sweep(const SystemParams& base, const SweepGrid& grid, int cycles, double dt_ns, double margin,
                            unsigned threads) {
    if (grid.tau_ns.empty() || grid.delta_ns.empty() || grid.omega0_ghz.empty())
        throw InvalidValue("grid", "every axis needs at least one value");

    std::vector<SweepRow> rows;
    for (double tau : grid.tau_ns)
        for (double delta : grid.delta_ns)
            for (double w0 : grid.omega0_ghz) rows.push_back({tau, delta, w0, std::nullopt, 0.0, 0.0, {}});

    auto run_row = [&](SweepRow& row) {
        try {
            SystemParams p = base;
            p.omega0_ghz = row.omega0_ghz;
            p.validate();
            const auto res = run_periodic_quench(p, row.tau_ns, row.delta_ns, cycles, dt_ns, margin);
            row.verdict = res.verdict;
            row.p_quench = res.p_quench.back();
            row.p_free = res.p_free.back();
        } catch (const std::exception& e) {
            row.error = e.what();
            row.p_quench = row.p_free = std::nan("");
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(rows.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < rows.size(); i = next++) run_row(rows[i]);
        });
    }
    pool.clear();
    return rows;
}

}  // namespace qzsim

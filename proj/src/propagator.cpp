#include "qzsim/propagator.hpp"

#include "qzsim/error.hpp"

#include <cmath>
#include <map>

namespace qzsim {

StateVector::StateVector(Eigen::VectorXcd amplitudes, double time_ns)
    : amps_(std::move(amplitudes)), time_ns_(time_ns) {
    if (amps_.size() < 2) throw InvalidValue("state", "needs the emitter and at least one site");
}

StateVector StateVector::emitter_excited(int n_sites, double time_ns) {
    if (n_sites < 1) throw InvalidValue("n_sites", "must be at least 1");
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n_sites + 1);
    a(0) = 1.0;
    return {std::move(a), time_ns};
}

StateVector evolve_segment(const StateVector& state, const Eigensystem& eig, double duration_ns) {
    const auto& c = state.amplitudes();
    if (c.size() != eig.dim()) throw InvalidValue("state", "dimension does not match the eigensystem");
    if (duration_ns == 0.0) return {c, state.time_ns()};

    const auto& v = eig.eigenvectors;
    // V is real: project real and imaginary parts separately.
    const Eigen::VectorXd re = v.transpose() * c.real();
    const Eigen::VectorXd im = v.transpose() * c.imag();
    Eigen::VectorXd rot_re(eig.dim());
    Eigen::VectorXd rot_im(eig.dim());
    for (Eigen::Index k = 0; k < eig.dim(); ++k) {
        const double phase = -eig.eigenvalues(k) * duration_ns;
        const double cs = std::cos(phase);
        const double sn = std::sin(phase);
        rot_re(k) = cs * re(k) - sn * im(k);
        rot_im(k) = sn * re(k) + cs * im(k);
    }
    Eigen::VectorXcd out(eig.dim());
    out.real() = v * rot_re;
    out.imag() = v * rot_im;
    return {std::move(out), state.time_ns() + duration_ns};
}

StateVector Trajectory::state(std::size_t i) const {
    return {amplitudes.col(static_cast<Eigen::Index>(i)), times_ns[i]};
}

Trajectory propagate(const SystemParams& params, const QuenchProtocol& protocol, double dt_ns,
                     const StateVector& initial) {
    params.validate();
    if (!std::isfinite(dt_ns) || dt_ns <= 0.0) throw InvalidValue("dt_ns", "must be positive");
    if (protocol.segments.empty()) throw InvalidValue("protocol", "has no segments");
    for (const auto& s : protocol.segments) {
        if (!std::isfinite(s.duration_ns) || s.duration_ns <= 0.0)
            throw InvalidValue("protocol", "segment durations must be positive");
    }
    if (initial.n_sites() != params.n_sites) throw InvalidValue("initial", "dimension does not match n_sites");
    if (std::abs(initial.norm_squared() - 1.0) > 1e-10) throw InvalidValue("initial", "state is not normalized");

    std::map<double, Eigensystem> cache;
    auto eigensystem_for = [&](double g) -> const Eigensystem& {
        auto it = cache.find(g);
        if (it == cache.end()) {
            Eigensystem es = eig_sym(assemble_hamiltonian(params, g));
            es.source_coupling_ghz = g;
            it = cache.emplace(g, std::move(es)).first;
        }
        return it->second;
    };

    // A grid point this close to a segment end is merged into the boundary.
    const double merge_tol = 1e-9 * dt_ns;

    std::vector<double> times{0.0};
    std::vector<double> couplings;
    std::vector<Eigen::VectorXcd> states{initial.amplitudes()};

    StateVector seg_start(initial.amplitudes(), 0.0);
    double t0 = 0.0;
    for (const auto& seg : protocol.segments) {
        const Eigensystem& eig = eigensystem_for(seg.coupling_ghz);
        const double t1 = t0 + seg.duration_ns;
        couplings.push_back(seg.coupling_ghz);  // for the point at t0

        auto k = static_cast<long long>(std::floor(t0 / dt_ns)) + 1;
        for (;; ++k) {
            const double t = static_cast<double>(k) * dt_ns;
            if (t <= t0 + merge_tol) continue;
            if (t >= t1 - merge_tol) break;
            states.push_back(evolve_segment(seg_start, eig, t - t0).amplitudes());
            times.push_back(t);
            couplings.push_back(seg.coupling_ghz);
        }
        StateVector end = evolve_segment(seg_start, eig, seg.duration_ns);
        times.push_back(t1);
        states.push_back(end.amplitudes());
        seg_start = StateVector(end.amplitudes(), t1);
        t0 = t1;
    }
    couplings.push_back(protocol.segments.back().coupling_ghz);

    Trajectory traj;
    traj.params = params;
    traj.protocol = protocol;
    traj.times_ns = std::move(times);
    traj.coupling_at_ghz = std::move(couplings);
    traj.amplitudes.resize(params.dim(), static_cast<Eigen::Index>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) traj.amplitudes.col(static_cast<Eigen::Index>(i)) = states[i];
    return traj;
}

MeasurementOutcome ideal_measure(const StateVector& state) {
    const double p = std::norm(state.emitter());
    return {p, StateVector::emitter_excited(state.n_sites(), state.time_ns())};
}

}  // namespace qzsim

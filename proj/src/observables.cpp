#include "qzsim/observables.hpp"

#include "qzsim/eigensolver.hpp"
#include "qzsim/error.hpp"

#include <cmath>
#include <limits>

namespace qzsim {

TimeSeries survival_probability(const Trajectory& traj) {
    TimeSeries s;
    s.times_ns = traj.times_ns;
    s.values.reserve(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) s.values.push_back(std::norm(traj.emitter(i)));
    return s;
}

Eigen::MatrixXd site_populations(const Trajectory& traj) {
    const auto n = traj.params.n_sites;
    return traj.amplitudes.bottomRows(n).cwiseAbs2().transpose();
}

int wavefront_radius(const Trajectory& traj, std::size_t index, double fraction) {
    const Eigen::VectorXd pop = traj.amplitudes.col(static_cast<Eigen::Index>(index)).tail(traj.params.n_sites).cwiseAbs2();
    const double threshold = fraction * pop.maxCoeff();
    if (threshold <= 0.0) return 0;
    const int c = traj.params.center_site();
    int radius = 0;
    for (int l = 0; l < traj.params.n_sites; ++l)
        if (pop(l) >= threshold) radius = std::max(radius, std::abs(l - c));
    return radius;
}

RateSeries decay_rates(const Trajectory& traj, double eps_c) {
    const double level = emitter_level(traj.params);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    RateSeries r;
    r.frame = traj.params.frame;
    r.times_ns = traj.times_ns;
    r.omega_shift.reserve(traj.size());
    r.gamma.reserve(traj.size());
    r.valid.reserve(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const complex ce = traj.emitter(i);
        const double mod2 = std::norm(ce);
        if (std::sqrt(mod2) < eps_c) {
            r.omega_shift.push_back(nan);
            r.gamma.push_back(nan);
            r.valid.push_back(false);
            continue;
        }
        const double g = to_angular(traj.coupling_at_ghz[i]);
        const complex z = traj.center(i) * std::conj(ce);
        r.omega_shift.push_back(level + g * z.real() / mod2);
        r.gamma.push_back(-g * z.imag() / mod2);
        r.valid.push_back(true);
    }
    return r;
}

TimeSeries concurrence_qubit_site0(const Trajectory& traj) {
    TimeSeries s;
    s.times_ns = traj.times_ns;
    s.values.reserve(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i)
        s.values.push_back(2.0 * std::abs(traj.emitter(i)) * std::abs(traj.center(i)));
    return s;
}

namespace {

double quadratic_slope(const TimeSeries& s, double window) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double t = s.times_ns[i];
        if (t > window * (1.0 + 1e-12)) break;
        const double t2 = t * t;
        num += t2 * (1.0 - s.values[i]);
        den += t2 * t2;
    }
    if (den == 0.0) throw DegenerateFit("no samples with t > 0 inside the fit window");
    return num / den;
}

}  // namespace

ZenoFit fit_zeno_time(const TimeSeries& s, double window_ns) {
    if (!std::isfinite(window_ns) || window_ns <= 0.0) throw InvalidValue("window_ns", "must be positive");
    if (s.size() < 2 || s.times_ns.front() != 0.0 || std::abs(s.values.front() - 1.0) > 1e-12)
        throw InvalidValue("survival", "series must start at t=0 with P=1");
    if (s.times_ns.back() < window_ns * (1.0 - 1e-12)) throw InvalidValue("window_ns", "exceeds the series range");

    const double slope = quadratic_slope(s, window_ns);
    if (!(slope > 0.0)) throw DegenerateFit("non-positive quadratic slope " + std::to_string(slope));
    const double half = quadratic_slope(s, 0.5 * window_ns);
    return {1.0 / std::sqrt(slope), window_ns, slope,
            half > 0.0 ? 1.0 / std::sqrt(half) : std::numeric_limits<double>::infinity()};
}

double ideal_measurement_survival(double p_tau, int n) {
    if (!(p_tau >= 0.0 && p_tau <= 1.0)) throw InvalidValue("p_tau", "must lie in [0, 1]");
    if (n < 0) throw InvalidValue("n", "must be non-negative");
    return std::pow(p_tau, n);
}

BoundStateReport bound_state_analysis(const SystemParams& params, const BoundStateOptions& options) {
    params.validate();
    // Decoupled emitter: |e> is itself an exact stationary state.
    if (params.g0_ghz == 0.0) return {true, params.omega0_ghz, 1.0, 1.0};

    const Eigensystem es = eig_sym(assemble_hamiltonian(params, params.g0_ghz));
    const double offset = params.frame == Frame::rotating ? to_angular(params.omegac_ghz) : 0.0;
    const BandInfo band = band_info(params);
    const double lo = to_angular(band.band_min_ghz) - options.band_margin_rad_per_ns;
    const double hi = to_angular(band.band_max_ghz) + options.band_margin_rad_per_ns;

    BoundStateReport r;
    for (Eigen::Index m = 0; m < es.dim(); ++m) {
        const double w = es.eigenvectors(0, m) * es.eigenvectors(0, m);
        r.trapped_population_prediction += w * w;
        const double e_lab = es.eigenvalues(m) + offset;
        if ((e_lab < lo || e_lab > hi) && w > options.min_emitter_weight && w > r.emitter_weight) {
            r.exists = true;
            r.emitter_weight = w;
            r.energy_ghz = to_ghz(e_lab);
        }
    }
    return r;
}

}  // namespace qzsim

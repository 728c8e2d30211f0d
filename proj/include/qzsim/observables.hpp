// observables.hpp: quantities extracted from trajectories.

#pragma once

#include "qzsim/model.hpp"
#include "qzsim/propagator.hpp"

#include <Eigen/Dense>

#include <vector>

namespace qzsim {

struct TimeSeries {
    std::vector<double> times_ns;
    std::vector<double> values;

    std::size_t size() const noexcept { return times_ns.size(); }
};

/// P(t) = |c_e(t)|^2.
TimeSeries survival_probability(const Trajectory& traj);

/// Row i, column l: |c_l(t_i)|^2.
Eigen::MatrixXd site_populations(const Trajectory& traj);

/// Outermost distance from the central site (in sites) at which the
/// population still reaches `fraction` of the largest site population.
/// Takes the larger of the two sides.
int wavefront_radius(const Trajectory& traj, std::size_t index, double fraction = 0.1);

/// Instantaneous frequency shift and decay rate, Omega = -Im(dc/c) and
/// Gamma = -Re(dc/c) for c the emitter amplitude. The derivative comes from
/// the equation of motion, i dc_e/dt = h_ee c_e + g c_center, so
///   Omega = h_ee + g Re(c_center conj(c_e)) / |c_e|^2
///   Gamma =      - g Im(c_center conj(c_e)) / |c_e|^2
/// with h_ee the emitter level of the trajectory's frame. Both in rad/ns.
/// Points with |c_e| < eps_c are flagged invalid and hold NaN.
struct RateSeries {
    std::vector<double> times_ns;
    std::vector<double> omega_shift;
    std::vector<double> gamma;
    std::vector<bool> valid;
    Frame frame{Frame::rotating};
};

inline constexpr double default_eps_c = 1e-6;

RateSeries decay_rates(const Trajectory& traj, double eps_c = default_eps_c);

/// Concurrence between the emitter and the resonator it is coupled to,
/// C = 2 |c_e| |c_center|. See docs/concurrence.md for the reduction of the
/// Wootters formula to this form.
TimeSeries concurrence_qubit_site0(const Trajectory& traj);

struct ZenoFit {
    double tau_z_ns;
    double window_ns;
    double slope;                 // 1/ns^2
    double tau_z_half_window_ns;  // same fit over [0, window/2]
};

inline constexpr double default_fit_window_ns = 1.0;

/// Least-squares fit of 1 - P(t) = slope * t^2 over [0, window]; tau_z = 1/sqrt(slope).
/// Throws InvalidValue if the series does not start at t=0 with P=1 or does not
/// cover the window, DegenerateFit if slope <= 0.
ZenoFit fit_zeno_time(const TimeSeries& survival, double window_ns = default_fit_window_ns);

/// Survival after n ideal measurements at interval tau: P(tau)^n.
double ideal_measurement_survival(double p_tau, int n);

struct BoundStateReport {
    bool exists{false};
    double energy_ghz{0.0};  // lab-frame ordinary frequency of the strongest bound level
    double emitter_weight{0.0};
    double trapped_population_prediction{0.0};
};

struct BoundStateOptions {
    double min_emitter_weight{0.01};
    double band_margin_rad_per_ns{1e-9};
};

/// Diagonalizes the on-coupling Hamiltonian. A bound level is an eigenvalue
/// outside [omega_c - 2J, omega_c + 2J] carrying emitter weight above the
/// threshold; the report keeps the one with largest weight. The trapping
/// prediction is the diagonal-ensemble average sum_m |<e|m>|^4.
BoundStateReport bound_state_analysis(const SystemParams& params, const BoundStateOptions& options = {});

}  // namespace qzsim

// propagator.hpp: exact single-excitation evolution over piecewise-constant couplings.

#pragma once

#include "qzsim/eigensolver.hpp"
#include "qzsim/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace qzsim {

using complex = std::complex<double>;

/// Amplitudes over {|e,vac>, |g,1_0>, ..., |g,1_{N-1}>} at a time stamp.
class StateVector {
public:
    StateVector() = default;
    StateVector(Eigen::VectorXcd amplitudes, double time_ns);

    // Emitter excited, field in vacuum, emitter amplitude exactly 1.
    static StateVector emitter_excited(int n_sites, double time_ns = 0.0);

    complex emitter() const { return amps_(0); }
    complex site(int l) const { return amps_(1 + l); }
    int n_sites() const noexcept { return static_cast<int>(amps_.size()) - 1; }
    double time_ns() const noexcept { return time_ns_; }
    const Eigen::VectorXcd& amplitudes() const noexcept { return amps_; }
    double norm_squared() const { return amps_.squaredNorm(); }

private:
    Eigen::VectorXcd amps_;
    double time_ns_{0.0};
};

/// c(t + dt) = V exp(-i Lambda dt) V^T c(t). Negative durations run backwards.
StateVector evolve_segment(const StateVector& state, const Eigensystem& eig, double duration_ns);

/// Sampled evolution. Column i of `amplitudes` is the state at times_ns[i];
/// coupling_at_ghz[i] is the coupling active on [t_i, t_{i+1}) (the final
/// point repeats the last segment's value).
struct Trajectory {
    std::vector<double> times_ns;
    Eigen::MatrixXcd amplitudes;
    std::vector<double> coupling_at_ghz;
    QuenchProtocol protocol;
    SystemParams params;

    std::size_t size() const noexcept { return times_ns.size(); }
    complex emitter(std::size_t i) const { return amplitudes(0, static_cast<Eigen::Index>(i)); }
    complex center(std::size_t i) const {
        return amplitudes(params.center_index(), static_cast<Eigen::Index>(i));
    }
    StateVector state(std::size_t i) const;
};

/// Evolves `initial` through every segment of `protocol`, one cached
/// eigendecomposition per distinct coupling. Samples lie on the global grid
/// k*dt_ns plus every segment end; a boundary appears once. The trajectory
/// clock starts at 0 regardless of initial.time_ns().
Trajectory propagate(const SystemParams& params, const QuenchProtocol& protocol, double dt_ns,
                     const StateVector& initial);

struct MeasurementOutcome {
    double survival_probability;
    StateVector reset_state;
};

/// Projective measurement onto the emitter's excited state, keeping only the
/// survival branch: the reset state is |e,vac> with amplitude exactly 1 at the
/// same time stamp. With survival 0 the reset state is still returned; the
/// caller decides what a zero-probability branch means.
MeasurementOutcome ideal_measure(const StateVector& state);

}  // namespace qzsim

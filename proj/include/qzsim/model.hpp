// model.hpp: physical parameters, single-excitation Hamiltonians and quench schedules.
//
// Units: every user-facing frequency is an ordinary frequency in GHz, times are
// in ns. Dynamics run on angular frequencies in rad/ns (2*pi*GHz).
//
// Basis of the single-excitation sector, dimension n_sites + 1:
//   index 0      |e, vac>   emitter excited, field empty
//   index 1 + l  |g, 1_l>   one photon on resonator l, l = 0 .. n_sites-1
// The emitter couples to the central resonator l = (n_sites-1)/2.

#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <numbers>
#include <string>
#include <vector>

namespace qzsim {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double to_angular(double ghz) noexcept { return two_pi * ghz; }
constexpr double to_ghz(double rad_per_ns) noexcept { return rad_per_ns / two_pi; }

enum class Boundary { open, periodic };
enum class Frame { lab, rotating };

std::string to_string(Boundary b);
std::string to_string(Frame f);

struct SystemParams {
    double omega0_ghz{8.74};   // emitter transition frequency
    double omegac_ghz{8.74};   // resonator frequency
    double hop_ghz{0.05};      // nearest-neighbour hopping J
    double g0_ghz{0.05};       // coupling while the quench is "on"
    int n_sites{61};
    Boundary boundary{Boundary::open};
    Frame frame{Frame::rotating};

    int dim() const noexcept { return n_sites + 1; }
    int center_site() const noexcept { return (n_sites - 1) / 2; }
    // Basis index of the resonator the emitter talks to.
    int center_index() const noexcept { return 1 + center_site(); }
    double detuning_ghz() const noexcept { return omega0_ghz - omegac_ghz; }

    // Throws InvalidValue on the first violated invariant.
    void validate() const;

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

nlohmann::json to_json(const SystemParams& p);

// Builds validated parameters from a flat key-value document. Required keys:
// omega0_ghz, omegac_ghz, hop_ghz, g0_ghz, n_sites. Optional: boundary
// ("open"|"periodic", default open), frame ("lab"|"rotating", default rotating).
// Unknown keys are rejected.
SystemParams build_params(const nlohmann::json& raw_config);

// Real symmetric Hamiltonian in rad/ns for a given emitter-resonator coupling.
Eigen::MatrixXd assemble_hamiltonian(const SystemParams& params, double coupling_ghz);

// Diagonal offset of the emitter row (rad/ns) in the params' frame.
double emitter_level(const SystemParams& params) noexcept;

struct Segment {
    double duration_ns;
    double coupling_ghz;

    friend bool operator==(const Segment&, const Segment&) = default;
};

struct QuenchProtocol {
    std::vector<Segment> segments;

    double total_duration_ns() const noexcept;
    friend bool operator==(const QuenchProtocol&, const QuenchProtocol&) = default;
};

nlohmann::json to_json(const QuenchProtocol& p);
QuenchProtocol protocol_from_json(const nlohmann::json& j);

enum class ProtocolKind { free, single_quench, periodic };

struct ProtocolSpec {
    ProtocolKind kind{ProtocolKind::free};
    double tau_ns{1.0};
    double delta_ns{0.0};
    int cycles{1};
    double total_ns{70.0};
    double g0_ghz{0.05};
};

// free:          [(total, g0)]
// single_quench: [(tau, g0), (delta, 0), (tau, g0)]
// periodic:      cycles x [(tau, g0), (delta, 0)] followed by (tau, g0)
// Zero-length off segments are elided and the on segments around them merged.
// With delta > 0 segment i is an on stage iff i is even.
QuenchProtocol protocol_segments(const ProtocolSpec& spec);

struct BandInfo {
    double band_min_ghz;
    double band_max_ghz;
    double bandwidth_ghz;

    bool contains(double freq_ghz) const noexcept {
        return freq_ghz >= band_min_ghz && freq_ghz <= band_max_ghz;
    }
};

// Band of the resonator array, omega_c -/+ 2J, in ordinary (lab) frequency.
BandInfo band_info(const SystemParams& params);

}  // namespace qzsim

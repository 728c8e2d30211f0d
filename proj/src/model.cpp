#include "qzsim/model.hpp"

#include "qzsim/error.hpp"

#include <cmath>
#include <set>

namespace qzsim {

std::string to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }
std::string to_string(Frame f) { return f == Frame::lab ? "lab" : "rotating"; }

void SystemParams::validate() const {
    auto positive = [](const char* key, double v) {
        if (!std::isfinite(v) || v <= 0.0) throw InvalidValue(key, "must be a finite positive frequency");
    };
    auto non_negative = [](const char* key, double v) {
        if (!std::isfinite(v) || v < 0.0) throw InvalidValue(key, "must be finite and non-negative");
    };
    positive("omega0_ghz", omega0_ghz);
    positive("omegac_ghz", omegac_ghz);
    non_negative("hop_ghz", hop_ghz);
    non_negative("g0_ghz", g0_ghz);
    if (n_sites < 1) throw InvalidValue("n_sites", "must be at least 1");
    if (n_sites % 2 == 0) throw InvalidValue("n_sites", "must be odd so that a central resonator exists");
}

nlohmann::json to_json(const SystemParams& p) {
    return {{"omega0_ghz", p.omega0_ghz}, {"omegac_ghz", p.omegac_ghz}, {"hop_ghz", p.hop_ghz},
            {"g0_ghz", p.g0_ghz},         {"n_sites", p.n_sites},       {"boundary", to_string(p.boundary)},
            {"frame", to_string(p.frame)}};
}

namespace {

double number_at(const nlohmann::json& cfg, const char* key) {
    auto it = cfg.find(key);
    if (it == cfg.end()) throw MissingKey(key);
    if (!it->is_number()) throw InvalidValue(key, "expected a number");
    return it->get<double>();
}

}  // namespace

SystemParams build_params(const nlohmann::json& cfg) {
    if (!cfg.is_object()) throw InvalidValue("<config>", "expected a JSON object of key-value pairs");

    static const std::set<std::string> known{"omega0_ghz", "omegac_ghz", "hop_ghz", "g0_ghz",
                                             "n_sites",    "boundary",   "frame"};
    for (const auto& [key, _] : cfg.items()) {
        if (!known.contains(key)) throw InvalidValue(key, "unknown key");
    }

    SystemParams p;
    p.omega0_ghz = number_at(cfg, "omega0_ghz");
    p.omegac_ghz = number_at(cfg, "omegac_ghz");
    p.hop_ghz = number_at(cfg, "hop_ghz");
    p.g0_ghz = number_at(cfg, "g0_ghz");

    const double n = number_at(cfg, "n_sites");
    if (n != std::floor(n) || std::abs(n) > 1e6) throw InvalidValue("n_sites", "must be an integer");
    p.n_sites = static_cast<int>(n);

    if (auto it = cfg.find("boundary"); it != cfg.end()) {
        const auto s = it->is_string() ? it->get<std::string>() : std::string{};
        if (s == "open") p.boundary = Boundary::open;
        else if (s == "periodic") p.boundary = Boundary::periodic;
        else throw InvalidValue("boundary", "expected \"open\" or \"periodic\"");
    }
    if (auto it = cfg.find("frame"); it != cfg.end()) {
        const auto s = it->is_string() ? it->get<std::string>() : std::string{};
        if (s == "lab") p.frame = Frame::lab;
        else if (s == "rotating" || s == "rotating_at_omegac") p.frame = Frame::rotating;
        else throw InvalidValue("frame", "expected \"lab\" or \"rotating\"");
    }

    p.validate();
    return p;
}

double emitter_level(const SystemParams& p) noexcept {
    return p.frame == Frame::lab ? to_angular(p.omega0_ghz) : to_angular(p.omega0_ghz - p.omegac_ghz);
}

Eigen::MatrixXd assemble_hamiltonian(const SystemParams& p, double coupling_ghz) {
    p.validate();
    if (!std::isfinite(coupling_ghz) || coupling_ghz < 0.0)
        throw InvalidValue("coupling_ghz", "must be finite and non-negative");

    const int n = p.n_sites;
    const double hop = to_angular(p.hop_ghz);
    const double site_level = p.frame == Frame::lab ? to_angular(p.omegac_ghz) : 0.0;

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
    h(0, 0) = emitter_level(p);
    for (int l = 0; l < n; ++l) h(1 + l, 1 + l) = site_level;
    for (int l = 0; l + 1 < n; ++l) {
        h(1 + l, 2 + l) = -hop;
        h(2 + l, 1 + l) = -hop;
    }
    // a ring needs at least three sites for the closing bond to be distinct
    if (p.boundary == Boundary::periodic && n >= 3) {
        h(1, n) = -hop;
        h(n, 1) = -hop;
    }
    const double g = to_angular(coupling_ghz);
    h(0, p.center_index()) = g;
    h(p.center_index(), 0) = g;
    return h;
}

double QuenchProtocol::total_duration_ns() const noexcept {
    double total = 0.0;
    for (const auto& s : segments) total += s.duration_ns;
    return total;
}

nlohmann::json to_json(const QuenchProtocol& p) {
    auto segs = nlohmann::json::array();
    for (const auto& s : p.segments) segs.push_back({{"duration_ns", s.duration_ns}, {"coupling_ghz", s.coupling_ghz}});
    return {{"segments", segs}, {"total_duration_ns", p.total_duration_ns()}};
}

QuenchProtocol protocol_from_json(const nlohmann::json& j) {
    QuenchProtocol p;
    for (const auto& s : j.at("segments"))
        p.segments.push_back({s.at("duration_ns").get<double>(), s.at("coupling_ghz").get<double>()});
    return p;
}

QuenchProtocol protocol_segments(const ProtocolSpec& spec) {
    if (!std::isfinite(spec.g0_ghz) || spec.g0_ghz < 0.0) throw InvalidValue("g0_ghz", "must be non-negative");

    std::vector<Segment> raw;
    switch (spec.kind) {
    case ProtocolKind::free:
        if (!std::isfinite(spec.total_ns) || spec.total_ns <= 0.0) throw InvalidValue("total_ns", "must be positive");
        raw.push_back({spec.total_ns, spec.g0_ghz});
        break;
    case ProtocolKind::single_quench:
    case ProtocolKind::periodic: {
        if (!std::isfinite(spec.tau_ns) || spec.tau_ns <= 0.0) throw InvalidValue("tau_ns", "must be positive");
        if (!std::isfinite(spec.delta_ns) || spec.delta_ns < 0.0)
            throw InvalidValue("delta_ns", "must be non-negative");
        const int cycles = spec.kind == ProtocolKind::single_quench ? 1 : spec.cycles;
        if (cycles < 1) throw InvalidValue("cycles", "must be at least 1");
        for (int c = 0; c < cycles; ++c) {
            raw.push_back({spec.tau_ns, spec.g0_ghz});
            raw.push_back({spec.delta_ns, 0.0});
        }
        raw.push_back({spec.tau_ns, spec.g0_ghz});
        break;
    }
    }

    // Only neighbours of an elided segment merge, so with delta > 0 the
    // on/off alternation survives even when g0 == 0.
    QuenchProtocol out;
    bool elided = false;
    for (const auto& s : raw) {
        if (s.duration_ns == 0.0) {
            elided = true;
            continue;
        }
        if (elided && !out.segments.empty() && out.segments.back().coupling_ghz == s.coupling_ghz)
            out.segments.back().duration_ns += s.duration_ns;
        else
            out.segments.push_back(s);
        elided = false;
    }
    return out;
}

BandInfo band_info(const SystemParams& p) {
    p.validate();
    return {p.omegac_ghz - 2.0 * p.hop_ghz, p.omegac_ghz + 2.0 * p.hop_ghz, 4.0 * p.hop_ghz};
}

}  // namespace qzsim

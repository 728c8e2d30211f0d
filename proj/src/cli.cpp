#include "qzsim/cli.hpp"

#include "qzsim/error.hpp"
#include "qzsim/experiments.hpp"
#include "qzsim/observables.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#ifndef QZSIM_VERSION
#define QZSIM_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace qzsim::cli {

std::string tool_version() { return QZSIM_VERSION; }

nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json j;
    j["command"] = m.command;
    j["tool_version"] = m.tool_version;
    j["params"] = qzsim::to_json(m.params);
    j["protocol"] = m.protocol;
    j["dt_ns"] = m.dt_ns ? nlohmann::json(*m.dt_ns) : nlohmann::json(nullptr);
    j["settings"] = m.settings;
    j["outputs"] = m.outputs;
    j["wall_clock_seconds"] = m.wall_clock_seconds;
    j["units"] = {{"time", "ns"}, {"frequency", "GHz (ordinary)"}, {"rate", "1/ns"}};
    return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.params = build_params(j.at("params"));
    m.protocol = j.at("protocol");
    if (!j.at("dt_ns").is_null()) m.dt_ns = j.at("dt_ns").get<double>();
    m.settings = j.at("settings");
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    return m;
}

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Numbers in JSON outputs go through the same 12-digit formatting as CSV.
nlohmann::json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return nlohmann::json::parse(fmt(v));
}

class OutputDir {
public:
    explicit OutputDir(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory '" + dir + "'");
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path path = dir_ / name;
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
        os << content;
        os.flush();
        if (!os) throw IoError("failed writing '" + path.string() + "'");
        files_.push_back(path.string());
    }

    void write_json(const std::string& name, const nlohmann::json& j) { write(name, j.dump(2) + "\n"); }

    const std::vector<std::string>& files() const noexcept { return files_; }
    const fs::path& path() const noexcept { return dir_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

class Csv {
public:
    explicit Csv(const std::vector<std::string>& header) { row(header); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << cells[i];
        }
        os_ << '\n';
    }

    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
};

// Run settings that may come from the config file and be overridden by flags.
const std::vector<std::string> run_keys{"t_end_ns", "dt_ns", "tau_ns", "delta_ns", "cycles", "fit_window_ns", "margin"};

struct Config {
    SystemParams params;
    nlohmann::json run;  // subset of run_keys present in the file
};

Config load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidValue("config", "cannot read '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidValue("config", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw InvalidValue("config", "expected a JSON object");
    Config c;
    c.run = nlohmann::json::object();
    for (const auto& k : run_keys) {
        if (j.contains(k)) {
            if (!j[k].is_number()) throw InvalidValue(k, "expected a number");
            c.run[k] = j[k];
            j.erase(k);
        }
    }
    c.params = build_params(j);
    return c;
}

// Precedence: flag > config file > default.
double resolve(const CLI::Option* flag, double flag_value, const Config& cfg, const std::string& key, double fallback) {
    if (flag && flag->count() > 0) return flag_value;
    if (cfg.run.contains(key)) return cfg.run[key].get<double>();
    return fallback;
}

void require_positive(const std::string& key, double v) {
    if (!std::isfinite(v) || v <= 0.0) throw InvalidValue(key, "must be positive");
}

void require_non_negative(const std::string& key, double v) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidValue(key, "must be non-negative");
}

int require_count(const std::string& key, double v) {
    if (!std::isfinite(v) || v < 1.0 || v != std::floor(v)) throw InvalidValue(key, "must be a positive integer");
    return static_cast<int>(v);
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void finish(OutputDir& out, RunManifest m, const Timer& timer, std::ostream& log) {
    m.tool_version = tool_version();
    m.outputs = out.files();
    m.outputs.push_back((out.path() / "manifest.json").string());
    m.wall_clock_seconds = timer.seconds();
    out.write_json("manifest.json", to_json(m));
    log << "wrote " << m.outputs.size() << " files to " << out.path().string() << "\n";
}

struct Common {
    std::string config;
    std::string out_dir{"out"};
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("config", c.config, "JSON configuration file")->required();
    sub->add_option("--out-dir", c.out_dir, "Directory for output files")->capture_default_str();
}

int cmd_free(const Common& c, const CLI::Option* t_end_opt, double t_end_flag, const CLI::Option* dt_opt,
             double dt_flag, const CLI::Option* win_opt, double win_flag, std::ostream& log) {
    Timer timer;
    const Config cfg = load_config(c.config);
    const double t_end = resolve(t_end_opt, t_end_flag, cfg, "t_end_ns", 70.0);
    const double dt = resolve(dt_opt, dt_flag, cfg, "dt_ns", default_dt_ns);
    const double window = resolve(win_opt, win_flag, cfg, "fit_window_ns", default_fit_window_ns);
    require_positive("t_end_ns", t_end);
    require_positive("dt_ns", dt);
    require_positive("fit_window_ns", window);

    const auto res = run_free_decay(cfg.params, t_end, dt, window);
    OutputDir out(c.out_dir);

    Csv pop({"t_ns", "P"});
    for (std::size_t i = 0; i < res.survival.size(); ++i) pop.row({fmt(res.survival.times_ns[i]), fmt(res.survival.values[i])});
    out.write("population.csv", pop.str());

    std::vector<std::string> header{"t_ns"};
    for (int l = 0; l < cfg.params.n_sites; ++l) header.push_back("site_" + std::to_string(l));
    Csv sites(header);
    for (Eigen::Index i = 0; i < res.sites.rows(); ++i) {
        std::vector<std::string> cells{fmt(res.trajectory.times_ns[static_cast<std::size_t>(i)])};
        for (Eigen::Index l = 0; l < res.sites.cols(); ++l) cells.push_back(fmt(res.sites(i, l)));
        sites.row(cells);
    }
    out.write("sites.csv", sites.str());

    // omega in GHz (Omega / 2pi, frame as in the manifest), gamma in 1/ns
    Csv rates({"t_ns", "omega", "gamma", "valid"});
    for (std::size_t i = 0; i < res.rates.times_ns.size(); ++i) {
        rates.row({fmt(res.rates.times_ns[i]), fmt(to_ghz(res.rates.omega_shift[i])), fmt(res.rates.gamma[i]),
                   res.rates.valid[i] ? "1" : "0"});
    }
    out.write("rates.csv", rates.str());

    out.write_json("zeno_fit.json", {{"tau_z_ns", num(res.fit.tau_z_ns)},
                                     {"window", num(res.fit.window_ns)},
                                     {"slope", num(res.fit.slope)},
                                     {"tau_z_half_window_ns", num(res.fit.tau_z_half_window_ns)}});

    finish(out,
           {.command = "free",
            .params = cfg.params,
            .protocol = to_json(res.trajectory.protocol),
            .dt_ns = dt,
            .settings = {{"t_end_ns", t_end}, {"fit_window_ns", window}}},
           timer, log);
    return ok;
}

int cmd_quench(const Common& c, double tau_flag, const CLI::Option* tau_opt, double delta_flag,
               const CLI::Option* delta_opt, double dt_flag, const CLI::Option* dt_opt, std::ostream& log) {
    Timer timer;
    const Config cfg = load_config(c.config);
    const double tau = resolve(tau_opt, tau_flag, cfg, "tau_ns", 1.0);
    const double delta = resolve(delta_opt, delta_flag, cfg, "delta_ns", 0.0);
    const double dt = resolve(dt_opt, dt_flag, cfg, "dt_ns", default_dt_ns);
    require_positive("tau_ns", tau);
    require_non_negative("delta_ns", delta);
    require_positive("dt_ns", dt);

    const auto res = run_single_quench(cfg.params, tau, delta, dt);
    OutputDir out(c.out_dir);

    Csv q({"t_ns", "P", "C", "g_active_ghz"});
    for (std::size_t i = 0; i < res.trajectory.size(); ++i) {
        q.row({fmt(res.trajectory.times_ns[i]), fmt(res.survival.values[i]), fmt(res.concurrence.values[i]),
               fmt(res.trajectory.coupling_at_ghz[i])});
    }
    out.write("quench.csv", q.str());
    out.write_json("shape_distance.json",
                   {{"shape_distance", num(res.shape_distance)}, {"tau_ns", num(tau)}, {"delta_ns", num(delta)}});

    finish(out,
           {.command = "quench",
            .params = cfg.params,
            .protocol = to_json(res.trajectory.protocol),
            .dt_ns = dt,
            .settings = {{"tau_ns", tau}, {"delta_ns", delta}}},
           timer, log);
    return ok;
}

struct ZenoFlags {
    double tau{1.0}, delta{13.0}, cycles{default_cycles}, dt{default_dt_ns}, margin{default_zeno_margin};
    CLI::Option *tau_opt{}, *delta_opt{}, *cycles_opt{}, *dt_opt{}, *margin_opt{};
};

int cmd_zeno(const Common& c, const ZenoFlags& f, std::ostream& log) {
    Timer timer;
    const Config cfg = load_config(c.config);
    const double tau = resolve(f.tau_opt, f.tau, cfg, "tau_ns", 1.0);
    const double delta = resolve(f.delta_opt, f.delta, cfg, "delta_ns", 13.0);
    const int cycles = require_count("cycles", resolve(f.cycles_opt, f.cycles, cfg, "cycles", default_cycles));
    const double dt = resolve(f.dt_opt, f.dt, cfg, "dt_ns", default_dt_ns);
    const double margin = resolve(f.margin_opt, f.margin, cfg, "margin", default_zeno_margin);
    require_positive("tau_ns", tau);
    require_non_negative("delta_ns", delta);
    require_positive("dt_ns", dt);
    require_non_negative("margin", margin);

    const auto res = run_periodic_quench(cfg.params, tau, delta, cycles, dt, margin);
    OutputDir out(c.out_dir);

    Csv z({"on_time_ns", "p_quench", "p_free", "p_ideal"});
    for (std::size_t i = 0; i < res.on_time_axis_ns.size(); ++i)
        z.row({fmt(res.on_time_axis_ns[i]), fmt(res.p_quench[i]), fmt(res.p_free[i]), fmt(res.p_ideal[i])});
    out.write("zeno.csv", z.str());

    Csv conc({"t_ns", "C"});
    for (std::size_t i = 0; i < res.concurrence_full.size(); ++i)
        conc.row({fmt(res.concurrence_full.times_ns[i]), fmt(res.concurrence_full.values[i])});
    out.write("concurrence.csv", conc.str());

    out.write_json("verdict.json", {{"verdict", to_string(res.verdict)},
                                    {"on_time_final_ns", num(res.on_time_axis_ns.back())},
                                    {"p_quench_final", num(res.p_quench.back())},
                                    {"p_free_final", num(res.p_free.back())},
                                    {"p_ideal_final", num(res.p_ideal.back())},
                                    {"margin", num(margin)}});

    finish(out,
           {.command = "zeno",
            .params = cfg.params,
            .protocol = to_json(res.trajectory.protocol),
            .dt_ns = dt,
            .settings = {{"tau_ns", tau}, {"delta_ns", delta}, {"cycles", cycles}, {"margin", margin}}},
           timer, log);
    return ok;
}

int cmd_bound_state(const Common& c, std::ostream& log) {
    Timer timer;
    const Config cfg = load_config(c.config);
    const auto r = bound_state_analysis(cfg.params);
    OutputDir out(c.out_dir);
    out.write_json("bound_state.json", {{"exists", r.exists},
                                        {"energy_ghz", num(r.energy_ghz)},
                                        {"emitter_weight", num(r.emitter_weight)},
                                        {"trapped_population_prediction", num(r.trapped_population_prediction)}});
    finish(out, {.command = "bound-state", .params = cfg.params, .settings = nlohmann::json::object()}, timer, log);
    return ok;
}

SweepGrid load_grid(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidValue("grid-file", "cannot read '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidValue("grid-file", std::string("malformed JSON: ") + e.what());
    }
    auto axis = [&](const char* key) {
        if (!j.is_object() || !j.contains(key)) throw MissingKey(key);
        const auto& a = j.at(key);
        if (!a.is_array() || a.empty()) throw InvalidValue(key, "must be a non-empty array");
        std::vector<double> v;
        for (const auto& x : a) {
            if (!x.is_number()) throw InvalidValue(key, "entries must be numbers");
            v.push_back(x.get<double>());
        }
        return v;
    };
    return {axis("tau_ns"), axis("delta_ns"), axis("omega0_ghz")};
}

int cmd_sweep(const Common& c, const std::string& grid_file, const ZenoFlags& f, std::ostream& log) {
    Timer timer;
    const Config cfg = load_config(c.config);
    const SweepGrid grid = load_grid(grid_file);
    const int cycles = require_count("cycles", resolve(f.cycles_opt, f.cycles, cfg, "cycles", default_cycles));
    const double dt = resolve(f.dt_opt, f.dt, cfg, "dt_ns", default_dt_ns);
    const double margin = resolve(f.margin_opt, f.margin, cfg, "margin", default_zeno_margin);
    require_positive("dt_ns", dt);
    require_non_negative("margin", margin);

    const auto rows = sweep(cfg.params, grid, cycles, dt, margin);
    OutputDir out(c.out_dir);
    Csv s({"tau_ns", "delta_ns", "omega0_ghz", "verdict", "p_quench", "p_free"});
    int failed = 0;
    for (const auto& r : rows) {
        s.row({fmt(r.tau_ns), fmt(r.delta_ns), fmt(r.omega0_ghz), r.verdict ? to_string(*r.verdict) : "error",
               fmt(r.p_quench), fmt(r.p_free)});
        if (!r.verdict) {
            ++failed;
            log << "row (tau=" << fmt(r.tau_ns) << ", delta=" << fmt(r.delta_ns) << ", omega0=" << fmt(r.omega0_ghz)
                << ") failed: " << r.error << "\n";
        }
    }
    out.write("sweep.csv", s.str());
    finish(out,
           {.command = "sweep",
            .params = cfg.params,
            .protocol = {{"tau_ns", grid.tau_ns}, {"delta_ns", grid.delta_ns}, {"omega0_ghz", grid.omega0_ghz}},
            .dt_ns = dt,
            .settings = {{"cycles", cycles}, {"margin", margin}, {"failed_rows", failed}}},
           timer, log);
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qzsim: emitter decay in a coupled-resonator array under coupling quenches"};
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1);

    Common common;

    auto* free = app.add_subcommand("free", "Free decay with constant coupling");
    add_common(free, common);
    double t_end = 70.0, free_dt = default_dt_ns, window = default_fit_window_ns;
    auto* t_end_opt = free->add_option("--t-end", t_end, "Simulated time in ns")->capture_default_str();
    auto* free_dt_opt = free->add_option("--dt", free_dt, "Sampling step in ns")->capture_default_str();
    auto* window_opt = free->add_option("--fit-window", window, "Zeno-time fit window in ns")->capture_default_str();

    auto* quench = app.add_subcommand("quench", "Single quench: on for tau, off for delta, on for tau");
    add_common(quench, common);
    double q_tau = 1.0, q_delta = 0.0, q_dt = default_dt_ns;
    auto* q_tau_opt = quench->add_option("--tau", q_tau, "Quench-on time in ns")->capture_default_str();
    auto* q_delta_opt = quench->add_option("--delta", q_delta, "Quench-off time in ns")->capture_default_str();
    auto* q_dt_opt = quench->add_option("--dt", q_dt, "Sampling step in ns")->capture_default_str();

    ZenoFlags zf;
    auto* zeno = app.add_subcommand("zeno", "Periodic quench compared with free decay and ideal measurements");
    add_common(zeno, common);
    zf.tau_opt = zeno->add_option("--tau", zf.tau, "Quench-on time in ns")->capture_default_str();
    zf.delta_opt = zeno->add_option("--delta", zf.delta, "Quench-off time in ns")->capture_default_str();
    zf.cycles_opt = zeno->add_option("--cycles", zf.cycles, "Number of off periods")->capture_default_str();
    zf.dt_opt = zeno->add_option("--dt", zf.dt, "Sampling step in ns")->capture_default_str();
    zf.margin_opt = zeno->add_option("--margin", zf.margin, "Relative margin for QZE/AZE")->capture_default_str();

    auto* bound = app.add_subcommand("bound-state", "Bound-state and population-trapping analysis");
    add_common(bound, common);

    ZenoFlags sf;
    std::string grid_file;
    auto* sw = app.add_subcommand("sweep", "Zeno verdicts over a grid of (tau, delta, omega0)");
    add_common(sw, common);
    sw->add_option("--grid-file", grid_file, "JSON with arrays tau_ns, delta_ns, omega0_ghz")->required();
    sf.cycles_opt = sw->add_option("--cycles", sf.cycles, "Number of off periods")->capture_default_str();
    sf.dt_opt = sw->add_option("--dt", sf.dt, "Sampling step in ns")->capture_default_str();
    sf.margin_opt = sw->add_option("--margin", sf.margin, "Relative margin for QZE/AZE")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }

    try {
        if (free->parsed()) return cmd_free(common, t_end_opt, t_end, free_dt_opt, free_dt, window_opt, window, err);
        if (quench->parsed()) return cmd_quench(common, q_tau, q_tau_opt, q_delta, q_delta_opt, q_dt, q_dt_opt, err);
        if (zeno->parsed()) return cmd_zeno(common, zf, err);
        if (bound->parsed()) return cmd_bound_state(common, err);
        if (sw->parsed()) return cmd_sweep(common, grid_file, sf, err);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return io_error;
    } catch (const ConvergenceFailure& e) {
        err << "error: " << e.what() << "\n";
        return numerical_error;
    } catch (const DegenerateFit& e) {
        err << "error: " << e.what() << "\n";
        return numerical_error;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return usage_error;
    }
    return usage_error;
}

}  // namespace qzsim::cli

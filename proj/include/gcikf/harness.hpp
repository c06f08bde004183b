// Configuration-driven Monte-Carlo experiment runner: composes a benchmark
// system, noise models, and a set of filters; runs paired trials; computes
// per-timestep RMSE and ARMSE per state group; writes machine-readable
// reports.
//
// Determinism contract: (config, seed) fully determine summary.json,
// config_echo.json and every CSV, independent of the worker count.  Wall
// clock measurements go to a separate timing.json, which is the only
// machine-dependent output.
#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gcikf/filters.hpp"
#include "gcikf/noise.hpp"
#include "gcikf/power.hpp"
#include "gcikf/systems.hpp"

namespace gcikf {

struct ConfigError : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

enum class SystemKind { Scalar, Vehicle, Power };

struct FilterConfig {
    std::string name;
    FilterSpec spec;
};

struct ExperimentConfig {
    SystemKind system = SystemKind::Scalar;
    std::string network_path;           // power system data file
    bool vehicle_range_bearing = false; // sensitivity-study measurement variant
    int horizon = 100;
    int trials = 100;
    std::uint64_t seed = 1;
    UtParams ut{};
    std::vector<FilterConfig> filters;
    std::vector<NoiseModel> process_noise; // one per channel, or one replicated
    std::vector<NoiseModel> meas_noise;
    Vec x0_true, x0_est; // empty -> per-system defaults
    Mat P0;
    std::string output_dir = "out";
    double divergence_exit_threshold = 0.01;
    int threads = 1;

    void validate() const {
        if (trials < 1 || horizon < 1)
            throw ConfigError("config: trials and horizon must be >= 1");
        if (filters.empty())
            throw ConfigError("config: at least one filter required");
        std::set<std::string> names;
        for (const auto& f : filters)
            if (!names.insert(f.name).second)
                throw ConfigError("config: duplicate filter name '" + f.name + "'");
        if (process_noise.empty() || meas_noise.empty())
            throw ConfigError("config: process and measurement noise models required");
        if (system == SystemKind::Power && network_path.empty())
            throw ConfigError("config: power system requires a network file");
        if (threads < 1) throw ConfigError("config: threads must be >= 1");
    }
};

struct FilterReport {
    std::map<std::string, std::vector<double>> rmse_series; // group -> per-step
    std::map<std::string, double> armse;                    // group -> mean of series
    double mean_iterations = 0.0;
    double seconds_per_step = 0.0; // median across trials of per-trial means
    long divergences = 0;
    long guard_engagements = 0;
};

struct RunReport {
    std::map<std::string, FilterReport> filters;
    std::vector<std::string> groups; // group names in emit order
    long total_steps = 0;
};

/// Per-timestep RMSE over trials restricted to the given state components:
/// rmse[t] = sqrt( (1/M) sum_c || x_t^c - xhat_t^c ||^2 ).
inline std::vector<double> rmse(const std::vector<std::vector<Vec>>& truths,
                                const std::vector<std::vector<Vec>>& estimates,
                                const std::vector<int>& comps) {
    if (truths.size() != estimates.size() || truths.empty())
        throw LengthMismatch("rmse: trial counts differ or empty");
    const std::size_t T = truths.front().size();
    for (std::size_t c = 0; c < truths.size(); ++c)
        if (truths[c].size() != T || estimates[c].size() != T)
            throw LengthMismatch("rmse: trajectory lengths differ");
    std::vector<double> out(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        double acc = 0.0;
        for (std::size_t c = 0; c < truths.size(); ++c) {
            for (int k : comps) {
                const double d = truths[c][t](k) - estimates[c][t](k);
                acc += d * d;
            }
        }
        out[t] = std::sqrt(acc / static_cast<double>(truths.size()));
    }
    return out;
}

namespace detail {

struct SystemSetup {
    StateSpaceModel model;
    Vec x0_true, x0_est;
    Mat P0;
    std::map<std::string, std::vector<int>> groups;
    std::vector<std::string> group_order;
};

inline std::vector<NoiseModel> per_channel(const std::vector<NoiseModel>& models, int channels,
                                           const char* what) {
    if (static_cast<int>(models.size()) == channels) return models;
    if (models.size() == 1) return std::vector<NoiseModel>(channels, models.front());
    throw ConfigError(std::string("config: ") + what + " needs 1 or " +
                      std::to_string(channels) + " models, got " +
                      std::to_string(models.size()));
}

inline SystemSetup make_system(const ExperimentConfig& cfg) {
    SystemSetup s;
    switch (cfg.system) {
        case SystemKind::Scalar: {
            s.model = scalar_system();
            s.x0_true = Vec::Zero(1);
            s.x0_est = Vec::Zero(1);
            s.P0 = Mat::Identity(1, 1);
            s.groups["state"] = {0};
            s.group_order = {"state"};
            break;
        }
        case SystemKind::Vehicle: {
            s.model = vehicle_system(0.1, cfg.vehicle_range_bearing);
            s.x0_true = Vec(4);
            s.x0_true << 0.0, 10.0, 5.0, 10.0;
            s.x0_est = Vec::Ones(4);
            s.P0 = Mat::Identity(4, 4);
            s.groups["position"] = {0, 1};
            s.groups["velocity"] = {2, 3};
            s.group_order = {"position", "velocity"};
            break;
        }
        case SystemKind::Power: {
            PowerNetwork net = load_network(cfg.network_path);
            s.model = net.system();
            s.x0_true = net.true_initial_state();
            s.x0_est = net.flat_start_state();
            s.P0 = Mat::Identity(s.model.state_dim, s.model.state_dim) * 0.01;
            const int L = net.bus_count();
            std::vector<int> ang(L - 1), mag(L);
            for (int i = 0; i < L - 1; ++i) ang[i] = i;
            for (int i = 0; i < L; ++i) mag[i] = L - 1 + i;
            s.groups["angle"] = ang;
            s.groups["magnitude"] = mag;
            s.group_order = {"angle", "magnitude"};
            break;
        }
    }
    if (cfg.x0_true.size() > 0) s.x0_true = cfg.x0_true;
    if (cfg.x0_est.size() > 0) s.x0_est = cfg.x0_est;
    if (cfg.P0.size() > 0) s.P0 = cfg.P0;
    if (s.x0_true.size() != s.model.state_dim || s.x0_est.size() != s.model.state_dim)
        throw ConfigError("config: initial state dimension mismatch");

    // The filters assume the analytic covariance of each noise model.
    const auto wm = per_channel(cfg.process_noise, s.model.state_dim, "process noise");
    const auto vm = per_channel(cfg.meas_noise, s.model.meas_dim, "measurement noise");
    s.model.W = Mat::Zero(s.model.state_dim, s.model.state_dim);
    for (int i = 0; i < s.model.state_dim; ++i)
        s.model.W(i, i) = mixture_moments(wm[i]).second;
    s.model.V = Mat::Zero(s.model.meas_dim, s.model.meas_dim);
    for (int i = 0; i < s.model.meas_dim; ++i)
        s.model.V(i, i) = mixture_moments(vm[i]).second;
    return s;
}

struct TrialResult {
    // per filter: estimates[t], diagnostics tallies
    std::vector<std::vector<Vec>> estimates;
    std::vector<Vec> truth;
    std::vector<long> iterations;
    std::vector<long> divergences;
    std::vector<long> guards;
    std::vector<double> step_seconds; // per-filter mean seconds per step
};

inline TrialResult run_trial(const ExperimentConfig& cfg, const SystemSetup& sys, int trial) {
    const auto wm = per_channel(cfg.process_noise, sys.model.state_dim, "process noise");
    const auto vm = per_channel(cfg.meas_noise, sys.model.meas_dim, "measurement noise");

    SeededStream wstream(cfg.seed, 2 * static_cast<std::uint64_t>(trial));
    SeededStream vstream(cfg.seed, 2 * static_cast<std::uint64_t>(trial) + 1);

    // shared truth and measurement sequences, consumed by every filter
    std::vector<Vec> truth(cfg.horizon);
    std::vector<Vec> zs(cfg.horizon);
    Vec x = sys.x0_true;
    for (int t = 0; t < cfg.horizon; ++t) {
        Vec w(sys.model.state_dim), v(sys.model.meas_dim);
        for (int i = 0; i < sys.model.state_dim; ++i) w(i) = wstream.sample(wm[i]);
        for (int i = 0; i < sys.model.meas_dim; ++i) v(i) = vstream.sample(vm[i]);
        x = sys.model.f(x) + w;
        truth[t] = x;
        zs[t] = sys.model.h(x) + v;
    }

    TrialResult res;
    res.truth = std::move(truth);
    const std::size_t nf = cfg.filters.size();
    res.estimates.resize(nf);
    res.iterations.assign(nf, 0);
    res.divergences.assign(nf, 0);
    res.guards.assign(nf, 0);
    res.step_seconds.assign(nf, 0.0);

    for (std::size_t fi = 0; fi < nf; ++fi) {
        FilterSpec spec = cfg.filters[fi].spec;
        spec.ut = cfg.ut;
        Filter filt(sys.model, spec, SqrtBelief{sys.x0_est, cholesky_factor(sys.P0)});
        res.estimates[fi].resize(cfg.horizon);
        double elapsed = 0.0;
        for (int t = 0; t < cfg.horizon; ++t) {
            const auto t0 = std::chrono::steady_clock::now();
            StepDiagnostics d = filt.step(zs[t]);
            const auto t1 = std::chrono::steady_clock::now();
            elapsed += std::chrono::duration<double>(t1 - t0).count();
            res.estimates[fi][t] = filt.belief().x;
            res.iterations[fi] += d.iterations_used;
            if (d.divergence_flag) ++res.divergences[fi];
            if (d.guard_engaged) ++res.guards[fi];
        }
        res.step_seconds[fi] = elapsed / cfg.horizon;
    }
    return res;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace detail

/// Run the full Monte-Carlo experiment.  Trials are independent work items;
/// results land in per-trial slots so the aggregate is schedule independent.
inline RunReport run(const ExperimentConfig& cfg) {
    cfg.validate();
    detail::SystemSetup sys = detail::make_system(cfg);

    std::vector<detail::TrialResult> slots(cfg.trials);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int c = next.fetch_add(1);
            if (c >= cfg.trials) return;
            slots[c] = detail::run_trial(cfg, sys, c);
        }
    };
    if (cfg.threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int nthreads = std::min(cfg.threads, cfg.trials);
        pool.reserve(nthreads);
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    RunReport report;
    report.groups = sys.group_order;
    report.total_steps = static_cast<long>(cfg.trials) * cfg.horizon;

    std::vector<std::vector<Vec>> truths(cfg.trials);
    for (int c = 0; c < cfg.trials; ++c) truths[c] = slots[c].truth;

    for (std::size_t fi = 0; fi < cfg.filters.size(); ++fi) {
        FilterReport fr;
        std::vector<std::vector<Vec>> est(cfg.trials);
        std::vector<double> secs(cfg.trials);
        for (int c = 0; c < cfg.trials; ++c) {
            est[c] = slots[c].estimates[fi];
            secs[c] = slots[c].step_seconds[fi];
            fr.divergences += slots[c].divergences[fi];
            fr.guard_engagements += slots[c].guards[fi];
            fr.mean_iterations += static_cast<double>(slots[c].iterations[fi]);
        }
        fr.mean_iterations /= static_cast<double>(report.total_steps);
        fr.seconds_per_step = detail::median(secs);
        for (const auto& g : sys.group_order) {
            std::vector<double> series = rmse(truths, est, sys.groups.at(g));
            double acc = 0.0;
            for (double v : series) acc += v;
            fr.armse[g] = acc / static_cast<double>(series.size());
            fr.rmse_series[g] = std::move(series);
        }
        report.filters[cfg.filters[fi].name] = std::move(fr);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Config parsing (JSON)
// ---------------------------------------------------------------------------

namespace detail {

inline NoiseModel parse_noise_model(const nlohmann::json& j) {
    NoiseModel m;
    if (!j.contains("components") || !j["components"].is_array())
        throw ConfigError("noise model: missing 'components' array");
    for (const auto& jc : j["components"]) {
        NoiseComponent c;
        if (!jc.contains("weight") || !jc.contains("variance"))
            throw ConfigError("noise component: 'weight' and 'variance' required");
        c.weight = jc["weight"].get<double>();
        c.variance = jc["variance"].get<double>();
        c.mean = jc.value("mean", 0.0);
        const std::string fam = jc.value("family", "gaussian");
        if (fam == "gaussian") c.family = NoiseComponent::Family::Gaussian;
        else if (fam == "laplace") c.family = NoiseComponent::Family::Laplace;
        else throw ConfigError("noise component: unknown family '" + fam + "'");
        m.components.push_back(c);
    }
    m.validate();
    return m;
}

inline std::vector<NoiseModel> parse_noise_list(const nlohmann::json& j) {
    std::vector<NoiseModel> out;
    if (j.is_array())
        for (const auto& jm : j) out.push_back(parse_noise_model(jm));
    else
        out.push_back(parse_noise_model(j));
    return out;
}

inline FilterKind parse_kind(const std::string& k) {
    if (k == "ukf") return FilterKind::Ukf;
    if (k == "iukf") return FilterKind::Iukf;
    if (k == "sr-ukf") return FilterKind::SrUkf;
    if (k == "mcc-ukf") return FilterKind::MccUkf;
    if (k == "sr-ci-iukf") return FilterKind::SrCiIukf;
    if (k == "sr-gci-iukf") return FilterKind::SrGciIukf;
    if (k == "sr-gci-iukf-adapt") return FilterKind::SrGciIukfAdapt;
    throw ConfigError("config: unknown filter kind '" + k + "'");
}

inline FilterConfig parse_filter(const nlohmann::json& j) {
    FilterConfig fc;
    if (!j.contains("kind")) throw ConfigError("filter: 'kind' required");
    fc.spec.kind = parse_kind(j["kind"].get<std::string>());
    fc.name = j.value("name", to_string(fc.spec.kind));
    switch (fc.spec.kind) {
        case FilterKind::Ukf:
        case FilterKind::Iukf:
        case FilterKind::SrUkf:
            fc.spec.kernel = Kernel::uniform();
            break;
        case FilterKind::MccUkf:
            fc.spec.kernel = Kernel::mcc(j.value("sigma", 30.0));
            break;
        case FilterKind::SrCiIukf:
            fc.spec.kernel = Kernel::ci(j.value("sigma", 5.0));
            break;
        case FilterKind::SrGciIukf:
        case FilterKind::SrGciIukfAdapt:
            fc.spec.kernel =
                Kernel::gci(GciParams(j.value("delta", 1.8), j.value("theta", 15.0)));
            break;
    }
    fc.spec.iter_tol = j.value("iter_tol", 1e-6);
    fc.spec.iter_max = j.value("iter_max", 10);
    const std::string jm = j.value("jacobian", "analytic");
    if (jm == "analytic") fc.spec.jacobian_mode = JacobianMode::Analytic;
    else if (jm == "finite-difference") fc.spec.jacobian_mode = JacobianMode::FiniteDifference;
    else if (jm == "statistical") fc.spec.jacobian_mode = JacobianMode::Statistical;
    else throw ConfigError("filter: unknown jacobian mode '" + jm + "'");
    fc.spec.guard_sigma = j.value("guard_sigma", 2.5);
    fc.spec.guard_persist = j.value("guard_persist", 3);
    if (j.contains("adapt")) {
        const auto& ja = j["adapt"];
        if (ja.contains("delta_grid"))
            fc.spec.adapt.delta_grid = ja["delta_grid"].get<std::vector<double>>();
        if (ja.contains("theta_grid"))
            fc.spec.adapt.theta_grid = ja["theta_grid"].get<std::vector<double>>();
        fc.spec.adapt.window = ja.value("window", fc.spec.adapt.window);
        fc.spec.adapt.min_samples = ja.value("min_samples", fc.spec.adapt.min_samples);
        const std::string trig = ja.value("trigger", "every-step");
        if (trig == "every-step")
            fc.spec.adapt.trigger = AdaptConfig::Trigger::EveryStep;
        else if (trig == "on-innovation-change")
            fc.spec.adapt.trigger = AdaptConfig::Trigger::OnInnovationChange;
        else
            throw ConfigError("adapt: unknown trigger '" + trig + "'");
        fc.spec.adapt.trigger_threshold =
            ja.value("trigger_threshold", fc.spec.adapt.trigger_threshold);
    }
    return fc;
}

} // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    ExperimentConfig cfg;
    const std::string sys = j.value("system", "scalar");
    if (sys == "scalar") cfg.system = SystemKind::Scalar;
    else if (sys == "vehicle") cfg.system = SystemKind::Vehicle;
    else if (sys == "power") cfg.system = SystemKind::Power;
    else throw ConfigError("config: unknown system '" + sys + "'");
    cfg.network_path = j.value("network", "");
    cfg.vehicle_range_bearing = j.value("vehicle_range_bearing", false);
    cfg.horizon = j.value("horizon", 100);
    cfg.trials = j.value("trials", 100);
    cfg.seed = j.value("seed", static_cast<std::uint64_t>(1));
    cfg.output_dir = j.value("output", "out");
    cfg.threads = j.value("threads", 1);
    cfg.divergence_exit_threshold = j.value("divergence_exit_threshold", 0.01);
    if (j.contains("ut")) {
        cfg.ut.alpha = j["ut"].value("alpha", 1.0);
        cfg.ut.beta = j["ut"].value("beta", 2.0);
        cfg.ut.kappa = j["ut"].value("kappa", 0.0);
    }
    if (!j.contains("process_noise") || !j.contains("measurement_noise"))
        throw ConfigError("config: process_noise and measurement_noise required");
    cfg.process_noise = detail::parse_noise_list(j["process_noise"]);
    cfg.meas_noise = detail::parse_noise_list(j["measurement_noise"]);
    if (!j.contains("filters")) throw ConfigError("config: 'filters' required");
    for (const auto& jf : j["filters"]) cfg.filters.push_back(detail::parse_filter(jf));
    if (j.contains("init")) {
        const auto& ji = j["init"];
        if (ji.contains("x0_true")) {
            const auto v = ji["x0_true"].get<std::vector<double>>();
            cfg.x0_true = Eigen::Map<const Vec>(v.data(), v.size());
        }
        if (ji.contains("x0_est")) {
            const auto v = ji["x0_est"].get<std::vector<double>>();
            cfg.x0_est = Eigen::Map<const Vec>(v.data(), v.size());
        }
        if (ji.contains("P0_diag")) {
            const auto v = ji["P0_diag"].get<std::vector<double>>();
            cfg.P0 = Eigen::Map<const Vec>(v.data(), v.size()).asDiagonal();
        }
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }
    return parse_config(j);
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

namespace detail {

inline std::string sanitize(const std::string& name) {
    std::string out;
    for (char ch : name)
        out += (std::isalnum(static_cast<unsigned char>(ch)) ? ch : '-');
    return out;
}

inline nlohmann::json echo_noise(const std::vector<NoiseModel>& models) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& m : models) {
        nlohmann::json jm;
        jm["components"] = nlohmann::json::array();
        for (const auto& c : m.components) {
            jm["components"].push_back(
                {{"weight", c.weight},
                 {"family", c.family == NoiseComponent::Family::Gaussian ? "gaussian" : "laplace"},
                 {"mean", c.mean},
                 {"variance", c.variance}});
        }
        arr.push_back(jm);
    }
    return arr;
}

} // namespace detail

/// Write summary.json, one rmse_<filter>_<group>.csv per filter and group,
/// config_echo.json, and timing.json (the only machine-dependent file).
inline void emit_report(const RunReport& report, const ExperimentConfig& cfg,
                        const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("emit_report: cannot create " + dir);

    auto write_text = [&](const std::string& name, const std::string& body) {
        std::ofstream out(dir + "/" + name, std::ios::binary);
        if (!out) throw IoError("emit_report: cannot write " + name);
        out << body;
    };

    nlohmann::json summary;
    summary["system"] = cfg.system == SystemKind::Scalar
                            ? "scalar"
                            : (cfg.system == SystemKind::Vehicle ? "vehicle" : "power");
    summary["trials"] = cfg.trials;
    summary["horizon"] = cfg.horizon;
    summary["seed"] = cfg.seed;
    summary["filters"] = nlohmann::json::object();
    nlohmann::json timing;
    for (const auto& [name, fr] : report.filters) {
        nlohmann::json jf;
        jf["armse"] = fr.armse;
        jf["mean_iterations"] = fr.mean_iterations;
        jf["divergences"] = fr.divergences;
        jf["guard_engagements"] = fr.guard_engagements;
        summary["filters"][name] = jf;
        timing[name] = fr.seconds_per_step;
    }
    write_text("summary.json", summary.dump(2) + "\n");
    write_text("timing.json", timing.dump(2) + "\n");

    for (const auto& [name, fr] : report.filters) {
        for (const auto& [group, series] : fr.rmse_series) {
            std::string body = "step,rmse\n";
            char buf[64];
            for (std::size_t t = 0; t < series.size(); ++t) {
                std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", t + 1, series[t]);
                body += buf;
            }
            write_text("rmse_" + detail::sanitize(name) + "_" + group + ".csv", body);
        }
    }

    nlohmann::json echo;
    echo["system"] = summary["system"];
    echo["network"] = cfg.network_path;
    echo["vehicle_range_bearing"] = cfg.vehicle_range_bearing;
    echo["horizon"] = cfg.horizon;
    echo["trials"] = cfg.trials;
    echo["seed"] = cfg.seed;
    // worker count is an execution detail, not part of the experiment
    echo["divergence_exit_threshold"] = cfg.divergence_exit_threshold;
    echo["ut"] = {{"alpha", cfg.ut.alpha}, {"beta", cfg.ut.beta}, {"kappa", cfg.ut.kappa}};
    echo["process_noise"] = detail::echo_noise(cfg.process_noise);
    echo["measurement_noise"] = detail::echo_noise(cfg.meas_noise);
    echo["output"] = cfg.output_dir;
    echo["filters"] = nlohmann::json::array();
    for (const auto& f : cfg.filters) {
        nlohmann::json jf;
        jf["name"] = f.name;
        switch (f.spec.kind) {
            case FilterKind::Ukf: jf["kind"] = "ukf"; break;
            case FilterKind::Iukf: jf["kind"] = "iukf"; break;
            case FilterKind::SrUkf: jf["kind"] = "sr-ukf"; break;
            case FilterKind::MccUkf: jf["kind"] = "mcc-ukf"; break;
            case FilterKind::SrCiIukf: jf["kind"] = "sr-ci-iukf"; break;
            case FilterKind::SrGciIukf: jf["kind"] = "sr-gci-iukf"; break;
            case FilterKind::SrGciIukfAdapt: jf["kind"] = "sr-gci-iukf-adapt"; break;
        }
        if (f.spec.kernel.type == Kernel::Type::Gci) {
            jf["delta"] = f.spec.kernel.gci_params.delta;
            jf["theta"] = f.spec.kernel.gci_params.theta;
        } else if (!f.spec.kernel.is_uniform()) {
            jf["sigma"] = f.spec.kernel.sigma;
        }
        jf["iter_tol"] = f.spec.iter_tol;
        jf["iter_max"] = f.spec.iter_max;
        echo["filters"].push_back(jf);
    }
    write_text("config_echo.json", echo.dump(2) + "\n");
}

} // namespace gcikf

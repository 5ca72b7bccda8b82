// sevolab: simulation laboratory for doubly-damped sigma-evolution equations.
//
// Subcommands:
//   classify  critical/decay/lifespan exponents and theorem-region verdicts
//   simulate  one run of the spectral solver, trace CSV + summary JSON
//   decay     linear decay-rate experiment with log-log fit and SVG plot
//   lifespan  blow-up time sweep over data amplitudes, with resume support
//   check     the full invariant suite (exit 3 on any failure)

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <iostream>
#include <set>

#include "sevo/checks.hpp"
#include "sevo/diagnostics.hpp"
#include "sevo/io.hpp"
#include "sevo/model.hpp"
#include "sevo/propagator.hpp"
#include "sevo/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sevo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBlowup = 2;
constexpr int kExitCheckFailed = 3;
constexpr int kExitStepUnderflow = 5;
constexpr int kExitConfig = 64;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Strict key validation: unknown keys are hard errors (typos in exponent
// names must not pass silently).
void require_known_keys(const json& j, const std::string& path,
                        const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError("config error at " + path + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError("config error at " + path + ": unknown key '" + it.key() + "'");
        }
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

ModelParams parse_model(const json& cfg) {
    if (!cfg.contains("model")) throw ConfigError("config error: missing 'model' block");
    const json& j = cfg["model"];
    require_known_keys(j, "model", {"n", "sigma", "sigma1", "sigma2", "p", "eps"});
    ModelParams q;
    q.n = get_or(j, "n", 1);
    q.sigma = get_or(j, "sigma", 1.0);
    q.sigma1 = get_or(j, "sigma1", 0.0);
    q.sigma2 = get_or(j, "sigma2", 1.0);
    q.p = get_or(j, "p", 2.0);
    q.eps = get_or(j, "eps", 1.0);
    auto r = validate(q);
    if (!r.ok) throw ConfigError("config error at model: " + r.message());
    return q;
}

RegularityIndex parse_m(const json& cfg) {
    RegularityIndex m{get_or(cfg, "m", 1.0)};
    auto r = validate(m);
    if (!r.ok) throw ConfigError("config error at m: " + r.message());
    return m;
}

GridPtr parse_grid(const json& cfg) {
    if (!cfg.contains("grid")) throw ConfigError("config error: missing 'grid' block");
    const json& j = cfg["grid"];
    require_known_keys(j, "grid", {"L", "N", "n"});
    const int dim = get_or(j, "n", 1);
    try {
        return make_grid(dim, get_or(j, "L", 100.0), get_or(j, "N", 1024));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config error at grid: ") + e.what());
    }
}

InitialDataOptions parse_initial(const json& cfg) {
    InitialDataOptions opt;
    if (!cfg.contains("initial")) return opt;
    const json& j = cfg["initial"];
    require_known_keys(j, "initial",
                       {"kind", "gaussian_width", "bump_width", "bump_normalization", "bump_scale", "mode_xi"});
    const std::string kind = get_or<std::string>(j, "kind", "gaussian");
    if (kind == "gaussian") {
        opt.kind = DataKind::Gaussian;
    } else if (kind == "single_mode") {
        opt.kind = DataKind::SingleMode;
    } else if (kind == "blowup_m1") {
        opt.kind = DataKind::BlowupM1;
    } else if (kind == "blowup_m_gt_1") {
        opt.kind = DataKind::BlowupMGt1;
    } else {
        throw ConfigError("config error at initial.kind: unknown kind '" + kind + "'");
    }
    opt.gaussian_width = get_or(j, "gaussian_width", 1.0);
    opt.bump_width = get_or(j, "bump_width", 4.0);
    const std::string norm = get_or<std::string>(j, "bump_normalization", "peak");
    if (norm == "peak") {
        opt.bump_norm = BumpNormalization::UnitPeak;
    } else if (norm == "mass") {
        opt.bump_norm = BumpNormalization::UnitMass;
    } else {
        throw ConfigError("config error at initial.bump_normalization: expected 'peak' or 'mass'");
    }
    opt.bump_scale = get_or(j, "bump_scale", 1.0);
    opt.mode_xi = get_or(j, "mode_xi", 1.0);
    return opt;
}

SolveOptions parse_integrator(const json& cfg, const ModelParams& params) {
    SolveOptions so;
    so.extra_lq = y_norm_q_list(params);
    if (!cfg.contains("integrator")) return so;
    const json& j = cfg["integrator"];
    require_known_keys(j, "integrator",
                       {"t_end", "h", "adaptive", "tol", "h_min", "h_max", "sample_dt",
                        "blowup_threshold", "nonlinear", "snapshot_every", "track_energy"});
    so.t_end = get_or(j, "t_end", 1.0);
    so.h0 = get_or(j, "h", 0.05);
    so.adaptive = get_or(j, "adaptive", true);
    so.tol = get_or(j, "tol", 1e-5);
    so.h_min = get_or(j, "h_min", 1e-7);
    so.h_max = get_or(j, "h_max", 0.5);
    so.sample_dt = get_or(j, "sample_dt", 0.1);
    so.blowup_threshold = get_or(j, "blowup_threshold", 0.0);
    so.nonlinear = get_or(j, "nonlinear", true);
    so.snapshot_every = get_or(j, "snapshot_every", 0);
    so.track_energy = get_or(j, "track_energy", false);
    return so;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config error: cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config error: " + path + " is not valid JSON");
    require_known_keys(j, "<root>",
                       {"model", "m", "grid", "initial", "integrator", "decay", "lifespan",
                        "classify", "check", "rng_seed", "output_dir"});
    return j;
}

fs::path resolve_output(const json& cfg, const std::string& override_dir) {
    fs::path dir = override_dir.empty()
                       ? fs::path(get_or<std::string>(cfg, "output_dir", "out"))
                       : fs::path(override_dir);
    fs::create_directories(dir);
    return dir;
}

std::string canonical_run_key(const json& cfg, double eps) {
    json key;
    key["model"] = cfg.value("model", json::object());
    key["m"] = cfg.value("m", 1.0);
    key["grid"] = cfg.value("grid", json::object());
    key["initial"] = cfg.value("initial", json::object());
    key["integrator"] = cfg.value("integrator", json::object());
    key["lifespan"] = cfg.value("lifespan", json::object());
    key["eps"] = format_double(eps);
    return hash_key(key.dump());
}

// ------------------------------------------------------------- classify ---

int cmd_classify(const json& cfg, const fs::path& outdir) {
    ModelParams base = parse_model(cfg);
    std::vector<int> n_list = {base.n};
    std::vector<double> m_list = {get_or(cfg, "m", 1.0)};
    std::vector<double> p_list = {base.p};
    if (cfg.contains("classify")) {
        const json& j = cfg["classify"];
        require_known_keys(j, "classify", {"n_list", "m_list", "p_list"});
        if (j.contains("n_list")) n_list = j["n_list"].get<std::vector<int>>();
        if (j.contains("m_list")) m_list = j["m_list"].get<std::vector<double>>();
        if (j.contains("p_list")) p_list = j["p_list"].get<std::vector<double>>();
    }

    json rows = json::array();
    std::printf("%4s %6s %6s %8s %9s %10s %9s  %-20s %s\n", "n", "m", "p", "p_crit",
                "alpha_u", "alpha_grad", "gamma_m", "verdict", "failed");
    for (int n : n_list) {
        for (double m : m_list) {
            for (double p : p_list) {
                ModelParams q = base;
                q.n = n;
                q.p = p;
                auto vr = validate(q);
                auto mr = validate(RegularityIndex{m});
                if (!vr.ok || !mr.ok) {
                    throw ConfigError("config error: " + vr.message() + mr.message());
                }
                json row = classification_report(q, {m});
                rows.push_back(row);
                std::string failed;
                for (const auto& s : row["failed_conditions"]) {
                    if (!failed.empty()) failed += ",";
                    failed += s.get<std::string>();
                }
                const std::string pc = row["p_crit"].is_number()
                                           ? format_double(row["p_crit"].get<double>())
                                           : "none";
                std::printf("%4d %6g %6g %8s %9.4f %10.4f %9.4f  %-20s %s\n", n, m, p,
                            pc.c_str(), row["alpha_u"].get<double>(),
                            row["alpha_grad"].get<double>(), row["gamma_m"].get<double>(),
                            row["verdict"].get<std::string>().c_str(), failed.c_str());
            }
        }
    }
    std::ofstream out(outdir / "classify.json");
    out << rows.dump(2) << "\n";
    std::printf("wrote %s\n", (outdir / "classify.json").c_str());
    return kExitOk;
}

// ------------------------------------------------------------- simulate ---

json trace_summary(const SimulationTrace& tr) {
    json s;
    s["status"] = to_string(tr.status);
    s["blowup_flag"] = tr.blowup_flag;
    if (tr.blowup_flag) s["T_blow"] = tr.t_blow;
    s["t_end_requested"] = tr.t_end_requested;
    s["samples"] = tr.samples.size();
    s["max_imag_residue"] = tr.max_imag_residue;
    s["zero_mode_flagged"] = tr.zero_mode_flagged;
    if (!tr.samples.empty()) {
        const auto& last = tr.samples.back();
        s["final"] = {{"t", last.t}, {"L2", last.l2}, {"Hsigma_dot", last.hsigma},
                      {"Linf", last.linf}};
    }
    return s;
}

int exit_code_for(const std::string& status) {
    if (status == "blew-up") return kExitBlowup;
    if (status == "step-underflow") return kExitStepUnderflow;
    return kExitOk;
}

int cmd_simulate(const json& cfg, const fs::path& outdir, bool resume) {
    ModelParams q = parse_model(cfg);
    RegularityIndex m = parse_m(cfg);
    GridPtr grid = parse_grid(cfg);
    InitialDataOptions data = parse_initial(cfg);
    SolveOptions so = parse_integrator(cfg, q);

    // a finished run with the same config key is a no-op under --resume
    const std::string key = canonical_run_key(cfg, q.eps);
    const fs::path summary_path = outdir / "summary.json";
    if (resume && fs::exists(summary_path)) {
        std::ifstream in(summary_path);
        json prev = json::parse(in, nullptr, false);
        if (!prev.is_discarded() && prev.value("run_key", "") == key) {
            std::printf("resume: outputs for this config are already present\n");
            return exit_code_for(prev.value("status", "completed"));
        }
    }

    FieldState init = make_initial_data(data, grid, q, m);
    SimulationTrace tr = solve(init, q, m, so);
    write_trace_csv(tr, outdir / "trace.csv");
    json summary = trace_summary(tr);
    summary["run_key"] = key;
    std::ofstream out(summary_path);
    out << summary.dump(2) << "\n";

    if (so.snapshot_every > 0 && !tr.snapshots.empty()) {
        Field last = field_from_physical(grid, tr.snapshots.back().u);
        write_field_binary(last, outdir / "final_field.bin");
        if (grid->dim == 1) write_field_csv_1d(last, outdir / "final_field.csv");
    }

    std::printf("status: %s", to_string(tr.status));
    if (tr.blowup_flag) std::printf(", T_blow = %s", format_double(tr.t_blow).c_str());
    std::printf("\nwrote %s\n", (outdir / "trace.csv").c_str());
    if (tr.status == RunStatus::BlewUp) return kExitBlowup;
    if (tr.status == RunStatus::StepUnderflow) return kExitStepUnderflow;
    return kExitOk;
}

// ---------------------------------------------------------------- decay ---

int cmd_decay(const json& cfg, const fs::path& outdir) {
    ModelParams q = parse_model(cfg);
    RegularityIndex m = parse_m(cfg);
    GridPtr grid = parse_grid(cfg);
    InitialDataOptions data = parse_initial(cfg);
    SolveOptions so = parse_integrator(cfg, q);

    FitWindow window{10.0, so.t_end};
    bool fit_l2 = true, fit_hsigma = true;
    if (cfg.contains("decay")) {
        const json& j = cfg["decay"];
        require_known_keys(j, "decay", {"window", "fit_l2", "fit_hsigma"});
        if (j.contains("window")) {
            auto w = j["window"].get<std::vector<double>>();
            if (w.size() != 2) throw ConfigError("config error at decay.window: need [lo, hi]");
            window = {w[0], w[1]};
        }
        fit_l2 = get_or(j, "fit_l2", true);
        fit_hsigma = get_or(j, "fit_hsigma", true);
    }

    FieldState init = make_initial_data(data, grid, q, m);
    SimulationTrace tr = solve(init, q, m, so);
    write_trace_csv(tr, outdir / "trace.csv");

    const auto predicted = decay_exponents(q, m);
    json rep;
    rep["alpha_u_predicted"] = predicted.alpha_u;
    rep["alpha_grad_predicted"] = predicted.alpha_grad;
    rep["window"] = {window.t_lo, window.t_hi};

    std::vector<PlotSeries> series;
    auto add_series = [&](NormKind kind, const char* label) {
        PlotSeries s;
        s.label = label;
        for (const auto& row : tr.samples) {
            if (row.t <= 0.0) continue;
            const double v = kind == NormKind::L2 ? row.l2 : row.hsigma;
            if (v <= 0.0) continue;
            s.x.push_back(std::log10(1.0 + row.t));
            s.y.push_back(std::log10(v));
        }
        series.push_back(std::move(s));
    };

    if (fit_l2) {
        auto fit = fit_decay(tr, NormKind::L2, window);
        rep["L2"] = {{"exponent", fit.exponent}, {"stderr", fit.stderr_},
                     {"curvature", fit.curvature}, {"non_power_law", fit.non_power_law},
                     {"points", fit.points}};
        std::printf("L2 exponent: %.4f +- %.4f (predicted %.4f)%s\n", fit.exponent,
                    fit.stderr_, predicted.alpha_u, fit.non_power_law ? " [non-power-law]" : "");
        add_series(NormKind::L2, "log10 ||u||_L2");
    }
    if (fit_hsigma) {
        auto fit = fit_decay(tr, NormKind::HsigmaDot, window);
        rep["Hsigma_dot"] = {{"exponent", fit.exponent}, {"stderr", fit.stderr_},
                             {"curvature", fit.curvature}, {"non_power_law", fit.non_power_law},
                             {"points", fit.points}};
        std::printf("Hsigma exponent: %.4f +- %.4f (predicted %.4f)%s\n", fit.exponent,
                    fit.stderr_, predicted.alpha_grad,
                    fit.non_power_law ? " [non-power-law]" : "");
        add_series(NormKind::HsigmaDot, "log10 ||u||_Hsigma");
    }

    write_svg_plot(outdir / "decay.svg", "norm decay (log-log)", "log10(1+t)", "log10 norm",
                   series);
    std::ofstream out(outdir / "decay_report.json");
    out << rep.dump(2) << "\n";
    std::printf("wrote %s and decay.svg\n", (outdir / "decay_report.json").c_str());
    return kExitOk;
}

// ------------------------------------------------------------- lifespan ---

int cmd_lifespan(const json& cfg, const fs::path& outdir, int workers, bool resume) {
    ModelParams q = parse_model(cfg);
    RegularityIndex m = parse_m(cfg);
    GridPtr grid = parse_grid(cfg);

    if (!cfg.contains("lifespan")) throw ConfigError("config error: missing 'lifespan' block");
    const json& j = cfg["lifespan"];
    require_known_keys(j, "lifespan", {"eps_list", "horizon"});
    auto eps_list = j.value("eps_list", std::vector<double>{0.4, 0.28, 0.2, 0.14, 0.1});
    const double horizon = get_or(j, "horizon", 400.0);
    if (eps_list.size() < 4) {
        throw ConfigError("config error at lifespan.eps_list: need >= 4 values");
    }

    LifespanOptions lo;
    lo.horizon = horizon;
    lo.solver = parse_integrator(cfg, q);
    lo.data = parse_initial(cfg);
    lo.workers = workers;

    SweepStore store(outdir / "sweep_store.jsonl");

    lo.resume_lookup = [&](double eps) -> std::optional<LifespanRecord> {
        if (!resume) return std::nullopt;
        const json* stored = store.find(canonical_run_key(cfg, eps));
        if (!stored) return std::nullopt;
        LifespanRecord rec;
        rec.eps = eps;
        rec.T_blow = (*stored)["T_blow"].get<double>();
        rec.censored = (*stored)["censored"].get<bool>();
        return rec;
    };
    lo.on_record = [&](const LifespanRecord& rec) {
        json r = {{"kind", "lifespan"}, {"eps", rec.eps}, {"T_blow", rec.T_blow},
                  {"censored", rec.censored}, {"status", to_string(rec.status)}};
        store.append(canonical_run_key(cfg, rec.eps), r);
    };

    auto sweep = lifespan_sweep(q, m, eps_list, grid, lo);

    std::ofstream csv(outdir / "lifespan.csv");
    csv << "eps,T_blow,censored\n";
    for (const auto& rec : sweep.records) {
        csv << format_double(rec.eps) << ',' << format_double(rec.T_blow) << ','
            << (rec.censored ? 1 : 0) << '\n';
    }

    json rep;
    rep["measured_slope"] = sweep.measured_slope;
    rep["slope_stderr"] = sweep.fit.slope_stderr;
    rep["theoretical_slope"] = sweep.theoretical_slope;
    rep["monotone"] = sweep.monotone;
    rep["records"] = json::array();
    for (const auto& rec : sweep.records) {
        rep["records"].push_back({{"eps", rec.eps}, {"T_blow", rec.T_blow},
                                  {"censored", rec.censored}});
    }
    std::ofstream out(outdir / "lifespan_report.json");
    out << rep.dump(2) << "\n";

    PlotSeries points, line;
    points.label = "measured T(eps)";
    points.points_only = true;
    for (const auto& rec : sweep.records) {
        if (rec.censored) continue;
        points.x.push_back(std::log10(rec.eps));
        points.y.push_back(std::log10(rec.T_blow));
    }
    line.label = "fit";
    if (!points.x.empty()) {
        const double ln10 = std::log(10.0);
        for (double lx : {points.x.front(), points.x.back()}) {
            line.x.push_back(lx);
            line.y.push_back((sweep.fit.intercept + sweep.fit.slope * lx * ln10) / ln10);
        }
    }
    write_svg_plot(outdir / "lifespan.svg", "blow-up time vs data amplitude", "log10 eps",
                   "log10 T", {points, line});

    std::printf("lifespan slope: %.4f +- %.4f (theoretical %.4f), monotone: %s\n",
                sweep.measured_slope, sweep.fit.slope_stderr, sweep.theoretical_slope,
                sweep.monotone ? "yes" : "no");
    std::printf("wrote %s\n", (outdir / "lifespan_report.json").c_str());
    return kExitOk;
}

// ---------------------------------------------------------------- check ---

int cmd_check(const json& cfg, const std::string& filter) {
    const std::uint64_t seed = get_or(cfg, "rng_seed", std::uint64_t(1234567));
    auto results = run_checks(seed, filter);
    int failed = 0;
    for (const auto& r : results) {
        std::printf("[%s] %-42s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        if (!r.pass) ++failed;
    }
    std::printf("%zu properties, %d failed\n", results.size(), failed);
    return failed == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sigma-evolution simulation laboratory"};
    app.require_subcommand(1);

    std::string config_path, output_dir, filter;
    int workers = 1;
    bool resume = false;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config_path, "JSON config file");
        if (needs_config) opt->required();
        sub->add_option("--output", output_dir, "output directory (overrides config)");
        sub->add_option("--workers", workers, "concurrent workers for sweeps");
        sub->add_flag("--resume", resume, "skip runs already present in the sweep store");
    };

    auto* c_classify = app.add_subcommand("classify", "exponents and theorem verdicts");
    add_common(c_classify, true);
    auto* c_simulate = app.add_subcommand("simulate", "run the spectral solver once");
    add_common(c_simulate, true);
    auto* c_decay = app.add_subcommand("decay", "decay-rate experiment");
    add_common(c_decay, true);
    auto* c_lifespan = app.add_subcommand("lifespan", "blow-up lifespan sweep");
    add_common(c_lifespan, true);
    auto* c_check = app.add_subcommand("check", "run the invariant suite");
    add_common(c_check, false);
    c_check->add_option("--filter", filter, "substring filter on property names");

    CLI11_PARSE(app, argc, argv);

    try {
        json cfg = json::object();
        if (!config_path.empty()) cfg = load_config(config_path);
        if (app.got_subcommand(c_check)) return cmd_check(cfg, filter);
        const fs::path outdir = resolve_output(cfg, output_dir);
        if (app.got_subcommand(c_classify)) return cmd_classify(cfg, outdir);
        if (app.got_subcommand(c_simulate)) return cmd_simulate(cfg, outdir, resume);
        if (app.got_subcommand(c_decay)) return cmd_decay(cfg, outdir);
        if (app.got_subcommand(c_lifespan)) return cmd_lifespan(cfg, outdir, workers, resume);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}

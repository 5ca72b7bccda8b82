#include "sevo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <mutex>
#include <stdexcept>

namespace sevo {

namespace {
constexpr double kCurvatureThreshold = 0.1;
}

const char* to_string(NormKind k) {
    switch (k) {
        case NormKind::L2: return "L2";
        case NormKind::HsigmaDot: return "Hsigma_dot";
        case NormKind::Linf: return "Linf";
        case NormKind::LqM1: return "Lq_m1";
    }
    return "?";
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit f;
    const int n = int(x.size());
    f.points = n;
    if (n < 2 || y.size() != x.size()) return f;
    double xbar = 0.0, ybar = 0.0;
    for (int i = 0; i < n; ++i) {
        xbar += x[i];
        ybar += y[i];
    }
    xbar /= n;
    ybar /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
    }
    f.slope = sxy / sxx;
    f.intercept = ybar - f.slope * xbar;
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ssr += r * r;
    }
    if (n > 2) f.slope_stderr = std::sqrt(ssr / double(n - 2) / sxx);

    // quadratic refit in centered x for the curvature diagnostic
    if (n >= 3) {
        double s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
        for (int i = 0; i < n; ++i) {
            const double u = x[i] - xbar;
            const double u2 = u * u;
            s1 += u;
            s2 += u2;
            s3 += u2 * u;
            s4 += u2 * u2;
            t0 += y[i];
            t1 += u * y[i];
            t2 += u2 * y[i];
        }
        const double n0 = double(n);
        // solve [n s1 s2; s1 s2 s3; s2 s3 s4][c0 c1 c2] = [t0 t1 t2]
        const double det = n0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s3 * s2) +
                           s2 * (s1 * s3 - s2 * s2);
        if (std::abs(det) > 1e-300) {
            const double det2 = n0 * (s2 * t2 - s3 * t1) - s1 * (s1 * t2 - s3 * t0) +
                                s2 * (s1 * t1 - s2 * t0);
            f.curvature = det2 / det;
        }
    }
    return f;
}

DecayFit fit_decay(const SimulationTrace& trace, NormKind kind, FitWindow window) {
    std::vector<double> x, y;
    for (const auto& s : trace.samples) {
        if (s.t < window.t_lo || s.t > window.t_hi) continue;
        double v = 0.0;
        switch (kind) {
            case NormKind::L2: v = s.l2; break;
            case NormKind::HsigmaDot: v = s.hsigma; break;
            case NormKind::Linf: v = s.linf; break;
            case NormKind::LqM1: v = s.lq_m1; break;
        }
        if (!(v > 0.0))
            throw std::runtime_error("non-positive norm inside the fit window");
        x.push_back(std::log1p(s.t));
        y.push_back(std::log(v));
    }
    if (int(x.size()) < 10)
        throw std::runtime_error("insufficient samples in the fit window (need >= 10)");
    if (trace.blowup_flag && trace.t_blow <= window.t_hi)
        throw std::runtime_error("blow-up inside the fit window");
    LineFit lf = fit_line(x, y);
    DecayFit out;
    out.exponent = -lf.slope;
    out.stderr_ = lf.slope_stderr;
    out.window = window;
    out.norm_kind = kind;
    out.curvature = lf.curvature;
    out.non_power_law = std::abs(lf.curvature) > kCurvatureThreshold;
    out.points = lf.points;
    return out;
}

std::vector<double> y_norm_q_list(const ModelParams& params) {
    const double m1 = m1_index(params.p);
    std::vector<double> q = {params.p * m1, params.p * 0.5 * (m1 + 2.0), 2.0 * params.p};
    std::sort(q.begin(), q.end());
    q.erase(std::unique(q.begin(), q.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            q.end());
    return q;
}

WeightedNorms weighted_norms(const SimulationTrace& trace, const ModelParams& params,
                             RegularityIndex m) {
    const auto ex = decay_exponents(params, m);
    const double d = params.sigma - params.sigma1;
    const double m1 = m1_index(params.p);
    const double p = params.p;
    const double w_l2_up = params.n * p / (2.0 * d) * (1.0 / m.m - 1.0 / (2.0 * p)) -
                           p * params.sigma1 / d;
    const std::vector<double> betas = {m1, 0.5 * (m1 + 2.0), 2.0};

    // locate each required ||u||_{L^{p beta}} among the recorded extras
    auto find_q = [&](double q) -> int {
        for (std::size_t i = 0; i < trace.extra_lq_list.size(); ++i) {
            if (std::abs(trace.extra_lq_list[i] - q) < 1e-9) return int(i);
        }
        throw std::runtime_error("trace is missing a recorded L^q norm needed by the Y norm");
    };
    std::vector<int> beta_slots;
    for (double b : betas) beta_slots.push_back(find_q(p * b));

    WeightedNorms out;
    for (const auto& s : trace.samples) {
        const double w = 1.0 + s.t;
        out.x_norm = std::max(out.x_norm, std::pow(w, ex.alpha_u) * s.l2 +
                                              std::pow(w, ex.alpha_grad) * s.hsigma);
        out.z_norm = std::max(out.z_norm,
                              std::pow(w, -params.sigma1 / d) * s.l2);
        // || |u|^p ||_{L^beta} = ||u||^p_{L^{p beta}}
        double y = std::pow(w, w_l2_up) * std::pow(s.extra_lq[beta_slots.back()], p);
        double sup_beta = 0.0;
        for (std::size_t i = 0; i < betas.size(); ++i) {
            const double wb = params.n / (2.0 * d) * (p / m.m - 1.0 / betas[i]) -
                              p * params.sigma1 / d;
            sup_beta = std::max(sup_beta,
                                std::pow(w, wb) * std::pow(s.extra_lq[beta_slots[i]], p));
        }
        out.y_norm_of_up = std::max(out.y_norm_of_up, y + sup_beta);
    }
    return out;
}

double TestProfile::value(double t) const {
    if (t <= 0.5 * horizon) return t < 0.0 ? 0.0 : 1.0;
    if (t >= horizon) return 0.0;
    const double s = (2.0 * t - horizon) / horizon;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double TestProfile::d1(double t) const {
    if (t <= 0.5 * horizon || t >= horizon) return 0.0;
    const double s = (2.0 * t - horizon) / horizon;
    const double om = 1.0 - s * s;
    const double g1 = -2.0 * s / (om * om);
    return value(t) * g1 * (2.0 / horizon);
}

double TestProfile::d2(double t, bool from_right) const {
    const double lo = 0.5 * horizon;
    if (t < lo || (t == lo && !from_right) || t >= horizon) return 0.0;
    const double s = std::max(0.0, (2.0 * t - horizon) / horizon);
    const double om = 1.0 - s * s;
    const double g1 = -2.0 * s / (om * om);
    const double g2 = -2.0 * (1.0 + 3.0 * s * s) / (om * om * om);
    const double dsdt = 2.0 / horizon;
    return value(t) * (g2 + g1 * g1) * dsdt * dsdt;
}

std::vector<double> gaussian_test_profile(const SpectralGrid& g, double width) {
    std::vector<double> phi(g.total_points());
    const double w2 = 2.0 * width * width;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        double r;
        if (g.dim == 1) {
            r = g.coord(int(i));
        } else {
            r = std::hypot(g.coord(int(i) / g.points), g.coord(int(i) % g.points));
        }
        phi[i] = std::exp(-r * r / w2);
    }
    return phi;
}

namespace {

// Composite Simpson over uniformly spaced samples; a trailing odd interval
// gets the 3/8 rule. `n` = number of samples.
double simpson(const std::vector<double>& f, double dt) {
    const int n = int(f.size());
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * dt * (f[0] + f[1]);
    double sum = 0.0;
    int i = 0;
    int intervals = n - 1;
    if (intervals % 2 == 1) {
        if (n >= 4) {
            sum += 3.0 * dt / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
            i = 3;
        } else {
            sum += 0.5 * dt * (f[0] + f[1]);
            i = 1;
        }
    }
    for (; i + 2 < n; i += 2) {
        sum += dt / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    }
    return sum;
}

int split_index(const std::vector<double>& t, double t_split) {
    const double dt = t[1] - t[0];
    for (int i = 0; i < int(t.size()); ++i) {
        if (std::abs(t[i] - t_split) < 0.5 * dt) return i;
    }
    return -1;
}

// Integrates sampled data over [t0, t_split] and [t_split, t1] separately so
// kinks of the temporal cutoff at t_split do not degrade the quadrature.
double simpson_split(const std::vector<double>& t, const std::vector<double>& f,
                     double t_split) {
    const int n = int(t.size());
    const double dt = t[1] - t[0];
    const int is = split_index(t, t_split);
    if (is <= 0 || is >= n - 1) return simpson(f, dt);
    std::vector<double> a(f.begin(), f.begin() + is + 1);
    std::vector<double> b(f.begin() + is, f.end());
    return simpson(a, dt) + simpson(b, dt);
}

// For a weight with a jump at t_split (eta'' has one-sided limits there),
// integrate weight(t)*S(t) using the correct one-sided node value per half.
double simpson_split_weighted(const std::vector<double>& t, const std::vector<double>& S,
                              double t_split, const std::function<double(double)>& w_left,
                              const std::function<double(double)>& w_right) {
    const int n = int(t.size());
    const double dt = t[1] - t[0];
    const int is = split_index(t, t_split);
    if (is <= 0 || is >= n - 1) {
        std::vector<double> f(n);
        for (int i = 0; i < n; ++i) f[i] = w_left(t[i]) * S[i];
        return simpson(f, dt);
    }
    std::vector<double> a(is + 1), b(n - is);
    for (int i = 0; i <= is; ++i) a[i] = w_left(t[i]) * S[i];
    for (int i = is; i < n; ++i) b[i - is] = w_right(t[i]) * S[i];
    return simpson(a, dt) + simpson(b, dt);
}

double dot_cell(const std::vector<double>& a, const std::vector<double>& b, double cell) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * cell;
}

}  // namespace

double weak_residual(const SimulationTrace& trace, const ModelParams& params,
                     const WeakFormTest& test, double scale) {
    const auto& g = *trace.grid;
    const double T = test.eta.horizon;
    std::vector<double> ts;
    std::vector<const std::vector<double>*> us;
    for (const auto& s : trace.snapshots) {
        if (s.t <= T + 1e-9) {
            ts.push_back(s.t);
            us.push_back(&s.u);
        }
    }
    if (int(ts.size()) < 64)
        throw std::runtime_error("snapshots too sparse for the weak-form quadrature (need >= 64)");

    // spatial fractional derivatives of phi
    Field phi_field = field_from_physical(trace.grid, test.phi);
    auto L1 = to_physical_real(frac_laplacian(phi_field, params.sigma1));
    auto L2 = to_physical_real(frac_laplacian(phi_field, params.sigma2));
    auto Ls = to_physical_real(frac_laplacian(phi_field, params.sigma));

    const double cell = std::pow(g.spacing(), g.dim);
    const std::size_t total = g.total_points();
    std::vector<double> f_nl(ts.size()), f_smooth(ts.size()), S_phi(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const auto& u = *us[k];
        const double eta = test.eta.value(ts[k]);
        const double e1 = test.eta.d1(ts[k]);
        double s_nl = 0.0, s_u_phi = 0.0, s_u_damp = 0.0, s_u_sig = 0.0;
        for (std::size_t i = 0; i < total; ++i) {
            const double ui = scale * u[i];
            s_nl += std::pow(std::abs(ui), params.p) * test.phi[i];
            s_u_phi += ui * test.phi[i];
            s_u_damp += ui * (L1[i] + L2[i]);
            s_u_sig += ui * Ls[i];
        }
        f_nl[k] = eta * s_nl * cell;
        S_phi[k] = s_u_phi * cell;
        f_smooth[k] = (-e1 * s_u_damp + eta * s_u_sig) * cell;
    }

    const double half = 0.5 * T;
    const double term_nl = simpson_split(ts, f_nl, half);
    const double term_data = test.eta.value(0.0) * dot_cell(trace.initial_v, test.phi, cell);
    // eta'' jumps at T/2: its term integrates with one-sided node values
    const double term_op =
        simpson_split(ts, f_smooth, half) +
        simpson_split_weighted(
            ts, S_phi, half,
            [&](double t) { return test.eta.d2(std::min(t, half), false); },
            [&](double t) { return test.eta.d2(std::max(t, half), true); });
    const double denom = std::max({std::abs(term_nl), std::abs(term_data), std::abs(term_op)});
    if (denom == 0.0) return 0.0;
    return std::abs(term_nl + term_data - term_op) / denom;
}

double testfn_scaling_exponent(const ModelParams& params) {
    const double pprime = params.p / (params.p - 1.0);
    return -2.0 * params.sigma * pprime + params.n + 2.0 * (params.sigma - params.sigma1);
}

TestFunctionReport testfn_functionals(const SimulationTrace& trace,
                                      const TestFunctionConfig& cfg,
                                      const ModelParams& params, RegularityIndex m) {
    (void)m;
    const auto& g = *trace.grid;
    const double alpha =
        cfg.alpha > 0.0 ? cfg.alpha : 2.0 * (params.sigma - params.sigma1);
    const double TR = std::pow(cfg.R, alpha);

    std::vector<double> ts;
    std::vector<const std::vector<double>*> us;
    for (const auto& s : trace.snapshots) {
        if (s.t <= TR + 1e-9) {
            ts.push_back(s.t);
            us.push_back(&s.u);
        }
    }
    if (ts.size() < 16 || trace.snapshots.empty() ||
        trace.snapshots.back().t < TR - 1e-9)
        throw std::runtime_error("trace horizon too short for R^alpha");

    // phi_R(x) = <x/(R K)>^{-n-eps}
    const double scale = cfg.R * cfg.K;
    const double expo = -0.5 * (double(params.n) + cfg.epsilon_phi);
    std::vector<double> phiR(g.total_points());
    for (std::size_t i = 0; i < phiR.size(); ++i) {
        double r;
        if (g.dim == 1) {
            r = g.coord(int(i)) / scale;
        } else {
            r = std::hypot(g.coord(int(i) / g.points), g.coord(int(i) % g.points)) / scale;
        }
        phiR[i] = std::pow(1.0 + r * r, expo);
    }

    TestProfile eta{TR};
    const double cell = std::pow(g.spacing(), g.dim);
    std::vector<double> f(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const auto& u = *us[k];
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            s += std::pow(std::abs(u[i]), params.p) * phiR[i];
        }
        f[k] = eta.value(ts[k]) * s * cell;
    }
    TestFunctionReport rep;
    rep.I_R = simpson_split(ts, f, 0.5 * TR);
    {
        const double dt = ts.size() > 1 ? ts[1] - ts[0] : 0.0;
        std::vector<double> tail_t, tail_f;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            if (ts[k] >= 0.5 * TR - 0.5 * dt) {
                tail_t.push_back(ts[k]);
                tail_f.push_back(f[k]);
            }
        }
        rep.I_tilde_R = tail_t.size() >= 2 ? simpson(tail_f, dt) : 0.0;
    }
    rep.data_term = dot_cell(trace.initial_v, phiR, cell);
    rep.scaling_exponent = testfn_scaling_exponent(params);
    rep.rhs_bound = std::pow(cfg.R, rep.scaling_exponent) * std::pow(cfg.K, double(params.n));
    rep.ratio = rep.data_term / rep.rhs_bound;
    return rep;
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

DataTermFit data_term_lower_bound(int n, double m, const std::vector<double>& R_values,
                                  double epsilon_phi) {
    if (!(m > 1.0)) throw std::invalid_argument("data-term growth fit requires m > 1");
    DataTermFit fit;
    fit.R_values = R_values;
    const double a = double(n) / m;
    const double tail = -0.5 * (double(n) + epsilon_phi);
    for (double R : R_values) {
        auto integrand = [&](double r) {
            const double u1 = std::pow(1.0 + r * r, -0.5 * a) / std::log(M_E + r);
            const double s = r / R;
            const double phi = std::pow(1.0 + s * s, tail);
            return n == 1 ? u1 * phi : 2.0 * M_PI * r * u1 * phi;
        };
        const double R_big = 4000.0 * R;
        double I = integrate(integrand, 0.0, R, 1e-12) +
                   integrate(integrand, R, R_big, 1e-12);
        if (n == 1) I *= 2.0;
        fit.integrals.push_back(I);
    }
    std::vector<double> x, y;
    for (std::size_t i = 0; i < R_values.size(); ++i) {
        x.push_back(std::log(R_values[i]));
        y.push_back(std::log(fit.integrals[i]) + std::log(std::log(R_values[i])));
    }
    LineFit lf = fit_line(x, y);
    fit.growth_exponent = lf.slope;
    fit.prefactor = std::exp(lf.intercept);
    for (std::size_t i = 0; i < x.size(); ++i) {
        fit.max_deviation =
            std::max(fit.max_deviation, std::abs(y[i] - (lf.intercept + lf.slope * x[i])));
    }
    return fit;
}

LifespanSweep lifespan_sweep(const ModelParams& params, RegularityIndex m,
                             const std::vector<double>& eps_list, GridPtr grid,
                             const LifespanOptions& options) {
    if (eps_list.size() < 2) throw std::invalid_argument("need at least two eps values");
    const auto gamma = gamma_m(params, m);
    if (!gamma.subcritical)
        throw std::runtime_error("critical or supercritical: gamma_m <= 0");

    LifespanSweep sweep;
    sweep.theoretical_slope = gamma.lifespan_slope;
    sweep.records.resize(eps_list.size());

    auto run_one = [&](std::size_t idx) {
        LifespanRecord rec;
        rec.eps = eps_list[idx];
        ModelParams q = params;
        q.eps = rec.eps;
        InitialDataOptions data = options.data;
        data.kind = m.m > 1.0 ? DataKind::BlowupMGt1 : DataKind::BlowupM1;
        FieldState init = make_initial_data(data, grid, q, m);
        SolveOptions so = options.solver;
        so.t_end = options.horizon;
        SimulationTrace tr = solve(init, q, m, so);
        rec.status = tr.status;
        if (tr.blowup_flag) {
            rec.T_blow = tr.t_blow;
            rec.censored = false;
        } else {
            rec.T_blow = options.horizon;
            rec.censored = true;
        }
        return rec;
    };

    std::mutex mu;
    auto record = [&](std::size_t idx, LifespanRecord rec) {
        std::lock_guard<std::mutex> lock(mu);
        sweep.records[idx] = rec;
        if (options.on_record) options.on_record(rec);
    };

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        std::optional<LifespanRecord> stored;
        if (options.resume_lookup) stored = options.resume_lookup(eps_list[i]);
        if (stored) {
            sweep.records[i] = *stored;
        } else {
            todo.push_back(i);
        }
    }

    const int workers = std::max(1, options.workers);
    std::size_t next = 0;
    while (next < todo.size()) {
        std::vector<std::future<std::pair<std::size_t, LifespanRecord>>> batch;
        for (int w = 0; w < workers && next < todo.size(); ++w, ++next) {
            const std::size_t idx = todo[next];
            batch.push_back(std::async(std::launch::async,
                                       [&run_one, idx] { return std::make_pair(idx, run_one(idx)); }));
        }
        for (auto& fut : batch) {
            auto [idx, rec] = fut.get();
            record(idx, rec);
        }
    }

    std::vector<double> x, y;
    std::vector<std::pair<double, double>> pts;
    for (const auto& rec : sweep.records) {
        if (!rec.censored) pts.emplace_back(rec.eps, rec.T_blow);
    }
    if (pts.empty()) throw std::runtime_error("all runs censored at the horizon");
    std::sort(pts.begin(), pts.end());
    for (auto& [e, T] : pts) {
        x.push_back(std::log(e));
        y.push_back(std::log(T));
    }
    sweep.fit = fit_line(x, y);
    sweep.measured_slope = sweep.fit.slope;
    sweep.monotone = true;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].second > pts[i - 1].second * (1.0 + 1e-6)) sweep.monotone = false;
    }
    return sweep;
}

}  // namespace sevo

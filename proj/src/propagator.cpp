#include "sevo/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sevo {

const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "completed";
        case RunStatus::BlewUp: return "blew-up";
        case RunStatus::StepUnderflow: return "step-underflow";
    }
    return "?";
}

PropagatorTable build_table(const SpectralGrid& grid, const ModelParams& params, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
    PropagatorTable T;
    T.h = h;
    const std::size_t total = grid.total_points();
    T.modes.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        T.modes[i] = build_propagator(mode_coeffs(grid.xi_abs(i), params), h);
    }
    return T;
}

namespace {

// Spectrum zero-padding between the solution grid (N per dim) and the
// 2x-refined evaluation grid. The coarse Nyquist index -N/2 aliases +N/2;
// padding splits it across both fine slots and truncation sums them back,
// which keeps real fields exactly real through the round trip.
struct FineTargets {
    std::size_t idx[2];
    double w[2];
    int count;
};

FineTargets fine_targets_1d(int k, int N) {
    const int ks = k < N / 2 ? k : k - N;
    if (ks == -N / 2) {
        return {{std::size_t(2 * N - N / 2), std::size_t(N / 2)}, {0.5, 0.5}, 2};
    }
    return {{std::size_t(ks >= 0 ? ks : 2 * N + ks), 0}, {1.0, 0.0}, 1};
}

std::vector<cplx> pad_spectrum(const SpectralGrid& g, const std::vector<cplx>& small) {
    const int N = g.points;
    if (g.dim == 1) {
        std::vector<cplx> big(std::size_t(2) * N, cplx(0.0));
        for (int k = 0; k < N; ++k) {
            const auto t = fine_targets_1d(k, N);
            for (int j = 0; j < t.count; ++j) big[t.idx[j]] += t.w[j] * small[k];
        }
        return big;
    }
    std::vector<cplx> big(std::size_t(2) * N * 2 * N, cplx(0.0));
    for (int k0 = 0; k0 < N; ++k0) {
        const auto t0 = fine_targets_1d(k0, N);
        for (int k1 = 0; k1 < N; ++k1) {
            const auto t1 = fine_targets_1d(k1, N);
            const cplx v = small[std::size_t(k0) * N + k1];
            for (int a = 0; a < t0.count; ++a) {
                for (int b = 0; b < t1.count; ++b) {
                    big[t0.idx[a] * std::size_t(2 * N) + t1.idx[b]] += t0.w[a] * t1.w[b] * v;
                }
            }
        }
    }
    return big;
}

std::vector<cplx> truncate_spectrum(const SpectralGrid& g, const std::vector<cplx>& big) {
    const int N = g.points;
    if (g.dim == 1) {
        std::vector<cplx> small(static_cast<std::size_t>(N));
        for (int k = 0; k < N; ++k) {
            const auto t = fine_targets_1d(k, N);
            cplx v = 0.0;
            for (int j = 0; j < t.count; ++j) v += big[t.idx[j]];
            small[k] = v;
        }
        return small;
    }
    std::vector<cplx> small(std::size_t(N) * N);
    for (int k0 = 0; k0 < N; ++k0) {
        const auto t0 = fine_targets_1d(k0, N);
        for (int k1 = 0; k1 < N; ++k1) {
            const auto t1 = fine_targets_1d(k1, N);
            cplx v = 0.0;
            for (int a = 0; a < t0.count; ++a) {
                for (int b = 0; b < t1.count; ++b) {
                    v += big[t0.idx[a] * std::size_t(2 * N) + t1.idx[b]];
                }
            }
            small[std::size_t(k0) * N + k1] = v;
        }
    }
    return small;
}

struct NonlinearEval {
    std::vector<cplx> n_hat;
    double linf = 0.0;
    double imag_residue = 0.0;
};

NonlinearEval eval_nonlinearity(const Field& u, const SpectralGrid& fine, double p) {
    const auto& g = *u.grid;
    NonlinearEval out;
    auto fine_phys = backward_fft(fine, pad_spectrum(g, u.values));
    double max_im = 0.0, max_abs = 0.0;
    std::vector<cplx> w(fine_phys.size());
    for (std::size_t i = 0; i < fine_phys.size(); ++i) {
        const double re = fine_phys[i].real();
        max_im = std::max(max_im, std::abs(fine_phys[i].imag()));
        max_abs = std::max(max_abs, std::abs(re));
        w[i] = std::pow(std::abs(re), p);
    }
    out.linf = max_abs;
    out.imag_residue = max_im / std::max(max_abs, 1e-300);
    out.n_hat = truncate_spectrum(g, forward_fft(fine, w));
    return out;
}

GridPtr refined_grid(const SpectralGrid& g) {
    return make_grid(g.dim, g.half_length, 2 * g.points);
}

}  // namespace

StepOutcome step(const FieldState& state, const ModelParams& params,
                 const PropagatorTable& table, bool nonlinear) {
    const auto& g = *state.u.grid;
    const std::size_t total = g.total_points();
    if (table.modes.size() != total) throw std::invalid_argument("table/grid mismatch");
    const double h = table.h;

    StepOutcome out;
    out.next.u = Field(state.u.grid);
    out.next.v = Field(state.u.grid);
    out.next.time = state.time + h;

    if (!nonlinear) {
        for (std::size_t i = 0; i < total; ++i) {
            const auto& P = table.modes[i];
            const cplx uh = state.u.values[i], vh = state.v.values[i];
            out.next.u.values[i] = P.K0 * uh + P.K1 * vh;
            out.next.v.values[i] = P.dK0 * uh + P.dK1 * vh;
        }
        return out;
    }

    static thread_local GridPtr fine_cache;
    if (!fine_cache || fine_cache->dim != g.dim || fine_cache->points != 2 * g.points ||
        fine_cache->half_length != g.half_length) {
        fine_cache = refined_grid(g);
    }

    auto n0 = eval_nonlinearity(state.u, *fine_cache, params.p);
    out.linf_start = n0.linf;
    out.imag_residue = n0.imag_residue;

    // predictor: constant forcing over the step
    Field pred(state.u.grid);
    for (std::size_t i = 0; i < total; ++i) {
        const auto& P = table.modes[i];
        pred.values[i] = P.K0 * state.u.values[i] + P.K1 * state.v.values[i] +
                         P.M0 * n0.n_hat[i];
    }
    auto n1 = eval_nonlinearity(pred, *fine_cache, params.p);
    out.linf_end = n1.linf;
    out.imag_residue = std::max(out.imag_residue, n1.imag_residue);

    // corrector: forcing linear in time across the step
    double disc2 = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < total; ++i) {
        const auto& P = table.modes[i];
        const cplx uh = state.u.values[i], vh = state.v.values[i];
        const cplx dn = n1.n_hat[i] - n0.n_hat[i];
        const cplx unew = P.K0 * uh + P.K1 * vh + P.M0 * n0.n_hat[i] + P.M1 * dn;
        const cplx vnew = P.dK0 * uh + P.dK1 * vh + P.dM0() * n0.n_hat[i] + P.dM1() * dn;
        out.next.u.values[i] = unew;
        out.next.v.values[i] = vnew;
        disc2 += std::norm(P.M1 * dn);
        if (!std::isfinite(unew.real()) || !std::isfinite(unew.imag()) ||
            !std::isfinite(vnew.real()) || !std::isfinite(vnew.imag())) {
            finite = false;
        }
    }
    out.discrepancy = std::sqrt(g.volume() * disc2);
    out.nonfinite = !finite || !std::isfinite(out.discrepancy) ||
                    !std::isfinite(n1.linf);
    return out;
}

double flow_energy(const FieldState& state, const ModelParams& params) {
    const auto& g = *state.u.grid;
    double sum = 0.0;
    for (std::size_t i = 0; i < state.u.values.size(); ++i) {
        const double b = dispersion_symbol(g.xi_abs(i), params);
        sum += b * std::norm(state.u.values[i]) + std::norm(state.v.values[i]);
    }
    return g.volume() * sum;
}

namespace {

TraceSample measure(const FieldState& st, const ModelParams& params, double m1,
                    const std::vector<double>& extra_lq, double h_used) {
    TraceSample row;
    row.t = st.time;
    row.l2 = norm_Lq(st.u, 2.0);
    row.hsigma = norm_sobolev(st.u, params.sigma, true);
    row.linf = norm_Linf(st.u);
    row.lq_m1 = norm_Lq(st.u, m1);
    row.zero_mode = std::abs(st.u.values[0]) * std::sqrt(st.u.grid->volume());
    row.h_used = h_used;
    row.extra_lq.reserve(extra_lq.size());
    for (double q : extra_lq) row.extra_lq.push_back(norm_Lq(st.u, q));
    return row;
}

}  // namespace

SimulationTrace solve(const FieldState& initial, const ModelParams& params,
                      RegularityIndex m, const SolveOptions& opt) {
    require_valid(params, m);
    if (initial.u.grid != initial.v.grid)
        throw std::invalid_argument("u and v must share one grid");
    if (!(opt.t_end > initial.time)) throw std::invalid_argument("t_end must exceed initial time");
    if (!(opt.sample_dt > 0.0)) throw std::invalid_argument("sample_dt must be positive");

    SimulationTrace trace;
    trace.params = params;
    trace.m = m;
    trace.grid = initial.u.grid;
    trace.t_end_requested = opt.t_end;
    trace.extra_lq_list = opt.extra_lq;
    trace.initial_u = to_physical_real(initial.u);
    trace.initial_v = to_physical_real(initial.v);

    const double m1 = m1_index(params.p);
    // the state pair sizes the auto threshold; u may start identically zero
    const double linf0 = std::max(norm_Linf(initial.u), norm_Linf(initial.v));
    const double threshold =
        opt.blowup_threshold > 0.0 ? opt.blowup_threshold : 1e8 * linf0 + 1.0;

    FieldState state = initial;
    TraceSample row0 = measure(state, params, m1, opt.extra_lq, 0.0);
    trace.samples.push_back(row0);
    if (opt.snapshot_every > 0) trace.snapshots.push_back({state.time, to_physical_real(state.u)});
    if (opt.track_energy) {
        trace.step_times.push_back(state.time);
        trace.step_energies.push_back(flow_energy(state, params));
    }

    const auto& g = *initial.u.grid;
    double max_zero_fraction = 0.0;
    auto note_row = [&](const TraceSample& row) {
        if (row.l2 > 0.0) max_zero_fraction = std::max(max_zero_fraction, row.zero_mode / row.l2);
    };
    note_row(row0);

    // step-size cache: adaptivity produces few distinct h values
    std::vector<PropagatorTable> tables;
    auto table_for = [&](double h) -> const PropagatorTable& {
        for (const auto& T : tables) {
            if (std::abs(T.h - h) <= 1e-15 * h) return T;
        }
        if (tables.size() > 24) tables.erase(tables.begin());
        tables.push_back(build_table(g, params, h));
        return tables.back();
    };

    double h_cur = std::min(opt.h0, opt.h_max);
    double t = initial.time;
    long long sample_index = 1;
    long long snapshot_count = 1;
    auto sample_time = [&](long long i) {
        return std::min(initial.time + double(i) * opt.sample_dt, opt.t_end);
    };

    FieldState prev = state;
    double prev_h = h_cur;

    while (t < opt.t_end - 1e-12 * std::max(1.0, opt.t_end)) {
        const double t_next = sample_time(sample_index);
        double h = std::min(h_cur, t_next - t);
        if (h <= 0.0) {  // already at the sample point
            ++sample_index;
            continue;
        }

        const PropagatorTable& T = table_for(h);
        StepOutcome oc = step(state, params, T, opt.nonlinear);

        if (oc.nonfinite) {
            trace.status = RunStatus::BlewUp;
            trace.blowup_flag = true;
            trace.t_blow = t + h;
            break;
        }
        if (opt.adaptive && opt.nonlinear && oc.discrepancy > opt.tol) {
            if (h <= opt.h_min * (1.0 + 1e-9)) {
                trace.status = RunStatus::StepUnderflow;
                trace.blowup_flag = true;  // suspected blow-up at this time
                trace.t_blow = t;
                break;
            }
            h_cur = std::max(0.5 * h, opt.h_min);
            continue;  // reject
        }

        prev = state;
        prev_h = h;
        state = oc.next;
        t = state.time;
        trace.max_imag_residue = std::max(trace.max_imag_residue, oc.imag_residue);

        if (opt.track_energy) {
            trace.step_times.push_back(t);
            trace.step_energies.push_back(flow_energy(state, params));
        }

        const double linf_now = opt.nonlinear ? oc.linf_end : 0.0;
        if (opt.nonlinear && linf_now > threshold) {
            // one bisection pass: re-step the pre-crossing state with h/2
            double t_lo = prev.time, t_hi = t;
            const PropagatorTable& Th = table_for(0.5 * prev_h);
            StepOutcome half = step(prev, params, Th, true);
            if (half.nonfinite || half.linf_end > threshold) {
                t_hi = prev.time + 0.5 * prev_h;
            } else {
                t_lo = prev.time + 0.5 * prev_h;
            }
            trace.status = RunStatus::BlewUp;
            trace.blowup_flag = true;
            trace.t_blow = 0.5 * (t_lo + t_hi);
            TraceSample last = measure(state, params, m1, opt.extra_lq, prev_h);
            note_row(last);
            trace.samples.push_back(last);
            break;
        }

        if (opt.adaptive && opt.nonlinear && oc.discrepancy < 0.1 * opt.tol) {
            h_cur = std::min(2.0 * h_cur, opt.h_max);
        }

        if (std::abs(t - t_next) <= 1e-9 * std::max(1.0, t_next)) {
            TraceSample row = measure(state, params, m1, opt.extra_lq, prev_h);
            note_row(row);
            trace.samples.push_back(row);
            if (!opt.nonlinear && row.linf > threshold) {
                trace.status = RunStatus::BlewUp;
                trace.blowup_flag = true;
                trace.t_blow = t;
                break;
            }
            if (opt.snapshot_every > 0 && (sample_index % opt.snapshot_every) == 0) {
                trace.snapshots.push_back({t, to_physical_real(state.u)});
                ++snapshot_count;
            }
            ++sample_index;
        }
    }

    trace.zero_mode_flagged = (params.sigma1 > 0.0) && (max_zero_fraction > 0.01);
    return trace;
}

}  // namespace sevo

#include "sevo/spectral.hpp"

#include "sevo/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>

namespace sevo {

double SpectralGrid::xi_abs(std::size_t idx) const {
    if (dim == 1) return std::abs(xi[idx]);
    const std::size_t N = points;
    const double x0 = xi[idx / N];
    const double x1 = xi[idx % N];
    return std::hypot(x0, x1);
}

double SpectralGrid::volume() const {
    const double side = 2.0 * half_length;
    return dim == 1 ? side : side * side;
}

GridPtr make_grid(int n, double L, int N) {
    if (n != 1 && n != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
    if (!(L > 0.0)) throw std::invalid_argument("grid half-length must be positive");
    if (N < 8 || (N % 2) != 0) throw std::invalid_argument("grid size must be even and >= 8");
    auto g = std::make_shared<SpectralGrid>();
    g->dim = n;
    g->half_length = L;
    g->points = N;
    g->xi.resize(N);
    for (int k = 0; k < N; ++k) {
        const int ks = k < N / 2 ? k : k - N;
        g->xi[k] = M_PI * ks / L;
    }
    return g;
}

namespace {

// One owned FFTW plan pair per (dim, N), cached per thread. Plan creation is
// not thread-safe in FFTW; per-thread caches avoid the global planner lock on
// the execute path entirely.
struct PlanEntry {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    fftw_complex* buf = nullptr;
    std::size_t size = 0;

    ~PlanEntry() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (buf) fftw_free(buf);
    }
};

PlanEntry& plan_for(int dim, int N) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<PlanEntry>> cache;
    auto& slot = cache[{dim, N}];
    if (!slot) {
        auto e = std::make_unique<PlanEntry>();
        e->size = dim == 1 ? std::size_t(N) : std::size_t(N) * N;
        e->buf = fftw_alloc_complex(e->size);
        if (dim == 1) {
            e->fwd = fftw_plan_dft_1d(N, e->buf, e->buf, FFTW_FORWARD, FFTW_ESTIMATE);
            e->bwd = fftw_plan_dft_1d(N, e->buf, e->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        } else {
            e->fwd = fftw_plan_dft_2d(N, N, e->buf, e->buf, FFTW_FORWARD, FFTW_ESTIMATE);
            e->bwd = fftw_plan_dft_2d(N, N, e->buf, e->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        slot = std::move(e);
    }
    return *slot;
}

std::vector<cplx> run_plan(int dim, int N, const std::vector<cplx>& in, bool forward) {
    PlanEntry& e = plan_for(dim, N);
    if (in.size() != e.size) throw std::invalid_argument("transform size mismatch");
    std::memcpy(e.buf, reinterpret_cast<const double*>(in.data()),
                e.size * sizeof(fftw_complex));
    fftw_execute(forward ? e.fwd : e.bwd);
    const cplx* begin = reinterpret_cast<const cplx*>(e.buf);
    return std::vector<cplx>(begin, begin + e.size);
}

}  // namespace

std::vector<cplx> forward_fft(const SpectralGrid& g, const std::vector<cplx>& physical) {
    auto out = run_plan(g.dim, g.points, physical, true);
    const double inv = 1.0 / double(g.total_points());
    for (auto& c : out) c *= inv;
    return out;
}

std::vector<cplx> backward_fft(const SpectralGrid& g, const std::vector<cplx>& spectral) {
    return run_plan(g.dim, g.points, spectral, false);
}

Field field_from_physical(GridPtr g, const std::vector<double>& physical) {
    Field f(g);
    std::vector<cplx> tmp(physical.size());
    for (std::size_t i = 0; i < physical.size(); ++i) tmp[i] = physical[i];
    f.values = forward_fft(*g, tmp);
    return f;
}

std::vector<cplx> to_physical(const Field& f) { return backward_fft(*f.grid, f.values); }

std::vector<double> to_physical_real(const Field& f) {
    auto phys = to_physical(f);
    std::vector<double> out(phys.size());
    for (std::size_t i = 0; i < phys.size(); ++i) out[i] = phys[i].real();
    return out;
}

double imaginary_residue(const Field& f) {
    auto phys = to_physical(f);
    double max_im = 0.0, max_abs = 0.0;
    for (const auto& z : phys) {
        max_im = std::max(max_im, std::abs(z.imag()));
        max_abs = std::max(max_abs, std::abs(z));
    }
    return max_im / std::max(max_abs, 1e-300);
}

Field frac_laplacian(const Field& f, double theta) {
    if (theta < 0.0) throw std::invalid_argument("frac_laplacian requires theta >= 0");
    Field out = f;
    const auto& g = *f.grid;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] *= power_symbol(g.xi_abs(i), 2.0 * theta);
    }
    return out;
}

double norm_Linf(const Field& f) {
    auto phys = to_physical(f);
    double m = 0.0;
    for (const auto& z : phys) m = std::max(m, std::abs(z));
    return m;
}

double norm_Lq(const Field& f, double q) {
    if (std::isinf(q)) return norm_Linf(f);
    if (!(q >= 1.0)) throw std::invalid_argument("norm_Lq requires q >= 1");
    const auto& g = *f.grid;
    auto phys = to_physical(f);
    const double cell = std::pow(g.spacing(), g.dim);
    double sum = 0.0;
    for (const auto& z : phys) sum += std::pow(std::abs(z), q);
    return std::pow(cell * sum, 1.0 / q);
}

double norm_sobolev(const Field& f, double s, bool homogeneous) {
    if (s < 0.0) throw std::invalid_argument("norm_sobolev requires s >= 0");
    const auto& g = *f.grid;
    double sum = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double r = g.xi_abs(i);
        const double w = homogeneous ? power_symbol(r, 2.0 * s)
                                     : std::pow(1.0 + r * r, s);
        sum += w * std::norm(f.values[i]);
    }
    return std::sqrt(g.volume() * sum);
}

double bump_profile(double r, double width) {
    const double s = r / width;
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

FieldState make_initial_data(const InitialDataOptions& opt, GridPtr grid,
                             const ModelParams& params, RegularityIndex m) {
    require_valid(params, m);
    const auto& g = *grid;
    const std::size_t total = g.total_points();
    std::vector<double> u0(total, 0.0), u1(total, 0.0);

    auto radius = [&](std::size_t idx) {
        if (g.dim == 1) return std::abs(g.coord(int(idx)));
        const int N = g.points;
        return std::hypot(g.coord(int(idx) / N), g.coord(int(idx) % N));
    };

    switch (opt.kind) {
        case DataKind::Gaussian: {
            const double w2 = 2.0 * opt.gaussian_width * opt.gaussian_width;
            for (std::size_t i = 0; i < total; ++i) {
                const double r = radius(i);
                u0[i] = u1[i] = std::exp(-r * r / w2);
            }
            break;
        }
        case DataKind::SingleMode: {
            // snap to the nearest representable frequency
            const int k0 = std::clamp(int(std::lround(opt.mode_xi * g.half_length / M_PI)),
                                      0, g.points / 2 - 1);
            const double xi0 = M_PI * k0 / g.half_length;
            for (std::size_t i = 0; i < total; ++i) {
                const double x = g.dim == 1 ? g.coord(int(i)) : g.coord(int(i) / g.points);
                u0[i] = std::cos(xi0 * x);
            }
            break;
        }
        case DataKind::BlowupM1: {
            for (std::size_t i = 0; i < total; ++i) u1[i] = bump_profile(radius(i), opt.bump_width);
            if (opt.bump_norm == BumpNormalization::UnitMass) {
                double mass = 0.0;
                for (double x : u1) mass += x;
                mass *= std::pow(g.spacing(), g.dim);
                for (auto& x : u1) x /= mass;
            }
            if (opt.bump_scale != 1.0) {
                for (auto& x : u1) x *= opt.bump_scale;
            }
            break;
        }
        case DataKind::BlowupMGt1: {
            if (!(m.m > 1.0))
                throw std::invalid_argument("BlowupMGt1 initial data requires m > 1");
            const double a = double(params.n) / m.m;
            for (std::size_t i = 0; i < total; ++i) {
                const double r = radius(i);
                u1[i] = std::pow(1.0 + r * r, -0.5 * a) / std::log(M_E + r);
            }
            break;
        }
    }

    FieldState st;
    st.time = 0.0;
    for (auto& x : u0) x *= params.eps;
    for (auto& x : u1) x *= params.eps;
    st.u = field_from_physical(grid, u0);
    st.v = field_from_physical(grid, u1);
    return st;
}

}  // namespace sevo

#ifndef SEVO_SPECTRAL_HPP
#define SEVO_SPECTRAL_HPP

#include <complex>
#include <memory>
#include <vector>

#include "sevo/model.hpp"

namespace sevo {

using cplx = std::complex<double>;

/// Uniform periodic grid on [-L, L)^n, n in {1,2}, N points per dimension
/// (N even). Mode k (FFT layout) carries the frequency xi_k = pi*k_signed/L
/// with k_signed in {-N/2, ..., N/2-1}.
struct SpectralGrid {
    int dim = 1;
    double half_length = 1.0;  // L
    int points = 8;            // N per dimension
    std::vector<double> xi;    // per-dimension frequencies, FFT index order

    double spacing() const { return 2.0 * half_length / points; }
    std::size_t total_points() const {
        return dim == 1 ? std::size_t(points) : std::size_t(points) * points;
    }
    double coord(int j) const { return -half_length + j * spacing(); }
    /// |xi| of the flattened mode index.
    double xi_abs(std::size_t idx) const;
    /// (2L)^n, the cell volume factor of Plancherel sums.
    double volume() const;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

GridPtr make_grid(int n, double L, int N);

/// Scalar field stored as normalized DFT coefficients: physical values are
/// recovered by the unnormalized inverse transform.
struct Field {
    GridPtr grid;
    std::vector<cplx> values;  // spectral, size grid->total_points()

    Field() = default;
    explicit Field(GridPtr g) : grid(std::move(g)), values(grid->total_points()) {}
};

struct FieldState {
    Field u;
    Field v;  // v = du/dt
    double time = 0.0;
};

/// Transforms. forward: physical samples -> normalized coefficients;
/// backward: coefficients -> physical samples.
std::vector<cplx> forward_fft(const SpectralGrid& g, const std::vector<cplx>& physical);
std::vector<cplx> backward_fft(const SpectralGrid& g, const std::vector<cplx>& spectral);

Field field_from_physical(GridPtr g, const std::vector<double>& physical);
std::vector<cplx> to_physical(const Field& f);
std::vector<double> to_physical_real(const Field& f);
/// max |Im(physical)| / max(|physical|, tiny): real-data sanity measure.
double imaginary_residue(const Field& f);

/// Spectral multiplier |xi|^{2 theta}; theta = 0 is the identity on every
/// mode (|0|^0 := 1), theta > 0 annihilates the zero mode.
Field frac_laplacian(const Field& f, double theta);

/// Rectangle-rule L^q norm over the torus (q >= 1, or infinity).
double norm_Lq(const Field& f, double q);
double norm_Linf(const Field& f);

/// Plancherel norm with weight |xi|^s (homogeneous) or (1+|xi|^2)^{s/2}.
double norm_sobolev(const Field& f, double s, bool homogeneous);

enum class DataKind { BlowupM1, BlowupMGt1, Gaussian, SingleMode };

/// Normalization of the m=1 bump: unit peak (bump(0) = 1) or unit mass
/// (discrete integral = 1, so eps is exactly the data mass).
enum class BumpNormalization { UnitPeak, UnitMass };

struct InitialDataOptions {
    DataKind kind = DataKind::Gaussian;
    double gaussian_width = 1.0;  // u0 = u1 = exp(-|x|^2/(2 w^2))
    double bump_width = 4.0;      // support radius of the m=1 bump
    BumpNormalization bump_norm = BumpNormalization::UnitPeak;
    double bump_scale = 1.0;      // extra amplitude factor on the m=1 bump
    double mode_xi = 1.0;         // target frequency of the single mode
};

/// Data scaled by eps: u(0) = eps*u0, v(0) = eps*u1.
///   BlowupM1:    u0 = 0, u1 = unit-peak smooth bump with positive mean
///   BlowupMGt1:  u0 = 0, u1(x) = <x>^{-n/m} / log(e+|x|)  (requires m > 1)
///   Gaussian:    u0 = u1 = Gaussian
///   SingleMode:  u0 = cos(xi0 . x) (xi0 snapped to the grid), u1 = 0
FieldState make_initial_data(const InitialDataOptions& opt, GridPtr grid,
                             const ModelParams& params, RegularityIndex m);

/// The smooth compactly supported bump exp(1 - 1/(1 - (r/w)^2)) (unit peak).
double bump_profile(double r, double width);

}  // namespace sevo

#endif

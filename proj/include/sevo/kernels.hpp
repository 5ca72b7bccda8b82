#ifndef SEVO_KERNELS_HPP
#define SEVO_KERNELS_HPP

#include <complex>
#include <vector>

#include "sevo/model.hpp"

namespace sevo {

using cplx = std::complex<double>;

/// Frequency regime of one Fourier mode. Oscillatory corresponds to a
/// negative discriminant, i.e. r^{2 sigma1} + r^{2 sigma2} < 2 r^sigma.
enum class ModeRegime { Oscillatory, Overdamped, DoubleRoot };

const char* to_string(ModeRegime r);

/// Per-mode quadratic  lambda^2 + a lambda + b = 0  with
///   a = |xi|^{2 sigma1} + |xi|^{2 sigma2}   (damping symbol)
///   b = |xi|^{2 sigma}                      (dispersion symbol).
struct ModeCoeffs {
    double a = 0.0;
    double b = 0.0;
    cplx lambda1;  // least-damped root, (-a + sqrt(a^2-4b))/2
    cplx lambda2;
    ModeRegime regime = ModeRegime::Overdamped;
};

/// |0|^{2 theta} convention: 1 when theta = 0 (frictional damping acts on the
/// mean), 0 when theta > 0 (the zero mode is untouched).
double power_symbol(double r, double two_theta);

double damping_symbol(double r, const ModelParams& params);
double dispersion_symbol(double r, const ModelParams& params);

ModeCoeffs mode_coeffs(double xi_abs, const ModelParams& params);

/// Exact one-step linear propagation data for one mode:
///   u(t+h) = K0 u + K1 v + integral weights M0/M1 for the forcing,
///   v(t+h) = dK0 u + dK1 v + ... with dM0 = K1, dM1 = M0/h.
/// M0 = int_0^h K1(h-s) ds, M1 = int_0^h (s/h) K1(h-s) ds.
struct ModePropagator {
    ModeCoeffs coeffs;
    double step = 0.0;
    cplx K0, K1, dK0, dK1, M0, M1;
    cplx dM0() const { return K1; }
    cplx dM1() const { return M0 / step; }
};

ModePropagator build_propagator(const ModeCoeffs& coeffs, double h);

/// Stable scalar kernels, exposed for tests.
/// sinhc(z) = sinh(z)/z;  phi1(z) = (e^z-1)/z;  phi2(z) = (e^z-1-z)/z^2.
/// dd_f(z1,z2) = (f(z1)-f(z2))/(z1-z2) evaluated without cancellation for
/// close or coincident arguments (divided differences of exp and phi).
cplx sinhc(cplx z);
cplx phi1(cplx z);
cplx phi2(cplx z);
cplx dd_exp(cplx z1, cplx z2);
cplx dd_phi1(cplx z1, cplx z2);
cplx dd_phi2(cplx z1, cplx z2);

/// Probes the root asymptotics
///   lambda1 ~ -|xi|^{2(sigma-sigma1)}, lambda2 ~ -|xi|^{2 sigma1} (xi -> 0)
///   lambda1 ~ -|xi|^{2(sigma-sigma2)}, lambda2 ~ -|xi|^{2 sigma2} (xi -> inf)
/// at |xi| in {1e-3, 1e-4} and {1e3, 1e4}.
struct AsymptoticProbe {
    double xi = 0.0;
    double ratio1 = 0.0;     // lambda1 / model
    double ratio2 = 0.0;
    bool in_oscillatory = false;
};
struct AsymptoticReport {
    std::vector<AsymptoticProbe> small_xi;
    std::vector<AsymptoticProbe> large_xi;
    bool all_within_10_percent = false;
    bool monotone_convergence = false;
    bool regime_boundary_warning = false;
};
AsymptoticReport asymptotic_check(const ModelParams& params);

}  // namespace sevo

#endif

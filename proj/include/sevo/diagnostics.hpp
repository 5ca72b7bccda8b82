#ifndef SEVO_DIAGNOSTICS_HPP
#define SEVO_DIAGNOSTICS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sevo/propagator.hpp"

namespace sevo {

enum class NormKind { L2, HsigmaDot, Linf, LqM1 };
const char* to_string(NormKind k);

struct FitWindow {
    double t_lo = 0.0;
    double t_hi = 0.0;
};

/// Ordinary least squares of y on x; exponent fits use x = log(1+t),
/// y = log(norm).
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double curvature = 0.0;  // quadratic coefficient of a 2nd-order refit
    int points = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct DecayFit {
    double exponent = 0.0;  // alpha in norm ~ C (1+t)^{-alpha}
    double stderr_ = 0.0;
    FitWindow window;
    NormKind norm_kind = NormKind::L2;
    double curvature = 0.0;
    bool non_power_law = false;  // log-log curvature above threshold
    int points = 0;
};

/// Throws std::runtime_error("insufficient samples ...") with fewer than 10
/// samples in the window and ("non-positive norm ...") on zero/negative data.
DecayFit fit_decay(const SimulationTrace& trace, NormKind kind, FitWindow window);

/// Weighted space-time norms of the solution ball argument:
///   X: sup (1+t)^{alpha_u} ||u||_2 + (1+t)^{alpha_grad} || |D|^s u ||_2
///   Z: sup (1+t)^{-sigma1/(sigma-sigma1)} ||u||_2
///   Y applied to |u|^p with the beta-supremum sampled at
///     beta in {m1, (m1+2)/2, 2}.
struct WeightedNorms {
    double x_norm = 0.0;
    double z_norm = 0.0;
    double y_norm_of_up = 0.0;
};
WeightedNorms weighted_norms(const SimulationTrace& trace, const ModelParams& params,
                             RegularityIndex m);
/// The L^q norms of u that the trace must carry for the Y norm.
std::vector<double> y_norm_q_list(const ModelParams& params);

/// Smooth temporal cutoff: 1 on [0, T/2], exp(1 - 1/(1-s^2)) joiner on
/// (T/2, T) with s = (2t-T)/T, 0 beyond. Derivatives are analytic.
struct TestProfile {
    double horizon = 1.0;  // T
    double value(double t) const;
    double d1(double t) const;
    /// Second derivative; it has one-sided limits at T/2 (0 from the left,
    /// -2 (2/T)^2 from the right), selected by `from_right` at that point.
    double d2(double t, bool from_right = false) const;
};

struct WeakFormTest {
    TestProfile eta;               // temporal part
    std::vector<double> phi;       // spatial part, physical values on the grid
};

/// Spatial Gaussian test profile exp(-|x|^2 / (2 w^2)) on the trace's grid.
std::vector<double> gaussian_test_profile(const SpectralGrid& grid, double width);

/// Residual of the weak formulation on a stored run, normalized by the
/// largest of the three terms. Requires >= 64 snapshots across supp(eta).
/// `scale` multiplies the stored solution (detector calibration).
double weak_residual(const SimulationTrace& trace, const ModelParams& params,
                     const WeakFormTest& test, double scale = 1.0);

struct TestFunctionConfig {
    double R = 1.0;
    double K = 1.0;
    double alpha = 0.0;        // 0: default 2(sigma - sigma1)
    double epsilon_phi = 0.1;  // tail exponent of <x>^{-n-eps}
};

struct TestFunctionReport {
    double I_R = 0.0;
    double I_tilde_R = 0.0;
    double data_term = 0.0;   // eps * int u1 phi_R dx
    double rhs_bound = 0.0;   // R^{-2 sigma p' + n + 2(sigma-sigma1)} K^n
    double scaling_exponent = 0.0;
    double ratio = 0.0;       // data_term / rhs_bound
};

/// Functionals of the blow-up test-function machinery on a stored run.
/// Throws when the trace does not cover [0, R^alpha].
TestFunctionReport testfn_functionals(const SimulationTrace& trace,
                                      const TestFunctionConfig& cfg,
                                      const ModelParams& params, RegularityIndex m);

/// Exponent -2 sigma p' + n + 2(sigma - sigma1), p' = p/(p-1).
double testfn_scaling_exponent(const ModelParams& params);

struct DataTermFit {
    std::vector<double> R_values;
    std::vector<double> integrals;
    double growth_exponent = 0.0;  // slope of log I + log log R vs log R
    double prefactor = 0.0;
    double max_deviation = 0.0;    // residual of the corrected fit
};

/// Quadrature of int <x>^{-n/m} (log(e+|x|))^{-1} <x/R>^{-n-eps} dx over R^n
/// for each R, with a log-corrected growth fit against n - n/m.
DataTermFit data_term_lower_bound(int n, double m, const std::vector<double>& R_values,
                                  double epsilon_phi = 0.1);

struct LifespanRecord {
    double eps = 0.0;
    double T_blow = 0.0;
    bool censored = false;  // horizon reached without blow-up
    RunStatus status = RunStatus::Completed;
};

struct LifespanSweep {
    std::vector<LifespanRecord> records;
    LineFit fit;                     // log T vs log eps, uncensored only
    double measured_slope = 0.0;
    double theoretical_slope = 0.0;  // -(p-1)/gamma_m
    bool monotone = true;            // T non-increasing in eps
};

struct LifespanOptions {
    double horizon = 200.0;
    SolveOptions solver;      // t_end is overwritten per run
    InitialDataOptions data;  // kind chosen from m
    int workers = 1;
    std::function<void(const LifespanRecord&)> on_record;  // called as runs finish
    /// Resume hook: a returned record is used instead of recomputing.
    std::function<std::optional<LifespanRecord>(double eps)> resume_lookup;
};

/// Runs solve() per eps with blow-up detection and fits log T_blow vs
/// log eps. Throws on gamma_m <= 0 ("critical or supercritical") and when
/// every run is censored.
LifespanSweep lifespan_sweep(const ModelParams& params, RegularityIndex m,
                             const std::vector<double>& eps_list, GridPtr grid,
                             const LifespanOptions& options);

}  // namespace sevo

#endif

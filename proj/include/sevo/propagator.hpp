#ifndef SEVO_PROPAGATOR_HPP
#define SEVO_PROPAGATOR_HPP

#include <vector>

#include "sevo/kernels.hpp"
#include "sevo/model.hpp"
#include "sevo/spectral.hpp"

namespace sevo {

/// Kernel values of every grid mode for one step size. The linear part of a
/// step is exact; all stiffness sits inside the exponentials.
struct PropagatorTable {
    double h = 0.0;
    std::vector<ModePropagator> modes;
};

PropagatorTable build_table(const SpectralGrid& grid, const ModelParams& params, double h);

struct StepOutcome {
    FieldState next;
    double discrepancy = 0.0;   // L2 size of the corrector-predictor update
    double linf_start = 0.0;    // max |u(t)| on the refined grid
    double linf_end = 0.0;      // max |u| at the predictor (estimate at t+h)
    double imag_residue = 0.0;
    bool nonfinite = false;
};

/// One step of the exponential predictor-corrector. The linear flow is
/// applied exactly; |u|^p enters through the Duhamel moments M0/M1 with the
/// forcing interpolated linearly in time (second order). The nonlinearity is
/// evaluated pointwise on a 2x-refined grid (transform-pad-evaluate-truncate).
StepOutcome step(const FieldState& state, const ModelParams& params,
                 const PropagatorTable& table, bool nonlinear);

enum class RunStatus { Completed, BlewUp, StepUnderflow };

const char* to_string(RunStatus s);

struct TraceSample {
    double t = 0.0;
    double l2 = 0.0;         // ||u||_{L^2}
    double hsigma = 0.0;     // || |D|^sigma u ||_{L^2}
    double linf = 0.0;
    double lq_m1 = 0.0;      // ||u||_{L^{m1}}, m1 = max{1, 2/p}
    double zero_mode = 0.0;  // L^2 weight of the mean mode
    double h_used = 0.0;
    std::vector<double> extra_lq;
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> u;  // physical values
};

struct SimulationTrace {
    ModelParams params;
    RegularityIndex m;
    GridPtr grid;
    RunStatus status = RunStatus::Completed;
    bool blowup_flag = false;
    double t_blow = 0.0;
    double t_end_requested = 0.0;
    std::vector<TraceSample> samples;
    std::vector<double> extra_lq_list;
    std::vector<double> step_times;     // accepted steps, when track_energy
    std::vector<double> step_energies;  // E = ||  |D|^sigma u ||^2 + ||u_t||^2
    std::vector<Snapshot> snapshots;
    std::vector<double> initial_u;      // physical eps*u0
    std::vector<double> initial_v;      // physical eps*u1
    double max_imag_residue = 0.0;
    bool zero_mode_flagged = false;     // sigma1 > 0 and mean mode > 1% of L2
};

struct SolveOptions {
    double t_end = 1.0;
    double h0 = 0.05;
    bool adaptive = true;
    double tol = 1e-5;       // corrector-predictor L2 discrepancy bound
    double h_min = 1e-7;
    double h_max = 0.5;
    double sample_dt = 0.1;
    double blowup_threshold = 0.0;  // 0: auto = 1e8 * initial Linf + 1
    bool nonlinear = true;
    int snapshot_every = 0;  // store u every k-th sample (0 = never)
    bool track_energy = false;
    std::vector<double> extra_lq;
};

/// Advances the state to t_end, sampling norms on the way. Terminates early
/// with the blow-up flag on threshold crossing (refined by one bisection pass
/// in time), on non-finite values, or on step underflow with the discrepancy
/// still above tol (reported as suspected blow-up at that time).
SimulationTrace solve(const FieldState& initial, const ModelParams& params,
                      RegularityIndex m, const SolveOptions& options);

/// E(t) of the linear flow, non-increasing in exact arithmetic.
double flow_energy(const FieldState& state, const ModelParams& params);

}  // namespace sevo

#endif

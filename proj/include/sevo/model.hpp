#ifndef SEVO_MODEL_HPP
#define SEVO_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

namespace sevo {

/// Parameters of the Cauchy problem
///   u_tt + (-Lap)^sigma u + (-Lap)^sigma1 u_t + (-Lap)^sigma2 u_t = |u|^p,
///   u(0) = eps*u0,  u_t(0) = eps*u1.
/// Admissible range: 0 <= sigma1 < sigma/2 < sigma2 <= sigma, sigma >= 1,
/// p > 1, eps > 0, n >= 1.
struct ModelParams {
    int n = 1;
    double sigma = 1.0;
    double sigma1 = 0.0;
    double sigma2 = 1.0;
    double p = 2.0;
    double eps = 1.0;
};

/// L^m data-regularity index, m in [1,2].
struct RegularityIndex {
    double m = 1.0;
};

/// m1 = max{1, 2/p}: the integrability index of |u|^p when u is L^2-based.
double m1_index(double p);

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;
    std::string message() const;
};

ValidationReport validate(const ModelParams& params);
ValidationReport validate(RegularityIndex m);

/// Throws std::invalid_argument listing every failed inequality.
void require_valid(const ModelParams& params);
void require_valid(const ModelParams& params, RegularityIndex m);

/// Critical exponent 1 + 2*m*sigma/(n - 2*m*sigma1).
/// finite == false when n <= 2*m*sigma1 (every p > 1 is then subcritical for
/// blow-up purposes; there is no finite threshold).
struct CriticalExponent {
    bool finite = true;
    double value = 0.0;
};
CriticalExponent p_crit(const ModelParams& params, RegularityIndex m);

/// Signed decay rates alpha of (1+t)^{-alpha} for ||u||_{L^2} and
/// ||  |D|^sigma u ||_{L^2}. alpha_u may be negative (growth) for large
/// sigma1 / large m; the value is reported without interpretation.
struct DecayExponents {
    double alpha_u = 0.0;
    double alpha_grad = 0.0;
};
DecayExponents decay_exponents(const ModelParams& params, RegularityIndex m);

/// Subcritical deficiency exponent
///   gamma_m = 1 - n(p-1)/(2m(sigma-sigma1)) + p*sigma1/(sigma-sigma1).
/// lifespan_slope = -(p-1)/gamma_m is defined only when gamma_m > 0
/// (subcritical); otherwise `subcritical` is false and the slope is NaN.
struct LifespanExponent {
    double gamma = 0.0;
    bool subcritical = false;
    double lifespan_slope = 0.0;
};
LifespanExponent gamma_m(const ModelParams& params, RegularityIndex m);

enum class Verdict {
    GlobalTheorem,
    BlowupTheorem,
    LocalOnly,
    OutsideAllTheorems,
};

const char* to_string(Verdict v);

/// Which theorem hypothesis sets hold for (params, m). Boundary cases are
/// decided exactly (inputs are binary doubles, hence rationals), never by a
/// floating tolerance; `boundary_hits` lists comparisons that landed exactly
/// on an equality.
struct RegionVerdict {
    bool local_ok = false;
    bool global_ok = false;
    bool blowup = false;
    std::string local_reason;
    std::string global_reason;
    std::string blowup_reason;
    CriticalExponent pc;
    Verdict verdict = Verdict::OutsideAllTheorems;
    std::vector<std::string> failed_conditions;
    std::vector<std::string> boundary_hits;
};

RegionVerdict classify(const ModelParams& params, RegularityIndex m);

/// Threshold in the global-existence m-condition:
///   max{1, (sqrt((n+4s1)^2 + 16n(s-s1)) - n - 4s1) / (4(s-s1))}.
/// Equals 1 exactly iff n <= 2(sigma+sigma1).
double global_m_threshold(const ModelParams& params);

}  // namespace sevo

#endif

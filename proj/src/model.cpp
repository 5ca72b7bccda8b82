#include "sevo/model.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sevo {

namespace {

// Exact rational arithmetic for boundary-sensitive condition checks. Every
// finite double is a dyadic rational, so all comparisons below are exact.
using Rat = boost::multiprecision::cpp_rational;

Rat rat(double x) { return Rat(x); }

enum class Cmp { Less, Equal, Greater };

Cmp cmp(const Rat& a, const Rat& b) {
    if (a < b) return Cmp::Less;
    if (a > b) return Cmp::Greater;
    return Cmp::Equal;
}

}  // namespace

double m1_index(double p) { return std::max(1.0, 2.0 / p); }

std::string ValidationReport::message() const {
    std::ostringstream os;
    for (size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i];
    }
    return os.str();
}

ValidationReport validate(const ModelParams& q) {
    ValidationReport r;
    auto fail = [&](const std::string& s) {
        r.ok = false;
        r.violations.push_back(s);
    };
    if (!(q.n >= 1)) fail("n >= 1 violated");
    if (!(q.sigma >= 1.0)) fail("sigma >= 1 violated");
    if (!(q.sigma1 >= 0.0)) fail("sigma1 >= 0 violated");
    if (!(q.sigma1 < q.sigma / 2.0)) fail("sigma1 < sigma/2 violated (sigma1 >= sigma/2)");
    if (!(q.sigma2 > q.sigma / 2.0)) fail("sigma2 > sigma/2 violated");
    if (!(q.sigma2 <= q.sigma)) fail("sigma2 <= sigma violated");
    if (!(q.p > 1.0)) fail("p > 1 violated");
    if (!(q.eps > 0.0)) fail("eps > 0 violated");
    return r;
}

ValidationReport validate(RegularityIndex m) {
    ValidationReport r;
    if (!(m.m >= 1.0 && m.m <= 2.0)) {
        r.ok = false;
        r.violations.push_back("m in [1,2] violated");
    }
    return r;
}

void require_valid(const ModelParams& q) {
    auto r = validate(q);
    if (!r.ok) throw std::invalid_argument("invalid model parameters: " + r.message());
}

void require_valid(const ModelParams& q, RegularityIndex m) {
    require_valid(q);
    auto r = validate(m);
    if (!r.ok) throw std::invalid_argument("invalid regularity index: " + r.message());
}

CriticalExponent p_crit(const ModelParams& q, RegularityIndex m) {
    require_valid(q, m);
    CriticalExponent out;
    // n <= 2 m sigma1, decided exactly
    if (cmp(rat(double(q.n)), 2 * rat(m.m) * rat(q.sigma1)) != Cmp::Greater) {
        out.finite = false;
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }
    out.finite = true;
    out.value = 1.0 + 2.0 * m.m * q.sigma / (q.n - 2.0 * m.m * q.sigma1);
    return out;
}

DecayExponents decay_exponents(const ModelParams& q, RegularityIndex m) {
    require_valid(q, m);
    const double d = q.sigma - q.sigma1;
    DecayExponents e;
    e.alpha_u = q.n / (2.0 * d) * (1.0 / m.m - 0.5) - q.sigma1 / d;
    e.alpha_grad = q.n / (2.0 * d) * (1.0 / m.m - 0.5) + (q.sigma - 2.0 * q.sigma1) / (2.0 * d);
    return e;
}

LifespanExponent gamma_m(const ModelParams& q, RegularityIndex m) {
    require_valid(q, m);
    const double d = q.sigma - q.sigma1;
    LifespanExponent out;
    out.gamma = 1.0 - q.n * (q.p - 1.0) / (2.0 * m.m * d) + q.p * q.sigma1 / d;
    out.subcritical = out.gamma > 0.0;
    out.lifespan_slope =
        out.subcritical ? -(q.p - 1.0) / out.gamma : std::numeric_limits<double>::quiet_NaN();
    return out;
}

double global_m_threshold(const ModelParams& q) {
    const double d = q.sigma - q.sigma1;
    const double s = q.n + 4.0 * q.sigma1;
    const double root = std::sqrt(s * s + 16.0 * q.n * d);
    return std::max(1.0, (root - s) / (4.0 * d));
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::GlobalTheorem: return "GlobalTheorem";
        case Verdict::BlowupTheorem: return "BlowupTheorem";
        case Verdict::LocalOnly: return "LocalOnly";
        case Verdict::OutsideAllTheorems: return "OutsideAllTheorems";
    }
    return "?";
}

namespace {

struct ConditionLog {
    std::vector<std::string>* failed;
    std::vector<std::string>* boundary;

    // Records a comparison lhs (rel) rhs; returns whether it holds.
    bool check(const Rat& lhs, Cmp want, bool or_equal, const Rat& rhs, const char* id) {
        Cmp c = cmp(lhs, rhs);
        if (c == Cmp::Equal) boundary->push_back(id);
        bool ok = (c == want) || (or_equal && c == Cmp::Equal);
        if (!ok) failed->push_back(id);
        return ok;
    }
};

// Exact test of  m > max{1, (sqrt(D) - s)/(4d)}  with D = s^2 + 16 n d,
// s = n + 4 sigma1, d = sigma - sigma1. Equivalent to m > 1 and
// (4 d m + s)^2 > D, all in rational arithmetic.
bool global_m_above_threshold(const ModelParams& q, double m, ConditionLog& log) {
    Rat d = rat(q.sigma) - rat(q.sigma1);
    Rat s = rat(double(q.n)) + 4 * rat(q.sigma1);
    Rat D = s * s + 16 * rat(double(q.n)) * d;
    Rat lhs = 4 * d * rat(m) + s;
    bool above_sqrt = log.check(lhs * lhs, Cmp::Greater, false, D, "global.m_threshold");
    bool above_one = rat(m) > 1;
    if (!above_one) log.failed->push_back("global.m_above_one");
    return above_sqrt && above_one;
}

// Upper bound on m shared by the local and global theorems:
// m <= 2 when sigma1 = 0, m < 2n/(n + 4 sigma1) when sigma1 > 0.
bool m_upper_bound(const ModelParams& q, double m, const char* id, ConditionLog& log) {
    if (q.sigma1 == 0.0) return log.check(rat(m), Cmp::Less, true, rat(2.0), id);
    Rat bound = 2 * rat(double(q.n)) / (rat(double(q.n)) + 4 * rat(q.sigma1));
    return log.check(rat(m), Cmp::Less, false, bound, id);
}

// p-range shared by the local and global theorems (upper part):
// p < inf if n <= 2 sigma; p <= n/(n-2 sigma) if 2 sigma < n < 4 sigma/(2-m);
// no case covers n >= 4 sigma/(2-m).
bool p_upper_bound(const ModelParams& q, double m, const char* id_p, const char* id_dim,
                   ConditionLog& log) {
    Rat n = rat(double(q.n));
    Rat two_sigma = 2 * rat(q.sigma);
    if (n <= two_sigma) return true;  // p < inf
    // need n < 4 sigma / (2 - m); m = 2 makes the bound +inf
    bool dim_ok;
    if (m >= 2.0) {
        dim_ok = true;
    } else {
        Rat bound = 4 * rat(q.sigma) / (rat(2.0) - rat(m));
        dim_ok = n < bound;
    }
    if (!dim_ok) {
        log.failed->push_back(id_dim);
        return false;
    }
    Rat cap = n / (n - two_sigma);
    return log.check(rat(q.p), Cmp::Less, true, cap, id_p);
}

}  // namespace

RegionVerdict classify(const ModelParams& q, RegularityIndex mi) {
    require_valid(q, mi);
    const double m = mi.m;
    RegionVerdict v;
    v.pc = p_crit(q, mi);
    ConditionLog log{&v.failed_conditions, &v.boundary_hits};

    // Local existence: m in (1,2] (sigma1=0) or (1, 2n/(n+4 sigma1)) (sigma1>0),
    // and 2/m < p with the dimensional upper caps.
    {
        bool m_low = log.check(rat(m), Cmp::Greater, false, rat(1.0), "local.m_above_one");
        bool m_up = m_upper_bound(q, m, "local.m_upper", log);
        bool p_low = log.check(rat(q.p), Cmp::Greater, false, 2 / rat(m), "local.p_lower");
        bool p_up = p_upper_bound(q, m, "local.p_upper", "local.dim_range", log);
        v.local_ok = m_low && m_up && p_low && p_up;
        v.local_reason = v.local_ok ? "local hypothesis set holds"
                                    : "local hypothesis set fails";
    }

    // Global existence: m above the threshold and within the same upper
    // bounds; p >= p_crit(m) with the same caps.
    {
        bool m_low = global_m_above_threshold(q, m, log);
        bool m_up = m_upper_bound(q, m, "global.m_upper", log);
        bool p_low = false;
        if (v.pc.finite) {
            Rat pc = 1 + 2 * rat(m) * rat(q.sigma) /
                             (rat(double(q.n)) - 2 * rat(m) * rat(q.sigma1));
            p_low = log.check(rat(q.p), Cmp::Greater, true, pc, "global.p_lower");
        } else {
            log.failed->push_back("global.p_lower");
        }
        bool p_up = p_upper_bound(q, m, "global.p_upper", "global.dim_range", log);
        v.global_ok = m_low && m_up && p_low && p_up;
        v.global_reason = v.global_ok ? "global hypothesis set holds"
                                      : "global hypothesis set fails";
    }

    // Blow-up: 1 < p < inf if n <= 2 m sigma1; p <= 1 + 2 sigma/(n-2 sigma1)
    // if m = 1, n > 2 sigma1; p < p_crit(m) if m > 1, n > 2 m sigma1.
    {
        Rat n = rat(double(q.n));
        Rat two_m_s1 = 2 * rat(m) * rat(q.sigma1);
        if (n <= two_m_s1) {
            v.blowup = true;
            v.blowup_reason = "n <= 2 m sigma1: every p > 1 blows up";
        } else if (m == 1.0) {
            Rat cap = 1 + 2 * rat(q.sigma) / (n - 2 * rat(q.sigma1));
            v.blowup = log.check(rat(q.p), Cmp::Less, true, cap, "blowup.p_upper_m1");
            v.blowup_reason = v.blowup ? "m = 1 and p <= 1 + 2 sigma/(n-2 sigma1)"
                                       : "m = 1 and p above the blow-up cap";
        } else {
            Rat pc = 1 + 2 * rat(m) * rat(q.sigma) / (n - two_m_s1);
            v.blowup = log.check(rat(q.p), Cmp::Less, false, pc, "blowup.p_below_crit");
            v.blowup_reason =
                v.blowup ? "m > 1 and p < p_crit(m)" : "m > 1 and p >= p_crit(m)";
        }
    }

    if (v.global_ok) {
        v.verdict = Verdict::GlobalTheorem;
    } else if (v.blowup) {
        v.verdict = Verdict::BlowupTheorem;
    } else if (v.local_ok) {
        v.verdict = Verdict::LocalOnly;
    } else {
        v.verdict = Verdict::OutsideAllTheorems;
    }
    return v;
}

}  // namespace sevo

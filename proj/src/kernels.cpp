#include "sevo/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace sevo {

namespace {

constexpr double kSeriesRadius = 0.5;   // below this |z|, power series
constexpr double kDirectDelta = 30.0;   // above this |delta|, plain exponentials
constexpr double kDoubleRootGap = 1e-6; // relative root gap for the confluent path

bool near_zero_pair(cplx z1, cplx z2) {
    return std::max(std::abs(z1), std::abs(z2)) < kSeriesRadius;
}

}  // namespace

const char* to_string(ModeRegime r) {
    switch (r) {
        case ModeRegime::Oscillatory: return "oscillatory";
        case ModeRegime::Overdamped: return "overdamped";
        case ModeRegime::DoubleRoot: return "double-root";
    }
    return "?";
}

double power_symbol(double r, double two_theta) {
    if (r == 0.0) return two_theta == 0.0 ? 1.0 : 0.0;
    return std::pow(r, two_theta);
}

double damping_symbol(double r, const ModelParams& q) {
    return power_symbol(r, 2.0 * q.sigma1) + power_symbol(r, 2.0 * q.sigma2);
}

double dispersion_symbol(double r, const ModelParams& q) {
    return power_symbol(r, 2.0 * q.sigma);
}

ModeCoeffs mode_coeffs(double xi_abs, const ModelParams& q) {
    ModeCoeffs c;
    c.a = damping_symbol(xi_abs, q);
    c.b = dispersion_symbol(xi_abs, q);
    const double disc = c.a * c.a - 4.0 * c.b;
    const double scale = std::max({c.a * c.a, 4.0 * c.b, 1e-300});
    if (std::abs(disc) <= 1e-12 * scale) {
        c.regime = ModeRegime::DoubleRoot;
        c.lambda1 = c.lambda2 = cplx(-0.5 * c.a, 0.0);
    } else if (disc > 0.0) {
        c.regime = ModeRegime::Overdamped;
        const double s = std::sqrt(disc);
        // product form for the small root avoids cancellation when 4b << a^2
        c.lambda2 = cplx(-0.5 * (c.a + s), 0.0);
        c.lambda1 = (c.a + s) > 0.0 ? cplx(-2.0 * c.b / (c.a + s), 0.0) : cplx(0.0, 0.0);
    } else {
        c.regime = ModeRegime::Oscillatory;
        const double w = 0.5 * std::sqrt(-disc);
        c.lambda1 = cplx(-0.5 * c.a, w);
        c.lambda2 = cplx(-0.5 * c.a, -w);
    }
    return c;
}

cplx sinhc(cplx z) {
    if (std::abs(z) < kSeriesRadius) {
        // sum z^{2k} / (2k+1)!
        cplx sum = 1.0, term = 1.0;
        const cplx z2 = z * z;
        for (int k = 1; k <= 16; ++k) {
            term *= z2 / double((2 * k) * (2 * k + 1));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return std::sinh(z) / z;
}

cplx phi1(cplx z) {
    if (std::abs(z) < kSeriesRadius) {
        cplx sum = 1.0, term = 1.0;
        for (int k = 1; k <= 24; ++k) {
            term *= z / double(k + 1);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return (std::exp(z) - 1.0) / z;
}

cplx phi2(cplx z) {
    if (std::abs(z) < kSeriesRadius) {
        cplx sum = 0.5, term = 0.5;
        for (int k = 1; k <= 24; ++k) {
            term *= z / double(k + 2);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return (std::exp(z) - 1.0 - z) / (z * z);
}

cplx dd_exp(cplx z1, cplx z2) {
    const cplx delta = 0.5 * (z1 - z2);
    const cplx mu = 0.5 * (z1 + z2);
    if (std::abs(delta) > kDirectDelta) return (std::exp(z1) - std::exp(z2)) / (z1 - z2);
    return std::exp(mu) * sinhc(delta);
}

namespace {

// Bivariate series sum_{k>=1} h_{k-1}(z1,z2) / (k+j)! with
// h_j(z1,z2) = sum_{i<=j} z1^i z2^{j-i}; valid for small arguments. This is
// the first divided difference of phi_j (j = 1, 2).
cplx dd_phi_series(cplx z1, cplx z2, int j) {
    double fact = 1.0;
    for (int i = 2; i <= 1 + j; ++i) fact *= i;  // (1+j)!
    cplx sum = 1.0 / fact;
    cplx h = 1.0;       // h_0
    cplx z2pow = 1.0;   // z2^{k-1}
    int small_terms = 0;
    for (int k = 2; k <= 34; ++k) {
        z2pow *= z2;
        h = z1 * h + z2pow;  // h_{k-1}
        fact *= (k + j);
        const cplx term = h / fact;
        sum += term;
        // conjugate pairs zero out every other h_k, so require two
        // consecutive negligible terms before stopping
        small_terms = std::abs(term) < 1e-18 * std::abs(sum) ? small_terms + 1 : 0;
        if (small_terms >= 2) break;
    }
    return sum;
}

}  // namespace

cplx dd_phi1(cplx z1, cplx z2) {
    if (near_zero_pair(z1, z2)) return dd_phi_series(z1, z2, 1);
    const double zmax = std::max(std::abs(z1), std::abs(z2));
    if (std::abs(z1 - z2) > kDoubleRootGap * zmax) return (phi1(z1) - phi1(z2)) / (z1 - z2);
    // Confluent pair: one more divided-difference level with a node at 0,
    // dd_phi1(z1,z2) = (dd_exp(z1,z2) - phi1(zp)) / zq, |zq| >= |zp|.
    const cplx zq = std::abs(z1) >= std::abs(z2) ? z1 : z2;
    const cplx zp = std::abs(z1) >= std::abs(z2) ? z2 : z1;
    return (dd_exp(z1, z2) - phi1(zp)) / zq;
}

cplx dd_phi2(cplx z1, cplx z2) {
    if (near_zero_pair(z1, z2)) return dd_phi_series(z1, z2, 2);
    const double zmax = std::max(std::abs(z1), std::abs(z2));
    if (std::abs(z1 - z2) > kDoubleRootGap * zmax) return (phi2(z1) - phi2(z2)) / (z1 - z2);
    const cplx zq = std::abs(z1) >= std::abs(z2) ? z1 : z2;
    const cplx zp = std::abs(z1) >= std::abs(z2) ? z2 : z1;
    return (dd_phi1(z1, z2) - phi2(zp)) / zq;
}

ModePropagator build_propagator(const ModeCoeffs& c, double h) {
    ModePropagator P;
    P.coeffs = c;
    P.step = h;
    const cplx z1 = c.lambda1 * h;
    const cplx z2 = c.lambda2 * h;
    const cplx delta = 0.5 * (z1 - z2);
    const cplx mu = 0.5 * (z1 + z2);

    if (std::abs(delta) > kDirectDelta) {
        // widely separated roots: plain exponentials, no cancellation
        const cplx E1 = std::exp(z1), E2 = std::exp(z2);
        const cplx dz = z1 - z2;
        P.K1 = h * (E1 - E2) / dz;
        P.dK1 = (z1 * E1 - z2 * E2) / dz;
        P.K0 = (z1 * E2 - z2 * E1) / dz;
    } else {
        const cplx S = sinhc(delta);
        const cplx C = std::cosh(delta);
        const cplx EM = std::exp(mu);
        P.K1 = h * EM * S;
        P.dK1 = EM * (C + mu * S);
        P.K0 = EM * (C - mu * S);
    }
    P.dK0 = -c.b * P.K1;
    P.M0 = h * h * dd_phi1(z1, z2);
    P.M1 = h * h * dd_phi2(z1, z2);
    return P;
}

AsymptoticReport asymptotic_check(const ModelParams& q) {
    require_valid(q);
    AsymptoticReport rep;
    auto probe = [&](double xi, bool small) {
        AsymptoticProbe pr;
        pr.xi = xi;
        const ModeCoeffs c = mode_coeffs(xi, q);
        pr.in_oscillatory = (c.regime == ModeRegime::Oscillatory);
        const double e1 = small ? 2.0 * (q.sigma - q.sigma1) : 2.0 * (q.sigma - q.sigma2);
        const double e2 = small ? 2.0 * q.sigma1 : 2.0 * q.sigma2;
        pr.ratio1 = c.lambda1.real() / -power_symbol(xi, e1);
        pr.ratio2 = c.lambda2.real() / -power_symbol(xi, e2);
        return pr;
    };
    for (double xi : {1e-3, 1e-4}) rep.small_xi.push_back(probe(xi, true));
    for (double xi : {1e3, 1e4}) rep.large_xi.push_back(probe(xi, false));

    rep.all_within_10_percent = true;
    rep.regime_boundary_warning = false;
    auto scan = [&](const std::vector<AsymptoticProbe>& v) {
        for (const auto& pr : v) {
            if (!(pr.ratio1 >= 0.9 && pr.ratio1 <= 1.1)) rep.all_within_10_percent = false;
            if (!(pr.ratio2 >= 0.9 && pr.ratio2 <= 1.1)) rep.all_within_10_percent = false;
            if (pr.in_oscillatory) rep.regime_boundary_warning = true;
        }
    };
    scan(rep.small_xi);
    scan(rep.large_xi);
    auto closer = [](double r_far, double r_near) {
        return std::abs(r_near - 1.0) <= std::abs(r_far - 1.0) + 1e-15;
    };
    rep.monotone_convergence =
        closer(rep.small_xi[0].ratio1, rep.small_xi[1].ratio1) &&
        closer(rep.small_xi[0].ratio2, rep.small_xi[1].ratio2) &&
        closer(rep.large_xi[0].ratio1, rep.large_xi[1].ratio1) &&
        closer(rep.large_xi[0].ratio2, rep.large_xi[1].ratio2);
    return rep;
}

}  // namespace sevo

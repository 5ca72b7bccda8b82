#ifndef SEVO_ODE_REFERENCE_HPP
#define SEVO_ODE_REFERENCE_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

namespace sevo {

/// Adaptive Cash-Karp RK45 for the scalar mode equation
///   w'' + a w' + b w = g(t),
/// used as an independent reference for the closed-form propagator
/// coefficients. Deliberately uses nothing from the kernel evaluation path.
struct OdeReferenceResult {
    double w = 0.0;
    double dw = 0.0;
    long long steps = 0;
};

inline OdeReferenceResult integrate_mode_ode(double a, double b,
                                             const std::function<double(double)>& g,
                                             double w0, double dw0, double h,
                                             double rtol = 1e-13) {
    const double atol = 1e-305;
    double t = 0.0, w = w0, dw = dw0;
    auto f0 = [&](double /*t*/, double /*y0*/, double y1) { return y1; };
    auto f1 = [&](double tt, double y0, double y1) { return g(tt) - a * y1 - b * y0; };

    // Cash-Karp tableau
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 3.0 / 5, c5 = 1.0, c6 = 7.0 / 8;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 3.0 / 10, a42 = -9.0 / 10, a43 = 6.0 / 5;
    static const double a51 = -11.0 / 54, a52 = 5.0 / 2, a53 = -70.0 / 27, a54 = 35.0 / 27;
    static const double a61 = 1631.0 / 55296, a62 = 175.0 / 512, a63 = 575.0 / 13824,
                        a64 = 44275.0 / 110592, a65 = 253.0 / 4096;
    static const double b1 = 37.0 / 378, b3 = 250.0 / 621, b4 = 125.0 / 594, b6 = 512.0 / 1771;
    static const double d1 = 2825.0 / 27648, d3 = 18575.0 / 48384, d4 = 13525.0 / 55296,
                        d5 = 277.0 / 14336, d6 = 1.0 / 4;

    double dt = h / 16.0;
    const double stiff = std::max({a, std::sqrt(std::max(b, 0.0)), 1.0});
    dt = std::min(dt, 1.0 / stiff);
    OdeReferenceResult out;
    long long guard = 0;
    while (t < h) {
        if (++guard > 50'000'000LL) throw std::runtime_error("reference ODE integration stalled");
        dt = std::min(dt, h - t);
        const double k1w = f0(t, w, dw), k1v = f1(t, w, dw);
        double tw = w + dt * a21 * k1w, tv = dw + dt * a21 * k1v;
        const double k2w = f0(t + c2 * dt, tw, tv), k2v = f1(t + c2 * dt, tw, tv);
        tw = w + dt * (a31 * k1w + a32 * k2w);
        tv = dw + dt * (a31 * k1v + a32 * k2v);
        const double k3w = f0(t + c3 * dt, tw, tv), k3v = f1(t + c3 * dt, tw, tv);
        tw = w + dt * (a41 * k1w + a42 * k2w + a43 * k3w);
        tv = dw + dt * (a41 * k1v + a42 * k2v + a43 * k3v);
        const double k4w = f0(t + c4 * dt, tw, tv), k4v = f1(t + c4 * dt, tw, tv);
        tw = w + dt * (a51 * k1w + a52 * k2w + a53 * k3w + a54 * k4w);
        tv = dw + dt * (a51 * k1v + a52 * k2v + a53 * k3v + a54 * k4v);
        const double k5w = f0(t + c5 * dt, tw, tv), k5v = f1(t + c5 * dt, tw, tv);
        tw = w + dt * (a61 * k1w + a62 * k2w + a63 * k3w + a64 * k4w + a65 * k5w);
        tv = dw + dt * (a61 * k1v + a62 * k2v + a63 * k3v + a64 * k4v + a65 * k5v);
        const double k6w = f0(t + c6 * dt, tw, tv), k6v = f1(t + c6 * dt, tw, tv);

        const double w5 = w + dt * (b1 * k1w + b3 * k3w + b4 * k4w + b6 * k6w);
        const double v5 = dw + dt * (b1 * k1v + b3 * k3v + b4 * k4v + b6 * k6v);
        const double w4 = w + dt * (d1 * k1w + d3 * k3w + d4 * k4w + d5 * k5w + d6 * k6w);
        const double v4 = dw + dt * (d1 * k1v + d3 * k3v + d4 * k4v + d5 * k5v + d6 * k6v);

        const double sw = atol + rtol * std::max(std::abs(w), std::abs(w5));
        const double sv = atol + rtol * std::max(std::abs(dw), std::abs(v5));
        const double err = std::max(std::abs(w5 - w4) / sw, std::abs(v5 - v4) / sv);
        if (err <= 1.0 || dt <= 1e-14 * h) {
            t += dt;
            w = w5;
            dw = v5;
            ++out.steps;
        }
        const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        dt *= std::clamp(fac, 0.2, 5.0);
    }
    out.w = w;
    out.dw = dw;
    return out;
}

/// The six propagator coefficients obtained purely from ODE integrations:
/// K0/dK0 from data (1,0), K1/dK1 from data (0,1), M0 from unit forcing,
/// M1 from ramp forcing s/h (both with zero data).
struct OdeReferenceCoeffs {
    double K0, dK0, K1, dK1, M0, dM0, M1, dM1;
};

inline OdeReferenceCoeffs reference_coeffs(double a, double b, double h, double rtol = 1e-13) {
    OdeReferenceCoeffs out{};
    auto zero = [](double) { return 0.0; };
    auto r0 = integrate_mode_ode(a, b, zero, 1.0, 0.0, h, rtol);
    out.K0 = r0.w;
    out.dK0 = r0.dw;
    auto r1 = integrate_mode_ode(a, b, zero, 0.0, 1.0, h, rtol);
    out.K1 = r1.w;
    out.dK1 = r1.dw;
    auto rm0 = integrate_mode_ode(a, b, [](double) { return 1.0; }, 0.0, 0.0, h, rtol);
    out.M0 = rm0.w;
    out.dM0 = rm0.dw;
    auto rm1 = integrate_mode_ode(a, b, [h](double s) { return s / h; }, 0.0, 0.0, h, rtol);
    out.M1 = rm1.w;
    out.dM1 = rm1.dw;
    return out;
}

}  // namespace sevo

#endif

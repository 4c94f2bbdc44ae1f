#ifndef LOOPNEST_FRAME_HPP
#define LOOPNEST_FRAME_HPP

#include <cmath>
#include <complex>
#include <functional>

#include "loopnest/elliptic.hpp"

namespace loopnest {

struct ordering_error : std::runtime_error {
    explicit ordering_error(const std::string& w) : std::runtime_error(w) {}
};

// Rational involution exchanging the two cuts of the resolvent.
inline double varsigma(double x, double h, double alpha) {
    return (1.0 - alpha * h * x) / (alpha * h + (1.0 - alpha * alpha) * h * h * x);
}
inline double varsigma_prime(double x, double h, double alpha) {
    double den = alpha * h + (1.0 - alpha * alpha) * h * h * x;
    double num = -alpha * h * den - (1.0 - alpha * h * x) * (1.0 - alpha * alpha) * h * h;
    return num / (den * den);
}
// Image of infinity (finite for alpha != 1).
inline double varsigma_infinity(double h, double alpha) {
    return -alpha / ((1.0 - alpha * alpha) * h);
}

namespace detail {

// Adaptive Simpson quadrature.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) < 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace detail

// The elliptic data attached to cut endpoints: modulus, half-period ratio,
// nome, normalization C and the image w_inf of x = infinity.
struct EllipticFrame {
    double gamma_minus = 0, gamma_plus = 0;
    double sigma_gp = 0, sigma_gm = 0; // varsigma(gamma_plus), varsigma(gamma_minus)
    double h = 0, alpha = 1;
    double k = 0, T = 0, q = 0, C = 0;
    double w_inf = 0.5;
    cplx tau() const { return cplx(0.0, T); }
    cplx v_inf() const { return cplx(0.5, T * w_inf); }
};

inline EllipticFrame frame_from_endpoints(double gamma_minus, double gamma_plus, double h,
                                          double alpha) {
    EllipticFrame fr;
    fr.gamma_minus = gamma_minus;
    fr.gamma_plus = gamma_plus;
    fr.h = h;
    fr.alpha = alpha;
    fr.sigma_gp = varsigma(gamma_plus, h, alpha);
    fr.sigma_gm = varsigma(gamma_minus, h, alpha);
    if (!(gamma_minus < gamma_plus && gamma_plus < fr.sigma_gp && fr.sigma_gp < fr.sigma_gm))
        throw ordering_error("frame_from_endpoints: endpoint ordering violated");

    double a = gamma_minus, b = gamma_plus, c = fr.sigma_gp, d = fr.sigma_gm;
    fr.k = std::sqrt((d - a) * (c - b) / ((d - b) * (c - a)));
    double K = elliptic_K(fr.k);
    double Kp = elliptic_K(std::sqrt(1.0 - fr.k * fr.k));
    fr.T = K / (2.0 * Kp);
    fr.q = std::exp(-M_PI / fr.T);
    fr.C = std::sqrt((c - a) * (d - b)) / (4.0 * Kp);

    // w_inf: image of x = +infinity on the line Re v = 1/2, from the defining
    // quadrature past the last branch point (y = d + t^2, then t = tan theta).
    auto f = [&](double th) {
        double t = std::tan(th);
        double y = d + t * t;
        double val = 2.0 / std::sqrt((y - a) * (y - b) * (y - c));
        double sec2 = 1.0 + t * t;
        return val * sec2;
    };
    double integral = detail::integrate(f, 0.0, M_PI / 2.0 - 1e-12);
    fr.w_inf = fr.C * integral / fr.T;
    return fr;
}

// Parametrization x(v) by matching poles and zeroes of theta ratios on the
// doubled lattice; x(tau) = gamma_plus, x(0) = varsigma(gamma_plus).
inline Jet4 x_of_v_jet(cplx v, const EllipticFrame& fr) {
    const cplx I(0.0, 1.0);
    cplx tau = fr.tau(), t2 = 2.0 * fr.tau(), vi = fr.v_inf();
    cplx pref = -I * fr.C * theta1(0.0, t2, 1) * theta1(2.0 * vi, t2) /
                (theta1(vi - tau, t2) * theta1(vi + tau, t2));
    Jet4 num = theta1_jet(v - tau, t2) * theta1_jet(v + tau, t2);
    Jet4 den = theta1_jet(v - vi, t2) * theta1_jet(v + vi, t2);
    Jet4 r = pref * (num / den);
    r.d[0] += fr.gamma_plus;
    return r;
}
inline cplx x_of_v(cplx v, const EllipticFrame& fr) { return x_of_v_jet(v, fr).f(); }

// Inverse parametrization: coarse grid seed in the fundamental rectangle,
// Newton polish with the analytic derivative.
inline cplx v_of_x(cplx x, const EllipticFrame& fr) {
    cplx best_v;
    double best = 1e300;
    const int NR = 37, NI = 23;
    for (int i = 1; i < NR; ++i)
        for (int j = -NI; j <= NI; ++j) {
            cplx v(0.5 * i / NR, fr.T * (j + 0.31) / (NI + 1.0));
            double dd = std::abs(x_of_v(v, fr) - x);
            if (dd < best) {
                best = dd;
                best_v = v;
            }
        }
    cplx v = best_v;
    for (int it = 0; it < 60; ++it) {
        Jet4 xv = x_of_v_jet(v, fr);
        cplx err = xv.f() - x;
        if (std::abs(err) < 1e-13 * (1.0 + std::abs(x))) break;
        if (std::abs(xv.f1()) == 0.0) break;
        cplx step = err / xv.f1();
        double cap = 0.2 * std::max(fr.T, 0.5);
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        v -= step;
        // keep v in the closed fundamental rectangle
        if (v.real() < 0.0) v = cplx(-v.real(), v.imag());
        if (v.real() > 0.5) v = cplx(1.0 - v.real(), v.imag());
        if (v.imag() < -fr.T) v = cplx(v.real(), -2.0 * fr.T - v.imag());
        if (v.imag() > fr.T) v = cplx(v.real(), 2.0 * fr.T - v.imag());
    }
    double resid = std::abs(x_of_v(v, fr) - x);
    if (resid > 1e-8 * (1.0 + std::abs(x)))
        throw numeric_error("v_of_x: Newton did not converge (branch ambiguity near a cut)");
    return v;
}

// Consistency integrals of the frame: C int_{sigma(g+)}^{sigma(g-)} = 1/2
// and C int_{g+}^{sigma(g+)} = T. Exposed for certification.
inline double frame_half_integral(const EllipticFrame& fr) {
    double a = fr.gamma_minus, b = fr.gamma_plus, c = fr.sigma_gp, d = fr.sigma_gm;
    // y = c + (d-c) sin^2, the sqrt((y-c)(d-y)) factor cancels analytically
    auto g = [&](double th) {
        double s = std::sin(th);
        double y = c + (d - c) * s * s;
        return 2.0 / std::sqrt((y - a) * (y - b));
    };
    return fr.C * detail::integrate(g, 0.0, M_PI / 2.0);
}
inline double frame_T_integral(const EllipticFrame& fr) {
    double a = fr.gamma_minus, b = fr.gamma_plus, c = fr.sigma_gp, d = fr.sigma_gm;
    auto g = [&](double th) {
        double s = std::sin(th);
        double y = b + (c - b) * s * s;
        return 2.0 / std::sqrt((y - a) * (d - y));
    };
    return fr.C * detail::integrate(g, 0.0, M_PI / 2.0);
}

} // namespace loopnest

#endif

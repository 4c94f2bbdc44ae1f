#ifndef LOOPNEST_UPSILON_HPP
#define LOOPNEST_UPSILON_HPP

#include <cmath>
#include <complex>

#include "loopnest/elliptic.hpp"

namespace loopnest {

// Fundamental quasi-periodic kernel: the unique meromorphic Y_b with
//   Y_b(v+1) = Y_b(v),  Y_b(v+tau) = e^{i pi b} Y_b(v),  Y_b(v) ~ 1/v at 0.
// Direct theta-ratio expression, with the modular-transformed variant used
// for small T where the direct ratio loses precision.
inline Jet4 upsilon_jet(double b, cplx v, cplx tau) {
    if (!(tau.imag() > 0)) throw std::domain_error("upsilon: Im tau must be positive");
    double T = tau.imag();
    const cplx I(0.0, 1.0);

    // pole proximity guard (lattice Z + tau Z)
    {
        cplx w = v;
        double m1 = std::round(w.imag() / T);
        w -= m1 * tau;
        double m0 = std::round(w.real());
        w -= m0;
        if (std::abs(w) < 1e-10) throw numeric_error("upsilon: argument too close to a pole");
    }

    if (T >= 0.05) {
        Jet4 num = theta1_jet(v - b / 2.0, tau);
        Jet4 den = theta1_jet(v, tau);
        cplx c = theta1(0.0, tau, 1) / theta1(-b / 2.0, tau, 0);
        return c * (num / den);
    }
    // modular expression: e^{i pi b v / tau} / (i T) *
    //   theta1'(0|-1/tau)/theta1(-b/(2tau)|-1/tau) *
    //   theta1((v-b/2)/tau|-1/tau)/theta1(v/tau|-1/tau)
    cplx taup = -1.0 / tau;
    cplx it = 1.0 / tau;
    auto shifted = [&](cplx arg) {
        Jet4 inner = detail::theta1_series_jet(arg, taup);
        Jet4 r;
        r.d[0] = inner.d[0];
        r.d[1] = inner.d[1] * it;
        r.d[2] = inner.d[2] * it * it;
        r.d[3] = inner.d[3] * it * it * it;
        return r;
    };
    Jet4 num = shifted((v - b / 2.0) / tau);
    Jet4 den = shifted(v / tau);
    cplx c = detail::theta1_series_jet(0.0, taup).d[1] /
             detail::theta1_series_jet(-b / (2.0 * tau), taup).d[0];
    Jet4 pre;
    pre.d[0] = I * M_PI * b * v / tau;
    pre.d[1] = I * M_PI * b / tau;
    Jet4 ex = pre.exp();
    return (c / (I * T)) * (ex * (num / den));
}

inline cplx upsilon(double b, cplx v, cplx tau, int deriv = 0) {
    if (deriv < 0 || deriv > 3) throw std::domain_error("upsilon: deriv in 0..3");
    return upsilon_jet(b, v, tau).d[deriv];
}

// q -> 0 limit profiles of the kernel and of the parametrization x(v) on
// the two vertical lines Re v in {0, 1/2} (v = eps + tau w).
struct CriticalEndpoints {
    double gamma_plus, gamma_minus, sigma_gamma_minus, w_inf;
};

inline cplx upsilon_limit_profile(double b, double eps, double w) {
    if (!(w > 0.0 && w < 1.0)) throw std::domain_error("upsilon_limit_profile: w in (0,1)");
    const cplx I(0.0, 1.0);
    if (eps == 0.0)
        return std::exp(I * M_PI * (b - 1.0) * w) / (2.0 * I * std::sin(M_PI * w));
    if (eps == 0.5)
        return -std::exp(I * M_PI * b * w);
    throw std::domain_error("upsilon_limit_profile: eps must be 0 or 1/2");
}

inline double x_limit_profile(double eps, double w, const CriticalEndpoints& ce) {
    double base = std::sqrt((ce.sigma_gamma_minus - ce.gamma_plus) *
                            (ce.gamma_plus - ce.gamma_minus));
    double s = std::sin(M_PI * ce.w_inf);
    if (eps == 0.0) {
        double c = std::cos(M_PI * w / 2.0);
        return 8.0 * base * s * c * c;
    }
    if (eps == 0.5) {
        if (!(w > 0.0 && w < 1.0)) throw std::domain_error("x_limit_profile: w in (0,1)");
        return base * s / (std::cos(M_PI * w) - std::cos(M_PI * ce.w_inf));
    }
    throw std::domain_error("x_limit_profile: eps must be 0 or 1/2");
}

} // namespace loopnest

#endif

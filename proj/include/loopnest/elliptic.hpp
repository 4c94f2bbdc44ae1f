#ifndef LOOPNEST_ELLIPTIC_HPP
#define LOOPNEST_ELLIPTIC_HPP

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace loopnest {

using cplx = std::complex<double>;

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& w) : std::runtime_error(w) {}
};

// Value plus derivatives up to third order at one point.
struct Jet4 {
    std::array<cplx, 4> d{};

    static Jet4 constant(cplx c) {
        Jet4 j;
        j.d[0] = c;
        return j;
    }
    // the identity jet (argument itself): value v, derivative 1
    static Jet4 id(cplx v) {
        Jet4 j;
        j.d[0] = v;
        j.d[1] = 1.0;
        return j;
    }

    cplx f() const { return d[0]; }
    cplx f1() const { return d[1]; }
    cplx f2() const { return d[2]; }
    cplx f3() const { return d[3]; }

    friend Jet4 operator+(const Jet4& a, const Jet4& b) {
        Jet4 r;
        for (int i = 0; i < 4; ++i) r.d[i] = a.d[i] + b.d[i];
        return r;
    }
    friend Jet4 operator-(const Jet4& a, const Jet4& b) {
        Jet4 r;
        for (int i = 0; i < 4; ++i) r.d[i] = a.d[i] - b.d[i];
        return r;
    }
    Jet4 operator-() const {
        Jet4 r;
        for (int i = 0; i < 4; ++i) r.d[i] = -d[i];
        return r;
    }
    friend Jet4 operator*(const Jet4& a, const Jet4& b) {
        Jet4 r;
        r.d[0] = a.d[0] * b.d[0];
        r.d[1] = a.d[1] * b.d[0] + a.d[0] * b.d[1];
        r.d[2] = a.d[2] * b.d[0] + 2.0 * a.d[1] * b.d[1] + a.d[0] * b.d[2];
        r.d[3] = a.d[3] * b.d[0] + 3.0 * a.d[2] * b.d[1] + 3.0 * a.d[1] * b.d[2] + a.d[0] * b.d[3];
        return r;
    }
    friend Jet4 operator*(cplx c, const Jet4& a) {
        Jet4 r;
        for (int i = 0; i < 4; ++i) r.d[i] = c * a.d[i];
        return r;
    }
    Jet4 recip() const {
        cplx f = d[0];
        if (std::abs(f) == 0.0) throw numeric_error("Jet4: reciprocal at zero");
        Jet4 r;
        cplx f2i = 1.0 / (f * f);
        r.d[0] = 1.0 / f;
        r.d[1] = -d[1] * f2i;
        r.d[2] = (2.0 * d[1] * d[1] - f * d[2]) * f2i / f;
        r.d[3] = (-6.0 * d[1] * d[1] * d[1] + 6.0 * f * d[1] * d[2] - f * f * d[3]) * f2i * f2i;
        return r;
    }
    friend Jet4 operator/(const Jet4& a, const Jet4& b) { return a * b.recip(); }

    // exp of this jet
    Jet4 exp() const {
        cplx e = std::exp(d[0]);
        Jet4 r;
        r.d[0] = e;
        r.d[1] = e * d[1];
        r.d[2] = e * (d[2] + d[1] * d[1]);
        r.d[3] = e * (d[3] + 3.0 * d[1] * d[2] + d[1] * d[1] * d[1]);
        return r;
    }
};

inline double agm(double a, double b) {
    for (int i = 0; i < 64 && std::fabs(a - b) > 1e-17 * (std::fabs(a) + std::fabs(b)); ++i) {
        double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return 0.5 * (a + b);
}

// Complete elliptic integral of the first kind, modulus convention K(k).
inline double elliptic_K(double k) {
    if (!(k >= 0.0 && k < 1.0)) throw std::domain_error("elliptic_K: k in [0,1) required");
    return M_PI / (2.0 * agm(1.0, std::sqrt(1.0 - k * k)));
}

struct EllipticModulus {
    double K, Kprime, T, q;
};

// K, K' by AGM; T = K/(2K') and the degeneration parameter q = exp(-pi/T).
inline EllipticModulus elliptic_modulus(double k) {
    if (!(k > 0.0 && k < 1.0)) throw std::domain_error("elliptic_modulus: k in (0,1) required");
    EllipticModulus m;
    m.K = elliptic_K(k);
    m.Kprime = M_PI / (2.0 * agm(1.0, k));
    m.T = m.K / (2.0 * m.Kprime);
    m.q = std::exp(-M_PI / m.T);
    return m;
}

namespace detail {

// Odd Jacobi theta function by its defining series, as a jet in v. The
// summation range is set by the certified Gaussian tail bound.
inline Jet4 theta1_series_jet(cplx v, cplx tau) {
    double t2 = tau.imag();
    if (!(t2 > 0)) throw std::domain_error("theta1: Im tau must be positive");
    double lq = M_PI * t2; // -log|q~|, q~ = e^{i pi tau}
    int M = 1;
    while ((M + 0.5) * (M + 0.5) * lq < 46.0 && M < 64) ++M;
    Jet4 s;
    const cplx I(0.0, 1.0);
    for (int m = -M - 1; m <= M; ++m) {
        double half = m + 0.5;
        cplx w = I * M_PI * (tau * half * half + (2.0 * m + 1.0) * v);
        cplx term = std::exp(w);
        double sign = (((m % 2) + 2) % 2 == 1) ? -1.0 : 1.0; // (-1)^m
        cplx c = -I * sign * term;
        cplx dv = I * M_PI * (2.0 * m + 1.0);
        s.d[0] += c;
        s.d[1] += c * dv;
        s.d[2] += c * dv * dv;
        s.d[3] += c * dv * dv * dv;
    }
    return s;
}

} // namespace detail

// theta_1(v | tau) with derivatives in v. Small Im(tau) is routed through
// the modular transformation so precision is kept as q -> 1 on the direct
// side: theta1(v|tau) = i e^{-i pi v^2/tau} / sqrt(-i tau) theta1(v/tau|-1/tau).
inline Jet4 theta1_jet(cplx v, cplx tau) {
    if (!(tau.imag() > 0)) throw std::domain_error("theta1: Im tau must be positive");
    if (tau.imag() >= 0.1) return detail::theta1_series_jet(v, tau);
    const cplx I(0.0, 1.0);
    cplx taup = -1.0 / tau;
    Jet4 inner = detail::theta1_series_jet(v / tau, taup);
    // compose with the linear argument map w = v / tau
    Jet4 th;
    cplx it = 1.0 / tau;
    th.d[0] = inner.d[0];
    th.d[1] = inner.d[1] * it;
    th.d[2] = inner.d[2] * it * it;
    th.d[3] = inner.d[3] * it * it * it;
    Jet4 quad; // -i pi v^2 / tau as a jet in v
    quad.d[0] = -I * M_PI * v * v / tau;
    quad.d[1] = -I * M_PI * 2.0 * v / tau;
    quad.d[2] = -I * M_PI * 2.0 / tau;
    Jet4 pre = quad.exp();
    cplx scale = I / std::sqrt(-I * tau);
    return scale * (pre * th);
}

inline cplx theta1(cplx v, cplx tau, int deriv = 0) {
    if (deriv < 0 || deriv > 3) throw std::domain_error("theta1: deriv in 0..3");
    return theta1_jet(v, tau).d[deriv];
}

} // namespace loopnest

#endif

#ifndef LOOPNEST_CRITICAL_HPP
#define LOOPNEST_CRITICAL_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "loopnest/rational.hpp"

namespace loopnest {

enum class Phase { Subcritical, Generic, Dilute, Dense };

inline const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Subcritical: return "subcritical";
        case Phase::Generic: return "generic";
        case Phase::Dilute: return "dilute";
        case Phase::Dense: return "dense";
    }
    return "?";
}

// Exact exponent algebra in terms of rational b = arccos(n/2)/pi.
// The dilute kappa follows the continuum correspondence kappa = 4/(1+b)
// (the summary table's "(1-b)/4" entry is a typo against it).
struct ExponentSet {
    Rational b, gamma_str, c, a, nu, d_gasket, kappa, central_charge;
};

inline ExponentSet exponents_from_b(const Rational& b, Phase phase) {
    ExponentSet e;
    e.b = b;
    Rational one(1), two(2), half(1, 2);
    switch (phase) {
        case Phase::Dense:
            e.c = one / (one - b);
            e.gamma_str = -b * e.c;
            e.a = two - b;
            e.nu = (one - two * b) / (two * (one - b));
            e.d_gasket = Rational(3) - two * b;
            e.kappa = Rational(4) / (one - b);
            e.central_charge = one - Rational(6) * b * b / (one - b);
            break;
        case Phase::Dilute:
            e.c = one;
            e.gamma_str = -b;
            e.a = two + b;
            e.nu = half - b;
            e.d_gasket = Rational(3) + two * b;
            e.kappa = Rational(4) / (one + b);
            e.central_charge = one - Rational(6) * b * b / (one + b);
            break;
        case Phase::Generic:
            e.c = Rational(3, 2); // placeholder scale: gamma_str = -1/2 = -b c at b = 1/3? no:
            // generic critical points are loop-free; report the pure-gravity row.
            e.gamma_str = Rational(-1, 2);
            e.c = Rational(0);
            e.a = Rational(5, 2);
            e.nu = Rational(0);
            e.d_gasket = Rational(4);
            e.kappa = Rational(0);
            e.central_charge = Rational(0);
            break;
        case Phase::Subcritical:
            e.gamma_str = Rational(0);
            e.c = Rational(0);
            e.a = Rational(3, 2);
            e.nu = Rational(0);
            e.d_gasket = Rational(2);
            e.kappa = Rational(0);
            e.central_charge = Rational(0);
            break;
    }
    return e;
}

struct ExponentSetD {
    double b, gamma_str, c, a, nu, d_gasket, kappa;
};

inline ExponentSetD exponents(double n, Phase phase) {
    if (!(n >= 0.0 && n <= 2.0)) throw std::domain_error("exponents: n in [0,2]");
    double b = std::acos(n / 2.0) / M_PI;
    ExponentSetD e{};
    e.b = b;
    if (phase == Phase::Dense) {
        e.c = 1.0 / (1.0 - b);
        e.gamma_str = -b * e.c;
        e.a = 2.0 - b;
        e.nu = (1.0 - 2.0 * b) / (2.0 * (1.0 - b));
        e.d_gasket = 3.0 - 2.0 * b;
        e.kappa = 4.0 / (1.0 - b);
    } else if (phase == Phase::Dilute) {
        e.c = 1.0;
        e.gamma_str = -b;
        e.a = 2.0 + b;
        e.nu = 0.5 - b;
        e.d_gasket = 3.0 + 2.0 * b;
        e.kappa = 4.0 / (1.0 + b);
    } else {
        throw std::domain_error("exponents: numeric path covers dense/dilute");
    }
    return e;
}

// ---------------------------------------------------------------------------
// Non-generic critical line.
// ---------------------------------------------------------------------------

struct CriticalPoint {
    double n = 0, alpha = 1;
    double rho = 0, w_inf_star = 0.5;
    double g = 0, h = 0;
    Phase phase = Phase::Dense;
    double b = 0, c = 0;
    double Delta = 0, Delta1 = 0;
    double gamma_plus_star = 0, gamma_minus_star = 0;
};

inline double rho_min_of(double n) {
    double b = std::acos(n / 2.0) / M_PI;
    return (std::sqrt(6.0 + n) - std::sqrt(2.0 - n)) / ((1.0 - b) * std::sqrt(2.0 + n));
}
inline double rho_max_of(double n) {
    double b = std::acos(n / 2.0) / M_PI;
    return std::sqrt((2.0 - n) / (2.0 + n)) / b;
}

namespace detail {

// Derivatives of the corner kernels at w:
//   Y0(w) = cos(b w),  Y1(w) = sin((1-b) w) / sin(w),
// the second via the recursion obtained from sin((1-b)w) = Y sin(w).
inline void corner_kernel_derivs(double b, double w, double Y0[4], double Y1[4]) {
    Y0[0] = std::cos(b * w);
    Y0[1] = -b * std::sin(b * w);
    Y0[2] = -b * b * Y0[0];
    Y0[3] = -b * b * Y0[1];
    double c1 = 1.0 - b;
    double s = std::sin(w), c = std::cos(w);
    double S = std::sin(c1 * w), C = std::cos(c1 * w);
    double Y = S / s;
    double Yp = (c1 * C - Y * c) / s;
    double Ypp = ((1.0 - c1 * c1) * Y * s - 2.0 * Yp * c) / s;
    double Yppp = ((3.0 - c1 * c1) * Yp * s + (1.0 - c1 * c1) * Y * c - 3.0 * Ypp * c) / s;
    Y1[0] = Y;
    Y1[1] = Yp;
    Y1[2] = Ypp;
    Y1[3] = Yppp;
}

// The two corner conditions at the non-generic critical point (u = 1,
// q = 0) are linear in t = g/h and H = 1/h^2; solve the 2x2 system.
// zeta = (pi C / T) h = 2 cot(pi w) / (1 - alpha^2), e1 = h E1, e2 = h^2 E2.
struct LineCoeffs {
    double t, H;
};
inline LineCoeffs critical_line_solve(double n, double alpha, double w /* = pi w_inf^* */) {
    double b = std::acos(n / 2.0) / M_PI;
    double n2 = 4.0 - n * n;
    double sw = std::sin(w), cw = std::cos(w);
    double zeta = 2.0 * cw / (sw * (1.0 - alpha * alpha));
    // h-scaled endpoint data at the merged point, from the w_inf^* relation:
    // m = h gamma_-^*, the doubled fixed point, and h varsigma(gamma_-^*).
    double r = cw * (1.0 + alpha) / (1.0 - alpha);
    double m = (1.0 - r) / ((1.0 + alpha) + r * (1.0 - alpha));
    double x2 = 1.0 / (1.0 + alpha);
    double x4 = (1.0 - alpha * m) / (alpha + (1.0 - alpha * alpha) * m);
    double e1 = m + 2.0 * x2 + x4;
    double e2 = m * (2.0 * x2 + x4) + x2 * x2 + 2.0 * x2 * x4;
    double g0 = -2.0 / (2.0 + n);

    double A[2], B[2], C[2];
    for (int eq = 0; eq < 2; ++eq) {
        double Y0[4], Y1[4];
        corner_kernel_derivs(b, w, Y0, Y1);
        double* Y = eq == 0 ? Y0 : Y1;
        // ghat contributions: ghat0 + H (linear in t)
        // Z^k ghat_k/k! Y^(k):
        //   k=1: zeta [t (3 e1^2 - 4 e2) - 6 e1] / (12 n2) * H * Y'
        //   k=2: zeta^2 (2 - t e1) / (2 n2) * H * Y''
        //   k=3: zeta^3 2 t / (6 n2) * H * Y'''
        A[eq] = g0 * Y[0] + 0.0;
        double constH = zeta * (-6.0 * e1) / (12.0 * n2) * Y[1] +
                        zeta * zeta * (2.0) / (2.0 * n2) * Y[2];
        double tH = zeta * (3.0 * e1 * e1 - 4.0 * e2) / (12.0 * n2) * Y[1] +
                    zeta * zeta * (-e1) / (2.0 * n2) * Y[2] +
                    zeta * zeta * zeta * (2.0 / 6.0) / n2 * Y[3];
        B[eq] = tH;     // coefficient of t*H
        C[eq] = constH; // coefficient of H
    }
    // A + (B t + C) H = 0 for both equations; eliminating H gives a linear
    // equation for t, then H follows.
    double t = (A[1] * C[0] - A[0] * C[1]) / (A[0] * B[1] - A[1] * B[0]);
    double H = -A[0] / (B[0] * t + C[0]);
    return {t, H};
}

} // namespace detail

// alpha = 1 closed form of the non-generic critical line, parametrized by
// rho in [rho_min, rho_max]. The middle term of the h^2 numerator carries
// the (1-b^2) factor required by the fully packed endpoint.
inline CriticalPoint critical_line_alpha1(double n, double rho) {
    if (!(n > 0.0 && n < 2.0)) throw std::domain_error("critical_line: n in (0,2)");
    double b = std::acos(n / 2.0) / M_PI;
    double rmin = rho_min_of(n), rmax = rho_max_of(n);
    if (rho < rmin - 1e-12 || rho > rmax + 1e-12)
        throw std::domain_error("critical_line: rho outside [rho_min, rho_max]");
    double sp = std::sqrt(2.0 + n), sm = std::sqrt(2.0 - n);
    double den = -rho * rho * (1.0 - b * b) * sm + 4.0 * rho * b * sp - 2.0 * sm;
    double gh = 4.0 * (rho * b * sp - sm) / den;
    double h2 = (rho * rho * b / (24.0 * std::sqrt(4.0 - n * n))) *
                (rho * rho * b * (1.0 - b * b) * sp - 4.0 * (1.0 - b * b) * rho * sm +
                 6.0 * b * sp) /
                den;
    if (!(h2 > 0.0) || gh < -1e-12)
        throw std::domain_error("critical_line: negative weights at this rho");
    CriticalPoint cp;
    cp.n = n;
    cp.alpha = 1.0;
    cp.rho = rho;
    cp.w_inf_star = 0.5;
    cp.h = std::sqrt(h2);
    cp.g = gh * cp.h;
    cp.b = b;
    cp.phase = (rho > rmin + 1e-10) ? Phase::Dense : Phase::Dilute;
    cp.c = cp.phase == Phase::Dense ? 1.0 / (1.0 - b) : 1.0;
    cp.gamma_plus_star = 1.0 / (2.0 * cp.h);
    cp.gamma_minus_star = (1.0 - rho) / (2.0 * cp.h);
    return cp;
}

// General-alpha line parametrized by w_inf^*; solved from the two corner
// conditions of the disk transform in the q -> 0 limit.
inline CriticalPoint critical_line_general(double n, double alpha, double w_inf_star) {
    if (!(n > 0.0 && n < 2.0)) throw std::domain_error("critical_line: n in (0,2)");
    if (alpha == 1.0) throw std::domain_error("critical_line_general: use the alpha=1 branch");
    if (!(w_inf_star > 0.0 && w_inf_star < 1.0))
        throw std::domain_error("critical_line: w_inf_star in (0,1)");
    auto lc = detail::critical_line_solve(n, alpha, M_PI * w_inf_star);
    if (!(lc.H > 0.0) || lc.t < -1e-10)
        throw std::domain_error("critical_line: parameter outside the admissible window");
    CriticalPoint cp;
    cp.n = n;
    cp.alpha = alpha;
    cp.w_inf_star = w_inf_star;
    cp.h = 1.0 / std::sqrt(lc.H);
    cp.g = lc.t * cp.h;
    cp.b = std::acos(n / 2.0) / M_PI;
    cp.gamma_plus_star = 1.0 / (cp.h * (alpha + 1.0));
    // cos(pi w*) = (1-alpha)/(1+alpha) (1 - h(1+alpha) gm*)/(1 + h(1-alpha) gm*)
    // inverted for gamma_-^*:
    {
        double r = std::cos(M_PI * w_inf_star) * (1.0 + alpha) / (1.0 - alpha);
        cp.gamma_minus_star =
            (1.0 - r) / (cp.h * ((1.0 + alpha) + r * (1.0 - alpha)));
    }
    cp.phase = Phase::Dense;
    cp.c = 1.0 / (1.0 - cp.b);
    return cp;
}

// Near-critical constants for alpha = 1: 1 - u = Delta q^{1-b} + Delta_1 q +
// o(q) in the dense phase; at rho_min the dense constant vanishes and the
// dilute scale 24/(b(1-b)(2-b)) takes over.
struct DeltaConstants {
    double Delta, Delta1;
    Phase phase;
};

inline DeltaConstants delta_constants(double n, double rho) {
    double b = std::acos(n / 2.0) / M_PI;
    double rmin = rho_min_of(n), rmax = rho_max_of(n);
    if (rho < rmin - 1e-12 || rho > rmax + 1e-12)
        throw std::domain_error("delta_constants: rho outside window");
    double sp = std::sqrt(2.0 + n), sm = std::sqrt(2.0 - n);
    double num = rho * rho * (1.0 - b) * (1.0 - b) * sp + 2.0 * rho * (1.0 - b) * sm - 2.0 * sp;
    double den = -rho * rho * b * (1.0 - b * b) * sp + 4.0 * rho * (1.0 - b * b) * sm -
                 6.0 * b * sp;
    DeltaConstants d;
    d.Delta = 12.0 / b * num / den;
    double num1 = -rho * rho * (b * b + 1.0) * sp + 2.0 * rho * b * sm + 2.0 * sp;
    d.Delta1 = 24.0 / b * num1 / den;
    d.phase = (rho > rmin + 1e-10) ? Phase::Dense : Phase::Dilute;
    if (d.phase == Phase::Dilute) d.Delta1 = 24.0 / (b * (1.0 - b) * (2.0 - b));
    return d;
}

inline double dilute_delta(double n) {
    double b = std::acos(n / 2.0) / M_PI;
    return 24.0 / (b * (1.0 - b) * (2.0 - b));
}

// Volume prefactors; sign pattern fixed by positivity on the rho-window.
struct VolumePrefactors {
    double A, A_gasket;
};
inline VolumePrefactors volume_prefactors_alpha1(double n, double rho, double h) {
    double b = std::acos(n / 2.0) / M_PI;
    double sp = std::sqrt(2.0 + n), sm = std::sqrt(2.0 - n);
    VolumePrefactors v;
    v.A = rho * (rho * rho * (1.0 - b * b) * sm - 6.0 * rho * b * sp + 6.0 * sm) /
          (2.0 * h * h * h);
    v.A_gasket = rho * (rho / 4.0 - 1.0) / (h * h);
    return v;
}
inline double gasket_prefactor_general(double alpha, double w_inf_star, double h) {
    double cw = std::cos(M_PI * w_inf_star);
    return 4.0 * ((1.0 - 2.0 * alpha) * cw + 2.0 - 2.0 * alpha) /
           ((1.0 - alpha * alpha) * (1.0 - alpha * alpha) * h * h * (cw + 1.0));
}

// ---------------------------------------------------------------------------
// Parametric scaling functions of the refined resolvents at criticality.
// ---------------------------------------------------------------------------

enum class ProfileKind { Phi, Psi, PsiTilde, Xi3, Xi4, Xi5 };

struct ProfilePoint {
    double argument; // xi(w) or X(w) - gamma_+^* (or the pair product for Xi)
    double value;
};

namespace detail {

inline double ns_of_beta(double beta) { return 2.0 * std::cos(M_PI * beta); }

} // namespace detail

// One-variable profiles; beta = b(s) in (0,1), w in (0,1). kind Xi* uses
// w as the first variable and w2 as the second.
inline ProfilePoint scaling_profile(ProfileKind kind, double w, double beta,
                                    const CriticalPoint& cp, double w2 = 0.5) {
    if (!(w > 0.0 && w < 1.0)) throw std::domain_error("scaling_profile: w in (0,1)");
    if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("scaling_profile: beta in (0,1)");
    double ns = detail::ns_of_beta(beta);
    double n = cp.n, h = cp.h, alpha = cp.alpha;
    double ws = cp.w_inf_star;
    double cw = std::cos(M_PI * w), sw = std::sin(M_PI * w);
    double cws = std::cos(M_PI * ws);
    ProfilePoint p{};
    bool a1 = (alpha == 1.0);
    double rho = cp.rho;
    (void)n;
    switch (kind) {
        case ProfileKind::Phi: {
            if (a1) {
                double c2 = std::cos(M_PI * w / 2.0);
                p.argument = 4.0 * rho / h * c2 * c2;
                p.value = 4.0 * h / (rho * std::sqrt(2.0 + ns)) * std::sin(M_PI * beta * w) / sw;
            } else {
                double c2 = std::cos(M_PI * w / 2.0);
                p.argument = 16.0 * cws / ((1.0 - alpha * alpha) * h) * c2 * c2;
                p.value = 2.0 * h * (1.0 - alpha * alpha) / (2.0 + ns) *
                          std::cos(M_PI * beta * ws) / cws * std::sin(M_PI * beta * w) / sw;
            }
            break;
        }
        case ProfileKind::Psi:
        case ProfileKind::PsiTilde: {
            if (a1) {
                p.argument = rho / (2.0 * h * cw); // X(w) - gamma_+^*
                if (kind == ProfileKind::Psi) {
                    double K = 16.0 * h / ((2.0 + ns) * rho) * std::sin(M_PI * (1.0 - beta) / 2.0);
                    p.value = K * (cw / sw) * std::sin(M_PI * (1.0 - beta) * w);
                } else {
                    p.value = 16.0 * h / (rho * std::sqrt(2.0 + ns)) * cw * cw *
                              std::sin(M_PI * beta * w) / sw;
                }
            } else {
                p.argument = 2.0 * cws / (h * (1.0 - alpha * alpha) * (cw - cws));
                double pref = -2.0 / (2.0 + ns) * h * (1.0 - alpha * alpha) / cws *
                              (cw - cws) * (cw - cws) / sw;
                if (kind == ProfileKind::Psi) {
                    double br = std::cos(M_PI * (1.0 - beta) * (w + ws)) /
                                    std::sin(M_PI * (w + ws)) +
                                std::cos(M_PI * (1.0 - beta) * (w - ws)) /
                                    std::sin(M_PI * (w - ws));
                    p.value = pref * br;
                } else {
                    p.value = 8.0 / (2.0 + ns) * h * (1.0 - alpha * alpha) *
                              std::cos(M_PI * beta * ws) / cws * (cw - cws) * (cw - cws) *
                              std::sin(M_PI * beta * w) / sw;
                }
            }
            break;
        }
        case ProfileKind::Xi3:
        case ProfileKind::Xi4:
        case ProfileKind::Xi5: {
            double cw2 = std::cos(M_PI * w2), sw2 = std::sin(M_PI * w2);
            double sb1 = std::sin(M_PI * beta * w), sb2 = std::sin(M_PI * beta * w2);
            double n2s = 4.0 - ns * ns;
            if (a1) {
                if (kind == ProfileKind::Xi3)
                    p.value = -32.0 * h * h / (rho * rho * n2s) * (cw * cw * sb1 / sw) *
                              (cw2 * cw2 * sb2 / sw2);
                else if (kind == ProfileKind::Xi4)
                    p.value = 8.0 * h * h / (rho * rho * n2s) * cw * cw * (sb1 / sw) * (sb2 / sw2);
                else
                    p.value = 4.0 * h * h / (rho * rho * n2s) * (sb1 / sw) * (sb2 / sw2);
            } else {
                double a2 = (1.0 - alpha * alpha) * (1.0 - alpha * alpha);
                if (kind == ProfileKind::Xi3)
                    p.value = 2.0 * h * h * a2 / n2s *
                              ((cw - cws) * (cw - cws) * sb1 / (cws * sw)) *
                              ((cw2 - cws) * (cw2 - cws) * sb2 / (cws * sw2));
                else if (kind == ProfileKind::Xi4)
                    p.value = a2 * h * h * (cw - cws) * (cw - cws) /
                              (2.0 * n2s * cws * cws) * (sb1 / sw) * (sb2 / sw2);
                else
                    p.value = a2 * h * h / (4.0 * n2s * cws * cws) * (sb1 / sw) * (sb2 / sw2);
            }
            p.argument = w; // parametric pair reported through (w, w2)
            break;
        }
    }
    return p;
}

// Saddle parameters of the depth large deviations: s(p) and the
// corresponding b-value.
struct SaddlePoint {
    double s_frak, b_frak;
};
inline SaddlePoint saddle_maps(double p, double n) {
    if (!(p > 0.0)) throw std::domain_error("saddle_maps: p > 0");
    SaddlePoint sp;
    sp.s_frak = (2.0 / n) * p / std::sqrt(1.0 + p * p);
    sp.b_frak = std::atan2(1.0, p) / M_PI; // arccot(p) in (0, pi/2)
    return sp;
}

} // namespace loopnest

#endif

#ifndef LOOPNEST_ANALYTIC_HPP
#define LOOPNEST_ANALYTIC_HPP

#include <cmath>
#include <complex>
#include <string>

#include "loopnest/frame.hpp"
#include "loopnest/upsilon.hpp"

namespace loopnest {

// Numeric model parameters for the analytic layer.
struct BendingModel {
    double n = 1, g = 0, h = 0, alpha = 1, u = 1;
    double b() const { return std::acos(n / 2.0) / M_PI; }
    double b_of_s(double s) const {
        double x = n * s / 2.0;
        if (x < -1.0 || x > 1.0) throw std::domain_error("b(s): ns/2 outside [-1,1]");
        return std::acos(x) / M_PI;
    }
};

// Pole data of the disk transform at v_inf: endpoint symmetric polynomials
// and the reduced coefficients ghat_k (tilde g_k = (iC)^k ghat_k).
struct GhatData {
    double E1 = 0, E2 = 0, E3 = 0;
    double ghat0 = 0, ghat1 = 0, ghat2 = 0, ghat3 = 0;
    double C = 0;
};

inline GhatData ghat(const BendingModel& mp, const EllipticFrame& fr) {
    if (std::fabs(mp.n) >= 2.0 - 1e-14)
        throw std::domain_error("ghat: n = +-2 is singular");
    GhatData gd;
    double a = fr.gamma_minus, b = fr.gamma_plus, c = fr.sigma_gp, d = fr.sigma_gm;
    gd.E1 = a + b + c + d;
    gd.E2 = a * (b + c + d) + b * (c + d) + c * d;
    gd.E3 = a * b * c + a * b * d + a * c * d + b * c * d;
    double n2 = 4.0 - mp.n * mp.n;
    gd.ghat3 = 2.0 * mp.g / n2;
    gd.ghat2 = (2.0 - mp.g * gd.E1) / n2;
    gd.ghat1 = (mp.g * (3.0 * gd.E1 * gd.E1 - 4.0 * gd.E2) - 6.0 * gd.E1) / (12.0 * n2);
    gd.ghat0 = -2.0 * mp.u / (2.0 + mp.n);
    gd.C = fr.C;
    return gd;
}

// Disk transform: the unique odd solution of the loop functional equation
// with the pole data of ghat at +-v_inf. The k-th pole coefficient enters as
// tilde g_k; derivatives of the kernel are taken analytically.
inline cplx disk_g(cplx v, const BendingModel& mp, const EllipticFrame& fr, const GhatData& gd) {
    const cplx I(0.0, 1.0);
    cplx tau = fr.tau(), vi = fr.v_inf();
    double b = mp.b();
    Jet4 up = upsilon_jet(b, v + vi, tau);
    Jet4 um = upsilon_jet(b, v - vi, tau);
    Jet4 wp = upsilon_jet(b, -v + vi, tau);
    Jet4 wm = upsilon_jet(b, -v - vi, tau);
    cplx tg[4] = {gd.ghat0, I * fr.C * gd.ghat1, (I * fr.C) * (I * fr.C) * gd.ghat2,
                  (I * fr.C) * (I * fr.C) * (I * fr.C) * gd.ghat3};
    double fact[4] = {1, 1, 2, 6};
    cplx s = 0.0;
    for (int k = 0; k <= 3; ++k) {
        double sgn = (k % 2 == 0) ? 1.0 : -1.0;
        s += tg[k] / (2.0 * fact[k]) *
             (up.d[k] + sgn * um.d[k] - wp.d[k] - sgn * wm.d[k]);
    }
    return s;
}

// Pointed transform, refined by s. Prefactor u/(2+ns), fixed by the residue
// -2u/(2+ns) at v_inf and cross-checked against the exact series expansion.
inline cplx pointed_g(cplx v, double s, const BendingModel& mp, const EllipticFrame& fr) {
    cplx tau = fr.tau(), vi = fr.v_inf();
    double bs = mp.b_of_s(s);
    cplx sum = -upsilon(bs, v + vi, tau) - upsilon(bs, v - vi, tau) +
               upsilon(bs, -v + vi, tau) + upsilon(bs, -v - vi, tau);
    return mp.u / (2.0 + mp.n * s) * sum;
}

// Cylinder transform, refined by s.
inline cplx cylinder_g(cplx v1, cplx v2, double s, const BendingModel& mp,
                       const EllipticFrame& fr) {
    cplx tau = fr.tau();
    double bs = mp.b_of_s(s);
    cplx sum = upsilon(bs, v1 + v2, tau, 1) - upsilon(bs, v1 - v2, tau, 1) -
               upsilon(bs, -v1 + v2, tau, 1) + upsilon(bs, -v1 - v2, tau, 1);
    return sum / (4.0 - mp.n * mp.n * s * s);
}

namespace detail {

inline cplx varsigma_c(cplx x, double h, double alpha) {
    return (1.0 - alpha * h * x) / (alpha * h + (1.0 - alpha * alpha) * h * h * x);
}
inline cplx varsigma_prime_c(cplx x, double h, double alpha) {
    cplx den = alpha * h + (1.0 - alpha * alpha) * h * h * x;
    return (-alpha * h * den - (1.0 - alpha * h * x) * (1.0 - alpha * alpha) * h * h) /
           (den * den);
}
inline cplx Vprime(cplx x, const BendingModel& mp) { return x - mp.g * x * x; }

} // namespace detail

// Resolvent of disks from the disk transform, evaluated off the cuts through
// the parametrization.
inline cplx disk_resolvent_at_v(cplx v, const BendingModel& mp, const EllipticFrame& fr,
                                const GhatData& gd) {
    Jet4 xj = x_of_v_jet(v, fr);
    cplx x = xj.f(), xp = xj.f1();
    double n2 = 4.0 - mp.n * mp.n;
    cplx sx = detail::varsigma_c(x, mp.h, mp.alpha);
    cplx spx = detail::varsigma_prime_c(x, mp.h, mp.alpha);
    cplx dV = (2.0 * detail::Vprime(x, mp) * xp + mp.n * detail::Vprime(sx, mp) * spx * xp) / n2;
    cplx shift = 0.0;
    if (mp.alpha != 1.0) {
        double sinf = varsigma_infinity(mp.h, mp.alpha);
        // d/dv of n u ln(varsigma'(x(v))) / (2(2+n)) = -(n u/(2+n)) x'/(x - sinf)
        shift = -(mp.n * mp.u / (2.0 + mp.n)) * xp / (x - sinf);
    }
    return (disk_g(v, mp, fr, gd) + dV - shift) / xp;
}
inline cplx disk_resolvent(cplx x, const BendingModel& mp, const EllipticFrame& fr,
                           const GhatData& gd) {
    return disk_resolvent_at_v(v_of_x(x, fr), mp, fr, gd);
}

// Refined pointed resolvent F'_s(x).
inline cplx pointed_resolvent_at_v(cplx v, double s, const BendingModel& mp,
                                   const EllipticFrame& fr) {
    Jet4 xj = x_of_v_jet(v, fr);
    cplx val = pointed_g(v, s, mp, fr) / xj.f1();
    if (mp.alpha != 1.0) {
        double sinf = varsigma_infinity(mp.h, mp.alpha);
        val += (mp.n * s * mp.u / (2.0 + mp.n * s)) / (xj.f() - sinf);
    }
    return val;
}
inline cplx pointed_resolvent(cplx x, double s, const BendingModel& mp,
                              const EllipticFrame& fr) {
    return pointed_resolvent_at_v(v_of_x(x, fr), s, mp, fr);
}

// --------------------------------------------------------------------------
// Endpoint determination.
// --------------------------------------------------------------------------

// Usual triangulated maps (weight g per face, u per vertex): endpoints from
// the one-cut conditions s = g (s^2 + 2r), r (1 - 2 g s) = u.
struct UsualEndpoints {
    double gamma_minus, gamma_plus, s, r;
};
inline UsualEndpoints usual_endpoints(double g, double u) {
    double s = 0.0, r = u;
    for (int it = 0; it < 200; ++it) {
        double f1 = s - g * (s * s + 2.0 * r);
        double f2 = r * (1.0 - 2.0 * g * s) - u;
        double j11 = 1.0 - 2.0 * g * s, j12 = -2.0 * g;
        double j21 = -2.0 * g * r, j22 = 1.0 - 2.0 * g * s;
        double det = j11 * j22 - j12 * j21;
        if (std::fabs(det) < 1e-300) break;
        double ds = (f1 * j22 - f2 * j12) / det;
        double dr = (j11 * f2 - j21 * f1) / det;
        s -= ds;
        r -= dr;
        if (std::fabs(ds) + std::fabs(dr) < 1e-15 * (1.0 + std::fabs(s) + std::fabs(r))) break;
    }
    if (!(r > 0)) throw numeric_error("usual_endpoints: no one-cut solution");
    return {s - 2.0 * std::sqrt(r), s + 2.0 * std::sqrt(r), s, r};
}

struct EndpointSolution {
    EllipticFrame frame;
    GhatData gd;
    double residual = 0;
    int iterations = 0;
};

// Near-critical initializer: pick gamma_+ below the involution fixed point
// so the frame nome hits a target value (bisection on the gap; the nome is
// monotone in it).
inline double gamma_plus_for_nome(double gm, double h, double alpha, double q_target) {
    double fix = 1.0 / (h * (alpha + 1.0));
    double lo = 1e-13, hi = 0.4; // relative gap
    auto nome = [&](double off) {
        return frame_from_endpoints(gm, fix * (1.0 - off), h, alpha).q;
    };
    while (nome(hi) < q_target && hi < 0.9) hi *= 1.4;
    for (int it = 0; it < 200; ++it) {
        double mid = std::sqrt(lo * hi);
        if (nome(mid) < q_target)
            lo = mid;
        else
            hi = mid;
        if (hi / lo < 1.0 + 1e-12) break;
    }
    return fix * (1.0 - std::sqrt(lo * hi));
}

// Damped 2-D Newton on (gamma_-, gamma_+) driving the two corner values of
// the disk transform to zero (finiteness of the resolvent at the cut ends).
inline EndpointSolution solve_endpoints(const BendingModel& mp, double gm0, double gp0,
                                        double tol = 1e-10, int max_iter = 80) {
    // At the corners the transform is purely imaginary (quasi-periodicity
    // collapses it to 2 i sin(pi b) times a real bracket), so the residual
    // lives in the imaginary part.
    auto residual = [&](double gm, double gp, double out[2]) {
        EllipticFrame fr = frame_from_endpoints(gm, gp, mp.h, mp.alpha);
        GhatData gd = ghat(mp, fr);
        cplx r1 = disk_g(fr.tau(), mp, fr, gd);
        cplx r2 = disk_g(cplx(0.5, fr.T), mp, fr, gd);
        out[0] = r1.imag();
        out[1] = r2.imag();
        return std::max(std::fabs(r1.real()), std::fabs(r2.real()));
    };

    // Work in (gamma_-, log(fix - gamma_+)): the involution fixed point is
    // the hard wall the cut end approaches at criticality, and the nome
    // responds multiplicatively to the gap. The log chart keeps every
    // Newton step on the admissible side.
    double fix = 1.0 / (mp.h * (mp.alpha + 1.0));
    if (!(gp0 < fix))
        throw ordering_error("solve_endpoints: gamma_+ must lie below the involution fixed point");
    double gm = gm0, le = std::log(fix - gp0);
    auto gp_of = [&](double l) { return fix - std::exp(l); };

    double R[2];
    residual(gm, gp_of(le), R);
    double rn = std::hypot(R[0], R[1]);
    int it = 0;
    for (; it < max_iter && rn > tol; ++it) {
        double scale_m = 1e-6 * std::max(0.1, std::fabs(gm));
        double scale_l = 1e-5;
        double Rm1[2], Rm2[2], Rp1[2], Rp2[2];
        residual(gm + scale_m, gp_of(le), Rm1);
        residual(gm - scale_m, gp_of(le), Rm2);
        residual(gm, gp_of(le + scale_l), Rp1);
        residual(gm, gp_of(le - scale_l), Rp2);
        double J[2][2] = {
            {(Rm1[0] - Rm2[0]) / (2 * scale_m), (Rp1[0] - Rp2[0]) / (2 * scale_l)},
            {(Rm1[1] - Rm2[1]) / (2 * scale_m), (Rp1[1] - Rp2[1]) / (2 * scale_l)}};
        double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (std::fabs(det) < 1e-300)
            throw numeric_error("solve_endpoints: singular Jacobian");
        double dm = (R[0] * J[1][1] - R[1] * J[0][1]) / det;
        double dl = (J[0][0] * R[1] - J[1][0] * R[0]) / det;
        if (std::fabs(dl) > 1.5) dl *= 1.5 / std::fabs(dl); // nome moves stay tame
        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half < 50; ++half, lambda *= 0.5) {
            double nm = gm - lambda * dm, nl = le - lambda * dl;
            double np = gp_of(nl);
            double sp = varsigma(np, mp.h, mp.alpha);
            double smv = varsigma(nm, mp.h, mp.alpha);
            if (!(nm < np && np < sp && sp < smv)) continue; // ordering guard
            double Rn[2];
            try {
                residual(nm, np, Rn);
            } catch (const std::exception&) {
                continue;
            }
            double rn2 = std::hypot(Rn[0], Rn[1]);
            if (rn2 < rn * (1.0 - 1e-4 * lambda) || lambda < 1e-8) {
                gm = nm;
                le = nl;
                R[0] = Rn[0];
                R[1] = Rn[1];
                rn = rn2;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw numeric_error("solve_endpoints: step damping failed at residual " +
                                std::to_string(rn));
    }
    double gp = gp_of(le);
    if (rn > tol)
        throw numeric_error("solve_endpoints: no convergence, residual " + std::to_string(rn));
    EndpointSolution sol;
    sol.frame = frame_from_endpoints(gm, gp, mp.h, mp.alpha);
    sol.gd = ghat(mp, sol.frame);
    sol.residual = rn;
    sol.iterations = it;
    return sol;
}

} // namespace loopnest

#endif

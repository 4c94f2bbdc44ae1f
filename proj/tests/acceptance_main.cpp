// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned in code next to each check.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "loopnest/analytic.hpp"
#include "loopnest/critical.hpp"
#include "loopnest/ldev.hpp"
#include "loopnest/maps.hpp"
#include "loopnest/series.hpp"
#include "loopnest/useries.hpp"

using namespace loopnest;
using clock_type = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void report(int idx, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %2d. %s — %s\n", ok ? "PASS" : "FAIL", idx, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

Poly budget_slice(const Poly& p, int perim_sum, int max_edges) {
    Poly out;
    for (const auto& t : p.terms()) {
        int faces = int(t.mono[VG]) + int(t.mono[VH]);
        int two_e = perim_sum + 3 * faces;
        if (two_e % 2 == 0 && two_e / 2 <= max_edges) out.add_term(t.mono, t.coef);
    }
    return out;
}

// 1. Exact oracle equivalence for every series coefficient with <= 7 edges:
//    disks, refined pointed disks and refined cylinders, formal weights.
void criterion_1() {
    auto t0 = clock_type::now();
    const int E = 7;
    Trunc tr;
    tr.max_u = E + 1;
    tr.max_face = (2 * E) / 3; // face degrees beyond this exceed the edge budget
    LoopModelSpec spec;        // all weights formal
    int lmax = 2 * E;
    auto ns = nested_fixed_point(spec, tr, lmax);
    auto pointed = refined_pointed_disk(ns, lmax);

    long sectors = 0, bad = 0;
    for (int l = 0; l <= lmax; ++l) {
        Poly cen = loop_census({l}, E, Marking::None);
        if (!budget_slice(ns.disks.F[l] - cen, l, E).is_zero()) ++bad;
        ++sectors;
        Poly cenp = loop_census({l}, E, Marking::PointedVertex);
        if (!budget_slice(pointed.F[l] - cenp, l, E).is_zero()) ++bad;
        ++sectors;
    }
    for (int l2 = 1; l2 <= 6; ++l2) {
        auto cyl = refined_cylinder(ns, l2, lmax);
        for (int l1 = l2; l1 + l2 <= 2 * E; ++l1) {
            Poly cen = loop_census({l1, l2}, E, Marking::SecondBoundary);
            if (!budget_slice(cyl.F[l1] - cen, l1 + l2, E).is_zero()) ++bad;
            ++sectors;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%ld sectors (disks, pointed, cylinders), %ld mismatches, %.1fs", sectors, bad,
                  seconds_since(t0));
    report(1, "oracle equivalence at 7 edges, zero tolerance", bad == 0 && seconds_since(t0) < 300,
           buf);
}

// 2. Depth distributions for V <= 5: exact rationals summing to one, equal
//    to the enumeration census wherever the 8-edge oracle reaches.
void criterion_2() {
    auto t0 = clock_type::now();
    LoopModelSpec spec;
    spec.n = Rational(3, 2);
    spec.g = Rational(1, 7);
    spec.h = Rational(2, 5);
    spec.alpha = Rational(1);

    int sectors = 0, census_checked = 0;
    bool ok = true;
    for (int V = 1; V <= 5; ++V) {
        for (int L = 0; L <= 3 * (V - 1); ++L) {
            int edges = 3 * (V - 1) - L; // triangulated disk sector
            if (edges < 0) continue;
            DepthDistribution d;
            try {
                d = depth_distribution_pointed(spec, V, L);
            } catch (const empty_sector_error&) {
                continue;
            }
            ++sectors;
            Rational total(0);
            for (const auto& p : d.prob) total += p;
            if (total != Rational(1)) ok = false;
            if (edges <= 8) {
                ++census_checked;
                Poly cen = loop_census({L}, 8, Marking::PointedVertex)
                               .eval_var(VN, *spec.n)
                               .eval_var(VG, *spec.g)
                               .eval_var(VH, *spec.h)
                               .eval_var(VA, *spec.alpha);
                Poly sector = cen.coeff_of(VU, V);
                Rational mass(0);
                for (const auto& t : sector.terms()) mass += t.coef;
                if (mass.is_zero()) {
                    ok = false;
                    continue;
                }
                for (std::size_t p = 0; p < d.prob.size(); ++p) {
                    Rational cp(0);
                    for (const auto& t : sector.terms())
                        if (t.mono[VS] == p) cp += t.coef;
                    if (d.prob[p] != cp / mass) ok = false;
                }
            }
        }
    }
    // cylinder sectors reachable by the oracle: E = 3V - L1 - L2 <= 8
    const int cyl_sectors[][3] = {{2, 1, 1}, {3, 1, 1}, {3, 2, 1}};
    for (const auto& vl : cyl_sectors) {
        int V = vl[0], L1 = vl[1], L2 = vl[2];
        DepthDistribution d;
        try {
            d = depth_distribution_cylinder(spec, V, L1, L2);
        } catch (const empty_sector_error&) {
            continue;
        }
        ++sectors;
        ++census_checked;
        Rational total(0);
        for (const auto& p : d.prob) total += p;
        if (total != Rational(1)) ok = false;
        Poly cen = loop_census({L1, L2}, 8, Marking::SecondBoundary)
                       .eval_var(VN, *spec.n)
                       .eval_var(VG, *spec.g)
                       .eval_var(VH, *spec.h)
                       .eval_var(VA, *spec.alpha);
        Poly sector = cen.coeff_of(VU, V);
        Rational mass(0);
        for (const auto& t : sector.terms()) mass += t.coef;
        if (mass.is_zero()) {
            ok = false;
            continue;
        }
        for (std::size_t p = 0; p < d.prob.size(); ++p) {
            Rational cp(0);
            for (const auto& t : sector.terms())
                if (t.mono[VS] == p) cp += t.coef;
            if (d.prob[p] != cp / mass) ok = false;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d sectors normalized exactly, %d matched to the census, %.1fs",
                  sectors, census_checked, seconds_since(t0));
    report(2, "depth distributions exact for V <= 5", ok && sectors > 10, buf);
}

// 3. Exponent table, exact rational arithmetic for the five named columns.
void criterion_3() {
    struct Row {
        const char* name;
        Rational b;
        Rational gamma_str, c, a, nu, d_gasket, kappa;
    };
    const Row rows[] = {
        {"n=0", Rational(1, 2), Rational(-1), Rational(2), Rational(3, 2), Rational(0),
         Rational(2), Rational(8)},
        {"percolation", Rational(1, 3), Rational(-1, 2), Rational(3, 2), Rational(5, 3),
         Rational(1, 4), Rational(7, 3), Rational(6)},
        {"ising", Rational(1, 4), Rational(-1, 3), Rational(4, 3), Rational(7, 4), Rational(1, 3),
         Rational(5, 2), Rational(16, 3)},
        {"3-potts", Rational(1, 6), Rational(-1, 5), Rational(6, 5), Rational(11, 6),
         Rational(2, 5), Rational(8, 3), Rational(24, 5)},
        {"kt", Rational(0), Rational(0), Rational(1), Rational(2), Rational(1, 2), Rational(3),
         Rational(4)},
    };
    bool ok = true;
    for (const auto& r : rows) {
        auto e = exponents_from_b(r.b, Phase::Dense);
        ok = ok && e.gamma_str == r.gamma_str && e.c == r.c && e.a == r.a && e.nu == r.nu &&
             e.d_gasket == r.d_gasket && e.kappa == r.kappa;
    }
    // dilute kappa is 4/(1+b): the Ising-interface point (n=1 dilute) gives 3
    ok = ok && exponents_from_b(Rational(1, 3), Phase::Dilute).kappa == Rational(3);
    report(3, "exponent table exact (dilute kappa = 4/(1+b))", ok,
           "five model columns, rational arithmetic");
}

// 4. Phase-diagram endpoints and the general-alpha confluence.
void criterion_4() {
    bool ok = true;
    double worst_end = 0, worst_conf = 0;
    for (double n : {0.5, 1.0, std::sqrt(2.0), std::sqrt(3.0)}) {
        auto fp = critical_line_alpha1(n, rho_max_of(n));
        worst_end = std::max(worst_end, std::fabs(fp.g));
        worst_end = std::max(
            worst_end, std::fabs(fp.h - 1.0 / (2.0 * std::sqrt(2.0) * std::sqrt(2.0 + n))));
        auto dl = critical_line_alpha1(n, rho_min_of(n));
        worst_end = std::max(worst_end,
                             std::fabs(dl.g / dl.h - (1.0 + std::sqrt((2.0 - n) / (6.0 + n)))));
        double rho = 0.5 * (rho_min_of(n) + rho_max_of(n));
        auto a1 = critical_line_alpha1(n, rho);
        double eps = 1e-7;
        auto cg = critical_line_general(n, 1.0 - eps, 0.5 - eps * rho / (2.0 * M_PI));
        worst_conf = std::max(worst_conf,
                              std::max(std::fabs(cg.g - a1.g), std::fabs(cg.h - a1.h)));
    }
    ok = worst_end <= 1e-12 && worst_conf <= 1e-6;
    char buf[160];
    std::snprintf(buf, sizeof buf, "endpoint residual %.1e (<=1e-12), confluence %.1e (<=1e-6)",
                  worst_end, worst_conf);
    report(4, "phase-diagram endpoints and confluence", ok, buf);
}

// 5. Near-critical scaling: continue the endpoint solve in u and fit
//    q ~ ((1-u)/Delta)^c at (n=1, rho=1.5).
void criterion_5() {
    auto t0 = clock_type::now();
    auto cp = critical_line_alpha1(1.0, 1.5);
    double c_exact = cp.c;
    double delta_exact = delta_constants(1.0, 1.5).Delta;

    BendingModel mp;
    mp.n = cp.n;
    mp.g = cp.g;
    mp.h = cp.h;
    mp.alpha = 1.0;
    double gm = cp.gamma_minus_star;
    std::vector<double> lu, lq;
    bool solved = true;
    for (double du : {8e-5, 5e-5, 3e-5, 2e-5, 1.2e-5, 8e-6, 5e-6, 4e-6}) {
        mp.u = 1.0 - du;
        try {
            double qpred = std::pow(du / delta_exact, c_exact);
            double gp0 = gamma_plus_for_nome(gm, mp.h, 1.0, qpred);
            auto sol = solve_endpoints(mp, gm, gp0, 1e-9);
            gm = sol.frame.gamma_minus;
            lu.push_back(std::log(du));
            lq.push_back(std::log(sol.frame.q));
        } catch (const std::exception&) {
            solved = false;
        }
    }
    double c_fit = 0, delta_fit = 0;
    if (lu.size() >= 3) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = int(lu.size());
        for (int i = 0; i < m; ++i) {
            sx += lu[i];
            sy += lq[i];
            sxx += lu[i] * lu[i];
            sxy += lu[i] * lq[i];
        }
        c_fit = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        double icpt = (sy - c_fit * sx) / m;
        delta_fit = std::exp(-icpt / c_fit);
    }
    bool ok = solved && std::fabs(c_fit - c_exact) <= 0.01 * c_exact &&
              std::fabs(delta_fit - delta_exact) <= 0.03 * delta_exact &&
              seconds_since(t0) < 60.0;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "c fit %.4f vs %.4f (%.2f%%), Delta fit %.3f vs %.3f (%.2f%%), %.1fs", c_fit,
                  c_exact, 100 * std::fabs(c_fit - c_exact) / c_exact, delta_fit, delta_exact,
                  100 * std::fabs(delta_fit - delta_exact) / delta_exact, seconds_since(t0));
    report(5, "near-critical scaling fit", ok, buf);
}

// 6. Special-function certification.
void criterion_6() {
    std::mt19937 rng(777);
    auto uni = [&](double a, double b) { return a + (b - a) * (rng() / double(rng.max())); };
    const cplx I(0, 1);
    double worst = 0;
    for (double q : {1e-3, 1e-6}) {
        double T = M_PI / std::log(1.0 / q);
        cplx tau = I * T;
        for (int it = 0; it < 100; ++it) {
            cplx v(uni(0.02, 0.95), uni(0.05, 0.95) * T);
            cplx th = theta1(v, tau);
            worst = std::max(worst, std::abs(theta1(v + 1.0, tau) + th) / (1 + std::abs(th)));
            cplx fac = -std::exp(-2.0 * I * M_PI * (v + tau / 2.0));
            worst = std::max(worst,
                             std::abs(theta1(v + tau, tau) - fac * th) / (1 + std::abs(fac * th)));
            cplx mod = I * std::exp(-I * M_PI * v * v / tau) / std::sqrt(-I * tau) *
                       theta1(v / tau, -1.0 / tau);
            worst = std::max(worst, std::abs(th - mod) / (1 + std::abs(th)));
            double b = uni(0.08, 0.92);
            cplx y = upsilon(b, v, tau);
            worst = std::max(worst,
                             std::abs(upsilon(b, v + 1.0, tau) - y) / (1 + std::abs(y)));
            worst = std::max(worst,
                             std::abs(upsilon(b, v + tau, tau) - std::exp(I * M_PI * b) * y) /
                                 (1 + std::abs(y)));
        }
    }
    double resid = std::abs(cplx(1e-6) * upsilon(0.41, cplx(1e-6), I * 0.4) - 1.0);
    double b = 0.37, w = 0.63;
    double e0[2], eh[2];
    int qi = 0;
    for (double q : {1e-4, 1e-6}) {
        double T = M_PI / std::log(1.0 / q);
        cplx tau = I * T;
        double scale = T * (1.0 - std::pow(q, b)) / (2.0 * M_PI);
        e0[qi] = std::abs(upsilon(b, tau * w, tau) * scale - upsilon_limit_profile(b, 0.0, w));
        eh[qi] = std::abs(upsilon(b, 0.5 + tau * w, tau) * scale / std::pow(q, b / 2.0) -
                          upsilon_limit_profile(b, 0.5, w));
        ++qi;
    }
    double r0 = e0[0] / e0[1], rh = eh[0] / eh[1];
    double p0 = std::pow(100.0, b), ph = std::pow(100.0, 1.0 - b);
    bool rates = r0 >= p0 / 2 && r0 <= p0 * 2 && rh >= ph / 2 && rh <= ph * 2;
    bool ok = worst <= 1e-11 && resid <= 1e-5 && rates;
    char buf[180];
    std::snprintf(
        buf, sizeof buf,
        "identity residual %.1e (<=1e-11), residue %.1e, rate ratios %.1f~%.1f and %.1f~%.1f",
        worst, resid, r0, p0, rh, ph);
    report(6, "special-function certification", ok, buf);
}

// 7. Rate-function identities (a)-(d).
void criterion_7() {
    auto t0 = clock_type::now();
    double wa = 0;
    for (double n : {1.0, std::sqrt(2.0), std::sqrt(3.0)})
        for (int i = 0; i <= 200; ++i) {
            double p = 0.05 + (10.0 - 0.05) * i / 200.0;
            wa = std::max(wa, std::fabs(rate_J(p, n) - rate_J_supform(p, n)));
        }
    double wb = std::fabs(rate_J(1.0 / std::sqrt(3.0), 1.0));
    double wb2 = 0;
    for (double p : {0.3, 1.0, 3.0, 10.0}) {
        double h = 1e-3 * (1.0 + p);
        double j2 = (-rate_J(p + 2 * h, 1.0) + 16 * rate_J(p + h, 1.0) - 30 * rate_J(p, 1.0) +
                     16 * rate_J(p - h, 1.0) - rate_J(p - 2 * h, 1.0)) /
                    (12 * h * h);
        wb2 = std::max(wb2, std::fabs(j2 * p * (p * p + 1.0) - 1.0));
    }
    double wc = 0, wd = 0;
    for (double kappa : {3.0, 3.5, 4.5, 6.0, 7.0}) {
        auto dom = lambda_quantum_domain(kappa);
        auto k = kpz_params(kappa);
        for (int i = 1; i < 100; ++i) {
            double lp = dom.lo + (dom.hi - dom.lo) * i / 100.0;
            wc = std::max(wc,
                          std::fabs(lambda_quantum(lp, kappa) -
                                    lambda_kappa(2 * kpz_U(lp, k.gamma, KPZDirection::Forward),
                                                 kappa)));
        }
        for (int i = 1; i <= 50; ++i) {
            double p = 0.02 + 0.08 * i;
            auto lf = legendre_fenchel([&](double l) { return lambda_quantum(l, kappa); },
                                       dom.lo + 1e-12, dom.hi - 1e-12, 1.0 / p, false);
            if (lf.boundary) continue;
            wd = std::max(wd, std::fabs(p * lf.value - theta_rate(p, kappa)));
        }
    }
    bool ok = wa <= 1e-10 && wb <= 1e-12 && wb2 <= 1e-6 && wc <= 1e-12 && wd <= 1e-8 &&
              seconds_since(t0) < 10.0;
    char buf[200];
    std::snprintf(
        buf, sizeof buf,
        "(a) %.1e<=1e-10 (b) %.1e<=1e-12, %.1e<=1e-6 (c) %.1e<=1e-12 (d) %.1e<=1e-8, %.1fs", wa,
        wb, wb2, wc, wd, seconds_since(t0));
    report(7, "rate-function identities", ok, buf);
}

// 8. Quantum quadrature vs the closed rate at kappa = 6.
void criterion_8() {
    auto t0 = clock_type::now();
    auto k = kpz_params(6.0);
    double ptyp = k.c / (2.0 * M_PI) * k.n / std::sqrt(4.0 - k.n * k.n);
    bool ok = true;
    std::string detail;
    for (double p : {ptyp, 0.3, 0.5}) {
        double th = theta_rate(p, 6.0);
        double r = richardson_rate(p, 6.0);
        double tol = std::max(0.02 * std::fabs(th), 0.01);
        ok = ok && std::fabs(r - th) <= tol;
        char seg[64];
        std::snprintf(seg, sizeof seg, "p=%.2f: %.4f vs %.4f; ", p, r, th);
        detail += seg;
    }
    double rs = richardson_rate(0.3, 6.0, Topology::Sphere);
    double target = 2.0 * theta_rate(0.15, 6.0);
    ok = ok && std::fabs(rs - target) <= std::max(0.02 * target, 0.01);
    char seg[80];
    std::snprintf(seg, sizeof seg, "sphere %.5f vs %.5f, %.1fs", rs, target, seconds_since(t0));
    detail += seg;
    report(8, "quantum quadrature (Richardson, 2%/0.01)", ok, detail);
}

// 9. Bivariate closed forms on a (p, q) grid.
void criterion_9() {
    WeightLaw bern;
    bern.kind = WeightLaw::BernoulliPM1;
    WeightLaw gauss;
    gauss.kind = WeightLaw::Gaussian;
    gauss.sigma2 = 0.8;
    double worst = 0;
    for (double n : {1.0, std::sqrt(2.0)})
        for (double p : {0.3, 0.8, 1.5, 3.0})
            for (double f : {-0.9, -0.5, 0.0, 0.4, 0.9}) {
                double q = f * p;
                double Jb = bivariate_rate(p, q, BivariateModel::Map, n, bern);
                double closed = rate_J(p, n);
                if (q != 0.0)
                    closed += (p + q) / 2 * std::log(p + q) + (p - q) / 2 * std::log(p - q) -
                              p * std::log(p);
                worst = std::max(worst, std::fabs(Jb - closed));
                double Jg = bivariate_rate(p, q, BivariateModel::Map, n, gauss);
                worst = std::max(worst,
                                 std::fabs(Jg - rate_J(p, n) - q * q / (2 * gauss.sigma2 * p)));
            }
    char buf[80];
    std::snprintf(buf, sizeof buf, "worst deviation %.1e (<=1e-10)", worst);
    report(9, "bivariate closed forms", worst <= 1e-10, buf);
}

// 10. Analytic vs combinatorial bridge at a deeply subcritical point.
void criterion_10() {
    auto t0 = clock_type::now();
    BendingModel mp;
    mp.n = 1.0;
    mp.g = 0.02;
    mp.h = 0.02;
    mp.alpha = 1.0;
    mp.u = 0.1;
    auto ue = usual_endpoints(mp.g, mp.u);
    auto sol = solve_endpoints(mp, ue.gamma_minus, ue.gamma_plus);
    int ord = 14;
    auto nn = nested_numeric(mp.n, mp.g, mp.h, mp.alpha, ord, 30);
    auto ref = refined_pointed_numeric(nn, 0.7);
    double x = 2.0;
    double target = pointed_resolvent(x, 0.7, mp, sol.frame).real();
    double prev = 1e300;
    bool monotone = true;
    double err12 = 0;
    for (int cut = 2; cut <= 14; cut += 2) {
        double s = 0;
        for (int l = 0; l <= 30; ++l) s += ref[l].eval(mp.u, cut) * std::pow(x, -(l + 1));
        double err = std::fabs(s - target);
        if (err > prev * 1.0000001 && cut <= 12) monotone = false;
        if (cut == 12) err12 = err;
        prev = err;
    }
    bool ok = monotone && err12 <= 1e-6;
    char buf[140];
    std::snprintf(buf, sizeof buf,
                  "monotone decrease %s, error at order 12 = %.2e (<=1e-6), %.1fs",
                  monotone ? "yes" : "no", err12, seconds_since(t0));
    report(10, "analytic-combinatorial bridge", ok, buf);
}

} // namespace

int main() {
    auto t0 = clock_type::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%s (%d/10 passed, %.1fs total)\n",
                g_failures == 0 ? "ACCEPTANCE: ALL PASSED" : "ACCEPTANCE: FAILURES",
                10 - g_failures, seconds_since(t0));
    return g_failures == 0 ? 0 : 1;
}

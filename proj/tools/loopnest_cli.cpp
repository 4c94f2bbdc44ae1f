// loopnest: nesting statistics of the O(n) loop model on random planar maps.
//
// Batch front end: emits rate-function tables, phase-diagram data, exact
// series dumps, depth distributions and cross-check reports. Deterministic:
// identical configurations produce byte-identical output.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "loopnest/analytic.hpp"
#include "loopnest/critical.hpp"
#include "loopnest/ldev.hpp"
#include "loopnest/maps.hpp"
#include "loopnest/series.hpp"
#include "loopnest/series_io.hpp"
#include "loopnest/useries.hpp"

using namespace loopnest;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitNumeric = 3;

std::string fmt17(double x) {
    if (x == 0.0) x = 0.0; // canonicalize signed zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Output {
    std::ofstream file;
    std::ostream* os = &std::cout;
    void open(const std::string& path) {
        if (path.empty() || path == "-") return;
        file.open(path);
        if (!file) throw std::runtime_error("cannot open output file: " + path);
        os = &file;
    }
    template <typename T>
    Output& operator<<(const T& v) {
        *os << v;
        return *this;
    }
};

int budget_cap() {
    const char* e = std::getenv("LOOPNEST_BUDGET");
    if (!e) return 64;
    return std::max(1, std::atoi(e));
}

void check_budget(int requested, const char* what) {
    if (requested > budget_cap())
        throw std::invalid_argument(std::string(what) + " exceeds LOOPNEST_BUDGET cap of " +
                                    std::to_string(budget_cap()));
}

std::optional<Rational> parse_weight(const std::string& s) {
    if (s == "formal") return std::nullopt;
    return Rational::from_string(s);
}

struct LdfOpts {
    double n = 1.0, kappa = 0.0;
    double p_min = 0.05, p_max = 5.0;
    int points = 100;
    bool bivariate = false;
    std::string law = "bernoulli";
    double sigma2 = 1.0, q_frac = 0.5;
    std::string output = "-";
};

int run_ldf(const LdfOpts& o) {
    Output out;
    out.open(o.output);
    WeightLaw law;
    if (o.law == "bernoulli")
        law.kind = WeightLaw::BernoulliPM1;
    else if (o.law == "gaussian") {
        law.kind = WeightLaw::Gaussian;
        law.sigma2 = o.sigma2;
    } else
        throw std::invalid_argument("unknown law: " + o.law);

    std::string header = "p,J";
    if (o.kappa > 0) header += ",theta_disk,theta_sphere";
    if (o.bivariate) header += ",q,J_biv";
    out << header << "\n";
    std::vector<double> ps;
    for (int i = 0; i < o.points; ++i)
        ps.push_back(o.p_min + (o.p_max - o.p_min) * i / std::max(1, o.points - 1));
    double p_opt = o.n / std::sqrt(4.0 - o.n * o.n); // the zero of J
    if (p_opt > o.p_min && p_opt < o.p_max) ps.push_back(p_opt);
    std::sort(ps.begin(), ps.end());
    for (double p : ps) {
        std::string row = fmt17(p) + "," + fmt17(rate_J(p, o.n));
        if (o.kappa > 0)
            row += "," + fmt17(theta_rate(p, o.kappa)) + "," +
                   fmt17(theta_rate(p, o.kappa, Topology::Sphere));
        if (o.bivariate) {
            double q = o.q_frac * p;
            row +=
                "," + fmt17(q) + "," + fmt17(bivariate_rate(p, q, BivariateModel::Map, o.n, law));
        }
        out << row << "\n";
    }
    return 0;
}

struct PhaseOpts {
    double n = 1.0, alpha = 1.0;
    double rho = -1.0, winf = -1.0;
    bool sweep = false, exponent_table = false;
    std::string output = "-";
};

void phase_row(Output& out, const CriticalPoint& cp, double delta) {
    out << fmt17(cp.alpha == 1.0 ? cp.rho : cp.w_inf_star) << "," << fmt17(cp.g) << ","
        << fmt17(cp.h) << "," << phase_name(cp.phase) << "," << fmt17(cp.b) << "," << fmt17(cp.c)
        << "," << fmt17(delta) << "\n";
}

int run_phase(const PhaseOpts& o) {
    Output out;
    out.open(o.output);
    if (o.exponent_table) {
        out << "model,b,gamma_str,c,a,nu,kappa\n";
        struct M {
            const char* name;
            Rational b;
        };
        const M models[] = {{"n0", Rational(1, 2)},
                            {"percolation", Rational(1, 3)},
                            {"ising", Rational(1, 4)},
                            {"potts3", Rational(1, 6)},
                            {"kt", Rational(0)}};
        for (const auto& m : models) {
            auto e = exponents_from_b(m.b, Phase::Dense);
            out << m.name << "," << e.b.str() << "," << e.gamma_str.str() << "," << e.c.str()
                << "," << e.a.str() << "," << e.nu.str() << "," << e.kappa.str() << "\n";
        }
        return 0;
    }
    out << (o.alpha == 1.0 ? "rho,g,h,phase,b,c,Delta\n" : "winf,g,h,phase,b,c,Delta\n");
    if (o.alpha == 1.0) {
        double rmin = rho_min_of(o.n), rmax = rho_max_of(o.n);
        if (o.sweep) {
            for (int i = 0; i <= 40; ++i) {
                double rho = rmin + (rmax - rmin) * i / 40.0;
                auto cp = critical_line_alpha1(o.n, rho);
                auto d = delta_constants(o.n, rho);
                phase_row(out, cp, d.phase == Phase::Dilute ? dilute_delta(o.n) : d.Delta);
            }
        } else {
            double rho = o.rho > 0 ? o.rho : 0.5 * (rmin + rmax);
            auto cp = critical_line_alpha1(o.n, rho);
            auto d = delta_constants(o.n, rho);
            phase_row(out, cp, d.phase == Phase::Dilute ? dilute_delta(o.n) : d.Delta);
        }
    } else {
        if (o.winf <= 0) throw std::invalid_argument("phase: general alpha needs --winf");
        auto cp = critical_line_general(o.n, o.alpha, o.winf);
        phase_row(out, cp, 0.0); // near-critical constant published for alpha = 1 only
    }
    return 0;
}

struct SeriesOpts {
    std::string n = "formal", g = "1", h = "1", alpha = "1";
    int max_volume = 5, perimeter = 2, l2 = 0;
    bool refined = false;
    std::string output = "-";
};

int run_series(const SeriesOpts& o) {
    check_budget(o.max_volume, "series --max-volume");
    Output out;
    out.open(o.output);
    LoopModelSpec spec;
    spec.n = parse_weight(o.n);
    spec.g = parse_weight(o.g);
    spec.h = parse_weight(o.h);
    spec.alpha = parse_weight(o.alpha);
    if (!spec.g || !spec.h || !spec.alpha)
        throw std::invalid_argument("series: g, h, alpha must be numeric rationals for dumps");
    Trunc tr;
    tr.max_u = o.max_volume;
    tr.max_face = 2 * o.max_volume + o.perimeter + o.l2;
    auto ns = nested_fixed_point(spec, tr, std::max(o.perimeter, o.l2));

    json j;
    j["model"] = {{"n", o.n}, {"g", o.g}, {"h", o.h}, {"alpha", o.alpha}};
    j["perimeter"] = o.perimeter;
    j["disk"] = series_to_json(ns.disks.F[o.perimeter], tr.max_u, false);
    if (o.refined) {
        auto ref = refined_pointed_disk(ns, o.perimeter);
        j["refined_pointed"] = series_to_json(ref.F[o.perimeter], tr.max_u, true);
    }
    if (o.l2 > 0) {
        auto cyl = refined_cylinder(ns, o.l2, o.perimeter);
        j["perimeter2"] = o.l2;
        j["refined_cylinder"] = series_to_json(cyl.F[o.perimeter], tr.max_u, true);
    }
    out << j.dump(2) << "\n";
    return 0;
}

struct DepthOpts {
    std::string n = "1", g = "1", h = "1", alpha = "1";
    int volume = 3, perimeter = 1, l2 = 0;
    std::string output = "-";
};

int run_depth(const DepthOpts& o) {
    check_budget(o.volume, "depth --volume");
    Output out;
    out.open(o.output);
    LoopModelSpec spec;
    spec.n = parse_weight(o.n);
    spec.g = parse_weight(o.g);
    spec.h = parse_weight(o.h);
    spec.alpha = parse_weight(o.alpha);
    if (!spec.n || !spec.g || !spec.h || !spec.alpha)
        throw std::invalid_argument("depth: all weights must be numeric rationals");
    DepthDistribution d = o.l2 > 0
                              ? depth_distribution_cylinder(spec, o.volume, o.perimeter, o.l2)
                              : depth_distribution_pointed(spec, o.volume, o.perimeter);
    out << "P,probability_exact,probability\n";
    for (std::size_t p = 0; p < d.prob.size(); ++p)
        out << p << "," << d.prob[p].str() << "," << fmt17(d.prob[p].to_double()) << "\n";
    return 0;
}

struct KpzOpts {
    double kappa = 6.0;
    bool quadrature = false;
    double A = 200.0;
    int points = 50;
    std::string output = "-";
};

int run_kpz(const KpzOpts& o) {
    Output out;
    out.open(o.output);
    auto dom = lambda_quantum_domain(o.kappa);
    auto k = kpz_params(o.kappa);
    out << "lambda,Lambda,LambdaQ\n";
    for (int i = 1; i < o.points; ++i) {
        double lp = dom.lo + (dom.hi - dom.lo) * i / o.points;
        double lam = 2.0 * kpz_U(lp, k.gamma, KPZDirection::Forward);
        out << fmt17(lp) << "," << fmt17(lambda_kappa(lam, o.kappa)) << ","
            << fmt17(lambda_quantum(lp, o.kappa)) << "\n";
    }
    out << "p,theta_disk,theta_sphere\n";
    for (int i = 1; i <= o.points; ++i) {
        double p = 0.02 + 0.05 * i;
        out << fmt17(p) << "," << fmt17(theta_rate(p, o.kappa)) << ","
            << fmt17(theta_rate(p, o.kappa, Topology::Sphere)) << "\n";
    }
    if (o.quadrature) {
        out << "p,theta,quadrature_rate,richardson\n";
        for (double p : {0.15, 0.3, 0.5}) {
            double th = theta_rate(p, o.kappa);
            double qa = quantum_quadrature_rate(p, o.kappa, o.A);
            double ri = richardson_rate(p, o.kappa);
            out << fmt17(p) << "," << fmt17(th) << "," << fmt17(qa) << "," << fmt17(ri) << "\n";
        }
    }
    return 0;
}

struct OracleOpts {
    int max_edges = 5;
    int perimeter = -1, perimeter2 = 0;
    bool pointed = false;
    bool dump = false, dump_maps = false;
    std::string g = "1", h = "1", alpha = "1";
    std::string output = "-";
};

int run_oracle(const OracleOpts& o) {
    check_budget(o.max_edges, "oracle --max-edges");
    if (o.max_edges > 8) throw std::invalid_argument("oracle: max-edges capped at 8");
    Output out;
    out.open(o.output);
    if (o.dump || o.dump_maps) {
        int l = o.perimeter >= 0 ? o.perimeter : 2;
        json j;
        j["perimeter"] = l;
        j["max_edges"] = o.max_edges;
        if (o.dump) {
            Marking mk = o.perimeter2 > 0 ? Marking::SecondBoundary
                         : o.pointed      ? Marking::PointedVertex
                                          : Marking::None;
            std::vector<int> bnd{l};
            if (o.perimeter2 > 0) bnd.push_back(o.perimeter2);
            Poly census = loop_census(bnd, o.max_edges, mk)
                              .eval_var(VG, Rational::from_string(o.g))
                              .eval_var(VH, Rational::from_string(o.h))
                              .eval_var(VA, Rational::from_string(o.alpha));
            j["census"] = series_to_json(census, o.max_edges + 1, mk != Marking::None);
        }
        if (o.dump_maps) {
            MapConstraints cs;
            cs.boundary_perims = {l};
            if (o.perimeter2 > 0) cs.boundary_perims.push_back(o.perimeter2);
            cs.allowed_inner_degrees = {3};
            cs.max_edges = o.max_edges;
            json maps = json::array();
            for (const auto& m : enumerate_rooted_maps(cs))
                maps.push_back({{"sigma", m.sigma}, {"iota", m.iota}, {"boundary", m.boundary}});
            j["maps"] = maps;
        }
        out << j.dump(2) << "\n";
        return 0;
    }
    Trunc tr;
    tr.max_u = o.max_edges + 1;
    tr.max_face = (2 * o.max_edges) / 3 + 1;
    LoopModelSpec spec; // fully formal
    int lmax = o.perimeter >= 0 ? std::max(1, o.perimeter) : 2 * o.max_edges;
    auto ns = nested_fixed_point(spec, tr, lmax);
    long mismatches = 0, sectors = 0;
    auto compare = [&](const Poly& series, const Poly& census, int perim_sum) {
        Poly diff = series - census;
        for (const auto& t : diff.terms()) {
            int faces = int(t.mono[VG]) + int(t.mono[VH]);
            int two_e = perim_sum + 3 * faces;
            if (two_e % 2 == 0 && two_e / 2 <= o.max_edges) ++mismatches;
        }
        ++sectors;
    };
    int l_lo = o.perimeter >= 0 ? o.perimeter : 0;
    int l_hi = o.perimeter >= 0 ? o.perimeter : std::min(lmax, 2 * o.max_edges);
    for (int l = l_lo; l <= l_hi; ++l) {
        if (o.perimeter2 > 0) {
            int l1 = std::max(1, l);
            auto cyl = refined_cylinder(ns, o.perimeter2, l1);
            Poly census = loop_census({l1, o.perimeter2}, o.max_edges, Marking::SecondBoundary);
            compare(cyl.F[l1], census, l1 + o.perimeter2);
        } else if (o.pointed) {
            auto ref = refined_pointed_disk(ns, lmax);
            Poly census = loop_census({l}, o.max_edges, Marking::PointedVertex);
            compare(ref.F[l], census, l);
        } else {
            Poly census = loop_census({l}, o.max_edges, Marking::None);
            compare(ns.disks.F[l], census, l);
        }
    }
    out << "sectors checked: " << sectors << "\n";
    out << "mismatching monomials: " << mismatches << "\n";
    out << (mismatches == 0 ? "AGREE\n" : "DISAGREE\n");
    return mismatches == 0 ? 0 : kExitInvariant;
}

int run_check(const std::string& output) {
    Output out;
    out.open(output);
    int failures = 0;
    auto report = [&](const char* name, bool ok) {
        out << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    };

    {
        std::mt19937 rng(4242);
        auto uni = [&](double a, double b) { return a + (b - a) * (rng() / double(rng.max())); };
        const cplx I(0, 1);
        bool ok = true;
        for (int it = 0; it < 25; ++it) {
            double T = uni(0.15, 1.0);
            cplx tau = I * T;
            cplx v(uni(0.0, 0.9), uni(-0.3, 0.3) * T);
            cplx th = theta1(v, tau);
            ok = ok && std::abs(theta1(v + 1.0, tau) + th) <= 1e-12 * (1 + std::abs(th));
            cplx rhs = I * std::exp(-I * M_PI * v * v / tau) / std::sqrt(-I * tau) *
                       theta1(v / tau, -1.0 / tau);
            ok = ok && std::abs(th - rhs) <= 1e-11 * (1 + std::abs(th));
            double b = uni(0.1, 0.9);
            cplx vv(uni(0.1, 0.9), uni(0.1, 0.9) * T);
            cplx y = upsilon(b, vv, tau);
            ok = ok && std::abs(upsilon(b, vv + tau, tau) - std::exp(I * M_PI * b) * y) <=
                           1e-10 * (1 + std::abs(y));
        }
        report("theta/upsilon identities", ok);
    }
    {
        bool ok = true;
        for (double n : {1.0, std::sqrt(2.0)})
            for (double p = 0.1; p <= 8.0; p += 0.37)
                ok = ok && std::fabs(rate_J(p, n) - rate_J_supform(p, n)) <= 1e-9;
        report("depth rate function: closed form vs variational form", ok);
    }
    {
        bool ok = true;
        for (double kappa : {3.5, 6.0}) {
            auto dom = lambda_quantum_domain(kappa);
            auto k = kpz_params(kappa);
            for (int i = 1; i < 40; ++i) {
                double lp = dom.lo + (dom.hi - dom.lo) * i / 40.0;
                ok = ok &&
                     std::fabs(lambda_quantum(lp, kappa) -
                               lambda_kappa(2 * kpz_U(lp, k.gamma, KPZDirection::Forward),
                                            kappa)) <= 1e-11;
            }
        }
        report("quantum cumulant composition", ok);
    }
    {
        auto e = exponents_from_b(Rational(1, 3), Phase::Dense);
        bool ok = e.gamma_str == Rational(-1, 2) && e.c == Rational(3, 2) &&
                  e.kappa == Rational(6) && e.nu == Rational(1, 4);
        report("exponent table", ok);
    }
    {
        bool ok = true;
        for (double n : {0.5, 1.0, std::sqrt(2.0)}) {
            auto fp = critical_line_alpha1(n, rho_max_of(n));
            ok = ok && std::fabs(fp.g) < 1e-12 &&
                 std::fabs(fp.h - 1.0 / (2.0 * std::sqrt(2.0 * (2.0 + n)))) < 1e-12;
        }
        report("phase endpoints", ok);
    }
    {
        Trunc tr{4, 3};
        LoopModelSpec spec;
        auto ns = nested_fixed_point(spec, tr, 3);
        auto ref = refined_pointed_disk(ns, 3);
        bool ok = true;
        for (int l = 0; l <= 3; ++l) {
            Poly census = loop_census({l}, 4, Marking::PointedVertex);
            Poly diff = ref.F[l] - census;
            for (const auto& t : diff.terms()) {
                int faces = int(t.mono[VG]) + int(t.mono[VH]);
                int two_e = l + 3 * faces;
                if (two_e % 2 == 0 && two_e / 2 <= 4) ok = false;
            }
            ok = ok && ref.F[l].eval_var(VS, Rational(1)) == ns.disks.F[l].euler(VU);
        }
        report("series vs enumeration census (4-edge budget)", ok);
    }
    {
        LoopModelSpec spec;
        spec.n = Rational(1);
        spec.g = Rational(1, 3);
        spec.h = Rational(1, 2);
        spec.alpha = Rational(1);
        auto d = depth_distribution_pointed(spec, 3, 1);
        Rational total(0);
        for (auto& p : d.prob) total += p;
        report("depth distribution normalization", total == Rational(1));
    }
    {
        WeightLaw bern;
        bern.kind = WeightLaw::BernoulliPM1;
        double p = 1.2, q = 0.5;
        double lhs = bivariate_rate(p, q, BivariateModel::Map, 1.0, bern);
        double rhs = rate_J(p, 1.0) + (p + q) / 2 * std::log(p + q) +
                     (p - q) / 2 * std::log(p - q) - p * std::log(p);
        report("bivariate closed form", std::fabs(lhs - rhs) < 1e-10);
    }
    out << (failures == 0 ? "ALL CHECKS PASSED\n" : "CHECKS FAILED\n");
    return failures == 0 ? 0 : kExitInvariant;
}

// Loads a flat JSON config into argv-style tokens understood by the parser.
std::vector<std::string> config_to_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    json j = json::parse(in);
    std::vector<std::string> args;
    args.push_back(j.at("command").get<std::string>());
    for (auto& [key, val] : j.items()) {
        if (key == "command") continue;
        if (val.is_boolean()) {
            if (val.get<bool>()) args.push_back("--" + key);
        } else {
            args.push_back("--" + key);
            args.push_back(val.is_string() ? val.get<std::string>() : val.dump());
        }
    }
    return args;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nesting statistics of the O(n) loop model on random planar maps"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");

    LdfOpts ldf;
    auto* c_ldf = app.add_subcommand("ldf", "large-deviations rate tables");
    c_ldf->add_option("--n", ldf.n, "loop fugacity");
    c_ldf->add_option("--kappa", ldf.kappa, "CLE parameter (adds quantum columns)");
    c_ldf->add_option("--p-min", ldf.p_min);
    c_ldf->add_option("--p-max", ldf.p_max);
    c_ldf->add_option("--points", ldf.points);
    c_ldf->add_flag("--bivariate", ldf.bivariate);
    c_ldf->add_option("--law", ldf.law, "bernoulli | gaussian");
    c_ldf->add_option("--sigma2", ldf.sigma2);
    c_ldf->add_option("--q-frac", ldf.q_frac, "bivariate q = q_frac * p");
    c_ldf->add_option("--output", ldf.output);

    PhaseOpts ph;
    auto* c_ph = app.add_subcommand("phase", "critical line, exponents, near-critical constants");
    c_ph->add_option("--n", ph.n);
    c_ph->add_option("--alpha", ph.alpha);
    c_ph->add_option("--rho", ph.rho);
    c_ph->add_option("--winf", ph.winf);
    c_ph->add_flag("--sweep", ph.sweep);
    c_ph->add_flag("--exponent-table", ph.exponent_table);
    c_ph->add_option("--output", ph.output);

    SeriesOpts se;
    auto* c_se = app.add_subcommand("series", "exact generating series dumps (JSON)");
    c_se->set_help_flag("--help", "print help");
    c_se->add_option("--n", se.n, "rational or 'formal'");
    c_se->add_option("--g", se.g);
    c_se->add_option("--h", se.h);
    c_se->add_option("--alpha", se.alpha);
    c_se->add_option("--max-volume", se.max_volume);
    c_se->add_option("--perimeter", se.perimeter);
    c_se->add_flag("--refined", se.refined);
    c_se->add_option("--cylinder", se.l2, "second boundary perimeter");
    c_se->add_option("--output", se.output);

    DepthOpts de;
    auto* c_de = app.add_subcommand("depth", "exact depth distribution in a (V, L) sector");
    c_de->set_help_flag("--help", "print help");
    c_de->add_option("--volume", de.volume);
    c_de->add_option("--perimeter", de.perimeter);
    c_de->add_option("--l2", de.l2);
    c_de->add_option("--n", de.n);
    c_de->add_option("--g", de.g);
    c_de->add_option("--h", de.h);
    c_de->add_option("--alpha", de.alpha);
    c_de->add_option("--output", de.output);

    KpzOpts kp;
    auto* c_kp = app.add_subcommand("kpz", "quantum cumulants and nesting rates");
    c_kp->add_option("--kappa", kp.kappa);
    c_kp->add_flag("--quadrature", kp.quadrature);
    c_kp->add_option("--A", kp.A);
    c_kp->add_option("--points", kp.points);
    c_kp->add_option("--output", kp.output);

    OracleOpts orc;
    auto* c_or = app.add_subcommand("oracle", "enumeration census and series agreement");
    c_or->add_option("--max-edges", orc.max_edges);
    c_or->add_option("--perimeter", orc.perimeter);
    c_or->add_option("--perimeter2", orc.perimeter2);
    c_or->add_flag("--pointed", orc.pointed);
    c_or->add_flag("--dump", orc.dump, "emit the exact census in series JSON format");
    c_or->add_flag("--dump-maps", orc.dump_maps, "emit canonical permutation arrays");
    c_or->add_option("--g", orc.g, "weight for --dump");
    c_or->add_option("--h", orc.h, "weight for --dump");
    c_or->add_option("--alpha", orc.alpha, "weight for --dump");
    c_or->set_help_flag("--help", "print help");
    c_or->add_option("--output", orc.output);

    std::string check_output = "-";
    auto* c_ck = app.add_subcommand("check", "run the invariant suite");
    c_ck->add_option("--output", check_output);

    // --config file.json replaces the command line (flat flag mirror)
    std::vector<std::string> cfg_args;
    if (argc == 3 && std::string(argv[1]) == "--config") {
        try {
            cfg_args = config_to_args(argv[2]);
        } catch (const std::exception& e) {
            std::cerr << json{{"error", e.what()}, {"code", kExitUsage}}.dump() << "\n";
            return kExitUsage;
        }
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (const auto& a : cfg_args) cargs.push_back(a.c_str());
        try {
            app.parse(int(cargs.size()), cargs.data());
        } catch (const CLI::ParseError& e) {
            std::cerr << json{{"error", e.what()}, {"code", kExitUsage}}.dump() << "\n";
            return kExitUsage;
        }
    } else {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) {
                (void)app.exit(e); // --help text
                return 0;
            }
            std::cerr << json{{"error", e.what()}, {"code", kExitUsage}}.dump() << "\n";
            return kExitUsage;
        }
    }

    try {
        if (*c_ldf) return run_ldf(ldf);
        if (*c_ph) return run_phase(ph);
        if (*c_se) return run_series(se);
        if (*c_de) return run_depth(de);
        if (*c_kp) return run_kpz(kp);
        if (*c_or) return run_oracle(orc);
        if (*c_ck) return run_check(check_output);
    } catch (const empty_sector_error& e) {
        std::cerr << json{{"error", e.what()}, {"code", kExitInvariant}}.dump() << "\n";
        return kExitInvariant;
    } catch (const numeric_error& e) {
        std::cerr << json{{"error", e.what()}, {"code", kExitNumeric}}.dump() << "\n";
        return kExitNumeric;
    } catch (const convergence_error& e) {
        std::cerr << json{{"error", e.what()}, {"code", kExitNumeric}}.dump() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}, {"code", kExitUsage}}.dump() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed
// here. Pass criterion numbers as arguments to run a subset.

#include <hplab/pipeline.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace hplab;
namespace fs = std::filesystem;

namespace
{

// 2: Markov Angelesco pushing
constexpr double kal_im_tol = 1e-5;
constexpr double kal_gap_hi = 0.07;
constexpr double kal_left_lo = 0.07;
constexpr double kal_left_hi = 0.20;
// 3: Markov Padé
constexpr double markov_im_log10 = -30.0;
constexpr double markov_min_separation = 1e-8;
constexpr double markov_exact_margin = 5.0; // digits below working precision
// 4, 5, 6
constexpr long pade10_digits = 1200;
constexpr double shadow_radius = 0.05;
constexpr double bus_im_tol = 1e-5;
constexpr double bus_density_cap = 0.05;
constexpr double bus_density_radius = 0.1;
// 7: invariants, agreement of high-precision roots
constexpr double invariant_log10 = -30.0;
constexpr double rational_margin = 10.0; // digits below working precision
// 8: exploratory
constexpr double union_hausdorff = 0.15;

int hard_failures = 0;

void verdict(int id, const std::string &name, bool pass, const std::string &detail, bool enforced = true)
{
    std::string tag = pass ? "PASS" : "FAIL";
    if (!enforced) {
        tag += " (recorded, not enforced)";
    }
    std::cout << tag << "  [" << id << "] " << name << ": " << detail << std::endl;
    if (!pass && enforced) {
        ++hard_failures;
    }
}

std::string fmt(double v, const char *f = "%.4g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

SeriesCache cache(std::nullopt);
std::vector<const RootCloud *> all_clouds;
std::vector<std::unique_ptr<RootCloud>> cloud_store;

struct Computed
{
    HpSolution sol;
    std::vector<RootCloud> clouds;
    std::vector<std::vector<Point>> pts;
};

long default_digits(int n) { return std::max(256L, 30L * n); }

/// Solve, verify the order of contact and (optionally) find certified roots.
Computed compute(SystemKind mode, const std::vector<FunctionSpec> &specs, int n, long digits, bool roots = true)
{
    const Precision prec(digits);
    const std::size_t len = series_length(mode, n);
    std::vector<Series> s, ref;
    for (const auto &f : specs) {
        s.push_back(cache.get(f, len, prec));
        ref.push_back(cache.get(f, len, prec.doubled()));
    }
    Computed c{kernel_solve(build_system(mode, s, n)), {}, {}};
    residual_series(c.sol, ref);
    if (roots) {
        for (std::size_t f = 0; f < c.sol.polys.size(); ++f) {
            c.clouds.push_back(certify(c.sol.polys[f], find_roots(c.sol.polys[f], prec, static_cast<int>(f), n)));
            c.pts.push_back(to_points(c.clouds.back()));
            cloud_store.push_back(std::make_unique<RootCloud>(c.clouds.back()));
            all_clouds.push_back(cloud_store.back().get());
        }
    }
    return c;
}

Computed compute(const std::string &preset, int n, long digits, bool roots = true)
{
    const Preset p = find_preset(preset);
    return compute(p.mode, p.specs, n, digits, roots);
}

double log10_dist(const Complex &a, const Complex &b)
{
    const mpfr_prec_t bits = std::max(a.re().bits(), b.re().bits());
    Complex d(bits, a);
    d -= Complex(bits, b);
    return d.is_zero() ? -HUGE_VAL : magnitude(d).log10_abs();
}

/// Largest over `a` of the log10 distance to the nearest point of `b`.
double worst_match(const std::vector<Complex> &a, const std::vector<Complex> &b)
{
    double worst = -HUGE_VAL;
    for (const auto &z : a) {
        double best = HUGE_VAL;
        for (const auto &w : b) {
            best = std::min(best, log10_dist(z, w));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

double elapsed(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void criterion_1()
{
    int cases = 0, ok = 0;
    double worst_margin = HUGE_VAL;
    std::string first_failure;
    for (const auto &p : presets()) {
        for (int n : {5, 10, 20, 40}) {
            ++cases;
            const long digits = 30L * n;
            try {
                const Precision prec(digits);
                const std::size_t len = series_length(p.mode, n);
                std::vector<Series> s, ref;
                for (const auto &f : p.specs) {
                    s.push_back(cache.get(f, len, prec));
                    ref.push_back(cache.get(f, len, prec.doubled()));
                }
                const HpSolution sol = kernel_solve(build_system(p.mode, s, n));
                const auto rems = residual_series(sol, ref);
                std::size_t checked = 0;
                for (const auto &r : rems) {
                    checked += r.required;
                    for (std::size_t t = 0; t < r.required; ++t) {
                        worst_margin = std::min(worst_margin, -static_cast<double>(digits) / 2.0 - r.relative_log10(t));
                    }
                }
                const std::size_t expected = p.mode == SystemKind::hermite_pade ? 3 * n + 2 : 2 * n + 1;
                if (checked != expected) {
                    throw std::runtime_error("checked " + std::to_string(checked) + " coefficients, expected "
                                             + std::to_string(expected));
                }
                ++ok;
            } catch (const std::exception &e) {
                if (first_failure.empty()) {
                    first_failure = p.name + " n=" + std::to_string(n) + ": " + e.what();
                }
            }
        }
    }
    std::string detail = std::to_string(ok) + "/" + std::to_string(cases) + " preset/degree cases verified";
    if (std::isfinite(worst_margin)) {
        detail += ", smallest margin below 10^(-digits/2): " + fmt(worst_margin, "%.1f") + " decades";
    }
    if (!first_failure.empty()) {
        detail += "; first failure " + first_failure;
    }
    verdict(1, "order of contact, every preset, n in {5,10,20,40}, digits 30n", ok == cases, detail);
}

void criterion_2()
{
    const double target = 3.0 * kalyagin_point(1.0 / 3.0);
    const Computed c60 = compute("kalyagin_markov", 60, default_digits(60));
    const auto &q2 = c60.pts[2];
    double max_im = 0.0;
    std::size_t in_gap = 0;
    for (const auto &z : q2) {
        max_im = std::max(max_im, std::abs(z.imag()));
        if (z.real() > 0.0 && z.real() < kal_gap_hi) {
            ++in_gap;
        }
    }
    const PushingGap g60 = pushing_gap(q2, 0.0, 3.0, kal_im_tol);
    const bool ok60 = max_im <= kal_im_tol && in_gap == 0 && g60.leftmost > kal_left_lo && g60.leftmost < kal_left_hi
                      && c60.clouds[2].all_certified();

    const Computed c45 = compute("kalyagin_markov", 45, default_digits(45));
    const Computed c90 = compute("kalyagin_markov", 90, default_digits(90));
    const double d45 = std::abs(pushing_gap(c45.pts[2], 0.0, 3.0, kal_im_tol).leftmost - target);
    const double d90 = std::abs(pushing_gap(c90.pts[2], 0.0, 3.0, kal_im_tol).leftmost - target);

    verdict(2, "Markov Angelesco pushing, supports [-1,0] and [0,3]",
            ok60 && d90 < d45,
            "n=60: max|Im Q2 zero| " + fmt(max_im) + ", zeros in (0," + fmt(kal_gap_hi) + "): " + std::to_string(in_gap)
                + ", leftmost " + fmt(g60.leftmost, "%.5f") + " (limit 8/63 = " + fmt(target, "%.5f")
                + "); |leftmost - 8/63| n=45 " + fmt(d45) + ", n=90 " + fmt(d90));
}

void criterion_3()
{
    bool ok = true;
    std::string detail;
    double worst_im = -HUGE_VAL, worst_sep = HUGE_VAL;
    for (int n = 1; n <= 20; ++n) {
        const long digits = default_digits(n);
        const Computed c = compute("markov_sqrt", n, digits);
        const RootCloud &poles = c.clouds[1];
        if (poles.size() != static_cast<std::size_t>(n) || !poles.all_certified()) {
            ok = false;
            detail += " n=" + std::to_string(n) + " has " + std::to_string(poles.size()) + " poles;";
        }
        for (std::size_t k = 0; k < poles.size(); ++k) {
            const auto &z = poles.points[k];
            const double im = z.im().is_zero() ? -HUGE_VAL : z.im().log10_abs();
            worst_im = std::max(worst_im, im);
            const double re = z.re().to_double();
            if (!(re > -1.0 && re < 0.0) || im > markov_im_log10) {
                ok = false;
            }
            for (std::size_t l = k + 1; l < poles.size(); ++l) {
                worst_sep = std::min(worst_sep, std::abs(c.pts[1][k] - c.pts[1][l]));
            }
        }
        if (n == 1) {
            const Precision prec(digits);
            const double err = log10_dist(poles.points.at(0), parse_constant("-1/4", prec));
            const bool exact = err <= -static_cast<double>(digits) + markov_exact_margin;
            ok = ok && exact;
            detail += " n=1 pole -1/4 to 10^" + (std::isfinite(err) ? fmt(err, "%.0f") : std::string("-inf"))
                      + " at " + std::to_string(digits) + " digits;";
        }
    }
    ok = ok && worst_sep > markov_min_separation;
    detail += " n<=20: all poles in (-1,0), max log10|Im| " + (std::isfinite(worst_im) ? fmt(worst_im, "%.0f") : "-inf")
              + ", min separation " + fmt(worst_sep);
    verdict(3, "Padé poles of sqrt((z+1)/z)", ok, detail);
}

void criterion_4()
{
    std::string counts;
    bool ok = true;
    for (int n = 25; n <= 40; ++n) {
        const Computed c = compute("pade10", n, pade10_digits);
        const FroissartReport r = froissart_report(c.pts, DetectorThresholds{}, n);
        counts += (counts.empty() ? "" : " ") + std::to_string(r.doublets.size());
        ok = ok && r.doublets.size() <= 1;
    }
    verdict(4, "at most one Froissart doublet, cube-root preset, n=25..40, 1200 digits", ok,
            "doublets per n: " + counts);
}

bool in_structures(const FroissartReport &r, Point z)
{
    for (const auto &d : r.doublets) {
        if ((d.family_a == 2 && d.a == z) || (d.family_b == 2 && d.b == z)) {
            return true;
        }
    }
    for (const auto &t : r.triplets) {
        if (t.p2 == z) {
            return true;
        }
    }
    return false;
}

void criterion_5()
{
    const Point pole(0.0, std::sqrt(3.0) * 1.6);
    bool ok = true;
    std::string detail;
    for (int n = 30; n <= 40; ++n) {
        const Computed c = compute("nik_1_6", n, default_digits(n));
        const FroissartReport r = froissart_report(c.pts, DetectorThresholds{}, n);
        std::vector<Point> near;
        for (const auto &z : c.pts[2]) {
            if (std::abs(z - pole) <= shadow_radius) {
                near.push_back(z);
            }
        }
        const bool flagged = near.size() == 1 && in_structures(r, near[0]);
        const bool good = near.size() == 1 && !flagged;
        ok = ok && good;
        detail += " " + std::to_string(n) + ":" + std::to_string(near.size()) + (flagged ? "F" : "");
        if (near.size() == 1 && n == 40) {
            detail += "(d=" + fmt(std::abs(near[0] - pole), "%.1e") + ")";
        }
    }
    verdict(5, "Nikishin pole shadow, one unflagged Q2 zero within 0.05 of the pole of f^2 (a = i*sqrt(3)*1.6), n=30..40",
            ok, "count per n:" + detail);
}

void criterion_6()
{
    const Computed a = compute("bus210a", 40, default_digits(40));
    double max_im = 0.0, lo = HUGE_VAL, hi = -HUGE_VAL;
    for (const auto &z : a.pts[1]) {
        max_im = std::max(max_im, std::abs(z.imag()));
        lo = std::min(lo, z.real());
        hi = std::max(hi, z.real());
    }
    const bool ok_a = a.pts[1].size() == 40 && max_im <= bus_im_tol && lo > 0.5 && hi < 2.0;

    const Computed b = compute("bus210b", 40, default_digits(40));
    const double dens = density_near(b.pts[1], Point(1.0, 0.0), bus_density_radius);
    const bool ok_b = dens <= bus_density_cap;
    verdict(6, "two-point poles: same sheet on [1/2,2], opposite sheets avoid z=1", ok_a && ok_b,
            "same sheet n=40: " + std::to_string(a.pts[1].size()) + " poles, max|Im| " + fmt(max_im) + ", Re in ["
                + fmt(lo, "%.5f") + ", " + fmt(hi, "%.5f") + "]; opposite sheets n=40: density within 0.1 of 1 = "
                + fmt(dens));
}

bool same_files(const fs::path &a, const fs::path &b, std::size_t &count)
{
    for (const auto &e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file() || e.path().string().find("/cache/") != std::string::npos) {
            continue;
        }
        const auto rel = fs::relative(e.path(), a);
        std::ifstream x(e.path(), std::ios::binary), y(b / rel, std::ios::binary);
        std::ostringstream sx, sy;
        sx << x.rdbuf();
        sy << y.rdbuf();
        if (!y || sx.str() != sy.str()) {
            return false;
        }
        ++count;
    }
    return count > 0;
}

void criterion_7()
{
    std::vector<std::string> parts;
    bool ok = true;
    auto sub = [&](const std::string &name, bool pass, const std::string &detail) {
        ok = ok && pass;
        parts.push_back(name + (pass ? " ok" : " FAILED") + " (" + detail + ")");
    };

    {
        const int n = 12;
        const Preset p = find_preset("ang1");
        auto scaled = p.specs;
        scaled[0].scale = "2-3i";
        const Computed base = compute(p.mode, p.specs, n, default_digits(n));
        const Computed sc = compute(p.mode, scaled, n, default_digits(n));
        double worst = -HUGE_VAL;
        for (int f = 0; f < 3; ++f) {
            worst = std::max({worst, worst_match(base.clouds[f].points, sc.clouds[f].points),
                              worst_match(sc.clouds[f].points, base.clouds[f].points)});
        }
        sub("scale covariance f1 -> (2-3i) f1", worst <= invariant_log10, "max log10 shift " + fmt(worst, "%.0f"));
    }
    {
        double worst = -HUGE_VAL;
        for (const char *name : {"ang1", "kalyagin_markov", "bus210a"}) {
            const Computed c = compute(name, 12, default_digits(12));
            for (const auto &cl : c.clouds) {
                std::vector<Complex> conj;
                for (const auto &z : cl.points) {
                    conj.push_back(z.conj());
                }
                worst = std::max(worst, worst_match(conj, cl.points));
            }
        }
        sub("conjugate symmetry", worst <= invariant_log10, "max log10 distance to conjugate " + fmt(worst, "%.0f"));
    }
    {
        FunctionSpec rat;
        rat.label = "rational";
        rat.w_power = 2;
        rat.factors = {{"1/2+i/3", Rational(-1)}, {"-2/3", Rational(-1)}};
        const long digits = 256;
        const Precision prec(digits);
        const std::vector<Complex> poles{parse_constant("1/2+i/3", prec), parse_constant("-2/3", prec)};
        bool good = true;
        std::string d;
        for (int n : {2, 5}) {
            const Computed c = compute(SystemKind::pade, {rat}, n, digits);
            const double hit = worst_match(poles, c.clouds[1].points);
            double rem = -HUGE_VAL;
            const auto rems = compute_remainders(c.sol, {cache.get(rat, series_length(SystemKind::pade, n), prec)});
            for (const auto &r : rems) {
                for (std::size_t t = 0; t < r.required; ++t) {
                    rem = std::max(rem, r.relative_log10(t));
                }
            }
            const double need = -static_cast<double>(digits) + rational_margin;
            good = good && hit <= need && rem <= need && (n == 2 ? c.sol.kernel_defect == 0 : c.sol.kernel_defect > 0);
            d += "n=" + std::to_string(n) + " poles to 10^" + fmt(hit, "%.0f") + ", remainder 10^"
                 + (std::isfinite(rem) ? fmt(rem, "%.0f") : std::string("-inf")) + ", defect "
                 + std::to_string(c.sol.kernel_defect) + (n == 2 ? ", " : "");
        }
        sub("rational exactness 1/((z-(1/2+i/3))(z+2/3))", good, d);
    }
    {
        std::size_t bad = 0;
        for (const auto *c : all_clouds) {
            if (c->size() != static_cast<std::size_t>(c->effective_degree)) {
                ++bad;
            }
        }
        sub("root count = effective degree", bad == 0,
            std::to_string(all_clouds.size() - bad) + "/" + std::to_string(all_clouds.size()) + " clouds");
    }
    {
        const fs::path base = fs::temp_directory_path() / "hplab_acceptance_rerun";
        fs::remove_all(base);
        auto cfg = config_from_json({{"preset", "nik1"}, {"degrees", "6..9"}, {"output", (base / "a").string()}});
        run(cfg);
        run(cfg);
        const std::string warm = (std::ostringstream() << std::ifstream(base / "a" / "manifest.json").rdbuf()).str();
        cfg.output = base / "b";
        cfg.workers = 3;
        run(cfg);
        std::size_t files = 0;
        const bool same = same_files(base / "a", base / "b", files);
        const std::string cold = (std::ostringstream() << std::ifstream(base / "b" / "manifest.json").rdbuf()).str();
        sub("byte-identical reruns", same && warm == cold, std::to_string(files) + " files compared, warm vs cold, 1 vs 3 workers");
    }
    std::string detail;
    for (const auto &p : parts) {
        detail += (detail.empty() ? "" : "; ") + p;
    }
    verdict(7, "invariant suite", ok, detail);
}

void criterion_8()
{
    auto union_cloud = [](const std::string &name) {
        const Computed c = compute(name, 40, default_digits(40));
        std::vector<Point> u;
        for (const auto &p : c.pts) {
            u.insert(u.end(), p.begin(), p.end());
        }
        return u;
    };
    const auto a = union_cloud("ang1");
    const auto b = union_cloud("nik1");
    const double h = hausdorff(a, b);
    // locate the point that realizes the distance
    Point worst;
    double wd = -1.0;
    for (const auto *pair : {&a, &b}) {
        const auto &other = pair == &a ? b : a;
        for (const auto &z : *pair) {
            const Point nz = nearest_to(other, z).point;
            if (std::abs(z - nz) > wd) {
                wd = std::abs(z - nz);
                worst = z;
            }
        }
    }
    verdict(8, "ang1 vs nik1 zero distributions at n=40", h < union_hausdorff,
            "Hausdorff distance of the three-cloud unions " + fmt(h) + " (tolerance " + fmt(union_hausdorff)
                + "), realized at " + fmt(worst.real(), "%.4f") + (std::signbit(worst.imag()) ? "-" : "+")
                + fmt(std::abs(worst.imag()), "%.4f") + "i",
            false);
}

} // namespace

int main(int argc, char **argv)
{
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        only.insert(std::atoi(argv[i]));
    }
    const std::vector<void (*)()> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                           criterion_5, criterion_6, criterion_7, criterion_8};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i]();
        } catch (const std::exception &e) {
            verdict(id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what(), id != 8);
        }
        std::cerr << "  criterion " << id << " took " << fmt(elapsed(t0), "%.1f") << " s" << std::endl;
    }
    std::cout << (hard_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << std::endl;
    return hard_failures == 0 ? 0 : 1;
}

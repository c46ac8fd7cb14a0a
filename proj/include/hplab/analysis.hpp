#ifndef HPLAB_ANALYSIS_HPP
#define HPLAB_ANALYSIS_HPP

// Observables on root clouds: spurious-zero structures, the Kalyagin
// pushing point, counting measures and the max-potential grid. Clouds are
// taken in double precision here; every threshold is scale-relative.

#include "roots.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace hplab
{

using Point = std::complex<double>;

inline std::vector<Point> to_points(const RootCloud &cloud)
{
    std::vector<Point> out;
    out.reserve(cloud.points.size());
    for (const auto &z : cloud.points) {
        out.emplace_back(z.re().to_double(), z.im().to_double());
    }
    return out;
}

/// Left end of the pushed support for the Markov pair [-a, 0], [0, 1].
inline double kalyagin_point(double a)
{
    if (!(a > 0.0 && a < 1.0)) {
        throw std::domain_error("kalyagin_point: a must lie in (0, 1)");
    }
    const double u = 1.0 - a;
    return u * u * u / (9.0 * (a * a - a + 1.0));
}

struct PushingGap
{
    double leftmost = 0.0;
    bool gap_verified = false;
};

/// Leftmost near-real point with Re in (lo, hi). The gap (lo, leftmost) is
/// verified when no point at all sits over it within a band of half-height
/// max(im_tol, leftmost - lo).
inline PushingGap pushing_gap(const std::vector<Point> &cloud, double lo, double hi, double im_tol)
{
    std::optional<double> left;
    for (const auto &z : cloud) {
        if (std::abs(z.imag()) <= im_tol && z.real() > lo && z.real() < hi) {
            left = left ? std::min(*left, z.real()) : z.real();
        }
    }
    if (!left) {
        throw std::invalid_argument("pushing_gap: no near-real point in the interval");
    }
    const double band = std::max(im_tol, *left - lo);
    const bool clear = std::none_of(cloud.begin(), cloud.end(), [&](const Point &z) {
        return z.real() > lo && z.real() < *left && std::abs(z.imag()) <= band;
    });
    return {*left, clear};
}

class DegenerateCloudError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct DetectorThresholds
{
    double isolation_factor = 3.0; ///< candidate: isolation > factor * d_med
    double pair_factor = 0.5;      ///< eps_pair = factor * pooled d_med
    double singlet_factor = 3.0;   ///< singlet: no other-family point within factor * d_med
    std::size_t min_points = 8;
};

inline void to_json(nlohmann::json &j, const DetectorThresholds &t)
{
    j = {{"isolation_factor", t.isolation_factor},
         {"pair_factor", t.pair_factor},
         {"singlet_factor", t.singlet_factor},
         {"min_points", t.min_points}};
}

inline void from_json(const nlohmann::json &j, DetectorThresholds &t)
{
    t = DetectorThresholds{};
    t.isolation_factor = j.value("isolation_factor", t.isolation_factor);
    t.pair_factor = j.value("pair_factor", t.pair_factor);
    t.singlet_factor = j.value("singlet_factor", t.singlet_factor);
    t.min_points = j.value("min_points", t.min_points);
}

namespace detail
{

inline double median(std::vector<double> v)
{
    if (v.empty()) {
        return 0.0;
    }
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Distance from each point to its nearest other point.
inline std::vector<double> nearest_neighbor(const std::vector<Point> &pts)
{
    std::vector<double> d(pts.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double r = std::abs(pts[i] - pts[j]);
            d[i] = std::min(d[i], r);
            d[j] = std::min(d[j], r);
        }
    }
    return d;
}

} // namespace detail

struct Candidate
{
    std::size_t index = 0;
    Point point;
    double isolation = 0.0;
};

struct CandidateSet
{
    std::vector<Candidate> candidates;
    std::vector<double> nn; ///< nearest-neighbour distance of every point
    double d_med = 0.0;
};

/// Points whose nearest own-family neighbour is farther than
/// isolation_factor times the family's median nearest-neighbour distance.
inline CandidateSet spurious_candidates(const std::vector<Point> &cloud, const DetectorThresholds &t = {})
{
    if (cloud.size() < t.min_points) {
        throw std::invalid_argument("spurious_candidates: need at least " + std::to_string(t.min_points)
                                    + " points, got " + std::to_string(cloud.size()));
    }
    CandidateSet out;
    out.nn = detail::nearest_neighbor(cloud);
    if (std::all_of(out.nn.begin(), out.nn.end(), [](double d) { return d == 0.0; })) {
        throw DegenerateCloudError("spurious_candidates: all points coincide");
    }
    out.d_med = detail::median(out.nn);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (out.nn[i] > t.isolation_factor * out.d_med) {
            out.candidates.push_back({i, cloud[i], out.nn[i]});
        }
    }
    return out;
}

struct Doublet
{
    int family_a = 0;
    int family_b = 1;
    Point a;
    Point b;
    double separation = 0.0;
};

struct Singlet
{
    int family = 0;
    Point point;
    double isolation = 0.0;
};

struct Triplet
{
    Point p0;
    Point p1;
    Point p2;
    double max_separation = 0.0;
};

struct FroissartReport
{
    int n = 0;
    std::vector<Doublet> doublets;
    std::vector<Singlet> singlets;
    std::vector<Triplet> triplets;
    nlohmann::json thresholds_used = nlohmann::json::object();
};

namespace detail
{

inline nlohmann::json point_json(const Point &p) { return nlohmann::json::array({p.real(), p.imag()}); }

// Per-family candidates; clouds below the minimum size contribute none.
struct FamilyScan
{
    std::vector<CandidateSet> sets;
    std::vector<bool> scanned;
    double d_pooled = 0.0;
};

inline FamilyScan scan_families(const std::vector<std::vector<Point>> &clouds, const DetectorThresholds &t)
{
    FamilyScan s;
    std::vector<double> pooled;
    for (const auto &c : clouds) {
        if (c.size() < t.min_points) {
            s.sets.emplace_back();
            s.scanned.push_back(false);
            continue;
        }
        s.sets.push_back(spurious_candidates(c, t));
        s.scanned.push_back(true);
        pooled.insert(pooled.end(), s.sets.back().nn.begin(), s.sets.back().nn.end());
    }
    s.d_pooled = median(pooled);
    return s;
}

inline nlohmann::json scan_json(const FamilyScan &s, const DetectorThresholds &t)
{
    nlohmann::json dm = nlohmann::json::array();
    for (std::size_t i = 0; i < s.sets.size(); ++i) {
        dm.push_back(s.scanned[i] ? nlohmann::json(s.sets[i].d_med) : nlohmann::json(nullptr));
    }
    return {{"detector", t}, {"d_med", dm}, {"d_med_pooled", s.d_pooled}, {"eps_pair", t.pair_factor * s.d_pooled}};
}

using Used = std::vector<std::vector<bool>>;

inline Used unused(const FamilyScan &s)
{
    Used u;
    for (const auto &set : s.sets) {
        u.emplace_back(set.candidates.size(), false);
    }
    return u;
}

// Greedy minimum-distance matching of unused candidates across family pairs.
inline std::vector<Doublet> match_pairs(const FamilyScan &s, Used &used, double eps,
                                        const std::vector<std::pair<int, int>> &family_pairs)
{
    struct Edge
    {
        double d;
        int fa, fb;
        std::size_t ia, ib;
    };
    std::vector<Edge> edges;
    for (auto [fa, fb] : family_pairs) {
        const auto &A = s.sets[static_cast<std::size_t>(fa)].candidates;
        const auto &B = s.sets[static_cast<std::size_t>(fb)].candidates;
        for (std::size_t i = 0; i < A.size(); ++i) {
            for (std::size_t j = 0; j < B.size(); ++j) {
                const double d = std::abs(A[i].point - B[j].point);
                if (d < eps) {
                    edges.push_back({d, fa, fb, i, j});
                }
            }
        }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge &x, const Edge &y) {
        return std::tie(x.d, x.fa, x.fb, x.ia, x.ib) < std::tie(y.d, y.fa, y.fb, y.ia, y.ib);
    });
    std::vector<Doublet> out;
    for (const auto &e : edges) {
        auto ua = used[static_cast<std::size_t>(e.fa)][e.ia];
        auto ub = used[static_cast<std::size_t>(e.fb)][e.ib];
        if (ua || ub) {
            continue;
        }
        used[static_cast<std::size_t>(e.fa)][e.ia] = true;
        used[static_cast<std::size_t>(e.fb)][e.ib] = true;
        out.push_back({e.fa, e.fb, s.sets[static_cast<std::size_t>(e.fa)].candidates[e.ia].point,
                       s.sets[static_cast<std::size_t>(e.fb)].candidates[e.ib].point, e.d});
    }
    return out;
}

inline std::vector<Triplet> match_triplets(const FamilyScan &s, Used &used, double eps)
{
    struct Tri
    {
        double d;
        std::size_t i0, i1, i2;
    };
    const auto &C0 = s.sets[0].candidates;
    const auto &C1 = s.sets[1].candidates;
    const auto &C2 = s.sets[2].candidates;
    std::vector<Tri> tris;
    for (std::size_t a = 0; a < C0.size(); ++a) {
        for (std::size_t b = 0; b < C1.size(); ++b) {
            const double dab = std::abs(C0[a].point - C1[b].point);
            if (dab >= eps) {
                continue;
            }
            for (std::size_t c = 0; c < C2.size(); ++c) {
                const double dac = std::abs(C0[a].point - C2[c].point);
                const double dbc = std::abs(C1[b].point - C2[c].point);
                if (dac < eps && dbc < eps) {
                    tris.push_back({std::max({dab, dac, dbc}), a, b, c});
                }
            }
        }
    }
    std::sort(tris.begin(), tris.end(),
              [](const Tri &x, const Tri &y) { return std::tie(x.d, x.i0, x.i1, x.i2) < std::tie(y.d, y.i0, y.i1, y.i2); });
    std::vector<Triplet> out;
    for (const auto &t : tris) {
        if (used[0][t.i0] || used[1][t.i1] || used[2][t.i2]) {
            continue;
        }
        used[0][t.i0] = used[1][t.i1] = used[2][t.i2] = true;
        out.push_back({C0[t.i0].point, C1[t.i1].point, C2[t.i2].point, t.d});
    }
    return out;
}

inline std::vector<Singlet> match_singlets(const std::vector<std::vector<Point>> &clouds, const FamilyScan &s,
                                           Used &used, const DetectorThresholds &t)
{
    std::vector<Singlet> out;
    for (std::size_t f = 0; f < s.sets.size(); ++f) {
        const double reach = t.singlet_factor * s.sets[f].d_med;
        for (std::size_t i = 0; i < s.sets[f].candidates.size(); ++i) {
            if (used[f][i]) {
                continue;
            }
            const Candidate &c = s.sets[f].candidates[i];
            bool lonely = true;
            for (std::size_t g = 0; g < clouds.size() && lonely; ++g) {
                if (g == f) {
                    continue;
                }
                for (const auto &z : clouds[g]) {
                    if (std::abs(z - c.point) <= reach) {
                        lonely = false;
                        break;
                    }
                }
            }
            if (lonely) {
                used[f][i] = true;
                out.push_back({static_cast<int>(f), c.point, c.isolation});
            }
        }
    }
    return out;
}

} // namespace detail

/// Zero–pole pairs of spurious candidates closer than eps_pair.
inline FroissartReport detect_doublets(const std::vector<Point> &zeros, const std::vector<Point> &poles,
                                       const DetectorThresholds &t = {}, int n = 0)
{
    const std::vector<std::vector<Point>> clouds{zeros, poles};
    const auto scan = detail::scan_families(clouds, t);
    auto used = detail::unused(scan);
    FroissartReport r;
    r.n = n;
    r.doublets = detail::match_pairs(scan, used, t.pair_factor * scan.d_pooled, {{0, 1}});
    r.thresholds_used = detail::scan_json(scan, t);
    return r;
}

/// One spurious candidate per family with all pairwise distances below eps_pair.
inline FroissartReport detect_triplets(const std::vector<Point> &c0, const std::vector<Point> &c1,
                                       const std::vector<Point> &c2, const DetectorThresholds &t = {}, int n = 0)
{
    const std::vector<std::vector<Point>> clouds{c0, c1, c2};
    const auto scan = detail::scan_families(clouds, t);
    auto used = detail::unused(scan);
    FroissartReport r;
    r.n = n;
    r.triplets = detail::match_triplets(scan, used, t.pair_factor * scan.d_pooled);
    r.thresholds_used = detail::scan_json(scan, t);
    return r;
}

/// Spurious candidates with no point of another family within singlet reach.
inline FroissartReport detect_singlets(const std::vector<std::vector<Point>> &clouds, const DetectorThresholds &t = {},
                                       int n = 0)
{
    const auto scan = detail::scan_families(clouds, t);
    auto used = detail::unused(scan);
    FroissartReport r;
    r.n = n;
    r.singlets = detail::match_singlets(clouds, scan, used, t);
    r.thresholds_used = detail::scan_json(scan, t);
    return r;
}

/// Full report for one solve. Structures are claimed in the order triplets
/// (three families only), cross-family doublets, singlets, so no candidate
/// appears twice.
inline FroissartReport froissart_report(const std::vector<std::vector<Point>> &clouds, const DetectorThresholds &t = {},
                                        int n = 0)
{
    if (clouds.size() != 2 && clouds.size() != 3) {
        throw std::invalid_argument("froissart_report: expected two or three clouds");
    }
    const auto scan = detail::scan_families(clouds, t);
    auto used = detail::unused(scan);
    const double eps = t.pair_factor * scan.d_pooled;
    FroissartReport r;
    r.n = n;
    if (clouds.size() == 3) {
        r.triplets = detail::match_triplets(scan, used, eps);
        r.doublets = detail::match_pairs(scan, used, eps, {{0, 1}, {0, 2}, {1, 2}});
    } else {
        r.doublets = detail::match_pairs(scan, used, eps, {{0, 1}});
    }
    r.singlets = detail::match_singlets(clouds, scan, used, t);
    r.thresholds_used = detail::scan_json(scan, t);
    return r;
}

inline nlohmann::json to_json(const FroissartReport &r)
{
    using detail::point_json;
    nlohmann::json d = nlohmann::json::array();
    for (const auto &x : r.doublets) {
        d.push_back({{"families", {x.family_a, x.family_b}},
                     {"a", point_json(x.a)},
                     {"b", point_json(x.b)},
                     {"separation", x.separation}});
    }
    nlohmann::json s = nlohmann::json::array();
    for (const auto &x : r.singlets) {
        s.push_back({{"family", x.family}, {"point", point_json(x.point)}, {"isolation", x.isolation}});
    }
    nlohmann::json t = nlohmann::json::array();
    for (const auto &x : r.triplets) {
        t.push_back({{"points", {point_json(x.p0), point_json(x.p1), point_json(x.p2)}},
                     {"max_separation", x.max_separation}});
    }
    return {{"n", r.n}, {"doublets", d}, {"singlets", s}, {"triplets", t}, {"thresholds_used", r.thresholds_used}};
}

struct Nearest
{
    Point point;
    double distance = 0.0;
};

inline Nearest nearest_to(const std::vector<Point> &cloud, Point target)
{
    if (cloud.empty()) {
        throw std::invalid_argument("nearest_to: empty cloud");
    }
    Nearest best{cloud.front(), std::abs(cloud.front() - target)};
    for (const auto &z : cloud) {
        const double d = std::abs(z - target);
        if (d < best.distance) {
            best = {z, d};
        }
    }
    return best;
}

/// Fraction of the cloud within `radius` of `target`.
inline double density_near(const std::vector<Point> &cloud, Point target, double radius)
{
    if (cloud.empty()) {
        throw std::invalid_argument("density_near: empty cloud");
    }
    const auto k = std::count_if(cloud.begin(), cloud.end(), [&](const Point &z) { return std::abs(z - target) <= radius; });
    return static_cast<double>(k) / static_cast<double>(cloud.size());
}

/// Zero-counting measure normalized by the degree label: each atom weighs 1/n.
struct CountingMeasure
{
    std::vector<Point> points;
    double weight = 1.0;

    CountingMeasure() = default;
    CountingMeasure(std::vector<Point> pts, int n) : points(std::move(pts)), weight(n > 0 ? 1.0 / n : 1.0) {}

    double mass() const { return weight * static_cast<double>(points.size()); }
};

/// Symmetric Hausdorff distance between two non-empty point sets.
inline double hausdorff(const std::vector<Point> &a, const std::vector<Point> &b)
{
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("hausdorff: empty set");
    }
    auto directed = [](const std::vector<Point> &x, const std::vector<Point> &y) {
        double h = 0.0;
        for (const auto &p : x) {
            double d = std::numeric_limits<double>::infinity();
            for (const auto &q : y) {
                d = std::min(d, std::abs(p - q));
            }
            h = std::max(h, d);
        }
        return h;
    };
    return std::max(directed(a, b), directed(b, a));
}

/// Symmetric Hausdorff distance between the supports plus the mass difference.
inline double measure_discrepancy(const CountingMeasure &m1, const CountingMeasure &m2)
{
    if (m1.points.empty() || m2.points.empty()) {
        throw std::invalid_argument("measure_discrepancy: empty measure");
    }
    return hausdorff(m1.points, m2.points) + std::abs(m1.mass() - m2.mass());
}

/// A polynomial as log|leading coefficient| and its roots.
struct FactoredPoly
{
    double log_abs_lead = 0.0;
    std::vector<Point> roots;

    double log_abs(Point z) const
    {
        double s = log_abs_lead;
        for (const auto &r : roots) {
            s += std::log(std::abs(z - r));
        }
        return s;
    }
};

/// Pairs the coefficients with their root cloud; the leading coefficient is
/// the one at the effective degree.
inline FactoredPoly factored(const std::vector<Complex> &coeffs, const RootCloud &cloud)
{
    FactoredPoly f;
    const auto deg = static_cast<std::size_t>(cloud.effective_degree);
    if (deg >= coeffs.size()) {
        throw std::invalid_argument("factored: effective degree exceeds coefficient count");
    }
    f.log_abs_lead = magnitude(coeffs[deg]).log10_abs() * std::log(10.0);
    f.roots = to_points(cloud);
    return f;
}

struct GridSpec
{
    double re_min = -2.0;
    double re_max = 2.0;
    double im_min = -2.0;
    double im_max = 2.0;
    std::size_t nx = 101;
    std::size_t ny = 101;
    double clearance = 1e-9;
};

class ClearanceError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct PotentialGrid
{
    GridSpec spec;
    std::vector<double> values; ///< row-major, y outer

    double x(std::size_t i) const
    {
        return spec.nx == 1 ? spec.re_min : spec.re_min + (spec.re_max - spec.re_min) * static_cast<double>(i) / static_cast<double>(spec.nx - 1);
    }
    double y(std::size_t j) const
    {
        return spec.ny == 1 ? spec.im_min : spec.im_min + (spec.im_max - spec.im_min) * static_cast<double>(j) / static_cast<double>(spec.ny - 1);
    }
    double at(std::size_t i, std::size_t j) const { return values[j * spec.nx + i]; }

    std::string to_csv() const
    {
        std::ostringstream out;
        out.precision(12);
        out << "x,y,value\n";
        for (std::size_t j = 0; j < spec.ny; ++j) {
            for (std::size_t i = 0; i < spec.nx; ++i) {
                out << x(i) << ',' << y(j) << ',' << at(i, j) << '\n';
            }
        }
        return out.str();
    }
};

/// U_n(z)/n = max_j log|Q_j(z)| / n over the given polynomials.
inline PotentialGrid potential_grid(const std::vector<FactoredPoly> &polys, int n, const GridSpec &g)
{
    if (polys.empty() || n <= 0) {
        throw std::invalid_argument("potential_grid: need polynomials and a positive degree");
    }
    if (g.nx == 0 || g.ny == 0 || !(g.re_max >= g.re_min) || !(g.im_max >= g.im_min)) {
        throw std::invalid_argument("potential_grid: bad grid");
    }
    PotentialGrid out{g, {}};
    out.values.reserve(g.nx * g.ny);
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const Point z(out.x(i), out.y(j));
            double best = -std::numeric_limits<double>::infinity();
            for (const auto &p : polys) {
                for (const auto &r : p.roots) {
                    if (std::abs(z - r) < g.clearance) {
                        std::ostringstream msg;
                        msg << "potential_grid: grid point (" << z.real() << ", " << z.imag()
                            << ") within clearance of a root";
                        throw ClearanceError(msg.str());
                    }
                }
                best = std::max(best, p.log_abs(z));
            }
            out.values.push_back(best / n);
        }
    }
    return out;
}

struct StepDiscrepancy
{
    int n_prev = 0;
    int n = 0;
    double value = 0.0;
};

/// Discrepancy between consecutive entries of a sweep, ordered by n.
inline std::vector<StepDiscrepancy> consecutive_discrepancy(std::map<int, CountingMeasure> sweep)
{
    std::vector<StepDiscrepancy> out;
    const CountingMeasure *prev = nullptr;
    int prev_n = 0;
    for (const auto &[n, m] : sweep) {
        if (prev && !prev->points.empty() && !m.points.empty()) {
            out.push_back({prev_n, n, measure_discrepancy(*prev, m)});
        }
        prev = &m;
        prev_n = n;
    }
    return out;
}

/// Least-squares slope of value against n.
inline double trend_slope(const std::vector<StepDiscrepancy> &steps)
{
    if (steps.size() < 2) {
        return 0.0;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto &s : steps) {
        const double x = s.n;
        sx += x;
        sy += s.value;
        sxx += x * x;
        sxy += x * s.value;
    }
    const double k = static_cast<double>(steps.size());
    const double den = k * sxx - sx * sx;
    return den == 0.0 ? 0.0 : (k * sxy - sx * sy) / den;
}

struct StructureTrack
{
    int n = 0;
    std::string kind;
    Point centroid;
    std::optional<double> moved; ///< distance to the nearest same-kind structure at the previous n
};

/// Stability across n: each structure's distance to the closest structure of
/// the same kind in the previous report.
inline std::vector<StructureTrack> structure_stability(std::map<int, FroissartReport> reports)
{
    auto centroids = [](const FroissartReport &r) {
        std::vector<std::pair<std::string, Point>> out;
        for (const auto &d : r.doublets) {
            out.emplace_back("doublet", 0.5 * (d.a + d.b));
        }
        for (const auto &t : r.triplets) {
            out.emplace_back("triplet", (t.p0 + t.p1 + t.p2) / 3.0);
        }
        for (const auto &s : r.singlets) {
            out.emplace_back("singlet", s.point);
        }
        return out;
    };
    std::vector<StructureTrack> out;
    std::vector<std::pair<std::string, Point>> prev;
    bool have_prev = false;
    for (const auto &[n, r] : reports) {
        const auto cur = centroids(r);
        for (const auto &[kind, c] : cur) {
            StructureTrack tr{n, kind, c, std::nullopt};
            if (have_prev) {
                for (const auto &[pk, pc] : prev) {
                    if (pk == kind) {
                        const double d = std::abs(pc - c);
                        tr.moved = tr.moved ? std::min(*tr.moved, d) : d;
                    }
                }
            }
            out.push_back(tr);
        }
        prev = cur;
        have_prev = true;
    }
    return out;
}

inline nlohmann::json to_json(const std::vector<StructureTrack> &tracks)
{
    nlohmann::json j = nlohmann::json::array();
    for (const auto &t : tracks) {
        j.push_back({{"n", t.n},
                     {"kind", t.kind},
                     {"centroid", detail::point_json(t.centroid)},
                     {"moved", t.moved ? nlohmann::json(*t.moved) : nlohmann::json(nullptr)}});
    }
    return j;
}

} // namespace hplab

#endif

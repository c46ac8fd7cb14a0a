#include <catch2/catch_amalgamated.hpp>

#include <hplab/analysis.hpp>

#include <numbers>

using namespace hplab;
using Catch::Approx;

namespace
{

std::vector<Point> segment(int count, double lo, double hi, double im = 0.0)
{
    std::vector<Point> pts;
    for (int k = 0; k < count; ++k) {
        pts.emplace_back(lo + (hi - lo) * k / (count - 1), im);
    }
    return pts;
}

std::vector<Point> circle(int count, double r = 1.0, Point c = 0.0)
{
    std::vector<Point> pts;
    for (int k = 0; k < count; ++k) {
        pts.push_back(c + std::polar(r, 2.0 * std::numbers::pi * k / count));
    }
    return pts;
}

} // namespace

TEST_CASE("kalyagin point")
{
    CHECK(kalyagin_point(1.0 / 3.0) == Approx(8.0 / 189.0).epsilon(1e-14));
    CHECK(kalyagin_point(0.5) == Approx(1.0 / 54.0).epsilon(1e-14));
    CHECK(kalyagin_point(1.0 - 1e-6) < 1e-18);
    CHECK(3.0 * kalyagin_point(1.0 / 3.0) == Approx(8.0 / 63.0).epsilon(1e-14));
    double prev = kalyagin_point(1e-6);
    for (int k = 1; k < 1000; ++k) {
        const double v = kalyagin_point(k / 1000.0);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(kalyagin_point(0.0), std::domain_error);
    CHECK_THROWS_AS(kalyagin_point(1.5), std::domain_error);
}

TEST_CASE("pushing gap")
{
    std::vector<Point> cloud{{0.2, 0}, {0.5, 0}, {1.0, 0}};
    PushingGap g = pushing_gap(cloud, 0.0, 3.0, 1e-5);
    CHECK(g.leftmost == 0.2);
    CHECK(g.gap_verified);

    cloud.emplace_back(0.1, 0.5);
    g = pushing_gap(cloud, 0.0, 3.0, 0.1);
    CHECK(g.leftmost == 0.2);

    cloud.emplace_back(0.15, 0.02);
    g = pushing_gap(cloud, 0.0, 3.0, 0.01);
    CHECK(g.leftmost == 0.2);
    CHECK_FALSE(g.gap_verified);

    CHECK_THROWS(pushing_gap(cloud, 5.0, 6.0, 0.1));
}

TEST_CASE("spurious candidates")
{
    auto pts = segment(20, -1.0, 1.0);
    pts.emplace_back(0.0, 3.0);
    CandidateSet c = spurious_candidates(pts);
    REQUIRE(c.candidates.size() == 1);
    CHECK(c.candidates[0].index == 20);

    CHECK(spurious_candidates(circle(16)).candidates.empty());
    CHECK_THROWS_AS(spurious_candidates(std::vector<Point>(10, Point(1, 1))), DegenerateCloudError);
    CHECK_THROWS(spurious_candidates(segment(5, 0, 1)));
}

TEST_CASE("doublets")
{
    auto zeros = segment(30, -1.0, 1.0, 0.01);
    auto poles = segment(30, -1.0, 1.0, -0.01);
    CHECK(detect_doublets(zeros, poles).doublets.empty());

    zeros.emplace_back(3.0, 0.001);
    poles.emplace_back(3.0, 0.0);
    FroissartReport r = detect_doublets(zeros, poles);
    REQUIRE(r.doublets.size() == 1);
    CHECK(r.doublets[0].separation == Approx(0.001));
    CHECK(r.thresholds_used.contains("eps_pair"));

    poles.back() = Point(3.0, 1.0);
    CHECK(detect_doublets(zeros, poles).doublets.empty());
}

TEST_CASE("triplets and singlets")
{
    auto base = circle(24);
    auto a = base, b = base, c = base;
    for (auto *cl : {&a, &b, &c}) {
        cl->emplace_back(4.0, 4.0);
    }
    FroissartReport t = detect_triplets(a, b, c);
    CHECK(t.triplets.size() == 1);

    FroissartReport full = froissart_report({a, b, c});
    CHECK(full.triplets.size() == 1);
    CHECK(full.doublets.empty());
    CHECK(full.singlets.empty());

    a.back() = Point(4.0, 4.0);
    b.back() = Point(-4.0, 4.0);
    c.back() = Point(0.0, -5.0);
    FroissartReport s = detect_singlets({a, b, c});
    CHECK(s.singlets.size() == 3);
    FroissartReport f2 = froissart_report({a, b, c});
    CHECK(f2.triplets.empty());
    CHECK(f2.doublets.empty());
    CHECK(f2.singlets.size() == 3);

    SECTION("cross-family doublet in a three-family report")
    {
        c.back() = Point(-4.0, 4.001);
        FroissartReport r = froissart_report({a, b, c});
        CHECK(r.doublets.size() == 1);
        CHECK(r.doublets[0].family_a == 1);
        CHECK(r.doublets[0].family_b == 2);
        CHECK(r.singlets.size() == 1);
        CHECK(r.singlets[0].family == 0);
    }
}

TEST_CASE("detectors are invariant under rigid motions")
{
    auto zeros = segment(30, -1.0, 1.0, 0.01);
    auto poles = segment(30, -1.0, 1.0, -0.01);
    zeros.emplace_back(3.0, 0.001);
    poles.emplace_back(3.0, 0.0);
    const Point shift(0.7, -2.0);
    const Point rot = std::polar(1.0, 0.9);
    auto move = [&](std::vector<Point> v) {
        for (auto &p : v) {
            p = p * rot + shift;
        }
        return v;
    };
    FroissartReport a = detect_doublets(zeros, poles);
    FroissartReport b = detect_doublets(move(zeros), move(poles));
    REQUIRE(a.doublets.size() == b.doublets.size());
    CHECK(a.doublets[0].separation == Approx(b.doublets[0].separation));
}

TEST_CASE("nearest and density")
{
    Nearest nn = nearest_to({{1, 0}, {0, 2}}, 0.0);
    CHECK(nn.point == Point(1, 0));
    CHECK(nn.distance == 1.0);
    CHECK(density_near(circle(100), 0.0, 2.0) == 1.0);
    CHECK(density_near(circle(100), 1.0, 0.01) == Approx(0.01));
    CHECK_THROWS(nearest_to({}, 0.0));
}

TEST_CASE("measure discrepancy")
{
    auto pts = circle(12);
    CHECK(measure_discrepancy({pts, 12}, {pts, 12}) == 0.0);
    auto moved = pts;
    for (auto &p : moved) {
        p += Point(0.01, 0.0);
    }
    CHECK(measure_discrepancy({pts, 12}, {moved, 12}) == Approx(0.01).epsilon(1e-9));
    CountingMeasure m(pts, 24);
    CHECK(m.mass() == Approx(0.5));
    CHECK(measure_discrepancy({pts, 12}, m) == Approx(0.5));
}

TEST_CASE("potential grid")
{
    FactoredPoly p{0.0, {Point(0.5, 0.0)}};
    FactoredPoly q{std::log(2.0), {Point(-0.5, 0.0)}};
    GridSpec g{-1.0, 1.0, 1.0, 1.0, 3, 1, 1e-6};
    PotentialGrid grid = potential_grid({p, q}, 1, g);
    REQUIRE(grid.values.size() == 3);
    const Point z(-1.0, 1.0);
    CHECK(grid.at(0, 0) == Approx(std::max(p.log_abs(z), q.log_abs(z))));
    CHECK(grid.to_csv().rfind("x,y,value\n", 0) == 0);

    GridSpec hit{-1.0, 1.0, 0.0, 0.0, 5, 1, 1e-6};
    CHECK_THROWS_AS(potential_grid({p, q}, 1, hit), ClearanceError);
}

TEST_CASE("sweep statistics")
{
    std::map<int, CountingMeasure> sweep;
    for (int n = 10; n < 15; ++n) {
        auto pts = circle(n);
        sweep.emplace(n, CountingMeasure(pts, n));
    }
    auto steps = consecutive_discrepancy(sweep);
    CHECK(steps.size() == 4);
    CHECK(steps[0].n_prev == 10);
    CHECK(trend_slope(steps) < 0.0);

    std::map<int, FroissartReport> reports;
    FroissartReport r1;
    r1.doublets.push_back({0, 1, Point(3, 0), Point(3, 0.002), 0.002});
    FroissartReport r2;
    r2.doublets.push_back({0, 1, Point(3.1, 0), Point(3.1, 0.002), 0.002});
    reports.emplace(5, r1);
    reports.emplace(6, r2);
    auto tracks = structure_stability(reports);
    REQUIRE(tracks.size() == 2);
    CHECK_FALSE(tracks[0].moved.has_value());
    CHECK(*tracks[1].moved == Approx(0.1));
}

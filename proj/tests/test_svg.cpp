#include <catch2/catch_amalgamated.hpp>

#include <hplab/svg.hpp>

using namespace hplab;

namespace
{

std::size_t count(const std::string &s, const std::string &what)
{
    std::size_t k = 0;
    for (auto pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos + 1)) {
        ++k;
    }
    return k;
}

PlotSpec unit_box()
{
    PlotSpec spec;
    spec.re_min = -1;
    spec.re_max = 1;
    spec.im_min = -1;
    spec.im_max = 1;
    return spec;
}

} // namespace

TEST_CASE("empty plot has axes only")
{
    PlotSpec spec = unit_box();
    CHECK_THROWS(scatter({}, spec));
    spec.allow_empty = true;
    const std::string doc = scatter({}, spec);
    CHECK(doc.find("<svg") != std::string::npos);
    CHECK(doc.find("class=\"axes\"") != std::string::npos);
    CHECK(count(doc, "class=\"pt\"") == 0);
    CHECK(doc.substr(doc.size() - 7) == "</svg>\n");
}

TEST_CASE("origin maps to the document centre")
{
    const std::string doc = scatter({{0, {Point(0, 0)}}}, unit_box());
    CHECK(doc.find("cx=\"300.000\" cy=\"300.000\"") != std::string::npos);
}

TEST_CASE("families are layered blue, red, black")
{
    const std::vector<PlotCloud> clouds{{2, {Point(0.1, 0)}}, {0, {Point(0.2, 0)}}, {1, {Point(0.3, 0)}}};
    const std::string doc = scatter(clouds, unit_box());
    const auto b = doc.find(family_color(0));
    const auto r = doc.find(family_color(1));
    const auto k = doc.find("fill=\"#000000\"");
    REQUIRE(b != std::string::npos);
    REQUIRE(r != std::string::npos);
    REQUIRE(k != std::string::npos);
    CHECK(b < r);
    CHECK(r < k);
}

TEST_CASE("points outside the viewport are clipped")
{
    const std::vector<PlotCloud> clouds{{0, {Point(0, 0), Point(2, 0), Point(0.5, -0.5), Point(0, -3)}}};
    CHECK(count(scatter(clouds, unit_box()), "class=\"pt\"") == 2);
}

TEST_CASE("annotations and determinism")
{
    PlotSpec spec = unit_box();
    spec.annotations = {{Point(0.5, 0.5), "a<1>"}};
    spec.title = "test";
    const std::vector<PlotCloud> clouds{{1, {Point(-0.3, 0.2)}}};
    const std::string a = scatter(clouds, spec);
    CHECK(a == scatter(clouds, spec));
    CHECK(a.find("a&lt;1&gt;") != std::string::npos);
    CHECK(count(a, "<line") >= 2);
}

TEST_CASE("invalid viewport")
{
    PlotSpec spec = unit_box();
    spec.re_max = spec.re_min;
    CHECK_THROWS_AS(scatter({{0, {}}}, spec), ViewportError);
}

TEST_CASE("file name pattern")
{
    CHECK(plot_filename("ang1", 40, {0, 1, 2}) == "ang1_40_012.svg");
    CHECK(plot_filename("markov_sqrt", 7, {1}) == "markov_sqrt_7_1.svg");
}

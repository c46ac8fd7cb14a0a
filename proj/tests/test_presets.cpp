#include <catch2/catch_amalgamated.hpp>

#include <hplab/presets.hpp>

#include <fstream>
#include <set>

using namespace hplab;

namespace
{

bool has_factor(const FunctionSpec &s, const std::string &a, Rational alpha)
{
    for (const auto &f : s.factors) {
        if (f.a == a && f.alpha == alpha) {
            return true;
        }
    }
    return false;
}

} // namespace

TEST_CASE("catalog names are unique and modes have matching arity")
{
    std::set<std::string> names;
    for (const auto &p : presets()) {
        INFO(p.name);
        CHECK(names.insert(p.name).second);
        CHECK(p.specs.size() == (p.mode == SystemKind::pade ? 1u : 2u));
        CHECK(p.re_max > p.re_min);
        CHECK(p.im_max > p.im_min);
    }
    for (const char *n : {"markov_sqrt", "kalyagin_markov", "ang1", "ang2", "ang3", "ang4", "ang5", "nik1", "nik2",
                          "nik_1_6", "nik_eps", "pade10", "pade103", "dumas", "bus210a", "bus210b", "bus205c"}) {
        INFO(n);
        CHECK(names.count(n) == 1);
    }
    CHECK_THROWS_AS(find_preset("nope"), std::invalid_argument);
}

TEST_CASE("ang1 is the square-root pair with branch points +-1 and +-2")
{
    const Preset p = find_preset("ang1");
    REQUIRE(p.mode == SystemKind::hermite_pade);
    CHECK(has_factor(p.specs[0], "1", Rational(1, 2)));
    CHECK(has_factor(p.specs[0], "-1", Rational(-1, 2)));
    CHECK(has_factor(p.specs[1], "2", Rational(1, 2)));
    CHECK(has_factor(p.specs[1], "-2", Rational(-1, 2)));
    CHECK(p.specs[0].w_power == 0);
}

TEST_CASE("nik_eps carries the perturbed branch point exactly")
{
    const Preset p = find_preset("nik_eps");
    bool found = false;
    for (const auto &f : p.specs[0].factors) {
        found = found || f.a == "0.1+i*sqrt(3)*1.6";
    }
    CHECK(found);
    const Precision prec(64);
    const Complex a = parse_constant("0.1+i*sqrt(3)*1.6", prec);
    CHECK(a.re().to_double() == Catch::Approx(0.1).epsilon(1e-15));
    CHECK(a.im().to_double() == Catch::Approx(std::sqrt(3.0) * 1.6).epsilon(1e-15));
    CHECK(p.specs[1].power == 2);
}

TEST_CASE("kalyagin_markov pairs supports [-1,0] and [0,3]")
{
    const Preset p = find_preset("kalyagin_markov");
    CHECK(has_factor(p.specs[0], "-1", Rational(1, 2)));
    CHECK(has_factor(p.specs[1], "3", Rational(1, 2)));
    CHECK(p.specs[0].w_power == 0);
    CHECK(p.specs[1].w_power == 0);
}

TEST_CASE("every preset's series builds and starts with the expected value")
{
    const Precision prec(64);
    for (const auto &p : presets()) {
        INFO(p.name);
        for (const auto &s : p.specs) {
            INFO(s.label);
            Series ser(prec, 0);
            REQUIRE_NOTHROW(ser = build_function_series(s, 12, prec));
            CHECK(ser.size() == 13);
            for (const auto &c : ser.coeffs) {
                CHECK(std::isfinite(magnitude(c).to_double()));
            }
        }
    }
}

TEST_CASE("dumas function is finite and nonzero at infinity")
{
    // sqrt(prod(z - e_j)) - z^2 + (sum e_j) z / 2 = O(1) at infinity; the
    // configured shift keeps the first coefficient and drops nothing nonzero.
    const Preset p = find_preset("dumas");
    const Precision prec(100);
    const Series s = build_function_series(p.specs[0], 8, prec);
    CHECK(!s[0].is_zero());
}

TEST_CASE("bus210 presets differ only in the sheet at infinity")
{
    const Preset a = find_preset("bus210a");
    const Preset b = find_preset("bus210b");
    FunctionSpec a0 = a.specs[0];
    a0.label = b.specs[0].label;
    CHECK(a0 == b.specs[0]);
    CHECK(a.specs[1].factors == b.specs[1].factors);
    CHECK(a.specs[1].scale == "1");
    CHECK(b.specs[1].scale == "-1");
    CHECK(a.specs[0].expansion_point == ExpansionPoint::zero);
    CHECK(a.specs[1].expansion_point == ExpansionPoint::infinity);
}

TEST_CASE("shipped data/presets.json matches the catalog")
{
    std::ifstream in(HPLAB_SOURCE_DIR "/data/presets.json");
    REQUIRE(in);
    CHECK(nlohmann::json::parse(in) == presets_json());
}

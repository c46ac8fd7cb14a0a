#ifndef HPLAB_PRESETS_HPP
#define HPLAB_PRESETS_HPP

// Named function configurations with exact branch points.

#include "linear.hpp"
#include "series.hpp"
#include "svg.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace hplab
{

struct Preset
{
    std::string name;
    SystemKind mode = SystemKind::hermite_pade;
    /// pade: {f}; hermite_pade: {f1, f2}; two_point: {f at 0, f at infinity}
    std::vector<FunctionSpec> specs;
    std::string formula;
    /// Degrees and digit count of the reference runs (defaults, not limits).
    std::vector<int> reference_degrees;
    long reference_digits = 0;
    double re_min = -3.0, re_max = 3.0, im_min = -3.0, im_max = 3.0;
    std::vector<Annotation> marks;
};

namespace detail
{

inline FunctionSpec at_infinity(std::string label, std::vector<BranchFactor> factors, int w_power = 0, int power = 1,
                                std::string scale = "1")
{
    FunctionSpec s;
    s.label = std::move(label);
    s.factors = std::move(factors);
    s.w_power = w_power;
    s.power = power;
    s.scale = std::move(scale);
    return s;
}

// ((z - a) / (z - b))^alpha at infinity.
inline std::vector<BranchFactor> ratio(const std::string &a, const std::string &b, Rational alpha)
{
    return {{a, alpha}, {b, Rational(-alpha.num, alpha.den)}};
}

inline std::vector<BranchFactor> concat(std::vector<BranchFactor> x, const std::vector<BranchFactor> &y)
{
    x.insert(x.end(), y.begin(), y.end());
    return x;
}

inline std::vector<int> range(int lo, int hi)
{
    std::vector<int> v;
    for (int n = lo; n <= hi; ++n) {
        v.push_back(n);
    }
    return v;
}

inline void set_view(Preset &p, double r0, double r1, double i0, double i1)
{
    p.re_min = r0;
    p.re_max = r1;
    p.im_min = i0;
    p.im_max = i1;
}

inline Preset nikishin(const std::string &name, const std::string &a, Point a_approx, std::vector<int> degrees,
                       long digits)
{
    Preset p;
    p.name = name;
    p.mode = SystemKind::hermite_pade;
    const std::vector<BranchFactor> f{{"1", Rational(1, 4)}, {"-1", Rational(1, 4)}, {a, Rational(-1, 2)}};
    p.specs = {at_infinity(name + ".f1", f), at_infinity(name + ".f2", f, 0, 2)};
    p.formula = "f = (z^2-1)^(1/4) (z-a)^(-1/2), f(inf) = 1, a = " + a + "; [1, f, f^2]";
    p.reference_degrees = std::move(degrees);
    p.reference_digits = digits;
    set_view(p, -3.0, 3.0, -2.0, 4.0);
    p.marks = {{{1, 0}, "1"}, {{-1, 0}, "-1"}, {a_approx, "a"}};
    return p;
}

struct Height
{
    std::string id;
    std::string h;
    double value;
    int degree;
};

inline const std::vector<Height> &ang3_heights()
{
    static const std::vector<Height> hs{{"1", "0.7", 0.7, 120},    {"2", "0.6", 0.6, 180},   {"8", "0.525", 0.525, 180},
                                        {"7", "0.5", 0.5, 180},    {"9", "0.45", 0.45, 180}, {"14", "0.4", 0.4, 180},
                                        {"11", "0.3", 0.3, 180},   {"13", "0.15", 0.15, 180}};
    return hs;
}

// Branch points -1 + ih, 1 + ih for f1 and -0.65 - ih, 0.65 - ih for f2.
inline Preset ang3_sweep(const Height &h, const std::string &form)
{
    const std::string u1 = "-1+" + h.h + "i", v1 = "1+" + h.h + "i";
    const std::string u2 = "-0.65-" + h.h + "i", v2 = "0.65-" + h.h + "i";
    Preset p;
    p.mode = SystemKind::hermite_pade;
    p.reference_degrees = {h.degree};
    p.reference_digits = 5000;
    if (form == "inverse") {
        p.name = "ang3_" + h.id;
        p.specs = {at_infinity(p.name + ".f1", {{u1, Rational(-1, 2)}, {v1, Rational(-1, 2)}}, 1),
                   at_infinity(p.name + ".f2", {{u2, Rational(-1, 2)}, {v2, Rational(-1, 2)}}, 1)};
        p.formula = "f1 = 1/sqrt((z-(" + u1 + "))(z-(" + v1 + "))), f2 = 1/sqrt((z-(" + u2 + "))(z-(" + v2 + ")))";
    } else if (form == "eq3") {
        p.name = "eq3_" + h.id;
        p.specs = {at_infinity(p.name + ".f1", {{u1, Rational(-1, 2)}, {v1, Rational(-1, 2)}}),
                   at_infinity(p.name + ".f2", {{u2, Rational(-1, 2)}, {v2, Rational(-1, 2)}})};
        p.formula = "f1 = z/sqrt((z-(" + u1 + "))(z-(" + v1 + "))), f2 = z/sqrt((z-(" + u2 + "))(z-(" + v2 + ")))";
        p.reference_degrees.clear();
        p.reference_digits = 0;
    } else {
        p.name = "ang3_" + h.id + "_zeta";
        p.specs = {at_infinity(p.name + ".f1", {{u1, Rational(1, 2)}, {v1, Rational(1, 2)}}),
                   at_infinity(p.name + ".f2", {{u2, Rational(1, 2)}, {v2, Rational(1, 2)}})};
        p.formula = "f1 = sqrt((1-(" + u1 + ")/z)(1-(" + v1 + ")/z)), f2 = sqrt((1-(" + u2 + ")/z)(1-(" + v2 + ")/z))";
    }
    set_view(p, -2.0, 2.0, -2.0, 2.0);
    p.marks = {{{-1, h.value}, ""}, {{1, h.value}, ""}, {{-0.65, -h.value}, ""}, {{0.65, -h.value}, ""}};
    return p;
}

inline Preset buslaev(const std::string &name, const std::string &sign_inf, long digits, int degree)
{
    Preset p;
    p.name = name;
    p.mode = SystemKind::two_point;
    FunctionSpec at0;
    at0.label = name + ".zero";
    at0.expansion_point = ExpansionPoint::zero;
    // sqrt((z - 1/2)/(z - 2)) = (1/2) (1 - 2z)^(1/2) (1 - z/2)^(-1/2) near 0
    at0.scale = "1/2";
    at0.factors = {{"2", Rational(1, 2)}, {"0.5", Rational(-1, 2)}};
    p.specs = {at0, at_infinity(name + ".inf", ratio("0.5", "2", Rational(1, 2)), 0, 1, sign_inf)};
    p.formula = "f = sqrt((z-a)/(z-b)), a = .5, b = 2; f_0 = sqrt((z-.5)/(z-2)), f_inf = "
                + std::string(sign_inf == "1" ? "" : "-") + "sqrt((z-.5)/(z-2))";
    p.reference_degrees = {degree};
    p.reference_digits = digits;
    set_view(p, -1.0, 3.0, -2.0, 2.0);
    p.marks = {{{0.5, 0}, "a"}, {{2, 0}, "b"}, {{1, 0}, "v"}};
    return p;
}

} // namespace detail

/// Every configuration used by the reference experiments.
inline std::vector<Preset> presets()
{
    using detail::at_infinity;
    using detail::ratio;
    using detail::set_view;
    std::vector<Preset> out;

    {
        Preset p;
        p.name = "markov_sqrt";
        p.mode = SystemKind::pade;
        p.specs = {at_infinity("markov_sqrt.f", {{"-1", Rational(1, 2)}})};
        p.formula = "f = sqrt((z+1)/z)";
        set_view(p, -1.5, 0.5, -1.0, 1.0);
        p.marks = {{{-1, 0}, "-1"}, {{0, 0}, "0"}};
        out.push_back(p);
    }
    {
        Preset p;
        p.name = "kalyagin_markov";
        p.mode = SystemKind::hermite_pade;
        p.specs = {at_infinity("kalyagin_markov.f1", {{"-1", Rational(1, 2)}}),
                   at_infinity("kalyagin_markov.f2", {{"3", Rational(1, 2)}})};
        p.formula = "f1 = sqrt((z+1)/z), f2 = sqrt((z-3)/z); supports [-1,0], [0,3]";
        p.reference_degrees = {90};
        p.reference_digits = 2000;
        set_view(p, -1.5, 3.5, -2.5, 2.5);
        p.marks = {{{-1, 0}, "-1"}, {{0, 0}, "0"}, {{3, 0}, "3"}, {{8.0 / 63.0, 0}, "a*"}};
        out.push_back(p);
    }

    auto angelesco = [&](const std::string &name, std::vector<BranchFactor> f1, std::vector<BranchFactor> f2,
                         const std::string &formula, std::vector<Annotation> marks) {
        Preset p;
        p.name = name;
        p.mode = SystemKind::hermite_pade;
        p.specs = {at_infinity(name + ".f1", std::move(f1)), at_infinity(name + ".f2", std::move(f2))};
        p.formula = formula;
        p.reference_degrees = {120};
        p.reference_digits = 4000;
        set_view(p, -3.0, 3.0, -3.0, 3.0);
        p.marks = std::move(marks);
        out.push_back(p);
    };
    const std::vector<Annotation> real4{{{1, 0}, "1"}, {{-1, 0}, "-1"}, {{2, 0}, "2"}, {{-2, 0}, "-2"}};
    const std::vector<Annotation> lifted{{{1, 0.4}, ""}, {{-1, 0.4}, ""}, {{2, 0}, "2"}, {{-2, 0}, "-2"}};
    const Rational half(1, 2), third(1, 3), two_thirds(2, 3), minus_third(-1, 3);

    angelesco("ang1", ratio("1", "-1", half), ratio("2", "-2", half), "f1 = sqrt((z-1)/(z+1)), f2 = sqrt((z-2)/(z+2))",
              real4);
    angelesco("ang2", ratio("1", "-1", third), ratio("2", "-2", third),
              "f1 = ((z-1)/(z+1))^(1/3), f2 = ((z-2)/(z+2))^(1/3)", real4);
    angelesco("ang3", ratio("1", "-1", half), ratio("2", "-2", third),
              "f1 = sqrt((z-1)/(z+1)), f2 = ((z-2)/(z+2))^(1/3)", real4);
    angelesco("ang4", ratio("1+0.4i", "-1+0.4i", third), ratio("2", "-2", third),
              "f1 = ((z-(1+0.4i))/(z-(-1+0.4i)))^(1/3), f2 = ((z-2)/(z+2))^(1/3)", lifted);
    angelesco("ang5", ratio("1+0.4i", "-1+0.4i", half), ratio("2", "-2", third),
              "f1 = sqrt((z-(1+0.4i))/(z-(-1+0.4i))), f2 = ((z-2)/(z+2))^(1/3)", lifted);
    angelesco("nik1", detail::concat(ratio("1", "-1", third), ratio("2", "-2", third)),
              detail::concat(ratio("1", "-1", two_thirds), ratio("2", "-2", third)),
              "f1 = ((z-1)/(z+1))^(1/3) ((z-2)/(z+2))^(1/3), f2 = ((z-1)/(z+1))^(2/3) ((z-2)/(z+2))^(1/3)", real4);
    angelesco("nik2", detail::concat(ratio("1", "-1", third), ratio("2", "-2", third)),
              detail::concat(ratio("1", "-1", two_thirds), ratio("2", "-2", minus_third)),
              "f1 = ((z-1)/(z+1))^(1/3) ((z-2)/(z+2))^(1/3), f2 = ((z-1)/(z+1))^(2/3) ((z-2)/(z+2))^(-1/3)", real4);

    const double s3 = 1.7320508075688772;
    {
        Preset p = detail::nikishin("nik_1_6", "i*sqrt(3)*1.6", {0, s3 * 1.6}, detail::range(61, 80), 2000);
        out.push_back(p);
        out.push_back(detail::nikishin("nik_1_6_plain", "1.6i", {0, 1.6}, detail::range(61, 80), 2000));
        out.push_back(detail::nikishin("nik_eps", "0.1+i*sqrt(3)*1.6", {0.1, s3 * 1.6}, detail::range(121, 130), 3000));
        out.push_back(detail::nikishin("nik_0_9", "i*sqrt(3)*0.9", {0, s3 * 0.9}, detail::range(166, 170), 4000));
    }

    {
        Preset p;
        p.name = "pade10";
        p.mode = SystemKind::pade;
        p.specs = {at_infinity("pade10.f",
                               {{"-1.2+0.8i", minus_third}, {"0.9+1.5i", minus_third}, {"0.5-1.2i", minus_third}}, 1)};
        p.formula = "f = 1/((z-(-1.2+0.8i))(z-(0.9+1.5i))(z-(0.5-1.2i)))^(1/3)";
        p.reference_degrees = detail::range(121, 132);
        p.reference_digits = 2500;
        set_view(p, -2.5, 2.5, -2.5, 2.5);
        p.marks = {{{-1.2, 0.8}, ""}, {{0.9, 1.5}, ""}, {{0.5, -1.2}, ""}};
        out.push_back(p);
    }
    {
        Preset p;
        p.name = "pade103";
        p.mode = SystemKind::pade;
        const Rational sixth(-1, 6);
        p.specs = {at_infinity("pade103.f",
                               {{"-(4.3+i)", sixth},
                                {"2+0.5i", sixth},
                                {"-(2+2i)", sixth},
                                {"-(1-3i)", sixth},
                                {"4+2i", sixth},
                                {"3+5i", sixth}},
                               1)};
        p.formula = "f = 1/((z+(4.3+i))(z-(2+.5i))(z+(2+2i))(z+(1-3i))(z-(4+2i))(z-(3+5i)))^(1/6)";
        p.reference_degrees = {103};
        p.reference_digits = 5000;
        set_view(p, -6.0, 6.0, -5.0, 7.0);
        p.marks = {{{-4.3, -1}, ""}, {{2, 0.5}, ""}, {{-2, -2}, ""}, {{-1, 3}, ""}, {{4, 2}, ""}, {{3, 5}, ""}};
        out.push_back(p);
    }
    {
        // Branch points in general position.
        Preset p;
        p.name = "dumas";
        p.mode = SystemKind::pade;
        FunctionSpec f = at_infinity("dumas.f",
                                     {{"-1.3+0.2i", half}, {"0.4+1.1i", half}, {"1.2-0.3i", half}, {"-0.2-1.0i", half}},
                                     -2);
        f.poly_offset = {"-1", "((-1.3+0.2i)+(0.4+1.1i)+(1.2-0.3i)+(-0.2-1.0i))/2"};
        p.specs = {f};
        p.formula = "d = sqrt((z-e1)(z-e2)(z-e3)(z-e4)) - z^2 + (e1+e2+e3+e4) z/2, e = -1.3+0.2i, 0.4+1.1i, 1.2-0.3i, -0.2-1.0i";
        set_view(p, -2.5, 2.5, -2.5, 2.5);
        p.marks = {{{-1.3, 0.2}, ""}, {{0.4, 1.1}, ""}, {{1.2, -0.3}, ""}, {{-0.2, -1.0}, ""}};
        out.push_back(p);
    }

    for (const auto &h : detail::ang3_heights()) {
        out.push_back(detail::ang3_sweep(h, "inverse"));
    }
    out.push_back(detail::ang3_sweep(detail::ang3_heights()[1], "zeta"));
    for (const auto &h : detail::ang3_heights()) {
        out.push_back(detail::ang3_sweep(h, "eq3"));
    }

    out.push_back(detail::buslaev("bus210a", "1", 3000, 90));
    out.push_back(detail::buslaev("bus210b", "-1", 4000, 120));
    {
        Preset p;
        p.name = "bus205c";
        p.mode = SystemKind::two_point;
        const std::string a1 = "(0.9-1.1i)", a2 = "(0.1+0.2i)";
        FunctionSpec at0;
        at0.label = "bus205c.zero";
        at0.expansion_point = ExpansionPoint::zero;
        at0.scale = "(" + a1 + "/" + a2 + ")^(1/4)";
        at0.factors = {{"1/" + a1, Rational(1, 4)}, {"1/" + a2, Rational(-1, 4)}};
        p.specs = {at0, at_infinity("bus205c.inf", ratio(a1, a2, Rational(1, 4)), 0, 1, "-1")};
        p.formula = "f = ((z-a1)/(z-a2))^(1/4), a1 = 0.9-1.1i, a2 = 0.1+0.2i; f_0 principal, f_inf = -f";
        p.reference_degrees = {120};
        p.reference_digits = 4000;
        set_view(p, -1.5, 2.5, -2.5, 1.5);
        p.marks = {{{0.9, -1.1}, "a1"}, {{0.1, 0.2}, "a2"}};
        out.push_back(p);
    }
    return out;
}

inline Preset find_preset(const std::string &name)
{
    for (auto &p : presets()) {
        if (p.name == name) {
            return p;
        }
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

inline void to_json(nlohmann::json &j, const Preset &p)
{
    nlohmann::json marks = nlohmann::json::array();
    for (const auto &m : p.marks) {
        marks.push_back({{"point", {m.point.real(), m.point.imag()}}, {"label", m.label}});
    }
    j = {{"name", p.name},
         {"mode", to_string(p.mode)},
         {"specs", p.specs},
         {"formula", p.formula},
         {"reference_degrees", p.reference_degrees},
         {"reference_digits", p.reference_digits},
         {"viewport", {p.re_min, p.re_max, p.im_min, p.im_max}},
         {"marks", marks}};
}

inline nlohmann::json presets_json()
{
    nlohmann::json j = nlohmann::json::array();
    for (const auto &p : presets()) {
        j.push_back(p);
    }
    return j;
}

} // namespace hplab

#endif

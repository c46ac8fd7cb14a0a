#ifndef HPLAB_SERIES_HPP
#define HPLAB_SERIES_HPP

// Truncated power series in the local coordinate w (w = 1/z at infinity,
// w = z at zero) and the branch-product function catalog built from them.

#include "exact.hpp"
#include "mp.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hplab
{

enum class ExpansionPoint { infinity, zero };

inline std::string to_string(ExpansionPoint p) { return p == ExpansionPoint::infinity ? "infinity" : "zero"; }

inline ExpansionPoint expansion_point_from_string(const std::string &s)
{
    if (s == "infinity") {
        return ExpansionPoint::infinity;
    }
    if (s == "zero") {
        return ExpansionPoint::zero;
    }
    throw ParseError("expansion_point must be 'infinity' or 'zero', got '" + s + "'");
}

/// One factor (1 - a w)^alpha, principal branch (value 1 at w = 0).
struct BranchFactor
{
    std::string a;
    Rational alpha;

    friend bool operator==(const BranchFactor &, const BranchFactor &) = default;
};

/// g(w) = ( w^m * ( scale * prod_j (1 - a_j w)^alpha_j + P(w) ) )^k
///
/// `scale` is an exact constant; -1 selects the opposite sheet of a
/// square-root type function, other values carry the normalization of
/// expansions at zero.
struct FunctionSpec
{
    ExpansionPoint expansion_point = ExpansionPoint::infinity;
    int w_power = 0;
    std::vector<BranchFactor> factors;
    std::vector<std::string> poly_offset;
    int power = 1;
    std::string scale = "1";
    std::string label;

    void validate() const
    {
        if (power < 1) {
            throw std::invalid_argument("spec '" + label + "': power must be positive");
        }
        if (scale.empty()) {
            throw std::invalid_argument("spec '" + label + "': empty scale");
        }
        for (const auto &f : factors) {
            if (f.a.empty()) {
                throw std::invalid_argument("spec '" + label + "': empty branch point");
            }
        }
    }

    friend bool operator==(const FunctionSpec &, const FunctionSpec &) = default;
};

inline void to_json(nlohmann::json &j, const FunctionSpec &s)
{
    nlohmann::json factors = nlohmann::json::array();
    for (const auto &f : s.factors) {
        factors.push_back({{"a", f.a}, {"alpha", f.alpha.to_string()}});
    }
    j = nlohmann::json{{"expansion_point", to_string(s.expansion_point)},
                       {"w_power", s.w_power},
                       {"factors", factors},
                       {"poly_offset", s.poly_offset},
                       {"power", s.power},
                       {"scale", s.scale},
                       {"label", s.label}};
}

inline void from_json(const nlohmann::json &j, FunctionSpec &s)
{
    s = FunctionSpec{};
    s.expansion_point = expansion_point_from_string(j.value("expansion_point", std::string("infinity")));
    s.w_power = j.value("w_power", 0);
    if (j.contains("factors")) {
        for (const auto &f : j.at("factors")) {
            const auto &alpha = f.at("alpha");
            s.factors.push_back({f.at("a").get<std::string>(),
                                 alpha.is_string() ? Rational::parse(alpha.get<std::string>())
                                                   : Rational(alpha.get<long>())});
        }
    }
    if (j.contains("poly_offset")) {
        for (const auto &c : j.at("poly_offset")) {
            s.poly_offset.push_back(c.is_string() ? c.get<std::string>() : c.dump());
        }
    }
    s.power = j.value("power", 1);
    s.scale = j.value("scale", std::string("1"));
    s.label = j.value("label", std::string());
    s.validate();
}

/// Canonical JSON text of a spec; keys are sorted, so equal specs give equal text.
inline std::string canonical_json(const FunctionSpec &s) { return nlohmann::json(s).dump(); }

/// Truncated series c_0 + c_1 w + ... + c_N w^N.
struct Series
{
    Precision precision;
    std::vector<Complex> coeffs;
    std::string origin = "derived";

    Series(Precision p, std::size_t length) : precision(p)
    {
        coeffs.reserve(length);
        for (std::size_t k = 0; k < length; ++k) {
            coeffs.emplace_back(p.bits());
        }
    }

    std::size_t size() const noexcept { return coeffs.size(); }
    const Complex &operator[](std::size_t k) const { return coeffs[k]; }
    Complex &operator[](std::size_t k) { return coeffs[k]; }

    /// First `length` coefficients.
    Series head(std::size_t length) const
    {
        if (length > size()) {
            throw std::out_of_range("Series::head: requested " + std::to_string(length) + " of "
                                    + std::to_string(size()) + " coefficients");
        }
        Series s(precision, 0);
        s.coeffs.assign(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(length));
        s.origin = origin;
        return s;
    }
};

class ShiftValuationError : public std::runtime_error
{
public:
    ShiftValuationError(std::size_t index, double log10_magnitude)
        : std::runtime_error("shift: coefficient " + std::to_string(index)
                             + " does not cancel (log10 |c| = " + std::to_string(log10_magnitude) + ")"),
          index(index), log10_magnitude(log10_magnitude)
    {
    }

    std::size_t index;
    double log10_magnitude;
};

/// Coefficients of (1 - a w)^alpha via c_{k+1} = c_k (-a) (alpha - k) / (k + 1).
inline Series binomial_factor_series(const Complex &a, const Rational &alpha, std::size_t N, const Precision &prec)
{
    Series s(prec, N + 1);
    s[0].set(1);
    const Complex minus_a = -Complex(prec.bits(), a);
    Complex t(prec.bits());
    for (std::size_t k = 0; k < N; ++k) {
        // (alpha - k) / (k + 1) = (num - k den) / (den (k + 1))
        const long numer = alpha.num - static_cast<long>(k) * alpha.den;
        const unsigned long denom = static_cast<unsigned long>(alpha.den) * (k + 1);
        mul_into(t, s[k], minus_a);
        for (Real *part : {&t.re(), &t.im()}) {
            mpfr_mul_si(part->get(), part->get(), numer, MPFR_RNDN);
            mpfr_div_ui(part->get(), part->get(), denom, MPFR_RNDN);
        }
        s[k + 1].assign(t);
    }
    return s;
}

inline Series binomial_factor_series(const std::string &a, const Rational &alpha, std::size_t N,
                                     const Precision &prec)
{
    return binomial_factor_series(parse_constant(a, prec), alpha, N, prec);
}

/// Truncated Cauchy product; both operands must share precision and length.
inline Series series_mul(const Series &x, const Series &y)
{
    require_same(x.precision, y.precision, "series_mul");
    if (x.size() != y.size()) {
        throw std::invalid_argument("series_mul: length mismatch");
    }
    const std::size_t n = x.size();
    Series r(x.precision, n);
    Real tmp(x.precision.bits());
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i].is_zero()) {
            continue;
        }
        for (std::size_t j = 0; i + j < n; ++j) {
            if (!y[j].is_zero()) {
                add_mul(r[i + j], x[i], y[j], tmp);
            }
        }
    }
    return r;
}

/// s^k by repeated squaring; k = 2 is exactly series_mul(s, s).
inline Series series_pow(const Series &s, int k)
{
    if (k < 1) {
        throw std::invalid_argument("series_pow: exponent must be positive");
    }
    Series base = s;
    bool have = false;
    Series acc(s.precision, 0);
    for (int e = k;; e >>= 1) {
        if (e & 1) {
            acc = have ? series_mul(acc, base) : base;
            have = true;
        }
        if (e <= 1) {
            break;
        }
        base = series_mul(base, base);
    }
    return acc;
}

inline Series series_add(const Series &x, const Series &y)
{
    require_same(x.precision, y.precision, "series_add");
    if (x.size() != y.size()) {
        throw std::invalid_argument("series_add: length mismatch");
    }
    Series r = x;
    for (std::size_t k = 0; k < r.size(); ++k) {
        r[k] += y[k];
    }
    return r;
}

/// Multiplies by w^m, keeping the length. For m < 0 the dropped leading
/// coefficients must vanish to 10^{-digits/2}.
inline Series series_shift(const Series &s, int m)
{
    const std::size_t n = s.size();
    Series r(s.precision, n);
    if (m >= 0) {
        for (std::size_t k = static_cast<std::size_t>(m); k < n; ++k) {
            r[k].assign(s[k - static_cast<std::size_t>(m)]);
        }
        return r;
    }
    const auto drop = static_cast<std::size_t>(-m);
    const double tol = -static_cast<double>(s.precision.digits()) / 2.0;
    for (std::size_t k = 0; k < drop && k < n; ++k) {
        const double mag = magnitude(s[k]).log10_abs();
        if (mag > tol) {
            throw ShiftValuationError(k, mag);
        }
    }
    for (std::size_t k = drop; k < n; ++k) {
        r[k - drop].assign(s[k]);
    }
    return r;
}

/// Series of the spec's function with N + 1 coefficients.
inline Series build_function_series(const FunctionSpec &spec, std::size_t N, const Precision &prec)
{
    spec.validate();
    const std::size_t extra = spec.w_power < 0 ? static_cast<std::size_t>(-spec.w_power) : 0;
    const std::size_t len = N + 1 + extra;

    Series bracket(prec, len);
    bracket[0].set(1);
    for (const auto &f : spec.factors) {
        bracket = series_mul(bracket, binomial_factor_series(f.a, f.alpha, len - 1, prec));
    }
    const Complex scale = parse_constant(spec.scale, prec);
    Complex tmp(prec.bits());
    for (auto &c : bracket.coeffs) {
        mul_into(tmp, c, scale);
        c.assign(tmp);
    }
    for (std::size_t k = 0; k < spec.poly_offset.size() && k < len; ++k) {
        bracket[k] += parse_constant(spec.poly_offset[k], prec);
    }

    Series shifted = series_shift(bracket, spec.w_power).head(N + 1);
    Series out = spec.power == 1 ? std::move(shifted) : series_pow(shifted, spec.power);
    out.origin = spec.label;
    return out;
}

} // namespace hplab

#endif

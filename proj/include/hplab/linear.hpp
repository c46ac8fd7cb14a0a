#ifndef HPLAB_LINEAR_HPP
#define HPLAB_LINEAR_HPP

// Order-condition systems for Padé, two-point Padé and type-I Hermite–Padé
// polynomials, and their kernel vectors.
//
// Every system is written for the form  sum_i Q_i(z) f_i(z)  with f_0 == 1.
// Columns are family-major, degree-minor: column (i, k) holds the unknown
// coefficient of z^k in Q_i. A row kills one power of z of the remainder.

#include "mp.hpp"
#include "series.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hplab
{

enum class SystemKind { pade, hermite_pade, two_point };

inline std::string to_string(SystemKind k)
{
    switch (k) {
        case SystemKind::pade:
            return "pade";
        case SystemKind::hermite_pade:
            return "hermite_pade";
        case SystemKind::two_point:
            return "two_point";
    }
    return "unknown";
}

inline SystemKind system_kind_from_string(const std::string &s)
{
    if (s == "pade") {
        return SystemKind::pade;
    }
    if (s == "hermite_pade") {
        return SystemKind::hermite_pade;
    }
    if (s == "two_point") {
        return SystemKind::two_point;
    }
    throw std::invalid_argument("unknown mode '" + s + "'");
}

/// Number of families (including f_0 == 1) for a system kind.
inline std::size_t family_count(SystemKind k) { return k == SystemKind::hermite_pade ? 3 : 2; }

struct RowLabel
{
    ExpansionPoint at = ExpansionPoint::infinity;
    int exponent = 0; ///< power of z killed by this row
};

struct ColumnLabel
{
    int family = 0;
    int degree = 0;
};

struct OrderSystem
{
    SystemKind kind;
    int n;
    Precision precision;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Complex> entries; ///< row-major
    std::vector<RowLabel> row_labels;
    std::vector<ColumnLabel> col_labels;

    OrderSystem(SystemKind kind, int n, Precision prec, std::size_t rows, std::size_t cols)
        : kind(kind), n(n), precision(prec), rows(rows), cols(cols)
    {
        entries.reserve(rows * cols);
        for (std::size_t k = 0; k < rows * cols; ++k) {
            entries.emplace_back(prec.bits());
        }
    }

    Complex &at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
    const Complex &at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
};

class SystemError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Raised when the computed kernel vector does not annihilate the matrix to
/// half the working precision.
class InsufficientPrecisionError : public std::runtime_error
{
public:
    InsufficientPrecisionError(double log10_residual, long digits, long suggested)
        : std::runtime_error("catastrophic residual: log10 residual = " + std::to_string(log10_residual) + " at "
                             + std::to_string(digits) + " digits; try --digits "
                             + std::to_string(suggested)),
          log10_residual(log10_residual), suggested_digits(suggested)
    {
    }

    double log10_residual;
    long suggested_digits;
};

namespace detail
{

inline void require_length(const Series &s, std::size_t need, const char *what)
{
    if (s.size() < need) {
        throw SystemError(std::string(what) + ": series has " + std::to_string(s.size()) + " coefficients, need "
                          + std::to_string(need));
    }
}

// Rows kill z^top, z^{top-1}, ... of sum_i Q_i f_i with f_i expanded at
// infinity; entry (j, (i, k)) = c^{(i)}_{k - j}.
inline void fill_infinity_rows(OrderSystem &sys, std::size_t first_row, int top, std::size_t count,
                               const std::vector<const Series *> &families)
{
    const int n = sys.n;
    for (std::size_t r = 0; r < count; ++r) {
        const int j = top - static_cast<int>(r);
        sys.row_labels[first_row + r] = {ExpansionPoint::infinity, j};
        for (std::size_t i = 0; i < families.size(); ++i) {
            for (int k = 0; k <= n; ++k) {
                const int m = k - j;
                Complex &e = sys.at(first_row + r, i * static_cast<std::size_t>(n + 1) + static_cast<std::size_t>(k));
                if (families[i] == nullptr) {
                    if (m == 0) {
                        e.set(1);
                    }
                } else if (m >= 0 && static_cast<std::size_t>(m) < families[i]->size()) {
                    e.assign((*families[i])[static_cast<std::size_t>(m)]);
                }
            }
        }
    }
}

inline void label_columns(OrderSystem &sys, std::size_t nfam)
{
    sys.col_labels.clear();
    for (std::size_t i = 0; i < nfam; ++i) {
        for (int k = 0; k <= sys.n; ++k) {
            sys.col_labels.push_back({static_cast<int>(i), k});
        }
    }
}

} // namespace detail

/// Hermite–Padé system for [1, f1, f2]: rows kill z^n ... z^{-(2n+1)}.
inline OrderSystem build_hp_system(const Series &f1, const Series &f2, int n)
{
    if (n < 0) {
        throw SystemError("build_hp_system: negative degree");
    }
    require_same(f1.precision, f2.precision, "build_hp_system");
    const auto rows = static_cast<std::size_t>(3 * n + 2);
    detail::require_length(f1, rows, "build_hp_system");
    detail::require_length(f2, rows, "build_hp_system");
    OrderSystem sys(SystemKind::hermite_pade, n, f1.precision, rows, static_cast<std::size_t>(3 * (n + 1)));
    sys.row_labels.resize(rows);
    detail::label_columns(sys, 3);
    detail::fill_infinity_rows(sys, 0, n, rows, {nullptr, &f1, &f2});
    return sys;
}

/// Padé system for [1, f]: rows kill z^n ... z^{-n}.
inline OrderSystem build_pade_system(const Series &f, int n)
{
    if (n < 0) {
        throw SystemError("build_pade_system: negative degree");
    }
    const auto rows = static_cast<std::size_t>(2 * n + 1);
    detail::require_length(f, rows, "build_pade_system");
    OrderSystem sys(SystemKind::pade, n, f.precision, rows, static_cast<std::size_t>(2 * (n + 1)));
    sys.row_labels.resize(rows);
    detail::label_columns(sys, 2);
    detail::fill_infinity_rows(sys, 0, n, rows, {nullptr, &f});
    return sys;
}

/// Two-point Padé system for [1, f]: n + 1 conditions at z = 0 (powers
/// z^0..z^n vanish) and n at z = infinity (powers z^n..z^1 vanish).
inline OrderSystem build_two_point_system(const Series &at_zero, const Series &at_infinity, int n)
{
    if (n < 0) {
        throw SystemError("build_two_point_system: negative degree");
    }
    require_same(at_zero.precision, at_infinity.precision, "build_two_point_system");
    detail::require_length(at_zero, static_cast<std::size_t>(n + 1), "build_two_point_system");
    detail::require_length(at_infinity, static_cast<std::size_t>(n + 1), "build_two_point_system");
    const auto rows = static_cast<std::size_t>(2 * n + 1);
    OrderSystem sys(SystemKind::two_point, n, at_zero.precision, rows, static_cast<std::size_t>(2 * (n + 1)));
    sys.row_labels.resize(rows);
    detail::label_columns(sys, 2);
    const auto stride = static_cast<std::size_t>(n + 1);
    for (int j = 0; j <= n; ++j) {
        const auto r = static_cast<std::size_t>(j);
        sys.row_labels[r] = {ExpansionPoint::zero, j};
        sys.at(r, static_cast<std::size_t>(j)).set(1);
        for (int k = 0; k <= j; ++k) {
            sys.at(r, stride + static_cast<std::size_t>(k)).assign(at_zero[static_cast<std::size_t>(j - k)]);
        }
    }
    detail::fill_infinity_rows(sys, stride, n, static_cast<std::size_t>(n), {nullptr, &at_infinity});
    return sys;
}

struct HpSolution
{
    SystemKind kind;
    int n;
    Precision precision;
    /// Ascending coefficients of Q_0, Q_1[, Q_2], each of length n + 1.
    std::vector<std::vector<Complex>> polys;
    std::string normalization = "max_coefficient_unit";
    int kernel_defect = 0;
    std::size_t rank = 0;
    Real residual_norm;
};

/// Kernel vector by Gaussian elimination with partial pivoting.
///
/// A column is pivotless when its best candidate is at most 10^{-digits/2}
/// times the original scale of that row. The last pivotless column is set to
/// one, the others to zero, and the vector is scaled so that its largest
/// coefficient equals one.
inline HpSolution kernel_solve(const OrderSystem &sys)
{
    const std::size_t rows = sys.rows;
    const std::size_t cols = sys.cols;
    const mpfr_prec_t bits = sys.precision.bits();
    const long digits = sys.precision.digits();
    const Real eps = pow10(magnitude_bits, -(digits / 2));

    std::vector<Real> row_scale(rows, Real(magnitude_bits));
    bool all_zero = true;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const Complex &e = sys.at(r, c);
            if (!e.is_zero()) {
                all_zero = false;
                row_scale[r] = max(row_scale[r], magnitude(e));
            }
        }
    }
    if (all_zero || cols == 0) {
        throw SystemError("kernel_solve: zero matrix");
    }

    OrderSystem work = sys;
    std::vector<std::size_t> perm(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        perm[r] = r;
    }
    std::vector<std::size_t> pivot_cols;
    std::vector<bool> is_pivot(cols, false);
    Complex l(bits);
    Real tmp(bits);
    std::size_t prow = 0;
    for (std::size_t c = 0; c < cols && prow < rows; ++c) {
        std::size_t best = rows;
        Real best_mag(magnitude_bits);
        for (std::size_t r = prow; r < rows; ++r) {
            const Complex &e = work.at(r, c);
            if (e.is_zero()) {
                continue;
            }
            Real m = magnitude(e);
            if (best == rows || m > best_mag) {
                best = r;
                best_mag = std::move(m);
            }
        }
        if (best == rows || !(best_mag > eps * row_scale[perm[best]])) {
            continue;
        }
        if (best != prow) {
            for (std::size_t k = 0; k < cols; ++k) {
                std::swap(work.at(best, k), work.at(prow, k));
            }
            std::swap(perm[best], perm[prow]);
        }
        const Complex &piv = work.at(prow, c);
        for (std::size_t r = prow + 1; r < rows; ++r) {
            Complex &head = work.at(r, c);
            if (head.is_zero()) {
                continue;
            }
            l = head / piv;
            for (std::size_t k = c + 1; k < cols; ++k) {
                const Complex &src = work.at(prow, k);
                if (!src.is_zero()) {
                    sub_mul(work.at(r, k), l, src, tmp);
                }
            }
            head.set_zero();
        }
        pivot_cols.push_back(c);
        is_pivot[c] = true;
        ++prow;
    }

    const std::size_t rank = pivot_cols.size();
    std::size_t free_col = cols;
    for (std::size_t c = cols; c-- > 0;) {
        if (!is_pivot[c]) {
            free_col = c;
            break;
        }
    }
    if (free_col == cols) {
        throw SystemError("kernel_solve: matrix has full column rank; no kernel");
    }

    std::vector<Complex> x;
    x.reserve(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        x.emplace_back(bits);
    }
    x[free_col].set(1);
    for (std::size_t p = rank; p-- > 0;) {
        const std::size_t pc = pivot_cols[p];
        Complex acc(bits);
        for (std::size_t k = pc + 1; k < cols; ++k) {
            if (!x[k].is_zero() && !work.at(p, k).is_zero()) {
                sub_mul(acc, work.at(p, k), x[k], tmp);
            }
        }
        acc /= work.at(p, pc);
        x[pc] = std::move(acc);
    }

    std::size_t imax = 0;
    Real vmax(magnitude_bits);
    for (std::size_t c = 0; c < cols; ++c) {
        Real m = magnitude(x[c]);
        if (m > vmax) {
            vmax = std::move(m);
            imax = c;
        }
    }
    const Complex top = x[imax];
    for (auto &v : x) {
        v /= top;
    }
    x[imax].set(1);

    // ||M x||_inf / (||M||_inf ||x||_inf), with ||x||_inf = 1.
    Real mnorm(magnitude_bits);
    Real rnorm(magnitude_bits);
    Complex acc(bits);
    for (std::size_t r = 0; r < rows; ++r) {
        acc.set_zero();
        Real rowsum(magnitude_bits);
        for (std::size_t c = 0; c < cols; ++c) {
            const Complex &e = sys.at(r, c);
            if (!e.is_zero()) {
                add_mul(acc, e, x[c], tmp);
                rowsum += magnitude(e);
            }
        }
        mnorm = max(mnorm, rowsum);
        rnorm = max(rnorm, magnitude(acc));
    }
    Real residual = rnorm / mnorm;
    const double lr = residual.log10_abs();
    if (lr > -static_cast<double>(digits) / 2.0) {
        const double lost = lr + static_cast<double>(digits);
        const long suggested = digits + 2 * static_cast<long>(std::ceil(lost)) + 32;
        throw InsufficientPrecisionError(lr, digits, suggested);
    }

    HpSolution sol{sys.kind, sys.n, sys.precision, {}, "max_coefficient_unit",
                   static_cast<int>(cols - 1 - rank), rank, std::move(residual)};
    const auto stride = static_cast<std::size_t>(sys.n + 1);
    const std::size_t nfam = cols / stride;
    for (std::size_t i = 0; i < nfam; ++i) {
        sol.polys.emplace_back(x.begin() + static_cast<std::ptrdiff_t>(i * stride),
                               x.begin() + static_cast<std::ptrdiff_t>((i + 1) * stride));
    }
    return sol;
}

/// Remainder of sum_i Q_i f_i at one expansion point.
///
/// At infinity, coefficient t is the coefficient of z^{n-t}; at zero it is
/// the coefficient of z^t. `scale[t]` is sum |q||c| over the contributing
/// terms, the natural size of coefficient t.
struct Remainder
{
    ExpansionPoint at = ExpansionPoint::infinity;
    Series coeffs;
    std::vector<Real> scale;
    std::size_t required = 0; ///< leading coefficients that must vanish

    /// log10(|r_t| / scale_t), -inf when r_t is exactly zero.
    double relative_log10(std::size_t t) const
    {
        if (coeffs[t].is_zero()) {
            return -HUGE_VAL;
        }
        const double s = scale[t].is_zero() ? 0.0 : scale[t].log10_abs();
        return magnitude(coeffs[t]).log10_abs() - s;
    }
};

class OrderOfContactError : public std::runtime_error
{
public:
    OrderOfContactError(ExpansionPoint at, std::size_t index, double rel)
        : std::runtime_error("order of contact fails at " + to_string(at) + ": remainder coefficient "
                             + std::to_string(index) + " survives (log10 relative size "
                             + std::to_string(rel) + ")"),
          at(at), index(index), log10_relative(rel)
    {
    }

    ExpansionPoint at;
    std::size_t index;
    double log10_relative;
};

namespace detail
{

inline std::vector<Complex> lift(const std::vector<Complex> &p, mpfr_prec_t bits)
{
    std::vector<Complex> out;
    out.reserve(p.size());
    for (const auto &c : p) {
        out.emplace_back(bits, c);
    }
    return out;
}

// Remainder at infinity for families [1, series...]: coefficient of z^j for
// j = n, n - 1, ..., n - L + 1, L = shortest series length.
inline Remainder remainder_at_infinity(const std::vector<std::vector<Complex>> &polys,
                                       const std::vector<const Series *> &series, int n, std::size_t required)
{
    const Precision prec = series.front()->precision;
    std::size_t len = series.front()->size();
    for (const auto *s : series) {
        require_same(prec, s->precision, "residual_series");
        len = std::min(len, s->size());
    }
    const mpfr_prec_t bits = prec.bits();
    Remainder rem{ExpansionPoint::infinity, Series(prec, len), std::vector<Real>(len, Real(magnitude_bits)), required};
    Real tmp(bits);
    for (std::size_t t = 0; t < len; ++t) {
        const int j = n - static_cast<int>(t);
        if (j >= 0) {
            const Complex &q0 = polys[0][static_cast<std::size_t>(j)];
            rem.coeffs[t] += q0;
            rem.scale[t] += magnitude(q0);
        }
        for (std::size_t i = 0; i < series.size(); ++i) {
            for (int k = std::max(0, j); k <= n; ++k) {
                const auto m = static_cast<std::size_t>(k - j);
                const Complex &q = polys[i + 1][static_cast<std::size_t>(k)];
                const Complex &c = (*series[i])[m];
                if (q.is_zero() || c.is_zero()) {
                    continue;
                }
                add_mul(rem.coeffs[t], q, c, tmp);
                rem.scale[t] += magnitude(q) * magnitude(c);
            }
        }
    }
    return rem;
}

inline Remainder remainder_at_zero(const std::vector<std::vector<Complex>> &polys, const Series &f, int n,
                                   std::size_t required)
{
    const std::size_t len = f.size();
    Remainder rem{ExpansionPoint::zero, Series(f.precision, len), std::vector<Real>(len, Real(magnitude_bits)),
                  required};
    Real tmp(f.precision.bits());
    for (std::size_t t = 0; t < len; ++t) {
        if (t <= static_cast<std::size_t>(n)) {
            rem.coeffs[t] += polys[0][t];
            rem.scale[t] += magnitude(polys[0][t]);
        }
        for (std::size_t k = 0; k <= std::min<std::size_t>(t, static_cast<std::size_t>(n)); ++k) {
            const Complex &q = polys[1][k];
            const Complex &c = f[t - k];
            if (q.is_zero() || c.is_zero()) {
                continue;
            }
            add_mul(rem.coeffs[t], q, c, tmp);
            rem.scale[t] += magnitude(q) * magnitude(c);
        }
    }
    return rem;
}

} // namespace detail

/// Remainders of a solution against independently computed series.
///
/// `series` lists f_1[, f_2] for Padé / Hermite–Padé (expanded at infinity)
/// or {f at zero, f at infinity} for two-point systems. The series should be
/// computed at a higher precision than the solve (normally doubled); the
/// solution's coefficients are lifted to that precision exactly.
inline std::vector<Remainder> compute_remainders(const HpSolution &sol, const std::vector<Series> &series)
{
    if (series.empty()) {
        throw std::invalid_argument("compute_remainders: no series");
    }
    const mpfr_prec_t bits = series.front().precision.bits();
    std::vector<std::vector<Complex>> polys;
    for (const auto &p : sol.polys) {
        polys.push_back(detail::lift(p, bits));
    }
    const int n = sol.n;
    std::vector<Remainder> out;
    switch (sol.kind) {
        case SystemKind::hermite_pade: {
            if (series.size() != 2) {
                throw std::invalid_argument("compute_remainders: Hermite-Padé needs two series");
            }
            const auto need = static_cast<std::size_t>(3 * n + 2);
            detail::require_length(series[0], need, "residual_series");
            out.push_back(detail::remainder_at_infinity(polys, {&series[0], &series[1]}, n, need));
            break;
        }
        case SystemKind::pade: {
            if (series.size() != 1) {
                throw std::invalid_argument("compute_remainders: Padé needs one series");
            }
            const auto need = static_cast<std::size_t>(2 * n + 1);
            detail::require_length(series[0], need, "residual_series");
            out.push_back(detail::remainder_at_infinity(polys, {&series[0]}, n, need));
            break;
        }
        case SystemKind::two_point: {
            if (series.size() != 2) {
                throw std::invalid_argument("compute_remainders: two-point needs series at zero and infinity");
            }
            detail::require_length(series[0], static_cast<std::size_t>(n + 1), "residual_series");
            detail::require_length(series[1], static_cast<std::size_t>(n + 1), "residual_series");
            out.push_back(detail::remainder_at_zero(polys, series[0], n, static_cast<std::size_t>(n + 1)));
            out.push_back(detail::remainder_at_infinity(polys, {&series[1]}, n, static_cast<std::size_t>(n)));
            break;
        }
    }
    return out;
}

/// Verifies the order of contact: the required leading remainder
/// coefficients are at most 10^{-digits/2} relative to their natural size,
/// with digits the solve precision. Throws OrderOfContactError otherwise.
inline std::vector<Remainder> residual_series(const HpSolution &sol, const std::vector<Series> &series)
{
    std::vector<Remainder> rems = compute_remainders(sol, series);
    const double tol = -static_cast<double>(sol.precision.digits()) / 2.0;
    for (const auto &r : rems) {
        for (std::size_t t = 0; t < r.required; ++t) {
            const double rel = r.relative_log10(t);
            if (rel > tol) {
                throw OrderOfContactError(r.at, t, rel);
            }
        }
    }
    return rems;
}

inline nlohmann::json to_json(const HpSolution &sol)
{
    const long digits = sol.precision.digits();
    nlohmann::json fams = nlohmann::json::array();
    for (const auto &p : sol.polys) {
        nlohmann::json coeffs = nlohmann::json::array();
        for (const auto &c : p) {
            auto [re, im] = to_strings(c, digits);
            coeffs.push_back({re, im});
        }
        fams.push_back(coeffs);
    }
    return {{"kind", to_string(sol.kind)},
            {"degree", sol.n},
            {"digits", digits},
            {"families", fams},
            {"normalization", sol.normalization},
            {"residual_norm", sol.residual_norm.to_string(6)},
            {"kernel_defect", sol.kernel_defect},
            {"rank", sol.rank}};
}

inline HpSolution solution_from_json(const nlohmann::json &j)
{
    const Precision prec(j.at("digits").get<long>());
    HpSolution sol{system_kind_from_string(j.at("kind").get<std::string>()),
                   j.at("degree").get<int>(),
                   prec,
                   {},
                   j.value("normalization", std::string("max_coefficient_unit")),
                   j.value("kernel_defect", 0),
                   j.value("rank", std::size_t{0}),
                   Real::from_string(magnitude_bits, j.value("residual_norm", std::string("0")))};
    for (const auto &fam : j.at("families")) {
        std::vector<Complex> p;
        for (const auto &c : fam) {
            p.emplace_back(Real::from_string(prec.bits(), c.at(0).get<std::string>()),
                           Real::from_string(prec.bits(), c.at(1).get<std::string>()));
        }
        sol.polys.push_back(std::move(p));
    }
    return sol;
}

} // namespace hplab

#endif

#ifndef HPLAB_ROOTS_HPP
#define HPLAB_ROOTS_HPP

// All roots of a polynomial with arbitrary-precision complex coefficients,
// by Aberth–Ehrlich simultaneous iteration, plus residual certification.

#include "mp.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hplab
{

struct RootCloud
{
    int family = 0;
    int n = 0;
    long digits = Precision::min_digits;
    std::vector<Complex> points;
    /// |p(root)| / sum_k |a_k| |root|^k, evaluated at doubled precision.
    std::vector<Real> residuals;
    std::vector<bool> certified;
    int effective_degree = 0;
    int zero_roots = 0; ///< roots at z = 0 recorded by trailing deflation
    bool converged = true;
    std::size_t iterations = 0;

    std::size_t size() const noexcept { return points.size(); }

    bool all_certified() const
    {
        return std::all_of(certified.begin(), certified.end(), [](bool b) { return b; });
    }
};

/// Default certification threshold exponent: residual <= 10^{-digits/4}.
inline double certification_log10(long digits) { return -static_cast<double>(digits) / 4.0; }

namespace detail
{

struct Deflation
{
    std::size_t low = 0;  ///< first kept index (number of roots at zero)
    std::size_t high = 0; ///< last kept index (effective degree)
};

// Leading and trailing coefficients at most 10^{-digits/2} max|a| are treated
// as zero.
inline Deflation deflate(std::span<const Complex> a, long digits)
{
    Real amax(magnitude_bits);
    for (const auto &c : a) {
        amax = max(amax, magnitude(c));
    }
    if (amax.is_zero()) {
        throw std::invalid_argument("find_roots: all coefficients are zero");
    }
    const Real thresh = amax * pow10(magnitude_bits, -(digits / 2));
    auto small = [&](const Complex &c) { return !(magnitude(c) > thresh); };
    Deflation d;
    d.high = a.size() - 1;
    while (small(a[d.high])) {
        --d.high;
    }
    while (d.low < d.high && small(a[d.low])) {
        ++d.low;
    }
    return d;
}

// p(z) and p'(z) by Horner; coefficients ascending.
inline void horner2(const std::vector<Complex> &a, const Complex &z, Complex &p, Complex &dp, Complex &t)
{
    const std::size_t d = a.size() - 1;
    p.assign(a[d]);
    dp.set_zero();
    for (std::size_t k = d; k-- > 0;) {
        mul_into(t, dp, z);
        dp.assign(t);
        dp += p;
        mul_into(t, p, z);
        p.assign(t);
        p += a[k];
    }
}

inline double log10_fujiwara(const std::vector<Complex> &a)
{
    const std::size_t d = a.size() - 1;
    const double lead = magnitude(a[d]).log10_abs();
    double best = -HUGE_VAL;
    for (std::size_t k = 1; k <= d; ++k) {
        const Complex &c = a[d - k];
        if (c.is_zero()) {
            continue;
        }
        double l = magnitude(c).log10_abs() - lead;
        if (k == d) {
            l -= std::log10(2.0);
        }
        best = std::max(best, l / static_cast<double>(k));
    }
    if (!std::isfinite(best)) {
        best = 0.0;
    }
    return best + std::log10(2.0);
}

} // namespace detail

/// Angular offset of the initial guesses on the Fujiwara circle.
inline constexpr double aberth_angle_offset = 0.3941;

/// Roots of sum_k coeffs[k] z^k.
///
/// Iteration runs on a ladder of precisions (64 digits, doubling up to the
/// working precision); each rung starts from the previous rung's roots and the
/// last one runs at full precision until the largest correction is at most
/// 10^{-digits/2} times the Fujiwara radius. The total iteration count is
/// capped at 500 per degree.
inline RootCloud find_roots(std::span<const Complex> coeffs, const Precision &prec, int family = 0, int n = 0)
{
    if (coeffs.empty()) {
        throw std::invalid_argument("find_roots: empty coefficient vector");
    }
    const long digits = prec.digits();
    const detail::Deflation defl = detail::deflate(coeffs, digits);
    RootCloud cloud;
    cloud.family = family;
    cloud.n = n;
    cloud.digits = digits;
    cloud.effective_degree = static_cast<int>(defl.high);
    cloud.zero_roots = static_cast<int>(defl.low);
    const mpfr_prec_t full_bits = prec.bits();
    for (std::size_t k = 0; k < defl.low; ++k) {
        cloud.points.emplace_back(full_bits);
    }
    const std::size_t d = defl.high - defl.low;
    if (d == 0) {
        return cloud;
    }

    std::vector<Complex> a;
    for (std::size_t k = defl.low; k <= defl.high; ++k) {
        a.emplace_back(full_bits, coeffs[k]);
    }
    if (d == 1) {
        cloud.points.push_back(-(a[0] / a[1]));
        return cloud;
    }

    std::vector<long> ladder;
    for (long s = std::min(64L, digits); s < digits; s *= 2) {
        ladder.push_back(s);
    }
    ladder.push_back(digits);

    const double log_r = detail::log10_fujiwara(a);
    const std::size_t cap = 500 * d;

    std::vector<Complex> z;
    {
        const mpfr_prec_t b0 = Precision::digits_to_bits(ladder.front());
        Real radius(b0);
        mpfr_set_d(radius.get(), log_r, MPFR_RNDN);
        mpfr_exp10(radius.get(), radius.get(), MPFR_RNDN);
        Real angle(b0);
        for (std::size_t k = 0; k < d; ++k) {
            mpfr_const_pi(angle.get(), MPFR_RNDN);
            mpfr_mul_ui(angle.get(), angle.get(), 2 * k, MPFR_RNDN);
            mpfr_div_ui(angle.get(), angle.get(), d, MPFR_RNDN);
            angle += Real(b0, aberth_angle_offset);
            Complex p(b0);
            mpfr_sin_cos(p.im().get(), p.re().get(), angle.get(), MPFR_RNDN);
            p *= radius;
            z.push_back(std::move(p));
        }
    }

    std::size_t total = 0;
    bool converged = false;
    for (std::size_t rung = 0; rung < ladder.size(); ++rung) {
        const bool last = rung + 1 == ladder.size();
        const mpfr_prec_t bits = Precision::digits_to_bits(ladder[rung]);
        std::vector<Complex> ab;
        for (const auto &c : a) {
            ab.emplace_back(bits, c);
        }
        for (auto &p : z) {
            p = Complex(bits, p);
        }
        const double log_tol = log_r - static_cast<double>(ladder[rung]) / 2.0;
        std::vector<bool> active(d, true);
        std::vector<Complex> sums(d, Complex(bits));
        std::vector<Complex> corr(d, Complex(bits));
        Complex p(bits), dp(bits), t(bits), diff(bits), ratio(bits);
        Real d2(bits), q(bits);
        double best = HUGE_VAL;
        std::size_t best_at = 0;
        converged = false;
        for (std::size_t it = 0; total < cap; ++it, ++total) {
            // S_k = sum_{j != k} 1 / (z_k - z_j), Jacobi style from the current iterate.
            for (auto &s : sums) {
                s.set_zero();
            }
            for (std::size_t k = 0; k < d; ++k) {
                for (std::size_t j = k + 1; j < d; ++j) {
                    if (!active[k] && !active[j]) {
                        continue;
                    }
                    diff.assign(z[k]);
                    diff -= z[j];
                    mpfr_fmma(d2.get(), diff.re().get(), diff.re().get(), diff.im().get(), diff.im().get(),
                              MPFR_RNDN);
                    if (d2.is_zero()) {
                        continue;
                    }
                    // 1/diff = conj(diff) / |diff|^2
                    mpfr_div(q.get(), diff.re().get(), d2.get(), MPFR_RNDN);
                    mpfr_add(sums[k].re().get(), sums[k].re().get(), q.get(), MPFR_RNDN);
                    mpfr_sub(sums[j].re().get(), sums[j].re().get(), q.get(), MPFR_RNDN);
                    mpfr_div(q.get(), diff.im().get(), d2.get(), MPFR_RNDN);
                    mpfr_sub(sums[k].im().get(), sums[k].im().get(), q.get(), MPFR_RNDN);
                    mpfr_add(sums[j].im().get(), sums[j].im().get(), q.get(), MPFR_RNDN);
                }
            }
            double worst = -HUGE_VAL;
            for (std::size_t k = 0; k < d; ++k) {
                if (!active[k]) {
                    continue;
                }
                detail::horner2(ab, z[k], p, dp, t);
                if (p.is_zero()) {
                    corr[k].set_zero();
                    active[k] = false;
                    continue;
                }
                if (dp.is_zero()) {
                    // Nudge off a critical point.
                    corr[k] = Complex(bits, 0.0, std::pow(10.0, std::max(-300.0, log_r - 3.0)));
                    worst = std::max(worst, log_r);
                    continue;
                }
                ratio = p / dp; // Newton step N_k
                mul_into(t, ratio, sums[k]);
                Complex den(bits, 1L);
                den -= t;
                corr[k] = den.is_zero() ? ratio : ratio / den;
                const double lc = magnitude(corr[k]).log10_abs();
                worst = std::max(worst, lc);
                if (lc <= log_tol) {
                    active[k] = false;
                }
            }
            for (std::size_t k = 0; k < d; ++k) {
                if (!corr[k].is_zero()) {
                    z[k] -= corr[k];
                    corr[k].set_zero();
                }
            }
            if (worst <= log_tol || std::none_of(active.begin(), active.end(), [](bool b) { return b; })) {
                converged = true;
                ++total;
                break;
            }
            if (worst < best - 1e-3) {
                best = worst;
                best_at = it;
            } else if (it - best_at > 12) {
                // Corrections have stopped shrinking: this rung is at its noise floor.
                ++total;
                break;
            }
        }
        if (last) {
            break;
        }
    }

    cloud.converged = converged;
    cloud.iterations = total;
    for (auto &p : z) {
        cloud.points.emplace_back(full_bits, p);
    }
    return cloud;
}

/// Recomputes residuals at doubled precision and flags roots above
/// 10^{-digits/4}. Roots at zero from trailing deflation and all others are
/// measured against the deflated polynomial.
inline RootCloud certify(std::span<const Complex> coeffs, RootCloud cloud)
{
    const long digits = cloud.digits;
    cloud.residuals.clear();
    cloud.certified.clear();
    if (cloud.points.empty()) {
        return cloud;
    }
    const detail::Deflation defl = detail::deflate(coeffs, digits);
    const mpfr_prec_t bits = Precision::digits_to_bits(2 * digits);
    std::vector<Complex> a;
    for (std::size_t k = 0; k <= defl.high; ++k) {
        if (k < defl.low) {
            a.emplace_back(bits);
        } else {
            a.emplace_back(bits, coeffs[k]);
        }
    }
    std::vector<Real> absa;
    for (const auto &c : a) {
        absa.push_back(abs(c));
    }
    const double limit = certification_log10(digits);
    Complex p(bits), t(bits);
    Real s(bits), az(bits);
    for (const auto &root : cloud.points) {
        const Complex z(bits, root);
        az = abs(z);
        p.assign(a.back());
        s.assign(absa.back());
        for (std::size_t k = a.size() - 1; k-- > 0;) {
            mul_into(t, p, z);
            p.assign(t);
            p += a[k];
            s *= az;
            s += absa[k];
        }
        Real res(magnitude_bits);
        if (!p.is_zero()) {
            res = Real(magnitude_bits, abs(p) / s);
        }
        cloud.certified.push_back(res.is_zero() || res.log10_abs() <= limit);
        cloud.residuals.push_back(std::move(res));
    }
    return cloud;
}

/// CSV rows "family,n,re,im,residual" (no header), full precision strings.
inline std::string to_csv_rows(const RootCloud &cloud)
{
    std::ostringstream out;
    for (std::size_t k = 0; k < cloud.points.size(); ++k) {
        auto [re, im] = to_strings(cloud.points[k], cloud.digits);
        out << cloud.family << ',' << cloud.n << ',' << re << ',' << im << ','
            << (k < cloud.residuals.size() ? cloud.residuals[k].to_string(6) : std::string("nan")) << '\n';
    }
    return out.str();
}

inline constexpr const char *root_csv_header = "family,n,re,im,residual";

inline nlohmann::json to_json(const RootCloud &cloud)
{
    nlohmann::json pts = nlohmann::json::array();
    for (std::size_t k = 0; k < cloud.points.size(); ++k) {
        auto [re, im] = to_strings(cloud.points[k], cloud.digits);
        nlohmann::json p = {{"re", re}, {"im", im}};
        if (k < cloud.residuals.size()) {
            p["residual"] = cloud.residuals[k].to_string(6);
            p["certified"] = static_cast<bool>(cloud.certified[k]);
        }
        pts.push_back(p);
    }
    return {{"family", cloud.family},
            {"n", cloud.n},
            {"digits", cloud.digits},
            {"effective_degree", cloud.effective_degree},
            {"zero_roots", cloud.zero_roots},
            {"converged", cloud.converged},
            {"iterations", cloud.iterations},
            {"points", pts}};
}

} // namespace hplab

#endif

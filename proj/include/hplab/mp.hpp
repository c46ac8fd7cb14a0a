#ifndef HPLAB_MP_HPP
#define HPLAB_MP_HPP

// Arbitrary-precision real and complex numbers on top of MPFR.
//
// Real owns an mpfr_t; Complex is a pair of Reals sharing one precision.
// Hot loops use the in-place kernels at the bottom of this file rather than
// the value-returning operators.

#include <cstdarg>
#include <cstdio>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace hplab
{

class PrecisionError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Working precision, counted in decimal digits.
class Precision
{
public:
    static constexpr long min_digits = 64;

    explicit Precision(long decimal_digits) : m_digits(decimal_digits)
    {
        if (decimal_digits < min_digits) {
            throw PrecisionError("precision must be at least " + std::to_string(min_digits)
                                 + " decimal digits, got " + std::to_string(decimal_digits));
        }
    }

    long digits() const noexcept { return m_digits; }

    mpfr_prec_t bits() const noexcept { return digits_to_bits(m_digits); }

    Precision doubled() const { return Precision(2 * m_digits); }

    static mpfr_prec_t digits_to_bits(long digits) noexcept
    {
        return static_cast<mpfr_prec_t>(std::ceil(static_cast<double>(digits) * 3.321928094887362)) + 1;
    }

    friend bool operator==(const Precision &, const Precision &) = default;

private:
    long m_digits;
};

inline void require_same(const Precision &a, const Precision &b, std::string_view what)
{
    if (!(a == b)) {
        throw PrecisionError(std::string(what) + ": precision mismatch (" + std::to_string(a.digits()) + " vs "
                             + std::to_string(b.digits()) + " digits)");
    }
}

/// Precision used for magnitudes, residuals and other diagnostics.
inline constexpr mpfr_prec_t magnitude_bits = 64;

class Real
{
public:
    Real() : Real(magnitude_bits) {}

    explicit Real(mpfr_prec_t bits)
    {
        mpfr_init2(m_v, bits);
        mpfr_set_zero(m_v, 1);
    }

    Real(mpfr_prec_t bits, double x) : Real(bits) { mpfr_set_d(m_v, x, MPFR_RNDN); }

    Real(mpfr_prec_t bits, long x) : Real(bits) { mpfr_set_si(m_v, x, MPFR_RNDN); }

    Real(mpfr_prec_t bits, int x) : Real(bits, static_cast<long>(x)) {}

    /// Rounds `other` to `bits`.
    Real(mpfr_prec_t bits, const Real &other) : Real(bits) { mpfr_set(m_v, other.m_v, MPFR_RNDN); }

    Real(const Real &other) : Real(other.bits()) { mpfr_set(m_v, other.m_v, MPFR_RNDN); }

    Real(Real &&other) noexcept
    {
        *m_v = *other.m_v;
        other.m_v->_mpfr_d = nullptr;
    }

    Real &operator=(const Real &other)
    {
        if (this != &other) {
            if (!valid()) {
                mpfr_init2(m_v, other.bits());
            }
            mpfr_set_prec(m_v, other.bits());
            mpfr_set(m_v, other.m_v, MPFR_RNDN);
        }
        return *this;
    }

    Real &operator=(Real &&other) noexcept
    {
        if (this != &other) {
            std::swap(*m_v, *other.m_v);
        }
        return *this;
    }

    ~Real()
    {
        if (valid()) {
            mpfr_clear(m_v);
        }
    }

    static Real from_string(mpfr_prec_t bits, const std::string &s)
    {
        Real r(bits);
        if (mpfr_set_str(r.m_v, s.c_str(), 10, MPFR_RNDN) != 0) {
            throw std::invalid_argument("not a decimal number: '" + s + "'");
        }
        return r;
    }

    /// Exact hexadecimal form ("0x1.8p+3"); from_exact restores the same bits.
    std::string to_exact() const
    {
        char *raw = nullptr;
        if (mpfr_asprintf(&raw, "%Ra", m_v) < 0) {
            throw std::bad_alloc();
        }
        std::string out(raw);
        mpfr_free_str(raw);
        return out;
    }

    static Real from_exact(mpfr_prec_t bits, const std::string &s)
    {
        Real r(bits);
        if (mpfr_set_str(r.m_v, s.c_str(), 0, MPFR_RNDN) != 0) {
            throw std::invalid_argument("not an exact number: '" + s + "'");
        }
        return r;
    }

    mpfr_ptr get() noexcept { return m_v; }
    mpfr_srcptr get() const noexcept { return m_v; }

    mpfr_prec_t bits() const noexcept { return mpfr_get_prec(m_v); }

    /// Assigns the value of `other`, rounding to this object's precision.
    void assign(const Real &other) { mpfr_set(m_v, other.m_v, MPFR_RNDN); }

    bool is_zero() const noexcept { return mpfr_zero_p(m_v) != 0; }
    bool is_finite() const noexcept { return mpfr_number_p(m_v) != 0; }
    int sign() const noexcept { return mpfr_sgn(m_v); }

    double to_double() const noexcept { return mpfr_get_d(m_v, MPFR_RNDN); }

    /// log10 |x|, valid far outside the double exponent range; -inf for zero.
    double log10_abs() const noexcept
    {
        if (mpfr_zero_p(m_v)) {
            return -HUGE_VAL;
        }
        long e = 0;
        const double m = mpfr_get_d_2exp(&e, m_v, MPFR_RNDN);
        return std::log10(std::fabs(m)) + static_cast<double>(e) * 0.30102999566398120;
    }

    /// Scientific decimal string with `digits` significant digits, e.g. "-1.25e-3".
    std::string to_string(long digits) const
    {
        if (mpfr_nan_p(m_v)) {
            return "nan";
        }
        if (mpfr_inf_p(m_v)) {
            return mpfr_sgn(m_v) > 0 ? "inf" : "-inf";
        }
        if (mpfr_zero_p(m_v)) {
            return "0";
        }
        mpfr_exp_t exp = 0;
        std::unique_ptr<char, void (*)(char *)> raw(
            mpfr_get_str(nullptr, &exp, 10, static_cast<size_t>(std::max(2L, digits)), m_v, MPFR_RNDN),
            mpfr_free_str);
        std::string mant(raw.get());
        std::string out;
        if (mant.front() == '-') {
            out.push_back('-');
            mant.erase(mant.begin());
        }
        while (mant.size() > 1 && mant.back() == '0') {
            mant.pop_back();
        }
        out.push_back(mant.front());
        if (mant.size() > 1) {
            out.push_back('.');
            out.append(mant, 1, std::string::npos);
        }
        if (exp - 1 != 0) {
            out += "e" + std::to_string(static_cast<long>(exp - 1));
        }
        return out;
    }

    Real operator-() const
    {
        Real r(bits());
        mpfr_neg(r.m_v, m_v, MPFR_RNDN);
        return r;
    }

    Real &operator+=(const Real &o)
    {
        mpfr_add(m_v, m_v, o.m_v, MPFR_RNDN);
        return *this;
    }
    Real &operator-=(const Real &o)
    {
        mpfr_sub(m_v, m_v, o.m_v, MPFR_RNDN);
        return *this;
    }
    Real &operator*=(const Real &o)
    {
        mpfr_mul(m_v, m_v, o.m_v, MPFR_RNDN);
        return *this;
    }
    Real &operator/=(const Real &o)
    {
        mpfr_div(m_v, m_v, o.m_v, MPFR_RNDN);
        return *this;
    }

    friend Real operator+(Real a, const Real &b) { return a += b; }
    friend Real operator-(Real a, const Real &b) { return a -= b; }
    friend Real operator*(Real a, const Real &b) { return a *= b; }
    friend Real operator/(Real a, const Real &b) { return a /= b; }

    friend int compare(const Real &a, const Real &b) noexcept { return mpfr_cmp(a.m_v, b.m_v); }
    friend bool operator<(const Real &a, const Real &b) noexcept { return mpfr_less_p(a.m_v, b.m_v) != 0; }
    friend bool operator>(const Real &a, const Real &b) noexcept { return mpfr_greater_p(a.m_v, b.m_v) != 0; }
    friend bool operator<=(const Real &a, const Real &b) noexcept { return mpfr_lessequal_p(a.m_v, b.m_v) != 0; }
    friend bool operator>=(const Real &a, const Real &b) noexcept
    {
        return mpfr_greaterequal_p(a.m_v, b.m_v) != 0;
    }
    friend bool operator==(const Real &a, const Real &b) noexcept { return mpfr_equal_p(a.m_v, b.m_v) != 0; }

    /// Bitwise identity of value and precision.
    friend bool identical(const Real &a, const Real &b) noexcept
    {
        if (a.bits() != b.bits()) {
            return false;
        }
        if (mpfr_nan_p(a.m_v) || mpfr_nan_p(b.m_v)) {
            return mpfr_nan_p(a.m_v) && mpfr_nan_p(b.m_v);
        }
        return mpfr_equal_p(a.m_v, b.m_v) && mpfr_signbit(a.m_v) == mpfr_signbit(b.m_v);
    }

private:
    bool valid() const noexcept { return m_v->_mpfr_d != nullptr; }

    mpfr_t m_v;
};

inline Real abs(const Real &x)
{
    Real r(x.bits());
    mpfr_abs(r.get(), x.get(), MPFR_RNDN);
    return r;
}

inline Real sqrt(const Real &x)
{
    Real r(x.bits());
    mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
    return r;
}

/// 10^e at the given precision.
inline Real pow10(mpfr_prec_t bits, long e)
{
    Real r(bits, 10L);
    mpfr_pow_si(r.get(), r.get(), e, MPFR_RNDN);
    return r;
}

inline Real max(const Real &a, const Real &b) { return a < b ? b : a; }

class Complex
{
public:
    Complex() : Complex(magnitude_bits) {}

    explicit Complex(mpfr_prec_t bits) : m_re(bits), m_im(bits) {}

    Complex(mpfr_prec_t bits, double re, double im = 0.0) : m_re(bits, re), m_im(bits, im) {}

    Complex(mpfr_prec_t bits, long re) : m_re(bits, re), m_im(bits) {}

    Complex(mpfr_prec_t bits, int re) : Complex(bits, static_cast<long>(re)) {}

    Complex(Real re, Real im) : m_re(std::move(re)), m_im(std::move(im))
    {
        if (m_re.bits() != m_im.bits()) {
            m_im = Real(m_re.bits(), m_im);
        }
    }

    /// Rounds `other` to `bits`.
    Complex(mpfr_prec_t bits, const Complex &other) : m_re(bits, other.m_re), m_im(bits, other.m_im) {}

    const Real &re() const noexcept { return m_re; }
    const Real &im() const noexcept { return m_im; }
    Real &re() noexcept { return m_re; }
    Real &im() noexcept { return m_im; }

    mpfr_prec_t bits() const noexcept { return m_re.bits(); }

    bool is_zero() const noexcept { return m_re.is_zero() && m_im.is_zero(); }
    bool is_real() const noexcept { return m_im.is_zero(); }

    void assign(const Complex &o)
    {
        m_re.assign(o.m_re);
        m_im.assign(o.m_im);
    }

    void set_zero()
    {
        mpfr_set_zero(m_re.get(), 1);
        mpfr_set_zero(m_im.get(), 1);
    }

    void set(long re, long im = 0)
    {
        mpfr_set_si(m_re.get(), re, MPFR_RNDN);
        mpfr_set_si(m_im.get(), im, MPFR_RNDN);
    }

    Complex conj() const
    {
        Complex r(*this);
        mpfr_neg(r.m_im.get(), r.m_im.get(), MPFR_RNDN);
        return r;
    }

    Complex operator-() const { return Complex(-m_re, -m_im); }

    Complex &operator+=(const Complex &o)
    {
        m_re += o.m_re;
        m_im += o.m_im;
        return *this;
    }
    Complex &operator-=(const Complex &o)
    {
        m_re -= o.m_re;
        m_im -= o.m_im;
        return *this;
    }
    Complex &operator*=(const Complex &o);
    Complex &operator/=(const Complex &o);

    Complex &operator*=(const Real &o)
    {
        m_re *= o;
        m_im *= o;
        return *this;
    }

    friend Complex operator+(Complex a, const Complex &b) { return a += b; }
    friend Complex operator-(Complex a, const Complex &b) { return a -= b; }
    friend Complex operator*(Complex a, const Complex &b) { return a *= b; }
    friend Complex operator/(Complex a, const Complex &b) { return a /= b; }

    friend bool operator==(const Complex &a, const Complex &b) noexcept
    {
        return a.m_re == b.m_re && a.m_im == b.m_im;
    }

    friend bool identical(const Complex &a, const Complex &b) noexcept
    {
        return identical(a.m_re, b.m_re) && identical(a.m_im, b.m_im);
    }

private:
    Real m_re;
    Real m_im;
};

/// out = a * b. `out` must not alias `a` or `b`.
inline void mul_into(Complex &out, const Complex &a, const Complex &b)
{
    mpfr_fmms(out.re().get(), a.re().get(), b.re().get(), a.im().get(), b.im().get(), MPFR_RNDN);
    mpfr_fmma(out.im().get(), a.re().get(), b.im().get(), a.im().get(), b.re().get(), MPFR_RNDN);
}

/// acc -= a * b, using `tmp` as scratch.
inline void sub_mul(Complex &acc, const Complex &a, const Complex &b, Real &tmp)
{
    mpfr_fmms(tmp.get(), a.re().get(), b.re().get(), a.im().get(), b.im().get(), MPFR_RNDN);
    mpfr_sub(acc.re().get(), acc.re().get(), tmp.get(), MPFR_RNDN);
    mpfr_fmma(tmp.get(), a.re().get(), b.im().get(), a.im().get(), b.re().get(), MPFR_RNDN);
    mpfr_sub(acc.im().get(), acc.im().get(), tmp.get(), MPFR_RNDN);
}

/// acc += a * b, using `tmp` as scratch.
inline void add_mul(Complex &acc, const Complex &a, const Complex &b, Real &tmp)
{
    mpfr_fmms(tmp.get(), a.re().get(), b.re().get(), a.im().get(), b.im().get(), MPFR_RNDN);
    mpfr_add(acc.re().get(), acc.re().get(), tmp.get(), MPFR_RNDN);
    mpfr_fmma(tmp.get(), a.re().get(), b.im().get(), a.im().get(), b.re().get(), MPFR_RNDN);
    mpfr_add(acc.im().get(), acc.im().get(), tmp.get(), MPFR_RNDN);
}

inline Complex &Complex::operator*=(const Complex &o)
{
    Complex out(bits());
    mul_into(out, *this, o);
    *this = std::move(out);
    return *this;
}

/// |z|^2 at the precision of z.
inline Real norm(const Complex &z)
{
    Real r(z.bits());
    mpfr_fmma(r.get(), z.re().get(), z.re().get(), z.im().get(), z.im().get(), MPFR_RNDN);
    return r;
}

inline Real abs(const Complex &z)
{
    Real r(z.bits());
    mpfr_hypot(r.get(), z.re().get(), z.im().get(), MPFR_RNDN);
    return r;
}

/// |z| rounded to magnitude precision; cheap enough for pivot searches.
inline Real magnitude(const Complex &z)
{
    Real r(magnitude_bits);
    mpfr_hypot(r.get(), z.re().get(), z.im().get(), MPFR_RNDN);
    return r;
}

inline Complex &Complex::operator/=(const Complex &o)
{
    if (o.is_real()) {
        m_re /= o.m_re;
        m_im /= o.m_re;
        return *this;
    }
    const Real den = norm(o);
    Complex num(bits());
    mul_into(num, *this, o.conj());
    num.m_re /= den;
    num.m_im /= den;
    *this = std::move(num);
    return *this;
}

inline Complex inverse(const Complex &z)
{
    Complex one(z.bits(), 1L);
    return one / z;
}

/// Principal square root; the negative real axis belongs to the upper
/// half plane whatever the sign of a zero imaginary part.
inline Complex sqrt(const Complex &z)
{
    const mpfr_prec_t p = z.bits();
    if (z.is_zero()) {
        return Complex(p);
    }
    Real r = abs(z);
    Real t(p);
    // t = sqrt((|z| + |re|) / 2)
    mpfr_abs(t.get(), z.re().get(), MPFR_RNDN);
    mpfr_add(t.get(), t.get(), r.get(), MPFR_RNDN);
    mpfr_div_ui(t.get(), t.get(), 2, MPFR_RNDN);
    mpfr_sqrt(t.get(), t.get(), MPFR_RNDN);
    Real u(p);
    mpfr_div(u.get(), z.im().get(), t.get(), MPFR_RNDN);
    mpfr_div_ui(u.get(), u.get(), 2, MPFR_RNDN);
    if (z.re().sign() >= 0) {
        return Complex(std::move(t), std::move(u));
    }
    // re < 0: sqrt = |u| + i sign(im) t
    mpfr_abs(u.get(), u.get(), MPFR_RNDN);
    if (z.im().sign() < 0) {
        mpfr_neg(t.get(), t.get(), MPFR_RNDN);
    }
    return Complex(std::move(u), std::move(t));
}

/// Principal branch of z^(num/den), via exp(alpha * Log z).
inline Complex pow_rational(const Complex &z, long num, long den)
{
    const mpfr_prec_t p = z.bits();
    if (den <= 0) {
        throw std::invalid_argument("pow_rational: non-positive denominator");
    }
    if (z.is_zero()) {
        if (num > 0) {
            return Complex(p);
        }
        throw std::domain_error("pow_rational: zero to a non-positive power");
    }
    if (den == 1) {
        Complex base = num >= 0 ? z : inverse(z);
        Complex acc(p, 1L);
        for (long e = std::labs(num); e > 0; e >>= 1) {
            if (e & 1) {
                acc *= base;
            }
            if (e > 1) {
                base *= base;
            }
        }
        return acc;
    }
    if (den == 2 && num == 1) {
        return sqrt(z);
    }
    const mpfr_prec_t wp = p + 32;
    Real logr(wp);
    Real arg(wp);
    Real r = abs(Complex(wp, z));
    mpfr_log(logr.get(), r.get(), MPFR_RNDN);
    if (z.im().is_zero()) {
        if (z.re().sign() < 0) {
            mpfr_const_pi(arg.get(), MPFR_RNDN);
        }
    } else {
        mpfr_atan2(arg.get(), z.im().get(), z.re().get(), MPFR_RNDN);
    }
    mpfr_mul_si(logr.get(), logr.get(), num, MPFR_RNDN);
    mpfr_div_si(logr.get(), logr.get(), den, MPFR_RNDN);
    mpfr_mul_si(arg.get(), arg.get(), num, MPFR_RNDN);
    mpfr_div_si(arg.get(), arg.get(), den, MPFR_RNDN);
    mpfr_exp(logr.get(), logr.get(), MPFR_RNDN);
    Real c(wp);
    Real s(wp);
    mpfr_sin_cos(s.get(), c.get(), arg.get(), MPFR_RNDN);
    c *= logr;
    s *= logr;
    return Complex(Real(p, c), Real(p, s));
}

/// Real and imaginary parts as "re,im" pair of strings.
inline std::pair<std::string, std::string> to_strings(const Complex &z, long digits)
{
    return {z.re().to_string(digits), z.im().to_string(digits)};
}

} // namespace hplab

#endif

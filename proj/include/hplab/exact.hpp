#ifndef HPLAB_EXACT_HPP
#define HPLAB_EXACT_HPP

// Exact inputs: rational exponents and complex constants written as strings.
//
// Constant grammar (whitespace ignored):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' (integer | '(' rational ')'))?
//   primary := number ['i'] | 'i' | 'sqrt' '(' expr ')' | '(' expr ')'
// Numbers are decimal literals ("1", "-0.65", "1.6e-2"). Evaluation runs with
// 64 guard bits and the result is rounded once into the working precision.

#include "mp.hpp"

#include <cctype>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hplab
{

class ParseError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Reduced fraction with positive denominator.
struct Rational
{
    long num = 0;
    long den = 1;

    Rational() = default;

    Rational(long n, long d = 1) : num(n), den(d)
    {
        if (d == 0) {
            throw ParseError("rational with zero denominator");
        }
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const long g = std::gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    static Rational parse(std::string_view s)
    {
        std::string t;
        for (char c : s) {
            if (!std::isspace(static_cast<unsigned char>(c))) {
                t.push_back(c);
            }
        }
        const auto slash = t.find('/');
        try {
            std::size_t used = 0;
            if (slash == std::string::npos) {
                const long n = std::stol(t, &used);
                if (used != t.size()) {
                    throw ParseError("bad rational '" + std::string(s) + "'");
                }
                return Rational(n);
            }
            const std::string a = t.substr(0, slash);
            const std::string b = t.substr(slash + 1);
            std::size_t ua = 0;
            std::size_t ub = 0;
            const long n = std::stol(a, &ua);
            const long d = std::stol(b, &ub);
            if (ua != a.size() || ub != b.size()) {
                throw ParseError("bad rational '" + std::string(s) + "'");
            }
            return Rational(n, d);
        } catch (const std::logic_error &) {
            throw ParseError("bad rational '" + std::string(s) + "'");
        }
    }

    bool is_integer() const noexcept { return den == 1; }

    std::string to_string() const
    {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }

    friend bool operator==(const Rational &, const Rational &) = default;
};

namespace detail
{

class ConstantParser
{
public:
    ConstantParser(std::string_view src, mpfr_prec_t bits) : m_src(src), m_bits(bits) {}

    Complex parse()
    {
        Complex v = expr();
        skip_ws();
        if (m_pos != m_src.size()) {
            fail("unexpected '" + std::string(1, m_src[m_pos]) + "'");
        }
        return v;
    }

private:
    [[noreturn]] void fail(const std::string &what) const
    {
        throw ParseError("constant '" + std::string(m_src) + "': " + what + " at offset " + std::to_string(m_pos));
    }

    void skip_ws()
    {
        while (m_pos < m_src.size() && std::isspace(static_cast<unsigned char>(m_src[m_pos]))) {
            ++m_pos;
        }
    }

    bool accept(char c)
    {
        skip_ws();
        if (m_pos < m_src.size() && m_src[m_pos] == c) {
            ++m_pos;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            fail(std::string("expected '") + c + "'");
        }
    }

    Complex expr()
    {
        Complex v = term();
        for (;;) {
            if (accept('+')) {
                v += term();
            } else if (accept('-')) {
                v -= term();
            } else {
                return v;
            }
        }
    }

    Complex term()
    {
        Complex v = unary();
        for (;;) {
            if (accept('*')) {
                v *= unary();
            } else if (accept('/')) {
                Complex d = unary();
                if (d.is_zero()) {
                    fail("division by zero");
                }
                v /= d;
            } else {
                return v;
            }
        }
    }

    Complex unary()
    {
        if (accept('-')) {
            return -unary();
        }
        if (accept('+')) {
            return unary();
        }
        return power();
    }

    Complex power()
    {
        Complex base = primary();
        if (!accept('^')) {
            return base;
        }
        Rational e;
        if (accept('(')) {
            const auto close = m_src.find(')', m_pos);
            if (close == std::string_view::npos) {
                fail("unterminated exponent");
            }
            e = Rational::parse(m_src.substr(m_pos, close - m_pos));
            m_pos = close + 1;
        } else {
            skip_ws();
            const auto start = m_pos;
            while (m_pos < m_src.size() && std::isdigit(static_cast<unsigned char>(m_src[m_pos]))) {
                ++m_pos;
            }
            if (start == m_pos) {
                fail("expected exponent");
            }
            e = Rational(std::stol(std::string(m_src.substr(start, m_pos - start))));
        }
        return pow_rational(base, e.num, e.den);
    }

    Complex primary()
    {
        skip_ws();
        if (m_pos >= m_src.size()) {
            fail("unexpected end");
        }
        const char c = m_src[m_pos];
        if (c == '(') {
            ++m_pos;
            Complex v = expr();
            expect(')');
            return v;
        }
        if (m_src.substr(m_pos, 4) == "sqrt") {
            m_pos += 4;
            expect('(');
            Complex v = expr();
            expect(')');
            return sqrt(v);
        }
        if (c == 'i') {
            ++m_pos;
            return Complex(Real(m_bits), Real(m_bits, 1L));
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return number();
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Complex number()
    {
        const auto start = m_pos;
        while (m_pos < m_src.size()
               && (std::isdigit(static_cast<unsigned char>(m_src[m_pos])) || m_src[m_pos] == '.')) {
            ++m_pos;
        }
        if (m_pos < m_src.size() && (m_src[m_pos] == 'e' || m_src[m_pos] == 'E')) {
            auto p = m_pos + 1;
            if (p < m_src.size() && (m_src[p] == '+' || m_src[p] == '-')) {
                ++p;
            }
            if (p < m_src.size() && std::isdigit(static_cast<unsigned char>(m_src[p]))) {
                m_pos = p;
                while (m_pos < m_src.size() && std::isdigit(static_cast<unsigned char>(m_src[m_pos]))) {
                    ++m_pos;
                }
            }
        }
        const std::string lit(m_src.substr(start, m_pos - start));
        Real r(m_bits);
        if (lit == "." || mpfr_set_str(r.get(), lit.c_str(), 10, MPFR_RNDN) != 0) {
            fail("bad number '" + lit + "'");
        }
        if (m_pos < m_src.size() && m_src[m_pos] == 'i') {
            ++m_pos;
            return Complex(Real(m_bits), std::move(r));
        }
        return Complex(std::move(r), Real(m_bits));
    }

    std::string_view m_src;
    mpfr_prec_t m_bits;
    std::size_t m_pos = 0;
};

} // namespace detail

/// Evaluates an exact constant string and rounds it once to `bits`.
inline Complex parse_constant(std::string_view text, mpfr_prec_t bits)
{
    detail::ConstantParser p(text, bits + 64);
    return Complex(bits, p.parse());
}

inline Complex parse_constant(std::string_view text, const Precision &prec)
{
    return parse_constant(text, prec.bits());
}

} // namespace hplab

#endif

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <Eigen/Dense>

#include "crnlap/error.hpp"

namespace crnlap {

/// Exact rational scalar. Expression templates are disabled so the type
/// composes with Eigen's own expression machinery.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

template <class T>
concept Scalar = std::is_same_v<T, Rational> || std::is_same_v<T, double>;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(double d) { return d; }

template <class T>
Matrix<double> to_double(const Matrix<T>& m)
{
    Matrix<double> out(m.rows(), m.cols());
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            out(i, j) = to_double(m(i, j));
    return out;
}

template <class T>
Vector<double> to_double(const Vector<T>& v)
{
    Vector<double> out(v.size());
    for (Index i = 0; i < v.size(); ++i)
        out(i) = to_double(v(i));
    return out;
}

template <class T>
T abs_value(const T& v)
{
    return v < T(0) ? T(-v) : v;
}

/// Zero test: exact for rationals, `|v| <= tol` for floats.
template <class T>
bool is_zero(const T& v, double tol = 0.0)
{
    if constexpr (is_exact_v<T>)
        return v == 0;
    else
        return std::abs(v) <= tol;
}

template <class T>
double max_abs(const Matrix<T>& m)
{
    double best = 0.0;
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            best = std::max(best, std::abs(to_double(m(i, j))));
    return best;
}

template <class T>
double max_abs(const Vector<T>& v)
{
    double best = 0.0;
    for (Index i = 0; i < v.size(); ++i)
        best = std::max(best, std::abs(to_double(v(i))));
    return best;
}

inline bool is_integer(const Rational& q)
{
    return boost::multiprecision::denominator(q) == 1;
}

inline BigInt numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

/// Parses "7", "-3/4", "0.125", "1.5e-3" exactly.
inline Rational parse_rational(std::string_view text)
{
    auto fail = [&]() -> Rational {
        throw Error(Errc::invalid_argument, "not a number: '" + std::string(text) + "'");
    };
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    if (text.empty()) return fail();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_rational(text.substr(0, slash));
        Rational den = parse_rational(text.substr(slash + 1));
        if (den == 0) return fail();
        return num / den;
    }

    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    std::string digits;
    int scale = 0;
    bool seen_point = false;
    bool seen_digit = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point) ++scale;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) return fail();
    long exponent = 0;
    if (pos < text.size()) {
        if (text[pos] != 'e' && text[pos] != 'E') return fail();
        ++pos;
        std::string exp_text(text.substr(pos));
        if (exp_text.empty()) return fail();
        std::size_t used = 0;
        try {
            exponent = std::stol(exp_text, &used);
        } catch (const std::exception&) {
            return fail();
        }
        if (used != exp_text.size() || std::abs(exponent) > 4000) return fail();
    }
    BigInt mantissa(digits);
    long shift = exponent - scale;
    BigInt ten_power = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::abs(shift)));
    Rational value = shift >= 0 ? Rational(mantissa * ten_power) : Rational(mantissa, ten_power);
    return negative ? Rational(-value) : value;
}

/// Best rational approximation with denominator at most `max_den`
/// (continued-fraction convergents).
inline Rational rationalize(double value, std::int64_t max_den = 1'000'000)
{
    if (!std::isfinite(value))
        throw Error(Errc::invalid_argument, "cannot rationalize a non-finite value");
    bool negative = value < 0;
    double x = std::abs(value);
    BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int iter = 0; iter < 64; ++iter) {
        double a = std::floor(x);
        BigInt ai(static_cast<long long>(a));
        BigInt p2 = ai * p1 + p0;
        BigInt q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double frac = x - a;
        if (frac < 1e-15) break;
        x = 1.0 / frac;
        if (x > 1e15) break;
    }
    Rational r(p1, q1);
    return negative ? Rational(-r) : r;
}

/// Integer power by repeated squaring; exponent must be a nonnegative integer.
template <class T>
T integer_power(T base, BigInt exponent)
{
    T result(1);
    while (exponent > 0) {
        if ((exponent & 1) != 0) result *= base;
        exponent >>= 1;
        if (exponent > 0) base *= base;
    }
    return result;
}

inline std::string to_string(const Rational& q) { return q.str(); }

} // namespace crnlap

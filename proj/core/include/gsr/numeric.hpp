// Dual-mode scalar support: exact rationals and IEEE doubles behind one traits interface.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace gsr {

using BigInt = boost::multiprecision::cpp_int;
// Expression templates off so Rational behaves like a builtin in generic code.
using Rational = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

// Float-mode comparison tolerances. Exact mode compares exactly.
inline constexpr double kReserveAbsTol = 1e-9;   // absolute, on reserves
inline constexpr double kProfitRelTol = 1e-12;   // relative, on profits
inline constexpr double kCenteredRelTol = 1e-9;  // relative, on the centered-state precondition

template <typename T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static const char* mode_name() { return "float"; }

    // Accepts "p/q" rational syntax or a decimal with optional exponent.
    static double from_string(std::string_view s);
    static std::string to_string(double v);
    static double to_double(double v) { return v; }

    static std::optional<double> sqrt(double v) {
        if (v < 0.0) return std::nullopt;
        return std::sqrt(v);
    }

    // Reserve comparison, biased so boundary ties count as inside.
    static bool leq(double a, double b) { return a <= b + kReserveAbsTol; }
    static bool eq_abs(double a, double b, double tol) { return std::fabs(a - b) <= tol; }
    static bool eq_rel(double a, double b, double tol) {
        double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
        return std::fabs(a - b) <= tol * scale;
    }
};

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static const char* mode_name() { return "exact"; }

    static Rational from_string(std::string_view s);
    static std::string to_string(const Rational& v);
    static double to_double(const Rational& v) { return v.convert_to<double>(); }

    // Exact square root when numerator and denominator are perfect squares.
    static std::optional<Rational> sqrt(const Rational& v);

    static bool leq(const Rational& a, const Rational& b) { return a <= b; }
    static bool eq_abs(const Rational& a, const Rational& b, double) { return a == b; }
    static bool eq_rel(const Rational& a, const Rational& b, double) { return a == b; }
};

}  // namespace gsr

#include "gsr/numeric.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace gsr {

namespace {

[[noreturn]] void bad_scalar(std::string_view s) {
    throw std::invalid_argument("invalid scalar literal: '" + std::string(s) + "'");
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

// Parses "[-]digits[.digits][e[+-]digits]" into an exact rational.
Rational parse_decimal(std::string_view s) {
    std::string_view body = s;
    bool negative = false;
    if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    long long exp10 = 0;
    auto epos = body.find_first_of("eE");
    if (epos != std::string_view::npos) {
        std::string_view etail = body.substr(epos + 1);
        body = body.substr(0, epos);
        bool eneg = false;
        if (!etail.empty() && (etail.front() == '+' || etail.front() == '-')) {
            eneg = etail.front() == '-';
            etail.remove_prefix(1);
        }
        if (!all_digits(etail) || etail.size() > 6) bad_scalar(s);
        exp10 = std::strtoll(std::string(etail).c_str(), nullptr, 10);
        if (eneg) exp10 = -exp10;
    }

    std::string digits;
    auto dot = body.find('.');
    if (dot == std::string_view::npos) {
        if (!all_digits(body)) bad_scalar(s);
        digits = std::string(body);
    } else {
        std::string_view ipart = body.substr(0, dot);
        std::string_view fpart = body.substr(dot + 1);
        if (ipart.empty() && fpart.empty()) bad_scalar(s);
        if (!ipart.empty() && !all_digits(ipart)) bad_scalar(s);
        if (!fpart.empty() && !all_digits(fpart)) bad_scalar(s);
        digits = std::string(ipart) + std::string(fpart);
        exp10 -= static_cast<long long>(fpart.size());
    }
    if (digits.empty()) bad_scalar(s);
    // cpp_int's string ctor reads a leading 0 as an octal prefix; keep it decimal.
    auto nz = digits.find_first_not_of('0');
    digits = (nz == std::string::npos) ? "0" : digits.substr(nz);

    BigInt num(digits);
    BigInt den(1);
    if (exp10 >= 0) {
        num *= boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exp10));
    } else {
        den = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(-exp10));
    }
    if (negative) num = -num;
    return Rational(num, den);
}

}  // namespace

Rational scalar_traits<Rational>::from_string(std::string_view s) {
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return parse_decimal(s);
    Rational p = parse_decimal(s.substr(0, slash));
    Rational q = parse_decimal(s.substr(slash + 1));
    if (q == 0) bad_scalar(s);
    return p / q;
}

std::string scalar_traits<Rational>::to_string(const Rational& v) {
    BigInt num = numerator(v);
    BigInt den = denominator(v);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

std::optional<Rational> scalar_traits<Rational>::sqrt(const Rational& v) {
    if (v < 0) return std::nullopt;
    BigInt num = numerator(v);
    BigInt den = denominator(v);
    BigInt sn = boost::multiprecision::sqrt(num);
    BigInt sd = boost::multiprecision::sqrt(den);
    if (sn * sn != num || sd * sd != den) return std::nullopt;
    return Rational(sn, sd);
}

double scalar_traits<double>::from_string(std::string_view s) {
    auto slash = s.find('/');
    if (slash != std::string_view::npos) {
        double p = from_string(s.substr(0, slash));
        double q = from_string(s.substr(slash + 1));
        if (q == 0.0) bad_scalar(s);
        return p / q;
    }
    std::string buf(s);
    char* end = nullptr;
    double v = std::strtod(buf.c_str(), &end);
    if (end == buf.c_str() || *end != '\0') bad_scalar(s);
    return v;
}

std::string scalar_traits<double>::to_string(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace gsr

// Constant-function market maker curves: reserve maps, marginal exchange rate, axiom checks.
#pragma once

#include "gsr/numeric.hpp"

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gsr {

enum class CurveKind { ConstantProduct };

template <typename T>
struct CurveParams {
    CurveKind kind;
    T constant;  // the invariant level, x*y = constant

    CurveParams(CurveKind kind_, T constant_) : kind(kind_), constant(std::move(constant_)) {
        if (!(constant > 0)) throw std::domain_error("curve constant must be positive");
    }
};

template <typename T>
CurveParams<T> constant_product(T k) {
    return CurveParams<T>(CurveKind::ConstantProduct, std::move(k));
}

// y such that (x, y) lies on the curve.
template <typename T>
T reserve_y(const CurveParams<T>& curve, const T& x) {
    if (!(x > 0)) throw std::domain_error("reserve_y: x reserve must be positive");
    return curve.constant / x;
}

// x such that (x, y) lies on the curve.
template <typename T>
T reserve_x(const CurveParams<T>& curve, const T& y) {
    if (!(y > 0)) throw std::domain_error("reserve_x: y reserve must be positive");
    return curve.constant / y;
}

// Marginal exchange rate r(x) = |dy/dx| along the curve.
template <typename T>
T marginal_rate(const CurveParams<T>& curve, const T& x) {
    if (!(x > 0)) throw std::domain_error("marginal_rate: x reserve must be positive");
    return curve.constant / (x * x);
}

// Solves r(x) = target for a strictly decreasing rate function by bracket expansion + bisection.
template <typename T, typename RateFn>
T solve_rate(RateFn&& rate, const T& target, const T& x_hint, int max_iter = 200) {
    if (!(target > 0) || !(x_hint > 0)) throw std::domain_error("solve_rate: positive target and hint required");
    T lo = x_hint, hi = x_hint;
    const T two(2);
    int guard = 0;
    while (rate(lo) < target) {
        lo = lo / two;
        if (++guard > 2000) throw std::domain_error("solve_rate: bracket expansion failed (low side)");
    }
    guard = 0;
    while (rate(hi) > target) {
        hi = hi * two;
        if (++guard > 2000) throw std::domain_error("solve_rate: bracket expansion failed (high side)");
    }
    for (int i = 0; i < max_iter; ++i) {
        T mid = (lo + hi) / two;
        if (rate(mid) >= target)
            lo = mid;
        else
            hi = mid;
    }
    return (lo + hi) / two;
}

template <typename T>
struct AxiomReport {
    struct Violation {
        int axiom;  // 1: monotone inverse, 2: strictly decreasing rate
        T x_a, x_b;
        T value_a, value_b;
    };
    bool axiom1_ok = true;
    bool axiom2_ok = true;
    std::vector<Violation> violations;
    std::size_t samples = 0;

    bool ok() const { return axiom1_ok && axiom2_ok; }
};

// Samples [x_lo, x_hi] and checks strict monotonicity of the inverse map and of the rate.
// Takes callables so test doubles can be checked alongside real curves.
template <typename T, typename YFn, typename RateFn>
AxiomReport<T> check_axioms_fns(YFn&& y_of_x, RateFn&& rate, const T& x_lo, const T& x_hi,
                                std::size_t samples) {
    if (!(x_lo > 0)) throw std::domain_error("check_axioms: x_lo must be positive");
    if (!(x_hi > x_lo)) throw std::domain_error("check_axioms: x_hi must exceed x_lo");
    if (samples < 2) throw std::domain_error("check_axioms: at least two samples required");

    AxiomReport<T> report;
    report.samples = samples;
    T step = (x_hi - x_lo) / T(static_cast<int>(samples - 1));
    T xa = x_lo;
    T ya = y_of_x(xa);
    T ra = rate(xa);
    for (std::size_t i = 1; i < samples; ++i) {
        T xb = (i + 1 == samples) ? x_hi : T(x_lo + step * T(static_cast<int>(i)));
        T yb = y_of_x(xb);
        T rb = rate(xb);
        if (!(yb < ya)) {
            report.axiom1_ok = false;
            report.violations.push_back({1, xa, xb, ya, yb});
        }
        if (!(rb < ra)) {
            report.axiom2_ok = false;
            report.violations.push_back({2, xa, xb, ra, rb});
        }
        xa = xb;
        ya = yb;
        ra = rb;
    }
    return report;
}

template <typename T>
AxiomReport<T> check_axioms(const CurveParams<T>& curve, const T& x_lo, const T& x_hi,
                            std::size_t samples) {
    return check_axioms_fns<T>([&](const T& x) { return reserve_y(curve, x); },
                               [&](const T& x) { return marginal_rate(curve, x); }, x_lo, x_hi,
                               samples);
}

}  // namespace gsr

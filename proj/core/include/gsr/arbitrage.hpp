// Arbitrage analysis: no-arb reserve interval, optimal single arbitrage, arbitragable
// profit per transaction, the additive MEV upper bound, and the potential function.
#pragma once

#include "gsr/exchange.hpp"

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gsr {

template <typename T>
struct ArbBounds {
    T lx, rx;  // arbitrage-free x-reserve interval [lx, rx]
};

// lx solves r(x) = p_x / ((1-f) p_y), rx solves r(x) = (1-f) p_x / p_y.
// Constant product closed form: lx = sqrt(1-f) * xc, rx = xc / sqrt(1-f),
// with xc = sqrt(k p_y / p_x) the zero-fee equilibrium reserve.
template <typename T>
ArbBounds<T> arb_bounds(const CurveParams<T>& curve, const MarketContext<T>& market) {
    const T one(1);
    auto xc = scalar_traits<T>::sqrt(curve.constant * market.p_y / market.p_x);
    auto root_fee = scalar_traits<T>::sqrt(one - market.fee);
    if (!xc || !root_fee)
        throw std::domain_error(
            "arb_bounds: equilibrium reserve not exactly representable; use float mode");
    return ArbBounds<T>{*root_fee * *xc, *xc / *root_fee};
}

template <typename T>
bool is_centered(const PoolState<T>& s, const CurveParams<T>& curve,
                 const MarketContext<T>& market) {
    T lhs = marginal_rate(curve, s.x) * market.p_y;
    return scalar_traits<T>::eq_rel(lhs, market.p_x, kCenteredRelTol);
}

template <typename T>
void require_centered(const PoolState<T>& s, const CurveParams<T>& curve,
                      const MarketContext<T>& market, const char* who) {
    if (!is_centered(s, curve, market))
        throw std::domain_error(std::string(who) +
                                ": requires a centered start, r(x0) = p_x/p_y; recenter first");
}

// Most profitable single miner transaction from s, if the state sits outside [lx, rx].
template <typename T>
std::optional<std::pair<Transaction<T>, T>> optimal_single_arb(const PoolState<T>& s,
                                                               const CurveParams<T>& curve,
                                                               const MarketContext<T>& market) {
    using traits = scalar_traits<T>;
    const T one(1);
    ArbBounds<T> bounds = arb_bounds(curve, market);
    if (traits::leq(bounds.lx, s.x) && traits::leq(s.x, bounds.rx)) return std::nullopt;
    Transaction<T> tx = s.x < bounds.lx
                            ? Transaction<T>(Side::SellX, (bounds.lx - s.x) / (one - market.fee),
                                             Owner::miner())
                            : Transaction<T>(Side::SellY,
                                             (reserve_y(curve, bounds.rx) - s.y) / (one - market.fee),
                                             Owner::miner());
    ExecutionTrace<T> trace = execute_sequence(s, {tx}, curve, market);
    return std::make_pair(tx, miner_profit(trace, market));
}

// Profit a back-running arbitrage can extract after tx executes from a centered s0.
template <typename T>
T arbitragable_profit(const PoolState<T>& s0, const Transaction<T>& tx,
                      const CurveParams<T>& curve, const MarketContext<T>& market) {
    require_centered(s0, curve, market, "arbitragable_profit");
    const T one(1);
    ArbBounds<T> bounds = arb_bounds(curve, market);
    T ap;
    if (tx.side == Side::SellX) {
        T pushed = s0.x + (one - market.fee) * tx.quantity;
        T xp = pushed > bounds.rx ? pushed : bounds.rx;
        ap = (xp - bounds.rx) * market.p_x -
             (reserve_y(curve, bounds.rx) - reserve_y(curve, xp)) / (one - market.fee) * market.p_y;
    } else {
        T pushed = reserve_x(curve, s0.y + (one - market.fee) * tx.quantity);
        T xp = pushed < bounds.lx ? pushed : bounds.lx;
        ap = (reserve_y(curve, xp) - reserve_y(curve, bounds.lx)) * market.p_y -
             (bounds.lx - xp) / (one - market.fee) * market.p_x;
    }
    if (ap < 0) ap = T(0);  // float rounding guard; the value is non-negative
    return ap;
}

// Additive upper bound on miner profit: sum of per-transaction arbitragable profits.
template <typename T>
T upper_bound_m(const PoolState<T>& s0, const std::vector<Transaction<T>>& txs,
                const CurveParams<T>& curve, const MarketContext<T>& market) {
    T total(0);
    for (const Transaction<T>& tx : txs) total = total + arbitragable_profit(s0, tx, curve, market);
    return total;
}

// Value a miner could still harvest by arbitraging the state back into [lx, rx].
template <typename T>
T potential(const PoolState<T>& s, const CurveParams<T>& curve, const MarketContext<T>& market,
            const ArbBounds<T>& bounds) {
    const T one(1);
    T phi(0);
    if (s.x > bounds.rx) {
        phi = (s.x - bounds.rx) * market.p_x +
              (reserve_y(curve, s.x) - reserve_y(curve, bounds.rx)) / (one - market.fee) * market.p_y;
    } else if (s.x < bounds.lx) {
        phi = (s.x - bounds.lx) / (one - market.fee) * market.p_x +
              (reserve_y(curve, s.x) - reserve_y(curve, bounds.lx)) * market.p_y;
    }
    if (phi < 0) phi = T(0);  // float rounding guard near the boundary
    return phi;
}

template <typename T>
T potential(const PoolState<T>& s, const CurveParams<T>& curve, const MarketContext<T>& market) {
    return potential(s, curve, market, arb_bounds(curve, market));
}

template <typename T>
struct RecenterResult {
    PoolState<T> state;
    std::optional<Transaction<T>> tx;
    T profit;
};

// One optimal single-arb step; lands inside [lx, rx] (exactly on the center when fee = 0).
template <typename T>
RecenterResult<T> recenter(const PoolState<T>& s, const CurveParams<T>& curve,
                           const MarketContext<T>& market) {
    auto arb = optimal_single_arb(s, curve, market);
    if (!arb) return RecenterResult<T>{s, std::nullopt, T(0)};
    PoolState<T> next = apply_tx(s, arb->first, curve, market.fee).first;
    return RecenterResult<T>{next, arb->first, arb->second};
}

template <typename T>
struct PotentialTrace {
    std::vector<T> phi;  // phi[i]: potential after i steps (phi[0] at the start)
    std::vector<T> v;    // v[i]: summed arbitragable profit of user transactions among the first i
};

// Per-step potential and harvested-bound bookkeeping for a trace from a centered start.
template <typename T>
PotentialTrace<T> potential_trace(const ExecutionTrace<T>& trace, const CurveParams<T>& curve,
                                  const MarketContext<T>& market) {
    require_centered(trace.initial, curve, market, "potential_trace");
    PotentialTrace<T> pt;
    pt.phi.reserve(trace.steps.size() + 1);
    pt.v.reserve(trace.steps.size() + 1);
    pt.phi.push_back(potential(trace.initial, curve, market));
    pt.v.push_back(T(0));
    T v(0);
    for (const TraceStep<T>& step : trace.steps) {
        if (!step.tx.owner.is_miner)
            v = v + arbitragable_profit(trace.initial, step.tx, curve, market);
        pt.phi.push_back(potential(step.post, curve, market));
        pt.v.push_back(v);
    }
    return pt;
}

}  // namespace gsr

// Transaction execution semantics: fee handling, traces, miner profit accounting.
#pragma once

#include "gsr/curve.hpp"
#include "gsr/numeric.hpp"

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gsr {

enum class Side { SellX, SellY };

inline const char* side_name(Side s) { return s == Side::SellX ? "sell_x" : "sell_y"; }

struct Owner {
    bool is_miner = false;
    int user_id = 0;  // meaningful only when !is_miner

    static Owner miner() { return Owner{true, 0}; }
    static Owner user(int id) { return Owner{false, id}; }
    friend bool operator==(const Owner&, const Owner&) = default;
};

template <typename T>
struct Transaction {
    Side side;
    T quantity;  // gross amount the seller pays in
    Owner owner;

    Transaction(Side side_, T quantity_, Owner owner_)
        : side(side_), quantity(std::move(quantity_)), owner(owner_) {
        if (!(quantity > 0)) throw std::invalid_argument("transaction quantity must be positive");
    }
};

template <typename T>
struct MarketContext {
    T p_x, p_y;  // exogenous fixed prices
    T fee;       // trading fee fraction, 0 <= fee < 1

    MarketContext(T p_x_, T p_y_, T fee_)
        : p_x(std::move(p_x_)), p_y(std::move(p_y_)), fee(std::move(fee_)) {
        if (!(p_x > 0) || !(p_y > 0)) throw std::domain_error("market prices must be positive");
        if (fee < 0 || !(fee < 1)) throw std::domain_error("fee must lie in [0, 1)");
    }
};

template <typename T>
struct PoolState {
    T x, y;
};

template <typename T>
bool on_curve(const PoolState<T>& s, const CurveParams<T>& curve) {
    if (!(s.x > 0) || !(s.y > 0)) return false;
    if constexpr (scalar_traits<T>::exact) {
        return s.x * s.y == curve.constant;
    } else {
        return scalar_traits<T>::eq_rel(s.x * s.y, curve.constant, kReserveAbsTol);
    }
}

class ExecutionError : public std::runtime_error {
public:
    ExecutionError(std::size_t index_, const std::string& what_)
        : std::runtime_error("transaction " + std::to_string(index_) + ": " + what_),
          index(index_) {}
    std::size_t index;
};

// Executes one transaction: the pool keeps fee*quantity out of the reserve update and
// the seller receives the drop in the opposite reserve.
template <typename T>
std::pair<PoolState<T>, T> apply_tx(const PoolState<T>& s, const Transaction<T>& tx,
                                    const CurveParams<T>& curve, const T& fee) {
    const T one(1);
    PoolState<T> next = s;
    T received;
    if (tx.side == Side::SellX) {
        next.x = s.x + (one - fee) * tx.quantity;
        next.y = reserve_y(curve, next.x);
        received = s.y - next.y;
    } else {
        next.y = s.y + (one - fee) * tx.quantity;
        next.x = reserve_x(curve, next.y);
        received = s.x - next.x;
    }
    if constexpr (!scalar_traits<T>::exact) {
        if (!std::isfinite(next.x) || !std::isfinite(next.y) || next.x <= 0.0 || next.y <= 0.0)
            throw std::overflow_error("reserve update overflowed the floating range");
    }
    if (received < 0) received = T(0);  // guards float rounding; exact mode never goes negative
    return {next, received};
}

template <typename T>
struct TraceStep {
    Transaction<T> tx;
    PoolState<T> pre, post;
    T paid;      // gross quantity handed over by the seller
    T received;  // net amount of the opposite token
};

template <typename T>
struct ExecutionTrace {
    PoolState<T> initial;
    std::vector<TraceStep<T>> steps;
    std::vector<T> cum_miner_profit;  // one entry per step, valued at market prices
};

namespace detail {

// Miner profit increment via the reserve-delta formula; paid/received must agree with it.
template <typename T>
T profit_delta_from_reserves(const TraceStep<T>& step, const MarketContext<T>& market) {
    const T one(1);
    T dx = step.pre.x - step.post.x;
    T dy = step.pre.y - step.post.y;
    T denom_x = step.post.x > step.pre.x ? one - market.fee : one;
    T denom_y = step.post.y > step.pre.y ? one - market.fee : one;
    return dx / denom_x * market.p_x + dy / denom_y * market.p_y;
}

}  // namespace detail

template <typename T>
ExecutionTrace<T> execute_sequence(const PoolState<T>& s0, const std::vector<Transaction<T>>& txs,
                                   const CurveParams<T>& curve, const MarketContext<T>& market) {
    ExecutionTrace<T> trace;
    trace.initial = s0;
    trace.steps.reserve(txs.size());
    trace.cum_miner_profit.reserve(txs.size());
    PoolState<T> state = s0;
    T profit(0);
    for (std::size_t i = 0; i < txs.size(); ++i) {
        const Transaction<T>& tx = txs[i];
        PoolState<T> next;
        T received;
        try {
            auto applied = apply_tx(state, tx, curve, market.fee);
            next = applied.first;
            received = applied.second;
        } catch (const std::exception& e) {
            throw ExecutionError(i, e.what());
        }
        TraceStep<T> step{tx, state, next, tx.quantity, received};
        if (tx.owner.is_miner) {
            T direct = tx.side == Side::SellX ? received * market.p_y - tx.quantity * market.p_x
                                              : received * market.p_x - tx.quantity * market.p_y;
            T formula = detail::profit_delta_from_reserves(step, market);
            if (!scalar_traits<T>::eq_rel(direct, formula, kReserveAbsTol))
                throw ExecutionError(i, "profit accounting mismatch between paid/received and reserve deltas");
            profit = profit + formula;
        }
        trace.steps.push_back(std::move(step));
        trace.cum_miner_profit.push_back(profit);
        state = next;
    }
    return trace;
}

// Final miner profit, recomputed from reserve deltas and checked against the stored running sum.
template <typename T>
T miner_profit(const ExecutionTrace<T>& trace, const MarketContext<T>& market) {
    T profit(0);
    for (const TraceStep<T>& step : trace.steps)
        if (step.tx.owner.is_miner) profit = profit + detail::profit_delta_from_reserves(step, market);
    if (!trace.cum_miner_profit.empty() &&
        !scalar_traits<T>::eq_rel(profit, trace.cum_miner_profit.back(), kReserveAbsTol))
        throw std::logic_error("trace cumulative miner profit disagrees with reserve deltas");
    return profit;
}

// Per-user list of (gross sold, net received) pairs, in execution order.
template <typename T>
std::map<int, std::vector<std::pair<T, T>>> user_receipts(const ExecutionTrace<T>& trace) {
    std::map<int, std::vector<std::pair<T, T>>> receipts;
    for (const TraceStep<T>& step : trace.steps)
        if (!step.tx.owner.is_miner)
            receipts[step.tx.owner.user_id].emplace_back(step.paid, step.received);
    return receipts;
}

// What the transaction would return if executed alone from s0.
template <typename T>
T standalone_receipt(const PoolState<T>& s0, const Transaction<T>& tx, const CurveParams<T>& curve,
                     const T& fee) {
    return apply_tx(s0, tx, curve, fee).second;
}

}  // namespace gsr

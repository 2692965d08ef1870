// Greedy sequencing rule: order verification and order generation.
#pragma once

#include "gsr/exchange.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

namespace gsr {

enum class GsrViolation { WrongDirectionX, WrongDirectionY };

inline const char* violation_name(GsrViolation v) {
    return v == GsrViolation::WrongDirectionX ? "wrong_direction_x" : "wrong_direction_y";
}

struct OrderViolation {
    std::size_t position;  // 1-based position in the sequence
    GsrViolation reason;
};

struct OrderWitness {
    std::vector<std::size_t> order;  // the order that was checked, as input indices
    bool valid = true;
    std::optional<OrderViolation> first_violation;
};

// A position may sell X only while the x reserve is at or below its starting level,
// unless every later transaction also sells X (and symmetrically for Y).
template <typename T>
OrderWitness verify_gsr(const PoolState<T>& s0, const std::vector<Transaction<T>>& txs,
                        const CurveParams<T>& curve, const T& fee) {
    using traits = scalar_traits<T>;
    const std::size_t n = txs.size();
    OrderWitness witness;
    witness.order.resize(n);
    for (std::size_t i = 0; i < n; ++i) witness.order[i] = i;

    // suffix_x[i] == true when txs[i..n) are all SellX (suffix_x[n] vacuously true)
    std::vector<char> suffix_x(n + 1, 1), suffix_y(n + 1, 1);
    for (std::size_t i = n; i-- > 0;) {
        suffix_x[i] = suffix_x[i + 1] && txs[i].side == Side::SellX;
        suffix_y[i] = suffix_y[i + 1] && txs[i].side == Side::SellY;
    }

    PoolState<T> state = s0;
    for (std::size_t i = 0; i < n; ++i) {
        if (txs[i].side == Side::SellX) {
            if (!traits::leq(state.x, s0.x) && !suffix_x[i + 1]) {
                witness.valid = false;
                witness.first_violation = OrderViolation{i + 1, GsrViolation::WrongDirectionX};
                return witness;
            }
        } else {
            if (!traits::leq(state.y, s0.y) && !suffix_y[i + 1]) {
                witness.valid = false;
                witness.first_violation = OrderViolation{i + 1, GsrViolation::WrongDirectionY};
                return witness;
            }
        }
        state = apply_tx(state, txs[i], curve, fee).first;
    }
    return witness;
}

enum class Tiebreak { InputOrder, ByQuantityAsc };

// Builds an order accepted by verify_gsr: sell into whichever reserve sits below its start,
// with the tiebreak deciding among candidates when the state is back at the start.
template <typename T>
std::vector<Transaction<T>> greedy_order(const PoolState<T>& s0,
                                         const std::vector<Transaction<T>>& txs,
                                         const CurveParams<T>& curve, const T& fee,
                                         Tiebreak tiebreak = Tiebreak::InputOrder) {
    using traits = scalar_traits<T>;
    std::vector<std::size_t> pending_x, pending_y;
    for (std::size_t i = 0; i < txs.size(); ++i)
        (txs[i].side == Side::SellX ? pending_x : pending_y).push_back(i);
    if (tiebreak == Tiebreak::ByQuantityAsc) {
        auto by_qty = [&](std::size_t a, std::size_t b) {
            if (txs[a].quantity != txs[b].quantity) return txs[a].quantity < txs[b].quantity;
            return a < b;
        };
        std::sort(pending_x.begin(), pending_x.end(), by_qty);
        std::sort(pending_y.begin(), pending_y.end(), by_qty);
    }

    auto key = [&](std::size_t idx) {
        return tiebreak == Tiebreak::ByQuantityAsc ? std::pair<T, std::size_t>(txs[idx].quantity, idx)
                                                   : std::pair<T, std::size_t>(T(0), idx);
    };

    std::vector<Transaction<T>> ordered;
    ordered.reserve(txs.size());
    PoolState<T> state = s0;
    std::size_t hx = 0, hy = 0;
    while (hx < pending_x.size() || hy < pending_y.size()) {
        bool has_x = hx < pending_x.size();
        bool has_y = hy < pending_y.size();
        bool at_start = traits::leq(state.x, s0.x) && traits::leq(s0.x, state.x);
        bool pick_x;
        if (!has_y) {
            pick_x = true;
        } else if (!has_x) {
            pick_x = false;
        } else if (at_start) {
            pick_x = key(pending_x[hx]) < key(pending_y[hy]);
        } else {
            pick_x = state.x < s0.x;
        }
        std::size_t idx = pick_x ? pending_x[hx++] : pending_y[hy++];
        state = apply_tx(state, txs[idx], curve, fee).first;
        ordered.push_back(txs[idx]);
    }
    return ordered;
}

}  // namespace gsr

// Miner strategies: provably optimal zero-fee extraction, exhaustive search for small
// fee-bearing instances, and the Partition reduction built on top of it.
#pragma once

#include "gsr/arbitrage.hpp"
#include "gsr/sequencing.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

namespace gsr {

template <typename T>
struct Strategy {
    std::vector<std::size_t> chosen_subset;  // indices into the user transaction list
    std::vector<Transaction<T>> sequence;    // full execution order, miner moves included
    T declared_profit{0};
};

template <typename T>
struct SearchConfig {
    std::size_t max_n = 8;        // user transaction cap for the exhaustive search
    std::vector<T> extra_targets; // additional x-reserve targets for miner insertions
    int threads = 1;
};

class SizeLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Zero-fee optimum: execute every user transaction from the centered state and follow each
// with the miner trade that restores the start; the total equals the additive upper bound.
template <typename T>
Strategy<T> optimal_f0(const PoolState<T>& s0, const std::vector<Transaction<T>>& user_txs,
                       const CurveParams<T>& curve, const MarketContext<T>& market) {
    if (!(market.fee == 0))
        throw std::domain_error("optimal_f0: fee must be zero; use brute_force_optimal");
    require_centered(s0, curve, market, "optimal_f0");

    Strategy<T> strat;
    strat.chosen_subset.reserve(user_txs.size());
    PoolState<T> state = s0;
    for (std::size_t i = 0; i < user_txs.size(); ++i) {
        strat.chosen_subset.push_back(i);
        strat.sequence.push_back(user_txs[i]);
        state = apply_tx(state, user_txs[i], curve, market.fee).first;
        if (user_txs[i].side == Side::SellX) {
            T qty = s0.y - state.y;
            if (qty > 0) {
                Transaction<T> restore(Side::SellY, qty, Owner::miner());
                strat.sequence.push_back(restore);
                state = apply_tx(state, restore, curve, market.fee).first;
            }
        } else {
            T qty = s0.x - state.x;
            if (qty > 0) {
                Transaction<T> restore(Side::SellX, qty, Owner::miner());
                strat.sequence.push_back(restore);
                state = apply_tx(state, restore, curve, market.fee).first;
            }
        }
    }
    ExecutionTrace<T> trace = execute_sequence(s0, strat.sequence, curve, market);
    strat.declared_profit = miner_profit(trace, market);
    return strat;
}

namespace detail {

enum class GsrMode { Free, ForcedX, ForcedY };

// Validity of placing `side` next, given the running escape state. Returns the child mode,
// or nothing when the placement breaks the sequencing rule.
template <typename T>
std::optional<GsrMode> gsr_placement(GsrMode mode, const PoolState<T>& state,
                                     const PoolState<T>& s0, Side side) {
    using traits = scalar_traits<T>;
    switch (mode) {
        case GsrMode::ForcedX:
            return side == Side::SellX ? std::optional<GsrMode>(GsrMode::ForcedX) : std::nullopt;
        case GsrMode::ForcedY:
            return side == Side::SellY ? std::optional<GsrMode>(GsrMode::ForcedY) : std::nullopt;
        case GsrMode::Free:
            if (side == Side::SellX)
                return traits::leq(state.x, s0.x) ? GsrMode::Free : GsrMode::ForcedX;
            return traits::leq(state.y, s0.y) ? GsrMode::Free : GsrMode::ForcedY;
    }
    return std::nullopt;
}

template <typename T>
using SeqEncoding = std::vector<std::tuple<int, int, T, long>>;  // (is_miner, side, qty, user idx)

template <typename T>
struct PlacedEntry {
    Transaction<T> tx;
    long user_index;  // -1 for miner moves
};

template <typename T>
SeqEncoding<T> encode_sequence(const std::vector<PlacedEntry<T>>& seq) {
    SeqEncoding<T> enc;
    enc.reserve(seq.size());
    for (const PlacedEntry<T>& e : seq)
        enc.emplace_back(e.tx.owner.is_miner ? 1 : 0, e.tx.side == Side::SellX ? 0 : 1,
                         e.tx.quantity, e.user_index);
    return enc;
}

template <typename T>
struct Incumbent {
    T profit{0};
    SeqEncoding<T> enc;  // empty strategy is always feasible, so this starts as the incumbent
    std::vector<PlacedEntry<T>> seq;
    std::mutex mutex;
};

template <typename T>
struct SearchContext {
    const PoolState<T>& s0;
    const CurveParams<T>& curve;
    const MarketContext<T>& market;
    const std::vector<Transaction<T>>& users;
    std::vector<T> ap;       // arbitragable profit per user transaction
    ArbBounds<T> bounds;
    std::vector<T> targets;  // candidate post-move x reserves for miner insertions
    Incumbent<T> incumbent;
};

template <typename T>
struct SearchNode {
    PoolState<T> state;
    T u{0};            // miner profit so far
    T remaining_ap{0};
    std::uint32_t used = 0;
    GsrMode mode = GsrMode::Free;
    bool last_was_miner = false;
    bool prev_is_user = false;  // adjacency info for canonical same-side ordering
    Side prev_side = Side::SellX;
    T prev_qty{0};
    long prev_idx = -1;
};

template <typename T>
void update_incumbent(SearchContext<T>& ctx, const T& profit,
                      const std::vector<PlacedEntry<T>>& seq) {
    std::lock_guard<std::mutex> lock(ctx.incumbent.mutex);
    if (profit < ctx.incumbent.profit) return;
    SeqEncoding<T> enc = encode_sequence(seq);
    if (profit == ctx.incumbent.profit && !(enc < ctx.incumbent.enc)) return;
    ctx.incumbent.profit = profit;
    ctx.incumbent.enc = std::move(enc);
    ctx.incumbent.seq = seq;
}

template <typename T>
bool prune(SearchContext<T>& ctx, const SearchNode<T>& node) {
    T bound = node.u;
    if (node.mode == GsrMode::Free)
        bound = bound + potential(node.state, ctx.curve, ctx.market, ctx.bounds) + node.remaining_ap;
    std::lock_guard<std::mutex> lock(ctx.incumbent.mutex);
    if constexpr (scalar_traits<T>::exact) {
        return bound < ctx.incumbent.profit;
    } else {
        double scale = std::max(1.0, std::fabs(scalar_traits<T>::to_double(ctx.incumbent.profit)));
        return scalar_traits<T>::to_double(bound) <
               scalar_traits<T>::to_double(ctx.incumbent.profit) - kProfitRelTol * scale;
    }
}

// Miner move that lands the x reserve on `target`, or nothing for a null/invalid move.
template <typename T>
std::optional<Transaction<T>> miner_move_to(const SearchContext<T>& ctx, const PoolState<T>& state,
                                            const T& target) {
    using traits = scalar_traits<T>;
    const T one(1);
    if (traits::leq(state.x, target) && traits::leq(target, state.x)) return std::nullopt;
    if (target > state.x) {
        T qty = (target - state.x) / (one - ctx.market.fee);
        if (!(qty > 0)) return std::nullopt;
        return Transaction<T>(Side::SellX, qty, Owner::miner());
    }
    T qty = (reserve_y(ctx.curve, target) - state.y) / (one - ctx.market.fee);
    if (!(qty > 0)) return std::nullopt;
    return Transaction<T>(Side::SellY, qty, Owner::miner());
}

template <typename T>
void search_dfs(SearchContext<T>& ctx, const SearchNode<T>& node,
                std::vector<PlacedEntry<T>>& seq) {
    if (prune(ctx, node)) return;
    const std::size_t n = ctx.users.size();

    for (std::size_t i = 0; i < n; ++i) {
        if (node.used & (std::uint32_t{1} << i)) continue;
        const Transaction<T>& tx = ctx.users[i];
        // identical transactions are placed in index order
        bool duplicate_pending = false;
        for (std::size_t j = 0; j < i && !duplicate_pending; ++j)
            duplicate_pending = !(node.used & (std::uint32_t{1} << j)) &&
                                ctx.users[j].side == tx.side && ctx.users[j].quantity == tx.quantity;
        if (duplicate_pending) continue;
        // adjacent same-side user runs are order-insensitive; keep ascending (qty, index)
        if (node.prev_is_user && node.prev_side == tx.side &&
            (tx.quantity < node.prev_qty ||
             (tx.quantity == node.prev_qty && static_cast<long>(i) < node.prev_idx)))
            continue;
        auto mode2 = gsr_placement(node.mode, node.state, ctx.s0, tx.side);
        if (!mode2) continue;

        SearchNode<T> child = node;
        child.state = apply_tx(node.state, tx, ctx.curve, ctx.market.fee).first;
        child.remaining_ap = node.remaining_ap - ctx.ap[i];
        child.used |= std::uint32_t{1} << i;
        child.mode = *mode2;
        child.last_was_miner = false;
        child.prev_is_user = true;
        child.prev_side = tx.side;
        child.prev_qty = tx.quantity;
        child.prev_idx = static_cast<long>(i);
        seq.push_back(PlacedEntry<T>{tx, static_cast<long>(i)});
        // no incumbent update: a trailing user transaction never beats its own prefix
        search_dfs(ctx, child, seq);
        seq.pop_back();
    }

    if (node.last_was_miner || node.mode != GsrMode::Free) return;
    for (const T& target : ctx.targets) {
        auto tx = miner_move_to(ctx, node.state, target);
        if (!tx) continue;
        auto mode2 = gsr_placement(node.mode, node.state, ctx.s0, tx->side);
        if (!mode2 || *mode2 != GsrMode::Free) continue;  // one-sided tails only lose money
        auto [next, received] = apply_tx(node.state, *tx, ctx.curve, ctx.market.fee);
        T delta = tx->side == Side::SellX ? received * ctx.market.p_y - tx->quantity * ctx.market.p_x
                                          : received * ctx.market.p_x - tx->quantity * ctx.market.p_y;
        SearchNode<T> child = node;
        child.state = next;
        child.u = node.u + delta;
        child.mode = GsrMode::Free;
        child.last_was_miner = true;
        child.prev_is_user = false;
        seq.push_back(PlacedEntry<T>{*tx, -1});
        update_incumbent(ctx, child.u, seq);
        search_dfs(ctx, child, seq);
        seq.pop_back();
    }
}

}  // namespace detail

// Exhaustive optimum over subsets, GSR-valid interleavings, and single miner insertions
// whose post-move x reserve hits {lx, rx, x0} plus any configured extra targets.
template <typename T>
Strategy<T> brute_force_optimal(const PoolState<T>& s0, const std::vector<Transaction<T>>& user_txs,
                                const CurveParams<T>& curve, const MarketContext<T>& market,
                                const SearchConfig<T>& config = {}) {
    if (user_txs.size() > config.max_n || user_txs.size() > 31)
        throw SizeLimitError("brute_force_optimal: instance exceeds the configured size limit");
    require_centered(s0, curve, market, "brute_force_optimal");

    detail::SearchContext<T> ctx{s0, curve, market, user_txs, {}, arb_bounds(curve, market), {}, {}};
    T ap_total(0);
    ctx.ap.reserve(user_txs.size());
    for (const Transaction<T>& tx : user_txs) {
        ctx.ap.push_back(arbitragable_profit(s0, tx, curve, market));
        ap_total = ap_total + ctx.ap.back();
    }
    ctx.targets = {ctx.bounds.lx, ctx.bounds.rx, s0.x};
    for (const T& t : config.extra_targets)
        if (t > 0) ctx.targets.push_back(t);
    std::sort(ctx.targets.begin(), ctx.targets.end());
    ctx.targets.erase(std::unique(ctx.targets.begin(), ctx.targets.end()), ctx.targets.end());

    detail::SearchNode<T> root;
    root.state = s0;
    root.remaining_ap = ap_total;

    // Top-level branches are independent; workers share only the incumbent, and pruning is
    // strictly-worse-only, so every profit-maximal leaf is reached under any interleaving.
    struct Job {
        detail::SearchNode<T> node;
        detail::PlacedEntry<T> first;
    };
    std::vector<Job> jobs;
    {
        std::vector<detail::PlacedEntry<T>> seq;
        detail::SearchContext<T>* c = &ctx;
        const std::size_t n = user_txs.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Transaction<T>& tx = user_txs[i];
            bool duplicate_pending = false;
            for (std::size_t j = 0; j < i && !duplicate_pending; ++j)
                duplicate_pending =
                    c->users[j].side == tx.side && c->users[j].quantity == tx.quantity;
            if (duplicate_pending) continue;
            auto mode2 = detail::gsr_placement(root.mode, root.state, ctx.s0, tx.side);
            if (!mode2) continue;
            detail::SearchNode<T> child = root;
            child.state = apply_tx(root.state, tx, curve, market.fee).first;
            child.remaining_ap = ap_total - ctx.ap[i];
            child.used = std::uint32_t{1} << i;
            child.mode = *mode2;
            child.prev_is_user = true;
            child.prev_side = tx.side;
            child.prev_qty = tx.quantity;
            child.prev_idx = static_cast<long>(i);
            jobs.push_back(Job{child, detail::PlacedEntry<T>{tx, static_cast<long>(i)}});
        }
        for (const T& target : ctx.targets) {
            auto tx = detail::miner_move_to(ctx, root.state, target);
            if (!tx) continue;
            auto mode2 = detail::gsr_placement(root.mode, root.state, ctx.s0, tx->side);
            if (!mode2 || *mode2 != detail::GsrMode::Free) continue;
            auto [next, received] = apply_tx(root.state, *tx, curve, market.fee);
            T delta = tx->side == Side::SellX
                          ? received * market.p_y - tx->quantity * market.p_x
                          : received * market.p_x - tx->quantity * market.p_y;
            detail::SearchNode<T> child = root;
            child.state = next;
            child.u = delta;
            child.last_was_miner = true;
            jobs.push_back(Job{child, detail::PlacedEntry<T>{*tx, -1}});
        }
    }

    auto run_job = [&ctx](const Job& job) {
        std::vector<detail::PlacedEntry<T>> seq{job.first};
        if (job.first.user_index < 0) detail::update_incumbent(ctx, job.node.u, seq);
        detail::search_dfs(ctx, job.node, seq);
    };
    int threads = std::max(1, config.threads);
    if (threads == 1 || jobs.size() <= 1) {
        for (const Job& job : jobs) run_job(job);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1))
                run_job(jobs[i]);
        };
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    Strategy<T> strat;
    strat.declared_profit = ctx.incumbent.profit;
    for (const detail::PlacedEntry<T>& e : ctx.incumbent.seq) {
        strat.sequence.push_back(e.tx);
        if (e.user_index >= 0) strat.chosen_subset.push_back(static_cast<std::size_t>(e.user_index));
    }
    std::sort(strat.chosen_subset.begin(), strat.chosen_subset.end());
    return strat;
}

template <typename T>
struct Decision {
    bool achieves_bound = false;
    std::optional<Strategy<T>> witness;
    T best_profit{0};
    T upper_bound{0};
};

// Does some strategy reach the additive upper bound exactly?
template <typename T>
Decision<T> achieves_upper_bound(const PoolState<T>& s0, const std::vector<Transaction<T>>& user_txs,
                                 const CurveParams<T>& curve, const MarketContext<T>& market,
                                 const SearchConfig<T>& config = {}) {
    Decision<T> decision;
    decision.upper_bound = upper_bound_m(s0, user_txs, curve, market);
    Strategy<T> best = brute_force_optimal(s0, user_txs, curve, market, config);
    decision.best_profit = best.declared_profit;
    if constexpr (scalar_traits<T>::exact) {
        decision.achieves_bound = best.declared_profit == decision.upper_bound;
    } else {
        decision.achieves_bound =
            scalar_traits<T>::eq_rel(best.declared_profit, decision.upper_bound, kCenteredRelTol);
    }
    if (decision.achieves_bound) decision.witness = std::move(best);
    return decision;
}

// Partition reduction instance: n sell-X orders sized by the integers plus two large sell-Y
// orders; the bound is attainable exactly when a subset of the integers sums to half the total.
struct PartitionInstance {
    std::vector<long long> integers;
    Rational half_sum;  // t
    Rational q_star;    // quantity of each sell-Y order
    CurveParams<Rational> curve;
    PoolState<Rational> initial_state;
    MarketContext<Rational> market;
    std::vector<Transaction<Rational>> transactions;
};

inline PartitionInstance gen_partition_instance(const std::vector<long long>& integers,
                                                const Rational& fee, const Rational& p_x,
                                                const Rational& p_y) {
    if (integers.empty()) throw std::invalid_argument("gen_partition_instance: no integers given");
    for (long long a : integers)
        if (a <= 0) throw std::invalid_argument("gen_partition_instance: integers must be positive");
    if (!(fee > 0) || !(fee < 1))
        throw std::domain_error("gen_partition_instance: fee must lie in (0, 1)");
    const Rational one(1);
    auto root_fee = scalar_traits<Rational>::sqrt(one - fee);
    if (!root_fee)
        throw std::domain_error("gen_partition_instance: sqrt(1 - fee) must be rational");

    Rational sum(0);
    for (long long a : integers) sum += Rational(a);
    Rational t = sum / 2;
    for (long long a : integers)
        if (Rational(a) > t)
            throw std::domain_error(
                "gen_partition_instance: an integer exceeds half the total; the answer is trivially no");

    Rational x0 = (one - fee) * t / (one - *root_fee);
    Rational k = x0 * x0 * p_x / p_y;
    CurveParams<Rational> curve = constant_product(k);
    PoolState<Rational> s0{x0, k / x0};
    MarketContext<Rational> market(p_x, p_y, fee);

    Rational lx = *root_fee * x0;
    if (x0 - lx != (one - fee) * t)
        throw std::logic_error("gen_partition_instance: bound offset mismatch");
    Rational q_threshold = (k / lx - s0.y) / (one - fee);
    Rational q_star = q_threshold * Rational(6, 5);
    if (!(reserve_x(curve, s0.y + (one - fee) * q_star) < lx))
        throw std::logic_error("gen_partition_instance: sell-Y order fails to cross the bound");

    PartitionInstance inst{integers, t, q_star, curve, s0, market, {}};
    int uid = 1;
    for (long long a : integers)
        inst.transactions.emplace_back(Side::SellX, Rational(a), Owner::user(uid++));
    inst.transactions.emplace_back(Side::SellY, q_star, Owner::user(uid++));
    inst.transactions.emplace_back(Side::SellY, q_star, Owner::user(uid++));

    for (std::size_t i = 0; i < integers.size(); ++i)
        if (arbitragable_profit(s0, inst.transactions[i], curve, market) != 0)
            throw std::logic_error("gen_partition_instance: sell-X order is not arbitrage-free");
    return inst;
}

// Full reduction pipeline: returns indices of a subset summing to half the total, when one exists.
inline std::optional<std::vector<std::size_t>> solve_partition_via_mev(
    const std::vector<long long>& integers, const Rational& fee,
    const SearchConfig<Rational>& config = {}) {
    Rational sum(0);
    for (long long a : integers) sum += Rational(a);
    Rational t = sum / 2;
    for (long long a : integers)
        if (Rational(a) > t) return std::nullopt;  // no balanced split can contain it

    PartitionInstance inst = gen_partition_instance(integers, fee, Rational(1), Rational(1));
    Decision<Rational> decision =
        achieves_upper_bound(inst.initial_state, inst.transactions, inst.curve, inst.market, config);
    if (!decision.achieves_bound) return std::nullopt;

    // the witness executes the chosen integers strictly between the two large sell-Y orders
    const std::vector<Transaction<Rational>>& seq = decision.witness->sequence;
    std::vector<std::size_t> subset;
    int selly_seen = 0;
    for (const Transaction<Rational>& tx : seq) {
        if (tx.owner.is_miner) continue;
        if (tx.side == Side::SellY) {
            ++selly_seen;
            continue;
        }
        if (selly_seen == 1) subset.push_back(static_cast<std::size_t>(tx.owner.user_id - 1));
    }
    if (selly_seen != 2) throw std::logic_error("solve_partition_via_mev: malformed witness");
    Rational picked(0);
    for (std::size_t idx : subset) picked += Rational(integers[idx]);
    if (picked != t) throw std::logic_error("solve_partition_via_mev: witness subset does not balance");
    std::sort(subset.begin(), subset.end());
    return subset;
}

}  // namespace gsr

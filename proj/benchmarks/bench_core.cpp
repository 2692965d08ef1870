// Microbenchmarks for the hot paths: execution, verification, ordering, and search.
#include "gsr/strategy.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using gsr::Owner;
using gsr::Rational;
using gsr::Side;

namespace {

template <typename T>
std::vector<gsr::Transaction<T>> make_users(int n) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> frac(0.01, 0.3);
    std::bernoulli_distribution coin(0.5);
    std::vector<gsr::Transaction<T>> txs;
    for (int i = 0; i < n; ++i) {
        Side side = coin(rng) ? Side::SellX : Side::SellY;
        double q = 100.0 * frac(rng);
        if constexpr (gsr::scalar_traits<T>::exact)
            txs.emplace_back(side, Rational(static_cast<long long>(q * 1000), 1000),
                             Owner::user(i + 1));
        else
            txs.emplace_back(side, q, Owner::user(i + 1));
    }
    return txs;
}

void bm_apply_tx_double(benchmark::State& state) {
    auto curve = gsr::constant_product(10000.0);
    gsr::PoolState<double> s{100.0, 100.0};
    gsr::Transaction<double> tx(Side::SellX, 10.0, Owner::user(1));
    for (auto _ : state) benchmark::DoNotOptimize(gsr::apply_tx(s, tx, curve, 0.19));
}
BENCHMARK(bm_apply_tx_double);

void bm_apply_tx_rational(benchmark::State& state) {
    auto curve = gsr::constant_product(Rational(10000));
    gsr::PoolState<Rational> s{Rational(100), Rational(100)};
    gsr::Transaction<Rational> tx(Side::SellX, Rational(10), Owner::user(1));
    Rational fee(19, 100);
    for (auto _ : state) benchmark::DoNotOptimize(gsr::apply_tx(s, tx, curve, fee));
}
BENCHMARK(bm_apply_tx_rational);

void bm_execute_sequence(benchmark::State& state) {
    auto curve = gsr::constant_product(10000.0);
    gsr::PoolState<double> s{100.0, 100.0};
    gsr::MarketContext<double> market(1.0, 1.0, 0.19);
    auto txs = make_users<double>(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(gsr::execute_sequence(s, txs, curve, market));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_execute_sequence)->Arg(16)->Arg(256);

void bm_verify_gsr(benchmark::State& state) {
    auto curve = gsr::constant_product(10000.0);
    gsr::PoolState<double> s{100.0, 100.0};
    auto txs = make_users<double>(static_cast<int>(state.range(0)));
    auto ordered = gsr::greedy_order(s, txs, curve, 0.19);
    for (auto _ : state) benchmark::DoNotOptimize(gsr::verify_gsr(s, ordered, curve, 0.19));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_verify_gsr)->Arg(16)->Arg(256);

void bm_greedy_order(benchmark::State& state) {
    auto curve = gsr::constant_product(10000.0);
    gsr::PoolState<double> s{100.0, 100.0};
    auto txs = make_users<double>(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(gsr::greedy_order(s, txs, curve, 0.19,
                                                   gsr::Tiebreak::ByQuantityAsc));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_greedy_order)->Arg(16)->Arg(256);

void bm_arb_bounds(benchmark::State& state) {
    auto curve = gsr::constant_product(10000.0);
    gsr::MarketContext<double> market(1.0, 1.0, 0.19);
    for (auto _ : state) benchmark::DoNotOptimize(gsr::arb_bounds(curve, market));
}
BENCHMARK(bm_arb_bounds);

void bm_optimal_f0(benchmark::State& state) {
    auto curve = gsr::constant_product(Rational(10000));
    gsr::PoolState<Rational> s{Rational(100), Rational(100)};
    gsr::MarketContext<Rational> market(Rational(1), Rational(1), Rational(0));
    auto txs = make_users<Rational>(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(gsr::optimal_f0(s, txs, curve, market));
}
BENCHMARK(bm_optimal_f0)->Arg(8)->Arg(32);

void bm_brute_force_partition(benchmark::State& state) {
    auto inst = gsr::gen_partition_instance({1, 2, 3}, Rational(19, 100), Rational(1), Rational(1));
    for (auto _ : state)
        benchmark::DoNotOptimize(gsr::brute_force_optimal(inst.initial_state, inst.transactions,
                                                          inst.curve, inst.market));
}
BENCHMARK(bm_brute_force_partition);

}  // namespace

BENCHMARK_MAIN();

// Command line front end: verify, execute, analyze, optimize, decide, reduce, axioms.
#include "gsr/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace {

using nlohmann::json;

template <typename F>
int with_scenario(const std::string& path, F&& fn) {
    gsr::LoadedScenario loaded = gsr::load_scenario_file(path);
    return std::visit([&](auto& scenario) { return fn(scenario); }, loaded.scenario);
}

template <typename T>
std::vector<gsr::Transaction<T>> apply_order(const gsr::Scenario<T>& scenario,
                                             const std::vector<std::size_t>& order) {
    if (order.empty()) return scenario.transactions;
    if (order.size() != scenario.transactions.size())
        throw gsr::ScenarioError("order: must list every transaction index exactly once");
    std::vector<char> seen(scenario.transactions.size(), 0);
    std::vector<gsr::Transaction<T>> permuted;
    permuted.reserve(order.size());
    for (std::size_t idx : order) {
        if (idx >= scenario.transactions.size() || seen[idx])
            throw gsr::ScenarioError("order: must be a permutation of 0..n-1");
        seen[idx] = 1;
        permuted.push_back(scenario.transactions[idx]);
    }
    return permuted;
}

template <typename T>
std::vector<T> parse_scalars(const std::vector<std::string>& texts, const char* what) {
    std::vector<T> values;
    values.reserve(texts.size());
    for (const std::string& s : texts) {
        try {
            values.push_back(gsr::scalar_traits<T>::from_string(s));
        } catch (const std::invalid_argument& e) {
            throw gsr::ScenarioError(std::string(what) + ": " + e.what());
        }
    }
    return values;
}

template <typename T>
void require_all_user_owned(const std::vector<gsr::Transaction<T>>& txs) {
    for (const gsr::Transaction<T>& tx : txs)
        if (tx.owner.is_miner)
            throw gsr::ScenarioError(
                "transactions: strategy search expects user-owned transactions only");
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw gsr::ScenarioError("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"greedy sequencing rule engine for constant function market makers"};
    app.fallthrough();
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("--verbose", verbose, "print a human-readable summary on stderr");

    std::string scenario_path;
    std::vector<std::size_t> order;
    std::string strategy_path;
    int threads = 1;
    std::size_t max_n = 8;
    std::vector<std::string> extra_targets;
    std::vector<long long> integers;
    std::string fee_text;
    std::string xlo_text = "1", xhi_text = "1000000";
    std::size_t samples = 10000;

    int exit_code = 0;

    auto* verify = app.add_subcommand("verify", "check a transaction order against the sequencing rule");
    verify->add_option("scenario", scenario_path, "scenario JSON file")->required();
    verify->add_option("--order", order, "transaction indices in execution order")->delimiter(',');
    verify->callback([&] {
        exit_code = with_scenario(scenario_path, [&](auto& sc) {
            auto txs = apply_order(sc, order);
            auto witness = gsr::verify_gsr(sc.initial_state, txs, sc.curve, sc.market.fee);
            if (!order.empty()) witness.order = order;
            std::cout << gsr::witness_to_json(witness) << "\n";
            if (verbose) {
                if (witness.valid)
                    std::cerr << "order valid under the greedy sequencing rule\n";
                else
                    std::cerr << "order invalid at position " << witness.first_violation->position
                              << " (" << gsr::violation_name(witness.first_violation->reason) << ")\n";
            }
            return witness.valid ? 0 : 3;
        });
    });

    auto* execute = app.add_subcommand("execute", "execute transactions and export the trace");
    execute->add_option("scenario", scenario_path, "scenario JSON file")->required();
    auto* exec_order = execute->add_option("--order", order, "transaction indices in execution order");
    exec_order->delimiter(',');
    auto* exec_strategy =
        execute->add_option("--strategy", strategy_path, "execute the sequence from a strategy JSON file");
    exec_strategy->excludes(exec_order);
    execute->callback([&] {
        exit_code = with_scenario(scenario_path, [&](auto& sc) {
            using T = std::decay_t<decltype(sc.initial_state.x)>;
            std::vector<gsr::Transaction<T>> txs;
            if (!strategy_path.empty())
                txs = gsr::strategy_from_json_text<T>(slurp(strategy_path)).sequence;
            else
                txs = apply_order(sc, order);
            auto trace = gsr::execute_sequence(sc.initial_state, txs, sc.curve, sc.market);
            std::cout << gsr::trace_to_jsonl(trace);
            if (verbose)
                std::cerr << "executed " << trace.steps.size() << " transactions, miner profit "
                          << gsr::scalar_traits<T>::to_string(gsr::miner_profit(trace, sc.market))
                          << "\n";
            return 0;
        });
    });

    auto* analyze = app.add_subcommand("analyze", "arbitrage bounds and per-transaction profit bound");
    analyze->add_option("scenario", scenario_path, "scenario JSON file")->required();
    analyze->callback([&] {
        exit_code = with_scenario(scenario_path, [&](auto& sc) {
            using T = std::decay_t<decltype(sc.initial_state.x)>;
            auto bounds = gsr::arb_bounds(sc.curve, sc.market);
            json report{{"L_x", gsr::scalar_traits<T>::to_string(bounds.lx)},
                        {"R_x", gsr::scalar_traits<T>::to_string(bounds.rx)},
                        {"ap", json::array()},
                        {"M", nullptr},
                        {"phi_s0", gsr::scalar_traits<T>::to_string(
                                       gsr::potential(sc.initial_state, sc.curve, sc.market, bounds))}};
            T total(0);
            for (const auto& tx : sc.transactions) {
                T ap = gsr::arbitragable_profit(sc.initial_state, tx, sc.curve, sc.market);
                report["ap"].push_back(gsr::scalar_traits<T>::to_string(ap));
                total = total + ap;
            }
            report["M"] = gsr::scalar_traits<T>::to_string(total);
            std::cout << report.dump() << "\n";
            if (verbose)
                std::cerr << "no-arb interval [" << gsr::scalar_traits<T>::to_string(bounds.lx)
                          << ", " << gsr::scalar_traits<T>::to_string(bounds.rx) << "], M = "
                          << gsr::scalar_traits<T>::to_string(total) << "\n";
            return 0;
        });
    });

    auto add_search_options = [&](CLI::App* sub) {
        sub->add_option("--threads", threads, "worker threads for the search")->check(CLI::PositiveNumber);
        sub->add_option("--max-n", max_n, "largest searchable user transaction count");
        sub->add_option("--extra-target", extra_targets, "additional x-reserve targets for miner moves");
    };

    auto* optimize = app.add_subcommand("optimize", "best miner strategy for the scenario");
    optimize->add_option("scenario", scenario_path, "scenario JSON file")->required();
    add_search_options(optimize);
    optimize->callback([&] {
        exit_code = with_scenario(scenario_path, [&](auto& sc) {
            using T = std::decay_t<decltype(sc.initial_state.x)>;
            require_all_user_owned(sc.transactions);
            gsr::Strategy<T> strat;
            if (sc.market.fee == 0) {
                strat = gsr::optimal_f0(sc.initial_state, sc.transactions, sc.curve, sc.market);
            } else {
                gsr::SearchConfig<T> config;
                config.max_n = max_n;
                config.threads = threads;
                config.extra_targets = parse_scalars<T>(extra_targets, "extra-target");
                strat = gsr::brute_force_optimal(sc.initial_state, sc.transactions, sc.curve,
                                                 sc.market, config);
            }
            T bound = gsr::upper_bound_m(sc.initial_state, sc.transactions, sc.curve, sc.market);
            std::cout << gsr::strategy_to_json(strat, bound) << "\n";
            if (verbose)
                std::cerr << "profit " << gsr::scalar_traits<T>::to_string(strat.declared_profit)
                          << " against bound " << gsr::scalar_traits<T>::to_string(bound) << "\n";
            return 0;
        });
    });

    auto* decide = app.add_subcommand("decide", "does any strategy meet the additive profit bound");
    decide->add_option("scenario", scenario_path, "scenario JSON file")->required();
    add_search_options(decide);
    decide->callback([&] {
        exit_code = with_scenario(scenario_path, [&](auto& sc) {
            using T = std::decay_t<decltype(sc.initial_state.x)>;
            require_all_user_owned(sc.transactions);
            gsr::SearchConfig<T> config;
            config.max_n = max_n;
            config.threads = threads;
            config.extra_targets = parse_scalars<T>(extra_targets, "extra-target");
            auto decision = gsr::achieves_upper_bound(sc.initial_state, sc.transactions, sc.curve,
                                                      sc.market, config);
            json report{{"decision", decision.achieves_bound},
                        {"best_profit", gsr::scalar_traits<T>::to_string(decision.best_profit)},
                        {"upper_bound", gsr::scalar_traits<T>::to_string(decision.upper_bound)},
                        {"witness", nullptr}};
            if (decision.witness)
                report["witness"] =
                    json::parse(gsr::strategy_to_json(*decision.witness, decision.upper_bound));
            std::cout << report.dump() << "\n";
            if (verbose)
                std::cerr << (decision.achieves_bound ? "bound attained\n" : "bound not attained\n");
            return decision.achieves_bound ? 0 : 3;
        });
    });

    auto* reduce = app.add_subcommand("reduce", "solve a Partition instance through the profit bound");
    reduce->add_option("integers", integers, "positive integers to split")->required();
    reduce->add_option("--fee", fee_text, "trading fee with rational sqrt(1-fee), e.g. 19/100")
        ->required();
    reduce->add_option("--threads", threads, "worker threads for the search")->check(CLI::PositiveNumber);
    reduce->add_option("--max-n", max_n, "largest searchable user transaction count");
    reduce->callback([&] {
        gsr::Rational fee;
        try {
            fee = gsr::scalar_traits<gsr::Rational>::from_string(fee_text);
        } catch (const std::invalid_argument& e) {
            throw gsr::ScenarioError(std::string("fee: ") + e.what());
        }
        gsr::SearchConfig<gsr::Rational> config;
        config.max_n = max_n;
        config.threads = threads;
        auto subset = gsr::solve_partition_via_mev(integers, fee, config);
        gsr::Rational sum(0);
        for (long long a : integers) sum += gsr::Rational(a);
        json report{{"found", subset.has_value()},
                    {"indices", nullptr},
                    {"values", nullptr},
                    {"target", gsr::scalar_traits<gsr::Rational>::to_string(sum / 2)}};
        if (subset) {
            json values = json::array();
            for (std::size_t idx : *subset) values.push_back(integers[idx]);
            report["indices"] = *subset;
            report["values"] = values;
        }
        std::cout << report.dump() << "\n";
        if (verbose)
            std::cerr << (subset ? "balanced subset found\n" : "no balanced subset exists\n");
        exit_code = subset ? 0 : 3;
    });

    auto* axioms = app.add_subcommand("axioms", "sample the curve for monotonicity violations");
    axioms->add_option("scenario", scenario_path, "scenario JSON file")->required();
    axioms->add_option("--xlo", xlo_text, "low end of the sampled x range");
    axioms->add_option("--xhi", xhi_text, "high end of the sampled x range");
    axioms->add_option("--samples", samples, "number of grid samples");
    axioms->callback([&] {
        exit_code = with_scenario(scenario_path, [&](auto& sc) {
            using T = std::decay_t<decltype(sc.initial_state.x)>;
            T xlo = parse_scalars<T>({xlo_text}, "xlo").front();
            T xhi = parse_scalars<T>({xhi_text}, "xhi").front();
            auto report = gsr::check_axioms(sc.curve, xlo, xhi, samples);
            std::cout << gsr::axiom_report_to_json(report) << "\n";
            if (verbose)
                std::cerr << (report.ok() ? "axioms hold on the sampled grid\n"
                                          : "axiom violation detected\n");
            return report.ok() ? 0 : 3;
        });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const gsr::SizeLimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}

// Scenario files, strategy reports, and trace export. JSON lives in the .cpp.
#pragma once

#include "gsr/strategy.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gsr {

enum class NumericMode { Exact, Float };

template <typename T>
struct Scenario {
    CurveParams<T> curve;
    PoolState<T> initial_state;
    MarketContext<T> market;
    std::vector<Transaction<T>> transactions;
};

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LoadedScenario {
    NumericMode mode;
    std::variant<Scenario<Rational>, Scenario<double>> scenario;
};

// Parses and validates a scenario document; throws ScenarioError naming field and constraint.
LoadedScenario load_scenario(std::istream& in);
LoadedScenario load_scenario_text(const std::string& text);
LoadedScenario load_scenario_file(const std::string& path);

template <typename T>
std::string scenario_to_json(const Scenario<T>& scenario);

template <typename T>
std::string strategy_to_json(const Strategy<T>& strategy, const T& upper_bound);

template <typename T>
Strategy<T> strategy_from_json_text(const std::string& text);

std::string witness_to_json(const OrderWitness& witness);

// One JSON object per step, then a final summary line.
template <typename T>
std::string trace_to_jsonl(const ExecutionTrace<T>& trace);

template <typename T>
std::string axiom_report_to_json(const AxiomReport<T>& report);

}  // namespace gsr

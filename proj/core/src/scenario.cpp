#include "gsr/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace gsr {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw ScenarioError(message); }

const json& field(const json& j, const char* name, const char* where) {
    auto it = j.find(name);
    if (it == j.end()) fail(std::string(where) + ": missing field '" + name + "'");
    return *it;
}

template <typename T>
T scalar_field(const json& j, const char* name, const char* where) {
    const json& v = field(j, name, where);
    if (!v.is_string())
        fail(std::string(where) + ": field '" + name + "' must be a decimal or p/q string");
    try {
        return scalar_traits<T>::from_string(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
        fail(std::string(where) + ": field '" + name + "': " + e.what());
    }
}

Owner parse_owner(const json& j, const char* where) {
    if (j.is_string()) {
        if (j.get<std::string>() == "miner") return Owner::miner();
        fail(std::string(where) + ": owner string must be 'miner'");
    }
    if (j.is_object() && j.contains("user") && j["user"].is_number_integer())
        return Owner::user(j["user"].get<int>());
    fail(std::string(where) + ": owner must be 'miner' or {\"user\": <int>}");
}

json owner_to_json(const Owner& owner) {
    if (owner.is_miner) return json("miner");
    return json{{"user", owner.user_id}};
}

Side parse_side(const json& j, const char* where) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "sell_x") return Side::SellX;
        if (s == "sell_y") return Side::SellY;
    }
    fail(std::string(where) + ": side must be 'sell_x' or 'sell_y'");
}

template <typename T>
Transaction<T> parse_transaction(const json& j, const char* where) {
    if (!j.is_object()) fail(std::string(where) + ": transaction must be an object");
    Side side = parse_side(field(j, "side", where), where);
    T qty = scalar_field<T>(j, "qty", where);
    Owner owner = parse_owner(field(j, "owner", where), where);
    try {
        return Transaction<T>(side, std::move(qty), owner);
    } catch (const std::invalid_argument& e) {
        fail(std::string(where) + ": " + e.what());
    }
}

template <typename T>
json transaction_to_json(const Transaction<T>& tx) {
    return json{{"side", side_name(tx.side)},
                {"qty", scalar_traits<T>::to_string(tx.quantity)},
                {"owner", owner_to_json(tx.owner)}};
}

template <typename T>
Scenario<T> parse_scenario(const json& root) {
    const json& jcurve = field(root, "curve", "scenario");
    std::string kind = field(jcurve, "kind", "curve").is_string()
                           ? jcurve["kind"].get<std::string>()
                           : std::string();
    if (kind != "constant_product") fail("curve: kind must be 'constant_product'");
    T k = scalar_field<T>(jcurve, "k", "curve");
    if (!(k > 0)) fail("curve: k must be positive");

    const json& jstate = field(root, "state0", "scenario");
    T x = scalar_field<T>(jstate, "x", "state0");
    T y = scalar_field<T>(jstate, "y", "state0");
    if (!(x > 0) || !(y > 0)) fail("state0: reserves must be positive");

    const json& jmarket = field(root, "market", "scenario");
    T p_x = scalar_field<T>(jmarket, "p_x", "market");
    T p_y = scalar_field<T>(jmarket, "p_y", "market");
    T fee = scalar_field<T>(jmarket, "fee", "market");
    if (!(p_x > 0) || !(p_y > 0)) fail("market: prices must be positive");
    if (fee < 0 || !(fee < 1)) fail("market: fee must lie in [0, 1)");

    Scenario<T> scenario{constant_product(std::move(k)), PoolState<T>{std::move(x), std::move(y)},
                         MarketContext<T>(std::move(p_x), std::move(p_y), std::move(fee)),
                         {}};
    if (!on_curve(scenario.initial_state, scenario.curve))
        fail("state0: initial state must lie on the curve (x*y = k)");

    const json& jtxs = field(root, "transactions", "scenario");
    if (!jtxs.is_array()) fail("transactions: must be an array");
    std::size_t index = 0;
    for (const json& jtx : jtxs) {
        std::string where = "transactions[" + std::to_string(index++) + "]";
        scenario.transactions.push_back(parse_transaction<T>(jtx, where.c_str()));
    }

    if constexpr (scalar_traits<T>::exact) {
        const Rational one(1);
        if (!scalar_traits<Rational>::sqrt(one - scenario.market.fee))
            fail("market: exact mode requires sqrt(1 - fee) to be rational; use float mode");
        if (!scalar_traits<Rational>::sqrt(scenario.curve.constant * scenario.market.p_y /
                                           scenario.market.p_x))
            fail("market: exact mode requires sqrt(k*p_y/p_x) to be rational; use float mode");
    }
    return scenario;
}

}  // namespace

LoadedScenario load_scenario(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario_text(buf.str());
}

LoadedScenario load_scenario_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        fail(std::string("scenario: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) fail("scenario: document must be a JSON object");

    NumericMode mode = NumericMode::Float;
    if (root.contains("numeric_mode")) {
        const json& jmode = root["numeric_mode"];
        if (!jmode.is_string()) fail("numeric_mode: must be 'exact' or 'float'");
        std::string m = jmode.get<std::string>();
        if (m == "exact")
            mode = NumericMode::Exact;
        else if (m == "float")
            mode = NumericMode::Float;
        else
            fail("numeric_mode: must be 'exact' or 'float'");
    }
    try {
        if (mode == NumericMode::Exact)
            return LoadedScenario{mode, parse_scenario<Rational>(root)};
        return LoadedScenario{mode, parse_scenario<double>(root)};
    } catch (const ScenarioError&) {
        throw;
    } catch (const std::exception& e) {
        fail(std::string("scenario: ") + e.what());
    }
}

LoadedScenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("scenario: cannot open file '" + path + "'");
    return load_scenario(in);
}

template <typename T>
std::string scenario_to_json(const Scenario<T>& scenario) {
    json root{
        {"curve",
         {{"kind", "constant_product"},
          {"k", scalar_traits<T>::to_string(scenario.curve.constant)}}},
        {"state0",
         {{"x", scalar_traits<T>::to_string(scenario.initial_state.x)},
          {"y", scalar_traits<T>::to_string(scenario.initial_state.y)}}},
        {"market",
         {{"p_x", scalar_traits<T>::to_string(scenario.market.p_x)},
          {"p_y", scalar_traits<T>::to_string(scenario.market.p_y)},
          {"fee", scalar_traits<T>::to_string(scenario.market.fee)}}},
        {"numeric_mode", scalar_traits<T>::exact ? "exact" : "float"},
        {"transactions", json::array()}};
    for (const Transaction<T>& tx : scenario.transactions)
        root["transactions"].push_back(transaction_to_json(tx));
    return root.dump();
}

template <typename T>
std::string strategy_to_json(const Strategy<T>& strategy, const T& upper_bound) {
    json root{{"subset", strategy.chosen_subset},
              {"sequence", json::array()},
              {"profit", scalar_traits<T>::to_string(strategy.declared_profit)},
              {"upper_bound", scalar_traits<T>::to_string(upper_bound)},
              {"gap", scalar_traits<T>::to_string(T(upper_bound - strategy.declared_profit))}};
    for (const Transaction<T>& tx : strategy.sequence)
        root["sequence"].push_back(transaction_to_json(tx));
    return root.dump();
}

template <typename T>
Strategy<T> strategy_from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        fail(std::string("strategy: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) fail("strategy: document must be a JSON object");
    Strategy<T> strategy;
    const json& jsubset = field(root, "subset", "strategy");
    if (!jsubset.is_array()) fail("strategy: subset must be an array of indices");
    for (const json& v : jsubset) {
        if (!v.is_number_unsigned()) fail("strategy: subset entries must be non-negative integers");
        strategy.chosen_subset.push_back(v.get<std::size_t>());
    }
    const json& jseq = field(root, "sequence", "strategy");
    if (!jseq.is_array()) fail("strategy: sequence must be an array");
    std::size_t index = 0;
    for (const json& jtx : jseq) {
        std::string where = "sequence[" + std::to_string(index++) + "]";
        strategy.sequence.push_back(parse_transaction<T>(jtx, where.c_str()));
    }
    strategy.declared_profit = scalar_field<T>(root, "profit", "strategy");
    return strategy;
}

std::string witness_to_json(const OrderWitness& witness) {
    json root{{"valid", witness.valid}, {"order", witness.order}, {"first_violation", nullptr}};
    if (witness.first_violation)
        root["first_violation"] = json{{"position", witness.first_violation->position},
                                       {"reason", violation_name(witness.first_violation->reason)}};
    return root.dump();
}

template <typename T>
std::string trace_to_jsonl(const ExecutionTrace<T>& trace) {
    std::ostringstream out;
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const TraceStep<T>& step = trace.steps[i];
        json line{{"index", i},
                  {"side", side_name(step.tx.side)},
                  {"owner", owner_to_json(step.tx.owner)},
                  {"qty", scalar_traits<T>::to_string(step.tx.quantity)},
                  {"paid", scalar_traits<T>::to_string(step.paid)},
                  {"received", scalar_traits<T>::to_string(step.received)},
                  {"x", scalar_traits<T>::to_string(step.post.x)},
                  {"y", scalar_traits<T>::to_string(step.post.y)},
                  {"miner_profit_cum", scalar_traits<T>::to_string(trace.cum_miner_profit[i])}};
        out << line.dump() << "\n";
    }
    T final_profit = trace.cum_miner_profit.empty() ? T(0) : trace.cum_miner_profit.back();
    const PoolState<T>& last = trace.steps.empty() ? trace.initial : trace.steps.back().post;
    json fin{{"final",
              {{"x", scalar_traits<T>::to_string(last.x)},
               {"y", scalar_traits<T>::to_string(last.y)},
               {"miner_profit", scalar_traits<T>::to_string(final_profit)},
               {"steps", trace.steps.size()}}}};
    out << fin.dump() << "\n";
    return out.str();
}

template <typename T>
std::string axiom_report_to_json(const AxiomReport<T>& report) {
    constexpr std::size_t kMaxListed = 32;
    json root{{"axiom1_ok", report.axiom1_ok},
              {"axiom2_ok", report.axiom2_ok},
              {"samples", report.samples},
              {"violations_total", report.violations.size()},
              {"violations", json::array()}};
    for (std::size_t i = 0; i < report.violations.size() && i < kMaxListed; ++i) {
        const auto& v = report.violations[i];
        root["violations"].push_back(json{{"axiom", v.axiom},
                                          {"x_a", scalar_traits<T>::to_string(v.x_a)},
                                          {"x_b", scalar_traits<T>::to_string(v.x_b)},
                                          {"value_a", scalar_traits<T>::to_string(v.value_a)},
                                          {"value_b", scalar_traits<T>::to_string(v.value_b)}});
    }
    return root.dump();
}

template std::string scenario_to_json<Rational>(const Scenario<Rational>&);
template std::string scenario_to_json<double>(const Scenario<double>&);
template std::string strategy_to_json<Rational>(const Strategy<Rational>&, const Rational&);
template std::string strategy_to_json<double>(const Strategy<double>&, const double&);
template Strategy<Rational> strategy_from_json_text<Rational>(const std::string&);
template Strategy<double> strategy_from_json_text<double>(const std::string&);
template std::string trace_to_jsonl<Rational>(const ExecutionTrace<Rational>&);
template std::string trace_to_jsonl<double>(const ExecutionTrace<double>&);
template std::string axiom_report_to_json<Rational>(const AxiomReport<Rational>&);
template std::string axiom_report_to_json<double>(const AxiomReport<double>&);

}  // namespace gsr

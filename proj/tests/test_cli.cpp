#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "gsr/scenario.hpp"

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunResult run_cli(const std::string& args) {
    std::string out_path = "/tmp/gsrmev_test_out.txt";
    std::string err_path = "/tmp/gsrmev_test_err.txt";
    std::string cmd = std::string(GSRMEV_CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
    int status = std::system(cmd.c_str());
    int code = -1;
    if (status != -1 && WIFEXITED(status)) code = WEXITSTATUS(status);
    return RunResult{code, slurp_file(out_path), slurp_file(err_path)};
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

// (100, 100) on x*y = 10000, unit prices, zero fee: a user trade and its exact restore.
const char* kRoundTrip = R"({
  "numeric_mode": "exact",
  "curve": {"kind": "constant_product", "k": "10000"},
  "state0": {"x": "100", "y": "100"},
  "market": {"p_x": "1", "p_y": "1", "fee": "0"},
  "transactions": [
    {"side": "sell_x", "qty": "10", "owner": {"user": 1}},
    {"side": "sell_y", "qty": "100/11", "owner": "miner"}
  ]
})";

// Front-run, victim, back-run: invalid as given, valid when the victim goes first.
const char* kSandwich = R"({
  "numeric_mode": "exact",
  "curve": {"kind": "constant_product", "k": "10000"},
  "state0": {"x": "100", "y": "100"},
  "market": {"p_x": "1", "p_y": "1", "fee": "0"},
  "transactions": [
    {"side": "sell_x", "qty": "5", "owner": "miner"},
    {"side": "sell_x", "qty": "10", "owner": {"user": 1}},
    {"side": "sell_y", "qty": "9", "owner": "miner"}
  ]
})";

// Two user trades at zero fee; the optimum restores after each and earns 265/231.
const char* kTwoUsers = R"({
  "numeric_mode": "exact",
  "curve": {"kind": "constant_product", "k": "10000"},
  "state0": {"x": "100", "y": "100"},
  "market": {"p_x": "1", "p_y": "1", "fee": "0"},
  "transactions": [
    {"side": "sell_x", "qty": "10", "owner": {"user": 1}},
    {"side": "sell_y", "qty": "5", "owner": {"user": 2}}
  ]
})";

// Two identical large trades under a fee: only one arbitrage is harvestable, so the
// additive bound is strictly out of reach.
const char* kSkewPair = R"({
  "numeric_mode": "exact",
  "curve": {"kind": "constant_product", "k": "10000"},
  "state0": {"x": "100", "y": "100"},
  "market": {"p_x": "1", "p_y": "1", "fee": "19/100"},
  "transactions": [
    {"side": "sell_x", "qty": "20", "owner": {"user": 1}},
    {"side": "sell_x", "qty": "20", "owner": {"user": 2}}
  ]
})";

struct Fixture {
    Fixture() {
        write_file("/tmp/gsrmev_roundtrip.json", kRoundTrip);
        write_file("/tmp/gsrmev_sandwich.json", kSandwich);
        write_file("/tmp/gsrmev_twousers.json", kTwoUsers);
        write_file("/tmp/gsrmev_skewpair.json", kSkewPair);
        auto inst = gsr::gen_partition_instance({1, 2, 3}, gsr::Rational(19, 100), gsr::Rational(1),
                                                gsr::Rational(1));
        gsr::Scenario<gsr::Rational> sc{inst.curve, inst.initial_state, inst.market,
                                        inst.transactions};
        write_file("/tmp/gsrmev_partition.json", gsr::scenario_to_json(sc));
    }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

}  // namespace

TEST_CASE("verify accepts a rule-respecting order") {
    fixture();
    auto r = run_cli("verify /tmp/gsrmev_roundtrip.json");
    CHECK(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["valid"] == true);
    CHECK(j["first_violation"].is_null());
}

TEST_CASE("verify rejects the sandwich and names the violation") {
    fixture();
    auto r = run_cli("verify /tmp/gsrmev_sandwich.json");
    CHECK(r.exit_code == 3);
    auto j = json::parse(r.out);
    CHECK(j["valid"] == false);
    CHECK(j["first_violation"]["position"] == 2);
    CHECK(j["first_violation"]["reason"] == "wrong_direction_x");
}

TEST_CASE("verify honors an explicit order") {
    fixture();
    auto r = run_cli("verify /tmp/gsrmev_sandwich.json --order 0,2,1");
    CHECK(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["valid"] == true);
    CHECK(j["order"] == json::array({0, 2, 1}));

    auto bad = run_cli("verify /tmp/gsrmev_sandwich.json --order 0,0,1");
    CHECK(bad.exit_code == 2);
    auto missing = run_cli("verify /tmp/gsrmev_sandwich.json --order 0,1");
    CHECK(missing.exit_code == 2);
}

TEST_CASE("execute emits a JSONL trace ending in a summary") {
    fixture();
    auto r = run_cli("execute /tmp/gsrmev_roundtrip.json --verbose");
    CHECK(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::vector<json> parsed;
    for (std::string line; std::getline(lines, line);)
        if (!line.empty()) parsed.push_back(json::parse(line));
    REQUIRE(parsed.size() == 3);
    CHECK(parsed[0]["received"] == "100/11");
    CHECK(parsed[1]["owner"] == "miner");
    CHECK(parsed[2]["final"]["x"] == "100");
    CHECK(parsed[2]["final"]["miner_profit"] == "10/11");
    CHECK(r.err.find("miner profit") != std::string::npos);
}

TEST_CASE("analyze reports the no-arb interval and the additive bound") {
    fixture();
    auto r = run_cli("analyze /tmp/gsrmev_roundtrip.json");
    CHECK(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["L_x"] == "100");
    CHECK(j["R_x"] == "100");
    CHECK(j["ap"] == json::array({"10/11", "25/33"}));
    CHECK(j["M"] == "5/3");
    CHECK(j["phi_s0"] == "0");
}

TEST_CASE("optimize output replays to the declared profit") {
    fixture();
    auto r = run_cli("optimize /tmp/gsrmev_twousers.json");
    CHECK(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["profit"] == "265/231");
    CHECK(j["upper_bound"] == "265/231");
    CHECK(j["gap"] == "0");
    CHECK(j["subset"] == json::array({0, 1}));

    write_file("/tmp/gsrmev_strategy.json", r.out);
    auto replay = run_cli("execute /tmp/gsrmev_twousers.json --strategy /tmp/gsrmev_strategy.json");
    CHECK(replay.exit_code == 0);
    std::istringstream lines(replay.out);
    json last;
    for (std::string line; std::getline(lines, line);)
        if (!line.empty()) last = json::parse(line);
    CHECK(last["final"]["miner_profit"] == "265/231");
    CHECK(last["final"]["x"] == "100");
}

TEST_CASE("optimize rejects miner-owned input transactions") {
    fixture();
    auto r = run_cli("optimize /tmp/gsrmev_roundtrip.json");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("user-owned") != std::string::npos);
}

TEST_CASE("optimize enforces the search size limit with its own exit code") {
    fixture();
    json doc = json::parse(kTwoUsers);
    doc["market"]["fee"] = "19/100";  // force the exhaustive search path
    doc["transactions"] = json::array();
    for (int i = 0; i < 9; ++i)
        doc["transactions"].push_back(
            json{{"side", "sell_x"}, {"qty", std::to_string(i + 1)}, {"owner", {{"user", i + 1}}}});
    write_file("/tmp/gsrmev_toolarge.json", doc.dump());
    auto r = run_cli("optimize /tmp/gsrmev_toolarge.json");
    CHECK(r.exit_code == 4);
    auto ok = run_cli("optimize /tmp/gsrmev_toolarge.json --max-n 9 --threads 2");
    CHECK(ok.exit_code == 0);
}

TEST_CASE("decide finds the partition witness and rejects the skewed pair") {
    fixture();
    auto yes = run_cli("decide /tmp/gsrmev_partition.json --threads 2");
    CHECK(yes.exit_code == 0);
    auto jy = json::parse(yes.out);
    CHECK(jy["decision"] == true);
    CHECK(jy["best_profit"] == "9/425");
    CHECK(jy["upper_bound"] == "9/425");
    REQUIRE(jy["witness"].is_object());
    CHECK(jy["witness"]["profit"] == "9/425");

    auto no = run_cli("decide /tmp/gsrmev_skewpair.json");
    CHECK(no.exit_code == 3);
    auto jn = json::parse(no.out);
    CHECK(jn["decision"] == false);
    CHECK(jn["best_profit"] == "52441/235305");
    CHECK(jn["upper_bound"] == "104882/235305");
    CHECK(jn["witness"].is_null());
}

TEST_CASE("reduce solves partition instances end to end") {
    auto yes = run_cli("reduce 1 2 3 --fee 19/100");
    CHECK(yes.exit_code == 0);
    auto jy = json::parse(yes.out);
    CHECK(jy["found"] == true);
    CHECK(jy["target"] == "3");
    long long sum = 0;
    for (const auto& v : jy["values"]) sum += v.get<long long>();
    CHECK(sum == 3);

    auto no = run_cli("reduce 1 1 3 --fee 19/100");
    CHECK(no.exit_code == 3);
    auto jn = json::parse(no.out);
    CHECK(jn["found"] == false);
    CHECK(jn["target"] == "5/2");
    CHECK(jn["indices"].is_null());

    auto genuine_no = run_cli("reduce 2 2 2 --fee 19/100");
    CHECK(genuine_no.exit_code == 3);

    auto bad_fee = run_cli("reduce 2 2 --fee 1/2");
    CHECK(bad_fee.exit_code == 2);  // sqrt(1/2) is irrational
    auto bad_values = run_cli("reduce 0 0 --fee 19/100");
    CHECK(bad_values.exit_code == 2);
}

TEST_CASE("axioms subcommand samples the scenario curve") {
    fixture();
    auto r = run_cli("axioms /tmp/gsrmev_roundtrip.json --samples 500");
    CHECK(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["axiom1_ok"] == true);
    CHECK(j["axiom2_ok"] == true);
    CHECK(j["violations_total"] == 0);
    auto bad = run_cli("axioms /tmp/gsrmev_roundtrip.json --xlo 0");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("input and usage failures exit with code 2") {
    fixture();
    CHECK(run_cli("verify /tmp/gsrmev_does_not_exist.json").exit_code == 2);
    write_file("/tmp/gsrmev_broken.json", "{broken");
    CHECK(run_cli("verify /tmp/gsrmev_broken.json").exit_code == 2);
    CHECK(run_cli("frobnicate /tmp/gsrmev_roundtrip.json").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);  // a subcommand is required
    CHECK(run_cli("execute /tmp/gsrmev_roundtrip.json --order 0,1 --strategy /tmp/x.json")
              .exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("verify --help").exit_code == 0);
}

TEST_CASE("verbose output goes to stderr, JSON stays on stdout") {
    fixture();
    auto r = run_cli("analyze /tmp/gsrmev_roundtrip.json --verbose");
    CHECK(r.exit_code == 0);
    json parsed;
    CHECK_NOTHROW(parsed = json::parse(r.out));
    CHECK(parsed.is_object());
    CHECK(r.err.find("no-arb interval") != std::string::npos);
}

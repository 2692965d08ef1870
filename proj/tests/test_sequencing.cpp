#include "gsr/sequencing.hpp"

#include <doctest.h>

#include <random>

#include "support/oracles.hpp"

using gsr::Owner;
using gsr::Rational;
using gsr::Side;

namespace {

const gsr::CurveParams<Rational> kCurve = gsr::constant_product(Rational(10000));
const gsr::PoolState<Rational> kCenter{Rational(100), Rational(100)};

gsr::Transaction<Rational> sell(Side side, int qty, Owner owner) {
    return gsr::Transaction<Rational>(side, Rational(qty), owner);
}

}  // namespace

TEST_CASE("empty and single sequences are always valid") {
    auto w0 = gsr::verify_gsr<Rational>(kCenter, {}, kCurve, Rational(0));
    CHECK(w0.valid);
    CHECK_FALSE(w0.first_violation.has_value());
    auto w1 = gsr::verify_gsr<Rational>(kCenter, {sell(Side::SellX, 10, Owner::user(1))}, kCurve,
                                        Rational(0));
    CHECK(w1.valid);
}

TEST_CASE("user trade then opposite restore is valid") {
    std::vector<gsr::Transaction<Rational>> txs{
        sell(Side::SellX, 10, Owner::user(1)),
        gsr::Transaction<Rational>(Side::SellY, Rational(100, 11), Owner::miner()),
    };
    CHECK(gsr::verify_gsr(kCenter, txs, kCurve, Rational(0)).valid);
}

TEST_CASE("sandwich is rejected at the close") {
    // Open the sandwich, let the victim trade, then try to sell back the other token:
    // the y reserve sits above start and later transactions are not all sell-Y.
    std::vector<gsr::Transaction<Rational>> txs{
        sell(Side::SellX, 5, Owner::miner()),
        sell(Side::SellX, 10, Owner::user(1)),
        sell(Side::SellY, 9, Owner::miner()),
    };
    auto w = gsr::verify_gsr(kCenter, txs, kCurve, Rational(0));
    CHECK_FALSE(w.valid);
    REQUIRE(w.first_violation.has_value());
    CHECK(w.first_violation->position == 2);
    CHECK(w.first_violation->reason == gsr::GsrViolation::WrongDirectionX);
}

TEST_CASE("an all-same-side tail may leave the start behind") {
    std::vector<gsr::Transaction<Rational>> txs{
        sell(Side::SellX, 5, Owner::user(1)),
        sell(Side::SellX, 10, Owner::user(2)),
        sell(Side::SellX, 3, Owner::user(3)),
    };
    CHECK(gsr::verify_gsr(kCenter, txs, kCurve, Rational(0)).valid);
}

TEST_CASE("a wrong-direction sell-Y is reported with its reason") {
    std::vector<gsr::Transaction<Rational>> txs{
        sell(Side::SellY, 10, Owner::user(1)),  // y above start now
        sell(Side::SellY, 10, Owner::user(2)),  // still fine: suffix is all sell-Y
    };
    CHECK(gsr::verify_gsr(kCenter, txs, kCurve, Rational(0)).valid);
    txs.push_back(sell(Side::SellX, 1, Owner::user(3)));
    auto w = gsr::verify_gsr(kCenter, txs, kCurve, Rational(0));
    CHECK_FALSE(w.valid);
    REQUIRE(w.first_violation.has_value());
    CHECK(w.first_violation->position == 2);
    CHECK(w.first_violation->reason == gsr::GsrViolation::WrongDirectionY);
}

TEST_CASE("violation names") {
    CHECK(std::string(gsr::violation_name(gsr::GsrViolation::WrongDirectionX)) ==
          "wrong_direction_x");
    CHECK(std::string(gsr::violation_name(gsr::GsrViolation::WrongDirectionY)) ==
          "wrong_direction_y");
}

TEST_CASE("greedy_order emits a valid order under both tiebreaks") {
    std::vector<gsr::Transaction<Rational>> txs{
        sell(Side::SellX, 10, Owner::user(1)),
        sell(Side::SellY, 5, Owner::user(2)),
        sell(Side::SellX, 2, Owner::user(3)),
        sell(Side::SellY, 30, Owner::user(4)),
    };
    for (auto tiebreak : {gsr::Tiebreak::InputOrder, gsr::Tiebreak::ByQuantityAsc}) {
        auto ordered = gsr::greedy_order(kCenter, txs, kCurve, Rational(0), tiebreak);
        REQUIRE(ordered.size() == txs.size());
        CHECK(gsr::verify_gsr(kCenter, ordered, kCurve, Rational(0)).valid);
    }
}

TEST_CASE("greedy tiebreaks differ at the start") {
    std::vector<gsr::Transaction<Rational>> txs{
        sell(Side::SellX, 10, Owner::user(1)),
        sell(Side::SellY, 5, Owner::user(2)),
    };
    auto in_order = gsr::greedy_order(kCenter, txs, kCurve, Rational(0), gsr::Tiebreak::InputOrder);
    CHECK(in_order[0].side == Side::SellX);  // input position wins at the start
    auto by_qty = gsr::greedy_order(kCenter, txs, kCurve, Rational(0), gsr::Tiebreak::ByQuantityAsc);
    CHECK(by_qty[0].side == Side::SellY);  // smaller quantity wins at the start
    CHECK(gsr::verify_gsr(kCenter, by_qty, kCurve, Rational(0)).valid);
}

TEST_CASE("verifier agrees with the quantifier definition on random float sequences") {
    std::mt19937_64 rng(42);
    auto curve = gsr::constant_product(10000.0);
    gsr::PoolState<double> s0{100.0, 100.0};
    std::uniform_int_distribution<int> len(0, 10);
    for (double fee : {0.0, 0.19}) {
        for (int trial = 0; trial < 3000; ++trial) {
            auto txs = oracles::random_tx_list(rng, len(rng), 40.0);
            auto w = gsr::verify_gsr(s0, txs, curve, fee);
            auto ref = oracles::reference_gsr_violation(s0, txs, curve, fee);
            CHECK(w.valid == !ref.has_value());
            if (ref) {
                REQUIRE(w.first_violation.has_value());
                CHECK(w.first_violation->position == *ref);
            }
        }
    }
}

TEST_CASE("greedy_order output always satisfies the reference checker") {
    std::mt19937_64 rng(43);
    auto curve = gsr::constant_product(10000.0);
    gsr::PoolState<double> s0{100.0, 100.0};
    std::uniform_int_distribution<int> len(1, 9);
    for (int trial = 0; trial < 1000; ++trial) {
        auto txs = oracles::random_tx_list(rng, len(rng), 40.0);
        auto tiebreak = trial % 2 == 0 ? gsr::Tiebreak::InputOrder : gsr::Tiebreak::ByQuantityAsc;
        auto ordered = gsr::greedy_order(s0, txs, curve, 0.19, tiebreak);
        REQUIRE(ordered.size() == txs.size());
        CHECK_FALSE(oracles::reference_gsr_violation(s0, ordered, curve, 0.19).has_value());
    }
}

TEST_CASE("exact boundary: returning exactly to the start re-enables both sides") {
    std::vector<gsr::Transaction<Rational>> txs{
        sell(Side::SellX, 10, Owner::user(1)),
        gsr::Transaction<Rational>(Side::SellY, Rational(100, 11), Owner::miner()),  // back to start
        sell(Side::SellY, 7, Owner::user(2)),
        gsr::Transaction<Rational>(Side::SellX, Rational(700, 107), Owner::miner()),
        sell(Side::SellX, 4, Owner::user(3)),
    };
    CHECK(gsr::verify_gsr(kCenter, txs, kCurve, Rational(0)).valid);
}

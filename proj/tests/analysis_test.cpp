#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cdiv/analysis.hpp>

using namespace cdiv;

TEST_CASE("classify") {
    CHECK(classify(Share{8, 12}) == ClientClass::Majority);
    CHECK(classify(Share{9, 12}) == ClientClass::Supermajority);
    CHECK(classify(Share{3, 12}) == ClientClass::Minority);
    CHECK(classify(Share{4, 12}) == ClientClass::Majority);
    CHECK(classify(Share{0, 12}) == ClientClass::Minority);
    CHECK(classify(Share{12, 12}) == ClientClass::Supermajority);
    CHECK_THROWS_AS(classify(Share{13, 12}), AnalysisError);
}

TEST_CASE("classes partition the unit interval in order") {
    for (std::uint64_t total = 1; total <= 300; ++total) {
        ClientClass previous = ClientClass::Minority;
        for (std::uint64_t c = 0; c <= total; ++c) {
            const ClientClass cls = classify(Share{c, total});
            CHECK(static_cast<int>(cls) >= static_cast<int>(previous));
            previous = cls;
        }
    }
}

TEST_CASE("slash impact") {
    SUBCASE("two thirds is a majority event") {
        const std::map<ImplId, std::uint64_t> counts{{"A", 2}, {"B", 8}, {"C", 2}};
        const auto copy = counts;
        const auto r = slash_impact(counts, "B");
        CHECK(r.slashed_count == 8);
        CHECK(r.affected_fraction.value() == doctest::Approx(2.0 / 3.0));
        CHECK(r.cls == ClientClass::Majority);
        CHECK_FALSE(r.corrupted_state_accepted);
        CHECK(counts == copy);
    }
    SUBCASE("supermajority bug finalizes a corrupted state") {
        const auto r = slash_impact({{"A", 1}, {"B", 10}, {"C", 1}}, "B");
        CHECK(r.cls == ClientClass::Supermajority);
        CHECK(r.corrupted_state_accepted);
    }
    SUBCASE("one third boundary") {
        const auto r = slash_impact({{"A", 4}, {"B", 4}, {"C", 4}}, "A");
        CHECK(r.cls == ClientClass::Majority);
        CHECK_FALSE(r.corrupted_state_accepted);
    }
    CHECK_THROWS_AS(slash_impact({{"A", 1}}, "Q"), AnalysisError);
}

TEST_CASE("proving feasibility at a 12 s block time") {
    const auto zk = proving_feasible(ProofMechanism::Succinct, 12.0);
    CHECK_FALSE(zk.feasible);
    CHECK(zk.margin == doctest::Approx(59.0 / 12.0));
    const auto tee = proving_feasible(ProofMechanism::Attested, 12.0);
    CHECK(tee.feasible);
    CHECK(tee.margin == doctest::Approx(0.08 / 12.0));
    CHECK_FALSE(proving_feasible(ProofMechanism::Attested, 0.05).feasible);
    CHECK(proving_feasible(ProofMechanism::Attested, 0.08).feasible);
    CHECK_THROWS_AS(proving_feasible(ProofMechanism::Attested, 0.0), AnalysisError);
}

TEST_CASE("break-even reward") {
    CHECK(break_even_reward(ProofMechanism::Succinct, 1) == 289728);
    CHECK(break_even_reward(ProofMechanism::Attested, 1) == 5397746);
    CHECK(break_even_reward(ProofMechanism::Succinct, 0) == 0);
    CHECK(break_even_reward(ProofMechanism::Attested, 0) == 0);
    CHECK(break_even_reward(ProofMechanism::Succinct, 1, GasStatistic::Min) == 288458);
    CHECK(break_even_reward(ProofMechanism::Succinct, 1, GasStatistic::Max) == 291013);
    for (RewardUnits p = 0; p < 1000; p += 37) {
        for (const auto m : {ProofMechanism::Succinct, ProofMechanism::Attested}) {
            CHECK(break_even_reward(m, 3 * p) == 3 * break_even_reward(m, p));
            CHECK(break_even_reward(m, p + 5) == break_even_reward(m, p) + break_even_reward(m, 5));
        }
    }
    CHECK_THROWS_AS(break_even_reward(ProofMechanism::Succinct, -1), AnalysisError);
}

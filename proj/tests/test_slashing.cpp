#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "slashsim/chain.hpp"
#include "slashsim/rng.hpp"
#include "slashsim/slashing.hpp"

using namespace slashsim;

namespace {

ChainState chain_with(std::size_t validators, Gwei balance = 32 * kGweiPerEth) {
    ChainState state;
    const auto staker = state.add_staker();
    for (std::size_t i = 0; i < validators; ++i) state.add_validator(staker, balance);
    return state;
}

std::vector<DutyAssignment> all_correct(const ChainState& state) {
    std::vector<DutyAssignment> duties;
    for (const auto& v : state.validators)
        if (state.in_duty_set(v.id)) duties.push_back({v.id, DutyOutcome::Correct});
    return duties;
}

}  // namespace

TEST_CASE("slashing burns exactly effective/32 up front") {
    ChainState state = chain_with(2);
    slash(state, 0);
    CHECK(state.validators[0].balance == 31 * kGweiPerEth);
    CHECK(state.burned_total == kGweiPerEth);
    CHECK(state.validators[0].status == ValidatorStatus::SlashedPending);
    CHECK(state.validators[0].slashed);
    REQUIRE(state.slash_ledger.size() == 1);
    CHECK(state.slash_ledger[0].special_due_epoch == state.params.z_epochs / 2);
    CHECK(state.conservation_gap() == 0);

    CHECK_THROWS_AS(slash(state, 0), DomainError);  // already slashed
}

TEST_CASE("whistleblower takes omega, proposer omega/7") {
    ChainState state = chain_with(4);
    state.params.whistleblower_reward = 70'000;
    slash(state, 0, ValidatorId{1}, ValidatorId{2});
    CHECK(state.validators[1].balance == 32 * kGweiPerEth + 70'000);
    CHECK(state.validators[2].balance == 32 * kGweiPerEth + 10'000);
    CHECK(state.minted_total == 80'000);
    CHECK(state.conservation_gap() == 0);
}

TEST_CASE("a queued validator can still be slashed; an exited one cannot") {
    ChainState state = chain_with(3);
    sign_voluntary_exit(state, 0);
    CHECK_NOTHROW(slash(state, 0));
    CHECK(state.validators[0].status == ValidatorStatus::SlashedPending);
    // it left the voluntary queue when slashed
    CHECK(std::find(state.exit_queue.begin(), state.exit_queue.end(), 0) ==
          state.exit_queue.end());

    sign_voluntary_exit(state, 1);
    advance_epoch(state, all_correct(state));  // dequeues validator 1
    REQUIRE(state.validators[1].status == ValidatorStatus::ExitedAwaitingWithdraw);
    CHECK_THROWS_WITH_AS(slash(state, 1), doctest::Contains("cannot slash exited"), DomainError);
}

TEST_CASE("recently slashed balance uses the [t-Z+1, t] window") {
    ChainState state = chain_with(1);
    CHECK(recently_slashed_balance(state, 0) == 0);

    state.slash_ledger.push_back(SlashRecord{
        .validator = 0, .slash_epoch = 100, .effective_at_slash = 32 * kGweiPerEth,
        .special_due_epoch = 100 + state.params.z_epochs / 2});
    CHECK(recently_slashed_balance(state, 100) == 32 * kGweiPerEth);
    CHECK(recently_slashed_balance(state, 100 + state.params.z_epochs - 1) == 32 * kGweiPerEth);
    CHECK(recently_slashed_balance(state, 100 + state.params.z_epochs) == 0);
    CHECK(recently_slashed_balance(state, 99) == 0);
}

TEST_CASE("window membership matches a brute-force scan") {
    ChainState state = chain_with(1);
    SplitMix64 rng(11);
    for (int i = 0; i < 40; ++i) {
        state.slash_ledger.push_back(SlashRecord{
            .validator = 0,
            .slash_epoch = rng.next_below(3 * state.params.z_epochs),
            .effective_at_slash = (1 + rng.next_below(32)) * kGweiPerEth});
    }
    for (Epoch probe = 0; probe < 3 * state.params.z_epochs; probe += 397) {
        Gwei expected = 0;
        for (const auto& r : state.slash_ledger) {
            // brute force: enumerate the window itself
            for (Epoch e = probe + 1 >= state.params.z_epochs ? probe + 1 - state.params.z_epochs
                                                              : 0;
                 e <= probe; ++e)
                if (r.slash_epoch == e) expected += r.effective_at_slash;
        }
        CHECK(recently_slashed_balance(state, probe) == expected);
    }
}

TEST_CASE("G additivity: a record inside the window adds exactly its stake") {
    ChainState state = chain_with(1);
    const Gwei before = recently_slashed_balance(state, 500);
    state.slash_ledger.push_back(
        SlashRecord{.validator = 0, .slash_epoch = 400, .effective_at_slash = 7 * kGweiPerEth});
    CHECK(recently_slashed_balance(state, 500) == before + 7 * kGweiPerEth);
}

TEST_CASE("special penalty saturates to the full stake at one third slashed") {
    const ChainParams params;
    // big_delta = 3 and G >= Y/3: everything is lost
    CHECK(special_penalty_amount(32 * kGweiPerEth, 400 * kGweiPerEth, 1200 * kGweiPerEth,
                                 params) == 32 * kGweiPerEth);
    CHECK(special_penalty_amount(32 * kGweiPerEth, 0, 1200 * kGweiPerEth, params) == 0);
    // the worked mid-range value
    CHECK(special_penalty_amount(32 * kGweiPerEth, 1'000'000'000'000ULL,
                                 1'000'000'000'000'000ULL, params) == 96'000'000);
}

TEST_CASE("special penalty is bounded by the effective balance") {
    const ChainParams params;
    SplitMix64 rng(5);
    for (int i = 0; i < 2000; ++i) {
        const Gwei effective = rng.next_below(33 * kGweiPerEth);
        const Gwei y = 1 + rng.next_below(1'000'000'000'000'000ULL);
        const Gwei g = rng.next_below(y + 1);
        const Gwei p = special_penalty_amount(effective, g, y, params);
        CHECK(p <= effective);
    }
}

TEST_CASE("special_penalty requires a due record") {
    ChainState state = chain_with(2);
    CHECK_THROWS_AS(static_cast<void>(special_penalty(state, 0, 10)), DomainError);
    slash(state, 0);
    const Epoch due = state.params.z_epochs / 2;
    CHECK_THROWS_AS(static_cast<void>(special_penalty(state, 0, due + 1)), DomainError);
    CHECK_NOTHROW(static_cast<void>(special_penalty(state, 0, due)));
}

TEST_CASE("per-epoch slash penalty is floor(delta * b)") {
    const ChainParams params;
    // b = 16,190 at Y = 10^15 for a 32 ETH validator; delta = 3
    CHECK(per_epoch_slash_amount(32 * kGweiPerEth, 1'000'000'000'000'000ULL, params) == 48'570);
    CHECK(per_epoch_slash_amount(0, 1'000'000'000'000'000ULL, params) == 0);
    // 8192 applications at constant b
    CHECK(Gwei{8192} * 48'570 == 397'885'440);

    ChainState state = chain_with(2);
    CHECK_THROWS_AS(static_cast<void>(per_epoch_slash_penalty(state, 0)), DomainError);
    slash(state, 0);
    CHECK_NOTHROW(static_cast<void>(per_epoch_slash_penalty(state, 0)));
}

TEST_CASE("forecast reproduces the worked single-validator numbers") {
    // One compromised 32 ETH validator, Y pinned at 10^15, delta = 3.
    ChainState state = chain_with(1);
    const ValidatorId ids[] = {0};
    SUBCASE("with the background-G override used by the worked example") {
        const auto f = forecast_total_penalty(
            state, ids, 100,
            ForecastAssumption{.total_stake_override = 1'000'000'000'000'000ULL,
                               .slashed_balance_override = 1'000'000'000'000ULL});
        CHECK(f.initial == 1'000'000'000);
        CHECK(f.per_epoch_total == 397'885'440);
        CHECK(f.special_total == 96'000'000);
        CHECK(f.total == 1'493'885'440);
        CHECK(f.total == f.initial + f.per_epoch_total + f.special_total);
    }
    SUBCASE("with the default G = compromised stake") {
        const auto f = forecast_total_penalty(
            state, ids, 100,
            ForecastAssumption{.total_stake_override = 1'000'000'000'000'000ULL});
        CHECK(f.initial == 1'000'000'000);
        CHECK(f.per_epoch_total == 397'885'440);
        CHECK(f.special_total == 3'072'000);  // G = 32e9: floor(32e9*3*32e9/1e15)
        CHECK(f.total == 1'400'957'440);
    }
    SUBCASE("delta = 0 and G = 0 leaves only the initial component") {
        ChainState zero = state;
        zero.params.delta = Ratio{0, 1};
        const auto f = forecast_total_penalty(
            zero, ids, 100,
            ForecastAssumption{.total_stake_override = 1'000'000'000'000'000ULL,
                               .slashed_balance_override = 0});
        CHECK(f.total == 1'000'000'000);
    }
}

TEST_CASE("compromising everything costs the whole stake") {
    ChainState state = chain_with(12);
    std::vector<ValidatorId> everyone;
    for (const auto& v : state.validators) everyone.push_back(v.id);
    const auto f = forecast_total_penalty(state, everyone, 50, ForecastAssumption{});
    // G = Y: one third threshold is passed, every special penalty is full
    CHECK(f.special_total == 12 * 32 * kGweiPerEth);
}

TEST_CASE("forecast rejects empty or already-slashed sets") {
    ChainState state = chain_with(3);
    CHECK_THROWS_AS(forecast_total_penalty(state, {}, 10, ForecastAssumption{}), DomainError);
    slash(state, 1);
    const ValidatorId ids[] = {1};
    CHECK_THROWS_AS(forecast_total_penalty(state, ids, 10, ForecastAssumption{}), DomainError);
}

TEST_CASE("forecast total is monotone in set size, delta and big_delta") {
    SplitMix64 rng(987);
    for (int i = 0; i < 300; ++i) {
        ChainState state = chain_with(2 + rng.next_below(30));
        std::vector<ValidatorId> c;
        const auto base_count = 1 + rng.next_below(state.validators.size() - 1);
        for (std::uint64_t k = 0; k < base_count; ++k) c.push_back(static_cast<ValidatorId>(k));

        const auto base = forecast_total_penalty(state, c, 10, ForecastAssumption{});

        auto grown = c;
        grown.push_back(static_cast<ValidatorId>(base_count));
        CHECK(forecast_total_penalty(state, grown, 10, ForecastAssumption{}).total >= base.total);

        ChainState harsher = state;
        harsher.params.delta = Ratio{state.params.delta.num + 1 + rng.next_below(4), 1};
        CHECK(forecast_total_penalty(harsher, c, 10, ForecastAssumption{}).total >= base.total);

        ChainState crueler = state;
        crueler.params.big_delta =
            Ratio{state.params.big_delta.num + 1 + rng.next_below(4), 1};
        CHECK(forecast_total_penalty(crueler, c, 10, ForecastAssumption{}).total >= base.total);
    }
}

TEST_CASE("replaying slash + Z epochs realizes exactly the forecast penalty") {
    // Constant-Y construction: plenty of attesting stake at the cap, the
    // slashed validator's balance high enough that its effective balance
    // never steps down during the window.
    ChainState state = chain_with(400, 32 * kGweiPerEth);
    state.validators[0].balance = 40 * kGweiPerEth;  // effective stays 32
    state.initial_deposits += 8 * kGweiPerEth;

    const ValidatorId ids[] = {0};
    const auto forecast = forecast_total_penalty(state, ids, 0, ForecastAssumption{});

    slash(state, 0);
    while (state.epoch < state.params.z_epochs) {
        std::vector<DutyAssignment> duties = all_correct(state);
        advance_epoch(state, duties);
    }
    CHECK(state.validators[0].status == ValidatorStatus::SlashedExited);
    REQUIRE(state.slash_ledger.size() == 1);
    CHECK(state.slash_ledger[0].realized_penalty == forecast.total);
    CHECK(state.conservation_gap() == 0);
}

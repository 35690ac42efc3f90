#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "slashsim/games.hpp"
#include "slashsim/rng.hpp"

using namespace slashsim;

namespace {

PayAndExitGame worked_example() {
    // 32 ETH compromised, H = 1.4 ETH, f = 0.01 ETH, zeta = -0.05 ETH
    return PayAndExitGame{
        .compromised_balance = 32 * kGweiPerEth,
        .penalty_h = 1'400'000'000,
        .fee = 10'000'000,
        .slash_cost = -50'000'000,
        .deadline = 500,
        .exit_epoch = 500,
    };
}

PayAndExitGame random_game(SplitMix64& rng) {
    PayAndExitGame g;
    g.compromised_balance = (32 + rng.next_below(3169)) * kGweiPerEth;  // 32..3200 ETH
    g.penalty_h = rng.next_below(g.compromised_balance / 8 + 1);
    g.fee = rng.next_below(g.penalty_h + 1);
    g.slash_cost = static_cast<SignedGwei>(rng.next_below(200'000'001)) - 100'000'000;
    g.deadline = 100;
    g.exit_epoch = 100;
    return g;
}

}  // namespace

TEST_CASE("payoffs follow the four terminal nodes") {
    auto game = worked_example();
    game.penalty_h = 1'400'000'000;

    const auto honored = payoffs(game, 1'000'000'000, VictimAction::Deposit,
                                 AttackerAction::NotSlash);
    CHECK(honored.attacker == 1'000'000'000);
    CHECK(honored.victim == 30'990'000'000);

    const auto walk = payoffs(game, 1'000'000'000, VictimAction::NotDeposit,
                              AttackerAction::NotSlash);
    CHECK(walk.attacker == 0);
    CHECK(walk.victim == 32'000'000'000);

    const auto punished = payoffs(game, 1'000'000'000, VictimAction::NotDeposit,
                                  AttackerAction::Slash);
    CHECK(punished.attacker == 50'000'000);  // -zeta, a gain here
    CHECK(punished.victim == 32'000'000'000 - 1'400'000'000);

    const auto betrayed = payoffs(game, 1'000'000'000, VictimAction::Deposit,
                                  AttackerAction::Slash);
    CHECK(betrayed.attacker == 50'000'000);
    CHECK(betrayed.victim == 32'000'000'000 - 1'400'000'000 - 10'000'000);
}

TEST_CASE("with zero fee and vanishing ransom the deposit branch matches walking away") {
    PayAndExitGame game = worked_example();
    game.fee = 0;
    const auto deposit = payoffs(game, 1, VictimAction::Deposit, AttackerAction::NotSlash);
    const auto walk = payoffs(game, 1, VictimAction::NotDeposit, AttackerAction::NotSlash);
    CHECK(deposit.victim == walk.victim - 1);  // only the ransom separates them
}

TEST_CASE("ransom is a pure transfer: payoffs sum to balance minus fee") {
    SplitMix64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto game = random_game(rng);
        const Gwei r = 1 + rng.next_below(game.penalty_h + 10);
        const auto p = payoffs(game, r, VictimAction::Deposit, AttackerAction::NotSlash);
        CHECK(p.attacker + p.victim ==
              static_cast<SignedGwei>(game.compromised_balance) -
                  static_cast<SignedGwei>(game.fee));
    }
}

TEST_CASE("the ransom bound is H - f with saturation") {
    PayAndExitGame game;
    game.penalty_h = 1'493'885'440;
    game.fee = 0;
    CHECK(max_ransom_pay_and_exit(game) == 1'493'885'440);
    game.penalty_h = 1'000'000'000;
    game.fee = 1'000'000'000;
    CHECK(max_ransom_pay_and_exit(game) == 0);
    game.penalty_h = 1'400'000'000;
    game.fee = 10'000'000;
    CHECK(max_ransom_pay_and_exit(game) == 1'390'000'000);
}

TEST_CASE("bound monotonicity: up in H, strictly down in f until zero") {
    SplitMix64 rng(17);
    for (int i = 0; i < 500; ++i) {
        auto game = random_game(rng);
        const Gwei bound = max_ransom_pay_and_exit(game);

        auto harsher = game;
        harsher.penalty_h += 1 + rng.next_below(kGweiPerEth);
        CHECK(max_ransom_pay_and_exit(harsher) >= bound);

        auto costlier = game;
        costlier.fee += 1 + rng.next_below(kGweiPerEth);
        const Gwei lowered = max_ransom_pay_and_exit(costlier);
        CHECK(lowered <= bound);
        if (bound > 0) CHECK(lowered < bound);
    }
}

TEST_CASE("credible threat: deposit equilibrium one tick under the bound") {
    const auto eq = solve_spne(worked_example(), 1'000'000);
    CHECK(eq.victim_action == VictimAction::Deposit);
    CHECK(eq.on_deposit == AttackerAction::NotSlash);
    CHECK(eq.on_no_deposit == AttackerAction::Slash);
    CHECK(eq.ransom == 1'389'000'000);
    CHECK(eq.credible);
    CHECK(eq.attacker_payoff == 1'389'000'000);
    CHECK(eq.victim_payoff ==
          32'000'000'000LL - 10'000'000LL - 1'389'000'000LL);
}

TEST_CASE("costly slashing makes the threat empty") {
    auto game = worked_example();
    game.slash_cost = 50'000'000;  // zeta > 0
    const auto eq = solve_spne(game, 1'000'000);
    CHECK(eq.victim_action == VictimAction::NotDeposit);
    CHECK(eq.on_no_deposit == AttackerAction::NotSlash);
    CHECK(eq.attacker_payoff == 0);
    CHECK(eq.victim_payoff == 32'000'000'000LL);
    CHECK_FALSE(eq.credible);
}

TEST_CASE("a zero bound means no rational ransom regardless of zeta") {
    auto game = worked_example();
    game.fee = game.penalty_h;  // bound saturates at 0
    for (const SignedGwei zeta : {-50'000'000LL, 0LL, 50'000'000LL}) {
        game.slash_cost = zeta;
        const auto eq = solve_spne(game, 1'000'000);
        CHECK(eq.victim_action == VictimAction::NotDeposit);
    }
}

TEST_CASE("brute force agrees with backward induction on the worked instance") {
    const auto game = worked_example();
    const auto analytic = solve_spne(game, 1'000'000);
    const auto brute = brute_force_spne(game, 1'000'000);
    CHECK(analytic.victim_action == brute.victim_action);
    CHECK(analytic.on_deposit == brute.on_deposit);
    CHECK(analytic.on_no_deposit == brute.on_no_deposit);
    CHECK(analytic.ransom == brute.ransom);
    CHECK(analytic.attacker_payoff == brute.attacker_payoff);
}

TEST_CASE("brute force agrees with backward induction on randomized games") {
    SplitMix64 rng(20260809);
    const Gwei tick = 1'000'000;
    int deposits = 0;
    for (int i = 0; i < 300; ++i) {
        const auto game = random_game(rng);
        const auto analytic = solve_spne(game, tick);
        const auto brute = brute_force_spne(game, tick);
        CAPTURE(game.penalty_h);
        CAPTURE(game.fee);
        CAPTURE(game.slash_cost);
        REQUIRE(analytic.victim_action == brute.victim_action);
        REQUIRE(analytic.on_deposit == brute.on_deposit);
        REQUIRE(analytic.on_no_deposit == brute.on_no_deposit);
        const Gwei gap = analytic.ransom > brute.ransom ? analytic.ransom - brute.ransom
                                                        : brute.ransom - analytic.ransom;
        REQUIRE(gap <= tick);
        if (analytic.victim_action == VictimAction::Deposit) {
            ++deposits;
            // payoffs exact given the profile
            const auto check = payoffs(game, brute.ransom, brute.victim_action, brute.on_deposit);
            REQUIRE(check.attacker == brute.attacker_payoff);
            REQUIRE(check.victim == brute.victim_payoff);
        }
    }
    CHECK(deposits > 20);  // the sample exercises both branches
}

TEST_CASE("brute force rejects oversized grids") {
    PayAndExitGame game;
    game.penalty_h = Gwei{2'000'000} * 1'000'000;  // 2M grid points at tick 1e6
    CHECK_THROWS_AS(brute_force_spne(game, 1'000'000), DomainError);
}

TEST_CASE("bound correctness: deposit beats refusal exactly below the bound") {
    auto game = worked_example();
    const Gwei bound = max_ransom_pay_and_exit(game);
    for (Gwei r = bound - 3; r <= bound + 3; ++r) {
        const auto deposit =
            payoffs(game, r, VictimAction::Deposit, AttackerAction::NotSlash).victim;
        const auto refused =
            payoffs(game, r, VictimAction::NotDeposit, AttackerAction::Slash).victim;
        CHECK((deposit > refused) == (r < bound));
    }
}

TEST_CASE("pay-or-slash cap equals the one-shot bound") {
    auto game = worked_example();
    const auto cap = pay_or_slash_cap(game);
    CHECK(cap.cumulative == 1'390'000'000);
    CHECK(cap.pre_fee == 1'400'000'000);
    game.fee = 0;
    CHECK(pay_or_slash_cap(game).cumulative == game.penalty_h);
    game.penalty_h = 0;
    CHECK(pay_or_slash_cap(game).cumulative == 0);
}

TEST_CASE("a rational victim never pays past the cap") {
    const auto game = worked_example();
    const Gwei cap = pay_or_slash_cap(game).cumulative;
    RationalVictimPolicy rational;
    const Gwei schedule[] = {cap, cap};
    const auto out = simulate_pay_or_slash(game, 32, 2, rational, schedule);
    CHECK(out.cumulative_ransom <= cap);
    CHECK(out.iterations_survived == 1);  // the second demand is refused
    CHECK(out.terminal == RepeatedEnd::SlashedOnRejection);
}

TEST_CASE("rational cap holds across random schedules") {
    SplitMix64 rng(99);
    RationalVictimPolicy rational;
    for (int i = 0; i < 300; ++i) {
        const auto game = random_game(rng);
        const Gwei cap = pay_or_slash_cap(game).cumulative;
        std::vector<Gwei> schedule;
        const auto len = 1 + rng.next_below(6);
        for (std::uint64_t k = 0; k < len; ++k)
            schedule.push_back(rng.next_below(cap + kGweiPerEth));
        const auto iterations = static_cast<unsigned>(1 + rng.next_below(10));
        const auto out = simulate_pay_or_slash(game, 16, iterations, rational, schedule);
        REQUIRE(out.cumulative_ransom <= cap);
    }
}

TEST_CASE("a naive victim can be bled past the cap") {
    const auto game = worked_example();
    const Gwei cap = pay_or_slash_cap(game).cumulative;
    NaiveVictimPolicy naive(2 * cap);
    const Gwei schedule[] = {cap, cap};
    const auto out = simulate_pay_or_slash(game, 32, 2, naive, schedule);
    CHECK(out.cumulative_ransom == 2 * cap);
    CHECK(out.terminal == RepeatedEnd::RanAllIterations);
}

TEST_CASE("one iteration degenerates to a single accept decision") {
    const auto game = worked_example();
    RationalVictimPolicy rational;
    const Gwei schedule[] = {1'000'000};
    const auto out = simulate_pay_or_slash(game, 8, 1, rational, schedule);
    CHECK(out.iterations_survived == 1);
    CHECK(out.cumulative_ransom == 1'000'000);
    CHECK(out.epochs_elapsed == 8);
}

TEST_CASE("pay-or-slash rejects malformed inputs") {
    const auto game = worked_example();
    RationalVictimPolicy rational;
    CHECK_THROWS_AS(simulate_pay_or_slash(game, 8, 1, rational, {}), DomainError);
    const Gwei schedule[] = {1};
    CHECK_THROWS_AS(simulate_pay_or_slash(game, 0, 1, rational, schedule), DomainError);
}

TEST_CASE("equilibrium JSON round-trips") {
    const auto eq = solve_spne(worked_example(), 1'000'000);
    CHECK((Equilibrium::from_json(eq.to_json()) == eq));
    const auto game = worked_example();
    CHECK((PayAndExitGame::from_json(game.to_json()) == game));
}

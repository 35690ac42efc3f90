#include "slashsim/games.hpp"

#include <nlohmann/json.hpp>

namespace slashsim {

const char* to_string(VictimAction a) {
    return a == VictimAction::Deposit ? "Deposit" : "NotDeposit";
}
const char* to_string(AttackerAction a) {
    return a == AttackerAction::Slash ? "Slash" : "NotSlash";
}
const char* to_string(RepeatedEnd end) {
    switch (end) {
        case RepeatedEnd::RanAllIterations: return "RanAllIterations";
        case RepeatedEnd::SlashedOnRejection: return "SlashedOnRejection";
        case RepeatedEnd::ThreatDropped: return "ThreatDropped";
    }
    return "?";
}

GamePayoffs payoffs(const PayAndExitGame& game, Gwei ransom, VictimAction victim,
                    AttackerAction attacker) {
    const auto balance = static_cast<SignedGwei>(game.compromised_balance);
    const auto h = static_cast<SignedGwei>(game.penalty_h);
    const auto f = static_cast<SignedGwei>(game.fee);
    const auto r = static_cast<SignedGwei>(ransom);
    if (victim == VictimAction::Deposit) {
        if (attacker == AttackerAction::NotSlash) return {r, balance - f - r};
        return {-game.slash_cost, balance - h - f};
    }
    if (attacker == AttackerAction::NotSlash) return {0, balance};
    return {-game.slash_cost, balance - h};
}

Gwei max_ransom_pay_and_exit(const PayAndExitGame& game) {
    return sat_sub(game.penalty_h, game.fee);
}

namespace {

// Shared strict-preference best responses; both solvers and the agents in
// the simulator must use the same conventions or knife-edge instances split.
AttackerAction best_response_on_deposit(const PayAndExitGame& game, Gwei ransom) {
    // Honoring the contract yields R, slashing yields -zeta; slash on ties.
    return static_cast<SignedGwei>(ransom) > -game.slash_cost ? AttackerAction::NotSlash
                                                              : AttackerAction::Slash;
}

AttackerAction best_response_on_no_deposit(const PayAndExitGame& game) {
    // Carrying out the threat pays -zeta against 0 for walking away.
    return -game.slash_cost > 0 ? AttackerAction::Slash : AttackerAction::NotSlash;
}

bool victim_deposits(const PayAndExitGame& game, Gwei ransom) {
    const auto on_dep = best_response_on_deposit(game, ransom);
    const auto on_nodep = best_response_on_no_deposit(game);
    const auto u_deposit = payoffs(game, ransom, VictimAction::Deposit, on_dep).victim;
    const auto u_refuse = payoffs(game, ransom, VictimAction::NotDeposit, on_nodep).victim;
    return u_deposit > u_refuse;
}

Equilibrium equilibrium_at(const PayAndExitGame& game, Gwei ransom) {
    Equilibrium eq;
    eq.ransom = ransom;
    eq.on_deposit = best_response_on_deposit(game, ransom);
    eq.on_no_deposit = best_response_on_no_deposit(game);
    eq.victim_action =
        victim_deposits(game, ransom) ? VictimAction::Deposit : VictimAction::NotDeposit;
    const auto chosen = eq.victim_action == VictimAction::Deposit ? eq.on_deposit
                                                                  : eq.on_no_deposit;
    const auto result = payoffs(game, ransom, eq.victim_action, chosen);
    eq.attacker_payoff = result.attacker;
    eq.victim_payoff = result.victim;
    eq.credible = -game.slash_cost > 0;
    return eq;
}

}  // namespace

bool victim_accepts(const PayAndExitGame& game, Gwei posted_ransom) {
    return victim_deposits(game, posted_ransom);
}

Equilibrium solve_spne(const PayAndExitGame& game, Gwei tick) {
    if (tick == 0) throw DomainError("solve_spne: tick must be positive");
    const Gwei bound = max_ransom_pay_and_exit(game);
    if (-game.slash_cost > 0 && bound > tick) {
        // Credible threat: the one-tick undercut keeps the victim strictly
        // better off depositing, provided the attacker still prefers R over
        // carrying out the threat.
        const Gwei ransom = bound - tick;
        if (static_cast<SignedGwei>(ransom) > -game.slash_cost)
            return equilibrium_at(game, ransom);
    }
    // No profitable extortion: report the bound itself (the victim refuses).
    return equilibrium_at(game, bound);
}

Equilibrium brute_force_spne(const PayAndExitGame& game, Gwei tick) {
    if (tick == 0) throw DomainError("brute_force_spne: tick must be positive");
    const Gwei bound = max_ransom_pay_and_exit(game);
    if (bound / tick > 1'000'000) throw DomainError("brute_force_spne: grid too large");

    bool found = false;
    Equilibrium best;
    auto consider = [&](Gwei ransom) {
        if (ransom == 0) return;
        // Subgame optimality at every node by direct payoff comparison.
        const auto on_dep = payoffs(game, ransom, VictimAction::Deposit, AttackerAction::NotSlash)
                                        .attacker >
                                    payoffs(game, ransom, VictimAction::Deposit,
                                            AttackerAction::Slash)
                                        .attacker
                                ? AttackerAction::NotSlash
                                : AttackerAction::Slash;
        const auto on_nodep =
            payoffs(game, ransom, VictimAction::NotDeposit, AttackerAction::Slash).attacker >
                    payoffs(game, ransom, VictimAction::NotDeposit, AttackerAction::NotSlash)
                        .attacker
                ? AttackerAction::Slash
                : AttackerAction::NotSlash;
        const auto u_dep = payoffs(game, ransom, VictimAction::Deposit, on_dep).victim;
        const auto u_nodep = payoffs(game, ransom, VictimAction::NotDeposit, on_nodep).victim;
        const auto victim = u_dep > u_nodep ? VictimAction::Deposit : VictimAction::NotDeposit;
        const auto outcome =
            payoffs(game, ransom, victim,
                    victim == VictimAction::Deposit ? on_dep : on_nodep);

        Equilibrium eq;
        eq.ransom = ransom;
        eq.victim_action = victim;
        eq.on_deposit = on_dep;
        eq.on_no_deposit = on_nodep;
        eq.attacker_payoff = outcome.attacker;
        eq.victim_payoff = outcome.victim;
        eq.credible = -game.slash_cost > 0;
        if (!found || eq.attacker_payoff > best.attacker_payoff) {
            best = eq;
            found = true;
        }
    };

    // Grid anchored at the bound: bound - k*tick scanning down, plus probes
    // at and above the bound (which a rational victim refuses).
    for (Gwei k = 1; k * tick <= bound; ++k) consider(bound - k * tick);
    consider(bound);
    consider(bound + tick);
    consider(bound + 2 * tick);

    if (!found || best.victim_action == VictimAction::NotDeposit) {
        // All demands refused: report the canonical bound, same as solve_spne.
        return equilibrium_at(game, bound);
    }
    return best;
}

PayOrSlashCap pay_or_slash_cap(const PayAndExitGame& game) {
    return PayOrSlashCap{.cumulative = max_ransom_pay_and_exit(game), .pre_fee = game.penalty_h};
}

bool RationalVictimPolicy::accept(Gwei demand, Gwei cumulative_paid, const PayAndExitGame& game) {
    return cumulative_paid + demand <= pay_or_slash_cap(game).cumulative;
}

bool NaiveVictimPolicy::accept(Gwei demand, Gwei cumulative_paid, const PayAndExitGame&) {
    return cumulative_paid + demand <= budget_;
}

RepeatedOutcome simulate_pay_or_slash(const PayAndExitGame& game, Epoch window_x,
                                      unsigned iterations, VictimPolicy& policy,
                                      std::span<const Gwei> demand_schedule) {
    if (demand_schedule.empty()) throw DomainError("pay-or-slash: empty demand schedule");
    if (window_x == 0) throw DomainError("pay-or-slash: window must be at least one epoch");
    if (iterations == 0) throw DomainError("pay-or-slash: need at least one iteration");

    RepeatedOutcome out;
    Gwei fees = 0;
    for (unsigned i = 0; i < iterations; ++i) {
        const Gwei demand = demand_schedule[i % demand_schedule.size()];
        if (policy.accept(demand, out.cumulative_ransom, game)) {
            out.cumulative_ransom += demand;
            fees += game.fee;
            ++out.iterations_survived;
            out.epochs_elapsed += window_x;
            continue;
        }
        // Refusal resolves like the one-shot game's no-deposit subgame.
        if (-game.slash_cost > 0) {
            out.terminal = RepeatedEnd::SlashedOnRejection;
            out.victim_net = -static_cast<SignedGwei>(out.cumulative_ransom) -
                             static_cast<SignedGwei>(fees) -
                             static_cast<SignedGwei>(game.penalty_h);
            out.attacker_net =
                static_cast<SignedGwei>(out.cumulative_ransom) - game.slash_cost;
        } else {
            out.terminal = RepeatedEnd::ThreatDropped;
            out.victim_net = -static_cast<SignedGwei>(out.cumulative_ransom) -
                             static_cast<SignedGwei>(fees);
            out.attacker_net = static_cast<SignedGwei>(out.cumulative_ransom);
        }
        return out;
    }
    out.terminal = RepeatedEnd::RanAllIterations;
    out.victim_net =
        -static_cast<SignedGwei>(out.cumulative_ransom) - static_cast<SignedGwei>(fees);
    out.attacker_net = static_cast<SignedGwei>(out.cumulative_ransom);
    return out;
}

PayAndExitGame PayAndExitGame::from_json(const nlohmann::json& doc) {
    PayAndExitGame g;
    g.compromised_balance = doc.at("compromised_balance").get<Gwei>();
    g.penalty_h = doc.at("penalty_h").get<Gwei>();
    g.fee = doc.value("fee", Gwei{0});
    g.slash_cost = doc.value("slash_cost", SignedGwei{0});
    g.deadline = doc.value("deadline", Epoch{0});
    g.exit_epoch = doc.value("exit_epoch", g.deadline);
    return g;
}

nlohmann::json PayAndExitGame::to_json() const {
    return nlohmann::json{
        {"compromised_balance", compromised_balance},
        {"penalty_h", penalty_h},
        {"fee", fee},
        {"slash_cost", slash_cost},
        {"deadline", deadline},
        {"exit_epoch", exit_epoch},
    };
}

Equilibrium Equilibrium::from_json(const nlohmann::json& doc) {
    Equilibrium eq;
    eq.ransom = doc.at("ransom").get<Gwei>();
    eq.victim_action = doc.at("victim_action").get<std::string>() == "Deposit"
                           ? VictimAction::Deposit
                           : VictimAction::NotDeposit;
    eq.on_deposit = doc.at("attacker_action_on_deposit").get<std::string>() == "Slash"
                        ? AttackerAction::Slash
                        : AttackerAction::NotSlash;
    eq.on_no_deposit = doc.at("attacker_action_on_no_deposit").get<std::string>() == "Slash"
                           ? AttackerAction::Slash
                           : AttackerAction::NotSlash;
    eq.attacker_payoff = doc.at("attacker_payoff").get<SignedGwei>();
    eq.victim_payoff = doc.at("victim_payoff").get<SignedGwei>();
    eq.credible = doc.at("credible").get<bool>();
    return eq;
}

nlohmann::json Equilibrium::to_json() const {
    return nlohmann::json{
        {"ransom", ransom},
        {"victim_action", to_string(victim_action)},
        {"attacker_action_on_deposit", to_string(on_deposit)},
        {"attacker_action_on_no_deposit", to_string(on_no_deposit)},
        {"attacker_payoff", attacker_payoff},
        {"victim_payoff", victim_payoff},
        {"credible", credible},
    };
}

nlohmann::json RepeatedOutcome::to_json() const {
    return nlohmann::json{
        {"cumulative_ransom", cumulative_ransom},
        {"iterations_survived", iterations_survived},
        {"terminal", to_string(terminal)},
        {"victim_net", victim_net},
        {"attacker_net", attacker_net},
        {"epochs_elapsed", epochs_elapsed},
    };
}

}  // namespace slashsim

#pragma once

#include <nlohmann/json_fwd.hpp>
#include <span>

#include "slashsim/types.hpp"

namespace slashsim {

enum class VictimAction : std::uint8_t { Deposit, NotDeposit };
enum class AttackerAction : std::uint8_t { Slash, NotSlash };

const char* to_string(VictimAction a);
const char* to_string(AttackerAction a);

/// One Pay-and-Exit instance. Balances use the y(t_e) ~ y(t_r) ~ y(0)
/// approximation so the whole game is a handful of Gwei quantities.
struct PayAndExitGame {
    Gwei compromised_balance = 0;  // sum of y_j over the compromised set
    Gwei penalty_h = 0;            // forecast total slashing penalty H(t_r)
    Gwei fee = 0;                  // victim's transaction cost f
    SignedGwei slash_cost = 0;     // attacker's cost zeta; negative = net gain
    Epoch deadline = 0;            // t_r
    Epoch exit_epoch = 0;          // t_e

    static PayAndExitGame from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
    bool operator==(const PayAndExitGame&) const = default;
};

struct GamePayoffs {
    SignedGwei attacker = 0;
    SignedGwei victim = 0;
    bool operator==(const GamePayoffs&) const = default;
};

/// Terminal payoffs of the reduced game tree:
///   (Deposit,   NotSlash) -> (R,     y - f - R)
///   (Deposit,   Slash)    -> (-zeta, y - H - f)
///   (NotDeposit,NotSlash) -> (0,     y)
///   (NotDeposit,Slash)    -> (-zeta, y - H)
GamePayoffs payoffs(const PayAndExitGame& game, Gwei ransom, VictimAction victim,
                    AttackerAction attacker);

/// Maximum incentive-compatible ransom: H - f, saturating at zero.
Gwei max_ransom_pay_and_exit(const PayAndExitGame& game);

struct Equilibrium {
    Gwei ransom = 0;
    VictimAction victim_action = VictimAction::NotDeposit;
    AttackerAction on_deposit = AttackerAction::NotSlash;
    AttackerAction on_no_deposit = AttackerAction::NotSlash;
    SignedGwei attacker_payoff = 0;
    SignedGwei victim_payoff = 0;
    bool credible = false;  // the slash threat (-zeta > 0) backs the demand

    static Equilibrium from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
    bool operator==(const Equilibrium&) const = default;
};

/// Backward induction with strict-preference tie-breaking: the attacker
/// slashes on deposit only when R <= -zeta, slashes on no-deposit only when
/// -zeta > 0, the victim deposits only when strictly better off, and the
/// posted ransom undercuts the bound by one tick.
Equilibrium solve_spne(const PayAndExitGame& game, Gwei tick);

/// The victim's decision rule at a posted ransom, under her own view of the
/// game (which may price H differently from the attacker's).
bool victim_accepts(const PayAndExitGame& game, Gwei posted_ransom);

/// Independent check: enumerates ransoms on a tick grid anchored at the
/// bound (plus probes at and above it), evaluates every decision node by
/// direct payoff comparison, and keeps the attacker-optimal surviving
/// profile. Errors when the grid would exceed 100k points.
Equilibrium brute_force_spne(const PayAndExitGame& game, Gwei tick);

struct PayOrSlashCap {
    Gwei cumulative = 0;  // the binding cap R̄_E
    Gwei pre_fee = 0;     // H(t_r)
};

/// Cumulative ransom ceiling of the repeated Pay-or-Slash interaction.
PayOrSlashCap pay_or_slash_cap(const PayAndExitGame& game);

/// Victim behavior in the repeated game: decide on each demand given what
/// was already paid.
class VictimPolicy {
public:
    virtual ~VictimPolicy() = default;
    virtual bool accept(Gwei demand, Gwei cumulative_paid, const PayAndExitGame& game) = 0;
};

/// Never lets cumulative payments exceed the Pay-and-Exit cap.
class RationalVictimPolicy final : public VictimPolicy {
public:
    bool accept(Gwei demand, Gwei cumulative_paid, const PayAndExitGame& game) override;
};

/// Pays anything within a fixed budget; models the "pay and hope" hazard.
class NaiveVictimPolicy final : public VictimPolicy {
public:
    explicit NaiveVictimPolicy(Gwei budget) : budget_(budget) {}
    bool accept(Gwei demand, Gwei cumulative_paid, const PayAndExitGame& game) override;

private:
    Gwei budget_;
};

enum class RepeatedEnd : std::uint8_t {
    RanAllIterations,    // every demand accepted; threat outlives the horizon
    SlashedOnRejection,  // refusal met by a carried-out threat
    ThreatDropped,       // refusal, but slashing is not worth it (zeta >= 0)
};

const char* to_string(RepeatedEnd end);

struct RepeatedOutcome {
    Gwei cumulative_ransom = 0;
    unsigned iterations_survived = 0;  // accepted demands
    RepeatedEnd terminal = RepeatedEnd::RanAllIterations;
    SignedGwei victim_net = 0;    // -payments - fees - realized penalty
    SignedGwei attacker_net = 0;  // payments - slashing cost when carried out
    Epoch epochs_elapsed = 0;

    nlohmann::json to_json() const;
};

/// Iterates the per-window contract: each iteration one demand from the
/// schedule (repeating cyclically), accept -> pay and renew after window_x
/// epochs, reject -> one-shot slashing resolution.
RepeatedOutcome simulate_pay_or_slash(const PayAndExitGame& game, Epoch window_x,
                                      unsigned iterations, VictimPolicy& policy,
                                      std::span<const Gwei> demand_schedule);

}  // namespace slashsim

#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "slashsim/params.hpp"
#include "slashsim/types.hpp"

namespace slashsim {

/// Population input: either explicit staker sizes or bucketed counts in the
/// style of published validator-distribution tables. An unbounded bucket
/// (max omitted) must be given an explicit cap before loading.
struct PopulationBucket {
    std::uint64_t min_validators = 1;
    std::optional<std::uint64_t> max_validators;  // inclusive; nullopt = open-ended
    std::uint64_t staker_count = 0;
};

struct PopulationSpec {
    std::vector<PopulationBucket> buckets;            // distribution form
    std::vector<std::uint64_t> explicit_stakers;      // validator count per staker
    Gwei balance_per_validator = 32 * kGweiPerEth;
    std::optional<std::uint64_t> unbounded_bucket_cap;

    bool distribution() const { return !buckets.empty(); }
};

enum class AttackStrategy : std::uint8_t { PayAndExit, PayOrSlash };

struct AttackSpec {
    StakerId victim_staker = 0;
    std::uint64_t compromised_count = 0;  // 0 = every validator the staker owns
    AttackStrategy strategy = AttackStrategy::PayAndExit;
    Gwei fee = 0;
    SignedGwei zeta = 0;
    Epoch deadline_offset = 100;
    double whistleblower_win_probability = 0.0;  // attacker winning the report race
    std::optional<Gwei> victim_h_override;       // victim's own H belief, if it differs
    Gwei tick = 1'000'000;
    Epoch window_x = 64;               // Pay-or-Slash window
    std::vector<Gwei> demand_schedule;  // Pay-or-Slash demands
    unsigned iterations = 1;
};

struct DutyModel {
    double p_correct = 1.0;
    double p_incorrect = 0.0;
    double p_offline = 0.0;

    /// Probabilities must sum to 1 within 1e-9.
    void validate() const;
};

enum class VictimPolicyKind : std::uint8_t {
    Rational,          // follows the solved equilibrium
    NeverPay,          // ignores the demand
    NaiveBudget,       // Pay-or-Slash: pays while within a budget
    ExitWithoutPaying  // signs exits outside the contract (trips the switch)
};

struct Scenario {
    ChainParams params;
    PopulationSpec population;
    AttackSpec attack;
    DutyModel duty_model;
    VictimPolicyKind victim_policy = VictimPolicyKind::Rational;
    Gwei naive_budget = 0;
    Epoch horizon_epochs = 0;
    std::uint64_t seed = 0;

    /// Full structural validation; throws ConfigError with a field path.
    void validate() const;

    static Scenario from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
};

}  // namespace slashsim

#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "slashsim/formulas.hpp"
#include "slashsim/params.hpp"
#include "slashsim/types.hpp"

namespace slashsim {

enum class ValidatorStatus : std::uint8_t {
    Active,
    ExitQueued,              // signed a voluntary exit, waiting in the FIFO
    ExitedAwaitingWithdraw,  // dequeued; withdrawable_epoch set
    Withdrawn,
    SlashedPending,  // inside the Z-epoch penalty window
    SlashedExited,   // past slash_epoch + Z, withdrawable
};

const char* to_string(ValidatorStatus status);

enum class DutyOutcome : std::uint8_t { Correct, Incorrect, Offline };

struct Validator {
    ValidatorId id = 0;
    StakerId owner = 0;
    Gwei balance = 0;
    Gwei effective_balance = 0;  // integer multiple of 1 ETH, capped
    ValidatorStatus status = ValidatorStatus::Active;
    bool slashed = false;  // absorbing
    Epoch queued_epoch = 0;
    Epoch withdrawable_epoch = 0;
    Epoch slash_epoch = 0;

    bool operator==(const Validator&) const = default;
};

struct Staker {
    StakerId id = 0;
    std::vector<ValidatorId> validators;
    Gwei withdrawn_funds = 0;

    bool operator==(const Staker&) const = default;
};

struct SlashRecord {
    ValidatorId validator = 0;
    Epoch slash_epoch = 0;
    Gwei effective_at_slash = 0;
    Epoch special_due_epoch = 0;  // slash_epoch + Z/2
    bool special_applied = false;
    std::optional<ValidatorId> whistleblower;
    Gwei realized_penalty = 0;  // burns attributed to this slashing so far

    bool operator==(const SlashRecord&) const = default;
};

struct DutyAssignment {
    ValidatorId id;
    DutyOutcome outcome;
};

/// What one advance_epoch call did; the harness turns this into chain events.
struct EpochResult {
    Epoch processed_epoch = 0;
    std::vector<ValidatorId> exits_finalized;  // voluntary dequeues this epoch
    std::vector<ValidatorId> forced_exits;     // balance fell below the floor
    std::vector<ValidatorId> slashed_exited;   // completed the Z-epoch window
    Gwei slash_burn = 0;                       // per-epoch + special burns applied
};

/// Whole-chain snapshot with value semantics; one logical writer at a time.
struct ChainState {
    Epoch epoch = 0;
    std::vector<Validator> validators;  // index == ValidatorId
    std::vector<Staker> stakers;        // index == StakerId
    std::vector<SlashRecord> slash_ledger;
    std::deque<ValidatorId> exit_queue;  // FIFO of ExitQueued validators
    ChainParams params;
    Gwei initial_deposits = 0;
    Gwei minted_total = 0;
    Gwei burned_total = 0;

    bool operator==(const ChainState&) const = default;

    const Validator& validator(ValidatorId id) const;
    Validator& validator(ValidatorId id);

    /// Registers a new Active validator for `owner` with the given deposit.
    ValidatorId add_validator(StakerId owner, Gwei deposit);
    StakerId add_staker();

    /// True for statuses that carry attestation duties: Active, ExitQueued.
    bool in_duty_set(ValidatorId id) const;

    /// Total effective balance Y(t) backing the base-reward and
    /// special-penalty denominators. Includes SlashedPending validators:
    /// their stake keeps weighing on the formulas until they are forced out
    /// at slash_epoch + Z.
    Gwei total_effective_stake() const;

    /// Conservation: sum(balances) + sum(withdrawn) - (deposits + minted - burned). Zero when intact.
    SignedGwei conservation_gap() const;
};

/// Eq.-style base reward for a duty-set validator. Errors when the validator
/// is not attesting or there is no stake.
Gwei base_reward(const ChainState& state, ValidatorId id);

/// Applies a duty outcome to an attesting validator and returns the signed
/// balance delta (positive minted, negative burned).
SignedGwei apply_duty_outcome(ChainState& state, ValidatorId id, DutyOutcome outcome);

/// Irreversibly queues an Active, unslashed validator for voluntary exit.
void sign_voluntary_exit(ChainState& state, ValidatorId id);

/// One epoch of chain dynamics, in order: duties, slash penalties (per-epoch
/// + due specials), exit-queue dequeue up to the quota, forced exits below
/// the floor, slashed-window completion, hysteresis, epoch increment.
/// `duties` must cover every duty-set validator exactly once.
EpochResult advance_epoch(ChainState& state, std::span<const DutyAssignment> duties);

/// Variant that asks `outcome_of` for each duty-set validator; used by the
/// simulator's hot loop. Same semantics as the span overload.
EpochResult advance_epoch(ChainState& state,
                          const std::function<DutyOutcome(const Validator&)>& outcome_of);

/// Transfers the remaining balance to the owner once withdrawable.
/// Returns the amount moved.
Gwei withdraw(ChainState& state, ValidatorId id);

}  // namespace slashsim

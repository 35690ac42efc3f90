#include "slashsim/chain.hpp"

#include <algorithm>

#include "slashsim/slashing.hpp"

namespace slashsim {

const char* to_string(ValidatorStatus status) {
    switch (status) {
        case ValidatorStatus::Active: return "Active";
        case ValidatorStatus::ExitQueued: return "ExitQueued";
        case ValidatorStatus::ExitedAwaitingWithdraw: return "ExitedAwaitingWithdraw";
        case ValidatorStatus::Withdrawn: return "Withdrawn";
        case ValidatorStatus::SlashedPending: return "SlashedPending";
        case ValidatorStatus::SlashedExited: return "SlashedExited";
    }
    return "?";
}

const Validator& ChainState::validator(ValidatorId id) const {
    if (id >= validators.size()) throw DomainError("unknown validator id " + std::to_string(id));
    return validators[id];
}

Validator& ChainState::validator(ValidatorId id) {
    if (id >= validators.size()) throw DomainError("unknown validator id " + std::to_string(id));
    return validators[id];
}

StakerId ChainState::add_staker() {
    const auto id = static_cast<StakerId>(stakers.size());
    Staker staker;
    staker.id = id;
    stakers.push_back(std::move(staker));
    return id;
}

ValidatorId ChainState::add_validator(StakerId owner, Gwei deposit) {
    if (owner >= stakers.size()) throw DomainError("unknown staker id " + std::to_string(owner));
    const auto id = static_cast<ValidatorId>(validators.size());
    validators.push_back(Validator{
        .id = id,
        .owner = owner,
        .balance = deposit,
        .effective_balance = initial_effective_balance(deposit, params),
    });
    stakers[owner].validators.push_back(id);
    initial_deposits += deposit;
    return id;
}

bool ChainState::in_duty_set(ValidatorId id) const {
    const auto s = validator(id).status;
    return s == ValidatorStatus::Active || s == ValidatorStatus::ExitQueued;
}

Gwei ChainState::total_effective_stake() const {
    Gwei total = 0;
    for (const auto& v : validators) {
        switch (v.status) {
            case ValidatorStatus::Active:
            case ValidatorStatus::ExitQueued:
            case ValidatorStatus::SlashedPending:
                total += v.effective_balance;
                break;
            default:
                break;
        }
    }
    return total;
}

SignedGwei ChainState::conservation_gap() const {
    Gwei held = 0;
    for (const auto& v : validators) held += v.balance;
    for (const auto& s : stakers) held += s.withdrawn_funds;
    const Gwei expected = initial_deposits + minted_total - burned_total;
    return static_cast<SignedGwei>(held) - static_cast<SignedGwei>(expected);
}

Gwei base_reward(const ChainState& state, ValidatorId id) {
    const auto& v = state.validator(id);
    if (!state.in_duty_set(id))
        throw DomainError("base reward: validator " + std::to_string(id) + " is not attesting");
    return base_reward_amount(v.effective_balance, state.total_effective_stake(), state.params);
}

namespace {

// Mint/burn primitives keep the supply ledger consistent; burns clamp at the
// balance so stored amounts never go negative.
Gwei burn_from(ChainState& state, Validator& v, Gwei amount) {
    const Gwei burned = std::min(amount, v.balance);
    v.balance -= burned;
    state.burned_total += burned;
    return burned;
}

void mint_to(ChainState& state, Validator& v, Gwei amount) {
    v.balance += amount;
    state.minted_total += amount;
}

SignedGwei apply_duty_with_stake(ChainState& state, Validator& v, DutyOutcome outcome,
                                 Gwei total_stake) {
    const Gwei b = base_reward_amount(v.effective_balance, total_stake, state.params);
    switch (outcome) {
        case DutyOutcome::Correct: {
            const Gwei reward = scale_floor(b, state.params.alpha);
            mint_to(state, v, reward);
            return static_cast<SignedGwei>(reward);
        }
        case DutyOutcome::Incorrect:
            return -static_cast<SignedGwei>(burn_from(state, v, scale_floor(b, state.params.beta)));
        case DutyOutcome::Offline:
            return -static_cast<SignedGwei>(burn_from(state, v, scale_floor(b, state.params.gamma)));
    }
    throw DomainError("unreachable duty outcome");
}

void finalize_exit(ChainState& state, Validator& v) {
    v.status = ValidatorStatus::ExitedAwaitingWithdraw;
    v.withdrawable_epoch = state.epoch + state.params.withdraw_delay_epochs;
}

EpochResult advance_core(ChainState& state,
                         const std::function<DutyOutcome(const Validator&)>& outcome_of) {
    EpochResult result;
    result.processed_epoch = state.epoch;
    const ChainParams& p = state.params;
    const Gwei y_total = state.total_effective_stake();

    // (1) duty outcomes
    for (auto& v : state.validators) {
        if (v.status == ValidatorStatus::Active || v.status == ValidatorStatus::ExitQueued)
            apply_duty_with_stake(state, v, outcome_of(v), y_total);
    }

    // (2) per-epoch slash penalties over [slash_epoch, slash_epoch + Z - 1],
    // plus the special penalty at slash_epoch + Z/2
    for (auto& record : state.slash_ledger) {
        auto& v = state.validator(record.validator);
        if (v.status != ValidatorStatus::SlashedPending) continue;
        if (state.epoch >= record.slash_epoch && state.epoch <= record.slash_epoch + p.z_epochs - 1) {
            const Gwei burned =
                burn_from(state, v, per_epoch_slash_amount(v.effective_balance, y_total, p));
            record.realized_penalty += burned;
            result.slash_burn += burned;
        }
        if (!record.special_applied && state.epoch == record.special_due_epoch) {
            const Gwei g = recently_slashed_balance(state, record.special_due_epoch);
            const Gwei burned = burn_from(
                state, v, special_penalty_amount(v.effective_balance, g, y_total, p));
            record.special_applied = true;
            record.realized_penalty += burned;
            result.slash_burn += burned;
        }
    }

    // (3) voluntary exits leave the FIFO up to the per-epoch quota
    std::uint64_t dequeued = 0;
    while (dequeued < p.exit_quota_per_epoch && !state.exit_queue.empty()) {
        const ValidatorId id = state.exit_queue.front();
        state.exit_queue.pop_front();
        auto& v = state.validator(id);
        if (v.status != ValidatorStatus::ExitQueued) continue;  // stale entry
        finalize_exit(state, v);
        result.exits_finalized.push_back(id);
        ++dequeued;
    }

    // (4) forced exits below the floor, no extra penalty; slashed validators
    // stay on their own Z-epoch path
    for (auto& v : state.validators) {
        if ((v.status == ValidatorStatus::Active || v.status == ValidatorStatus::ExitQueued) &&
            v.balance < p.forced_exit_floor) {
            if (v.status == ValidatorStatus::ExitQueued)
                std::erase(state.exit_queue, v.id);
            finalize_exit(state, v);
            result.forced_exits.push_back(v.id);
        }
    }

    // (5) slashed validators complete the window: the next state (epoch + 1)
    // is the first with status SlashedExited at slash_epoch + Z
    for (auto& v : state.validators) {
        if (v.status == ValidatorStatus::SlashedPending &&
            state.epoch + 1 >= v.slash_epoch + p.z_epochs) {
            v.status = ValidatorStatus::SlashedExited;
            result.slashed_exited.push_back(v.id);
        }
    }

    // (6) effective-balance hysteresis for stake still on the books
    for (auto& v : state.validators) {
        switch (v.status) {
            case ValidatorStatus::Active:
            case ValidatorStatus::ExitQueued:
            case ValidatorStatus::SlashedPending:
                v.effective_balance = effective_balance_update(v.balance, v.effective_balance, p);
                break;
            default:
                break;
        }
    }

    // (7)
    ++state.epoch;
    return result;
}

}  // namespace

SignedGwei apply_duty_outcome(ChainState& state, ValidatorId id, DutyOutcome outcome) {
    if (!state.in_duty_set(id))
        throw DomainError("duty outcome: validator " + std::to_string(id) + " is not attesting");
    return apply_duty_with_stake(state, state.validator(id), outcome,
                                 state.total_effective_stake());
}

void sign_voluntary_exit(ChainState& state, ValidatorId id) {
    auto& v = state.validator(id);
    if (v.status != ValidatorStatus::Active || v.slashed)
        throw DomainError("exit not permitted: validator " + std::to_string(id) + " is " +
                          to_string(v.status));
    v.status = ValidatorStatus::ExitQueued;
    v.queued_epoch = state.epoch;
    state.exit_queue.push_back(id);
}

EpochResult advance_epoch(ChainState& state, std::span<const DutyAssignment> duties) {
    std::vector<std::uint8_t> assigned(state.validators.size(), 0);
    std::vector<DutyOutcome> outcome(state.validators.size(), DutyOutcome::Correct);
    for (const auto& d : duties) {
        if (d.id >= state.validators.size() || !state.in_duty_set(d.id))
            throw DomainError("duty assigned to non-attesting validator " + std::to_string(d.id));
        if (assigned[d.id]) throw DomainError("duplicate duty for validator " + std::to_string(d.id));
        assigned[d.id] = 1;
        outcome[d.id] = d.outcome;
    }
    for (const auto& v : state.validators) {
        if ((v.status == ValidatorStatus::Active || v.status == ValidatorStatus::ExitQueued) &&
            !assigned[v.id])
            throw DomainError("missing duty for active validator " + std::to_string(v.id));
    }
    return advance_core(state, [&](const Validator& v) { return outcome[v.id]; });
}

EpochResult advance_epoch(ChainState& state,
                          const std::function<DutyOutcome(const Validator&)>& outcome_of) {
    return advance_core(state, outcome_of);
}

Gwei withdraw(ChainState& state, ValidatorId id) {
    auto& v = state.validator(id);
    const bool voluntary_ready = v.status == ValidatorStatus::ExitedAwaitingWithdraw &&
                                 v.withdrawable_epoch <= state.epoch;
    const bool slashed_ready = v.status == ValidatorStatus::SlashedExited;
    if (!voluntary_ready && !slashed_ready) {
        if (v.status == ValidatorStatus::ExitedAwaitingWithdraw)
            throw DomainError("validator " + std::to_string(id) + " withdrawable at epoch " +
                              std::to_string(v.withdrawable_epoch) + ", current epoch " +
                              std::to_string(state.epoch));
        throw DomainError("validator " + std::to_string(id) + " is not withdrawable (" +
                          to_string(v.status) + ")");
    }
    const Gwei amount = v.balance;
    v.balance = 0;
    v.status = ValidatorStatus::Withdrawn;
    state.stakers[v.owner].withdrawn_funds += amount;
    return amount;
}

}  // namespace slashsim

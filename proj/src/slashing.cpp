#include "slashsim/slashing.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

namespace slashsim {

void slash(ChainState& state, ValidatorId id, std::optional<ValidatorId> whistleblower,
           std::optional<ValidatorId> proposer) {
    auto& v = state.validator(id);
    if (v.slashed) throw DomainError("validator " + std::to_string(id) + " is already slashed");
    if (v.status != ValidatorStatus::Active && v.status != ValidatorStatus::ExitQueued)
        throw DomainError("cannot slash exited validator " + std::to_string(id));

    const ChainParams& p = state.params;
    const Gwei initial = std::min(v.effective_balance / p.initial_slash_divisor, v.balance);
    v.balance -= initial;
    state.burned_total += initial;

    if (v.status == ValidatorStatus::ExitQueued) std::erase(state.exit_queue, id);
    v.status = ValidatorStatus::SlashedPending;
    v.slashed = true;
    v.slash_epoch = state.epoch;

    state.slash_ledger.push_back(SlashRecord{
        .validator = id,
        .slash_epoch = state.epoch,
        .effective_at_slash = v.effective_balance,
        .special_due_epoch = state.epoch + p.z_epochs / 2,
        .whistleblower = whistleblower,
        .realized_penalty = initial,
    });

    if (whistleblower && p.whistleblower_reward > 0) {
        auto& w = state.validator(*whistleblower);
        w.balance += p.whistleblower_reward;
        state.minted_total += p.whistleblower_reward;
    }
    if (proposer && p.whistleblower_reward > 0) {
        const Gwei reward = p.whistleblower_reward / 7;
        auto& pr = state.validator(*proposer);
        pr.balance += reward;
        state.minted_total += reward;
    }
}

Gwei recently_slashed_balance(const ChainState& state, Epoch at_epoch) {
    const Epoch z = state.params.z_epochs;
    const Epoch lower = at_epoch + 1 > z ? at_epoch + 1 - z : 0;
    Gwei total = 0;
    for (const auto& record : state.slash_ledger) {
        if (record.slash_epoch >= lower && record.slash_epoch <= at_epoch)
            total += record.effective_at_slash;
    }
    return total;
}

Gwei special_penalty(const ChainState& state, ValidatorId id, Epoch at_epoch) {
    const auto due = std::find_if(
        state.slash_ledger.begin(), state.slash_ledger.end(), [&](const SlashRecord& r) {
            return r.validator == id && r.special_due_epoch == at_epoch;
        });
    if (due == state.slash_ledger.end())
        throw DomainError("no special penalty due for validator " + std::to_string(id) +
                          " at epoch " + std::to_string(at_epoch));
    const auto& v = state.validator(id);
    return special_penalty_amount(v.effective_balance, recently_slashed_balance(state, at_epoch),
                                  state.total_effective_stake(), state.params);
}

Gwei per_epoch_slash_penalty(const ChainState& state, ValidatorId id) {
    const auto& v = state.validator(id);
    if (v.status != ValidatorStatus::SlashedPending)
        throw DomainError("validator " + std::to_string(id) + " is not serving a slash window");
    if (state.epoch < v.slash_epoch || state.epoch > v.slash_epoch + state.params.z_epochs - 1)
        throw DomainError("validator " + std::to_string(id) + " is outside its penalty window");
    return per_epoch_slash_amount(v.effective_balance, state.total_effective_stake(),
                                  state.params);
}

PenaltyForecast forecast_total_penalty(const ChainState& state,
                                       std::span<const ValidatorId> compromised, Epoch,
                                       const ForecastAssumption& assumption) {
    if (compromised.empty()) throw DomainError("forecast: empty compromised set");

    Gwei compromised_effective = 0;
    for (const ValidatorId id : compromised) {
        const auto& v = state.validator(id);
        if (v.slashed)
            throw DomainError("forecast: validator " + std::to_string(id) + " already slashed");
        compromised_effective += v.effective_balance;
    }

    const Gwei y_total =
        assumption.total_stake_override.value_or(state.total_effective_stake());
    const Gwei g = assumption.slashed_balance_override.value_or(
        compromised_effective + assumption.extra_slashed_balance);

    PenaltyForecast forecast;
    for (const ValidatorId id : compromised) {
        const auto c =
            penalty_components(state.validator(id).effective_balance, g, y_total, state.params);
        forecast.initial += c.initial;
        forecast.per_epoch_total += c.per_epoch_total;
        forecast.special_total += c.special;
    }
    forecast.total = forecast.initial + forecast.per_epoch_total + forecast.special_total;
    return forecast;
}

nlohmann::json PenaltyForecast::to_json() const {
    return nlohmann::json{
        {"initial", initial},
        {"per_epoch_total", per_epoch_total},
        {"special_total", special_total},
        {"total", total},
    };
}

}  // namespace slashsim

#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <span>

#include "slashsim/chain.hpp"

namespace slashsim {

/// Slashes an attesting validator: burns effective/divisor immediately,
/// records the slashing, removes it from duties and from the voluntary exit
/// queue, and credits the whistleblower (reward w) and proposer (w/7) when
/// given. The special penalty falls due at slash_epoch + Z/2.
void slash(ChainState& state, ValidatorId id,
           std::optional<ValidatorId> whistleblower = std::nullopt,
           std::optional<ValidatorId> proposer = std::nullopt);

/// G(at_epoch): sum of effective-at-slash over records with
/// slash_epoch in [at_epoch - Z + 1, at_epoch].
Gwei recently_slashed_balance(const ChainState& state, Epoch at_epoch);

/// The correlation penalty for a validator whose special_due_epoch equals
/// at_epoch. Errors when no such record is due.
Gwei special_penalty(const ChainState& state, ValidatorId id, Epoch at_epoch);

/// floor(delta * b) for a SlashedPending validator inside its penalty window.
Gwei per_epoch_slash_penalty(const ChainState& state, ValidatorId id);

struct PenaltyForecast {
    Gwei initial = 0;          // sum of effective/divisor
    Gwei per_epoch_total = 0;  // Z * floor(delta*b) summed over the set
    Gwei special_total = 0;    // sum of correlation penalties
    Gwei total = 0;

    nlohmann::json to_json() const;
};

/// The convention behind a penalty forecast. The default freezes Y at its
/// current value, keeps b constant across the window, and assumes the
/// recently-slashed balance at the special-penalty epoch is exactly the
/// compromised set's effective stake. Both knobs can be overridden to model
/// different beliefs about background slashing.
struct ForecastAssumption {
    std::optional<Gwei> total_stake_override;     // Y(t_r)
    std::optional<Gwei> slashed_balance_override; // G at the special epoch
    Gwei extra_slashed_balance = 0;               // added to G when no override
};

/// H(t_r) for a set of compromised, unslashed validators.
PenaltyForecast forecast_total_penalty(const ChainState& state,
                                       std::span<const ValidatorId> compromised, Epoch t_r,
                                       const ForecastAssumption& assumption = {});

}  // namespace slashsim

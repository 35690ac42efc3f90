#pragma once

#include <span>

#include "slashsim/params.hpp"
#include "slashsim/types.hpp"

namespace slashsim {

/// Per-epoch base reward b = floor(effective * factor / (per_epoch * isqrt(Y))).
/// Y is the total effective stake in Gwei. Throws when Y == 0.
Gwei base_reward_amount(Gwei effective, Gwei total_stake, const ChainParams& params);

/// Special (correlation) penalty
///   P = floor(effective * min(big_delta * G, Y) / Y),
/// evaluated exactly: saturates to the full effective balance once
/// big_delta * G >= Y. Returns 0 when effective == 0.
Gwei special_penalty_amount(Gwei effective, Gwei recently_slashed, Gwei total_stake,
                            const ChainParams& params);

/// floor(delta * b) with b the base reward at (effective, Y).
Gwei per_epoch_slash_amount(Gwei effective, Gwei total_stake, const ChainParams& params);

/// The three components of a total slashing penalty for one validator:
/// initial floor(effective / divisor), z_epochs applications of the per-epoch
/// penalty at constant b, and the special penalty at G.
struct PenaltyComponents {
    Gwei initial = 0;
    Gwei per_epoch_total = 0;
    Gwei special = 0;
    Gwei total() const { return initial + per_epoch_total + special; }
};

PenaltyComponents penalty_components(Gwei effective, Gwei recently_slashed, Gwei total_stake,
                                     const ChainParams& params);

/// Hysteresis-smoothed effective balance. Steps up one whole ETH at a time
/// while balance > current + hysteresis_up, steps down while
/// balance < (current - 1 ETH) - hysteresis_down, capped at
/// max_effective_balance. Result is always a multiple of 1 ETH.
Gwei effective_balance_update(Gwei balance, Gwei current_effective, const ChainParams& params);

/// Effective balance assigned at deposit time: floor to 1 ETH, capped.
Gwei initial_effective_balance(Gwei balance, const ChainParams& params);

}  // namespace slashsim

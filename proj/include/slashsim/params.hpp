#pragma once

#include <nlohmann/json_fwd.hpp>

#include "slashsim/types.hpp"

namespace slashsim {

/// Protocol constants. Defaults follow the mainnet-era values the model is
/// parameterized on; everything is configurable so penalty experiments can
/// sweep them.
struct ChainParams {
    std::uint64_t base_reward_factor = 64;
    std::uint64_t base_rewards_per_epoch = 4;

    Ratio alpha{3, 1};      // correct-duty reward scale
    Ratio beta{3, 1};       // incorrect-duty penalty scale
    Ratio gamma{1, 1};      // offline penalty scale
    Ratio delta{3, 1};      // per-epoch slash penalty scale
    Ratio big_delta{3, 1};  // special (correlation) penalty scale

    std::uint64_t z_epochs = 8192;              // slashed-validator exit delay, 2^13
    std::uint64_t withdraw_delay_epochs = 256;  // 2^8
    std::uint64_t exit_quota_per_epoch = 4;     // voluntary-exit dequeue rate
    std::uint64_t initial_slash_divisor = 32;   // immediate penalty = effective / divisor

    Gwei whistleblower_reward = 0;
    Gwei forced_exit_floor = 16 * kGweiPerEth;
    Gwei max_effective_balance = 32 * kGweiPerEth;
    Gwei hysteresis_up = kGweiPerEth + kGweiPerEth / 4;  // 1.25 ETH
    Gwei hysteresis_down = kGweiPerEth / 4;              // 0.25 ETH

    /// Throws ConfigError naming the bad field.
    void validate() const;

    static ChainParams from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;

    bool operator==(const ChainParams&) const = default;
};

/// Accepts 3, [3,2], {"num":3,"den":2} or "3/2".
Ratio ratio_from_json(const nlohmann::json& value, const std::string& field);
nlohmann::json ratio_to_json(Ratio r);

}  // namespace slashsim

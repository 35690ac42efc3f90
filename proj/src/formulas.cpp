#include "slashsim/formulas.hpp"

namespace slashsim {

Gwei base_reward_amount(Gwei effective, Gwei total_stake, const ChainParams& params) {
    if (total_stake == 0) throw DomainError("base reward: no stake");
    const Gwei denom = params.base_rewards_per_epoch * isqrt_u64(total_stake);
    return mul_div_floor(effective, params.base_reward_factor, denom);
}

Gwei special_penalty_amount(Gwei effective, Gwei recently_slashed, Gwei total_stake,
                            const ChainParams& params) {
    if (effective == 0) return 0;
    if (total_stake == 0) throw DomainError("special penalty: no stake");
    const Ratio d = params.big_delta;
    // Saturation test big_delta * G >= Y, exactly: d.num * G >= Y * d.den.
    const auto scaled_g = static_cast<unsigned __int128>(d.num) * recently_slashed;
    const auto scaled_y = static_cast<unsigned __int128>(d.den) * total_stake;
    if (scaled_g >= scaled_y) return effective;
    // floor(effective * d.num * G / (d.den * Y)); the numerator needs up to
    // ~126 bits at protocol scale, guard anyway for absurd configurations.
    unsigned __int128 num = static_cast<unsigned __int128>(effective) * d.num;
    if (recently_slashed != 0 &&
        num > static_cast<unsigned __int128>(-1) / recently_slashed)
        throw DomainError("special penalty: intermediate overflow");
    num *= recently_slashed;
    const auto q = num / scaled_y;
    return static_cast<Gwei>(q);  // q <= effective, fits
}

Gwei per_epoch_slash_amount(Gwei effective, Gwei total_stake, const ChainParams& params) {
    return scale_floor(base_reward_amount(effective, total_stake, params), params.delta);
}

PenaltyComponents penalty_components(Gwei effective, Gwei recently_slashed, Gwei total_stake,
                                     const ChainParams& params) {
    PenaltyComponents c;
    c.initial = effective / params.initial_slash_divisor;
    c.per_epoch_total = params.z_epochs * per_epoch_slash_amount(effective, total_stake, params);
    c.special = special_penalty_amount(effective, recently_slashed, total_stake, params);
    return c;
}

Gwei effective_balance_update(Gwei balance, Gwei current_effective, const ChainParams& params) {
    Gwei eff = current_effective;
    while (eff < params.max_effective_balance && balance > eff + params.hysteresis_up)
        eff += kGweiPerEth;
    // Step down while balance < (eff - 1 ETH) - hysteresis_down: the balance
    // must undershoot the next lower integer by the hysteresis margin.
    while (eff >= kGweiPerEth &&
           balance + kGweiPerEth + params.hysteresis_down < eff)
        eff -= kGweiPerEth;
    if (eff > params.max_effective_balance) eff = params.max_effective_balance;
    return eff;
}

Gwei initial_effective_balance(Gwei balance, const ChainParams& params) {
    const Gwei floored = balance - balance % kGweiPerEth;
    return floored > params.max_effective_balance ? params.max_effective_balance : floored;
}

}  // namespace slashsim

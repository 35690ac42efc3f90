#include "slashsim/params.hpp"

#include <nlohmann/json.hpp>

namespace slashsim {

void ChainParams::validate() const {
    auto positive = [](Ratio r, const char* field) {
        if (r.den == 0) throw ConfigError(field, "zero denominator");
        if (r.num == 0) return;  // zero scale is legal (penalty sweeps use it)
    };
    positive(alpha, "alpha");
    positive(beta, "beta");
    positive(gamma, "gamma");
    positive(delta, "delta");
    positive(big_delta, "big_delta");
    if (base_rewards_per_epoch == 0)
        throw ConfigError("base_rewards_per_epoch", "must be positive");
    if (z_epochs == 0 || z_epochs % 2 != 0)
        throw ConfigError("z_epochs", "must be a positive even number (special penalty is due at slash + Z/2)");
    if (initial_slash_divisor == 0)
        throw ConfigError("initial_slash_divisor", "must be >= 1");
    if (max_effective_balance == 0 || max_effective_balance % kGweiPerEth != 0)
        throw ConfigError("max_effective_balance", "must be a positive multiple of 1 ETH");
}

Ratio ratio_from_json(const nlohmann::json& value, const std::string& field) {
    Ratio r;
    if (value.is_number_unsigned() || value.is_number_integer()) {
        const auto v = value.get<std::int64_t>();
        if (v < 0) throw ConfigError(field, "scale factors are non-negative");
        r = Ratio{static_cast<std::uint64_t>(v), 1};
    } else if (value.is_array() && value.size() == 2) {
        r = Ratio{value[0].get<std::uint64_t>(), value[1].get<std::uint64_t>()};
    } else if (value.is_object()) {
        r = Ratio{value.at("num").get<std::uint64_t>(), value.at("den").get<std::uint64_t>()};
    } else if (value.is_string()) {
        const auto s = value.get<std::string>();
        const auto slash = s.find('/');
        try {
            if (slash == std::string::npos) {
                r = Ratio{std::stoull(s), 1};
            } else {
                r = Ratio{std::stoull(s.substr(0, slash)), std::stoull(s.substr(slash + 1))};
            }
        } catch (const std::exception&) {
            throw ConfigError(field, "cannot parse rational '" + s + "'");
        }
    } else {
        throw ConfigError(field, "expected integer, [num,den], {num,den} or \"num/den\"");
    }
    if (r.den == 0) throw ConfigError(field, "zero denominator");
    return r;
}

nlohmann::json ratio_to_json(Ratio r) {
    if (r.den == 1) return r.num;
    return nlohmann::json{{"num", r.num}, {"den", r.den}};
}

ChainParams ChainParams::from_json(const nlohmann::json& doc) {
    ChainParams p;
    if (!doc.is_object()) throw ConfigError("params", "expected a JSON object");
    auto get_u64 = [&](const char* key, std::uint64_t& out) {
        if (!doc.contains(key)) return;
        if (!doc[key].is_number_unsigned() && !doc[key].is_number_integer())
            throw ConfigError(key, "expected an integer");
        out = doc[key].get<std::uint64_t>();
    };
    auto get_ratio = [&](const char* key, Ratio& out) {
        if (doc.contains(key)) out = ratio_from_json(doc[key], key);
    };
    get_u64("base_reward_factor", p.base_reward_factor);
    get_u64("base_rewards_per_epoch", p.base_rewards_per_epoch);
    get_ratio("alpha", p.alpha);
    get_ratio("beta", p.beta);
    get_ratio("gamma", p.gamma);
    get_ratio("delta", p.delta);
    get_ratio("big_delta", p.big_delta);
    get_u64("z_epochs", p.z_epochs);
    get_u64("withdraw_delay_epochs", p.withdraw_delay_epochs);
    get_u64("exit_quota_per_epoch", p.exit_quota_per_epoch);
    get_u64("initial_slash_divisor", p.initial_slash_divisor);
    get_u64("whistleblower_reward", p.whistleblower_reward);
    get_u64("forced_exit_floor", p.forced_exit_floor);
    get_u64("max_effective_balance", p.max_effective_balance);
    get_u64("hysteresis_up", p.hysteresis_up);
    get_u64("hysteresis_down", p.hysteresis_down);
    p.validate();
    return p;
}

nlohmann::json ChainParams::to_json() const {
    return nlohmann::json{
        {"base_reward_factor", base_reward_factor},
        {"base_rewards_per_epoch", base_rewards_per_epoch},
        {"alpha", ratio_to_json(alpha)},
        {"beta", ratio_to_json(beta)},
        {"gamma", ratio_to_json(gamma)},
        {"delta", ratio_to_json(delta)},
        {"big_delta", ratio_to_json(big_delta)},
        {"z_epochs", z_epochs},
        {"withdraw_delay_epochs", withdraw_delay_epochs},
        {"exit_quota_per_epoch", exit_quota_per_epoch},
        {"initial_slash_divisor", initial_slash_divisor},
        {"whistleblower_reward", whistleblower_reward},
        {"forced_exit_floor", forced_exit_floor},
        {"max_effective_balance", max_effective_balance},
        {"hysteresis_up", hysteresis_up},
        {"hysteresis_down", hysteresis_down},
    };
}

}  // namespace slashsim

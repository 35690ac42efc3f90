#include "slashsim/scenario.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace slashsim {

void DutyModel::validate() const {
    if (p_correct < 0 || p_incorrect < 0 || p_offline < 0)
        throw ConfigError("duty_model", "probabilities must be non-negative");
    if (std::abs(p_correct + p_incorrect + p_offline - 1.0) > 1e-9)
        throw ConfigError("duty_model", "p_correct + p_incorrect + p_offline must sum to 1");
}

void Scenario::validate() const {
    params.validate();
    duty_model.validate();
    if (!population.distribution() && population.explicit_stakers.empty())
        throw ConfigError("population", "needs either buckets or explicit stakers");
    if (population.distribution() && !population.explicit_stakers.empty())
        throw ConfigError("population", "buckets and explicit stakers are mutually exclusive");
    for (std::size_t i = 0; i < population.buckets.size(); ++i) {
        const auto& b = population.buckets[i];
        const std::string path = "population.buckets[" + std::to_string(i) + "]";
        if (b.min_validators == 0) throw ConfigError(path + ".min", "must be >= 1");
        if (b.max_validators && *b.max_validators < b.min_validators)
            throw ConfigError(path + ".max", "must be >= min");
        if (!b.max_validators && !population.unbounded_bucket_cap)
            throw ConfigError(path + ".max",
                              "open-ended bucket requires population.unbounded_bucket_cap");
    }
    if (attack.strategy == AttackStrategy::PayOrSlash && attack.demand_schedule.empty())
        throw ConfigError("attack.demand_schedule", "Pay-or-Slash needs at least one demand");
    if (attack.tick == 0) throw ConfigError("attack.tick", "must be positive");
    if (attack.whistleblower_win_probability < 0 || attack.whistleblower_win_probability > 1)
        throw ConfigError("attack.whistleblower_win_probability", "must lie in [0, 1]");
    if (attack.deadline_offset == 0)
        throw ConfigError("attack.deadline_offset", "deadline must be in the future");
    if (horizon_epochs < attack.deadline_offset + params.z_epochs)
        throw ConfigError("horizon_epochs", "must cover deadline + z_epochs (" +
                                                std::to_string(attack.deadline_offset +
                                                               params.z_epochs) +
                                                ")");
    if (victim_policy == VictimPolicyKind::NaiveBudget && naive_budget == 0)
        throw ConfigError("naive_budget", "naive policy needs a positive budget");
}

namespace {

VictimPolicyKind policy_from_string(const std::string& s) {
    if (s == "rational") return VictimPolicyKind::Rational;
    if (s == "never_pay") return VictimPolicyKind::NeverPay;
    if (s == "naive") return VictimPolicyKind::NaiveBudget;
    if (s == "exit_without_paying") return VictimPolicyKind::ExitWithoutPaying;
    throw ConfigError("victim_policy", "unknown policy '" + s + "'");
}

const char* policy_to_string(VictimPolicyKind kind) {
    switch (kind) {
        case VictimPolicyKind::Rational: return "rational";
        case VictimPolicyKind::NeverPay: return "never_pay";
        case VictimPolicyKind::NaiveBudget: return "naive";
        case VictimPolicyKind::ExitWithoutPaying: return "exit_without_paying";
    }
    return "?";
}

}  // namespace

Scenario Scenario::from_json(const nlohmann::json& doc) {
    Scenario sc;
    if (!doc.is_object()) throw ConfigError("scenario", "expected a JSON object");
    if (doc.contains("params")) sc.params = ChainParams::from_json(doc["params"]);

    if (!doc.contains("population")) throw ConfigError("population", "missing");
    const auto& pop = doc["population"];
    if (pop.contains("buckets")) {
        for (const auto& b : pop["buckets"]) {
            PopulationBucket bucket;
            bucket.min_validators = b.at("min").get<std::uint64_t>();
            if (b.contains("max") && !b["max"].is_null())
                bucket.max_validators = b["max"].get<std::uint64_t>();
            bucket.staker_count = b.at("stakers").get<std::uint64_t>();
            sc.population.buckets.push_back(bucket);
        }
    }
    if (pop.contains("stakers")) {
        for (const auto& n : pop["stakers"])
            sc.population.explicit_stakers.push_back(n.get<std::uint64_t>());
    }
    if (pop.contains("balance_per_validator"))
        sc.population.balance_per_validator = pop["balance_per_validator"].get<Gwei>();
    if (pop.contains("unbounded_bucket_cap") && !pop["unbounded_bucket_cap"].is_null())
        sc.population.unbounded_bucket_cap = pop["unbounded_bucket_cap"].get<std::uint64_t>();

    if (doc.contains("attack")) {
        const auto& atk = doc["attack"];
        sc.attack.victim_staker = atk.value("victim_staker", StakerId{0});
        sc.attack.compromised_count = atk.value("compromised_count", std::uint64_t{0});
        if (atk.contains("strategy")) {
            const auto s = atk["strategy"].get<std::string>();
            if (s == "PayAndExit") sc.attack.strategy = AttackStrategy::PayAndExit;
            else if (s == "PayOrSlash") sc.attack.strategy = AttackStrategy::PayOrSlash;
            else throw ConfigError("attack.strategy", "unknown strategy '" + s + "'");
        }
        sc.attack.fee = atk.value("fee", Gwei{0});
        sc.attack.zeta = atk.value("zeta", SignedGwei{0});
        sc.attack.deadline_offset = atk.value("deadline_offset", Epoch{100});
        sc.attack.whistleblower_win_probability =
            atk.value("whistleblower_win_probability", 0.0);
        if (atk.contains("victim_h_override") && !atk["victim_h_override"].is_null())
            sc.attack.victim_h_override = atk["victim_h_override"].get<Gwei>();
        sc.attack.tick = atk.value("tick", Gwei{1'000'000});
        sc.attack.window_x = atk.value("window_x", Epoch{64});
        sc.attack.iterations = atk.value("iterations", 1U);
        if (atk.contains("demand_schedule"))
            for (const auto& d : atk["demand_schedule"])
                sc.attack.demand_schedule.push_back(d.get<Gwei>());
    }

    if (doc.contains("duty_model")) {
        const auto& dm = doc["duty_model"];
        sc.duty_model.p_correct = dm.value("p_correct", 1.0);
        sc.duty_model.p_incorrect = dm.value("p_incorrect", 0.0);
        sc.duty_model.p_offline = dm.value("p_offline", 0.0);
    }

    if (doc.contains("victim_policy"))
        sc.victim_policy = policy_from_string(doc["victim_policy"].get<std::string>());
    sc.naive_budget = doc.value("naive_budget", Gwei{0});
    if (!doc.contains("horizon_epochs")) throw ConfigError("horizon_epochs", "missing");
    sc.horizon_epochs = doc["horizon_epochs"].get<Epoch>();
    sc.seed = doc.value("seed", std::uint64_t{0});

    sc.validate();
    return sc;
}

nlohmann::json Scenario::to_json() const {
    nlohmann::json pop;
    if (!population.buckets.empty()) {
        auto arr = nlohmann::json::array();
        for (const auto& b : population.buckets) {
            nlohmann::json jb{{"min", b.min_validators}, {"stakers", b.staker_count}};
            if (b.max_validators) jb["max"] = *b.max_validators;
            arr.push_back(jb);
        }
        pop["buckets"] = arr;
    }
    if (!population.explicit_stakers.empty()) pop["stakers"] = population.explicit_stakers;
    pop["balance_per_validator"] = population.balance_per_validator;
    if (population.unbounded_bucket_cap)
        pop["unbounded_bucket_cap"] = *population.unbounded_bucket_cap;

    return nlohmann::json{
        {"params", params.to_json()},
        {"population", pop},
        {"attack",
         {{"victim_staker", attack.victim_staker},
          {"compromised_count", attack.compromised_count},
          {"strategy", attack.strategy == AttackStrategy::PayAndExit ? "PayAndExit" : "PayOrSlash"},
          {"fee", attack.fee},
          {"zeta", attack.zeta},
          {"deadline_offset", attack.deadline_offset},
          {"whistleblower_win_probability", attack.whistleblower_win_probability},
          {"victim_h_override",
           attack.victim_h_override ? nlohmann::json(*attack.victim_h_override)
                                    : nlohmann::json(nullptr)},
          {"tick", attack.tick},
          {"window_x", attack.window_x},
          {"iterations", attack.iterations},
          {"demand_schedule", attack.demand_schedule}}},
        {"duty_model",
         {{"p_correct", duty_model.p_correct},
          {"p_incorrect", duty_model.p_incorrect},
          {"p_offline", duty_model.p_offline}}},
        {"victim_policy", policy_to_string(victim_policy)},
        {"naive_budget", naive_budget},
        {"horizon_epochs", horizon_epochs},
        {"seed", seed},
    };
}

}  // namespace slashsim

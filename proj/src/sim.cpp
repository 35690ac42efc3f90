#include "slashsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "slashsim/rng.hpp"

namespace slashsim {

ChainState build_population(const PopulationSpec& spec, const ChainParams& params,
                            std::uint64_t seed) {
    if (!spec.distribution() && spec.explicit_stakers.empty())
        throw DomainError("population: no stakers configured");

    ChainState state;
    state.params = params;
    SplitMix64 rng(mix64(seed, 0x706f70ULL));  // population stream

    auto add_staker_with = [&](std::uint64_t count) {
        const StakerId staker = state.add_staker();
        for (std::uint64_t i = 0; i < count; ++i)
            state.add_validator(staker, spec.balance_per_validator);
    };

    if (spec.distribution()) {
        for (const auto& bucket : spec.buckets) {
            std::uint64_t hi = bucket.max_validators
                                   ? *bucket.max_validators
                                   : spec.unbounded_bucket_cap.value_or(0);
            if (hi == 0)
                throw DomainError("population: open-ended bucket without a configured cap");
            if (hi < bucket.min_validators)
                throw DomainError("population: bucket cap below the bucket minimum");
            for (std::uint64_t s = 0; s < bucket.staker_count; ++s) {
                const std::uint64_t span = hi - bucket.min_validators + 1;
                add_staker_with(bucket.min_validators + rng.next_below(span));
            }
        }
    } else {
        for (const std::uint64_t count : spec.explicit_stakers) add_staker_with(count);
    }
    return state;
}

namespace {

std::vector<ValidatorId> compromised_set(const ChainState& state, const AttackSpec& attack) {
    if (attack.victim_staker >= state.stakers.size())
        throw ConfigError("attack.victim_staker", "no such staker");
    const auto& owned = state.stakers[attack.victim_staker].validators;
    if (owned.empty()) throw ConfigError("attack.victim_staker", "staker owns no validators");
    std::uint64_t count = attack.compromised_count == 0 ? owned.size() : attack.compromised_count;
    if (count > owned.size())
        throw ConfigError("attack.compromised_count", "staker owns only " +
                                                          std::to_string(owned.size()) +
                                                          " validators");
    return {owned.begin(), owned.begin() + static_cast<std::ptrdiff_t>(count)};
}

Gwei total_balance_of(const ChainState& state, std::span<const ValidatorId> ids) {
    Gwei total = 0;
    for (const auto id : ids) total += state.validator(id).balance;
    return total;
}

/// Effective stake of everything not yet withdrawn; the denominator for
/// "what H would be had no one left" re-evaluations.
Gwei stake_including_exited(const ChainState& state) {
    Gwei total = 0;
    for (const auto& v : state.validators)
        if (v.status != ValidatorStatus::Withdrawn) total += v.effective_balance;
    return total;
}

struct DutyDraw {
    std::uint64_t seed;
    bool all_correct;
    std::uint64_t correct_cut;    // 53-bit thresholds
    std::uint64_t incorrect_cut;

    explicit DutyDraw(const DutyModel& model, std::uint64_t seed_) : seed(seed_) {
        all_correct = model.p_correct >= 1.0;
        const double scale = 9007199254740992.0;  // 2^53
        correct_cut = static_cast<std::uint64_t>(model.p_correct * scale);
        incorrect_cut =
            correct_cut + static_cast<std::uint64_t>(model.p_incorrect * scale);
    }

    DutyOutcome operator()(Epoch epoch, ValidatorId id) const {
        if (all_correct) return DutyOutcome::Correct;
        const std::uint64_t x = mix64(seed, epoch, id) >> 11;
        if (x < correct_cut) return DutyOutcome::Correct;
        if (x < incorrect_cut) return DutyOutcome::Incorrect;
        return DutyOutcome::Offline;
    }
};

/// Picks a deterministic "random" non-compromised attesting validator for
/// whistleblower / proposer credit.
std::optional<ValidatorId> pick_outside(const ChainState& state,
                                        std::span<const ValidatorId> compromised,
                                        SplitMix64& rng) {
    std::vector<ValidatorId> candidates;
    candidates.reserve(64);
    for (const auto& v : state.validators) {
        if (!state.in_duty_set(v.id)) continue;
        if (std::find(compromised.begin(), compromised.end(), v.id) != compromised.end())
            continue;
        candidates.push_back(v.id);
        if (candidates.size() >= 64) break;  // a small pool is plenty
    }
    if (candidates.empty()) return std::nullopt;
    return candidates[rng.next_below(candidates.size())];
}

}  // namespace

SimReport run(const Scenario& scenario) {
    scenario.validate();
    const AttackSpec& attack = scenario.attack;

    ChainState state = build_population(scenario.population, scenario.params, scenario.seed);
    const std::vector<ValidatorId> compromised = compromised_set(state, attack);
    const Epoch deadline = attack.deadline_offset;

    SimReport report;

    // Attacker's planning step at t = 0.
    report.forecast_h =
        forecast_total_penalty(state, compromised, deadline, ForecastAssumption{}).total;
    PayAndExitGame game{
        .compromised_balance = total_balance_of(state, compromised),
        .penalty_h = report.forecast_h,
        .fee = attack.fee,
        .slash_cost = attack.zeta,
        .deadline = deadline,
        .exit_epoch = deadline,
    };
    report.equilibrium = solve_spne(game, attack.tick);

    if (attack.strategy == AttackStrategy::PayOrSlash) {
        RationalVictimPolicy rational;
        NaiveVictimPolicy naive(scenario.naive_budget);
        class NeverPolicy final : public VictimPolicy {
        public:
            bool accept(Gwei, Gwei, const PayAndExitGame&) override { return false; }
        } never;
        VictimPolicy* policy = &rational;
        if (scenario.victim_policy == VictimPolicyKind::NaiveBudget) policy = &naive;
        if (scenario.victim_policy == VictimPolicyKind::NeverPay) policy = &never;
        report.repeated = simulate_pay_or_slash(game, attack.window_x, attack.iterations,
                                                *policy, attack.demand_schedule);
        report.repeated_valid = true;
    }

    // Plans realized on chain.
    const bool threat_credible = -attack.zeta > 0;
    bool victim_will_pay = false;
    bool victim_will_sign = false;
    switch (scenario.victim_policy) {
        case VictimPolicyKind::Rational: {
            // The victim evaluates the posted demand under her own view of
            // the game; by default that view is the attacker's, but a
            // different H belief can be injected to study mispricing.
            PayAndExitGame victim_view = game;
            if (attack.victim_h_override) victim_view.penalty_h = *attack.victim_h_override;
            victim_will_pay = report.equilibrium.ransom > 0 &&
                              victim_accepts(victim_view, report.equilibrium.ransom);
            victim_will_sign = victim_will_pay;
            break;
        }
        case VictimPolicyKind::NaiveBudget:
            victim_will_pay = report.equilibrium.ransom > 0 &&
                              report.equilibrium.ransom <= scenario.naive_budget;
            victim_will_sign = victim_will_pay;
            break;
        case VictimPolicyKind::NeverPay:
            break;
        case VictimPolicyKind::ExitWithoutPaying:
            victim_will_sign = true;
            break;
    }
    if (attack.strategy == AttackStrategy::PayOrSlash) {
        // Payments are handled by the repeated-game model; on chain the only
        // action left is the threat resolution on rejection.
        victim_will_pay = false;
        victim_will_sign = false;
    }

    std::optional<EscrowContract> escrow;
    if (attack.strategy == AttackStrategy::PayAndExit && report.equilibrium.ransom > 0) {
        escrow.emplace(EscrowContract::create(
            report.equilibrium.ransom, deadline,
            std::set<ValidatorId>(compromised.begin(), compromised.end())));
    }

    const DutyDraw duty(scenario.duty_model, mix64(scenario.seed, 0x64757479ULL));
    SplitMix64 pick_rng(mix64(scenario.seed, 0x7069636bULL));
    SplitMix64 race_rng(mix64(scenario.seed, 0x72616365ULL));
    const auto race_cut = static_cast<std::uint64_t>(
        attack.whistleblower_win_probability * 9007199254740992.0);  // 2^53
    Gwei attacker_whistle_gain = 0;

    bool deposited = false;
    bool attacker_slashed = false;
    const Epoch act_epoch = 1;  // victim decides in the first epoch after t=0

    auto feed = [&](const ChainEvent& ev) {
        report.timeline.push_back(ev);
        if (!escrow || escrow->terminal()) return;
        const TransferAction action = escrow->on_event(ev);
        if (action.to_attacker > 0) report.ransom_paid += action.to_attacker;
    };

    auto slash_compromised = [&](Epoch at) {
        for (const auto id : compromised) {
            if (state.validator(id).slashed) continue;
            // The attacker wins the whistleblower race only with the
            // configured probability; his reporting validator lives outside
            // the modeled registry, so the reward lands on his side of the
            // books rather than on a chain balance.
            std::optional<ValidatorId> whistleblower;
            if ((race_rng.next() >> 11) < race_cut)
                attacker_whistle_gain += state.params.whistleblower_reward;
            else
                whistleblower = pick_outside(state, compromised, pick_rng);
            const auto proposer = pick_outside(state, compromised, pick_rng);
            slash(state, id, whistleblower, proposer);
            feed(ChainEvent::slashed(id, at));
        }
        attacker_slashed = true;
    };

    const bool pay_or_slash_rejects = report.repeated_valid &&
                                      report.repeated.terminal == RepeatedEnd::SlashedOnRejection;

    report.series.reserve(scenario.horizon_epochs);
    for (Epoch t = 0; t < scenario.horizon_epochs; ++t) {
        report.series.push_back(TimeSeriesRow{
            .epoch = t,
            .total_stake = state.total_effective_stake(),
            .recently_slashed = recently_slashed_balance(state, t),
            .victim_balance =
                total_balance_of(state, state.stakers[attack.victim_staker].validators) +
                state.stakers[attack.victim_staker].withdrawn_funds,
        });

        // Victim actions.
        if (t == act_epoch) {
            if (victim_will_pay && escrow) {
                feed(ChainEvent::deposited(escrow->ransom(), t));
                deposited = true;
                report.fee_paid += attack.fee;
            }
            if (victim_will_sign) {
                for (const auto id : compromised) {
                    sign_voluntary_exit(state, id);
                    feed(ChainEvent::exit_signed(id, t));
                }
                // Trip-switch: a non-contract exit is punished on the spot.
                if (!deposited && threat_credible) slash_compromised(t);
            }
        }

        // H as it stands at the deadline, with the full (non-withdrawn)
        // stake as denominator so the value is comparable to the forecast.
        if (t == deadline && !state.validator(compromised.front()).slashed) {
            ForecastAssumption realized_view;
            realized_view.total_stake_override = stake_including_exited(state);
            report.realized_h =
                forecast_total_penalty(state, compromised, deadline, realized_view).total;
        }

        // Attacker resolves the threat at the deadline.
        if (t == deadline && !attacker_slashed && threat_credible) {
            const bool defied = attack.strategy == AttackStrategy::PayAndExit
                                    ? !deposited
                                    : pay_or_slash_rejects;
            if (defied) slash_compromised(t);
        }

        const EpochResult epoch_result =
            advance_epoch(state, [&](const Validator& v) { return duty(state.epoch, v.id); });

        for (const auto id : epoch_result.exits_finalized) {
            if (std::find(compromised.begin(), compromised.end(), id) != compromised.end())
                feed(ChainEvent::exit_finalized(id, epoch_result.processed_epoch));
        }
        feed(ChainEvent::epoch_tick(state.epoch));

        if (state.epoch % 1000 == 0 && state.conservation_gap() != 0)
            throw DomainError("conservation violated at epoch " + std::to_string(state.epoch));
    }

    // Settlement bookkeeping.
    for (const auto& record : state.slash_ledger) {
        if (std::find(compromised.begin(), compromised.end(), record.validator) !=
            compromised.end())
            report.slashing_losses += record.realized_penalty;
    }
    if (attacker_slashed && report.realized_h == 0) report.realized_h = report.slashing_losses;

    if (attack.strategy == AttackStrategy::PayOrSlash) {
        report.ransom_paid = report.repeated.cumulative_ransom;
        report.fee_paid =
            attack.fee * report.repeated.iterations_survived;
        report.escrow_outcome = report.ransom_paid > 0 ? "Payout" : "NoDeposit";
    } else if (escrow) {
        report.escrow_outcome = to_string(escrow->projected_outcome());
    } else {
        report.escrow_outcome = "NotDeployed";
    }

    report.victim_net = -static_cast<SignedGwei>(report.ransom_paid) -
                        static_cast<SignedGwei>(report.fee_paid) -
                        static_cast<SignedGwei>(report.slashing_losses);
    report.attacker_net = static_cast<SignedGwei>(report.ransom_paid) +
                          static_cast<SignedGwei>(attacker_whistle_gain) +
                          (attacker_slashed ? -attack.zeta : 0);
    return report;
}

PartitionReport partition_experiment(const Scenario& scenario, unsigned k) {
    if (k == 0) throw DomainError("partition: k must be at least 1");
    ChainState state = build_population(scenario.population, scenario.params, scenario.seed);
    if (scenario.attack.victim_staker >= state.stakers.size())
        throw ConfigError("attack.victim_staker", "no such staker");
    const auto& owned = state.stakers[scenario.attack.victim_staker].validators;
    if (k > owned.size())
        throw DomainError("partition: k = " + std::to_string(k) + " exceeds the staker's " +
                          std::to_string(owned.size()) + " validators");

    const Epoch deadline = scenario.attack.deadline_offset;
    PartitionReport out;
    out.partitions = k;
    out.staker_validators = owned.size();

    out.baseline = forecast_total_penalty(state, owned, deadline, ForecastAssumption{});
    out.baseline_ransom = sat_sub(out.baseline.total, scenario.attack.fee);

    // Symmetric split; the breach reaches exactly one group.
    const std::uint64_t group = owned.size() / k + (owned.size() % k != 0 ? 1 : 0);
    std::vector<ValidatorId> breached(owned.begin(),
                                      owned.begin() + static_cast<std::ptrdiff_t>(group));
    out.compromised_group_size = breached.size();
    out.partitioned = forecast_total_penalty(state, breached, deadline, ForecastAssumption{});
    out.partitioned_ransom = sat_sub(out.partitioned.total, scenario.attack.fee);
    return out;
}

std::vector<SweepRow> penalty_sweep(const Scenario& scenario, std::span<const SweepPoint> grid) {
    if (grid.empty()) throw DomainError("sweep: empty grid");
    ChainState state = build_population(scenario.population, scenario.params, scenario.seed);
    const auto compromised = compromised_set(state, scenario.attack);

    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (const auto& point : grid) {
        if (point.initial_divisor == 0) throw DomainError("sweep: initial_divisor must be >= 1");
        ChainParams params = scenario.params;
        params.delta = point.delta;
        params.big_delta = point.big_delta;
        params.initial_slash_divisor = point.initial_divisor;
        ChainState probe = state;
        probe.params = params;
        SweepRow row;
        row.point = point;
        row.forecast = forecast_total_penalty(probe, compromised, scenario.attack.deadline_offset,
                                              ForecastAssumption{});
        row.max_ransom = sat_sub(row.forecast.total, scenario.attack.fee);
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
    std::ostringstream out;
    out << "delta_num,delta_den,big_delta_num,big_delta_den,initial_divisor,"
           "initial,per_epoch_total,special_total,total_h,max_ransom\n";
    for (const auto& row : rows) {
        out << row.point.delta.num << ',' << row.point.delta.den << ','
            << row.point.big_delta.num << ',' << row.point.big_delta.den << ','
            << row.point.initial_divisor << ',' << row.forecast.initial << ','
            << row.forecast.per_epoch_total << ',' << row.forecast.special_total << ','
            << row.forecast.total << ',' << row.max_ransom << '\n';
    }
    return out.str();
}

std::vector<SweepPoint> sweep_grid_from_json(const nlohmann::json& doc) {
    std::vector<SweepPoint> grid;
    const nlohmann::json& arr = doc.is_object() && doc.contains("grid") ? doc["grid"] : doc;
    if (!arr.is_array()) throw ConfigError("grid", "expected an array of grid points");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& p = arr[i];
        SweepPoint point;
        const std::string path = "grid[" + std::to_string(i) + "]";
        if (p.contains("delta")) point.delta = ratio_from_json(p["delta"], path + ".delta");
        if (p.contains("big_delta"))
            point.big_delta = ratio_from_json(p["big_delta"], path + ".big_delta");
        if (p.contains("initial_divisor"))
            point.initial_divisor = p["initial_divisor"].get<std::uint64_t>();
        grid.push_back(point);
    }
    return grid;
}

nlohmann::json SimReport::to_json() const {
    auto events = nlohmann::json::array();
    for (const auto& ev : timeline) events.push_back(ev.to_json());
    nlohmann::json doc{
        {"ransom_paid", ransom_paid},
        {"fee_paid", fee_paid},
        {"slashing_losses", slashing_losses},
        {"forecast_H", forecast_h},
        {"realized_H", realized_h},
        {"victim_net", victim_net},
        {"attacker_net", attacker_net},
        {"escrow_outcome", escrow_outcome},
        {"equilibrium", equilibrium.to_json()},
        {"timeline", events},
    };
    if (repeated_valid) doc["pay_or_slash"] = repeated.to_json();
    return doc;
}

std::string SimReport::series_csv() const {
    std::ostringstream out;
    out << "epoch,total_Y,slashed_G,victim_balance\n";
    for (const auto& row : series)
        out << row.epoch << ',' << row.total_stake << ',' << row.recently_slashed << ','
            << row.victim_balance << '\n';
    return out.str();
}

nlohmann::json PartitionReport::to_json() const {
    return nlohmann::json{
        {"partitions", partitions},
        {"staker_validators", staker_validators},
        {"compromised_group_size", compromised_group_size},
        {"baseline", baseline.to_json()},
        {"baseline_ransom", baseline_ransom},
        {"partitioned", partitioned.to_json()},
        {"partitioned_ransom", partitioned_ransom},
    };
}

}  // namespace slashsim

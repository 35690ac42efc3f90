#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "slashsim/chain.hpp"
#include "slashsim/escrow.hpp"
#include "slashsim/games.hpp"
#include "slashsim/scenario.hpp"
#include "slashsim/slashing.hpp"

namespace slashsim {

/// Builds the initial chain from a population spec. Bucketed populations
/// draw validator counts uniformly within each bucket (seeded); every
/// validator starts at the configured balance (default 32 ETH).
ChainState build_population(const PopulationSpec& spec, const ChainParams& params,
                            std::uint64_t seed);

struct TimeSeriesRow {
    Epoch epoch = 0;
    Gwei total_stake = 0;       // Y(t)
    Gwei recently_slashed = 0;  // G(t)
    Gwei victim_balance = 0;    // victim staker's balances + withdrawals
};

struct SimReport {
    std::vector<ChainEvent> timeline;
    Gwei ransom_paid = 0;
    Gwei fee_paid = 0;
    Gwei slashing_losses = 0;  // realized burns on the compromised set
    Gwei forecast_h = 0;       // attacker's H forecast at t = 0
    Gwei realized_h = 0;       // H re-evaluated on the realized chain at t_r
    SignedGwei victim_net = 0;
    SignedGwei attacker_net = 0;
    std::string escrow_outcome;  // Payout / Refund / NoDeposit / NotDeployed
    Equilibrium equilibrium;
    std::vector<TimeSeriesRow> series;
    RepeatedOutcome repeated;  // Pay-or-Slash strategy only
    bool repeated_valid = false;

    nlohmann::json to_json() const;
    /// "epoch,total_Y,slashed_G,victim_balance" rows, LF line endings.
    std::string series_csv() const;
};

/// Deterministic end-to-end campaign: forecast, equilibrium, escrow, chain
/// replay under the seeded duty model, settlement, report.
SimReport run(const Scenario& scenario);

struct PartitionReport {
    unsigned partitions = 1;
    std::uint64_t staker_validators = 0;
    std::uint64_t compromised_group_size = 0;
    PenaltyForecast baseline;
    Gwei baseline_ransom = 0;
    PenaltyForecast partitioned;
    Gwei partitioned_ransom = 0;

    nlohmann::json to_json() const;
};

/// Splits the victim staker's validators into k isolated groups and
/// compares the one-group breach against the unpartitioned baseline.
PartitionReport partition_experiment(const Scenario& scenario, unsigned k);

struct SweepPoint {
    Ratio delta{3, 1};
    Ratio big_delta{3, 1};
    std::uint64_t initial_divisor = 32;
};

struct SweepRow {
    SweepPoint point;
    PenaltyForecast forecast;
    Gwei max_ransom = 0;
};

/// Recomputes H and the ransom bound across a penalty-parameter grid.
std::vector<SweepRow> penalty_sweep(const Scenario& scenario,
                                    std::span<const SweepPoint> grid);

std::string sweep_csv(std::span<const SweepRow> rows);
std::vector<SweepPoint> sweep_grid_from_json(const nlohmann::json& doc);

}  // namespace slashsim

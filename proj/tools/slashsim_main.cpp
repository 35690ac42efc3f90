#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "slashsim/escrow.hpp"
#include "slashsim/games.hpp"
#include "slashsim/sim.hpp"

namespace {

using nlohmann::json;
using namespace slashsim;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open file");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path, e.what());
    }
}

// Compose fully, then write via a temp file: a failed command must not
// leave partial outputs behind.
void write_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError(path, "cannot open for writing");
        out << content;
        if (!out) throw ConfigError(path, "write failed");
    }
    std::filesystem::rename(tmp, path);
}

std::string gwei_with_eth(Gwei amount) {
    return format_gwei(amount) + " Gwei (" + format_eth(amount) + " ETH)";
}

int cmd_simulate(const std::string& scenario_path, std::optional<std::uint64_t> seed,
                 const std::string& out_path, const std::string& csv_path) {
    Scenario scenario = Scenario::from_json(load_json(scenario_path));
    if (seed) scenario.seed = *seed;
    const SimReport report = run(scenario);
    if (!out_path.empty()) write_file(out_path, report.to_json().dump(2) + "\n");
    if (!csv_path.empty()) write_file(csv_path, report.series_csv());
    std::cout << "outcome=" << report.escrow_outcome
              << " ransom_paid=" << gwei_with_eth(report.ransom_paid)
              << " slashing_losses=" << gwei_with_eth(report.slashing_losses)
              << " forecast_H=" << gwei_with_eth(report.forecast_h) << "\n";
    return 0;
}

int cmd_solve(const std::string& game_path, Gwei tick, const std::string& out_path,
              bool verify) {
    const json doc = load_json(game_path);
    const json& game_doc = doc.contains("game") ? doc["game"] : doc;
    const PayAndExitGame game = PayAndExitGame::from_json(game_doc);
    if (doc.contains("tick")) tick = doc["tick"].get<Gwei>();
    const Equilibrium eq = solve_spne(game, tick);

    if (verify) {
        if (!doc.contains("equilibrium"))
            throw ConfigError(game_path, "--verify needs a file with an 'equilibrium' field");
        const Equilibrium prior = Equilibrium::from_json(doc["equilibrium"]);
        if (!(prior == eq)) {
            std::cout << "MISMATCH: stored equilibrium differs from recomputation\n";
            return 1;
        }
        std::cout << "verified: equilibrium reproduces\n";
        return 0;
    }

    if (!out_path.empty()) {
        json combined{{"game", game.to_json()}, {"tick", tick}, {"equilibrium", eq.to_json()}};
        write_file(out_path, combined.dump(2) + "\n");
    }
    std::cout << "victim=" << to_string(eq.victim_action) << " R=" << gwei_with_eth(eq.ransom)
              << " attacker_payoff=" << format_signed_gwei(eq.attacker_payoff)
              << " credible=" << (eq.credible ? "true" : "false") << "\n";
    return 0;
}

int cmd_bound(std::optional<Gwei> h, const std::string& forecast_path, Gwei fee,
              const std::string& out_path) {
    Gwei penalty = 0;
    if (h) {
        penalty = *h;
    } else if (!forecast_path.empty()) {
        const json doc = load_json(forecast_path);
        ChainParams params;
        if (doc.contains("params")) params = ChainParams::from_json(doc["params"]);
        const Gwei y_total = doc.at("y_total").get<Gwei>();
        Gwei compromised_total = 0;
        for (const auto& e : doc.at("compromised_effective"))
            compromised_total += e.get<Gwei>();
        const Gwei g = doc.contains("g_override") ? doc["g_override"].get<Gwei>()
                                                  : compromised_total;
        for (const auto& e : doc.at("compromised_effective"))
            penalty += penalty_components(e.get<Gwei>(), g, y_total, params).total();
    } else {
        throw ConfigError("bound", "need either --H or --forecast");
    }
    const Gwei bound = sat_sub(penalty, fee);
    if (!out_path.empty())
        write_file(out_path, json{{"H", penalty}, {"f", fee}, {"max_ransom", bound}}.dump(2) + "\n");
    std::cout << "R_E = " << gwei_with_eth(bound) << "\n";
    return 0;
}

int cmd_escrow_check(const std::string& trace_path, const std::string& contract_path,
                     const std::string& out_path) {
    std::ifstream in(trace_path);
    if (!in) throw ConfigError(trace_path, "cannot open file");
    const std::vector<ChainEvent> events = read_event_trace(in);
    EscrowContract contract = EscrowContract::from_json(load_json(contract_path));
    const Gwei ransom = contract.ransom();
    const Epoch deadline = contract.deadline();
    const auto compromised = contract.compromised();

    for (const auto& ev : events) contract.on_event(ev);
    const SettlementOutcome folded = contract.projected_outcome();
    const SettlementOutcome direct = settlement_outcome(events, ransom, deadline, compromised);
    if (folded != direct) {
        std::cerr << "internal disagreement: state machine says " << to_string(folded)
                  << ", settlement oracle says " << to_string(direct) << "\n";
        return 1;
    }
    if (!out_path.empty())
        write_file(out_path,
                   json{{"outcome", to_string(direct)}, {"state", to_string(contract.state())}}
                           .dump(2) +
                       "\n");
    std::cout << to_string(direct) << "\n";
    return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& grid_path,
              const std::string& out_path, const std::string& format) {
    const Scenario scenario = Scenario::from_json(load_json(scenario_path));
    const auto grid = sweep_grid_from_json(load_json(grid_path));
    const auto rows = penalty_sweep(scenario, grid);
    std::string content;
    if (format == "json") {
        auto arr = json::array();
        for (const auto& row : rows) {
            arr.push_back(json{{"delta", ratio_to_json(row.point.delta)},
                               {"big_delta", ratio_to_json(row.point.big_delta)},
                               {"initial_divisor", row.point.initial_divisor},
                               {"forecast", row.forecast.to_json()},
                               {"max_ransom", row.max_ransom}});
        }
        content = arr.dump(2) + "\n";
    } else {
        content = sweep_csv(rows);
    }
    if (!out_path.empty())
        write_file(out_path, content);
    else
        std::cout << content;
    std::cout << "sweep: " << rows.size() << " grid points\n";
    return 0;
}

int cmd_population(const std::string& buckets_path, const std::string& out_path,
                   std::uint64_t seed) {
    const json doc = load_json(buckets_path);
    PopulationSpec spec;
    for (const auto& b : doc.at("buckets")) {
        PopulationBucket bucket;
        bucket.min_validators = b.at("min").get<std::uint64_t>();
        if (b.contains("max") && !b["max"].is_null())
            bucket.max_validators = b["max"].get<std::uint64_t>();
        bucket.staker_count = b.at("stakers").get<std::uint64_t>();
        spec.buckets.push_back(bucket);
    }
    if (doc.contains("balance_per_validator"))
        spec.balance_per_validator = doc["balance_per_validator"].get<Gwei>();
    if (doc.contains("unbounded_bucket_cap") && !doc["unbounded_bucket_cap"].is_null())
        spec.unbounded_bucket_cap = doc["unbounded_bucket_cap"].get<std::uint64_t>();

    ChainParams params;
    const ChainState state = build_population(spec, params, seed);

    std::vector<std::uint64_t> counts;
    counts.reserve(state.stakers.size());
    for (const auto& s : state.stakers) counts.push_back(s.validators.size());
    const json summary{{"stakers", state.stakers.size()},
                       {"validators", state.validators.size()},
                       {"balance_per_validator", spec.balance_per_validator},
                       {"total_stake", state.total_effective_stake()},
                       {"staker_validator_counts", counts}};
    if (!out_path.empty()) write_file(out_path, summary.dump() + "\n");
    std::cout << "stakers=" << state.stakers.size() << " validators=" << state.validators.size()
              << " stake=" << gwei_with_eth(state.total_effective_stake()) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Proof-of-stake validator extortion simulator and analyzer"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, csv_path, game_path, forecast_path, trace_path,
        contract_path, grid_path, buckets_path;
    std::string format = "csv";
    std::optional<std::uint64_t> seed_flag;
    std::uint64_t pop_seed = 0;
    Gwei tick = 1'000'000;
    Gwei fee = 0;
    std::optional<Gwei> h_value;
    bool verify = false;

    auto* simulate = app.add_subcommand("simulate", "run a scenario end to end");
    simulate->add_option("scenario", scenario_path, "scenario JSON")->required();
    simulate->add_option("--seed", seed_flag, "override the scenario seed");
    simulate->add_option("--out", out_path, "write the full report JSON here");
    simulate->add_option("--csv", csv_path, "write the epoch time series here");

    auto* solve = app.add_subcommand("solve", "solve a Pay-and-Exit game instance");
    solve->add_option("--game", game_path, "game JSON (or solve output for --verify)")->required();
    solve->add_option("--tick", tick, "ransom grid increment in Gwei");
    solve->add_option("--out", out_path, "write {game,tick,equilibrium} here");
    solve->add_flag("--verify", verify, "recompute and compare a stored equilibrium");

    auto* bound = app.add_subcommand("bound", "maximum incentive-compatible ransom H - f");
    bound->add_option("--H", h_value, "total slashing penalty H in Gwei");
    bound->add_option("--forecast", forecast_path, "forecast-inputs JSON instead of --H");
    bound->add_option("--f", fee, "victim transaction cost in Gwei");
    bound->add_option("--out", out_path, "write the bound JSON here");

    auto* escrow = app.add_subcommand("escrow-check", "settle an event trace against a contract");
    escrow->add_option("--trace", trace_path, "JSONL event trace")->required();
    escrow->add_option("--contract", contract_path, "contract JSON")->required();
    escrow->add_option("--out", out_path, "write the settlement JSON here");

    auto* sweep = app.add_subcommand("sweep", "penalty-parameter sweep over a grid");
    sweep->add_option("--scenario", scenario_path, "scenario JSON")->required();
    sweep->add_option("--grid", grid_path, "grid JSON")->required();
    sweep->add_option("--out", out_path, "write the table here");
    sweep->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* population = app.add_subcommand("population", "synthesize a staker population");
    population->add_option("--buckets", buckets_path, "bucket-distribution JSON")->required();
    population->add_option("--out", out_path, "write the population JSON here");
    population->add_option("--seed", pop_seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(scenario_path, seed_flag, out_path, csv_path);
        if (solve->parsed()) return cmd_solve(game_path, tick, out_path, verify);
        if (bound->parsed()) return cmd_bound(h_value, forecast_path, fee, out_path);
        if (escrow->parsed()) return cmd_escrow_check(trace_path, contract_path, out_path);
        if (sweep->parsed()) return cmd_sweep(scenario_path, grid_path, out_path, format);
        if (population->parsed()) return cmd_population(buckets_path, out_path, pop_seed);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

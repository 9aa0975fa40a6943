#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mimocc/cc_core.hpp"
#include "mimocc/dof.hpp"
#include "mimocc/harness.hpp"

namespace {

int run_dof(int L, int G, int t, int omega, bool as_json) {
    using namespace mimocc;
    const DofSolution solution = dof_max(L, G, t);

    if (as_json) {
        nlohmann::json out;
        out["L"] = L;
        out["G"] = G;
        out["t"] = t;
        out["dof_quick"] = dof_quick(L, G, t);
        nlohmann::json table = nlohmann::json::array();
        for (const auto& [om, bound] : solution.bound_table)
            table.push_back({{"omega", om}, {"beta_bound", bound}, {"dof", om * bound}});
        out["table"] = table;
        out["optimum"] = {{"omega", solution.omega},
                          {"beta", solution.beta},
                          {"dof", solution.dof}};
        if (omega > 0) {
            const int bound = beta_bound(L, G, t, omega);
            out["restricted"] = {{"omega", omega},
                                 {"beta_bound", bound},
                                 {"dof", omega * bound}};
        }
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    std::cout << "DoF analysis for L=" << L << " G=" << G << " t=" << t << "\n";
    std::cout << "  omega  beta_bound  omega*beta\n";
    for (const auto& [om, bound] : solution.bound_table)
        std::cout << "  " << om << "      " << bound << "           " << om * bound << "\n";
    std::cout << "optimum: omega=" << solution.omega << " beta=" << solution.beta
              << " dof=" << solution.dof << "\n";
    std::cout << "quick metric (beta=G): " << dof_quick(L, G, t) << "\n";
    if (omega > 0) {
        const int bound = beta_bound(L, G, t, omega);
        std::cout << "restricted to omega=" << omega << ": beta_bound=" << bound
                  << " dof=" << omega * bound << "\n";
    }
    return 0;
}

int run_verify(int K, int t, int omega, const std::string& json_path) {
    using namespace mimocc;
    SystemParams params;
    params.num_users = K;
    params.cache_gain = t;
    // The schedule itself never uses L; pick the smallest value that admits
    // this omega so validation passes.
    params.tx_streams = std::max(1, omega - t);
    params.rx_streams = 1;
    const DeliverySchedule schedule = build_schedule(params, omega);
    const PlacementMap placement = build_placement(K, t);

    std::vector<int> demand(K);
    for (int u = 0; u < K; ++u) demand[u] = u + 1;  // all-distinct demands
    const VerificationReport report = verify_decodability(schedule, placement, demand);

    std::cout << "scheme K=" << K << " t=" << t << " omega=" << omega
              << ": theta=" << schedule.theta
              << " transmissions=" << schedule.transmissions.size()
              << " codewords/tx=" << schedule.transmissions.front().codewords.size() << "\n";
    std::cout << "decodability: " << (report.passed ? "PASS" : "FAIL") << " (each user recovers "
              << report.expected_per_user << " subpackets)\n";
    if (!report.passed) std::cout << "  " << report.detail << "\n";

    if (!json_path.empty()) {
        std::ofstream file(json_path, std::ios::binary);
        if (!file) {
            std::cerr << "cannot open " << json_path << "\n";
            return 1;
        }
        file << schedule_to_json(schedule).dump(2) << "\n";
        std::cout << "schedule written to " << json_path << "\n";
    }
    return report.passed ? 0 : 1;
}

int run_rate_curve(const std::string& config_path, const std::string& out_path, int threads) {
    using namespace mimocc;
    const ExperimentConfig config = load_config(config_path);
    const RateCurve curve = rate_curve(config, threads);
    write_curve_csv(curve, out_path);
    std::cout << "wrote " << curve.points.size() << " grid points to " << out_path << "\n";
    for (const RatePoint& p : curve.points)
        std::cout << "  " << p.snr_db << " dB: mean " << p.mean << " (stderr " << p.std_error
                  << ", ok " << p.trials_ok << ", failed " << p.trials_failed << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cache-aided MIMO coded caching lab"};
    app.require_subcommand(1);

    int L = 0, G = 0, t = 0, omega = 0, K = 0;
    bool as_json = false;
    std::string json_path, config_path, out_path;
    int threads = 1;

    auto* dof_cmd = app.add_subcommand("dof", "DoF table and optimum over (omega, beta)");
    dof_cmd->add_option("--L", L, "transmit spatial multiplexing gain")->required();
    dof_cmd->add_option("--G", G, "receive spatial multiplexing gain")->required();
    dof_cmd->add_option("--t", t, "coded caching gain")->required();
    dof_cmd->add_option("--omega", omega, "also report the bound at this omega");
    dof_cmd->add_flag("--json", as_json, "emit JSON instead of a table");

    auto* verify_cmd =
        app.add_subcommand("verify-scheme", "build a delivery scheme and verify decodability");
    verify_cmd->add_option("--K", K, "number of users")->required();
    verify_cmd->add_option("--t", t, "coded caching gain")->required();
    verify_cmd->add_option("--omega", omega, "users served per transmission")->required();
    verify_cmd->add_option("--json", json_path, "write the schedule as JSON to this path");

    auto* curve_cmd = app.add_subcommand("rate-curve", "Monte Carlo symmetric-rate sweep");
    curve_cmd->add_option("--config", config_path, "JSON experiment config")->required();
    curve_cmd->add_option("--out", out_path, "output CSV path")->required();
    curve_cmd->add_option("--threads", threads, "worker threads (results are identical)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dof_cmd->parsed()) return run_dof(L, G, t, omega, as_json);
        if (verify_cmd->parsed()) return run_verify(K, t, omega, json_path);
        if (curve_cmd->parsed()) return run_rate_curve(config_path, out_path, threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

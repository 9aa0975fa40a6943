#ifndef MIMOCC_HARNESS_HPP
#define MIMOCC_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mimocc/solver.hpp"

namespace mimocc {

/// One sweep description. SNR is P_T/N0 with N0 fixed at 1.0, so the power
/// budget at a grid point is 10^(snr_db/10).
struct ExperimentConfig {
    int tx_streams = 1;   // L
    int rx_streams = 1;   // G
    int cache_gain = 0;   // t
    int omega = 1;        // users served per transmission
    int total_users = 0;  // K; 0 means "= omega" (one transmission per trial)
    std::vector<double> snr_db;
    int trials = 100;
    std::uint64_t seed = 1;
    ScaConfig sca;

    int users() const { return total_users > 0 ? total_users : omega; }
    void validate() const;
};

struct RatePoint {
    double snr_db = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    int trials_ok = 0;
    int trials_failed = 0;
    double mean_sca_iters = 0.0;
};

struct RateCurve {
    ExperimentConfig config;
    std::vector<RatePoint> points;  // grid order
};

/// One Monte Carlo realization: samples channels for all users, solves every
/// omega-subset transmission, and combines the per-transmission rates into
/// the symmetric rate K*Theta / sum_i(1/R_i). Throws DegenerateTrial when a
/// transmission rate is zero. `mean_iterations`, when given, receives the
/// average SCA iteration count over the transmissions.
double run_trial(const ExperimentConfig& config, double total_power,
                 std::uint64_t trial_seed, double* mean_iterations = nullptr);

/// Same, on externally supplied channels (must cover users 1..K).
double run_trial_on(const ExperimentConfig& config, double total_power,
                    const ChannelSet& channels, std::uint64_t trial_seed,
                    double* mean_iterations = nullptr);

/// Full sweep. Trial seeds derive from (config.seed, snr index, trial index),
/// so results are identical regardless of `threads`. Failed trials are
/// excluded from the statistics and counted; a grid point with no surviving
/// trial raises std::runtime_error.
RateCurve rate_curve(const ExperimentConfig& config, int threads = 1);

/// Finite-difference slope between two grid points, in bits per doubling of
/// SNR. Both window edges must be present in the grid.
double estimate_slope(const RateCurve& curve, double snr_lo_db, double snr_hi_db);

/// CSV with header snr_db,rsym_mean,rsym_stderr,trials_ok,trials_failed,
/// mean_sca_iters; floats carry 9 significant digits.
std::string curve_to_csv(const RateCurve& curve);

void write_curve_csv(const RateCurve& curve, const std::string& path);

/// Strict config parser: the accepted keys are exactly {L, G, t, omega,
/// K_total, snr_db, trials, seed, er_sca, max_iter, restarts}; the first
/// five of L/G/t/omega/snr_db are required, the rest take defaults
/// (K_total = omega, trials = 100, seed = 1, er_sca = 1e-4, max_iter = 200,
/// restarts = 1).
ExperimentConfig config_from_json(const nlohmann::json& j);

ExperimentConfig load_config(const std::string& path);

}  // namespace mimocc

#endif

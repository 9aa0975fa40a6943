#include "mimocc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <thread>

#include "mimocc/cc_core.hpp"

namespace mimocc {

namespace {

constexpr double kNoiseVar = 1.0;  // SNR sweeps move P_T, never N0

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
    SystemParams params;
    params.num_users = users();
    params.tx_streams = tx_streams;
    params.rx_streams = rx_streams;
    params.cache_gain = cache_gain;
    params.noise_var = kNoiseVar;
    params.total_power = 1.0;
    params.validate();
    if (omega < cache_gain + 1)
        throw std::invalid_argument("omega must satisfy omega >= t+1");
    if (omega > std::min(users(), cache_gain + tx_streams))
        throw std::invalid_argument("omega must satisfy omega <= min(K, t+L)");
    if (snr_db.empty()) throw std::invalid_argument("snr_db grid must be non-empty");
    for (std::size_t i = 1; i < snr_db.size(); ++i)
        if (!(snr_db[i] > snr_db[i - 1]))
            throw std::invalid_argument("snr_db grid must be strictly increasing");
    if (trials < 1) throw std::invalid_argument("trials must satisfy trials >= 1");
    if (!(sca.er_sca > 0.0)) throw std::invalid_argument("er_sca must be positive");
    if (sca.max_iter < 1) throw std::invalid_argument("max_iter must satisfy max_iter >= 1");
    if (sca.restarts < 1) throw std::invalid_argument("restarts must satisfy restarts >= 1");
}

double run_trial(const ExperimentConfig& config, double total_power,
                 std::uint64_t trial_seed, double* mean_iterations) {
    config.validate();
    const int K = config.users();
    std::vector<int> all_users(K);
    for (int u = 0; u < K; ++u) all_users[u] = u + 1;
    const ChannelSet channels =
        sample_channels(config.rx_streams, config.tx_streams, all_users, trial_seed);
    return run_trial_on(config, total_power, channels, trial_seed, mean_iterations);
}

double run_trial_on(const ExperimentConfig& config, double total_power,
                    const ChannelSet& channels, std::uint64_t trial_seed,
                    double* mean_iterations) {
    config.validate();
    const int K = config.users();
    const int t = config.cache_gain;

    const std::int64_t theta = subpacketization(K, t, config.omega);
    const auto served_sets = subsets_of_size(full_mask(K), config.omega);

    double inv_rate_sum = 0.0;
    long iter_sum = 0;
    for (std::size_t i = 0; i < served_sets.size(); ++i) {
        const MulticastProblem problem = MulticastProblem::build(
            channels.restrict(mask_to_users(served_sets[i])), t, kNoiseVar, total_power);
        ScaOutcome outcome;
        if (config.omega == t + 1) {
            outcome = single_group_solve(problem, config.sca.subproblem_tol);
        } else {
            ScaConfig sca = config.sca;
            sca.base_seed = derive_seed(trial_seed, 0xF00Du, i);
            outcome = sca_solve(problem, sca);
        }
        if (!(outcome.result.rate > 0.0))
            throw DegenerateTrial("transmission " + std::to_string(i + 1) +
                                  " achieved zero rate");
        inv_rate_sum += 1.0 / outcome.result.rate;
        iter_sum += outcome.result.iterations;
    }
    if (mean_iterations)
        *mean_iterations = static_cast<double>(iter_sum) / served_sets.size();
    return static_cast<double>(K) * static_cast<double>(theta) / inv_rate_sum;
}

RateCurve rate_curve(const ExperimentConfig& config, int threads) {
    config.validate();
    if (threads < 1) threads = 1;

    RateCurve curve;
    curve.config = config;
    for (std::size_t si = 0; si < config.snr_db.size(); ++si) {
        const double snr_db = config.snr_db[si];
        const double power = std::pow(10.0, snr_db / 10.0);

        struct Slot {
            bool ok = false;
            double rate = 0.0;
            double iters = 0.0;
        };
        std::vector<Slot> slots(config.trials);
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int trial = next.fetch_add(1); trial < config.trials;
                 trial = next.fetch_add(1)) {
                const std::uint64_t seed = derive_seed(config.seed, si, trial);
                try {
                    double iters = 0.0;
                    const double rate = run_trial(config, power, seed, &iters);
                    slots[trial] = {true, rate, iters};
                } catch (const DegenerateTrial&) {
                } catch (const SolverFailure&) {
                }
            }
        };
        if (threads == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }

        // Aggregate in trial order; values do not depend on scheduling.
        RatePoint point;
        point.snr_db = snr_db;
        double sum = 0.0, iter_acc = 0.0;
        for (const Slot& slot : slots) {
            if (!slot.ok) {
                ++point.trials_failed;
                continue;
            }
            ++point.trials_ok;
            sum += slot.rate;
            iter_acc += slot.iters;
        }
        if (point.trials_ok == 0)
            throw std::runtime_error("all trials failed at " + fmt9(snr_db) + " dB");
        point.mean = sum / point.trials_ok;
        point.mean_sca_iters = iter_acc / point.trials_ok;
        if (point.trials_ok >= 2) {
            double ss = 0.0;
            for (const Slot& slot : slots)
                if (slot.ok) ss += (slot.rate - point.mean) * (slot.rate - point.mean);
            point.std_error = std::sqrt(ss / (point.trials_ok - 1)) /
                              std::sqrt(static_cast<double>(point.trials_ok));
        }
        curve.points.push_back(point);
    }
    return curve;
}

double estimate_slope(const RateCurve& curve, double snr_lo_db, double snr_hi_db) {
    const RatePoint* lo = nullptr;
    const RatePoint* hi = nullptr;
    for (const RatePoint& p : curve.points) {
        if (std::abs(p.snr_db - snr_lo_db) < 1e-9) lo = &p;
        if (std::abs(p.snr_db - snr_hi_db) < 1e-9) hi = &p;
    }
    if (!lo || !hi || !(snr_hi_db > snr_lo_db))
        throw std::invalid_argument("slope window edges must be distinct grid points");
    // Bits per doubling of SNR: 3.0103 dB per octave.
    const double octaves = (snr_hi_db - snr_lo_db) / (10.0 * std::log10(2.0));
    return (hi->mean - lo->mean) / octaves;
}

std::string curve_to_csv(const RateCurve& curve) {
    std::string out = "snr_db,rsym_mean,rsym_stderr,trials_ok,trials_failed,mean_sca_iters\n";
    for (const RatePoint& p : curve.points) {
        out += fmt9(p.snr_db) + "," + fmt9(p.mean) + "," + fmt9(p.std_error) + "," +
               std::to_string(p.trials_ok) + "," + std::to_string(p.trials_failed) + "," +
               fmt9(p.mean_sca_iters) + "\n";
    }
    return out;
}

void write_curve_csv(const RateCurve& curve, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    file << curve_to_csv(curve);
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {"L",      "G",    "t",      "omega",
                                                   "K_total", "snr_db", "trials", "seed",
                                                   "er_sca", "max_iter", "restarts"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("unknown config key: " + key);
    }
    for (const char* req : {"L", "G", "t", "omega", "snr_db"})
        if (!j.contains(req))
            throw std::invalid_argument("missing required config key: " + std::string(req));

    ExperimentConfig config;
    config.tx_streams = j.at("L").get<int>();
    config.rx_streams = j.at("G").get<int>();
    config.cache_gain = j.at("t").get<int>();
    config.omega = j.at("omega").get<int>();
    config.total_users = j.value("K_total", 0);
    config.snr_db = j.at("snr_db").get<std::vector<double>>();
    config.trials = j.value("trials", 100);
    config.seed = j.value("seed", std::uint64_t{1});
    config.sca.er_sca = j.value("er_sca", 1e-4);
    config.sca.max_iter = j.value("max_iter", 200);
    config.sca.restarts = j.value("restarts", 1);
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    file >> j;
    return config_from_json(j);
}

}  // namespace mimocc

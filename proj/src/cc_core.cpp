#include "mimocc/cc_core.hpp"

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mimocc {

namespace {

void check_kt(int K, int t) {
    if (K < 1) throw std::invalid_argument("user count K must satisfy K >= 1");
    if (K > 32) throw std::invalid_argument("user count K must satisfy K <= 32");
    if (t < 0) throw std::invalid_argument("caching gain t must satisfy t >= 0");
    if (t >= K) throw std::invalid_argument("caching gain t must satisfy t < K");
}

std::string subpacket_str(const SubpacketId& sp) {
    std::ostringstream os;
    os << "(owner " << sp.owner << ", cache_set {";
    bool first = true;
    for (int u : mask_to_users(sp.cache_set)) {
        if (!first) os << ",";
        os << u;
        first = false;
    }
    os << "}, q " << sp.index << ")";
    return os.str();
}

}  // namespace

void SystemParams::validate() const {
    check_kt(num_users, cache_gain);
    if (tx_streams < 1) throw std::invalid_argument("tx streams L must satisfy L >= 1");
    if (rx_streams < 1) throw std::invalid_argument("rx streams G must satisfy G >= 1");
    if (!(noise_var > 0.0)) throw std::invalid_argument("noise variance N0 must satisfy N0 > 0");
    if (!(total_power > 0.0)) throw std::invalid_argument("power budget P_T must satisfy P_T > 0");
}

bool PlacementMap::caches(int user, std::uint32_t subfile_set) const {
    if (user < 1 || user > num_users) return false;
    const auto& sets = cached_sets[user - 1];
    for (std::uint32_t s : sets)
        if (s == subfile_set) return true;
    return false;
}

std::int64_t subpacketization(int K, int t, int omega) {
    check_kt(K, t);
    if (omega < t + 1) throw std::invalid_argument("omega must satisfy omega >= t+1");
    if (omega > K) throw std::invalid_argument("omega must satisfy omega <= K");
    const std::uint64_t subfiles = binomial(K, t);
    const std::uint64_t splits = binomial(K - t - 1, omega - t - 1);
    return static_cast<std::int64_t>(subfiles * splits);
}

PlacementMap build_placement(int K, int t) {
    check_kt(K, t);
    PlacementMap map;
    map.num_users = K;
    map.cache_gain = t;
    map.cached_sets.resize(K);
    for (std::uint32_t set : subsets_of_size(full_mask(K), t)) {
        for (int u : mask_to_users(set)) map.cached_sets[u - 1].push_back(set);
    }
    return map;
}

DeliverySchedule build_schedule(const SystemParams& params, int omega) {
    params.validate();
    const int K = params.num_users;
    const int t = params.cache_gain;
    if (omega < t + 1) throw std::invalid_argument("omega must satisfy omega >= t+1");
    if (omega > K) throw std::invalid_argument("omega must satisfy omega <= K");
    if (omega > t + params.tx_streams)
        throw std::invalid_argument("omega must satisfy omega <= t+L");

    DeliverySchedule schedule;
    schedule.num_users = K;
    schedule.cache_gain = t;
    schedule.omega = omega;
    schedule.theta = subpacketization(K, t, omega);

    // q counters keyed by (owner, cache_set); 1-based, advanced in the
    // lexicographic transmission order so the assignment is reproducible.
    std::map<std::pair<int, std::uint32_t>, std::int64_t> next_index;

    for (std::uint32_t served : subsets_of_size(full_mask(K), omega)) {
        Transmission tx;
        tx.served = served;
        for (std::uint32_t group : subsets_of_size(served, t + 1)) {
            Codeword cw;
            cw.group = group;
            for (int user : mask_to_users(group)) {
                SubpacketId sp;
                sp.owner = user;
                sp.cache_set = group & ~user_bit(user);
                sp.index = ++next_index[{user, sp.cache_set}];
                cw.payload.push_back(sp);
            }
            tx.codewords.push_back(std::move(cw));
        }
        schedule.transmissions.push_back(std::move(tx));
    }
    return schedule;
}

VerificationReport verify_decodability(const DeliverySchedule& schedule,
                                       const PlacementMap& placement,
                                       const std::vector<int>& demand) {
    VerificationReport report;
    const int K = schedule.num_users;
    const int t = schedule.cache_gain;
    report.recovered.resize(K);
    report.expected_per_user =
        static_cast<std::int64_t>(binomial(K - 1, t)) *
        static_cast<std::int64_t>(binomial(K - t - 1, schedule.omega - t - 1));

    if (placement.num_users != K || placement.cache_gain != t) {
        report.detail = "placement was built for different (K, t)";
        return report;
    }
    if (static_cast<int>(demand.size()) != K) {
        report.detail = "demand vector must list one file per user";
        return report;
    }

    std::vector<std::set<std::pair<std::uint32_t, std::int64_t>>> seen(K);

    for (const Transmission& tx : schedule.transmissions) {
        for (const Codeword& cw : tx.codewords) {
            // Two entries carrying the same data symbol would cancel inside
            // the XOR; distinct cache_sets per member rule this out, checked
            // here at the (file, cache_set, q) level.
            std::set<std::tuple<int, std::uint32_t, std::int64_t>> symbols;
            for (const SubpacketId& sp : cw.payload)
                symbols.insert({demand[sp.owner - 1], sp.cache_set, sp.index});
            if (symbols.size() != cw.payload.size()) {
                report.detail = "codeword mixes identical data symbols";
                return report;
            }
            for (const SubpacketId& own : cw.payload) {
                const int user = own.owner;
                // XOR decode at `user`: every other payload entry must be
                // cancelable from cache, leaving exactly the own subpacket.
                for (const SubpacketId& other : cw.payload) {
                    if (other.owner == user) continue;
                    if (!placement.caches(user, other.cache_set)) {
                        report.detail = "user " + std::to_string(user) +
                                        " cannot cancel " + subpacket_str(other);
                        return report;
                    }
                }
                auto key = std::make_pair(own.cache_set, own.index);
                if (!seen[user - 1].insert(key).second) {
                    report.detail = "user " + std::to_string(user) +
                                    " recovered duplicate " + subpacket_str(own);
                    return report;
                }
                report.recovered[user - 1].push_back(own);
            }
        }
    }

    // Completeness: each user must hold every (cache_set, q) it lacks.
    const std::int64_t splits = binomial(K - 1 - t, schedule.omega - t - 1);
    for (int user = 1; user <= K; ++user) {
        for (std::uint32_t set : subsets_of_size(full_mask(K), t)) {
            if (mask_contains(set, user)) continue;
            for (std::int64_t q = 1; q <= splits; ++q) {
                if (!seen[user - 1].count({set, q})) {
                    SubpacketId missing{user, set, q};
                    report.detail = "user " + std::to_string(user) + " missing " +
                                    subpacket_str(missing);
                    return report;
                }
            }
        }
        if (static_cast<std::int64_t>(seen[user - 1].size()) != report.expected_per_user) {
            report.detail = "user " + std::to_string(user) + " recovered " +
                            std::to_string(seen[user - 1].size()) + " subpackets, expected " +
                            std::to_string(report.expected_per_user);
            return report;
        }
    }

    report.passed = true;
    return report;
}

nlohmann::json schedule_to_json(const DeliverySchedule& schedule) {
    nlohmann::json root;
    root["K"] = schedule.num_users;
    root["t"] = schedule.cache_gain;
    root["omega"] = schedule.omega;
    root["theta"] = schedule.theta;
    nlohmann::json txs = nlohmann::json::array();
    for (const Transmission& tx : schedule.transmissions) {
        nlohmann::json jtx;
        jtx["served"] = mask_to_users(tx.served);
        nlohmann::json cws = nlohmann::json::array();
        for (const Codeword& cw : tx.codewords) {
            nlohmann::json jcw = nlohmann::json::array();
            for (const SubpacketId& sp : cw.payload) {
                jcw.push_back({{"user", sp.owner},
                               {"cache_set", mask_to_users(sp.cache_set)},
                               {"q", sp.index}});
            }
            cws.push_back(std::move(jcw));
        }
        jtx["codewords"] = std::move(cws);
        txs.push_back(std::move(jtx));
    }
    root["transmissions"] = std::move(txs);
    return root;
}

}  // namespace mimocc

#ifndef MIMOCC_CC_CORE_HPP
#define MIMOCC_CC_CORE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mimocc/combinatorics.hpp"

namespace mimocc {

/// Scenario description: K users, L transmit / G receive spatial streams,
/// caching gain t, noise variance and total power budget in linear units.
/// The cached fraction of the library per user is t/K.
struct SystemParams {
    int num_users = 0;      // K
    int tx_streams = 0;     // L
    int rx_streams = 0;     // G
    int cache_gain = 0;     // t, 0 <= t < K
    double noise_var = 1.0; // N0 > 0
    double total_power = 1.0;

    /// Throws std::invalid_argument naming the violated bound.
    void validate() const;
};

/// One subpacket of the file demanded by `owner`: the subfile is indexed by
/// the t-user set that caches it, `index` counts the equal splits of that
/// subfile (1-based).
struct SubpacketId {
    int owner = 0;
    std::uint32_t cache_set = 0;
    std::int64_t index = 0;

    bool operator==(const SubpacketId&) const = default;
};

/// XOR codeword for a (t+1)-user group: one payload entry per member, each
/// carrying that member's subpacket whose cache_set is the rest of the group.
struct Codeword {
    std::uint32_t group = 0;
    std::vector<SubpacketId> payload;
};

struct Transmission {
    std::uint32_t served = 0;
    std::vector<Codeword> codewords;
};

/// Full delivery plan: C(K, omega) transmissions, each with C(omega, t+1)
/// codewords; every subpacket appears exactly once across the schedule.
struct DeliverySchedule {
    int num_users = 0;
    int cache_gain = 0;
    int omega = 0;
    std::int64_t theta = 0;  // subpacketization level
    std::vector<Transmission> transmissions;
};

/// Per-user list of cached subfile indices (t-user sets containing the user);
/// identical for every file in the library.
struct PlacementMap {
    int num_users = 0;
    int cache_gain = 0;
    std::vector<std::vector<std::uint32_t>> cached_sets;  // [user-1] -> sorted masks

    bool caches(int user, std::uint32_t subfile_set) const;
};

/// Outcome of the XOR decode simulation. `recovered[k-1]` lists the
/// subpackets user k obtained, in schedule order.
struct VerificationReport {
    bool passed = false;
    std::string detail;  // empty on success, else first failure found
    std::int64_t expected_per_user = 0;
    std::vector<std::vector<SubpacketId>> recovered;
};

/// Subpacketization level C(K,t) * C(K-t-1, omega-t-1).
/// K is capped at 32 so the value always fits in 64 bits.
std::int64_t subpacketization(int K, int t, int omega);

/// Cache placement: user k stores subfile index P iff k is in P.
PlacementMap build_placement(int K, int t);

/// Delivery schedule over all omega-subsets of users in lexicographic order,
/// with per-(user, cache_set) subpacket counters assigned in that order.
DeliverySchedule build_schedule(const SystemParams& params, int omega);

/// Symbol-level XOR decode simulation against the placement. Returns a
/// failing report (never throws) on the first missing or duplicated
/// subpacket. `demand[k-1]` is the file requested by user k (1-based).
VerificationReport verify_decodability(const DeliverySchedule& schedule,
                                       const PlacementMap& placement,
                                       const std::vector<int>& demand);

/// JSON export: one object per transmission with the served set and the
/// codewords as arrays of {user, cache_set, q}.
nlohmann::json schedule_to_json(const DeliverySchedule& schedule);

}  // namespace mimocc

#endif

#ifndef MIMOCC_MULTICAST_HPP
#define MIMOCC_MULTICAST_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mimocc/channel.hpp"

namespace mimocc {

/// One transmission interval: the served users' channels plus the multicast
/// group structure. Groups are the (t+1)-subsets of the served set, stored
/// as indices into `groups`; users are addressed by their 0-based position
/// in channels.users throughout this module.
struct MulticastProblem {
    ChannelSet channels;
    int cache_gain = 0;      // t
    double noise_var = 1.0;  // N0
    double total_power = 1.0;

    std::vector<std::uint32_t> groups;             // lexicographic (t+1)-subsets
    std::vector<std::vector<int>> groups_with;     // per user: group indices containing it
    std::vector<std::vector<int>> groups_without;  // complement within groups

    static MulticastProblem build(ChannelSet channels, int cache_gain,
                                  double noise_var, double total_power);

    int num_users() const { return static_cast<int>(channels.users.size()); }
    int mac_size(int user) const { return static_cast<int>(groups_with[user].size()); }
};

/// One Hermitian PSD transmit covariance per multicast group, aligned with
/// MulticastProblem::groups.
struct CovarianceSet {
    std::vector<Eigen::MatrixXcd> mats;

    double trace_sum() const;
    /// Hermitian within tol, eigenvalues >= -tol*power, sum of traces within
    /// power*(1+tol).
    bool feasible(double power, double tol = 1e-8) const;
};

/// Which MAC subset pins a user's rate, and at what value.
struct MacBinding {
    int user = 0;
    std::vector<int> subset;  // group indices
    double value = 0.0;
};

struct RateResult {
    double rate = 0.0;  // symmetric per-codeword rate, bits per channel use
    std::vector<MacBinding> binding;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;  // objective per SCA iteration
};

/// All non-empty subsets of the groups containing `user`, as sorted lists of
/// group indices, in binary counting order over the user's group list.
/// Refuses MAC sizes above 12 (2^m constraint growth).
std::vector<std::vector<int>> enumerate_mac_subsets(const MulticastProblem& problem, int user);

/// N0*I + H_k (sum of covariances of groups excluding k) H_k^H.
Eigen::MatrixXcd interference_covariance(const MulticastProblem& problem,
                                         const CovarianceSet& covs, int user);

/// Rate-region face for one (user, MAC subset) pair:
/// (1/|B|) log2 det(I + H_k (sum_B K_T) H_k^H Q_k^{-1}).
double mac_rate_bound(const MulticastProblem& problem, const CovarianceSet& covs,
                      int user, const std::vector<int>& subset);

/// Exact symmetric per-codeword rate: the minimum of mac_rate_bound over all
/// users and all non-empty MAC subsets. No approximation.
RateResult exact_symmetric_rate(const MulticastProblem& problem, const CovarianceSet& covs);

/// Convex restriction around an expansion point: per (user, MAC subset) the
/// concave logdet term plus the first-order expansion of the interference
/// logdet, a shared power budget, and one PSD cone per group.
struct ConvexSubproblem {
    int tx_streams = 0;
    int rx_streams = 0;
    double noise_var = 1.0;
    double total_power = 1.0;
    std::vector<Eigen::MatrixXcd> channels;     // per user
    std::vector<Eigen::MatrixXcd> linear_coef;  // per user: -log2(e) H^H Qbar^{-1} H
    std::vector<double> constant;               // per user: Taylor constants - log2|Qbar|
    std::vector<std::vector<int>> linear_groups;  // per user: groups carrying the linear term

    struct Constraint {
        int user = 0;
        std::vector<int> mac_subset;     // B
        std::vector<int> logdet_groups;  // B together with the user's interference groups
        double inv_size = 1.0;           // 1/|B|
    };
    std::vector<Constraint> constraints;
    int group_count = 0;
    CovarianceSet start;  // expansion point; always feasible

    /// Rate constraints plus the power constraint.
    std::size_t constraint_count() const { return constraints.size() + 1; }

    /// Right-hand side of rate constraint j evaluated at covs.
    double constraint_rhs(int j, const CovarianceSet& covs) const;
};

/// Builds the convex subproblem linearized at `prev` (the covariances of the
/// previous iterate). With a single multicast group the Taylor terms vanish
/// and the constraints coincide with the exact interference-free bounds.
ConvexSubproblem build_sca_subproblem(const MulticastProblem& problem,
                                      const CovarianceSet& prev);

}  // namespace mimocc

#endif

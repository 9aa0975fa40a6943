#include "mimocc/multicast.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mimocc/combinatorics.hpp"

namespace mimocc {

namespace {

constexpr int kMacSizeCap = 12;

Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& M) {
    return 0.5 * (M + M.adjoint());
}

/// Cholesky-based base-2 logdet for Hermitian positive definite inputs.
double logdet2_pd(const Eigen::MatrixXcd& M) {
    Eigen::LLT<Eigen::MatrixXcd> llt(M);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("logdet: matrix is not positive definite");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        sum += std::log2(llt.matrixLLT()(i, i).real());
    return 2.0 * sum;
}

}  // namespace

MulticastProblem MulticastProblem::build(ChannelSet channels, int cache_gain,
                                         double noise_var, double total_power) {
    const int omega = static_cast<int>(channels.users.size());
    if (omega < 1) throw std::invalid_argument("served set must be non-empty");
    if (cache_gain < 0) throw std::invalid_argument("caching gain t must satisfy t >= 0");
    if (cache_gain + 1 > omega)
        throw std::invalid_argument("served set must hold at least t+1 users");
    if (!(noise_var > 0.0)) throw std::invalid_argument("noise variance N0 must satisfy N0 > 0");
    if (!(total_power > 0.0)) throw std::invalid_argument("power budget P_T must satisfy P_T > 0");

    MulticastProblem prob;
    prob.channels = std::move(channels);
    prob.cache_gain = cache_gain;
    prob.noise_var = noise_var;
    prob.total_power = total_power;

    // Local bitmasks: position i in the served set occupies bit i.
    prob.groups = subsets_of_size(full_mask(omega), cache_gain + 1);
    prob.groups_with.resize(omega);
    prob.groups_without.resize(omega);
    for (int g = 0; g < static_cast<int>(prob.groups.size()); ++g) {
        for (int u = 0; u < omega; ++u) {
            if (mask_contains(prob.groups[g], u + 1))
                prob.groups_with[u].push_back(g);
            else
                prob.groups_without[u].push_back(g);
        }
    }
    return prob;
}

double CovarianceSet::trace_sum() const {
    double sum = 0.0;
    for (const auto& K : mats) sum += K.real().trace();
    return sum;
}

bool CovarianceSet::feasible(double power, double tol) const {
    for (const auto& K : mats) {
        const double scale = std::max(1.0, K.norm());
        if ((K - K.adjoint()).norm() > tol * scale) return false;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(K, Eigen::EigenvaluesOnly);
        if (eig.info() != Eigen::Success) return false;
        if (eig.eigenvalues().minCoeff() < -tol * power) return false;
    }
    return trace_sum() <= power * (1.0 + tol);
}

std::vector<std::vector<int>> enumerate_mac_subsets(const MulticastProblem& problem, int user) {
    if (user < 0 || user >= problem.num_users())
        throw std::invalid_argument("user index out of range");
    const auto& own = problem.groups_with[user];
    const int m = static_cast<int>(own.size());
    if (m > kMacSizeCap)
        throw std::invalid_argument("MAC size " + std::to_string(m) +
                                    " exceeds the cap of " + std::to_string(kMacSizeCap));
    std::vector<std::vector<int>> subsets;
    subsets.reserve((1u << m) - 1);
    for (std::uint32_t bits = 1; bits < (1u << m); ++bits) {
        std::vector<int> subset;
        for (int i = 0; i < m; ++i)
            if (bits & (1u << i)) subset.push_back(own[i]);
        subsets.push_back(std::move(subset));
    }
    return subsets;
}

Eigen::MatrixXcd interference_covariance(const MulticastProblem& problem,
                                         const CovarianceSet& covs, int user) {
    const int G = problem.channels.rx_streams;
    const Eigen::MatrixXcd& H = problem.channels.gains[user];
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(problem.channels.tx_streams,
                                                  problem.channels.tx_streams);
    for (int g : problem.groups_without[user]) sum += covs.mats[g];
    Eigen::MatrixXcd Q = problem.noise_var * Eigen::MatrixXcd::Identity(G, G);
    if (!problem.groups_without[user].empty()) Q += H * sum * H.adjoint();
    return hermitize(Q);
}

double mac_rate_bound(const MulticastProblem& problem, const CovarianceSet& covs,
                      int user, const std::vector<int>& subset) {
    if (subset.empty()) throw std::invalid_argument("MAC subset must be non-empty");
    const Eigen::MatrixXcd& H = problem.channels.gains[user];
    const Eigen::MatrixXcd Q = interference_covariance(problem, covs, user);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(problem.channels.tx_streams,
                                                  problem.channels.tx_streams);
    for (int g : subset) sum += covs.mats[g];
    const Eigen::MatrixXcd M = hermitize(Q + H * sum * H.adjoint());
    double value = (logdet2_pd(M) - logdet2_pd(Q)) / static_cast<double>(subset.size());
    if (value < 0.0 && value > -1e-12) value = 0.0;  // PSD additions cannot shrink the det
    return value;
}

RateResult exact_symmetric_rate(const MulticastProblem& problem, const CovarianceSet& covs) {
    if (covs.mats.size() != problem.groups.size())
        throw std::invalid_argument("covariance count does not match group count");
    RateResult result;
    result.rate = std::numeric_limits<double>::infinity();
    for (int user = 0; user < problem.num_users(); ++user) {
        MacBinding best;
        best.user = user;
        best.value = std::numeric_limits<double>::infinity();
        for (const auto& subset : enumerate_mac_subsets(problem, user)) {
            const double value = mac_rate_bound(problem, covs, user, subset);
            if (value < best.value) {
                best.value = value;
                best.subset = subset;
            }
        }
        result.rate = std::min(result.rate, best.value);
        result.binding.push_back(std::move(best));
    }
    return result;
}

double ConvexSubproblem::constraint_rhs(int j, const CovarianceSet& covs) const {
    const Constraint& con = constraints[static_cast<std::size_t>(j)];
    const Eigen::MatrixXcd& H = channels[con.user];
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(tx_streams, tx_streams);
    for (int g : con.logdet_groups) sum += covs.mats[g];
    const Eigen::MatrixXcd M = hermitize(
        noise_var * Eigen::MatrixXcd::Identity(rx_streams, rx_streams) + H * sum * H.adjoint());
    double rhs = logdet2_pd(M) + constant[con.user];
    for (int g : linear_groups[con.user])
        rhs += (linear_coef[con.user] * covs.mats[g]).trace().real();
    return con.inv_size * rhs;
}

ConvexSubproblem build_sca_subproblem(const MulticastProblem& problem,
                                      const CovarianceSet& prev) {
    if (prev.mats.size() != problem.groups.size())
        throw std::invalid_argument("covariance count does not match group count");

    const double log2e = std::numbers::log2e;
    ConvexSubproblem sub;
    sub.tx_streams = problem.channels.tx_streams;
    sub.rx_streams = problem.channels.rx_streams;
    sub.noise_var = problem.noise_var;
    sub.total_power = problem.total_power;
    sub.group_count = static_cast<int>(problem.groups.size());
    sub.start = prev;

    for (int user = 0; user < problem.num_users(); ++user) {
        const Eigen::MatrixXcd& H = problem.channels.gains[user];
        const Eigen::MatrixXcd Qbar = interference_covariance(problem, prev, user);
        const Eigen::MatrixXcd Qinv = Qbar.inverse();

        sub.channels.push_back(H);
        sub.linear_groups.push_back(problem.groups_without[user]);
        sub.linear_coef.push_back(hermitize(-log2e * H.adjoint() * Qinv * H));

        double c0 = -logdet2_pd(Qbar);
        for (int g : problem.groups_without[user])
            c0 += log2e * (Qinv * H * prev.mats[g] * H.adjoint()).trace().real();
        sub.constant.push_back(c0);

        for (auto& subset : enumerate_mac_subsets(problem, user)) {
            ConvexSubproblem::Constraint con;
            con.user = user;
            con.inv_size = 1.0 / static_cast<double>(subset.size());
            con.logdet_groups = subset;
            for (int g : problem.groups_without[user]) con.logdet_groups.push_back(g);
            std::sort(con.logdet_groups.begin(), con.logdet_groups.end());
            con.mac_subset = std::move(subset);
            sub.constraints.push_back(std::move(con));
        }
    }
    return sub;
}

}  // namespace mimocc

#include "mimocc/dof.hpp"

#include <cassert>
#include <stdexcept>

#include "mimocc/combinatorics.hpp"

namespace mimocc {

namespace {

void check_lgt(int L, int G, int t) {
    if (L < 1) throw std::invalid_argument("tx streams L must satisfy L >= 1");
    if (G < 1) throw std::invalid_argument("rx streams G must satisfy G >= 1");
    if (t < 0) throw std::invalid_argument("caching gain t must satisfy t >= 0");
}

}  // namespace

int beta_bound(int L, int G, int t, int omega) {
    check_lgt(L, G, t);
    if (omega < t + 1) throw std::invalid_argument("omega must satisfy omega >= t+1");
    const std::uint64_t groups_per_user = binomial(omega - 1, t);  // m_k
    const std::uint64_t denom =
        1 + static_cast<std::uint64_t>(omega - t - 1) * groups_per_user;
    const std::uint64_t spatial = static_cast<std::uint64_t>(L) * groups_per_user / denom;
    const std::uint64_t bound = std::min<std::uint64_t>(G, spatial);
    return static_cast<int>(bound);
}

int rank_bound(int L, int G, int t, int omega, int beta) {
    check_lgt(L, G, t);
    if (omega < t + 1) throw std::invalid_argument("omega must satisfy omega >= t+1");
    if (beta < 1) throw std::invalid_argument("beta must satisfy beta >= 1");
    const std::int64_t remaining =
        (static_cast<std::int64_t>(L) - static_cast<std::int64_t>(omega - t - 1) * beta) *
        static_cast<std::int64_t>(binomial(omega - 1, t));
    std::int64_t value = std::min<std::int64_t>(G, remaining);
    if (value < 0) value = 0;
    return static_cast<int>(value);
}

DofSolution dof_max(int L, int G, int t) {
    check_lgt(L, G, t);
    DofSolution best;
    for (int omega = t + 1; omega <= t + L; ++omega) {
        const int beta = beta_bound(L, G, t, omega);
        best.bound_table.emplace_back(omega, beta);
        if (beta == 0) continue;
        const int dof = omega * beta;
        if (dof > best.dof) {
            best.omega = omega;
            best.beta = beta;
            best.dof = dof;
        }
    }
    // omega = t+1 always admits beta = min(G, L) >= 1, so a solution exists.
    assert(best.dof >= 1);
    if (best.dof < 1) throw std::runtime_error("dof_max: no feasible omega");
    return best;
}

int dof_quick(int L, int G, int t) {
    check_lgt(L, G, t);
    return G * ((L - 1) / G) + G * (t + 1);
}

}  // namespace mimocc

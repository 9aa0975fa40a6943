#ifndef MIMOCC_DOF_HPP
#define MIMOCC_DOF_HPP

#include <vector>

namespace mimocc {

/// Result of the degrees-of-freedom maximization over (omega, beta).
struct DofSolution {
    int omega = 0;    // served users at the optimum
    int beta = 0;     // parallel streams per served user
    int dof = 0;      // omega * beta
    std::vector<std::pair<int, int>> bound_table;  // (omega, beta bound) for omega in [t+1, t+L]
};

/// Largest integer stream count per user that survives the interference
/// suppression budget: floor(min(G, L*C(omega-1,t) / (1 + (omega-t-1)*C(omega-1,t)))).
/// Returns 0 when no stream fits at this omega.
int beta_bound(int L, int G, int t, int omega);

/// Rank ceiling of the equivalent per-user channel after transmit-side
/// suppression of the other users' streams:
/// max(0, min(G, (L - (omega-t-1)*beta) * C(omega-1, t))).
int rank_bound(int L, int G, int t, int omega, int beta);

/// Exhaustive search of omega in [t+1, t+L] with beta = beta_bound(omega),
/// maximizing omega*beta. Ties resolve to the smallest omega (cheapest
/// subpacketization), then the largest beta.
DofSolution dof_max(int L, int G, int t);

/// Achievable value obtained by pinning beta = G: G*floor((L-1)/G) + G*(t+1).
int dof_quick(int L, int G, int t);

}  // namespace mimocc

#endif

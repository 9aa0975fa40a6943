#ifndef MIMOCC_SOLVER_HPP
#define MIMOCC_SOLVER_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include "mimocc/multicast.hpp"

namespace mimocc {

/// Raised when the subproblem solver runs out of iterations; carries the
/// best strictly feasible point reached so callers can fall back to it.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& message, CovarianceSet best, double rate)
        : std::runtime_error(message), best_(std::move(best)), rate_(rate) {}

    const CovarianceSet& best_point() const { return best_; }
    double best_rate() const { return rate_; }

private:
    CovarianceSet best_;
    double rate_;
};

/// Raised by the harness when a transmission yields a zero rate.
class DegenerateTrial : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScaConfig {
    double er_sca = 1e-4;  // stop once the per-iteration rate gain drops below this
    int max_iter = 200;
    int restarts = 1;
    std::uint64_t base_seed = 0;   // keys the random restarts
    double subproblem_tol = 1e-5;  // bits; inner solver optimality gap
};

struct ScaOutcome {
    RateResult result;
    CovarianceSet covariances;
};

/// Maximizes R over the subproblem's rate constraints, the power budget and
/// the per-group PSD cones with a damped-Newton log-barrier method. Returns
/// covariances together with the subproblem objective at them, within `tol`
/// bits of the subproblem optimum. The returned point satisfies the power
/// constraint strictly.
std::pair<CovarianceSet, double> solve_subproblem(const ConvexSubproblem& sub,
                                                  double tol = 1e-5);

/// Successive convex approximation on problem `problem`: linearize at the
/// current iterate, solve, accept if the exact rate did not decrease, stop
/// once the gain is at most er_sca. The reported rate is always the exact
/// rate at the final covariances; with multiple restarts the best exact rate
/// wins. First restart starts from scaled identities, later ones from seeded
/// Wishart draws with the same per-group trace.
ScaOutcome sca_solve(const MulticastProblem& problem, const ScaConfig& config = {});

/// Single-group fast path (omega = t+1): the problem is already convex, so
/// one subproblem solve yields the max-min rate without any SCA loop.
ScaOutcome single_group_solve(const MulticastProblem& problem, double tol = 1e-5);

/// Point-to-point MIMO capacity with water-filling over the singular values
/// of H; the water level comes from bisection on the power balance.
double waterfilling_capacity(const Eigen::MatrixXcd& H, double total_power, double noise_var);

}  // namespace mimocc

#endif

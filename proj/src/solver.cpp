#include "mimocc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "mimocc/channel.hpp"

namespace mimocc {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kLn2 = std::numbers::ln2;

MatrixXcd hermitize(const MatrixXcd& M) { return 0.5 * (M + M.adjoint()); }

/// Natural-log determinant of a Hermitian matrix if positive definite.
std::optional<double> try_logdet_nat(const MatrixXcd& M) {
    Eigen::LLT<MatrixXcd> llt(M);
    if (llt.info() != Eigen::Success) return std::nullopt;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        const double d = llt.matrixLLT()(i, i).real();
        if (!(d > 0.0)) return std::nullopt;
        sum += std::log(d);
    }
    return 2.0 * sum;
}

/// Real coordinates of Hermitian L x L matrices: L diagonal entries followed
/// by (re, im) pairs of the strict upper triangle in row-major order.
struct HermCoords {
    int size;  // L
    int dim;   // L*L
    struct Elem {
        int row, col;
        bool imag;
    };
    std::vector<Elem> elems;
    std::vector<MatrixXcd> mats;  // the basis matrices themselves

    explicit HermCoords(int L) : size(L), dim(L * L) {
        for (int i = 0; i < L; ++i) elems.push_back({i, i, false});
        for (int i = 0; i < L; ++i)
            for (int j = i + 1; j < L; ++j) {
                elems.push_back({i, j, false});
                elems.push_back({i, j, true});
            }
        for (int m = 0; m < dim; ++m) {
            MatrixXcd B = MatrixXcd::Zero(L, L);
            const Elem& e = elems[m];
            if (e.row == e.col) {
                B(e.row, e.row) = 1.0;
            } else if (e.imag) {
                B(e.row, e.col) = std::complex<double>(0.0, 1.0);
                B(e.col, e.row) = std::complex<double>(0.0, -1.0);
            } else {
                B(e.row, e.col) = 1.0;
                B(e.col, e.row) = 1.0;
            }
            mats.push_back(std::move(B));
        }
    }

    /// Directional derivative component ReTr(A * basis(m)) for Hermitian A.
    double inner(const MatrixXcd& A, int m) const {
        const Elem& e = elems[m];
        if (e.row == e.col) return A(e.row, e.row).real();
        return e.imag ? 2.0 * A(e.row, e.col).imag() : 2.0 * A(e.row, e.col).real();
    }

    double trace_of(int m) const { return elems[m].row == elems[m].col ? 1.0 : 0.0; }

    const MatrixXcd& basis(int m) const { return mats[m]; }

    void pack(const MatrixXcd& K, double* x) const {
        for (int m = 0; m < dim; ++m) {
            const Elem& e = elems[m];
            x[m] = e.imag ? K(e.row, e.col).imag() : K(e.row, e.col).real();
        }
    }

    void unpack_into(const double* x, MatrixXcd& K) const {
        K.setZero(size, size);
        for (int m = 0; m < dim; ++m) {
            const Elem& e = elems[m];
            if (e.row == e.col) {
                K(e.row, e.row) = x[m];
            } else if (!e.imag) {
                K(e.row, e.col) += x[m];
                K(e.col, e.row) += x[m];
            } else {
                K(e.row, e.col) += std::complex<double>(0.0, x[m]);
                K(e.col, e.row) += std::complex<double>(0.0, -x[m]);
            }
        }
    }
};

/// ReTr(A * B) without forming the product.
double trace_product_real(const MatrixXcd& A, const MatrixXcd& B) {
    return (A.transpose().cwiseProduct(B)).sum().real();
}

/// Barrier framework state for one candidate point. The inverses are filled
/// only for accepted points (fill_derivatives), not during line search.
struct PointData {
    bool feasible = false;
    double barrier_obj = 0.0;  // weight * (-R) + barriers, minimized
    std::vector<MatrixXcd> covs;
    std::vector<MatrixXcd> cov_inv;
    double power_slack = 0.0;
    std::vector<double> slack;         // rate-constraint slacks, bits
    std::vector<MatrixXcd> ldet_args;  // per constraint: the logdet argument
    std::vector<MatrixXcd> ldet_minv;  // its inverse
};

class BarrierSolver {
public:
    BarrierSolver(const ConvexSubproblem& sub, double tol)
        : sub_(sub), coords_(sub.tx_streams), tol_(std::max(tol, 1e-9)) {
        num_groups_ = sub.group_count;
        dim_ = num_groups_ * coords_.dim + 1;
        r_index_ = dim_ - 1;
        // Complexity parameter: one log per rate/power constraint, L per cone.
        nu_ = static_cast<double>(sub.constraints.size()) + 1.0 +
              static_cast<double>(num_groups_) * sub.tx_streams;

        const int users = static_cast<int>(sub.channels.size());
        basis_quads_.resize(users);
        lam_inner_.resize(users);
        for (int u = 0; u < users; ++u) {
            const MatrixXcd& H = sub_.channels[u];
            basis_quads_[u].reserve(coords_.dim);
            for (int m = 0; m < coords_.dim; ++m)
                basis_quads_[u].push_back(H * coords_.basis(m) * H.adjoint());
            lam_inner_[u].resize(coords_.dim);
            for (int m = 0; m < coords_.dim; ++m)
                lam_inner_[u][m] = coords_.inner(sub_.linear_coef[u], m);
        }
    }

    std::pair<CovarianceSet, double> run() {
        VectorXd x = initial_point();
        PointData data;
        evaluate(x, 1.0, data);
        if (!data.feasible)
            throw SolverFailure("barrier solver: initial point infeasible", sub_.start,
                                -std::numeric_limits<double>::infinity());

        double weight = 1.0;
        const double gap_target = 0.25 * tol_;
        const double growth = 40.0;
        center(x, data, weight);
        while (nu_ / weight > gap_target) {
            weight = std::min(weight * growth, nu_ / gap_target);
            center(x, data, weight);
        }
        return finish(data);
    }

private:
    VectorXd initial_point() const {
        // Shift the expansion point strictly inside every cone and leave
        // room under the power budget, then start R below all constraints.
        const double eps = 1e-3;
        const double bump =
            eps * sub_.total_power / (2.0 * std::max(1, num_groups_) * sub_.tx_streams);
        VectorXd x = VectorXd::Zero(dim_);
        CovarianceSet shifted;
        for (int g = 0; g < num_groups_; ++g) {
            MatrixXcd K = sub_.start.mats.empty()
                              ? MatrixXcd::Zero(sub_.tx_streams, sub_.tx_streams)
                              : sub_.start.mats[g];
            K = hermitize((1.0 - eps) * K);
            K += bump * MatrixXcd::Identity(sub_.tx_streams, sub_.tx_streams);
            coords_.pack(K, x.data() + g * coords_.dim);
            shifted.mats.push_back(std::move(K));
        }
        double min_rhs = std::numeric_limits<double>::infinity();
        for (int j = 0; j < static_cast<int>(sub_.constraints.size()); ++j)
            min_rhs = std::min(min_rhs, sub_.constraint_rhs(j, shifted));
        x[r_index_] = min_rhs - 0.1 * (1.0 + std::abs(min_rhs));
        return x;
    }

    void evaluate(const VectorXd& x, double weight, PointData& data) const {
        data.feasible = false;
        data.covs.resize(num_groups_);
        double barrier = 0.0;
        double trace_sum = 0.0;
        for (int g = 0; g < num_groups_; ++g) {
            coords_.unpack_into(x.data() + g * coords_.dim, data.covs[g]);
            const auto ld = try_logdet_nat(data.covs[g]);
            if (!ld) return;  // outside the PSD cone
            barrier -= *ld;
            trace_sum += data.covs[g].real().trace();
        }
        data.power_slack = sub_.total_power - trace_sum;
        if (!(data.power_slack > 0.0)) return;
        barrier -= std::log(data.power_slack);

        const double rate = x[r_index_];
        const int L = sub_.tx_streams;
        const int G = sub_.rx_streams;
        data.slack.resize(sub_.constraints.size());
        data.ldet_args.resize(sub_.constraints.size());
        for (std::size_t j = 0; j < sub_.constraints.size(); ++j) {
            const auto& con = sub_.constraints[j];
            MatrixXcd& M = data.ldet_args[j];
            sum_buf_.setZero(L, L);
            for (int g : con.logdet_groups) sum_buf_ += data.covs[g];
            const MatrixXcd& H = sub_.channels[con.user];
            M = sub_.noise_var * MatrixXcd::Identity(G, G);
            M.noalias() += H * sum_buf_ * H.adjoint();
            M = 0.5 * (M + M.adjoint()).eval();
            const auto ld = try_logdet_nat(M);
            if (!ld) return;
            double rhs = *ld / kLn2 + sub_.constant[con.user];
            for (int g : sub_.linear_groups[con.user])
                rhs += trace_product_real(sub_.linear_coef[con.user], data.covs[g]);
            rhs *= con.inv_size;
            const double s = rhs - rate;
            if (!(s > 0.0)) return;
            data.slack[j] = s;
            barrier -= std::log(s);
        }
        data.feasible = true;
        data.barrier_obj = -weight * rate + barrier;
    }

    /// Inverses needed by gradient/Hessian assembly at an accepted point.
    void fill_derivatives(PointData& data) const {
        data.cov_inv.resize(num_groups_);
        for (int g = 0; g < num_groups_; ++g) data.cov_inv[g] = data.covs[g].inverse();
        data.ldet_minv.resize(sub_.constraints.size());
        for (std::size_t j = 0; j < sub_.constraints.size(); ++j)
            data.ldet_minv[j] = data.ldet_args[j].inverse();
    }

    void assemble(const VectorXd& x, const PointData& data, double weight, VectorXd& grad,
                  MatrixXd& hess) const {
        grad.setZero(dim_);
        hess.setZero(dim_, dim_);
        grad[r_index_] = -weight;

        // Power barrier.
        {
            VectorXd tr = VectorXd::Zero(dim_);
            for (int g = 0; g < num_groups_; ++g)
                for (int m = 0; m < coords_.dim; ++m)
                    tr[g * coords_.dim + m] = coords_.trace_of(m);
            grad += tr / data.power_slack;
            hess += (tr / data.power_slack) * (tr / data.power_slack).transpose();
        }

        // PSD cone barriers, block diagonal per group.
        std::vector<MatrixXcd>& scaled = scaled_buf_;
        scaled.resize(coords_.dim);
        for (int g = 0; g < num_groups_; ++g) {
            const MatrixXcd& Kinv = data.cov_inv[g];
            for (int m = 0; m < coords_.dim; ++m) {
                grad[g * coords_.dim + m] -= coords_.inner(Kinv, m);
                scaled[m].noalias() = Kinv * coords_.basis(m);
            }
            for (int m = 0; m < coords_.dim; ++m)
                for (int p = m; p < coords_.dim; ++p) {
                    const double v = trace_product_real(scaled[m], scaled[p]);
                    hess(g * coords_.dim + m, g * coords_.dim + p) += v;
                    if (p != m) hess(g * coords_.dim + p, g * coords_.dim + m) += v;
                }
        }

        // Rate constraints.
        std::vector<double> core(coords_.dim);
        std::vector<MatrixXcd>& v_mats = vmat_buf_;
        v_mats.resize(coords_.dim);
        MatrixXd curv(coords_.dim, coords_.dim);
        for (std::size_t j = 0; j < sub_.constraints.size(); ++j) {
            const auto& con = sub_.constraints[j];
            const MatrixXcd& H = sub_.channels[con.user];
            const MatrixXcd& Minv = data.ldet_minv[j];
            const MatrixXcd A = hermitize(H.adjoint() * Minv * H);
            for (int m = 0; m < coords_.dim; ++m) {
                core[m] = coords_.inner(A, m) / kLn2;
                v_mats[m].noalias() = Minv * basis_quads_[con.user][m];
            }
            for (int m = 0; m < coords_.dim; ++m)
                for (int p = m; p < coords_.dim; ++p) {
                    const double z = trace_product_real(v_mats[m], v_mats[p]) / kLn2;
                    curv(m, p) = z;
                    curv(p, m) = z;
                }

            // Sparse gradient of the slack over this constraint's support.
            std::vector<std::pair<int, double>> gs;
            gs.reserve(con.logdet_groups.size() * coords_.dim + 1);
            for (int g : con.logdet_groups) {
                const bool linear = std::find(sub_.linear_groups[con.user].begin(),
                                              sub_.linear_groups[con.user].end(),
                                              g) != sub_.linear_groups[con.user].end();
                for (int m = 0; m < coords_.dim; ++m) {
                    double val = core[m];
                    if (linear) val += lam_inner_[con.user][m];
                    gs.emplace_back(g * coords_.dim + m, con.inv_size * val);
                }
            }
            gs.emplace_back(r_index_, -1.0);

            const double inv_s = 1.0 / data.slack[j];
            for (const auto& [idx, val] : gs) grad[idx] -= inv_s * val;
            for (const auto& [i1, v1] : gs)
                for (const auto& [i2, v2] : gs) hess(i1, i2) += inv_s * inv_s * v1 * v2;
            // Curvature of the concave logdet, replicated over group pairs.
            const double scale = inv_s * con.inv_size;
            for (int ga : con.logdet_groups)
                for (int gb : con.logdet_groups)
                    for (int m = 0; m < coords_.dim; ++m)
                        for (int p = 0; p < coords_.dim; ++p)
                            hess(ga * coords_.dim + m, gb * coords_.dim + p) +=
                                scale * curv(m, p);
        }
    }

    void center(VectorXd& x, PointData& data, double weight) {
        evaluate(x, weight, data);
        VectorXd grad;
        MatrixXd hess;
        PointData cand;
        VectorXd trial;
        for (int step = 0; step < 60; ++step) {
            if (++newton_steps_ > 4000)
                throw SolverFailure("barrier solver: iteration cap exceeded",
                                    current_covs(data), current_rate(x));
            fill_derivatives(data);
            assemble(x, data, weight, grad, hess);
            Eigen::LDLT<MatrixXd> ldlt(hess);
            VectorXd dir = ldlt.solve(-grad);
            if (ldlt.info() != Eigen::Success || !dir.allFinite()) {
                hess.diagonal().array() += 1e-10 * (1.0 + hess.diagonal().array().abs());
                dir = hess.ldlt().solve(-grad);
                if (!dir.allFinite()) break;
            }
            const double decrement = -grad.dot(dir);
            if (decrement <= 2e-10) break;

            double alpha = 1.0;
            bool moved = false;
            while (alpha > 1e-13) {
                trial = x + alpha * dir;
                evaluate(trial, weight, cand);
                if (cand.feasible &&
                    cand.barrier_obj <= data.barrier_obj - 0.25 * alpha * decrement) {
                    x.swap(trial);
                    std::swap(data, cand);
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) break;
        }
    }

    CovarianceSet current_covs(const PointData& data) const {
        CovarianceSet covs;
        covs.mats = data.covs;
        for (auto& K : covs.mats) K = hermitize(K);
        return covs;
    }

    double current_rate(const VectorXd& x) const { return x[r_index_]; }

    std::pair<CovarianceSet, double> finish(const PointData& data) const {
        CovarianceSet covs = current_covs(data);
        double rate = std::numeric_limits<double>::infinity();
        for (int j = 0; j < static_cast<int>(sub_.constraints.size()); ++j)
            rate = std::min(rate, sub_.constraint_rhs(j, covs));
        return {std::move(covs), rate};
    }

    const ConvexSubproblem& sub_;
    HermCoords coords_;
    double tol_;
    int num_groups_ = 0;
    int dim_ = 0;
    int r_index_ = 0;
    double nu_ = 0.0;
    long newton_steps_ = 0;
    std::vector<std::vector<MatrixXcd>> basis_quads_;  // per user, per coord: H B H^H
    std::vector<std::vector<double>> lam_inner_;       // per user, per coord
    mutable MatrixXcd sum_buf_;
    mutable std::vector<MatrixXcd> scaled_buf_;
    mutable std::vector<MatrixXcd> vmat_buf_;
};

CovarianceSet identity_init(const MulticastProblem& problem) {
    const int L = problem.channels.tx_streams;
    const int n = static_cast<int>(problem.groups.size());
    CovarianceSet covs;
    const double diag = problem.total_power / (static_cast<double>(n) * L);
    for (int g = 0; g < n; ++g)
        covs.mats.push_back(diag * MatrixXcd::Identity(L, L));
    return covs;
}

/// Over-relaxed candidate K + gamma*(K - prev), clipped back onto the PSD
/// cone and the power ball. Interference terms that the linearization only
/// shaves gradually die in a few steps this way; the caller keeps the
/// candidate only when the exact rate improves, so convergence guarantees
/// are untouched.
CovarianceSet extrapolate_step(const CovarianceSet& prev, const CovarianceSet& next,
                               double gamma, double power) {
    CovarianceSet out;
    double total = 0.0;
    for (std::size_t g = 0; g < next.mats.size(); ++g) {
        MatrixXcd K = next.mats[g] + gamma * (next.mats[g] - prev.mats[g]);
        K = 0.5 * (K + K.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(K);
        const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
        out.mats.push_back(eig.eigenvectors() * lam.asDiagonal() *
                           eig.eigenvectors().adjoint());
        total += lam.sum();
    }
    if (total > power)
        for (auto& K : out.mats) K *= power / total;
    return out;
}

CovarianceSet wishart_init(const MulticastProblem& problem, std::uint64_t seed) {
    const int L = problem.channels.tx_streams;
    const int n = static_cast<int>(problem.groups.size());
    const double group_power = problem.total_power / static_cast<double>(n);
    CovarianceSet covs;
    for (int g = 0; g < n; ++g) {
        MatrixXcd A(L, L);
        for (int r = 0; r < L; ++r)
            for (int c = 0; c < L; ++c)
                A(r, c) = unit_gaussian(derive_seed(seed, static_cast<std::uint64_t>(g),
                                                    static_cast<std::uint64_t>(r) * L + c));
        MatrixXcd K = A * A.adjoint();
        const double trace = K.real().trace();
        covs.mats.push_back(K * (group_power / std::max(trace, 1e-30)));
    }
    return covs;
}

}  // namespace

std::pair<CovarianceSet, double> solve_subproblem(const ConvexSubproblem& sub, double tol) {
    BarrierSolver solver(sub, tol);
    return solver.run();
}

ScaOutcome sca_solve(const MulticastProblem& problem, const ScaConfig& config) {
    if (config.max_iter < 1) throw std::invalid_argument("max_iter must satisfy max_iter >= 1");
    if (config.restarts < 1) throw std::invalid_argument("restarts must satisfy restarts >= 1");

    std::optional<ScaOutcome> best;
    std::string failures;
    for (int restart = 0; restart < config.restarts; ++restart) {
        CovarianceSet covs = restart == 0
                                 ? identity_init(problem)
                                 : wishart_init(problem, derive_seed(config.base_seed,
                                                                     0x5CA0u, restart));
        std::vector<double> trace{exact_symmetric_rate(problem, covs).rate};
        int iterations = 0;
        bool converged = false;
        try {
            constexpr double kOverRelax = 3.0;
            for (int iter = 1; iter <= config.max_iter; ++iter) {
                iterations = iter;
                const ConvexSubproblem sub = build_sca_subproblem(problem, covs);
                auto [candidate, sub_rate] = solve_subproblem(sub, config.subproblem_tol);
                double exact = exact_symmetric_rate(problem, candidate).rate;
                CovarianceSet pushed =
                    extrapolate_step(covs, candidate, kOverRelax, problem.total_power);
                const double pushed_rate = exact_symmetric_rate(problem, pushed).rate;
                if (pushed_rate > exact) {
                    exact = pushed_rate;
                    candidate = std::move(pushed);
                }
                double gain = 0.0;
                if (exact >= trace.back()) {
                    gain = exact - trace.back();
                    covs = std::move(candidate);
                    trace.push_back(exact);
                } else {
                    trace.push_back(trace.back());  // keep the better iterate
                }
                if (gain <= config.er_sca) {
                    converged = true;
                    break;
                }
            }
        } catch (const SolverFailure& failure) {
            failures += std::string(failures.empty() ? "" : "; ") + "restart " +
                        std::to_string(restart) + ": " + failure.what();
            continue;
        }
        RateResult result = exact_symmetric_rate(problem, covs);
        result.iterations = iterations;
        result.converged = converged;
        result.trace = std::move(trace);
        if (!best || result.rate > best->result.rate)
            best = ScaOutcome{std::move(result), std::move(covs)};
    }
    if (!best)
        throw SolverFailure("sca_solve: all restarts failed (" + failures + ")",
                            identity_init(problem), 0.0);
    return std::move(*best);
}

ScaOutcome single_group_solve(const MulticastProblem& problem, double tol) {
    if (problem.groups.size() != 1)
        throw std::invalid_argument(
            "single-group fast path requires omega = t+1 (exactly one multicast group)");
    const int L = problem.channels.tx_streams;
    CovarianceSet zero;
    zero.mats.push_back(MatrixXcd::Zero(L, L));
    // No interference groups, so the linearization is exact and one convex
    // solve gives the max-min rate.
    const ConvexSubproblem sub = build_sca_subproblem(problem, zero);
    auto [covs, sub_rate] = solve_subproblem(sub, tol);
    RateResult result = exact_symmetric_rate(problem, covs);
    result.iterations = 1;
    result.converged = true;
    result.trace = {result.rate};
    return {std::move(result), std::move(covs)};
}

double waterfilling_capacity(const Eigen::MatrixXcd& H, double total_power, double noise_var) {
    if (!(total_power > 0.0)) throw std::invalid_argument("power budget must be positive");
    if (!(noise_var > 0.0)) throw std::invalid_argument("noise variance must be positive");
    if (H.norm() <= 0.0) throw std::invalid_argument("channel matrix must be non-zero");

    Eigen::JacobiSVD<MatrixXcd> svd(H);
    std::vector<double> floors;  // N0 / sigma^2 per usable eigenmode
    const double sigma_max = svd.singularValues()[0];
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        const double sigma = svd.singularValues()[i];
        if (sigma > 1e-14 * sigma_max) floors.push_back(noise_var / (sigma * sigma));
    }

    const double lowest = *std::min_element(floors.begin(), floors.end());
    double lo = lowest;
    double hi = lowest + total_power;
    auto allocated = [&](double level) {
        double sum = 0.0;
        for (double f : floors) sum += std::max(0.0, level - f);
        return sum;
    };
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-16 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (allocated(mid) < total_power ? lo : hi) = mid;
    }
    const double level = 0.5 * (lo + hi);

    double capacity = 0.0;
    for (double f : floors)
        if (level > f) capacity += std::log2(level / f);
    return capacity;
}

}  // namespace mimocc

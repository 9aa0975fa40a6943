#include "mimocc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mimocc {

std::complex<double> unit_gaussian(std::uint64_t key) {
    const std::uint64_t w1 = mix64(key);
    const std::uint64_t w2 = mix64(key ^ 0x9E3779B97F4A7C15ULL);
    // u1 in (0,1] keeps the log finite; u2 in [0,1).
    const double u1 = static_cast<double>((w1 >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(w2 >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

const Eigen::MatrixXcd& ChannelSet::of(int user) const {
    for (std::size_t i = 0; i < users.size(); ++i)
        if (users[i] == user) return gains[i];
    throw std::invalid_argument("ChannelSet: user " + std::to_string(user) + " not present");
}

ChannelSet ChannelSet::restrict(const std::vector<int>& subset) const {
    ChannelSet out;
    out.rx_streams = rx_streams;
    out.tx_streams = tx_streams;
    out.seed = seed;
    out.users = subset;
    std::sort(out.users.begin(), out.users.end());
    out.gains.reserve(out.users.size());
    for (int u : out.users) out.gains.push_back(of(u));
    return out;
}

ChannelSet sample_channels(int G, int L, const std::vector<int>& users, std::uint64_t seed) {
    if (G < 1) throw std::invalid_argument("rx streams G must satisfy G >= 1");
    if (L < 1) throw std::invalid_argument("tx streams L must satisfy L >= 1");
    if (users.empty()) throw std::invalid_argument("user set must be non-empty");

    ChannelSet set;
    set.rx_streams = G;
    set.tx_streams = L;
    set.seed = seed;
    set.users = users;
    std::sort(set.users.begin(), set.users.end());

    for (int u : set.users) {
        Eigen::MatrixXcd H(G, L);
        for (int r = 0; r < G; ++r)
            for (int c = 0; c < L; ++c)
                H(r, c) = unit_gaussian(derive_seed(seed, static_cast<std::uint64_t>(u),
                                                    static_cast<std::uint64_t>(r) * L + c));
        set.gains.push_back(std::move(H));
    }
    return set;
}

double logdet_hermitian_psd(const Eigen::MatrixXcd& M) {
    if (M.rows() != M.cols())
        throw std::domain_error("logdet: matrix must be square");
    const double scale = std::max(1.0, M.norm());
    if ((M - M.adjoint()).norm() > 1e-10 * scale)
        throw std::domain_error("logdet: matrix is not Hermitian within tolerance");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(M, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
        throw std::domain_error("logdet: eigendecomposition failed");

    const double trace = M.real().trace();
    const double floor = -1e-10 * std::max(trace, 0.0);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
        const double lambda = eig.eigenvalues()[i];
        if (lambda < floor)
            throw std::domain_error("logdet: matrix is indefinite beyond tolerance");
        if (lambda <= 0.0) return -std::numeric_limits<double>::infinity();
        sum += std::log2(lambda);
    }
    return sum;
}

}  // namespace mimocc

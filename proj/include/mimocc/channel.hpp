#ifndef MIMOCC_CHANNEL_HPP
#define MIMOCC_CHANNEL_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace mimocc {

/// SplitMix64 finalizer; the core of the counter-based generator.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic seed for a (base, a, b) triple. Used to key trials by
/// (snr index, trial index) and channel entries by (user, entry index),
/// so generation order never affects the values.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = mix64(base ^ 0x5EEDBA5EULL);
    h = mix64(h ^ mix64(a + 0xC2B2AE3D27D4EB4FULL));
    h = mix64(h ^ mix64(b + 0x165667B19E3779F9ULL));
    return h;
}

/// Standard circularly-symmetric complex Gaussian CN(0,1) drawn from a
/// 64-bit counter key (Box-Muller over two uniform words derived from it).
std::complex<double> unit_gaussian(std::uint64_t key);

/// Channels of one served user set, ascending user order. Entries are
/// i.i.d. CN(0,1): real and imaginary parts each Gaussian with variance 1/2.
struct ChannelSet {
    int rx_streams = 0;  // G
    int tx_streams = 0;  // L
    std::uint64_t seed = 0;
    std::vector<int> users;              // ascending 1-based indices
    std::vector<Eigen::MatrixXcd> gains; // G x L per user, same order

    /// Channel matrix of a user id; throws std::invalid_argument if absent.
    const Eigen::MatrixXcd& of(int user) const;

    /// Subset restricted to `subset` (must all be present), same seed.
    ChannelSet restrict(const std::vector<int>& subset) const;
};

/// Deterministic function of (G, L, users, seed): entry (r, c) of user u is
/// keyed on (seed, u, r*L + c) only, so the same user draws the same matrix
/// in any subset and any call order.
ChannelSet sample_channels(int G, int L, const std::vector<int>& users, std::uint64_t seed);

/// Base-2 log-determinant of a Hermitian PSD matrix via eigendecomposition.
/// Inputs must be Hermitian within 1e-10 (relative) and have eigenvalues
/// >= -1e-10 * trace; violations raise std::domain_error. A singular input
/// inside the tolerance yields -infinity.
double logdet_hermitian_psd(const Eigen::MatrixXcd& M);

}  // namespace mimocc

#endif

#ifndef MIMOCC_COMBINATORICS_HPP
#define MIMOCC_COMBINATORICS_HPP

#include <bit>
#include <cstdint>
#include <vector>

namespace mimocc {

/// Exact binomial coefficient C(n, k). Returns 0 for k < 0 or k > n.
/// Exact for every n <= 62; larger n throws std::invalid_argument.
std::uint64_t binomial(int n, int k);

/// All subsets of `pool` with exactly `size` elements, in lexicographic
/// order of the sorted element lists ({1,2} < {1,3} < ... < {2,3}).
/// Subsets and pool are bitmasks; user u occupies bit u-1.
std::vector<std::uint32_t> subsets_of_size(std::uint32_t pool, int size);

/// Elements of a mask in ascending order (1-based user indices).
std::vector<int> mask_to_users(std::uint32_t mask);

/// Mask with bits for users 1..count set.
inline std::uint32_t full_mask(int count) {
    return count >= 32 ? 0xFFFFFFFFu : ((1u << count) - 1u);
}

inline std::uint32_t user_bit(int user) { return 1u << (user - 1); }

inline bool mask_contains(std::uint32_t mask, int user) {
    return (mask & user_bit(user)) != 0;
}

inline int mask_size(std::uint32_t mask) { return std::popcount(mask); }

}  // namespace mimocc

#endif

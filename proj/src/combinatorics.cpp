#include "mimocc/combinatorics.hpp"

#include <stdexcept>

namespace mimocc {

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (n > 62) throw std::invalid_argument("binomial: n must satisfy n <= 62");
    if (k > n - k) k = n - k;
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        // Multiply-then-divide stays exact: result*(n-k+i) is divisible by i.
        result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return result;
}

std::vector<std::uint32_t> subsets_of_size(std::uint32_t pool, int size) {
    const std::vector<int> elems = mask_to_users(pool);
    const int n = static_cast<int>(elems.size());
    std::vector<std::uint32_t> out;
    if (size < 0 || size > n) return out;
    if (size == 0) {
        out.push_back(0);
        return out;
    }
    out.reserve(binomial(n, size));
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    while (true) {
        std::uint32_t mask = 0;
        for (int i : idx) mask |= user_bit(elems[i]);
        out.push_back(mask);
        int pos = size - 1;
        while (pos >= 0 && idx[pos] == n - size + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int i = pos + 1; i < size; ++i) idx[i] = idx[i - 1] + 1;
    }
    return out;
}

std::vector<int> mask_to_users(std::uint32_t mask) {
    std::vector<int> users;
    users.reserve(mask_size(mask));
    for (int u = 1; u <= 32 && mask; ++u) {
        if (mask_contains(mask, u)) {
            users.push_back(u);
            mask &= ~user_bit(u);
        }
    }
    return users;
}

}  // namespace mimocc

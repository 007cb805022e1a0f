#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace spinprep {

inline constexpr int kMaxBinomialN = 62;

/// C(n, k) as exact 64-bit integer; n limited so every value fits.
inline std::int64_t binomial(int n, int k) {
    if (n < 0 || n > kMaxBinomialN) throw std::invalid_argument("binomial: n out of range");
    if (k < 0 || k > n) return 0;
    struct Table {
        std::array<std::array<std::int64_t, kMaxBinomialN + 1>, kMaxBinomialN + 1> c{};
        Table() {
            for (int i = 0; i <= kMaxBinomialN; ++i) {
                c[i][0] = 1;
                for (int j = 1; j <= i; ++j)
                    c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0);
            }
        }
    };
    static const Table t;
    return t.c[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

/// Rank of a strictly increasing index tuple in colexicographic order:
/// rank(c_0 < c_1 < ... < c_{k-1}) = sum_i C(c_i, i+1).
inline std::size_t colex_rank(const int* idx, int k) {
    std::int64_t r = 0;
    for (int i = 0; i < k; ++i) r += binomial(idx[i], i + 1);
    return static_cast<std::size_t>(r);
}

inline std::size_t colex_rank(const std::vector<int>& idx) {
    return colex_rank(idx.data(), static_cast<int>(idx.size()));
}

/// Visit all k-subsets of {0,...,n-1} in colexicographic order, so the visit
/// counter equals colex_rank of the tuple. fn(const int* idx, k).
template <typename Fn>
void for_each_combination_colex(int n, int k, Fn&& fn) {
    if (k < 0 || k > n) return;
    if (k == 0) {
        fn(static_cast<const int*>(nullptr), 0);
        return;
    }
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        fn(idx.data(), k);
        // colex successor: bump the lowest position that can move, reset below
        int i = 0;
        while (i < k) {
            int limit = (i + 1 < k) ? idx[static_cast<std::size_t>(i + 1)] : n;
            if (idx[static_cast<std::size_t>(i)] + 1 < limit) break;
            ++i;
        }
        if (i == k) return;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = 0; j < i; ++j) idx[static_cast<std::size_t>(j)] = j;
    }
}

/// Visit all k-subsets in lexicographic order of the tuple itself.
template <typename Fn>
void for_each_combination_lex(int n, int k, Fn&& fn) {
    if (k < 0 || k > n) return;
    if (k == 0) {
        fn(static_cast<const int*>(nullptr), 0);
        return;
    }
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        fn(idx.data(), k);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) return;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

/// Sum over all k-subsets of the product of y_i in {+1,-1} when exactly d of
/// the y_i equal -1 out of N:  sum_j (-1)^j C(d, j) C(N-d, k-j).
inline std::int64_t krawtchouk_subset_sum(int d, int N, int k) {
    if (d < 0 || d > N) throw std::invalid_argument("krawtchouk_subset_sum: d out of range");
    if (k < 0 || k > N) throw std::invalid_argument("krawtchouk_subset_sum: k out of range");
    std::int64_t s = 0;
    for (int j = 0; j <= k; ++j) {
        std::int64_t term = binomial(d, j) * binomial(N - d, k - j);
        s += (j % 2 == 0) ? term : -term;
    }
    return s;
}

}  // namespace spinprep

#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace spinprep {

inline constexpr int kMaxSpins = 64;

/// A classical configuration of n Ising spins. Bit value 0 corresponds to
/// spin eigenvalue +1, bit value 1 to -1. Machine bit j holds the j-th
/// character of the textual form, i.e. the leftmost character is position 0.
struct SpinConfiguration {
    std::uint64_t bits = 0;
    int n = 0;

    SpinConfiguration() = default;
    SpinConfiguration(std::uint64_t mask, int length) : bits(mask), n(length) {
        if (length < 0 || length > kMaxSpins)
            throw std::invalid_argument("SpinConfiguration: length out of range");
        if (length < kMaxSpins && (mask >> length) != 0)
            throw std::invalid_argument("SpinConfiguration: mask wider than length");
    }

    static SpinConfiguration from_string(const std::string& s) {
        if (s.size() > static_cast<std::size_t>(kMaxSpins))
            throw std::invalid_argument("SpinConfiguration: string too long");
        std::uint64_t mask = 0;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (s[j] == '1')
                mask |= (std::uint64_t{1} << j);
            else if (s[j] != '0')
                throw std::invalid_argument("SpinConfiguration: bad character in '" + s + "'");
        }
        return SpinConfiguration(mask, static_cast<int>(s.size()));
    }

    int bit(int j) const { return static_cast<int>((bits >> j) & 1u); }
    /// Spin eigenvalue s_j = +1 - 2*bit_j.
    int spin(int j) const { return 1 - 2 * bit(j); }

    SpinConfiguration flipped(int j) const { return SpinConfiguration(bits ^ (std::uint64_t{1} << j), n); }

    int popcount() const { return std::popcount(bits); }
    int hamming(const SpinConfiguration& other) const { return std::popcount(bits ^ other.bits); }

    std::string to_string() const {
        std::string s(static_cast<std::size_t>(n), '0');
        for (int j = 0; j < n; ++j)
            if (bit(j)) s[static_cast<std::size_t>(j)] = '1';
        return s;
    }

    friend bool operator==(const SpinConfiguration& a, const SpinConfiguration& b) {
        return a.n == b.n && a.bits == b.bits;
    }
    friend bool operator!=(const SpinConfiguration& a, const SpinConfiguration& b) {
        return !(a == b);
    }
};

/// Lexicographic order of the textual form (leftmost character decides).
inline bool lex_less(const SpinConfiguration& a, const SpinConfiguration& b) {
    if (a.n != b.n) return a.n < b.n;
    const std::uint64_t d = a.bits ^ b.bits;
    if (d == 0) return false;
    const int j = std::countr_zero(d);
    return a.bit(j) < b.bit(j);
}

}  // namespace spinprep

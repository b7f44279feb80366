#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cww {

/// Exact dyadic rational p / 2^j in [0,1).
struct DyadicRational {
    std::uint64_t num = 0;  // p
    unsigned scale = 0;     // j, value = p / 2^j, requires p < 2^j

    DyadicRational() = default;
    DyadicRational(std::uint64_t p, unsigned j);

    double value() const { return static_cast<double>(num) / static_cast<double>(1ull << scale); }
};

/// Bitwise-XOR of the dyadic expansions (operands rescaled to a common scale).
DyadicRational dyadic_xor(DyadicRational x, DyadicRational y);

/// w_n(x) for the sequency-ordered Walsh function, returns +1 or -1.
int walsh_eval(std::uint64_t n, DyadicRational x);

// bit helpers shared by the transform and the operators
inline std::uint64_t gray_code(std::uint64_t b) { return b ^ (b >> 1); }

inline std::uint64_t gray_decode(std::uint64_t g) {
    for (std::uint64_t m = g >> 1; m; m >>= 1) g ^= m;
    return g;
}

inline std::uint64_t bit_reverse(std::uint64_t v, unsigned bits) {
    std::uint64_t r = 0;
    for (unsigned i = 0; i < bits; ++i) {
        r = (r << 1) | (v & 1);
        v >>= 1;
    }
    return r;
}

/// Natural (Hadamard) ordered fast Walsh-Hadamard transform, in place,
/// unnormalized.  Length must be a power of two.
void fwht_natural(std::span<double> v);

/// Sequency-ordered FWHT, in place: v[n] <- sum_k w_n(k/len) v[k].
/// Unnormalized; involution up to a factor len.
void fwht_sequency(std::span<double> v);

std::vector<double> fwht_sequency_copy(std::span<const double> v);

enum class WalshOrdering { Natural, Sequency };

/// Reorders a transform output between natural and sequency conventions.
std::vector<double> ordering_convert(std::span<const double> v,
                                     WalshOrdering from, WalshOrdering to);

/// Index of sequency row n inside a natural-ordered transform output.
inline std::uint64_t sequency_to_natural_index(std::uint64_t n, unsigned bits) {
    return bit_reverse(gray_code(n), bits);
}

/// Fills sign[r] = w_r(p/2^j) for r = 0..2^j-1 (sign row of the sequency
/// Hadamard matrix at the dyadic point p/2^j).
void walsh_sign_row(std::uint64_t p, unsigned j, std::span<double> sign);

unsigned log2_exact(std::size_t n);  // throws unless n is a power of two

/// Number of FWHT invocations so far on this thread (cost-envelope checks).
std::uint64_t fwht_call_count();
void reset_fwht_call_count();

}  // namespace cww

#include "cww/walsh.hpp"

#include <bit>
#include <stdexcept>

namespace cww {

DyadicRational::DyadicRational(std::uint64_t p, unsigned j) : num(p), scale(j) {
    if (j >= 64) throw std::invalid_argument("dyadic scale too large");
    if (p >= (1ull << j)) throw std::invalid_argument("dyadic numerator out of [0,1)");
}

DyadicRational dyadic_xor(DyadicRational x, DyadicRational y) {
    unsigned j = x.scale > y.scale ? x.scale : y.scale;
    std::uint64_t px = x.num << (j - x.scale);
    std::uint64_t py = y.num << (j - y.scale);
    return DyadicRational(px ^ py, j);
}

int walsh_eval(std::uint64_t n, DyadicRational x) {
    // exponent = sum_i (n^(i) + n^(i+1)) x^(i) mod 2, x^(i) = bit (j-i) of p
    unsigned par = 0;
    for (unsigned i = 1; i <= x.scale; ++i) {
        unsigned xi = (x.num >> (x.scale - i)) & 1;
        if (!xi) continue;
        unsigned ni = (n >> (i - 1)) & 1;
        unsigned ni1 = (n >> i) & 1;
        par ^= ni ^ ni1;
    }
    return par ? -1 : 1;
}

unsigned log2_exact(std::size_t n) {
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("length is not a power of two");
    return static_cast<unsigned>(std::countr_zero(n));
}

namespace {

void fwht_iterative(double* v, std::size_t n) {
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += h << 1) {
            for (std::size_t k = i; k < i + h; ++k) {
                double a = v[k];
                double b = v[k + h];
                v[k] = a + b;
                v[k + h] = a - b;
            }
        }
    }
}

constexpr std::size_t kCacheBlock = std::size_t(1) << 13;

// H_{2n} = [H_n H_n; H_n -H_n]: transform halves first, combine last.
// Keeps the butterflies of the sub-transforms cache-resident.
void fwht_recursive(double* v, std::size_t n) {
    if (n <= kCacheBlock) {
        fwht_iterative(v, n);
        return;
    }
    std::size_t h = n >> 1;
    fwht_recursive(v, h);
    fwht_recursive(v + h, h);
    for (std::size_t k = 0; k < h; ++k) {
        double a = v[k];
        double b = v[k + h];
        v[k] = a + b;
        v[k + h] = a - b;
    }
}

thread_local std::uint64_t g_fwht_calls = 0;

}  // namespace

std::uint64_t fwht_call_count() { return g_fwht_calls; }
void reset_fwht_call_count() { g_fwht_calls = 0; }

void fwht_natural(std::span<double> v) {
    std::size_t n = v.size();
    log2_exact(n);
    ++g_fwht_calls;
    fwht_recursive(v.data(), n);
}

void fwht_sequency(std::span<double> v) {
    std::size_t n = v.size();
    unsigned bits = log2_exact(n);
    ++g_fwht_calls;
    fwht_recursive(v.data(), n);
    // out[n] = nat[bit_reverse(gray(n))]; the permutation is an involution's
    // cousin, not an involution, so go through a scratch buffer
    std::vector<double> tmp(v.begin(), v.end());
    for (std::size_t i = 0; i < n; ++i)
        v[i] = tmp[sequency_to_natural_index(i, bits)];
}

std::vector<double> fwht_sequency_copy(std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    fwht_sequency(out);
    return out;
}

std::vector<double> ordering_convert(std::span<const double> v,
                                     WalshOrdering from, WalshOrdering to) {
    std::size_t n = v.size();
    unsigned bits = log2_exact(n);
    std::vector<double> out(n);
    if (from == to) {
        out.assign(v.begin(), v.end());
    } else if (from == WalshOrdering::Natural && to == WalshOrdering::Sequency) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = v[sequency_to_natural_index(i, bits)];
    } else {
        for (std::size_t i = 0; i < n; ++i)
            out[sequency_to_natural_index(i, bits)] = v[i];
    }
    return out;
}

void walsh_sign_row(std::uint64_t p, unsigned j, std::span<double> sign) {
    // w_r(p/2^j) = (-1)^{popcount(gray(r) & bit_reverse(p))}
    //            = (-1)^{popcount(r & (v ^ (v<<1)))},  v = bit_reverse(p)
    std::uint64_t v = bit_reverse(p, j);
    std::uint64_t mask = v ^ (v << 1);
    std::size_t n = std::size_t(1) << j;
    for (std::size_t r = 0; r < n; ++r)
        sign[r] = (std::popcount(r & mask) & 1) ? -1.0 : 1.0;
}

}  // namespace cww

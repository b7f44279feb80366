#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "cww/walsh.hpp"
#include "test_util.hpp"

using namespace cww;

namespace {

// independent scalar evaluation straight from the dyadic-series definition
int walsh_bruteforce(std::uint64_t n, std::uint64_t p, unsigned j) {
    int expo = 0;
    for (unsigned i = 1; i <= j; ++i) {
        int xi = static_cast<int>((p >> (j - i)) & 1);
        int ni = static_cast<int>((n >> (i - 1)) & 1);
        int ni1 = static_cast<int>((n >> i) & 1);
        expo += (ni + ni1) * xi;
    }
    return expo % 2 ? -1 : 1;
}

int sign_changes(const std::vector<int>& v) {
    int c = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] != v[i - 1]) ++c;
    return c;
}

}  // namespace

TEST_CASE("dyadic rational invariants") {
    CHECK_THROWS(DyadicRational(4, 2));
    CHECK_THROWS(DyadicRational(1, 0));
    CHECK(DyadicRational(3, 3).value() == doctest::Approx(0.375));
    CHECK(DyadicRational(0, 0).value() == 0.0);
}

TEST_CASE("dyadic xor") {
    auto x = DyadicRational(3, 3);  // 3/8
    CHECK(dyadic_xor(x, x).num == 0);
    auto z = dyadic_xor(DyadicRational(1, 1), DyadicRational(1, 2));  // 1/2 ^ 1/4
    CHECK(z.value() == doctest::Approx(0.75));
    auto w = dyadic_xor(DyadicRational(3, 3), DyadicRational(5, 3));  // 3/8 ^ 5/8
    CHECK(w.value() == doctest::Approx(0.75));
}

TEST_CASE("walsh_eval basics") {
    for (unsigned j = 0; j <= 6; ++j)
        for (std::uint64_t p = 0; p < (1ull << j); ++p)
            CHECK(walsh_eval(0, DyadicRational(p, j)) == 1);
    CHECK(walsh_eval(1, DyadicRational(3, 2)) == -1);
    CHECK(walsh_eval(5, DyadicRational(3, 3)) == walsh_bruteforce(5, 3, 3));
    for (std::uint64_t n = 0; n < 64; ++n)
        for (std::uint64_t p = 0; p < 64; ++p)
            CHECK(walsh_eval(n, DyadicRational(p, 6)) == walsh_bruteforce(n, p, 6));
}

TEST_CASE("walsh multiplicativity over xor") {
    test_rng rng(11);
    for (int trial = 0; trial < 400; ++trial) {
        unsigned j = 1 + static_cast<unsigned>(rng.next_u64() % 10);
        std::uint64_t n = rng.next_u64() % 1024;
        std::uint64_t px = rng.next_u64() % (1ull << j);
        std::uint64_t py = rng.next_u64() % (1ull << j);
        DyadicRational x(px, j), y(py, j);
        CHECK(walsh_eval(n, dyadic_xor(x, y)) == walsh_eval(n, x) * walsh_eval(n, y));
    }
}

TEST_CASE("walsh symmetry w_n(l/2^j) = w_l(n/2^j)") {
    for (unsigned j = 1; j <= 6; ++j)
        for (std::uint64_t n = 0; n < (1ull << j); ++n)
            for (std::uint64_t l = 0; l < (1ull << j); ++l)
                CHECK(walsh_eval(n, DyadicRational(l, j)) ==
                      walsh_eval(l, DyadicRational(n, j)));
}

TEST_CASE("walsh scale shift w_n(x/2^j) = w_{floor(n/2^j)}(x)") {
    for (unsigned j = 0; j <= 4; ++j)
        for (std::uint64_t n = 0; n < 256; ++n)
            for (unsigned jx = 1; jx <= 4; ++jx)
                for (std::uint64_t p = 0; p < (1ull << jx); ++p) {
                    DyadicRational x(p, jx);
                    DyadicRational xs(p, jx + j);  // x / 2^j
                    CHECK(walsh_eval(n, xs) == walsh_eval(n >> j, x));
                }
}

TEST_CASE("sign-change count equals sequency") {
    for (unsigned r = 1; r <= 6; ++r) {
        std::size_t len = std::size_t(1) << r;
        for (std::uint64_t n = 0; n < len; ++n) {
            std::vector<int> row(len);
            for (std::uint64_t k = 0; k < len; ++k)
                row[k] = walsh_eval(n, DyadicRational(k, r));
            CHECK(sign_changes(row) == static_cast<int>(n));
        }
    }
}

TEST_CASE("fwht_sequency trivial vectors") {
    std::vector<double> ones(8, 1.0);
    fwht_sequency(ones);
    CHECK(ones[0] == doctest::Approx(8.0));
    for (int i = 1; i < 8; ++i) CHECK(ones[i] == doctest::Approx(0.0));

    std::vector<double> delta(8, 0.0);
    delta[0] = 1.0;
    fwht_sequency(delta);
    for (int i = 0; i < 8; ++i) CHECK(delta[i] == doctest::Approx(1.0));
}

TEST_CASE("fwht_sequency matches dense sequency Hadamard matrix") {
    test_rng rng(22);
    for (unsigned r : {3u, 4u, 5u, 6u}) {
        std::size_t len = std::size_t(1) << r;
        std::vector<double> v(len);
        for (auto& x : v) x = rng.normal();
        auto got = fwht_sequency_copy(v);
        for (std::uint64_t n = 0; n < len; ++n) {
            double acc = 0;
            for (std::uint64_t k = 0; k < len; ++k)
                acc += walsh_eval(n, DyadicRational(k, r)) * v[k];
            CHECK(got[n] == doctest::Approx(acc).epsilon(1e-12));
        }
    }
}

TEST_CASE("fwht involution up to scaling") {
    test_rng rng(33);
    for (unsigned r = 3; r <= 12; ++r) {
        std::size_t len = std::size_t(1) << r;
        std::vector<double> v(len);
        for (auto& x : v) x = rng.normal();
        auto w = v;
        fwht_sequency(w);
        fwht_sequency(w);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < len; ++i) {
            num += sq(w[i] - static_cast<double>(len) * v[i]);
            den += sq(static_cast<double>(len) * v[i]);
        }
        CHECK(std::sqrt(num / den) <= 1e-13);
    }
}

TEST_CASE("ordering conversion") {
    test_rng rng(44);
    std::vector<double> v(16);
    for (auto& x : v) x = rng.normal();

    auto same = ordering_convert(v, WalshOrdering::Natural, WalshOrdering::Natural);
    CHECK(same == v);

    // round trip is the identity
    auto there = ordering_convert(v, WalshOrdering::Sequency, WalshOrdering::Natural);
    auto back = ordering_convert(there, WalshOrdering::Natural, WalshOrdering::Sequency);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == doctest::Approx(v[i]));

    // fwht_sequency == convert(fwht_natural)
    auto nat = v;
    fwht_natural(nat);
    auto seq = fwht_sequency_copy(v);
    auto conv = ordering_convert(nat, WalshOrdering::Natural, WalshOrdering::Sequency);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(seq[i] == doctest::Approx(conv[i]));

    CHECK_THROWS(fwht_sequency(std::span<double>(v.data(), 12)));
}

TEST_CASE("walsh_sign_row matches walsh_eval") {
    for (unsigned j : {3u, 5u}) {
        std::size_t len = std::size_t(1) << j;
        std::vector<double> sign(len);
        for (std::uint64_t p = 0; p < len; ++p) {
            walsh_sign_row(p, j, sign);
            for (std::uint64_t r = 0; r < len; ++r)
                CHECK(sign[r] == walsh_eval(r, DyadicRational(p, j)));
        }
    }
}

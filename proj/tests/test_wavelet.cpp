#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "cww/wavelet.hpp"
#include "test_util.hpp"

using namespace cww;

namespace {

const double kSqrt2 = std::sqrt(2.0);

std::vector<double> filter_dft_magnitude(const std::vector<double>& h, int ngrid = 64) {
    std::vector<double> mag(ngrid);
    for (int i = 0; i < ngrid; ++i) {
        double w = 2.0 * M_PI * i / ngrid;
        std::complex<double> acc = 0;
        for (std::size_t k = 0; k < h.size(); ++k)
            acc += h[k] * std::polar(1.0, -w * static_cast<double>(k));
        mag[i] = std::abs(acc);
    }
    return mag;
}

// trapezoid integral of the product of two sampled functions over the overlap
double overlap_integral(const ScalingSamples& a, const ScalingSamples& b) {
    int R = a.resolution;
    REQUIRE(b.resolution == R);
    long long lo = std::min(a.support_left, b.support_left);
    long long hi = std::max(a.support_right, b.support_right);
    long long n = (hi - lo) << R;
    double h = std::ldexp(1.0, -R);
    double acc = 0;
    for (long long i = 0; i <= n; ++i) {
        long long k = (lo << R) + i;
        double v = a.at(k) * b.at(k);
        acc += (i == 0 || i == n) ? 0.5 * v : v;
    }
    return acc * h;
}

}  // namespace

TEST_CASE("spec validation") {
    CHECK_THROWS(WaveletSpec{Family::Daubechies, 7, Boundary::Vmp}.validate());
    CHECK_THROWS(WaveletSpec{Family::Daubechies, 1, Boundary::Vmp}.validate());
    CHECK_NOTHROW(WaveletSpec{Family::Daubechies, 1, Boundary::Periodic}.validate());
    CHECK(parse_wavelet_name("db4", Boundary::Vmp).nu == 4);
    CHECK(parse_wavelet_name("sym6", Boundary::Vmp).family == Family::Symlet);
    CHECK(parse_wavelet_name("haar", Boundary::Periodic).nu == 1);
    CHECK_THROWS(parse_wavelet_name("coif3", Boundary::Vmp));
    CHECK(WaveletSpec{Family::Daubechies, 2, Boundary::Vmp}.min_level() == 2);
    CHECK(WaveletSpec{Family::Daubechies, 6, Boundary::Vmp}.min_level() == 4);
}

TEST_CASE("filter data invariants") {
    auto db2 = load_filters(Family::Daubechies, 2);
    REQUIRE(db2.h.size() == 4);
    double s = 0;
    for (double x : db2.h) s += x;
    CHECK(s == doctest::Approx(kSqrt2).epsilon(1e-14));

    auto db3 = load_filters(Family::Daubechies, 3);
    double e = 0;
    for (double x : db3.h) e += x * x;
    CHECK(e == doctest::Approx(1.0).epsilon(1e-14));

    auto sym4 = load_filters(Family::Symlet, 4);
    auto db4 = load_filters(Family::Daubechies, 4);
    bool palindromic = true;
    for (std::size_t i = 0; i < sym4.h.size(); ++i)
        if (std::abs(sym4.h[i] - sym4.h[sym4.h.size() - 1 - i]) > 1e-12) palindromic = false;
    CHECK_FALSE(palindromic);
    auto m1 = filter_dft_magnitude(sym4.h);
    auto m2 = filter_dft_magnitude(db4.h);
    for (std::size_t i = 0; i < m1.size(); ++i)
        CHECK(m1[i] == doctest::Approx(m2[i]).epsilon(1e-11));
    double d = 0;
    for (std::size_t i = 0; i < sym4.h.size(); ++i) d = std::max(d, std::abs(sym4.h[i] - db4.h[i]));
    CHECK(d > 0.1);  // same magnitude response, genuinely different filter
}

TEST_CASE("load_filters error paths") {
    CHECK_THROWS_AS(load_filters(Family::Daubechies, 4, "/nonexistent-dir"), CwwError);
}

TEST_CASE("cascade: Haar indicator") {
    auto haar = load_filters(Family::Daubechies, 1);
    auto s = cascade(haar, ScalingKind::Interior, 0, 5);
    CHECK(s.support_left == 0);
    CHECK(s.support_right == 1);
    for (std::size_t i = 0; i + 1 < s.values.size(); ++i) CHECK(s.values[i] == doctest::Approx(1.0));
    CHECK(s.values.back() == doctest::Approx(0.0));
}

TEST_CASE("cascade: partition of unity at integers and unit mass") {
    for (int nu : {2, 3, 4, 5, 6}) {
        auto f = load_filters(Family::Daubechies, nu);
        double s = 0;
        for (double v : f.phi_int) s += v;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-13));

        auto samples = cascade(f, ScalingKind::Interior, 0, 8);
        double mass = 0, h = std::ldexp(1.0, -8);
        for (std::size_t i = 0; i < samples.values.size(); ++i) {
            double w = (i == 0 || i + 1 == samples.values.size()) ? 0.5 : 1.0;
            mass += w * samples.values[i];
        }
        CHECK(mass * h == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("cascade: DB2 translates nearly orthogonal under quadrature") {
    // trapezoid on the cascade grid converges at ~4^-R for these products;
    // R=15 is the first level where 1e-8 is actually attainable
    auto f = load_filters(Family::Daubechies, 2);
    auto a = cascade(f, ScalingKind::Interior, 0, 15);
    ScalingSamples b = a;
    b.support_left += 1;
    b.support_right += 1;  // phi(x-1)
    CHECK(std::abs(overlap_integral(a, b)) <= 1e-8);
    CHECK(overlap_integral(a, a) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("cascade: refinement nesting is exact") {
    for (auto kind : {ScalingKind::Interior, ScalingKind::Left, ScalingKind::Right}) {
        auto f = load_filters(Family::Symlet, 3);
        auto fine = cascade(f, kind, 1, 6);
        auto coarse = cascade(f, kind, 1, 5);
        for (std::size_t i = 0; i < coarse.values.size(); ++i)
            CHECK(fine.values[2 * i] == doctest::Approx(coarse.values[i]).epsilon(1e-15));
    }
}

TEST_CASE("cascade: boundary orthonormality via quadrature") {
    for (int nu : {2, 3, 4}) {
        auto f = load_filters(Family::Daubechies, nu);
        int R = 12;
        std::vector<ScalingSamples> lefts;
        for (int m = 0; m < nu; ++m) lefts.push_back(cascade(f, ScalingKind::Left, m, R));
        for (int m1 = 0; m1 < nu; ++m1)
            for (int m2 = 0; m2 <= m1; ++m2) {
                double gram = overlap_integral(lefts[m1], lefts[m2]);
                CHECK(gram == doctest::Approx(m1 == m2 ? 1.0 : 0.0).epsilon(2e-6).scale(1.0));
            }
        // left edge functions are orthogonal to the kept interior translates
        auto interior = cascade(f, ScalingKind::Interior, 0, R);
        for (int m = 0; m < nu; ++m)
            for (int t = nu; t <= nu + 1; ++t) {
                ScalingSamples shifted = interior;
                shifted.support_left += t;
                shifted.support_right += t;
                CHECK(std::abs(overlap_integral(lefts[m], shifted)) <= 2e-6);
            }
    }
}

TEST_CASE("dwt: forward-inverse identity") {
    test_rng rng(7);
    for (auto boundary : {Boundary::Periodic, Boundary::Vmp}) {
        for (int nu : {2, 4, 6}) {
            auto f = load_filters(Family::Daubechies, nu);
            WaveletSpec spec{Family::Daubechies, nu, boundary};
            unsigned j = static_cast<unsigned>(spec.min_level() + 2);
            std::vector<double> v(std::size_t(1) << j);
            for (auto& x : v) x = rng.normal();
            auto w = dwt_apply_copy(f, boundary, j, v, DwtDirection::Forward);
            dwt_apply(f, boundary, j, w, DwtDirection::Inverse);
            CHECK(max_abs_diff(v, w) <= 1e-12);
        }
    }
}

TEST_CASE("dwt: norm conservation") {
    test_rng rng(8);
    for (auto boundary : {Boundary::Periodic, Boundary::Vmp}) {
        for (int nu : {2, 3, 5}) {
            auto f = load_filters(Family::Symlet, nu);
            WaveletSpec spec{Family::Symlet, nu, boundary};
            unsigned j = static_cast<unsigned>(spec.min_level() + 3);
            std::vector<double> v(std::size_t(1) << j);
            for (auto& x : v) x = rng.normal();
            double n0 = norm2(v);
            dwt_apply(f, boundary, j, v, DwtDirection::Forward);
            double tol = boundary == Boundary::Periodic ? 1e-12 : 1e-10;
            CHECK(std::abs(norm2(v) - n0) / n0 <= tol);
        }
    }
}

TEST_CASE("dwt: Haar coarse coefficient of a constant") {
    auto haar = load_filters(Family::Daubechies, 1);
    std::vector<double> v(8, 1.0);
    dwt_apply(haar, Boundary::Periodic, 3, v, DwtDirection::Forward, 0);
    CHECK(v[0] == doctest::Approx(std::sqrt(8.0)));
    for (int i = 1; i < 8; ++i) CHECK(v[i] == doctest::Approx(0.0));
}

TEST_CASE("dwt: below minimum level throws") {
    auto f = load_filters(Family::Daubechies, 3);
    std::vector<double> v(4, 1.0);
    CHECK_THROWS_AS(dwt_apply(f, Boundary::Vmp, 2, v, DwtDirection::Forward), CwwError);
}

TEST_CASE("dwt: periodic single-level circular-shift consistency") {
    // shifting the input by 2 (one coarse slot) circularly permutes the
    // single-level coefficients by one slot in each half
    auto f = load_filters(Family::Daubechies, 3);
    test_rng rng(55);
    unsigned j = 5;
    std::size_t n = std::size_t(1) << j;
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    std::vector<double> shifted(n);
    for (std::size_t i = 0; i < n; ++i) shifted[(i + 2) % n] = v[i];

    auto wv = dwt_apply_copy(f, Boundary::Periodic, j, v, DwtDirection::Forward,
                             static_cast<int>(j) - 1);
    auto ws = dwt_apply_copy(f, Boundary::Periodic, j, shifted, DwtDirection::Forward,
                             static_cast<int>(j) - 1);
    std::size_t half = n / 2;
    for (std::size_t m = 0; m < half; ++m) {
        CHECK(ws[(m + 1) % half] == doctest::Approx(wv[m]).epsilon(1e-12));
        CHECK(ws[half + (m + 1) % half] == doctest::Approx(wv[half + m]).epsilon(1e-12));
    }
}

TEST_CASE("dwt: VMP annihilates the linear function's coefficients") {
    // input = exact scaling coefficients of f(x) = x (computed by quadrature
    // from cascade samples); every detail band must vanish
    auto f = load_filters(Family::Daubechies, 2);
    unsigned j = 5;
    int Rg = 21;  // coefficient quadrature error ~4^-(Rg-j) must sit below 1e-10
    std::size_t M = std::size_t(1) << j;
    std::size_t G = std::size_t(1) << Rg;
    BasisGridEvaluator ev(f, Boundary::Vmp, j, Rg);
    std::vector<double> coeffs(M), basis(G + 1);
    double h = std::ldexp(1.0, -Rg);
    for (std::size_t m = 0; m < M; ++m) {
        ev.eval(m, basis);
        double acc = 0;
        for (std::size_t p = 0; p <= G; ++p) {
            double x = static_cast<double>(p) * h;
            double w = (p == 0 || p == G) ? 0.5 : 1.0;
            acc += w * x * basis[p];
        }
        coeffs[m] = acc * h;
    }
    dwt_apply(f, Boundary::Vmp, j, coeffs, DwtDirection::Forward);
    WaveletSpec spec{Family::Daubechies, 2, Boundary::Vmp};
    std::size_t coarse = std::size_t(1) << spec.min_level();
    for (std::size_t i = coarse; i < M; ++i) CHECK(std::abs(coeffs[i]) <= 1e-10);
}

TEST_CASE("dwt 2d: identity round trip") {
    auto f = load_filters(Family::Daubechies, 2);
    test_rng rng(66);
    unsigned j = 4;
    std::size_t n = std::size_t(1) << j;
    std::vector<double> v(n * n);
    for (auto& x : v) x = rng.normal();
    auto w = v;
    dwt_apply_2d(f, Boundary::Vmp, j, w, DwtDirection::Forward);
    dwt_apply_2d(f, Boundary::Vmp, j, w, DwtDirection::Inverse);
    CHECK(max_abs_diff(v, w) <= 1e-11);
}

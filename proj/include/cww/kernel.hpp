#pragma once

#include <string>
#include <vector>

#include "cww/wavelet.hpp"

namespace cww {

/// Precomputed continuous Walsh transforms of the scaling functions:
/// interior  kappa_l(s)      = int_0^1 phi(x+l)          w_s(x) dx, l = -nu+1..nu-1,
/// left      kappaL_{m,l}(s) = int_0^1 phi_m^left(x+l)   w_s(x) dx, l = 0..nu-1+m,
/// right     kappaR_{m,t}(s) = int_0^1 phi_m^right(x+l') w_s(x) dx, l' = t-(nu+m),
/// each for s = 0..2^q-1.  Periodic-mode tables hold the interior array only;
/// the edge formulas re-index it.
struct KernelTable {
    Family family = Family::Daubechies;
    int nu = 2;
    Boundary boundary = Boundary::Vmp;
    int q = 1;
    int R = 14;  // cascade/quadrature resolution

    std::vector<double> interior;  // (2nu-1) x 2^q, row index l+nu-1
    std::vector<double> left;      // nu x (2nu-1) x 2^q (VMP only)
    std::vector<double> right;     // nu x (2nu-1) x 2^q (VMP only)

    std::size_t S() const { return std::size_t(1) << q; }
    const double* interior_row(int l) const {
        return interior.data() + static_cast<std::size_t>(l + nu - 1) * S();
    }
    const double* left_row(int m, int l) const {
        return left.data() + (static_cast<std::size_t>(m) * static_cast<std::size_t>(2 * nu - 1) +
                              static_cast<std::size_t>(l)) * S();
    }
    const double* right_row(int m, int t) const {
        return right.data() + (static_cast<std::size_t>(m) * static_cast<std::size_t>(2 * nu - 1) +
                               static_cast<std::size_t>(t)) * S();
    }
};

inline constexpr int kDefaultKernelResolution = 14;

/// Trapezoid masses of `s` over [x0, x0+1) split into 2^q cells.
std::vector<double> cell_masses(const ScalingSamples& s, long long x0, int q);

KernelTable compute_kernel_table(const FilterSet& f, Boundary boundary, int q,
                                 int R = kDefaultKernelResolution);

void save_kernel_table(const KernelTable& t, const std::string& path);
KernelTable load_kernel_table(const std::string& path);

std::string kernel_cache_filename(const WaveletSpec& spec, int q, int R);

/// Loads a cached table if present and valid, otherwise computes it and (when
/// cache_dir is non-empty) writes it back.  Stale or corrupt caches are
/// recomputed with a note on stderr.
KernelTable get_kernel_table(const FilterSet& f, const WaveletSpec& spec, int q,
                             int R = kDefaultKernelResolution,
                             const std::string& cache_dir = "");

/// Cache directory resolution: explicit flag value, else CWW_CACHE_DIR, else "".
std::string resolve_cache_dir(const std::string& flag_value);

}  // namespace cww

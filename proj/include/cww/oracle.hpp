#pragma once

#include <vector>

#include "cww/fastop.hpp"
#include "cww/kernel.hpp"

namespace cww {

/// Densely assembled N x M section of the change-of-basis matrix.
struct DenseCob {
    std::size_t rows = 0, cols = 0;  // N, M
    std::vector<double> a;           // row-major
    WaveletSpec spec;
    unsigned j = 0, q = 0;

    double at(std::size_t n, std::size_t m) const { return a[n * cols + m]; }
};

enum class DenseMethod {
    Lemma,       // kernel table + pointwise Walsh evaluations
    Quadrature,  // cascade-sampled basis integrated cell by cell (independent)
};

inline constexpr std::size_t kDenseEntryGuard = std::size_t(1) << 26;

DenseCob build_dense(const FilterSet& f, const WaveletSpec& spec, unsigned j, unsigned q,
                     DenseMethod method, int R = kDefaultKernelResolution);

/// Columns of the fast operator applied to unit vectors (1D).
DenseCob dense_from_fastop(const FastOp& op);

struct AngleReport {
    double mu = 0;         // 1 / sigma_min, infinity() when degenerate
    double sigma_max = 0;
    double sigma_min = 0;
    double cond = 0;       // condition number of the normal equations
};

AngleReport subspace_angle(const DenseCob& dense);

struct SsrRow {
    unsigned j = 0;
    int q = -1;  // smallest q with mu <= gamma, -1 if the size guard was hit
    double mu = 0;
};

std::vector<SsrRow> stable_sampling_probe(const FilterSet& f, WaveletSpec spec,
                                          const std::vector<unsigned>& js, double gamma,
                                          int q_max = 8, int R = kDefaultKernelResolution);

/// mu values for one wavelet across q = 1..q_max at fixed j (Table-1 layout).
std::vector<double> mu_row(const FilterSet& f, WaveletSpec spec, unsigned j, int q_max,
                           int R = kDefaultKernelResolution);

}  // namespace cww

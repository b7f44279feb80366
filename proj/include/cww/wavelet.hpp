#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cww {

struct CwwError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Family { Daubechies, Symlet };
enum class Boundary { Periodic, Vmp };

struct WaveletSpec {
    Family family = Family::Daubechies;
    int nu = 2;
    Boundary boundary = Boundary::Vmp;

    /// Coarsest admissible scale: ceil(log2(2 nu)) for nu >= 2, 0 for Haar.
    int min_level() const;
    std::string name() const;           // "db4", "sym6", ...
    std::string boundary_name() const;  // "periodic" | "vmp"
    void validate() const;              // throws CwwError on bad combinations
};

/// Parses "db2".."db6" / "sym2".."sym6" (also "haar" as db1).
WaveletSpec parse_wavelet_name(const std::string& name, Boundary boundary);

struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;
    double operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
    double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
};

/// Boundary refinement data for one edge, in left-edge coordinates.
/// phi_m^edge = sum_i E(m,i) phi(. -(-nu+1+i)) restricted to the half line;
/// phi_m^edge(x) = sqrt2 [ sum_k A(m,k) phi_k^edge(2x) + sum_li B(m,li) phi(2x-(nu+li)) ],
/// and Aw/Bw likewise for the edge wavelets.
struct EdgeFilters {
    Matrix E, A, B, Aw, Bw;
};

/// Interior filters plus both boundary blocks for one wavelet family/order.
/// The right edge is stored as the left-edge construction of the reversed
/// filter; the functions on [0,1] are its reflections.
struct FilterSet {
    Family family = Family::Daubechies;
    int nu = 1;
    std::vector<double> h;        // hbar_u, u = -nu+1..nu
    std::vector<double> g;        // gbar_u = (-1)^u hbar_{1-u}
    std::vector<double> phi_int;  // phi(k), k = -nu+1..nu
    EdgeFilters left, right;

    double hbar(int u) const { return h[u + nu - 1]; }
    double gbar(int u) const { return g[u + nu - 1]; }
    double phi_at_int(long long k) const {
        return (k <= -nu || k >= nu) ? 0.0 : phi_int[k + nu - 1];
    }
};

/// Directory holding the shipped .cwwf files; CWW_DATA_DIR overrides the
/// compiled-in default.
std::string default_data_dir();

FilterSet load_filters(Family family, int nu, const std::string& data_dir = "");
inline FilterSet load_filters(const WaveletSpec& spec, const std::string& data_dir = "") {
    spec.validate();
    return load_filters(spec.family, spec.nu, data_dir);
}

enum class ScalingKind { Interior, Left, Right };

/// Scaling-function values on the dyadic grid of spacing 2^-R over the
/// function's support [support_left, support_right].
struct ScalingSamples {
    std::vector<double> values;  // (support_right-support_left)*2^R + 1 entries
    int resolution = 0;
    int support_left = 0;
    int support_right = 0;

    double at(long long grid_index) const {  // index relative to x=0
        long long i = grid_index - (static_cast<long long>(support_left) << resolution);
        if (i < 0 || i >= static_cast<long long>(values.size())) return 0.0;
        return values[static_cast<std::size_t>(i)];
    }
};

/// Cascade evaluation of the interior or an edge scaling function.
/// m is the edge index (< nu) and is ignored for Interior.
ScalingSamples cascade(const FilterSet& f, ScalingKind kind, int m, int R);

/// Point evaluation of the interval basis functions phi^rep_{j,m} on the
/// dyadic grid p/2^Rg, p = 0..2^Rg (inclusive), from cascade samples.
class BasisGridEvaluator {
public:
    BasisGridEvaluator(const FilterSet& f, Boundary boundary, unsigned j, int Rg);
    /// vals must have 2^Rg + 1 entries.
    void eval(std::size_t m, std::span<double> vals) const;
    int grid_resolution() const { return Rg_; }

private:
    const FilterSet& f_;
    Boundary boundary_;
    unsigned j_;
    int Rg_;
    ScalingSamples interior_;
    std::vector<ScalingSamples> left_, right_;
};

enum class DwtDirection { Forward, Inverse };

/// Multi-level orthogonal DWT on [0,1] with the chosen boundary handling,
/// decomposing from scale j down to min_level (default: spec's J0).
/// data.size() must be 2^j.  Layout: [coarse(J0) | detail(J0) | ... | detail(j-1)].
void dwt_apply(const FilterSet& f, Boundary boundary, unsigned j,
               std::span<double> data, DwtDirection dir, int min_level = -1);

std::vector<double> dwt_apply_copy(const FilterSet& f, Boundary boundary, unsigned j,
                                   std::span<const double> data, DwtDirection dir,
                                   int min_level = -1);

/// Separable 2D version on a row-major 2^j x 2^j array.
void dwt_apply_2d(const FilterSet& f, Boundary boundary, unsigned j,
                  std::span<double> data, DwtDirection dir, int min_level = -1);

}  // namespace cww

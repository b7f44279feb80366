#include "cww/wavelet.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>

#include "cww/crc32.hpp"

#ifndef CWW_DEFAULT_DATA_DIR
#define CWW_DEFAULT_DATA_DIR "data"
#endif

namespace cww {

int WaveletSpec::min_level() const {
    if (nu == 1) return 0;
    int j = 0;
    while ((1 << j) < 2 * nu) ++j;
    return j;
}

std::string WaveletSpec::name() const {
    return (family == Family::Daubechies ? "db" : "sym") + std::to_string(nu);
}

std::string WaveletSpec::boundary_name() const {
    return boundary == Boundary::Periodic ? "periodic" : "vmp";
}

void WaveletSpec::validate() const {
    if (nu < 1 || nu > 6)
        throw CwwError("unsupported vanishing moments: " + std::to_string(nu) +
                       " (supported: 1..6)");
    if (nu == 1 && boundary == Boundary::Vmp)
        throw CwwError("vmp boundary requires nu >= 2 (Haar has no boundary functions)");
    if (nu == 1 && family == Family::Symlet)
        throw CwwError("sym1 is identical to Haar; use db1");
}

WaveletSpec parse_wavelet_name(const std::string& name, Boundary boundary) {
    WaveletSpec spec;
    spec.boundary = boundary;
    if (name == "haar" || name == "db1") {
        spec.family = Family::Daubechies;
        spec.nu = 1;
    } else if (name.rfind("db", 0) == 0) {
        spec.family = Family::Daubechies;
        spec.nu = std::atoi(name.c_str() + 2);
    } else if (name.rfind("sym", 0) == 0) {
        spec.family = Family::Symlet;
        spec.nu = std::atoi(name.c_str() + 3);
    } else {
        throw CwwError("unknown wavelet name: " + name);
    }
    spec.validate();
    return spec;
}

std::string default_data_dir() {
    if (const char* env = std::getenv("CWW_DATA_DIR"); env && *env) return env;
    return CWW_DEFAULT_DATA_DIR;
}

namespace {

struct Reader {
    std::vector<unsigned char> bytes;
    std::size_t pos = 0;
    std::string path;

    explicit Reader(const std::string& p) : path(p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw CwwError("cannot open filter data file: " + p);
        bytes.assign(std::istreambuf_iterator<char>(in), {});
    }
    void need(std::size_t n) const {
        if (pos + n > bytes.size()) throw CwwError("truncated filter data file: " + path);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v;
        std::memcpy(&v, bytes.data() + pos, 4);
        pos += 4;
        return v;
    }
    double f64() {
        need(8);
        double v;
        std::memcpy(&v, bytes.data() + pos, 8);
        pos += 8;
        return v;
    }
    Matrix matrix() {
        Matrix m;
        m.rows = u32();
        m.cols = u32();
        m.a.resize(m.rows * m.cols);
        for (auto& x : m.a) x = f64();
        return m;
    }
};

FilterSet haar_filters() {
    FilterSet f;
    f.family = Family::Daubechies;
    f.nu = 1;
    double s = 1.0 / std::sqrt(2.0);
    f.h = {s, s};
    f.g = {s, -s};
    f.phi_int = {1.0, 0.0};  // phi(0), phi(1) with right-continuous convention
    return f;
}

void check_shape(const Matrix& m, std::size_t r, std::size_t c, const char* what,
                 const std::string& path) {
    if (m.rows != r || m.cols != c)
        throw CwwError(std::string("filter data shape mismatch for ") + what + " in " + path);
}

}  // namespace

FilterSet load_filters(Family family, int nu, const std::string& data_dir) {
    if (nu == 1) return haar_filters();
    WaveletSpec tag{family, nu, Boundary::Vmp};
    std::string dir = data_dir.empty() ? default_data_dir() : data_dir;
    std::string path = dir + "/" + tag.name() + ".cwwf";
    Reader rd(path);

    if (rd.bytes.size() < 20) throw CwwError("truncated filter data file: " + path);
    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, rd.bytes.data() + rd.bytes.size() - 4, 4);
    if (crc32(rd.bytes.data(), rd.bytes.size() - 4) != stored_crc)
        throw CwwError("checksum failure in filter data file: " + path);

    rd.need(4);
    if (std::memcmp(rd.bytes.data(), "CWWF", 4) != 0)
        throw CwwError("bad magic in filter data file: " + path);
    rd.pos = 4;
    std::uint32_t version = rd.u32();
    if (version != 1) throw CwwError("unsupported filter data version in " + path);
    std::uint32_t fam = rd.u32();
    std::uint32_t file_nu = rd.u32();
    if (fam != (family == Family::Daubechies ? 0u : 1u) ||
        file_nu != static_cast<std::uint32_t>(nu))
        throw CwwError("filter data header does not match requested wavelet: " + path);

    std::uint32_t nmat = rd.u32();
    if (nmat != 13) throw CwwError("unexpected matrix count in " + path);

    FilterSet f;
    f.family = family;
    f.nu = nu;
    std::size_t L = static_cast<std::size_t>(2 * nu);
    std::size_t W = L - 1;
    std::size_t NV = static_cast<std::size_t>(nu);

    Matrix h = rd.matrix();
    Matrix g = rd.matrix();
    Matrix pi = rd.matrix();
    check_shape(h, 1, L, "h", path);
    check_shape(g, 1, L, "g", path);
    check_shape(pi, 1, L, "phi_int", path);
    f.h = h.a;
    f.g = g.a;
    f.phi_int = pi.a;

    for (EdgeFilters* e : {&f.left, &f.right}) {
        e->E = rd.matrix();
        e->A = rd.matrix();
        e->B = rd.matrix();
        e->Aw = rd.matrix();
        e->Bw = rd.matrix();
        check_shape(e->E, NV, W, "E", path);
        check_shape(e->A, NV, NV, "A", path);
        check_shape(e->B, NV, W, "B", path);
        check_shape(e->Aw, NV, NV, "Aw", path);
        check_shape(e->Bw, NV, W, "Bw", path);
    }

    double sum = 0;
    for (double x : f.h) sum += x;
    if (std::abs(sum - std::sqrt(2.0)) > 1e-10)
        throw CwwError("corrupt filter data (lowpass sum != sqrt2): " + path);
    return f;
}

// ---------------------------------------------------------------------------
// Cascade
// ---------------------------------------------------------------------------

namespace {

// one refinement level for the interior function: values on [a,b] grid
std::vector<double> refine_interior(const std::vector<double>& prev, int r, int a, int b,
                                    const std::vector<double>& hb, int nu) {
    long long n = (static_cast<long long>(b - a) << r) + 1;
    std::vector<double> cur(static_cast<std::size_t>(n), 0.0);
    long long half = 1ll << (r - 1);
    long long prev_lo = static_cast<long long>(a) << (r - 1);
    long long prev_n = static_cast<long long>(prev.size());
    double s2 = std::sqrt(2.0);
    for (long long t = 0; t < n; ++t) {
        long long tpos = (static_cast<long long>(a) << r) + t;
        double acc = 0.0;
        for (int u = -nu + 1; u <= nu; ++u) {
            long long k = tpos - u * half;  // index on the (r-1) grid
            long long i = k - prev_lo;
            if (i >= 0 && i < prev_n) acc += hb[static_cast<std::size_t>(u + nu - 1)] * prev[static_cast<std::size_t>(i)];
        }
        cur[static_cast<std::size_t>(t)] = s2 * acc;
    }
    return cur;
}

// left-edge cascade in the construction's own coordinates (supp [0, nu+m])
std::vector<std::vector<double>> cascade_left_all(const std::vector<double>& hb,
                                                  const std::vector<double>& phi_int,
                                                  const EdgeFilters& e, int nu, int R) {
    // interior values at every level, support [-nu+1, nu]
    int a = -nu + 1, b = nu;
    std::vector<std::vector<double>> interior_levels(static_cast<std::size_t>(R) + 1);
    interior_levels[0] = phi_int;
    for (int r = 1; r <= R; ++r)
        interior_levels[static_cast<std::size_t>(r)] =
            refine_interior(interior_levels[static_cast<std::size_t>(r - 1)], r, a, b, hb, nu);

    auto interior_at = [&](int r, long long k) -> double {
        long long lo = static_cast<long long>(a) << r;
        long long i = k - lo;
        const auto& v = interior_levels[static_cast<std::size_t>(r)];
        if (i < 0 || i >= static_cast<long long>(v.size())) return 0.0;
        return v[static_cast<std::size_t>(i)];
    };

    // integer-grid boundary values from the translate representation
    std::vector<std::vector<double>> cur(static_cast<std::size_t>(nu));
    for (int m = 0; m < nu; ++m) {
        cur[static_cast<std::size_t>(m)].assign(static_cast<std::size_t>(nu + m) + 1, 0.0);
        for (long long k = 0; k <= nu + m; ++k) {
            double acc = 0.0;
            for (int i = 0; i < 2 * nu - 1; ++i) {
                long long nprime = -nu + 1 + i;
                long long arg = k - nprime;
                if (arg > -nu && arg < nu) acc += e.E(static_cast<std::size_t>(m), static_cast<std::size_t>(i)) *
                                                  phi_int[static_cast<std::size_t>(arg + nu - 1)];
            }
            cur[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)] = acc;
        }
    }

    double s2 = std::sqrt(2.0);
    for (int r = 1; r <= R; ++r) {
        std::vector<std::vector<double>> nxt(static_cast<std::size_t>(nu));
        for (int m = 0; m < nu; ++m) {
            long long n = (static_cast<long long>(nu + m) << r) + 1;
            nxt[static_cast<std::size_t>(m)].assign(static_cast<std::size_t>(n), 0.0);
            for (long long t = 0; t < n; ++t) {
                double acc = 0.0;
                // t at level r corresponds to argument 2x = t on the (r-1) grid
                for (int k = 0; k < nu; ++k) {
                    const auto& pk = cur[static_cast<std::size_t>(k)];
                    if (t < static_cast<long long>(pk.size()))
                        acc += e.A(static_cast<std::size_t>(m), static_cast<std::size_t>(k)) * pk[static_cast<std::size_t>(t)];
                }
                for (int li = 0; li <= 2 * m; ++li) {
                    long long l = nu + li;
                    acc += e.B(static_cast<std::size_t>(m), static_cast<std::size_t>(li)) *
                           interior_at(r - 1, t - (l << (r - 1)));
                }
                nxt[static_cast<std::size_t>(m)][static_cast<std::size_t>(t)] = s2 * acc;
            }
        }
        cur = std::move(nxt);
    }
    return cur;
}

}  // namespace

ScalingSamples cascade(const FilterSet& f, ScalingKind kind, int m, int R) {
    if (R < 1) throw CwwError("cascade resolution must be >= 1");
    ScalingSamples out;
    out.resolution = R;
    if (kind == ScalingKind::Interior) {
        out.support_left = -f.nu + 1;
        out.support_right = f.nu;
        std::vector<double> v = f.phi_int;
        for (int r = 1; r <= R; ++r) v = refine_interior(v, r, out.support_left, out.support_right, f.h, f.nu);
        out.values = std::move(v);
        return out;
    }
    if (f.nu < 2) throw CwwError("Haar has no boundary scaling functions");
    if (m < 0 || m >= f.nu) throw CwwError("edge index out of range");
    if (kind == ScalingKind::Left) {
        auto all = cascade_left_all(f.h, f.phi_int, f.left, f.nu, R);
        out.support_left = 0;
        out.support_right = f.nu + m;
        out.values = std::move(all[static_cast<std::size_t>(m)]);
        return out;
    }
    // right edge: reflect the left construction of the reversed filter
    std::vector<double> hrev(f.h.rbegin(), f.h.rend());
    std::vector<double> prev(f.phi_int.rbegin(), f.phi_int.rend());
    auto all = cascade_left_all(hrev, prev, f.right, f.nu, R);
    auto& v = all[static_cast<std::size_t>(m)];
    out.support_left = -(f.nu + m);
    out.support_right = 0;
    out.values.assign(v.rbegin(), v.rend());
    return out;
}

// ---------------------------------------------------------------------------
// Basis evaluation on dyadic grids
// ---------------------------------------------------------------------------

BasisGridEvaluator::BasisGridEvaluator(const FilterSet& f, Boundary boundary, unsigned j, int Rg)
    : f_(f), boundary_(boundary), j_(j), Rg_(Rg) {
    if (Rg_ <= static_cast<int>(j_)) throw CwwError("basis grid must be finer than 2^-j");
    int r = Rg_ - static_cast<int>(j_);
    interior_ = cascade(f_, ScalingKind::Interior, 0, r);
    if (boundary_ == Boundary::Vmp) {
        for (int m = 0; m < f_.nu; ++m) {
            left_.push_back(cascade(f_, ScalingKind::Left, m, r));
            right_.push_back(cascade(f_, ScalingKind::Right, m, r));
        }
    }
}

void BasisGridEvaluator::eval(std::size_t m, std::span<double> vals) const {
    std::size_t G = std::size_t(1) << Rg_;
    if (vals.size() != G + 1) throw CwwError("basis eval: bad output length");
    std::size_t M = std::size_t(1) << j_;
    if (m >= M) throw CwwError("basis eval: column out of range");
    long long step = 1ll << (Rg_ - static_cast<int>(j_));
    double scale = std::sqrt(static_cast<double>(M));
    std::size_t nv = static_cast<std::size_t>(f_.nu);

    auto fill_from = [&](const ScalingSamples& s, long long shift) {
        for (std::size_t p = 0; p <= G; ++p)
            vals[p] += scale * s.at(static_cast<long long>(p) - shift);
    };

    std::fill(vals.begin(), vals.end(), 0.0);
    bool interior_col = f_.nu == 1 || (m >= nv && m + nv < M);
    if (boundary_ == Boundary::Vmp && !interior_col && f_.nu >= 2) {
        if (m < nv) {
            fill_from(left_[m], 0);  // 2^{j/2} phi_m^left(2^j x)
        } else {
            fill_from(right_[M - 1 - m], static_cast<long long>(G));  // arg 2^j(x-1)
        }
        return;
    }
    if (boundary_ == Boundary::Periodic && !interior_col) {
        fill_from(interior_, static_cast<long long>(m) * step);
        long long wrap = m < nv ? static_cast<long long>(m + M) : static_cast<long long>(m) - static_cast<long long>(M);
        fill_from(interior_, wrap * step);
        return;
    }
    fill_from(interior_, static_cast<long long>(m) * step);
}

// ---------------------------------------------------------------------------
// DWT
// ---------------------------------------------------------------------------

namespace {

void level_forward_periodic(const FilterSet& f, std::span<double> x, std::size_t n,
                            std::vector<double>& scratch) {
    std::size_t half = n / 2;
    scratch.assign(n, 0.0);
    int nu = f.nu;
    for (std::size_t mm = 0; mm < half; ++mm) {
        double c = 0.0, d = 0.0;
        for (int u = -nu + 1; u <= nu; ++u) {
            std::size_t idx = static_cast<std::size_t>((static_cast<long long>(2 * mm) + u + 2 * static_cast<long long>(n)) % static_cast<long long>(n));
            c += f.hbar(u) * x[idx];
            d += f.gbar(u) * x[idx];
        }
        scratch[mm] = c;
        scratch[half + mm] = d;
    }
    std::copy(scratch.begin(), scratch.begin() + static_cast<long long>(n), x.begin());
}

void level_inverse_periodic(const FilterSet& f, std::span<double> x, std::size_t n,
                            std::vector<double>& scratch) {
    std::size_t half = n / 2;
    scratch.assign(n, 0.0);
    int nu = f.nu;
    for (std::size_t mm = 0; mm < half; ++mm) {
        double c = x[mm], d = x[half + mm];
        for (int u = -nu + 1; u <= nu; ++u) {
            std::size_t idx = static_cast<std::size_t>((static_cast<long long>(2 * mm) + u + 2 * static_cast<long long>(n)) % static_cast<long long>(n));
            scratch[idx] += f.hbar(u) * c + f.gbar(u) * d;
        }
    }
    std::copy(scratch.begin(), scratch.begin() + static_cast<long long>(n), x.begin());
}

// rows of the single-level VMP analysis map (fine n -> coarse n/2 || detail n/2)
void level_forward_vmp(const FilterSet& f, std::span<double> x, std::size_t n,
                       std::vector<double>& scratch) {
    std::size_t half = n / 2;
    int nu = f.nu;
    std::size_t NV = static_cast<std::size_t>(nu);
    scratch.assign(n, 0.0);

    auto edge_rows = [&](const EdgeFilters& e, bool rightedge, const Matrix& A, const Matrix& B,
                         std::size_t out_base) {
        (void)e;
        for (std::size_t m = 0; m < NV; ++m) {
            double acc = 0.0;
            for (std::size_t k = 0; k < NV; ++k) {
                std::size_t idx = rightedge ? n - 1 - k : k;
                acc += A(m, k) * x[idx];
            }
            for (int li = 0; li <= 2 * static_cast<int>(m); ++li) {
                std::size_t l = static_cast<std::size_t>(nu + li);
                std::size_t idx = rightedge ? n - 1 - l : l;
                acc += B(m, static_cast<std::size_t>(li)) * x[idx];
            }
            std::size_t row = rightedge ? half - 1 - m : m;
            scratch[out_base + row] = acc;
        }
    };

    edge_rows(f.left, false, f.left.A, f.left.B, 0);
    edge_rows(f.right, true, f.right.A, f.right.B, 0);
    edge_rows(f.left, false, f.left.Aw, f.left.Bw, half);
    edge_rows(f.right, true, f.right.Aw, f.right.Bw, half);

    for (std::size_t mm = NV; mm + NV < half; ++mm) {
        double c = 0.0, d = 0.0;
        for (int u = -nu + 1; u <= nu; ++u) {
            std::size_t idx = static_cast<std::size_t>(static_cast<long long>(2 * mm) + u);
            c += f.hbar(u) * x[idx];
            d += f.gbar(u) * x[idx];
        }
        scratch[mm] = c;
        scratch[half + mm] = d;
    }
    std::copy(scratch.begin(), scratch.begin() + static_cast<long long>(n), x.begin());
}

void level_inverse_vmp(const FilterSet& f, std::span<double> x, std::size_t n,
                       std::vector<double>& scratch) {
    std::size_t half = n / 2;
    int nu = f.nu;
    std::size_t NV = static_cast<std::size_t>(nu);
    scratch.assign(n, 0.0);

    auto edge_cols = [&](bool rightedge, const Matrix& A, const Matrix& B, std::size_t in_base) {
        for (std::size_t m = 0; m < NV; ++m) {
            std::size_t row = rightedge ? half - 1 - m : m;
            double c = x[in_base + row];
            for (std::size_t k = 0; k < NV; ++k) {
                std::size_t idx = rightedge ? n - 1 - k : k;
                scratch[idx] += A(m, k) * c;
            }
            for (int li = 0; li <= 2 * static_cast<int>(m); ++li) {
                std::size_t l = static_cast<std::size_t>(nu + li);
                std::size_t idx = rightedge ? n - 1 - l : l;
                scratch[idx] += B(m, static_cast<std::size_t>(li)) * c;
            }
        }
    };

    edge_cols(false, f.left.A, f.left.B, 0);
    edge_cols(true, f.right.A, f.right.B, 0);
    edge_cols(false, f.left.Aw, f.left.Bw, half);
    edge_cols(true, f.right.Aw, f.right.Bw, half);

    for (std::size_t mm = NV; mm + NV < half; ++mm) {
        double c = x[mm], d = x[half + mm];
        for (int u = -nu + 1; u <= nu; ++u) {
            std::size_t idx = static_cast<std::size_t>(static_cast<long long>(2 * mm) + u);
            scratch[idx] += f.hbar(u) * c + f.gbar(u) * d;
        }
    }
    std::copy(scratch.begin(), scratch.begin() + static_cast<long long>(n), x.begin());
}

}  // namespace

void dwt_apply(const FilterSet& f, Boundary boundary, unsigned j, std::span<double> data,
               DwtDirection dir, int min_level) {
    WaveletSpec tag{f.family, f.nu, boundary};
    int j0 = min_level < 0 ? tag.min_level() : min_level;
    if (static_cast<int>(j) < j0)
        throw CwwError("dwt: j below the coarsest admissible level");
    if (data.size() != (std::size_t(1) << j)) throw CwwError("dwt: bad input length");
    if (boundary == Boundary::Vmp && f.nu < 2) throw CwwError("dwt: vmp requires nu >= 2");

    std::vector<double> scratch;
    if (dir == DwtDirection::Forward) {
        for (unsigned lev = j; static_cast<int>(lev) > j0; --lev) {
            std::size_t n = std::size_t(1) << lev;
            if (boundary == Boundary::Periodic)
                level_forward_periodic(f, data, n, scratch);
            else
                level_forward_vmp(f, data, n, scratch);
        }
    } else {
        for (unsigned lev = static_cast<unsigned>(j0) + 1; lev <= j; ++lev) {
            std::size_t n = std::size_t(1) << lev;
            if (boundary == Boundary::Periodic)
                level_inverse_periodic(f, data, n, scratch);
            else
                level_inverse_vmp(f, data, n, scratch);
        }
    }
}

std::vector<double> dwt_apply_copy(const FilterSet& f, Boundary boundary, unsigned j,
                                   std::span<const double> data, DwtDirection dir,
                                   int min_level) {
    std::vector<double> out(data.begin(), data.end());
    dwt_apply(f, boundary, j, out, dir, min_level);
    return out;
}

void dwt_apply_2d(const FilterSet& f, Boundary boundary, unsigned j, std::span<double> data,
                  DwtDirection dir, int min_level) {
    std::size_t n = std::size_t(1) << j;
    if (data.size() != n * n) throw CwwError("dwt2d: bad input length");
    std::vector<double> col(n);
    for (std::size_t r = 0; r < n; ++r)
        dwt_apply(f, boundary, j, data.subspan(r * n, n), dir, min_level);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) col[r] = data[r * n + c];
        dwt_apply(f, boundary, j, col, dir, min_level);
        for (std::size_t r = 0; r < n; ++r) data[r * n + c] = col[r];
    }
}

}  // namespace cww

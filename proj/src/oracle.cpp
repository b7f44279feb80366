#include "cww/oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "cww/walsh.hpp"

namespace cww {

namespace {

struct DenseEdgeTerm {
    std::uint64_t p;
    const double* kappa;
    int col;
};

// the Prop.-4.1 edge decomposition shared by both boundary modes
std::vector<DenseEdgeTerm> dense_edge_terms(const KernelTable& kt, const WaveletSpec& spec,
                                            unsigned j) {
    std::vector<DenseEdgeTerm> out;
    int nu = spec.nu;
    std::uint64_t Mv = std::uint64_t(1) << j;
    if (spec.boundary == Boundary::Vmp) {
        for (int m = 0; m < nu; ++m)
            for (int l = 0; l <= nu - 1 + m; ++l)
                out.push_back({static_cast<std::uint64_t>(l), kt.left_row(m, l), m});
        for (int mbar = 0; mbar < nu; ++mbar) {
            int col = static_cast<int>(Mv) - 1 - mbar;
            for (int t = 0; t <= nu + mbar - 1; ++t) {
                long long lp = t - (nu + mbar);
                out.push_back({static_cast<std::uint64_t>(static_cast<long long>(Mv) + lp),
                               kt.right_row(mbar, t), col});
            }
        }
    } else {
        auto add = [&](int col) {
            for (int l = -nu + 1; l <= nu - 1; ++l) {
                long long pos = (static_cast<long long>(col) + l) % static_cast<long long>(Mv);
                if (pos < 0) pos += static_cast<long long>(Mv);
                out.push_back({static_cast<std::uint64_t>(pos), kt.interior_row(l), col});
            }
        };
        for (int m = 0; m < nu; ++m) add(m);
        for (int m = static_cast<int>(Mv) - nu; m < static_cast<int>(Mv); ++m) add(m);
    }
    return out;
}

DenseCob build_dense_lemma(const FilterSet& f, const WaveletSpec& spec, unsigned j, unsigned q,
                           int R) {
    KernelTable kt = compute_kernel_table(f, spec.boundary, static_cast<int>(q), R);
    std::size_t N = std::size_t(1) << (j + q), M = std::size_t(1) << j;
    DenseCob d;
    d.rows = N;
    d.cols = M;
    d.spec = spec;
    d.j = j;
    d.q = q;
    d.a.assign(N * M, 0.0);
    int nu = spec.nu;
    double scale = 1.0 / std::sqrt(static_cast<double>(M));

    for (std::size_t n = 0; n < N; ++n) {
        std::size_t s = n >> j;
        for (std::size_t m = static_cast<std::size_t>(nu); m + nu < M; ++m) {
            double acc = 0;
            for (int l = -nu + 1; l <= nu - 1; ++l) {
                std::uint64_t pos = static_cast<std::uint64_t>(static_cast<long long>(m) + l);
                acc += kt.interior_row(l)[s] * walsh_eval(n, DyadicRational(pos, j));
            }
            d.a[n * M + m] = scale * acc;
        }
    }
    for (const auto& t : dense_edge_terms(kt, spec, j)) {
        for (std::size_t n = 0; n < N; ++n) {
            std::size_t s = n >> j;
            d.a[n * M + static_cast<std::size_t>(t.col)] +=
                scale * t.kappa[s] * walsh_eval(n, DyadicRational(t.p, j));
        }
    }
    return d;
}

DenseCob build_dense_quadrature(const FilterSet& f, const WaveletSpec& spec, unsigned j,
                                unsigned q, int R) {
    std::size_t N = std::size_t(1) << (j + q), M = std::size_t(1) << j;
    DenseCob d;
    d.rows = N;
    d.cols = M;
    d.spec = spec;
    d.j = j;
    d.q = q;
    d.a.assign(N * M, 0.0);

    int Rg = static_cast<int>(j) + R;  // per-unit resolution R after dilation
    BasisGridEvaluator ev(f, spec.boundary, j, Rg);
    std::size_t G = std::size_t(1) << Rg;
    std::vector<double> basis(G + 1), mass(N);
    std::size_t per_cell = G / N;
    double h = std::ldexp(1.0, -Rg);
    unsigned nbits = j + q;

    for (std::size_t m = 0; m < M; ++m) {
        ev.eval(m, basis);
        for (std::size_t c = 0; c < N; ++c) {
            std::size_t start = c * per_cell;
            double acc = 0.5 * (basis[start] + basis[start + per_cell]);
            for (std::size_t i = 1; i < per_cell; ++i) acc += basis[start + i];
            mass[c] = acc * h;
        }
        for (std::size_t n = 0; n < N; ++n) {
            double acc = 0;
            for (std::size_t c = 0; c < N; ++c)
                acc += walsh_eval(n, DyadicRational(c, nbits)) * mass[c];
            d.a[n * M + m] = acc;
        }
    }
    return d;
}

}  // namespace

DenseCob build_dense(const FilterSet& f, const WaveletSpec& spec, unsigned j, unsigned q,
                     DenseMethod method, int R) {
    spec.validate();
    std::size_t N = std::size_t(1) << (j + q), M = std::size_t(1) << j;
    if (N * M > kDenseEntryGuard) throw CwwError("dense build exceeds the desk-scale guard");
    if (static_cast<int>(j) < spec.min_level())
        throw CwwError("dense build: j below the coarsest admissible level");
    return method == DenseMethod::Lemma ? build_dense_lemma(f, spec, j, q, R)
                                        : build_dense_quadrature(f, spec, j, q, R);
}

DenseCob dense_from_fastop(const FastOp& op) {
    std::size_t N = op.N(), M = op.M();
    if (op.dim() != 1) throw CwwError("dense_from_fastop: 1D operators only");
    DenseCob d;
    d.rows = N;
    d.cols = M;
    d.spec = op.spec();
    d.j = op.j();
    d.q = op.q();
    d.a.assign(N * M, 0.0);
    std::vector<double> e(M, 0.0), col(N);
    for (std::size_t m = 0; m < M; ++m) {
        e[m] = 1.0;
        op.forward_1d(e, col);
        e[m] = 0.0;
        for (std::size_t n = 0; n < N; ++n) d.a[n * M + m] = col[n];
    }
    return d;
}

AngleReport subspace_angle(const DenseCob& dense) {
    if (dense.rows < dense.cols) throw CwwError("subspace angle requires N >= M");
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
        dense.a.data(), static_cast<Eigen::Index>(dense.rows),
        static_cast<Eigen::Index>(dense.cols));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    AngleReport r;
    r.sigma_max = sv(0);
    r.sigma_min = sv(sv.size() - 1);
    if (r.sigma_min < 1e-12) {
        r.mu = std::numeric_limits<double>::infinity();
        r.cond = std::numeric_limits<double>::infinity();
    } else {
        r.mu = 1.0 / r.sigma_min;
        r.cond = (r.sigma_max / r.sigma_min) * (r.sigma_max / r.sigma_min);
    }
    return r;
}

std::vector<SsrRow> stable_sampling_probe(const FilterSet& f, WaveletSpec spec,
                                          const std::vector<unsigned>& js, double gamma,
                                          int q_max, int R) {
    if (gamma <= 1.0) throw CwwError("stable sampling rate requires gamma > 1");
    std::vector<SsrRow> out;
    for (unsigned j : js) {
        SsrRow row{j, -1, 0.0};
        for (int q = 1; q <= q_max; ++q) {
            std::size_t entries = (std::size_t(1) << (j + static_cast<unsigned>(q))) *
                                  (std::size_t(1) << j);
            if (entries > kDenseEntryGuard) break;
            auto rep = subspace_angle(
                build_dense(f, spec, j, static_cast<unsigned>(q), DenseMethod::Lemma, R));
            if (rep.mu <= gamma) {
                row.q = q;
                row.mu = rep.mu;
                break;
            }
        }
        out.push_back(row);
    }
    return out;
}

std::vector<double> mu_row(const FilterSet& f, WaveletSpec spec, unsigned j, int q_max, int R) {
    std::vector<double> out;
    for (int q = 1; q <= q_max; ++q)
        out.push_back(subspace_angle(
                          build_dense(f, spec, j, static_cast<unsigned>(q), DenseMethod::Lemma, R))
                          .mu);
    return out;
}

}  // namespace cww

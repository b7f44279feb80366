#include "cww/fastop.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "cww/walsh.hpp"

namespace cww {

SamplingMask SamplingMask::full(std::uint64_t n) {
    SamplingMask m;
    m.indices.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) m.indices[i] = i;
    return m;
}

void SamplingMask::validate(std::uint64_t n) const {
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= n) throw CwwError("sampling mask index out of range");
        if (i > 0 && indices[i] <= indices[i - 1])
            throw CwwError("sampling mask indices must be sorted and unique");
    }
}

FastOp::FastOp(std::shared_ptr<const FilterSet> filters, WaveletSpec spec, unsigned j,
               unsigned q, std::shared_ptr<const KernelTable> kernels, int dim)
    : spec_(spec), j_(j), q_(q), dim_(dim), filters_(std::move(filters)),
      kernels_(std::move(kernels)) {
    spec_.validate();
    if (spec_.nu < 2)
        throw CwwError("FastOp requires nu >= 2; use HaarFullRankOp for Haar");
    if (dim_ != 1 && dim_ != 2) throw CwwError("FastOp dim must be 1 or 2");
    if (static_cast<int>(j_) < spec_.min_level())
        throw CwwError("FastOp: j must be >= ceil(log2(2 nu))");
    if (q_ < 1) throw CwwError("FastOp: q must be >= 1");
    if (!filters_ || !kernels_) throw CwwError("FastOp: missing filters or kernels");
    if (filters_->nu != spec_.nu || filters_->family != spec_.family)
        throw CwwError("FastOp: filter set does not match spec");
    if (kernels_->nu != spec_.nu || kernels_->family != spec_.family ||
        kernels_->boundary != spec_.boundary)
        throw CwwError("FastOp: kernel table does not match spec");
    if (kernels_->q < static_cast<int>(q_))
        throw CwwError("FastOp: kernel table q too small");

    unsigned bits = j_ + q_;
    perm_.resize(std::size_t(1) << bits);
    for (std::size_t n = 0; n < perm_.size(); ++n)
        perm_[n] = static_cast<std::uint32_t>(sequency_to_natural_index(n, bits));
    build_edge_terms();
}

void FastOp::build_edge_terms() {
    int nu = spec_.nu;
    std::uint64_t Mv = M();
    std::vector<std::pair<std::uint64_t, EdgeTerm>> terms;

    auto add = [&](std::uint64_t p, const double* kappa, int col) {
        terms.push_back({p, EdgeTerm{p, kappa, col}});
    };

    if (spec_.boundary == Boundary::Vmp) {
        for (int m = 0; m < nu; ++m)
            for (int l = 0; l <= nu - 1 + m; ++l)
                add(static_cast<std::uint64_t>(l), kernels_->left_row(m, l), m);
        for (int mbar = 0; mbar < nu; ++mbar) {
            int col = static_cast<int>(Mv) - 1 - mbar;
            for (int t = 0; t <= nu + mbar - 1; ++t) {
                long long lp = t - (nu + mbar);  // l' in [-nu-mbar, -1]
                std::uint64_t p = static_cast<std::uint64_t>(static_cast<long long>(Mv) + lp);
                add(p, kernels_->right_row(mbar, t), col);
            }
        }
    } else {
        auto add_periodic = [&](int col) {
            for (int l = -nu + 1; l <= nu - 1; ++l) {
                long long pos = (static_cast<long long>(col) + l) % static_cast<long long>(Mv);
                if (pos < 0) pos += static_cast<long long>(Mv);
                add(static_cast<std::uint64_t>(pos), kernels_->interior_row(l), col);
            }
        };
        for (int m = 0; m < nu; ++m) add_periodic(m);
        for (int m = static_cast<int>(Mv) - nu; m < static_cast<int>(Mv); ++m) add_periodic(m);
    }

    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    edge_positions_.clear();
    edge_by_pos_.clear();
    for (auto& [p, t] : terms) {
        if (edge_positions_.empty() || edge_positions_.back() != p) {
            edge_positions_.push_back(p);
            edge_by_pos_.emplace_back();
        }
        edge_by_pos_.back().push_back(t);
    }
}

void FastOp::forward_1d(std::span<const double> xi, std::span<double> alpha) const {
    std::size_t Mv = M(), Nv = N();
    if (xi.size() != Mv || alpha.size() != Nv) throw CwwError("forward_1d: dimension mismatch");
    std::fill(alpha.begin(), alpha.end(), 0.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(Mv));
    const int nu = spec_.nu;
    const std::size_t S = std::size_t(1) << q_;

    std::vector<double> scratch(Nv);
    for (int l = -nu + 1; l <= nu - 1; ++l) {
        if (Mv < 2 * static_cast<std::size_t>(nu) + 1) break;  // no interior columns
        std::fill(scratch.begin(), scratch.end(), 0.0);
        for (std::size_t m = static_cast<std::size_t>(nu); m + nu < Mv; ++m)
            scratch[static_cast<std::size_t>((static_cast<long long>(m) + l)) << q_] = xi[m];
        fwht_natural(scratch);
        const double* kr = kernels_->interior_row(l);
        for (std::size_t n = 0; n < Nv; ++n)
            alpha[n] += scale * kr[n >> j_] * scratch[perm_[n]];
    }

    std::vector<double> sign(Mv), cval(S);
    for (std::size_t pi = 0; pi < edge_positions_.size(); ++pi) {
        std::fill(cval.begin(), cval.end(), 0.0);
        for (const EdgeTerm& t : edge_by_pos_[pi])
            for (std::size_t s = 0; s < S; ++s)
                cval[s] += xi[static_cast<std::size_t>(t.col)] * t.kappa[s];
        std::uint64_t p = edge_positions_[pi];
        walsh_sign_row(p, j_, sign);
        bool podd = p & 1;
        for (std::size_t s = 0; s < S; ++s) {
            double w = scale * cval[s];
            if (podd && (s & 1)) w = -w;
            if (w == 0.0) continue;
            double* blk = alpha.data() + s * Mv;
            for (std::size_t r = 0; r < Mv; ++r) blk[r] += w * sign[r];
        }
    }
}

void FastOp::adjoint_1d(std::span<const double> alpha, std::span<double> xi) const {
    std::size_t Mv = M(), Nv = N();
    if (xi.size() != Mv || alpha.size() != Nv) throw CwwError("adjoint_1d: dimension mismatch");
    std::fill(xi.begin(), xi.end(), 0.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(Mv));
    const int nu = spec_.nu;
    const std::size_t S = std::size_t(1) << q_;

    std::vector<double> scratch(Nv);
    for (int l = -nu + 1; l <= nu - 1; ++l) {
        if (Mv < 2 * static_cast<std::size_t>(nu) + 1) break;
        const double* kr = kernels_->interior_row(l);
        for (std::size_t n = 0; n < Nv; ++n) scratch[n] = scale * kr[n >> j_] * alpha[n];
        fwht_natural(scratch);
        for (std::size_t m = static_cast<std::size_t>(nu); m + nu < Mv; ++m)
            xi[m] += scratch[perm_[static_cast<std::size_t>(static_cast<long long>(m) + l) << q_]];
    }

    std::vector<double> sign(Mv), tp(S);
    for (std::size_t pi = 0; pi < edge_positions_.size(); ++pi) {
        std::uint64_t p = edge_positions_[pi];
        walsh_sign_row(p, j_, sign);
        bool podd = p & 1;
        for (std::size_t s = 0; s < S; ++s) {
            const double* blk = alpha.data() + s * Mv;
            double acc = 0.0;
            for (std::size_t r = 0; r < Mv; ++r) acc += blk[r] * sign[r];
            if (podd && (s & 1)) acc = -acc;
            tp[s] = scale * acc;
        }
        for (const EdgeTerm& t : edge_by_pos_[pi]) {
            double acc = 0.0;
            for (std::size_t s = 0; s < S; ++s) acc += t.kappa[s] * tp[s];
            xi[static_cast<std::size_t>(t.col)] += acc;
        }
    }
}

namespace {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += nt) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

void FastOp::forward_2d(std::span<const double> xi, std::span<double> alpha) const {
    std::size_t Mv = M(), Nv = N();
    if (xi.size() != Mv * Mv || alpha.size() != Nv * Nv)
        throw CwwError("forward_2d: dimension mismatch");
    std::vector<double> tmp(Mv * Nv);  // row r holds forward of input row r
    parallel_for(Mv, threads_, [&](std::size_t r) {
        forward_1d(xi.subspan(r * Mv, Mv), std::span<double>(tmp).subspan(r * Nv, Nv));
    });
    parallel_for(Nv, threads_, [&](std::size_t c) {
        std::vector<double> col(Mv), out(Nv);
        for (std::size_t r = 0; r < Mv; ++r) col[r] = tmp[r * Nv + c];
        forward_1d(col, out);
        for (std::size_t r = 0; r < Nv; ++r) alpha[r * Nv + c] = out[r];
    });
}

void FastOp::adjoint_2d(std::span<const double> alpha, std::span<double> xi) const {
    std::size_t Mv = M(), Nv = N();
    if (xi.size() != Mv * Mv || alpha.size() != Nv * Nv)
        throw CwwError("adjoint_2d: dimension mismatch");
    std::vector<double> tmp(Mv * Nv);  // column pass: tmp = G^T alpha  (M x N)
    parallel_for(Nv, threads_, [&](std::size_t c) {
        std::vector<double> col(Nv), out(Mv);
        for (std::size_t r = 0; r < Nv; ++r) col[r] = alpha[r * Nv + c];
        adjoint_1d(col, out);
        for (std::size_t r = 0; r < Mv; ++r) tmp[r * Nv + c] = out[r];
    });
    parallel_for(Mv, threads_, [&](std::size_t r) {
        adjoint_1d(std::span<const double>(tmp).subspan(r * Nv, Nv),
                   xi.subspan(r * Mv, Mv));
    });
}

// ---------------------------------------------------------------------------

ComposedOp::ComposedOp(std::shared_ptr<const FastOp> op, SamplingMask mask, bool use_idwt)
    : op_(std::move(op)), mask_(std::move(mask)), use_idwt_(use_idwt) {
    mask_.validate(op_->output_size());
    full_mask_ = mask_.indices.size() == op_->output_size();
}

std::size_t ComposedOp::rows() const {
    return full_mask_ ? op_->output_size() : mask_.size();
}

void ComposedOp::forward(std::span<const double> z, std::span<double> y) const {
    if (z.size() != cols() || y.size() != rows()) throw CwwError("composed forward: size");
    std::vector<double> x(z.begin(), z.end());
    if (use_idwt_) {
        if (op_->dim() == 1)
            dwt_apply(op_->filters(), op_->spec().boundary, op_->j(), x, DwtDirection::Inverse);
        else
            dwt_apply_2d(op_->filters(), op_->spec().boundary, op_->j(), x,
                         DwtDirection::Inverse);
    }
    if (full_mask_) {
        op_->forward(x, y);
        return;
    }
    std::vector<double> full(op_->output_size());
    op_->forward(x, full);
    for (std::size_t i = 0; i < mask_.indices.size(); ++i)
        y[i] = full[static_cast<std::size_t>(mask_.indices[i])];
}

void ComposedOp::adjoint(std::span<const double> y, std::span<double> z) const {
    if (z.size() != cols() || y.size() != rows()) throw CwwError("composed adjoint: size");
    std::vector<double> full;
    std::span<const double> input = y;
    if (!full_mask_) {
        full.assign(op_->output_size(), 0.0);
        for (std::size_t i = 0; i < mask_.indices.size(); ++i)
            full[static_cast<std::size_t>(mask_.indices[i])] = y[i];
        input = full;
    }
    op_->adjoint(input, z);
    if (use_idwt_) {
        std::vector<double> x(z.begin(), z.end());
        if (op_->dim() == 1)
            dwt_apply(op_->filters(), op_->spec().boundary, op_->j(), x, DwtDirection::Forward);
        else
            dwt_apply_2d(op_->filters(), op_->spec().boundary, op_->j(), x,
                         DwtDirection::Forward);
        std::copy(x.begin(), x.end(), z.begin());
    }
}

// ---------------------------------------------------------------------------

HaarFullRankOp::HaarFullRankOp(unsigned j) : j_(j), haar_(load_filters(Family::Daubechies, 1)) {}

void HaarFullRankOp::forward(std::span<const double> x, std::span<double> y) const {
    std::vector<double> v(x.begin(), x.end());
    dwt_apply(haar_, Boundary::Periodic, j_, v, DwtDirection::Inverse, 0);
    fwht_sequency(v);
    double scale = 1.0 / std::sqrt(static_cast<double>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) y[i] = scale * v[i];
}

void HaarFullRankOp::adjoint(std::span<const double> y, std::span<double> x) const {
    std::vector<double> v(y.begin(), y.end());
    fwht_sequency(v);
    double scale = 1.0 / std::sqrt(static_cast<double>(v.size()));
    for (auto& t : v) t *= scale;
    dwt_apply(haar_, Boundary::Periodic, j_, v, DwtDirection::Forward, 0);
    std::copy(v.begin(), v.end(), x.begin());
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<double> zero_pad_pow2(std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    out.resize(next_pow2(v.size()), 0.0);
    return out;
}

}  // namespace cww

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cww/kernel.hpp"
#include "cww/wavelet.hpp"

namespace cww {

/// Abstract matrix-free linear map with an exact adjoint.
struct LinearOp {
    virtual ~LinearOp() = default;
    virtual std::size_t rows() const = 0;  // output dimension
    virtual std::size_t cols() const = 0;  // input dimension
    virtual void forward(std::span<const double> x, std::span<double> y) const = 0;
    virtual void adjoint(std::span<const double> y, std::span<double> x) const = 0;

    std::vector<double> forward_copy(std::span<const double> x) const {
        std::vector<double> y(rows());
        forward(x, y);
        return y;
    }
    std::vector<double> adjoint_copy(std::span<const double> y) const {
        std::vector<double> x(cols());
        adjoint(y, x);
        return x;
    }
};

struct SamplingMask {
    std::vector<std::uint64_t> indices;  // sorted, unique

    static SamplingMask full(std::uint64_t n);
    void validate(std::uint64_t n) const;  // throws on out-of-range/duplicates
    std::size_t size() const { return indices.size(); }
};

/// Matrix-free application of the truncated Walsh-to-wavelet change-of-basis
/// matrix (M = 2^j wavelet coefficients to N = 2^{j+q} Walsh coefficients)
/// and its adjoint, in one or two dimensions.
class FastOp {
public:
    FastOp(std::shared_ptr<const FilterSet> filters, WaveletSpec spec, unsigned j, unsigned q,
           std::shared_ptr<const KernelTable> kernels, int dim = 1);

    std::size_t M() const { return std::size_t(1) << j_; }
    std::size_t N() const { return std::size_t(1) << (j_ + q_); }
    unsigned j() const { return j_; }
    unsigned q() const { return q_; }
    int dim() const { return dim_; }
    const WaveletSpec& spec() const { return spec_; }
    const FilterSet& filters() const { return *filters_; }

    std::size_t input_size() const { return dim_ == 1 ? M() : M() * M(); }
    std::size_t output_size() const { return dim_ == 1 ? N() : N() * N(); }

    void set_threads(int t) { threads_ = t < 1 ? 1 : t; }

    void forward_1d(std::span<const double> xi, std::span<double> alpha) const;
    void adjoint_1d(std::span<const double> alpha, std::span<double> xi) const;
    void forward_2d(std::span<const double> xi, std::span<double> alpha) const;
    void adjoint_2d(std::span<const double> alpha, std::span<double> xi) const;

    void forward(std::span<const double> x, std::span<double> y) const {
        dim_ == 1 ? forward_1d(x, y) : forward_2d(x, y);
    }
    void adjoint(std::span<const double> y, std::span<double> x) const {
        dim_ == 1 ? adjoint_1d(y, x) : adjoint_2d(y, x);
    }

private:
    struct EdgeTerm {
        std::uint64_t p;      // dyadic position numerator over 2^j
        const double* kappa;  // 2^q kernel values (stride 1)
        int col;              // wavelet-side column index m
    };

    void build_edge_terms();

    WaveletSpec spec_;
    unsigned j_, q_;
    int dim_;
    int threads_ = 1;
    std::shared_ptr<const FilterSet> filters_;
    std::shared_ptr<const KernelTable> kernels_;
    std::vector<std::uint32_t> perm_;                  // sequency -> natural index
    std::vector<std::uint64_t> edge_positions_;        // distinct dyadic positions
    std::vector<std::vector<EdgeTerm>> edge_by_pos_;   // terms grouped by position
};

/// Plain LinearOp view of a FastOp.
class FastOpLinear : public LinearOp {
public:
    explicit FastOpLinear(std::shared_ptr<const FastOp> op) : op_(std::move(op)) {}
    std::size_t rows() const override { return op_->output_size(); }
    std::size_t cols() const override { return op_->input_size(); }
    void forward(std::span<const double> x, std::span<double> y) const override {
        op_->forward(x, y);
    }
    void adjoint(std::span<const double> y, std::span<double> x) const override {
        op_->adjoint(y, x);
    }

private:
    std::shared_ptr<const FastOp> op_;
};

/// A z -> P_Omega A W^{-1} z composition: optional inverse DWT on the input
/// (reconstruction in the multiscale wavelet basis) and optional subsampling
/// of the output.
class ComposedOp : public LinearOp {
public:
    ComposedOp(std::shared_ptr<const FastOp> op, SamplingMask mask, bool use_idwt);
    std::size_t rows() const override;
    std::size_t cols() const override { return op_->input_size(); }
    void forward(std::span<const double> z, std::span<double> y) const override;
    void adjoint(std::span<const double> y, std::span<double> z) const override;

private:
    std::shared_ptr<const FastOp> op_;
    SamplingMask mask_;
    bool full_mask_;
    bool use_idwt_;
};

/// The square Haar-basis operator (N = M): normalized FWHT composed with the
/// Haar inverse DWT; orthogonal.
class HaarFullRankOp : public LinearOp {
public:
    explicit HaarFullRankOp(unsigned j);
    std::size_t rows() const override { return std::size_t(1) << j_; }
    std::size_t cols() const override { return std::size_t(1) << j_; }
    void forward(std::span<const double> x, std::span<double> y) const override;
    void adjoint(std::span<const double> y, std::span<double> x) const override;

private:
    unsigned j_;
    FilterSet haar_;
};

std::size_t next_pow2(std::size_t n);
/// Zero-pads to the next power of two (the operator itself only accepts
/// power-of-two lengths).
std::vector<double> zero_pad_pow2(std::span<const double> v);

}  // namespace cww

#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sls/causal_operator.hpp"
#include "sls/sequence.hpp"

namespace sls {

/// Block family K_{t,k} of a linear causal operator,
///   y_t = sum_{k=1}^{min(t+1,T)} K_{t,k} x_{t+1-k},
/// with k = 1 multiplying the newest sample. Blocks with k > T are zero (FIR).
class LinearCausalKernel {
  public:
    static constexpr int kUnboundedFir = std::numeric_limits<int>::max();

    LinearCausalKernel() = default;

    LinearCausalKernel(int in_dim, int out_dim, int horizon, int fir = kUnboundedFir)
        : in_dim_(in_dim), out_dim_(out_dim), horizon_(horizon), fir_(fir) {
        if (in_dim <= 0 || out_dim <= 0)
            throw std::invalid_argument("LinearCausalKernel: dimensions must be positive");
        if (horizon < 0) throw std::invalid_argument("LinearCausalKernel: horizon must be >= 0");
        if (fir < 1) throw std::invalid_argument("LinearCausalKernel: FIR horizon must be >= 1");
        blocks_.resize(static_cast<size_t>(horizon) + 1);
        for (int t = 0; t <= horizon; ++t)
            blocks_[static_cast<size_t>(t)].assign(static_cast<size_t>(num_blocks(t)),
                                                   Eigen::MatrixXd::Zero(out_dim, in_dim));
    }

    static LinearCausalKernel identity(int dim, int horizon) {
        LinearCausalKernel k(dim, dim, horizon, 1);
        for (int t = 0; t <= horizon; ++t) k.block_ref(t, 1) = Eigen::MatrixXd::Identity(dim, dim);
        return k;
    }

    int in_dim() const { return in_dim_; }
    int out_dim() const { return out_dim_; }
    int horizon() const { return horizon_; }
    int fir_horizon() const { return fir_; }
    bool fir_bounded() const { return fir_ != kUnboundedFir; }

    /// Number of stored blocks at time t.
    int num_blocks(int t) const { return std::min(t + 1, fir_); }

    /// K_{t,k}; returns a zero matrix for absent (k > T) blocks.
    Eigen::MatrixXd block(int t, int k) const {
        check_time(t);
        if (k < 1 || k > t + 1)
            throw std::out_of_range("LinearCausalKernel::block: k outside 1..t+1");
        if (k > num_blocks(t)) return Eigen::MatrixXd::Zero(out_dim_, in_dim_);
        return blocks_[static_cast<size_t>(t)][static_cast<size_t>(k - 1)];
    }

    Eigen::MatrixXd& block_ref(int t, int k) {
        check_time(t);
        if (k < 1 || k > num_blocks(t))
            throw std::out_of_range("LinearCausalKernel::block_ref: block absent");
        return blocks_[static_cast<size_t>(t)][static_cast<size_t>(k - 1)];
    }

    void set_block(int t, int k, const Eigen::MatrixXd& m) {
        if (m.rows() != out_dim_ || m.cols() != in_dim_)
            throw std::invalid_argument("LinearCausalKernel::set_block: block shape mismatch");
        block_ref(t, k) = m;
    }

    Sequence apply(const Sequence& x) const {
        if (x.dim() != in_dim_)
            throw std::invalid_argument("LinearCausalKernel::apply: input dim mismatch");
        if (x.horizon() > horizon_)
            throw std::invalid_argument("LinearCausalKernel::apply: input horizon exceeds kernel");
        Sequence y(out_dim_, x.horizon());
        for (int t = 0; t <= x.horizon(); ++t) {
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(out_dim_);
            for (int k = 1; k <= num_blocks(t); ++k)
                acc.noalias() += blocks_[static_cast<size_t>(t)][static_cast<size_t>(k - 1)] *
                                 x[t + 1 - k];
            y[t] = acc;
        }
        return y;
    }

    /// True when K_{t,1} == I for all t (the strict-causality normalization of K - I).
    bool leading_identity(double tol = 0.0) const {
        if (in_dim_ != out_dim_) return false;
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(out_dim_, in_dim_);
        for (int t = 0; t <= horizon_; ++t)
            if ((block(t, 1) - id).lpNorm<Eigen::Infinity>() > tol) return false;
        return true;
    }

    CausalOperator to_operator() const {
        LinearCausalKernel self = *this;
        const bool strict = is_strictly_causal_blocks();
        CausalOperator op(
            in_dim_, out_dim_, strict ? Strictness::strictly_causal : Strictness::causal,
            [self](int t, const History& x) {
                Eigen::VectorXd acc = Eigen::VectorXd::Zero(self.out_dim_);
                for (int k = 1; k <= self.num_blocks(t); ++k)
                    acc.noalias() +=
                        self.blocks_[static_cast<size_t>(t)][static_cast<size_t>(k - 1)] *
                        x.at(t + 1 - k);
                return acc;
            },
            horizon_);
        op.with_batch([self](const Sequence& x) { return self.apply(x); });
        if (leading_identity(1e-14)) op.mark_identity_leading();
        return op;
    }

    /// Exact induced norm of the operator l_inf -> l_inf (both with vector inf norms):
    /// max over t of the max absolute row sum across the concatenated blocks.
    double linf_induced_norm() const {
        double best = 0.0;
        for (int t = 0; t <= horizon_; ++t) {
            for (int r = 0; r < out_dim_; ++r) {
                double row = 0.0;
                for (int k = 1; k <= num_blocks(t); ++k)
                    row += blocks_[static_cast<size_t>(t)][static_cast<size_t>(k - 1)]
                               .row(r)
                               .lpNorm<1>();
                best = std::max(best, row);
            }
        }
        return best;
    }

    double max_block_abs() const {
        double m = 0.0;
        for (int t = 0; t <= horizon_; ++t)
            for (int k = 1; k <= num_blocks(t); ++k)
                m = std::max(m, block(t, k).lpNorm<Eigen::Infinity>());
        return m;
    }

  private:
    void check_time(int t) const {
        if (t < 0 || t > horizon_)
            throw std::out_of_range("LinearCausalKernel: time index " + std::to_string(t) +
                                    " outside 0.." + std::to_string(horizon_));
    }

    bool is_strictly_causal_blocks() const {
        for (int t = 0; t <= horizon_; ++t)
            if (block(t, 1).lpNorm<Eigen::Infinity>() != 0.0) return false;
        return true;
    }

    int in_dim_ = 0;
    int out_dim_ = 0;
    int horizon_ = -1;
    int fir_ = kUnboundedFir;
    std::vector<std::vector<Eigen::MatrixXd>> blocks_;
};

inline LinearCausalKernel kernel_add(const LinearCausalKernel& a, const LinearCausalKernel& b,
                                     double sb = 1.0) {
    if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim())
        throw std::invalid_argument("kernel_add: dimension mismatch");
    const int horizon = std::min(a.horizon(), b.horizon());
    LinearCausalKernel c(a.in_dim(), a.out_dim(), horizon,
                         std::max(a.fir_horizon(), b.fir_horizon()));
    for (int t = 0; t <= horizon; ++t)
        for (int k = 1; k <= c.num_blocks(t); ++k)
            c.set_block(t, k, a.block(t, k) + sb * b.block(t, k));
    return c;
}

inline LinearCausalKernel kernel_sub(const LinearCausalKernel& a, const LinearCausalKernel& b) {
    return kernel_add(a, b, -1.0);
}

/// Kernel of A(B(x)): (AB)_{t,m} = sum_k A_{t,k} B_{t+1-k, m-k+1}.
inline LinearCausalKernel kernel_compose(const LinearCausalKernel& a,
                                         const LinearCausalKernel& b) {
    if (b.out_dim() != a.in_dim())
        throw std::invalid_argument("kernel_compose: dimension mismatch");
    const int horizon = std::min(a.horizon(), b.horizon());
    int fir = LinearCausalKernel::kUnboundedFir;
    if (a.fir_bounded() && b.fir_bounded()) fir = a.fir_horizon() + b.fir_horizon() - 1;
    LinearCausalKernel c(b.in_dim(), a.out_dim(), horizon, fir);
    for (int t = 0; t <= horizon; ++t) {
        for (int k = 1; k <= a.num_blocks(t); ++k) {
            const int s = t + 1 - k;  // time index feeding block A_{t,k}
            const Eigen::MatrixXd ab = a.block(t, k);
            for (int j = 1; j <= b.num_blocks(s); ++j) {
                const int m = k + j - 1;
                if (m <= c.num_blocks(t))
                    c.block_ref(t, m).noalias() += ab * b.block(s, j);
            }
        }
    }
    return c;
}

}  // namespace sls

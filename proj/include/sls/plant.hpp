#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>

#include "sls/causal_operator.hpp"
#include "sls/kernel.hpp"
#include "sls/sequence.hpp"

namespace sls {

/// Strictly causal open-loop dynamics F : l^n x l^m -> l^n with F_0 = 0:
///   F(x, u)_t = f_t(x_{t-1:0}, u_{t-1:0}),  t >= 1.
class Plant {
  public:
    /// Called with t >= 1 and the chronological prefixes x_0..x_{t-1}, u_0..u_{t-1}.
    using DynamicsFn = std::function<Eigen::VectorXd(
        int t, std::span<const Eigen::VectorXd> x_prefix,
        std::span<const Eigen::VectorXd> u_prefix)>;

    Plant(int state_dim, int input_dim, DynamicsFn f)
        : n_(state_dim), m_(input_dim), f_(std::move(f)) {
        if (n_ <= 0 || m_ <= 0) throw std::invalid_argument("Plant: dimensions must be positive");
        if (!f_) throw std::invalid_argument("Plant: missing dynamics function");
    }

    /// Zero dynamics: x = w.
    static Plant zero(int state_dim, int input_dim) {
        return Plant(state_dim, input_dim,
                     [state_dim](int, std::span<const Eigen::VectorXd>,
                                 std::span<const Eigen::VectorXd>) {
                         return Eigen::VectorXd::Zero(state_dim).eval();
                     });
    }

    /// x_t = A x_{t-1} + B u_{t-1}.
    static Plant lti(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        if (a.rows() != a.cols()) throw std::invalid_argument("Plant::lti: A must be square");
        if (b.rows() != a.rows()) throw std::invalid_argument("Plant::lti: B row count mismatch");
        Plant p(static_cast<int>(a.rows()), static_cast<int>(b.cols()),
                [a, b](int, std::span<const Eigen::VectorXd> x,
                       std::span<const Eigen::VectorXd> u) {
                    return (a * x.back() + b * u.back()).eval();
                });
        p.a_ = a;
        p.b_ = b;
        return p;
    }

    /// Linear time-varying plant described by strictly causal kernels Fx, Fu.
    static Plant linear(const LinearCausalKernel& fx, const LinearCausalKernel& fu) {
        if (fx.in_dim() != fx.out_dim())
            throw std::invalid_argument("Plant::linear: Fx must be square");
        if (fu.out_dim() != fx.out_dim())
            throw std::invalid_argument("Plant::linear: Fu output dim mismatch");
        for (int t = 0; t <= std::min(fx.horizon(), fu.horizon()); ++t)
            if (fx.block(t, 1).lpNorm<Eigen::Infinity>() != 0.0 ||
                fu.block(t, 1).lpNorm<Eigen::Infinity>() != 0.0)
                throw std::invalid_argument("Plant::linear: kernels must be strictly causal");
        const int n = fx.out_dim();
        Plant p(n, fu.in_dim(),
                [fx, fu, n](int t, std::span<const Eigen::VectorXd> x,
                            std::span<const Eigen::VectorXd> u) {
                    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
                    // k = 1 taps the (zero) current sample; start at k = 2.
                    for (int k = 2; k <= fx.num_blocks(t); ++k)
                        acc.noalias() += fx.block(t, k) * x[static_cast<size_t>(t + 1 - k)];
                    for (int k = 2; k <= fu.num_blocks(t); ++k)
                        acc.noalias() += fu.block(t, k) * u[static_cast<size_t>(t + 1 - k)];
                    return acc;
                });
        p.fx_ = fx;
        p.fu_ = fu;
        return p;
    }

    int state_dim() const { return n_; }
    int input_dim() const { return m_; }

    const std::optional<Eigen::MatrixXd>& lti_a() const { return a_; }
    const std::optional<Eigen::MatrixXd>& lti_b() const { return b_; }
    const std::optional<LinearCausalKernel>& kernel_x() const { return fx_; }
    const std::optional<LinearCausalKernel>& kernel_u() const { return fu_; }
    bool is_linear() const { return a_.has_value() || fx_.has_value(); }

    /// f_t(x_{t-1:0}, u_{t-1:0}); returns 0 at t = 0.
    Eigen::VectorXd step(int t, std::span<const Eigen::VectorXd> x_prefix,
                         std::span<const Eigen::VectorXd> u_prefix) const {
        if (t == 0) return Eigen::VectorXd::Zero(n_);
        if (static_cast<int>(x_prefix.size()) < t || static_cast<int>(u_prefix.size()) < t)
            throw std::invalid_argument("Plant::step: prefixes shorter than t");
        Eigen::VectorXd out = f_(t, x_prefix.first(static_cast<size_t>(t)),
                                 u_prefix.first(static_cast<size_t>(t)));
        if (out.size() != n_) throw std::invalid_argument("Plant::step: dynamics dim mismatch");
        return out;
    }

    /// Whole-trajectory evaluation F(x, u).
    Sequence evaluate(const Sequence& x, const Sequence& u) const {
        if (x.dim() != n_ || u.dim() != m_)
            throw std::invalid_argument("Plant::evaluate: signal dims do not match plant");
        if (x.horizon() != u.horizon())
            throw std::invalid_argument("Plant::evaluate: horizon mismatch between x and u");
        Sequence out(n_, x.horizon());
        std::span<const Eigen::VectorXd> xs(x.values()), us(u.values());
        for (int t = 1; t <= x.horizon(); ++t) out[t] = step(t, xs, us);
        return out;
    }

  private:
    int n_ = 0;
    int m_ = 0;
    DynamicsFn f_;
    std::optional<Eigen::MatrixXd> a_, b_;
    std::optional<LinearCausalKernel> fx_, fu_;
};

}  // namespace sls

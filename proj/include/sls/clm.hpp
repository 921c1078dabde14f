#pragma once

#include <optional>
#include <stdexcept>
#include <utility>

#include "sls/causal_operator.hpp"
#include "sls/kernel.hpp"
#include "sls/plant.hpp"
#include "sls/sequence.hpp"

namespace sls {

/// Affine closed-loop map pair: Psi^x(w)_t = sum_k R_{t,k} w_{t+1-k} + r_t and
/// Psi^u(w)_t = sum_k M_{t,k} w_{t+1-k} + m_t. R must have identity leading blocks.
struct AffineClm {
    LinearCausalKernel R;
    LinearCausalKernel M;
    std::optional<Sequence> r;  // state offset x^d
    std::optional<Sequence> m;  // input offset u^d

    int state_dim() const { return R.out_dim(); }
    int input_dim() const { return M.out_dim(); }
    int horizon() const { return std::min(R.horizon(), M.horizon()); }

    void validate() const {
        if (R.in_dim() != R.out_dim())
            throw std::invalid_argument("AffineClm: R must be square");
        if (M.in_dim() != R.in_dim())
            throw std::invalid_argument("AffineClm: M input dim must match R");
        if (!R.leading_identity(1e-12))
            throw std::invalid_argument("AffineClm: R_{t,1} must be the identity");
        if (r && (r->dim() != state_dim() || r->horizon() < horizon()))
            throw std::invalid_argument("AffineClm: offset r has wrong shape");
        if (m && (m->dim() != input_dim() || m->horizon() < horizon()))
            throw std::invalid_argument("AffineClm: offset m has wrong shape");
    }

    Sequence apply_x(const Sequence& w) const {
        Sequence out = R.apply(w);
        if (r)
            for (int t = 0; t <= out.horizon(); ++t) out[t] += (*r)[t];
        return out;
    }

    Sequence apply_u(const Sequence& w) const {
        Sequence out = M.apply(w);
        if (m)
            for (int t = 0; t <= out.horizon(); ++t) out[t] += (*m)[t];
        return out;
    }
};

/// Candidate closed-loop map Psi = (Psi^x, Psi^u) with Psi^x - I strictly causal.
class ClmPair {
  public:
    ClmPair(CausalOperator psi_x, CausalOperator psi_u)
        : psi_x_(std::move(psi_x)), psi_u_(std::move(psi_u)) {
        if (psi_x_.in_dim() != psi_x_.out_dim())
            throw std::invalid_argument("ClmPair: Psi^x must be square");
        if (psi_u_.in_dim() != psi_x_.in_dim())
            throw std::invalid_argument("ClmPair: Psi^u input dim must match Psi^x");
        if (!psi_x_.identity_leading() && !check_identity_leading(psi_x_, 8, 2, 17))
            throw std::invalid_argument("ClmPair: (Psi^x - I) must be strictly causal");
        psi_x_.mark_identity_leading();
    }

    static ClmPair affine(AffineClm a) {
        a.validate();
        ClmPair pair(make_affine_x(a), make_affine_u(a));
        pair.affine_ = std::move(a);
        return pair;
    }

    int state_dim() const { return psi_x_.out_dim(); }
    int input_dim() const { return psi_u_.out_dim(); }

    const CausalOperator& psi_x() const { return psi_x_; }
    const CausalOperator& psi_u() const { return psi_u_; }
    const std::optional<AffineClm>& affine() const { return affine_; }

    Sequence map_x(const Sequence& w) const { return psi_x_.evaluate(w); }
    Sequence map_u(const Sequence& w) const { return psi_u_.evaluate(w); }

  private:
    static CausalOperator make_affine_x(const AffineClm& a) {
        CausalOperator op(
            a.R.in_dim(), a.R.out_dim(), Strictness::causal,
            [a](int t, const History& w) {
                Eigen::VectorXd acc =
                    a.r ? (*a.r)[t] : Eigen::VectorXd::Zero(a.state_dim()).eval();
                for (int k = 1; k <= a.R.num_blocks(t); ++k)
                    acc.noalias() += a.R.block(t, k) * w.at(t + 1 - k);
                return acc;
            },
            a.horizon());
        op.with_batch([a](const Sequence& w) { return a.apply_x(w); });
        // R_{t,1} = I and the offset is constant, so Psi^x - I is strictly causal.
        op.mark_identity_leading();
        return op;
    }

    static CausalOperator make_affine_u(const AffineClm& a) {
        CausalOperator op(
            a.M.in_dim(), a.M.out_dim(), Strictness::causal,
            [a](int t, const History& w) {
                Eigen::VectorXd acc =
                    a.m ? (*a.m)[t] : Eigen::VectorXd::Zero(a.input_dim()).eval();
                for (int k = 1; k <= a.M.num_blocks(t); ++k)
                    acc.noalias() += a.M.block(t, k) * w.at(t + 1 - k);
                return acc;
            },
            a.horizon());
        op.with_batch([a](const Sequence& w) { return a.apply_u(w); });
        return op;
    }

    CausalOperator psi_x_;
    CausalOperator psi_u_;
    std::optional<AffineClm> affine_;
};

/// Residual Delta[F, Psi](w) = F(Psi(w)) + w - Psi^x(w). Identically zero along
/// every w exactly when Psi solves the CLM equation Psi^x = F(Psi) + I.
inline Sequence clm_residual(const Plant& plant, const ClmPair& psi, const Sequence& w) {
    if (w.dim() != plant.state_dim())
        throw std::invalid_argument("clm_residual: disturbance dim does not match plant");
    Sequence x = psi.map_x(w);
    Sequence u = psi.map_u(w);
    Sequence out = plant.evaluate(x, u);
    out += w;
    out -= x;
    return out;
}

/// Delta[F, Psi] as an evaluable strictly causal operator on disturbances.
inline CausalOperator residual_operator(const Plant& plant, const ClmPair& psi) {
    const int n = plant.state_dim();
    CausalOperator op(n, n, Strictness::strictly_causal,
                      [plant, psi](int t, const History& w) {
                          Sequence prefix(w.collect());
                          return clm_residual(plant, psi, prefix)[t];
                      });
    op.with_batch([plant, psi](const Sequence& w) { return clm_residual(plant, psi, w); });
    return op;
}

/// Builds Psi^x from Psi^u by the forward recursion
///   Psi^x_t(w_{t:0}) = f_t(Psi^x_{t-1:0}(w), Psi^u_{t-1:0}(w)) + w_t,
/// so the returned pair satisfies the CLM equation exactly.
inline ClmPair complete_clm(const Plant& plant, const CausalOperator& psi_u) {
    if (psi_u.in_dim() != plant.state_dim() || psi_u.out_dim() != plant.input_dim())
        throw std::invalid_argument("complete_clm: Psi^u dims do not match plant");
    const int n = plant.state_dim();

    // Rolls the closed-loop recursion along a disturbance prefix.
    auto roll = [plant, psi_u, n](const History& w) {
        const int t = w.t();
        std::vector<Eigen::VectorXd> x, u;
        x.reserve(static_cast<size_t>(t) + 1);
        u.reserve(static_cast<size_t>(t) + 1);
        for (int j = 0; j <= t; ++j) {
            std::span<const Eigen::VectorXd> xs(x), us(u);
            x.push_back(plant.step(j, xs, us) + w.at(j));
            u.push_back(psi_u.component(j, w.sub(j)));
        }
        return std::pair(std::move(x), std::move(u));
    };

    CausalOperator psi_x(
        n, n, Strictness::causal,
        [roll](int t, const History& w) {
            auto [x, u] = roll(w);
            return x[static_cast<size_t>(t)];
        },
        psi_u.max_horizon());
    psi_x.mark_identity_leading();
    psi_x.with_batch([plant, psi_u, n](const Sequence& w) {
        Sequence u = psi_u.evaluate(w);
        Sequence x(n, w.horizon());
        std::span<const Eigen::VectorXd> xs(x.values()), us(u.values());
        for (int t = 0; t <= w.horizon(); ++t)
            x[t] = plant.step(t, xs.first(static_cast<size_t>(t)),
                              us.first(static_cast<size_t>(t))) +
                   w[t];
        return x;
    });
    return ClmPair(std::move(psi_x), psi_u);
}

/// The unique realizing controller K' = Psi^u (Psi^x)^{-1} as an evaluable operator.
inline CausalOperator realize_controller(const ClmPair& psi) {
    return compose(psi.psi_u(), invert_causal(psi.psi_x()));
}

}  // namespace sls

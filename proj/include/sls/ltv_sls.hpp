#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sls/clm.hpp"
#include "sls/kernel.hpp"
#include "sls/sequence.hpp"

namespace sls {

/// Linear time-varying synthesis model x_t = A_{t-1} x_{t-1} + B_{t-1} u_{t-1},
/// with optional reference offsets r_t = x^d_t, m_t = u^d_t.
struct LtvModel {
    std::vector<Eigen::MatrixXd> A;  // t = 0..H-1
    std::vector<Eigen::MatrixXd> B;
    std::optional<Sequence> x_ref;  // horizon H
    std::optional<Sequence> u_ref;

    int horizon() const { return static_cast<int>(A.size()); }
    int state_dim() const { return A.empty() ? 0 : static_cast<int>(A.front().rows()); }
    int input_dim() const { return B.empty() ? 0 : static_cast<int>(B.front().cols()); }

    void validate() const {
        if (A.empty() || A.size() != B.size())
            throw std::invalid_argument("LtvModel: A and B must be nonempty and aligned");
        const int n = state_dim();
        const int m = input_dim();
        for (size_t t = 0; t < A.size(); ++t) {
            if (A[t].rows() != n || A[t].cols() != n)
                throw std::invalid_argument("LtvModel: A_" + std::to_string(t) + " shape");
            if (B[t].rows() != n || B[t].cols() != m)
                throw std::invalid_argument("LtvModel: B_" + std::to_string(t) + " shape");
        }
        if (x_ref && (x_ref->dim() != n || x_ref->horizon() != horizon()))
            throw std::invalid_argument("LtvModel: x_ref shape mismatch");
        if (u_ref && (u_ref->dim() != m || u_ref->horizon() != horizon()))
            throw std::invalid_argument("LtvModel: u_ref shape mismatch");
    }

    bool time_invariant(double tol = 0.0) const {
        for (size_t t = 1; t < A.size(); ++t)
            if ((A[t] - A[0]).lpNorm<Eigen::Infinity>() > tol ||
                (B[t] - B[0]).lpNorm<Eigen::Infinity>() > tol)
                return false;
        return true;
    }

    static LtvModel lti(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int horizon) {
        LtvModel m;
        m.A.assign(static_cast<size_t>(horizon), a);
        m.B.assign(static_cast<size_t>(horizon), b);
        m.validate();
        return m;
    }
};

/// FIR-constrained closed-loop map in affine kernel form.
using FirClm = AffineClm;

struct FirSynthesis {
    FirClm clm;
    double kkt_residual = 0.0;
};

struct H2Weights {
    std::optional<Eigen::VectorXd> state;  // diagonal of Q
    std::optional<Eigen::VectorXd> input;  // diagonal of R
};

class SynthesisInfeasible : public std::runtime_error {
  public:
    SynthesisInfeasible(int h, const std::string& what)
        : std::runtime_error("H2 synthesis infeasible at diagonal h=" + std::to_string(h) + ": " +
                             what),
          h_(h) {}
    int offending_h() const { return h_; }

  private:
    int h_;
};

namespace detail {

struct ChainSolution {
    std::vector<Eigen::MatrixXd> M;  // M_{h+j-1, j}, j = 1..K-1
    std::vector<Eigen::MatrixXd> R;  // R_{h+j-1, j}, j = 1..K
    double kkt_residual = 0.0;
};

/// Minimum-cost chain for one diagonal h:
///   R_1 = I, R_{j+1} = A_{t_j} R_j + B_{t_j} M_j, optionally R_K = 0,
///   minimizing sum_j ||Wx R_j||_F^2 + ||Wu M_j||_F^2.
inline ChainSolution solve_chain(const LtvModel& model, int h, int chain_len, bool terminal,
                                 const Eigen::MatrixXd& wx2, const Eigen::MatrixXd& wu2) {
    const int n = model.state_dim();
    const int m = model.input_dim();
    const int K = chain_len;
    const int J = K - 1;  // number of decision blocks M_j
    ChainSolution sol;

    if (J == 0) {
        sol.R.push_back(Eigen::MatrixXd::Identity(n, n));
        if (terminal)
            throw SynthesisInfeasible(h, "terminal constraint on a chain with no freedom");
        return sol;
    }

    // R_j = P_j + G_j U with U = [M_1; ...; M_J] stacked (J*m x n)
    std::vector<Eigen::MatrixXd> P(static_cast<size_t>(K) + 1), G(static_cast<size_t>(K) + 1);
    P[1] = Eigen::MatrixXd::Identity(n, n);
    G[1] = Eigen::MatrixXd::Zero(n, J * m);
    for (int j = 1; j < K; ++j) {
        const int t = h + j - 1;  // time index of A, B driving R_{j+1}
        P[static_cast<size_t>(j) + 1] = model.A[static_cast<size_t>(t)] * P[static_cast<size_t>(j)];
        G[static_cast<size_t>(j) + 1] = model.A[static_cast<size_t>(t)] * G[static_cast<size_t>(j)];
        G[static_cast<size_t>(j) + 1].middleCols((j - 1) * m, m) += model.B[static_cast<size_t>(t)];
    }

    // objective sum over R_2..R_{K or K-1} plus the weighted M blocks
    const int last_obj = terminal ? K - 1 : K;
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(J * m, J * m);
    for (int j = 0; j < J; ++j) hess.block(j * m, j * m, m, m) = wu2;
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(J * m, n);
    for (int j = 2; j <= last_obj; ++j) {
        hess.noalias() += G[static_cast<size_t>(j)].transpose() * wx2 * G[static_cast<size_t>(j)];
        grad.noalias() += G[static_cast<size_t>(j)].transpose() * wx2 * P[static_cast<size_t>(j)];
    }

    Eigen::MatrixXd u;
    double stationarity = 0.0;
    double primal = 0.0;
    if (!terminal) {
        u = hess.llt().solve(-grad);
        stationarity = (hess * u + grad).lpNorm<Eigen::Infinity>();
    } else {
        const Eigen::MatrixXd c = G[static_cast<size_t>(K)];
        const Eigen::MatrixXd d = -P[static_cast<size_t>(K)];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
        svd.setThreshold(1e-10);
        const int rank = static_cast<int>(svd.rank());
        Eigen::MatrixXd up = svd.solve(d);
        const double feas = (c * up - d).lpNorm<Eigen::Infinity>();
        if (feas > 1e-8 * std::max(1.0, d.lpNorm<Eigen::Infinity>()))
            throw SynthesisInfeasible(h, "terminal constraint unreachable (rank " +
                                             std::to_string(rank) + ")");
        const int null_dim = J * m - rank;
        if (null_dim == 0) {
            u = up;
        } else {
            Eigen::MatrixXd nbasis = svd.matrixV().rightCols(null_dim);
            Eigen::MatrixXd hred = nbasis.transpose() * hess * nbasis;
            Eigen::MatrixXd gred = nbasis.transpose() * (hess * up + grad);
            Eigen::MatrixXd y = hred.llt().solve(-gred);
            u = up + nbasis * y;
            stationarity = (nbasis.transpose() * (hess * u + grad)).lpNorm<Eigen::Infinity>();
        }
        primal = (c * u - d).lpNorm<Eigen::Infinity>();
    }
    sol.kkt_residual = std::max(stationarity, primal);

    sol.M.reserve(static_cast<size_t>(J));
    for (int j = 0; j < J; ++j) sol.M.push_back(u.middleRows(j * m, m));
    sol.R.reserve(static_cast<size_t>(K));
    for (int j = 1; j <= K; ++j)
        sol.R.push_back(P[static_cast<size_t>(j)] + G[static_cast<size_t>(j)] * u);
    return sol;
}

}  // namespace detail

/// Closed-form H2 synthesis under the FIR subspace constraint, decomposed into
/// independent per-diagonal chains (one per disturbance arrival time h).
inline FirSynthesis synthesize_h2_fir(const LtvModel& model, int T, const H2Weights& w = {}) {
    model.validate();
    if (T < 2) throw std::invalid_argument("synthesize_h2_fir: T must be >= 2");
    const int H = model.horizon();
    const int n = model.state_dim();
    const int m = model.input_dim();

    Eigen::MatrixXd wx2 = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd wu2 = Eigen::MatrixXd::Identity(m, m);
    if (w.state) {
        if (w.state->size() != n || w.state->minCoeff() <= 0.0)
            throw std::invalid_argument("synthesize_h2_fir: state weights must be positive");
        wx2 = w.state->asDiagonal();
    }
    if (w.input) {
        if (w.input->size() != m || w.input->minCoeff() <= 0.0)
            throw std::invalid_argument("synthesize_h2_fir: input weights must be positive");
        wu2 = w.input->asDiagonal();
    }

    FirClm clm{LinearCausalKernel(n, n, H, T), LinearCausalKernel(n, m, H, T), model.x_ref,
               model.u_ref};
    double kkt = 0.0;

    // identical chains repeat for time-invariant models
    const bool lti = model.time_invariant();
    std::map<std::pair<int, bool>, detail::ChainSolution> cache;

    for (int h = 0; h <= H; ++h) {
        const int chain_len = std::min(T, H - h + 1);
        const bool terminal = chain_len == T && chain_len >= 2;
        detail::ChainSolution sol;
        if (lti) {
            auto key = std::make_pair(chain_len, terminal);
            auto it = cache.find(key);
            if (it == cache.end())
                it = cache.emplace(key, detail::solve_chain(model, h, chain_len, terminal, wx2,
                                                            wu2))
                         .first;
            sol = it->second;
        } else {
            sol = detail::solve_chain(model, h, chain_len, terminal, wx2, wu2);
        }
        kkt = std::max(kkt, sol.kkt_residual);
        for (int j = 1; j <= static_cast<int>(sol.R.size()); ++j)
            clm.R.set_block(h + j - 1, j, sol.R[static_cast<size_t>(j - 1)]);
        for (int j = 1; j <= static_cast<int>(sol.M.size()); ++j)
            clm.M.set_block(h + j - 1, j, sol.M[static_cast<size_t>(j - 1)]);
    }
    return FirSynthesis{std::move(clm), kkt};
}

/// Max violation of the subspace condition
///   R_{t,k} = A_{t-1} R_{t-1,k-1} + B_{t-1} M_{t-1,k-1}
/// over all stored diagonals (absent blocks read as zero), including R_{t,1} = I.
inline double verify_subspace(const FirClm& clm, const LtvModel& model) {
    const int H = std::min(clm.horizon(), model.horizon());
    const int n = model.state_dim();
    double worst = 0.0;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    for (int t = 0; t <= H; ++t) {
        worst = std::max(worst, (clm.R.block(t, 1) - id).norm());
        if (t == 0) continue;
        const int kmax = clm.R.fir_bounded() ? std::min(t + 1, clm.R.fir_horizon() + 1) : t + 1;
        for (int k = 2; k <= kmax; ++k) {
            Eigen::MatrixXd expect = model.A[static_cast<size_t>(t - 1)] * clm.R.block(t - 1, k - 1) +
                                     model.B[static_cast<size_t>(t - 1)] * clm.M.block(t - 1, k - 1);
            worst = std::max(worst, (clm.R.block(t, k) - expect).norm());
        }
    }
    return worst;
}

/// Unweighted objective value: sum of squared Frobenius norms over stored blocks.
inline double h2_cost(const FirClm& clm) {
    double acc = 0.0;
    for (int t = 0; t <= clm.R.horizon(); ++t)
        for (int k = 1; k <= clm.R.num_blocks(t); ++k) acc += clm.R.block(t, k).squaredNorm();
    for (int t = 0; t <= clm.M.horizon(); ++t)
        for (int k = 1; k <= clm.M.num_blocks(t); ++k) acc += clm.M.block(t, k).squaredNorm();
    return acc;
}

}  // namespace sls

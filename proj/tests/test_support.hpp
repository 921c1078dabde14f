#pragma once

// Shared generators for randomized tests: well-scaled nonlinear plants with
// bounded-slope polynomial components, and random causal input maps.

#include "sls/clm.hpp"
#include "sls/plant.hpp"
#include "sls/random.hpp"

namespace sls::testing {

/// Strictly causal nonlinear plant
///   f_t(x, u) = A x_{t-1} + B u_{t-1} + eps * q(x_{t-1}, u_{t-1})
/// with q quadratic and ||A|| scaled down so trajectories stay O(1).
inline Plant random_nonlinear_plant(Rng& rng, int n, int m, double contraction = 0.5,
                                    double eps = 0.05) {
    Eigen::MatrixXd a = random_matrix(rng, n, n);
    a *= contraction / std::max(1.0, a.cwiseAbs().rowwise().sum().maxCoeff());
    Eigen::MatrixXd b = random_matrix(rng, n, m, 0.4);
    Eigen::MatrixXd qx = random_matrix(rng, n, n, 1.0);
    Eigen::MatrixXd qu = random_matrix(rng, n, m, 1.0);
    return Plant(n, m,
                 [n, a, b, qx, qu, eps](int, std::span<const Eigen::VectorXd> x,
                                        std::span<const Eigen::VectorXd> u) {
                     Eigen::VectorXd lin = a * x.back() + b * u.back();
                     Eigen::VectorXd zx = qx * x.back();
                     Eigen::VectorXd zu = qu * u.back();
                     // bounded-slope cubic saturator z - z^3/3 on |z| <= 1
                     auto soft = [](double z) {
                         z = std::clamp(z, -1.0, 1.0);
                         return z - z * z * z / 3.0;
                     };
                     Eigen::VectorXd q(n);
                     for (int i = 0; i < n; ++i) q(i) = soft(zx(i)) * soft(zu(i % zu.size()));
                     return (lin + eps * q).eval();
                 });
}

/// Random causal Psi^u: FIR kernel plus a mild memoryless polynomial term.
inline CausalOperator random_causal_psi_u(Rng& rng, int n, int m, int horizon,
                                          double sigma = 0.25, double nl = 0.1) {
    LinearCausalKernel k = random_kernel(rng, n, m, horizon, 5, sigma);
    Eigen::MatrixXd mix = random_matrix(rng, m, n, 0.5);
    return CausalOperator(
        n, m, Strictness::causal,
        [k, mix, nl, m](int t, const History& w) {
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
            for (int kk = 1; kk <= k.num_blocks(t); ++kk)
                acc.noalias() += k.block(t, kk) * w.at(t + 1 - kk);
            Eigen::VectorXd z = mix * w.back(0);
            for (int i = 0; i < m; ++i) {
                double c = std::clamp(z(i), -1.0, 1.0);
                acc(i) += nl * c * c;
            }
            return acc;
        },
        horizon);
}

/// Deadbeat affine CLM for a scalar LTI plant: R = I, M_{t,1} = -a/b.
inline ClmPair scalar_deadbeat_clm(double a, double b, int horizon) {
    LinearCausalKernel r = LinearCausalKernel::identity(1, horizon);
    LinearCausalKernel m(1, 1, horizon, 1);
    for (int t = 0; t <= horizon; ++t)
        m.set_block(t, 1, Eigen::MatrixXd::Constant(1, 1, -a / b));
    return ClmPair::affine(AffineClm{r, m, std::nullopt, std::nullopt});
}

}  // namespace sls::testing

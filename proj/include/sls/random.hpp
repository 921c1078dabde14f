#pragma once

#include <random>

#include "sls/kernel.hpp"
#include "sls/sequence.hpp"

namespace sls {

using Rng = std::mt19937_64;

inline Eigen::VectorXd random_vector(Rng& rng, int dim, double sigma = 1.0) {
    std::normal_distribution<double> gauss(0.0, sigma);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = gauss(rng);
    return v;
}

inline Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols, double sigma = 1.0) {
    std::normal_distribution<double> gauss(0.0, sigma);
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = gauss(rng);
    return m;
}

inline Sequence random_sequence(Rng& rng, int dim, int horizon, double sigma = 1.0) {
    Sequence s(dim, horizon);
    for (int t = 0; t <= horizon; ++t) s[t] = random_vector(rng, dim, sigma);
    return s;
}

/// Rescale into the lp ball of radius rho (leaves the sequence alone if already inside).
inline Sequence clip_to_ball(Sequence s, Norm p, Norm vec, double rho) {
    const double norm = lp_norm(s, p, vec);
    if (norm > rho && norm > 0.0) s *= rho / norm;
    return s;
}

/// Random FIR kernel with N(0, sigma^2) block entries; optionally K_{t,1} = I.
inline LinearCausalKernel random_kernel(Rng& rng, int in_dim, int out_dim, int horizon, int fir,
                                        double sigma = 0.3, bool leading_identity = false) {
    LinearCausalKernel k(in_dim, out_dim, horizon, fir);
    for (int t = 0; t <= horizon; ++t)
        for (int kk = 1; kk <= k.num_blocks(t); ++kk)
            k.set_block(t, kk, random_matrix(rng, out_dim, in_dim, sigma));
    if (leading_identity) {
        if (in_dim != out_dim)
            throw std::invalid_argument("random_kernel: leading identity needs square blocks");
        for (int t = 0; t <= horizon; ++t)
            k.set_block(t, 1, Eigen::MatrixXd::Identity(out_dim, in_dim));
    }
    return k;
}

}  // namespace sls

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "sls/sequence.hpp"

namespace sls {

/// Exact ZOH discretization of xdot = J x + G u: returns (exp(J tau),
/// int_0^tau exp(J s) G ds) through the augmented matrix exponential
/// exp([[J, G], [0, 0]] tau).
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> zoh_discretize(const Eigen::MatrixXd& j,
                                                                  const Eigen::MatrixXd& g,
                                                                  double tau) {
    if (j.rows() != j.cols()) throw std::invalid_argument("zoh_discretize: J must be square");
    if (g.rows() != j.rows()) throw std::invalid_argument("zoh_discretize: G row mismatch");
    const int n = static_cast<int>(j.rows());
    const int m = static_cast<int>(g.cols());
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = j;
    aug.topRightCorner(n, m) = g;
    Eigen::MatrixXd e = (aug * tau).exp();
    return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

/// Induced matrix norm: exact row/column sums for 1 and inf, largest singular
/// value by power iteration on A^T A for 2 (tolerance 1e-12).
inline double induced_norm(const Eigen::MatrixXd& a, Norm which) {
    switch (which) {
        case Norm::one:
            return a.cwiseAbs().colwise().sum().maxCoeff();
        case Norm::inf:
            return a.cwiseAbs().rowwise().sum().maxCoeff();
        case Norm::two: {
            const Eigen::MatrixXd ata = a.transpose() * a;
            const int n = static_cast<int>(ata.rows());
            Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
            double lambda = 0.0;
            for (int it = 0; it < 10000; ++it) {
                Eigen::VectorXd next = ata * v;
                double norm = next.norm();
                if (norm == 0.0) return 0.0;
                next /= norm;
                double nl = next.dot(ata * next);
                // deflation-free power iteration; stop on eigenvalue stagnation
                if (std::abs(nl - lambda) <= 1e-12 * std::max(1.0, std::abs(nl)) && it > 2) {
                    lambda = nl;
                    break;
                }
                lambda = nl;
                v = next;
            }
            return std::sqrt(std::max(0.0, lambda));
        }
    }
    return 0.0;
}

inline Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& a, int k) {
    if (k < 0) throw std::invalid_argument("matrix_power: negative exponent");
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    Eigen::MatrixXd base = a;
    while (k > 0) {
        if (k & 1) out = out * base;
        base = base * base;
        k >>= 1;
    }
    return out;
}

/// Smallest T with induced |A^T| < 1, up to t_max. Guaranteed to exist for
/// some t_max when the spectral radius is below 1 (Gelfand).
inline std::optional<int> min_contraction_horizon(const Eigen::MatrixXd& a, Norm which,
                                                  int t_max) {
    if (t_max < 1) throw std::invalid_argument("min_contraction_horizon: t_max must be >= 1");
    Eigen::MatrixXd power = a;
    for (int t = 1; t <= t_max; ++t) {
        if (induced_norm(power, which) < 1.0) return t;
        power = power * a;
    }
    return std::nullopt;
}

inline double spectral_radius(const Eigen::MatrixXd& a) {
    return a.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace sls

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sls/clm.hpp"
#include "sls/ltv_sls.hpp"
#include "sls/matrix_util.hpp"
#include "sls/plant.hpp"
#include "sls/random.hpp"
#include "sls/sequence.hpp"
#include "sls/simulate.hpp"

namespace sls::cartpole {

/// State layout: (x_c, theta_p, xdot_c, thetadot_p), theta = 0 pointing down,
/// measured counterclockwise, radians.
using State = Eigen::Vector4d;

struct CartPoleParams {
    double cart_mass = 1.0;    // kg
    double pole_mass = 0.1;    // kg
    double pole_length = 0.5;  // m
    double gravity = 9.81;     // m/s^2
    double sample_time = 0.033;  // s (30 Hz)

    void validate() const {
        if (cart_mass <= 0 || pole_mass <= 0 || pole_length <= 0 || gravity <= 0 ||
            sample_time <= 0)
            throw std::invalid_argument("CartPoleParams: all parameters must be positive");
    }
};

/// Solved form of the manipulator equations
///   (m_c + m_p) xdd + m_p l thdd cos(th) - m_p l thd^2 sin(th) = f
///   m_p l xdd cos(th) + m_p l^2 thdd + m_p g l sin(th) = 0
inline State continuous_dynamics(const CartPoleParams& p, const State& x, double u) {
    const double th = x(1);
    const double thd = x(3);
    const double s = std::sin(th);
    const double c = std::cos(th);
    const double den = p.cart_mass + p.pole_mass * s * s;

    const double xdd =
        (u + p.pole_mass * s * (p.pole_length * thd * thd + p.gravity * c)) / den;
    const double thdd = (-u * c - p.pole_mass * p.pole_length * thd * thd * s * c -
                         (p.cart_mass + p.pole_mass) * p.gravity * s) /
                        (p.pole_length * den);

    State dx;
    dx << x(2), x(3), xdd, thdd;
    return dx;
}

/// Residual of the implicit manipulator equations at (x, u, xdd, thdd);
/// validates the solved form above.
inline Eigen::Vector2d manipulator_residual(const CartPoleParams& p, const State& x, double u,
                                            double xdd, double thdd) {
    const double th = x(1);
    const double thd = x(3);
    Eigen::Vector2d r;
    r(0) = (p.cart_mass + p.pole_mass) * xdd + p.pole_mass * p.pole_length * thdd * std::cos(th) -
           p.pole_mass * p.pole_length * thd * thd * std::sin(th) - u;
    r(1) = p.pole_mass * p.pole_length * xdd * std::cos(th) +
           p.pole_mass * p.pole_length * p.pole_length * thdd +
           p.pole_mass * p.gravity * p.pole_length * std::sin(th);
    return r;
}

/// Total energy with the potential zero at the downward rest position of the pole.
inline double energy(const CartPoleParams& p, const State& x) {
    const double kin = 0.5 * (p.cart_mass + p.pole_mass) * x(2) * x(2) +
                       p.pole_mass * p.pole_length * x(2) * x(3) * std::cos(x(1)) +
                       0.5 * p.pole_mass * p.pole_length * p.pole_length * x(3) * x(3);
    const double pot = -p.pole_mass * p.gravity * p.pole_length * std::cos(x(1));
    return kin + pot;
}

/// ZOH flow map phi_{tau_s}(x, u): classical 4th-order fixed-step integration
/// of the continuous dynamics with u held constant over one sample period.
inline State zoh_flow(const CartPoleParams& p, const State& x, double u, int substeps = 16) {
    if (substeps < 1) throw std::invalid_argument("zoh_flow: substeps must be >= 1");
    const double h = p.sample_time / substeps;
    State s = x;
    for (int i = 0; i < substeps; ++i) {
        State k1 = continuous_dynamics(p, s, u);
        State k2 = continuous_dynamics(p, s + 0.5 * h * k1, u);
        State k3 = continuous_dynamics(p, s + 0.5 * h * k2, u);
        State k4 = continuous_dynamics(p, s + h * k3, u);
        s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!s.allFinite()) throw std::runtime_error("zoh_flow: state diverged to non-finite");
    }
    return s;
}

/// Analytic state Jacobian of the input-affine field F(x) + g(x) u at (x, u).
inline Eigen::Matrix4d continuous_jacobian(const CartPoleParams& p, const State& x, double u) {
    const double th = x(1);
    const double thd = x(3);
    const double s = std::sin(th);
    const double c = std::cos(th);
    const double s2 = std::sin(2.0 * th);
    const double c2 = std::cos(2.0 * th);
    const double mc = p.cart_mass;
    const double mp = p.pole_mass;
    const double l = p.pole_length;
    const double g = p.gravity;
    const double den = mc + mp * s * s;
    const double dden = mp * s2;

    const double n1 = u + mp * s * (l * thd * thd + g * c);
    const double dn1_th = mp * l * thd * thd * c + mp * g * c2;
    const double dn1_thd = 2.0 * mp * l * thd * s;

    const double n2 = -u * c - 0.5 * mp * l * thd * thd * s2 - (mc + mp) * g * s;
    const double dn2_th = u * s - mp * l * thd * thd * c2 - (mc + mp) * g * c;
    const double dn2_thd = -mp * l * thd * s2;

    Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
    j(0, 2) = 1.0;
    j(1, 3) = 1.0;
    j(2, 1) = (dn1_th * den - n1 * dden) / (den * den);
    j(2, 3) = dn1_thd / den;
    j(3, 1) = (dn2_th * den - n2 * dden) / (l * den * den);
    j(3, 3) = dn2_thd / (l * den);
    return j;
}

/// Input vector field g(x) of the input-affine form.
inline Eigen::Vector4d input_field(const CartPoleParams& p, const State& x) {
    const double th = x(1);
    const double den = p.cart_mass + p.pole_mass * std::sin(th) * std::sin(th);
    Eigen::Vector4d gv;
    gv << 0.0, 0.0, 1.0 / den, -std::cos(th) / (p.pole_length * den);
    return gv;
}

/// Discretization A = exp(J tau_s), B = int_0^{tau_s} exp(J tau) g dtau, with
/// J the state Jacobian of the full field at (x_ref, u_ref).
inline std::pair<Eigen::Matrix4d, Eigen::Vector4d> linearize_zoh(const CartPoleParams& p,
                                                                 const State& x_ref,
                                                                 double u_ref) {
    auto [a, b] = zoh_discretize(continuous_jacobian(p, x_ref, u_ref), input_field(p, x_ref),
                                 p.sample_time);
    return {a, b};
}

struct ReferenceTrajectory {
    Sequence states;  // dim 4, horizon H
    Sequence inputs;  // dim 1, horizon H
    enum class Source { file, heuristic } source = Source::heuristic;

    int horizon() const { return states.horizon(); }

    void validate() const {
        if (states.dim() != 4 || inputs.dim() != 1)
            throw std::invalid_argument("ReferenceTrajectory: expected dims (4, 1)");
        if (states.horizon() != inputs.horizon())
            throw std::invalid_argument("ReferenceTrajectory: state/input horizons differ");
    }
};

/// Discrete LQR gain by Riccati fixed-point iteration (used only by the
/// swing-up reference generator, not part of the synthesis path).
inline Eigen::RowVector4d dlqr_gain(const Eigen::Matrix4d& a, const Eigen::Vector4d& b,
                                    const Eigen::Matrix4d& q, double r, int iters = 4000) {
    Eigen::Matrix4d p = q;
    for (int i = 0; i < iters; ++i) {
        double denom = r + (b.transpose() * p * b).value();
        Eigen::RowVector4d k = (b.transpose() * p * a) / denom;
        Eigen::Matrix4d pn =
            q + a.transpose() * p * a - a.transpose() * p * b * k;
        if ((pn - p).lpNorm<Eigen::Infinity>() < 1e-12 * (1.0 + p.lpNorm<Eigen::Infinity>())) {
            p = pn;
            break;
        }
        p = pn;
    }
    double denom = r + (b.transpose() * p * b).value();
    return (b.transpose() * p * a) / denom;
}

/// Swing-up reference generated by rolling the ZOH flow under an energy-pumping
/// policy followed by a linear catch at the upright position. This heuristic is
/// a stand-in reference generator; the rolled pair is discretization-consistent
/// by construction: states[t+1] = zoh_flow(states[t], inputs[t]).
struct HeuristicConfig {
    double duration_s = 8.0;
    double energy_gain = 18.0;
    double cart_kp = 0.9;
    double cart_kd = 1.6;
    double kick_force = 6.0;
    double catch_angle = 0.5;   // wrapped |theta - pi| below which the linear catch engages
    double catch_rate = 4.5;    // |thetadot| bound for engaging the catch
    double force_limit = 12.0;
    int substeps = 16;
};

inline ReferenceTrajectory heuristic_swingup_reference(const CartPoleParams& p,
                                                       const HeuristicConfig& cfg = {}) {
    p.validate();
    const int H = static_cast<int>(std::round(cfg.duration_s / p.sample_time));
    const double e_up = p.pole_mass * p.gravity * p.pole_length;

    State up;
    up << 0.0, M_PI, 0.0, 0.0;
    auto [a_up, b_up] = linearize_zoh(p, up, 0.0);
    Eigen::Matrix4d q = Eigen::Vector4d(1.0, 10.0, 1.0, 2.0).asDiagonal();
    Eigen::RowVector4d k_catch = dlqr_gain(a_up, b_up, q, 1.0);

    ReferenceTrajectory ref{Sequence(4, H), Sequence(1, H),
                            ReferenceTrajectory::Source::heuristic};
    State s = State::Zero();
    bool caught = false;
    for (int t = 0; t <= H; ++t) {
        double u;
        const double ang_err = std::atan2(std::sin(s(1) - M_PI), std::cos(s(1) - M_PI));
        if (caught || (std::abs(ang_err) < cfg.catch_angle && std::abs(s(3)) < cfg.catch_rate)) {
            caught = true;
            State err = s - up;
            err(1) = ang_err;
            u = -(k_catch * err).value();
        } else if (std::abs(s(1)) < 1e-3 && std::abs(s(3)) < 1e-3) {
            u = cfg.kick_force;  // nudge out of the downward rest point
        } else {
            u = cfg.energy_gain * (energy(p, s) - e_up) * s(3) * std::cos(s(1)) -
                cfg.cart_kp * s(0) - cfg.cart_kd * s(2);
        }
        u = std::clamp(u, -cfg.force_limit, cfg.force_limit);
        ref.states[t] = s;
        ref.inputs[t] << u;
        if (t < H) s = zoh_flow(p, s, u, cfg.substeps);
    }
    return ref;
}

/// LTV tracking model along the reference: A_t, B_t from linearize_zoh, offsets
/// (x^d, u^d). Also reports the reference consistency error
/// e_t = phi(x^d_{t-1}, u^d_{t-1}) - x^d_t.
struct TrackingModel {
    LtvModel model;
    Sequence reference_error;  // e_t, dim 4
};

inline TrackingModel build_tracking_model(const CartPoleParams& p, const ReferenceTrajectory& ref,
                                          int substeps = 16) {
    p.validate();
    ref.validate();
    const int H = ref.horizon();
    if (H < 1) throw std::invalid_argument("build_tracking_model: reference too short");

    TrackingModel out{LtvModel{}, Sequence(4, H)};
    for (int t = 0; t < H; ++t) {
        auto [a, b] = linearize_zoh(p, ref.states[t], ref.inputs[t](0));
        out.model.A.push_back(a);
        out.model.B.push_back(b);
    }
    out.model.x_ref = ref.states;
    out.model.u_ref = ref.inputs;
    out.model.validate();

    for (int t = 1; t <= H; ++t)
        out.reference_error[t] =
            zoh_flow(p, ref.states[t - 1], ref.inputs[t - 1](0), substeps) - ref.states[t];
    return out;
}

/// Gaussian per-channel noise configuration for the tracking experiment.
struct NoiseConfig {
    Eigen::Vector4d w_sigma = Eigen::Vector4d::Zero();
    Eigen::Vector4d v_sigma = Eigen::Vector4d::Zero();
    double d_sigma = 0.0;
    State initial_offset = State::Zero();
};

struct TrackingResult {
    LoopTrace trace;
    Sequence reference_error;      // e_t logged per step
    Sequence normalized_error;     // per-component e_{i,t} / sup_t |x_{i,t}|
    double w_hat_inf = 0.0;        // ||w_hat||_inf over the run
    bool diverged = false;
    int divergence_time = -1;
};

/// Runs the true nonlinear ZOH plant under the affine SL controller
///   w'_t = x_t + v_t - x^d_t - sum_{k>=2} R_{t,k} w'_{t+1-k}
///   u_t  = u^d_t + sum_{k>=1} M_{t,k} w'_{t+1-k} + d_t
/// with seeded Gaussian perturbations and an initial-condition offset.
inline TrackingResult run_tracking_experiment(const CartPoleParams& p,
                                              const ReferenceTrajectory& ref, const FirClm& clm,
                                              const NoiseConfig& noise, unsigned seed,
                                              int substeps = 16, double blowup = 1e6) {
    p.validate();
    ref.validate();
    const int H = ref.horizon();
    if (clm.horizon() < H)
        throw std::invalid_argument("run_tracking_experiment: kernels shorter than reference");

    Rng rng(seed);
    Sequence w(4, H), v(4, H), d(1, H);
    for (int t = 0; t <= H; ++t) {
        for (int i = 0; i < 4; ++i) {
            w[t](i) = noise.w_sigma(i) == 0.0 ? 0.0 : noise.w_sigma(i) * std::normal_distribution<double>()(rng);
            v[t](i) = noise.v_sigma(i) == 0.0 ? 0.0 : noise.v_sigma(i) * std::normal_distribution<double>()(rng);
        }
        d[t](0) = noise.d_sigma == 0.0 ? 0.0 : noise.d_sigma * std::normal_distribution<double>()(rng);
    }

    TrackingResult res{LoopTrace{w,
                                 Sequence(4, H),
                                 Sequence(1, H),
                                 Sequence(4, H),
                                 v,
                                 d},
                       Sequence(4, H), Sequence(4, H)};

    std::vector<Eigen::VectorXd> what;
    what.reserve(static_cast<size_t>(H) + 1);
    State x = ref.states[0] + noise.initial_offset + w[0];
    for (int t = 0; t <= H; ++t) {
        if (t > 0) {
            try {
                x = zoh_flow(p, res.trace.x[t - 1], res.trace.u[t - 1](0), substeps) + w[t];
            } catch (const std::runtime_error&) {
                res.diverged = true;
                res.divergence_time = t;
                break;
            }
        }
        res.trace.x[t] = x;
        if (!res.diverged && x.lpNorm<Eigen::Infinity>() > blowup) {
            res.diverged = true;
            res.divergence_time = t;
            break;
        }

        Eigen::VectorXd acc = res.trace.x[t] + v[t] - ref.states[t];
        for (int k = 2; k <= clm.R.num_blocks(t); ++k)
            acc.noalias() -= clm.R.block(t, k) * what[static_cast<size_t>(t + 1 - k)];
        what.push_back(acc);
        res.trace.w_hat[t] = acc;
        res.w_hat_inf = std::max(res.w_hat_inf, acc.lpNorm<Eigen::Infinity>());

        Eigen::VectorXd u = ref.inputs[t] + d[t];
        for (int k = 1; k <= clm.M.num_blocks(t); ++k)
            u.noalias() += clm.M.block(t, k) * what[static_cast<size_t>(t + 1 - k)];
        res.trace.u[t] = u;
    }

    for (int t = 1; t <= H; ++t)
        res.reference_error[t] =
            zoh_flow(p, ref.states[t - 1], ref.inputs[t - 1](0), substeps) - ref.states[t];
    Eigen::Vector4d sup = Eigen::Vector4d::Zero();
    for (int t = 0; t <= H; ++t) sup = sup.cwiseMax(res.trace.x[t].cwiseAbs());
    for (int t = 0; t <= H; ++t)
        for (int i = 0; i < 4; ++i)
            res.normalized_error[t](i) =
                sup(i) > 0.0 ? res.reference_error[t](i) / sup(i) : 0.0;
    return res;
}

/// Plant wrapper for the true ZOH dynamics, usable with the generic runtime.
inline Plant zoh_plant(const CartPoleParams& p, int substeps = 16) {
    return Plant(4, 1,
                 [p, substeps](int, std::span<const Eigen::VectorXd> x,
                               std::span<const Eigen::VectorXd> u) {
                     return zoh_flow(p, x.back(), u.back()(0), substeps).eval();
                 });
}

}  // namespace sls::cartpole

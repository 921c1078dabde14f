#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "sls/causal_operator.hpp"
#include "sls/clm.hpp"
#include "sls/plant.hpp"
#include "sls/sequence.hpp"
#include "sls/sl_controller.hpp"

namespace sls {

/// Signals of one closed-loop run, horizon-aligned.
struct LoopTrace {
    Sequence w;      // disturbance
    Sequence x;      // state
    Sequence u;      // input
    Sequence w_hat;  // controller internal state
    Sequence v;      // controller-state perturbation
    Sequence d;      // input perturbation
};

/// Nominal loop S1: x = F(x, u) + w, u = K(x), simulated forward in time.
inline LoopTrace simulate_nominal(const Plant& plant, const CausalOperator& controller,
                                  const Sequence& w) {
    if (w.dim() != plant.state_dim())
        throw std::invalid_argument("simulate_nominal: disturbance dim mismatch");
    if (controller.in_dim() != plant.state_dim() ||
        controller.out_dim() != plant.input_dim())
        throw std::invalid_argument("simulate_nominal: controller dims do not match plant");
    const int H = w.horizon();
    LoopTrace tr{w,
                 Sequence(plant.state_dim(), H),
                 Sequence(plant.input_dim(), H),
                 Sequence(plant.state_dim(), H),
                 Sequence(plant.state_dim(), H),
                 Sequence(plant.input_dim(), H)};
    std::span<const Eigen::VectorXd> xs(tr.x.values()), us(tr.u.values());
    for (int t = 0; t <= H; ++t) {
        tr.x[t] = plant.step(t, xs.first(static_cast<size_t>(t)),
                             us.first(static_cast<size_t>(t))) +
                  w[t];
        tr.u[t] = controller.component(
            t, History::prefix(xs.first(static_cast<size_t>(t) + 1)));
    }
    return tr;
}

/// Nominal loop with a streaming SL controller; records its internal state.
inline LoopTrace simulate_nominal(const Plant& plant, SlController& controller,
                                  const Sequence& w) {
    if (w.dim() != plant.state_dim())
        throw std::invalid_argument("simulate_nominal: disturbance dim mismatch");
    if (controller.measurement_dim() != plant.state_dim() ||
        controller.output_dim() != plant.input_dim())
        throw std::invalid_argument("simulate_nominal: controller dims do not match plant");
    controller.reset();
    const int H = w.horizon();
    LoopTrace tr{w,
                 Sequence(plant.state_dim(), H),
                 Sequence(plant.input_dim(), H),
                 Sequence(plant.state_dim(), H),
                 Sequence(plant.state_dim(), H),
                 Sequence(plant.input_dim(), H)};
    std::span<const Eigen::VectorXd> xs(tr.x.values()), us(tr.u.values());
    for (int t = 0; t <= H; ++t) {
        tr.x[t] = plant.step(t, xs.first(static_cast<size_t>(t)),
                             us.first(static_cast<size_t>(t))) +
                  w[t];
        tr.u[t] = controller.step(tr.x[t]);
        tr.w_hat[t] = controller.internal_state().back();
    }
    return tr;
}

/// Perturbed loop S1':
///   x_t = f_t(x_{t-1:0}, u_{t-1:0}) + w_t
///   w'_t = x_t + v_t - Psi^x_t(0, w'_{t-1:0})
///   u_t = Psi^u_t(w'_{t:0}) + d_t
inline LoopTrace simulate_perturbed(const Plant& plant, const ClmPair& psi, const Sequence& w,
                                    const Sequence& v, const Sequence& d) {
    if (w.dim() != plant.state_dim() || v.dim() != plant.state_dim())
        throw std::invalid_argument("simulate_perturbed: disturbance dims do not match plant");
    if (d.dim() != plant.input_dim())
        throw std::invalid_argument("simulate_perturbed: input perturbation dim mismatch");
    if (w.horizon() != v.horizon() || w.horizon() != d.horizon())
        throw std::invalid_argument("simulate_perturbed: perturbation horizons differ");
    if (psi.state_dim() != plant.state_dim() || psi.input_dim() != plant.input_dim())
        throw std::invalid_argument("simulate_perturbed: CLM dims do not match plant");

    const int H = w.horizon();
    LoopTrace tr{w,
                 Sequence(plant.state_dim(), H),
                 Sequence(plant.input_dim(), H),
                 Sequence(plant.state_dim(), H),
                 v,
                 d};
    SlController sl(psi);
    std::span<const Eigen::VectorXd> xs(tr.x.values()), us(tr.u.values());
    for (int t = 0; t <= H; ++t) {
        tr.x[t] = plant.step(t, xs.first(static_cast<size_t>(t)),
                             us.first(static_cast<size_t>(t))) +
                  w[t];
        tr.u[t] = sl.step(tr.x[t] + v[t]) + d[t];
        tr.w_hat[t] = sl.internal_state().back();
    }
    return tr;
}

inline LoopTrace simulate_perturbed(const Plant& plant, const ClmPair& psi, const Sequence& w) {
    return simulate_perturbed(plant, psi, w, Sequence(plant.state_dim(), w.horizon()),
                              Sequence(plant.input_dim(), w.horizon()));
}

}  // namespace sls

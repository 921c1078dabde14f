#pragma once

#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sls/sequence.hpp"

namespace sls {

enum class Strictness { causal, strictly_causal };

/// View of a signal prefix x_0..x_t. The newest sample can be pinned to zero,
/// which is how component functions are queried as A_t(0, x_{t-1:0}).
class History {
  public:
    /// Full prefix: past = x_0..x_{t-1}, current = x_t.
    static History prefix(std::span<const Eigen::VectorXd> values) {
        if (values.empty()) throw std::invalid_argument("History: empty prefix");
        return History(values.first(values.size() - 1), &values.back(),
                       static_cast<int>(values.back().size()));
    }

    /// Prefix with the newest sample replaced by zero: (0, x_{t-1:0}).
    static History zeroed_current(std::span<const Eigen::VectorXd> past, int dim) {
        return History(past, nullptr, dim);
    }

    /// Time index of the newest sample.
    int t() const { return static_cast<int>(past_.size()); }
    int dim() const { return dim_; }
    bool current_is_zeroed() const { return current_ == nullptr; }

    /// Sample at time k, 0 <= k <= t.
    const Eigen::VectorXd& at(int k) const {
        const int tt = t();
        if (k < 0 || k > tt) throw std::out_of_range("History::at: index outside prefix");
        if (k == tt) return current_ ? *current_ : zero_;
        return past_[static_cast<size_t>(k)];
    }

    /// Sample `age` steps before the newest one (age = 0 is x_t).
    const Eigen::VectorXd& back(int age) const { return at(t() - age); }

    /// Sub-prefix ending at time j <= t.
    History sub(int j) const {
        const int tt = t();
        if (j < 0 || j > tt) throw std::out_of_range("History::sub: index outside prefix");
        if (j == tt) return *this;
        return History(past_.first(static_cast<size_t>(j)), &past_[static_cast<size_t>(j)], dim_);
    }

    /// Materialize x_0..x_t (zeroed current included) into a vector.
    std::vector<Eigen::VectorXd> collect() const {
        std::vector<Eigen::VectorXd> out;
        out.reserve(static_cast<size_t>(t()) + 1);
        for (int k = 0; k <= t(); ++k) out.push_back(at(k));
        return out;
    }

  private:
    History(std::span<const Eigen::VectorXd> past, const Eigen::VectorXd* current, int dim)
        : past_(past), current_(current), dim_(dim) {
        if (!current_) zero_ = Eigen::VectorXd::Zero(dim_);
    }

    std::span<const Eigen::VectorXd> past_;
    const Eigen::VectorXd* current_;
    int dim_;
    Eigen::VectorXd zero_;
};

/// Causal operator between finite-horizon sequence spaces, characterized by
/// its component functions y_t = A_t(x_{t:0}).
class CausalOperator {
  public:
    using ComponentFn = std::function<Eigen::VectorXd(int t, const History& x)>;
    using BatchFn = std::function<Sequence(const Sequence&)>;

    static constexpr int kUnboundedHorizon = std::numeric_limits<int>::max();

    CausalOperator() = default;

    CausalOperator(int in_dim, int out_dim, Strictness strictness, ComponentFn component,
                   int max_horizon = kUnboundedHorizon)
        : in_dim_(in_dim),
          out_dim_(out_dim),
          strictness_(strictness),
          max_horizon_(max_horizon),
          component_(std::move(component)) {
        if (in_dim_ <= 0 || out_dim_ <= 0)
            throw std::invalid_argument("CausalOperator: dimensions must be positive");
        if (!component_) throw std::invalid_argument("CausalOperator: missing component function");
    }

    int in_dim() const { return in_dim_; }
    int out_dim() const { return out_dim_; }
    int max_horizon() const { return max_horizon_; }
    bool strictly_causal() const { return strictness_ == Strictness::strictly_causal; }

    /// Marks the operator as I + (strictly causal), i.e. A_t(x) = x_t + S_t(x_{t-1:0}).
    bool identity_leading() const { return identity_leading_; }
    CausalOperator& mark_identity_leading(bool v = true) {
        identity_leading_ = v;
        return *this;
    }

    /// Attach a whole-sequence evaluator (must agree with the component functions).
    CausalOperator& with_batch(BatchFn batch) {
        batch_ = std::move(batch);
        return *this;
    }

    Eigen::VectorXd component(int t, const History& x) const {
        if (x.dim() != in_dim_)
            throw std::invalid_argument("CausalOperator: history dim " + std::to_string(x.dim()) +
                                        " does not match input dim " + std::to_string(in_dim_));
        if (t > max_horizon_)
            throw std::invalid_argument("CausalOperator: time index beyond operator horizon");
        return component_(t, x);
    }

    /// A(x) = (A_0(x_0), A_1(x_1, x_0), ...).
    Sequence evaluate(const Sequence& x) const {
        if (x.dim() != in_dim_)
            throw std::invalid_argument("CausalOperator: input dim " + std::to_string(x.dim()) +
                                        " does not match operator input dim " +
                                        std::to_string(in_dim_));
        if (x.horizon() > max_horizon_)
            throw std::invalid_argument("CausalOperator: input horizon exceeds operator horizon");
        if (batch_) return batch_(x);
        Sequence y(out_dim_, x.horizon());
        std::span<const Eigen::VectorXd> vals(x.values());
        for (int t = 0; t <= x.horizon(); ++t)
            y[t] = component_(t, History::prefix(vals.first(static_cast<size_t>(t) + 1)));
        return y;
    }

    Sequence operator()(const Sequence& x) const { return evaluate(x); }

    static CausalOperator identity(int dim) {
        CausalOperator op(dim, dim, Strictness::causal,
                          [](int, const History& x) { return x.back(0); });
        op.mark_identity_leading();
        return op;
    }

    static CausalOperator zero(int in_dim, int out_dim) {
        return CausalOperator(in_dim, out_dim, Strictness::strictly_causal,
                              [out_dim](int, const History&) {
                                  return Eigen::VectorXd::Zero(out_dim).eval();
                              });
    }

    /// gain * x_{t-steps} (zero before the shift arrives).
    static CausalOperator delay(int dim, int steps = 1, double gain = 1.0) {
        if (steps < 1) throw std::invalid_argument("delay: steps must be >= 1");
        return CausalOperator(dim, dim, Strictness::strictly_causal,
                              [dim, steps, gain](int t, const History& x) -> Eigen::VectorXd {
                                  if (t < steps) return Eigen::VectorXd::Zero(dim);
                                  return gain * x.back(steps);
                              });
    }

    /// Memoryless causal operator y_t = f(x_t).
    static CausalOperator pointwise(int in_dim, int out_dim,
                                    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> f) {
        return CausalOperator(in_dim, out_dim, Strictness::causal,
                              [f = std::move(f)](int, const History& x) { return f(x.back(0)); });
    }

    static CausalOperator scaled_identity(int dim, double gain) {
        return CausalOperator(dim, dim, Strictness::causal,
                              [gain](int, const History& x) { return (gain * x.back(0)).eval(); });
    }

  private:
    int in_dim_ = 0;
    int out_dim_ = 0;
    Strictness strictness_ = Strictness::causal;
    bool identity_leading_ = false;
    int max_horizon_ = kUnboundedHorizon;
    ComponentFn component_;
    BatchFn batch_;
};

/// A(B(x)): component form materializes the inner prefix.
inline CausalOperator compose(const CausalOperator& a, const CausalOperator& b) {
    if (b.out_dim() != a.in_dim())
        throw std::invalid_argument("compose: inner output dim " + std::to_string(b.out_dim()) +
                                    " does not match outer input dim " +
                                    std::to_string(a.in_dim()));
    const Strictness s = (a.strictly_causal() || b.strictly_causal())
                             ? Strictness::strictly_causal
                             : Strictness::causal;
    const int horizon = std::min(a.max_horizon(), b.max_horizon());
    CausalOperator out(
        b.in_dim(), a.out_dim(), s,
        [a, b](int t, const History& x) {
            std::vector<Eigen::VectorXd> y(static_cast<size_t>(t) + 1);
            for (int j = 0; j <= t; ++j) y[static_cast<size_t>(j)] = b.component(j, x.sub(j));
            return a.component(t, History::prefix(y));
        },
        horizon);
    out.with_batch([a, b](const Sequence& x) { return a.evaluate(b.evaluate(x)); });
    return out;
}

/// A(x) + B(x). Composition is only left-distributive over this sum.
inline CausalOperator add(const CausalOperator& a, const CausalOperator& b) {
    if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim())
        throw std::invalid_argument("add: operator dimensions do not match");
    const Strictness s = (a.strictly_causal() && b.strictly_causal())
                             ? Strictness::strictly_causal
                             : Strictness::causal;
    CausalOperator out(
        a.in_dim(), a.out_dim(), s,
        [a, b](int t, const History& x) { return (a.component(t, x) + b.component(t, x)).eval(); },
        std::min(a.max_horizon(), b.max_horizon()));
    out.with_batch([a, b](const Sequence& x) { return a.evaluate(x) + b.evaluate(x); });
    return out;
}

inline CausalOperator subtract(const CausalOperator& a, const CausalOperator& b) {
    if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim())
        throw std::invalid_argument("subtract: operator dimensions do not match");
    const Strictness s = (a.strictly_causal() && b.strictly_causal())
                             ? Strictness::strictly_causal
                             : Strictness::causal;
    CausalOperator out(
        a.in_dim(), a.out_dim(), s,
        [a, b](int t, const History& x) { return (a.component(t, x) - b.component(t, x)).eval(); },
        std::min(a.max_horizon(), b.max_horizon()));
    out.with_batch([a, b](const Sequence& x) { return a.evaluate(x) - b.evaluate(x); });
    return out;
}

/// Randomized check that (a - I) is strictly causal: outputs at t must not
/// move when x_t does.
inline bool check_identity_leading(const CausalOperator& a, int horizon, int samples,
                                   unsigned seed, double tol = 1e-12) {
    if (a.in_dim() != a.out_dim()) return false;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n = a.in_dim();
    for (int s = 0; s < samples; ++s) {
        std::vector<Eigen::VectorXd> xs(static_cast<size_t>(horizon) + 1);
        for (auto& v : xs) {
            v = Eigen::VectorXd(n);
            for (int i = 0; i < n; ++i) v(i) = gauss(rng);
        }
        std::span<const Eigen::VectorXd> vals(xs);
        for (int t = 0; t <= horizon; ++t) {
            auto pre = vals.first(static_cast<size_t>(t) + 1);
            Eigen::VectorXd with = a.component(t, History::prefix(pre));
            Eigen::VectorXd without =
                a.component(t, History::zeroed_current(pre.first(static_cast<size_t>(t)), n));
            // strictly causal part must not see x_t: A_t(x) - x_t == A_t(0, x_{t-1:0})
            if (((with - xs[static_cast<size_t>(t)]) - without).lpNorm<Eigen::Infinity>() > tol)
                return false;
        }
    }
    return true;
}

/// Randomized strict-causality check: A_t(x_t, x_{t-1:0}) == A_t(0, x_{t-1:0}).
inline bool check_strict_causality(const CausalOperator& a, int horizon, int samples,
                                   unsigned seed, double tol = 1e-12) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n = a.in_dim();
    for (int s = 0; s < samples; ++s) {
        std::vector<Eigen::VectorXd> xs(static_cast<size_t>(horizon) + 1);
        for (auto& v : xs) {
            v = Eigen::VectorXd(n);
            for (int i = 0; i < n; ++i) v(i) = gauss(rng);
        }
        std::span<const Eigen::VectorXd> vals(xs);
        for (int t = 0; t <= horizon; ++t) {
            auto pre = vals.first(static_cast<size_t>(t) + 1);
            Eigen::VectorXd with = a.component(t, History::prefix(pre));
            Eigen::VectorXd without =
                a.component(t, History::zeroed_current(pre.first(static_cast<size_t>(t)), n));
            if ((with - without).lpNorm<Eigen::Infinity>() > tol) return false;
        }
    }
    return true;
}

/// Causal inverse of A = I + (strictly causal), by the forward recursion
/// b_t = a_t - A_t(0, b_{t-1:0}).
inline CausalOperator invert_causal(const CausalOperator& a, unsigned check_seed = 7,
                                    int check_horizon = 8, int check_samples = 2) {
    if (a.in_dim() != a.out_dim())
        throw std::invalid_argument("invert_causal: operator must be square");
    if (!a.identity_leading() &&
        !check_identity_leading(a, check_horizon, check_samples, check_seed))
        throw std::invalid_argument(
            "invert_causal: (A - I) failed the strict-causality sampling check");

    const int n = a.in_dim();
    auto solve_prefix = [a, n](const History& in) {
        std::vector<Eigen::VectorXd> b;
        b.reserve(static_cast<size_t>(in.t()) + 1);
        for (int j = 0; j <= in.t(); ++j) {
            std::span<const Eigen::VectorXd> past(b);
            b.push_back(in.at(j) - a.component(j, History::zeroed_current(past, n)));
        }
        return b;
    };

    CausalOperator inv(
        n, n, Strictness::causal,
        [solve_prefix](int t, const History& in) {
            auto b = solve_prefix(in);
            return b[static_cast<size_t>(t)];
        },
        a.max_horizon());
    inv.mark_identity_leading();
    inv.with_batch([solve_prefix](const Sequence& in) {
        std::span<const Eigen::VectorXd> vals(in.values());
        auto b = solve_prefix(History::prefix(vals));
        return Sequence(std::move(b));
    });
    return inv;
}

}  // namespace sls

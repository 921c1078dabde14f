#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sls/clm.hpp"
#include "sls/kernel.hpp"
#include "sls/ltv_sls.hpp"
#include "sls/matrix_util.hpp"
#include "sls/plant.hpp"
#include "sls/random.hpp"
#include "sls/sequence.hpp"
#include "sls/simulate.hpp"
#include "sls/sl_controller.hpp"

namespace sls {

/// Closed bounded convex set containing the origin: a coordinate box or a
/// p-norm ball. Projection is the generalized saturation sat(. | set).
class ConvexSet {
  public:
    enum class Kind { box, ball };

    static ConvexSet box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
        if (lo.size() != hi.size()) throw std::invalid_argument("ConvexSet::box: size mismatch");
        for (int i = 0; i < lo.size(); ++i) {
            if (lo(i) > hi(i)) throw std::invalid_argument("ConvexSet::box: bounds out of order");
            if (lo(i) > 0.0 || hi(i) < 0.0)
                throw std::invalid_argument("ConvexSet::box: must contain the origin");
        }
        ConvexSet s;
        s.kind_ = Kind::box;
        s.lo_ = std::move(lo);
        s.hi_ = std::move(hi);
        return s;
    }

    static ConvexSet ball(Norm norm, double radius, int dim) {
        if (radius <= 0.0) throw std::invalid_argument("ConvexSet::ball: radius must be positive");
        if (dim <= 0) throw std::invalid_argument("ConvexSet::ball: dim must be positive");
        ConvexSet s;
        s.kind_ = Kind::ball;
        s.norm_ = norm;
        s.radius_ = radius;
        s.dim_ = dim;
        return s;
    }

    /// Symmetric box [-h, h].
    static ConvexSet centered_box(const Eigen::VectorXd& half_widths) {
        return box(-half_widths, half_widths);
    }

    Kind kind() const { return kind_; }
    int dim() const { return kind_ == Kind::box ? static_cast<int>(lo_.size()) : dim_; }
    Norm ball_norm() const { return norm_; }
    double ball_radius() const { return radius_; }
    const Eigen::VectorXd& lower() const { return lo_; }
    const Eigen::VectorXd& upper() const { return hi_; }

    bool symmetric(double tol = 1e-12) const {
        if (kind_ == Kind::ball) return true;
        return (lo_ + hi_).lpNorm<Eigen::Infinity>() <= tol;
    }

    /// Half widths of a symmetric box (an inf-ball reads as a box).
    Eigen::VectorXd half_widths() const {
        if (kind_ == Kind::box) return 0.5 * (hi_ - lo_);
        if (norm_ == Norm::inf) return Eigen::VectorXd::Constant(dim_, radius_);
        throw std::invalid_argument("ConvexSet::half_widths: only boxes and inf-balls");
    }

    /// Nearest point in the set: coordinatewise clamp for boxes, radial scaling
    /// for balls (measured in the ball's own norm).
    Eigen::VectorXd project(const Eigen::VectorXd& w) const {
        if (w.size() != dim())
            throw std::invalid_argument("ConvexSet::project: dimension mismatch");
        if (kind_ == Kind::box) return w.cwiseMax(lo_).cwiseMin(hi_);
        const double n = vec_norm(w, norm_);
        if (n <= radius_) return w;
        return (radius_ / n) * w;
    }

    bool contains(const Eigen::VectorXd& w, double tol = 0.0) const {
        if (kind_ == Kind::box)
            return (w - lo_).minCoeff() >= -tol && (hi_ - w).minCoeff() >= -tol;
        return vec_norm(w, norm_) <= radius_ + tol;
    }

    /// Radius of the largest origin-centered `vec`-norm ball inside the set.
    double inscribed_radius(Norm vec) const {
        if (kind_ == Kind::box) {
            // the extreme coordinate of a unit ball is 1 for every p-norm
            double r = std::numeric_limits<double>::infinity();
            for (int i = 0; i < lo_.size(); ++i) r = std::min(r, std::min(hi_(i), -lo_(i)));
            return r;
        }
        // B_eta(vec) inside B_radius(norm_): eta * max_{|w|_vec = 1} |w|_{norm_} <= radius
        auto inv_p = [](Norm n) {
            switch (n) {
                case Norm::one: return 1.0;
                case Norm::two: return 0.5;
                case Norm::inf: return 0.0;
            }
            return 0.0;
        };
        const double exponent = std::max(0.0, inv_p(norm_) - inv_p(vec));
        return radius_ / std::pow(static_cast<double>(dim_), exponent);
    }

  private:
    Kind kind_ = Kind::box;
    Eigen::VectorXd lo_, hi_;
    Norm norm_ = Norm::two;
    double radius_ = 0.0;
    int dim_ = 0;
};

inline Eigen::VectorXd project(const ConvexSet& set, const Eigen::VectorXd& w) {
    return set.project(w);
}

/// One linear level of a blend: kernels (R^i, M^i) with R^i_{t,1} = I.
struct BlendLevel {
    LinearCausalKernel R;
    LinearCausalKernel M;
};

/// Nonlinear combination of N linear CLM pairs through selector operators:
///   Psi^x = I + sum_i (R^i - I) G^i,   Psi^u = sum_i M^i G^i.
/// Selectors are projection differences over nested sets, the sat-split pair,
/// or custom memoryless callbacks (partition then only sampled).
struct BlendSpec {
    enum class SelectorKind { nested_projection, sat_split, custom };

    std::vector<BlendLevel> levels;
    SelectorKind kind = SelectorKind::nested_projection;
    std::vector<ConvexSet> nested;     // Omega_1 .. Omega_{N-1}
    std::optional<ConvexSet> sat_set;  // W for sat_split
    int antiwindup_horizon = 0;        // T_bar for sat_split
    std::vector<std::function<Eigen::VectorXd(const Eigen::VectorXd&)>> custom;

    int state_dim() const { return levels.empty() ? 0 : levels.front().R.out_dim(); }
    int input_dim() const { return levels.empty() ? 0 : levels.front().M.out_dim(); }
    int horizon() const {
        int h = std::numeric_limits<int>::max();
        for (const auto& l : levels) h = std::min({h, l.R.horizon(), l.M.horizon()});
        return h;
    }
    int num_levels() const { return static_cast<int>(levels.size()); }

    /// w-tilde^i = G^i(w) for one time sample.
    Eigen::VectorXd selector(int i, const Eigen::VectorXd& w) const {
        switch (kind) {
            case SelectorKind::nested_projection: {
                const int nsets = static_cast<int>(nested.size());
                Eigen::VectorXd hi = i < nsets ? nested[static_cast<size_t>(i)].project(w) : w;
                Eigen::VectorXd lo = i == 0 ? Eigen::VectorXd::Zero(w.size()).eval()
                                            : nested[static_cast<size_t>(i - 1)].project(w);
                return hi - lo;
            }
            case SelectorKind::sat_split: {
                Eigen::VectorXd sat = sat_set->project(w);
                return i == 0 ? sat : (w - sat).eval();
            }
            case SelectorKind::custom:
                return custom[static_cast<size_t>(i)](w);
        }
        throw std::logic_error("BlendSpec::selector: bad kind");
    }

    void validate(unsigned seed = 2027, int samples = 32) const {
        if (levels.empty()) throw std::invalid_argument("BlendSpec: needs at least one level");
        const int n = state_dim();
        const int m = input_dim();
        for (const auto& l : levels) {
            if (l.R.in_dim() != n || l.R.out_dim() != n || l.M.in_dim() != n ||
                l.M.out_dim() != m)
                throw std::invalid_argument("BlendSpec: level kernel dimensions disagree");
            if (!l.R.leading_identity(1e-12))
                throw std::invalid_argument("BlendSpec: every R^i needs identity leading blocks");
        }
        switch (kind) {
            case SelectorKind::nested_projection:
                if (static_cast<int>(nested.size()) != num_levels() - 1)
                    throw std::invalid_argument(
                        "BlendSpec: nested selectors need N-1 sets for N levels");
                for (const auto& s : nested)
                    if (s.dim() != n)
                        throw std::invalid_argument("BlendSpec: selector set dimension");
                break;
            case SelectorKind::sat_split:
                if (num_levels() != 2)
                    throw std::invalid_argument("BlendSpec: sat-split blends have two levels");
                if (!sat_set || sat_set->dim() != n)
                    throw std::invalid_argument("BlendSpec: sat-split needs the set W");
                if (antiwindup_horizon < 1)
                    throw std::invalid_argument("BlendSpec: anti-windup horizon must be >= 1");
                break;
            case SelectorKind::custom:
                if (static_cast<int>(custom.size()) != num_levels())
                    throw std::invalid_argument("BlendSpec: one callback per level");
                break;
        }

        // sampled checks: nesting of the sets and the partition sum G^i = I
        Rng rng(seed);
        for (int s = 0; s + 1 < static_cast<int>(nested.size()); ++s) {
            for (int i = 0; i < samples; ++i) {
                Eigen::VectorXd p = nested[static_cast<size_t>(s)].project(
                    random_vector(rng, n, 4.0));
                if (!nested[static_cast<size_t>(s + 1)].contains(p, 1e-9))
                    throw std::invalid_argument("BlendSpec: selector sets are not nested");
            }
        }
        for (int i = 0; i < samples; ++i) {
            Eigen::VectorXd w = random_vector(rng, n, 3.0);
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
            for (int lvl = 0; lvl < num_levels(); ++lvl) sum += selector(lvl, w);
            if ((sum - w).lpNorm<Eigen::Infinity>() > 1e-9)
                throw std::invalid_argument("BlendSpec: selectors do not partition the identity");
        }
        for (int lvl = 0; lvl < num_levels(); ++lvl) {
            if (selector(lvl, Eigen::VectorXd::Zero(n)).lpNorm<Eigen::Infinity>() != 0.0)
                throw std::invalid_argument("BlendSpec: selectors must fix the origin");
        }
    }

    /// Operator pair (Psi^x, Psi^u) of the blend.
    ClmPair to_clm() const {
        validate();
        BlendSpec self = *this;
        const int n = state_dim();
        const int m = input_dim();
        const int H = horizon();

        CausalOperator psi_x(
            n, n, Strictness::causal,
            [self](int t, const History& w) {
                Eigen::VectorXd acc = w.at(t);
                for (int i = 0; i < self.num_levels(); ++i) {
                    const auto& r = self.levels[static_cast<size_t>(i)].R;
                    // R^i_{t,1} = I cancels the -w_tilde^i_t term of (R^i - I) G^i
                    for (int k = 2; k <= r.num_blocks(t); ++k)
                        acc.noalias() += r.block(t, k) * self.selector(i, w.at(t + 1 - k));
                }
                return acc;
            },
            H);
        psi_x.mark_identity_leading();

        CausalOperator psi_u(
            n, m, Strictness::causal,
            [self, m](int t, const History& w) {
                Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
                for (int i = 0; i < self.num_levels(); ++i) {
                    const auto& mk = self.levels[static_cast<size_t>(i)].M;
                    for (int k = 1; k <= mk.num_blocks(t); ++k)
                        acc.noalias() += mk.block(t, k) * self.selector(i, w.at(t + 1 - k));
                }
                return acc;
            },
            H);
        return ClmPair(std::move(psi_x), std::move(psi_u));
    }
};

/// SL controller realizing the blend (Eq. of the blended implementation:
/// w'_t = x_t - sum_i sum_{k>=2} R^i_{t,k} G^i(w'_{t+1-k})).
inline SlController blended_controller(const BlendSpec& spec) {
    ClmPair pair = spec.to_clm();
    return SlController(pair);
}

struct BlendResidualReport {
    double max_kernel_residual = 0.0;  // max_i max_{t,k} |Delta^i_{t,k}|_F
    double max_sample_residual = 0.0;  // max over w samples of |Delta[F, Psi](w)|_inf
};

/// Exact per-level residuals Delta^i = F^x R^i + F^u M^i + I - R^i plus a
/// sampled residual of the blended map on the given disturbances.
inline BlendResidualReport blend_residual_check(const Plant& plant, const BlendSpec& spec,
                                                const std::vector<Sequence>& w_samples) {
    if (!plant.is_linear())
        throw std::invalid_argument("blend_residual_check: plant must be linear");
    const int n = plant.state_dim();
    const int H = spec.horizon();

    LinearCausalKernel fx(n, n, H), fu(plant.input_dim(), n, H);
    if (plant.kernel_x()) {
        fx = *plant.kernel_x();
        fu = *plant.kernel_u();
    } else {
        fx = LinearCausalKernel(n, n, H, 2);
        fu = LinearCausalKernel(plant.input_dim(), n, H, 2);
        for (int t = 1; t <= H; ++t) {
            fx.set_block(t, 2, *plant.lti_a());
            fu.set_block(t, 2, *plant.lti_b());
        }
    }

    BlendResidualReport report;
    for (const auto& level : spec.levels) {
        LinearCausalKernel delta = kernel_add(
            kernel_add(kernel_compose(fx, level.R), kernel_compose(fu, level.M)),
            kernel_sub(LinearCausalKernel::identity(n, H), level.R));
        report.max_kernel_residual = std::max(report.max_kernel_residual, delta.max_block_abs());
    }

    ClmPair psi = spec.to_clm();
    for (const auto& w : w_samples)
        report.max_sample_residual =
            std::max(report.max_sample_residual,
                     lp_norm(clm_residual(plant, psi, w), Norm::inf, Norm::inf));
    return report;
}

struct ContainmentReport {
    bool contained = false;
    double min_margin_x = 0.0;  // min over rows/times of X_bound / worst_case
    double min_margin_u = 0.0;
    double worst_x = 0.0;  // largest worst-case row value against X
    double worst_u = 0.0;
};

/// Exact verification that R(w) stays in X and M(w) stays in U for every
/// sequence w with samples in W. Sets must be symmetric boxes or inf-balls;
/// the worst case per row is the sign-matched vertex of W.
inline ContainmentReport verify_containment(const FirClm& rm, const ConvexSet& w_set,
                                            const ConvexSet& x_set, const ConvexSet& u_set) {
    auto sym_half = [](const ConvexSet& s, const char* name) {
        if (!s.symmetric(1e-12))
            throw std::invalid_argument(std::string("verify_containment: ") + name +
                                        " must be a symmetric box or inf-ball");
        return s.half_widths();
    };
    const Eigen::VectorXd hw = sym_half(w_set, "W");
    const Eigen::VectorXd hx = sym_half(x_set, "X");
    const Eigen::VectorXd hu = sym_half(u_set, "U");
    if (hw.size() != rm.R.in_dim() || hx.size() != rm.R.out_dim() || hu.size() != rm.M.out_dim())
        throw std::invalid_argument("verify_containment: set dimensions do not match kernels");

    ContainmentReport rep;
    rep.min_margin_x = std::numeric_limits<double>::infinity();
    rep.min_margin_u = std::numeric_limits<double>::infinity();

    auto scan = [&](const LinearCausalKernel& k, const Eigen::VectorXd& cap, double& min_margin,
                    double& worst) {
        for (int t = 0; t <= k.horizon(); ++t) {
            for (int r = 0; r < k.out_dim(); ++r) {
                double bound = 0.0;
                for (int kk = 1; kk <= k.num_blocks(t); ++kk)
                    bound += k.block(t, kk).row(r).cwiseAbs().dot(hw);
                worst = std::max(worst, bound);
                min_margin = std::min(min_margin,
                                      bound == 0.0 ? std::numeric_limits<double>::infinity()
                                                   : cap(r) / bound);
            }
        }
    };
    scan(rm.R, hx, rep.min_margin_x, rep.worst_x);
    scan(rm.M, hu, rep.min_margin_u, rep.worst_u);
    rep.contained = rep.min_margin_x >= 1.0 && rep.min_margin_u >= 1.0;
    return rep;
}

/// Sat-split anti-windup wrap around a verified linear design: level 1 is the
/// given (R, M), level 2 the open-loop truncated pair R'_{t,k} = A^{k-1}
/// (k <= T_bar), M' = 0, with selectors G = sat(.|W), G' = id - G.
inline BlendSpec antiwindup_wrap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                 const FirClm& rm, const ConvexSet& w_set,
                                 const ConvexSet& x_set, const ConvexSet& u_set,
                                 std::optional<int> t_bar = std::nullopt,
                                 Norm contraction_norm = Norm::inf, int t_max = 64) {
    ContainmentReport cont = verify_containment(rm, w_set, x_set, u_set);
    if (!cont.contained)
        throw std::invalid_argument(
            "antiwindup_wrap: containment verification failed (margins x=" +
            std::to_string(cont.min_margin_x) + ", u=" + std::to_string(cont.min_margin_u) + ")");

    int horizon = rm.horizon();
    int tb;
    if (t_bar) {
        tb = *t_bar;
        if (tb < 1) throw std::invalid_argument("antiwindup_wrap: T_bar must be >= 1");
    } else {
        auto found = min_contraction_horizon(a, contraction_norm, t_max);
        if (!found)
            throw std::invalid_argument(
                "antiwindup_wrap: no contracting power |A^T| < 1 up to t_max; supply T_bar");
        tb = *found;
    }

    const int n = static_cast<int>(a.rows());
    LinearCausalKernel r_prime(n, n, horizon, tb);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    std::vector<Eigen::MatrixXd> powers;
    for (int k = 1; k <= tb; ++k) {
        powers.push_back(power);
        power = a * power;
    }
    for (int t = 0; t <= horizon; ++t)
        for (int k = 1; k <= r_prime.num_blocks(t); ++k)
            r_prime.set_block(t, k, powers[static_cast<size_t>(k - 1)]);
    LinearCausalKernel m_prime(n, static_cast<int>(b.cols()), horizon, 1);

    BlendSpec spec;
    spec.levels.push_back(BlendLevel{rm.R, rm.M});
    spec.levels.push_back(BlendLevel{std::move(r_prime), std::move(m_prime)});
    spec.kind = BlendSpec::SelectorKind::sat_split;
    spec.sat_set = w_set;
    spec.antiwindup_horizon = tb;
    spec.validate();
    return spec;
}

/// Reduced internal dynamics of the sat-split loop:
///   w'_t = A^{T_bar} (w'_{t-T_bar} - sat(w'_{t-T_bar} | W)) + w_t.
inline Sequence saturated_internal_dynamics(const BlendSpec& spec, const Eigen::MatrixXd& a,
                                            const Sequence& w) {
    if (spec.kind != BlendSpec::SelectorKind::sat_split)
        throw std::invalid_argument("saturated_internal_dynamics: needs a sat-split blend");
    const int tb = spec.antiwindup_horizon;
    const Eigen::MatrixXd a_tb = matrix_power(a, tb);
    const ConvexSet& wset = *spec.sat_set;

    Sequence what(w.dim(), w.horizon());
    for (int t = 0; t <= w.horizon(); ++t) {
        Eigen::VectorXd acc = w[t];
        if (t >= tb) {
            const Eigen::VectorXd& past = what[t - tb];
            acc.noalias() += a_tb * (past - wset.project(past));
        }
        what[t] = acc;
    }
    return what;
}

enum class AwpBranch { global, local, infeasible };

struct AwpBound {
    AwpBranch branch = AwpBranch::infeasible;
    std::optional<double> bound;          // on ||w_hat||_p
    double contraction = 0.0;             // |A^{T_bar}|
    double eta_bar = 0.0;                 // inscribed ball radius of W
    double admissible = 0.0;              // admissible ||w||_p for the local branch
    double gamma = 0.0;
};

/// Anti-windup transient bound: the global branch needs |A^{T_bar}| < 1; the
/// local branch holds for ||w||_p <= (1-gamma) |A^{T_bar}| eta / (|A^{T_bar}| - gamma).
inline AwpBound awp_bound(const Eigen::MatrixXd& a, int t_bar, const ConvexSet& w_set,
                          Norm vec, double w_norm, std::optional<double> gamma = std::nullopt) {
    if (t_bar < 1) throw std::invalid_argument("awp_bound: T_bar must be >= 1");
    AwpBound out;
    out.contraction = induced_norm(matrix_power(a, t_bar), vec);
    out.eta_bar = w_set.inscribed_radius(vec);
    if (out.eta_bar <= 0.0) throw std::invalid_argument("awp_bound: W has empty interior");

    if (gamma) {
        const double g = *gamma;
        if (g >= 0.0 && g < std::min(1.0, out.contraction)) {
            out.admissible =
                (1.0 - g) * out.contraction * out.eta_bar / (out.contraction - g);
            if (w_norm <= out.admissible) {
                out.branch = AwpBranch::local;
                out.gamma = g;
                out.bound = w_norm / (1.0 - g);
                return out;
            }
        }
    }
    if (out.contraction < 1.0) {
        out.branch = AwpBranch::global;
        out.gamma = out.contraction;
        out.bound = w_norm / (1.0 - out.contraction);
        out.admissible = std::numeric_limits<double>::infinity();
        return out;
    }
    if (!gamma) {
        // gamma = 0 is always admissible while the disturbance fits inside W
        out.admissible = out.eta_bar;
        if (w_norm <= out.eta_bar) {
            out.branch = AwpBranch::local;
            out.gamma = 0.0;
            out.bound = w_norm;
            return out;
        }
    }
    out.branch = AwpBranch::infeasible;
    return out;
}

struct ConvergenceReport {
    std::optional<int> entry_time;  // t' with x_t in X for all t > t'
    int last_saturated = -1;        // last t with w'_t outside W
    bool verified = false;          // x_t in X checked on the trace for t > t'
    double max_tail_term = 0.0;     // |x_t - R(sat(w'|W))_t|_inf past the entry time
};

/// Finite-time convergence of the sat-split loop: decomposes
/// x = R(sat(w'|W)) + R'(w' - sat(w'|W)) and reports the first time the
/// truncated tail term has died out (last saturation + T_bar + 1).
inline ConvergenceReport convergence_check(const LoopTrace& trace, const FirClm& rm,
                                           const ConvexSet& w_set, const ConvexSet& x_set,
                                           int t_bar, double tol = 1e-9) {
    ConvergenceReport rep;
    const int H = trace.w_hat.horizon();
    Sequence saturated(trace.w_hat.dim(), H);
    for (int t = 0; t <= H; ++t) {
        saturated[t] = w_set.project(trace.w_hat[t]);
        if ((trace.w_hat[t] - saturated[t]).lpNorm<Eigen::Infinity>() > tol)
            rep.last_saturated = t;
    }
    const int candidate = rep.last_saturated < 0 ? 0 : rep.last_saturated + t_bar + 1;
    if (candidate > H) return rep;  // no entry time within the simulated horizon

    rep.entry_time = candidate;
    rep.verified = true;
    Sequence contained_part = rm.apply_x(saturated);  // the s-term, in X by containment
    for (int t = candidate + 1; t <= H; ++t) {
        if (!x_set.contains(trace.x[t], 1e-7)) rep.verified = false;
        rep.max_tail_term = std::max(
            rep.max_tail_term, (trace.x[t] - contained_part[t]).lpNorm<Eigen::Infinity>());
    }
    return rep;
}

/// Saturated LTI plant H': x_t = A x_{t-1} + B sat(u_{t-1} | U) + w_t.
inline Plant saturated_plant(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                             const ConvexSet& u_set) {
    if (u_set.dim() != b.cols())
        throw std::invalid_argument("saturated_plant: U dimension mismatch");
    Plant p(static_cast<int>(a.rows()), static_cast<int>(b.cols()),
            [a, b, u_set](int, std::span<const Eigen::VectorXd> x,
                          std::span<const Eigen::VectorXd> u) {
                return (a * x.back() + b * u_set.project(u.back())).eval();
            });
    return p;
}

}  // namespace sls

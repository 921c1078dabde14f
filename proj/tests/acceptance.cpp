// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured quantity next to its threshold.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdio>

#include "sls/sls.hpp"
#include "stacked_qp_oracle.hpp"
#include "test_support.hpp"

using namespace sls;

namespace {

void verdict(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("[ACCEPTANCE %d] %-34s %s  (%s)\n", id, name, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    REQUIRE(pass);
}

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

FirClm random_exact_clm(Rng& rng, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int H,
                        double sigma = 0.2) {
    const int n = static_cast<int>(a.rows());
    const int m = static_cast<int>(b.cols());
    LinearCausalKernel rk(n, n, H);
    LinearCausalKernel mk(n, m, H);
    for (int t = 0; t <= H; ++t)
        for (int k = 1; k <= mk.num_blocks(t); ++k)
            mk.set_block(t, k, random_matrix(rng, m, n, sigma));
    for (int t = 0; t <= H; ++t) {
        rk.set_block(t, 1, Eigen::MatrixXd::Identity(n, n));
        for (int k = 2; k <= rk.num_blocks(t); ++k)
            rk.set_block(t, k, a * rk.block(t - 1, k - 1) + b * mk.block(t - 1, k - 1));
    }
    return FirClm{rk, mk, std::nullopt, std::nullopt};
}

ConvexSet covering_input_set(const FirClm& rm, const ConvexSet& w_set, double slack = 1.1) {
    Eigen::VectorXd hw = w_set.half_widths();
    double worst = 1e-9;
    for (int t = 0; t <= rm.M.horizon(); ++t)
        for (int r = 0; r < rm.M.out_dim(); ++r) {
            double bound = 0.0;
            for (int k = 1; k <= rm.M.num_blocks(t); ++k)
                bound += rm.M.block(t, k).row(r).cwiseAbs().dot(hw);
            worst = std::max(worst, bound);
        }
    return ConvexSet::ball(Norm::inf, slack * worst, rm.M.out_dim());
}

}  // namespace

TEST_CASE("criterion 1: exact realization of completed CLMs", "[acceptance]") {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1001);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Plant plant = testing::random_nonlinear_plant(rng, 3, 2);
        ClmPair psi = complete_clm(plant, testing::random_causal_psi_u(rng, 3, 2, 50));
        Sequence w = random_sequence(rng, 3, 50);

        SlController ctrl(psi);
        LoopTrace tr = simulate_nominal(plant, ctrl, w);
        worst = std::max(worst, max_abs_diff(tr.x, psi.map_x(w)));
        worst = std::max(worst, max_abs_diff(tr.u, psi.map_u(w)));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    verdict(1, "theorem-1 exact realization", worst <= 1e-10 && secs < 10.0,
            "max err " + num(worst) + " <= 1e-10, " + num(secs) + " s < 10 s");
}

TEST_CASE("criterion 2: causal inversion round trip", "[acceptance]") {
    Rng rng(1002);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 3);
        CausalOperator op = [&]() {
            if (trial % 2 == 0)
                return random_kernel(rng, n, n, 50, 6, 0.35, true).to_operator();
            // identity plus a strictly causal bounded nonlinearity
            Eigen::MatrixXd mix = random_matrix(rng, n, n, 0.4);
            CausalOperator o(n, n, Strictness::causal,
                             [n, mix](int t, const History& x) {
                                 Eigen::VectorXd y = x.back(0);
                                 if (t >= 1) {
                                     Eigen::VectorXd z = mix * x.back(1);
                                     for (int i = 0; i < n; ++i)
                                         y(i) += std::tanh(z(i)) * 0.8;
                                 }
                                 if (t >= 2) y += 0.2 * x.back(2);
                                 return y;
                             });
            o.mark_identity_leading();
            return o;
        }();
        Sequence a = random_sequence(rng, n, 50);
        CausalOperator inv = invert_causal(op);
        worst = std::max(worst, max_abs_diff(op.evaluate(inv.evaluate(a)), a));
        worst = std::max(worst, max_abs_diff(inv.evaluate(op.evaluate(a)), a));
    }
    verdict(2, "proposition-1 round trip", worst <= 1e-10, "max err " + num(worst) + " <= 1e-10");
}

TEST_CASE("criterion 3: small-gain bound on contractive delays", "[acceptance]") {
    Rng rng(1003);
    int violations = 0;
    double tightness = 0.0;
    for (double gamma : {0.3, 0.7, 0.9}) {
        CausalOperator delta = CausalOperator::delay(1, 1, gamma);
        CausalOperator eye_minus =
            subtract(CausalOperator::identity(1), delta).mark_identity_leading();
        CausalOperator inv = invert_causal(eye_minus);
        for (Norm p : {Norm::one, Norm::two, Norm::inf}) {
            for (int trial = 0; trial < 50; ++trial) {
                Sequence w = random_sequence(rng, 1, 120);
                if (lp_norm(inv.evaluate(w), p) > lp_norm(w, p) / (1.0 - gamma) + 1e-10)
                    ++violations;
            }
        }
        const Sequence what = inv.evaluate(Sequence::impulse(1, 120));
        tightness = std::max(
            tightness, std::abs(lp_norm(what, Norm::one) * (1.0 - gamma) - 1.0));
    }
    verdict(3, "appendix-B small-gain bound", violations == 0 && tightness <= 0.01,
            std::to_string(violations) + " violations, 1-norm impulse within " +
                num(tightness * 100.0) + "% of the bound");
}

TEST_CASE("criterion 4: LTV SLS synthesis correctness", "[acceptance]") {
    Rng rng(1004);
    double worst_subspace = 0.0;
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 4);
        const int m = 1 + static_cast<int>(rng() % 2);
        const int H = 10 + static_cast<int>(rng() % 31);
        // the terminal constraint needs (T-1)*m controls to zero an n-dim state
        const int t_min = n / m + (n % m ? 2 : 1);
        const int T = std::max(3, t_min) + static_cast<int>(rng() % 5);
        LtvModel model;
        for (int t = 0; t < H; ++t) {
            model.A.push_back(random_matrix(rng, n, n, 0.6));
            model.B.push_back(random_matrix(rng, n, m, 0.8));
        }
        FirSynthesis syn = synthesize_h2_fir(model, T);
        worst_subspace = std::max(worst_subspace, verify_subspace(syn.clm, model));
    }

    double worst_oracle = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const int m = 1 + static_cast<int>(rng() % 2);
        const int H = 8 + static_cast<int>(rng() % 13);
        const int t_min = n / m + (n % m ? 2 : 1);
        const int T = std::max(3, t_min) + static_cast<int>(rng() % 3);
        LtvModel model;
        for (int t = 0; t < H; ++t) {
            model.A.push_back(random_matrix(rng, n, n, 0.6));
            model.B.push_back(random_matrix(rng, n, m, 0.8));
        }
        FirSynthesis fast = synthesize_h2_fir(model, T);
        FirClm oracle = sls::testing::stacked_kkt_solve(model, T);
        for (int t = 0; t <= H; ++t)
            for (int k = 1; k <= std::min(t + 1, T); ++k) {
                worst_oracle = std::max(worst_oracle, (fast.clm.R.block(t, k) -
                                                       oracle.R.block(t, k))
                                                          .lpNorm<Eigen::Infinity>());
                worst_oracle = std::max(worst_oracle, (fast.clm.M.block(t, k) -
                                                       oracle.M.block(t, k))
                                                          .lpNorm<Eigen::Infinity>());
            }
    }

    LtvModel deadbeat = LtvModel::lti(Eigen::MatrixXd::Identity(1, 1),
                                      Eigen::MatrixXd::Identity(1, 1), 12);
    FirSynthesis syn = synthesize_h2_fir(deadbeat, 2);
    double deadbeat_err = 0.0;
    for (int t = 0; t < 12; ++t)
        deadbeat_err = std::max(deadbeat_err, std::abs(syn.clm.M.block(t, 1)(0, 0) + 1.0));

    verdict(4, "LTV SLS closed-form synthesis",
            worst_subspace <= 1e-8 && worst_oracle <= 1e-9 && deadbeat_err == 0.0,
            "subspace " + num(worst_subspace) + " <= 1e-8, vs stacked KKT " +
                num(worst_oracle) + " <= 1e-9, deadbeat err " + num(deadbeat_err));
}

TEST_CASE("criterion 5: cart-pole tracking testbed", "[acceptance]") {
    using namespace sls::cartpole;
    CartPoleParams p{1.0, 0.1, 0.5, 9.81, 0.033};

    // (a) equilibria are fixed points of the flow
    State up;
    up << 0.0, M_PI, 0.0, 0.0;
    const double eq_err =
        std::max((zoh_flow(p, State::Zero(), 0.0) - State::Zero()).lpNorm<Eigen::Infinity>(),
                 (zoh_flow(p, up, 0.0) - up).lpNorm<Eigen::Infinity>());

    // (b) fourth-order convergence
    State probe;
    probe << 0.1, 0.8, -0.2, 0.5;
    const State fine = zoh_flow(p, probe, 1.7, 256);
    const double e1 = (zoh_flow(p, probe, 1.7, 4) - fine).norm();
    const double e2 = (zoh_flow(p, probe, 1.7, 8) - fine).norm();
    const double e3 = (zoh_flow(p, probe, 1.7, 16) - fine).norm();
    const bool order_ok = std::abs(e1 / e2 - 16.0) <= 0.30 * 16.0 &&
                          std::abs(e2 / e3 - 16.0) <= 0.30 * 16.0;

    // (c, d) tracking loop on the heuristic swing-up reference, T = 60
    ReferenceTrajectory ref = heuristic_swingup_reference(p);
    TrackingModel tm = build_tracking_model(p, ref);
    FirSynthesis syn = synthesize_h2_fir(tm.model, 60);

    TrackingResult clean = run_tracking_experiment(p, ref, syn.clm, NoiseConfig{}, 1);

    NoiseConfig offset;
    offset.initial_offset << 0.0, M_PI / 4.0, 0.0, 0.0;
    TrackingResult recover = run_tracking_experiment(p, ref, syn.clm, offset, 2);
    const int H = ref.horizon();
    const int last_second = static_cast<int>(std::round(1.0 / p.sample_time));
    double peak = 0.0;
    double tail = 0.0;
    for (int t = 0; t <= H; ++t) {
        const double v = recover.trace.w_hat[t].lpNorm<Eigen::Infinity>();
        peak = std::max(peak, v);
        if (t > H - last_second) tail = std::max(tail, v);
    }

    const bool pass = eq_err <= 1e-9 && order_ok && clean.w_hat_inf <= 1e-8 &&
                      !recover.diverged && tail < 0.05 * peak;
    verdict(5, "cart-pole testbed",
            pass,
            "equilibria " + num(eq_err) + " <= 1e-9, RK4 ratios " + num(e1 / e2) + "/" +
                num(e2 / e3) + ", zero-noise |w_hat| " + num(clean.w_hat_inf) +
                " <= 1e-8, 45deg tail/peak " + num(tail / peak) + " < 0.05");
}

TEST_CASE("criterion 6: blend reduction equivalence", "[acceptance]") {
    Rng rng(1006);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const int m = 1 + static_cast<int>(rng() % 2);
        const int H = 20;
        Eigen::MatrixXd a = random_matrix(rng, n, n, 0.5);
        a *= 0.85 / std::max(1.0, induced_norm(a, Norm::inf));
        Eigen::MatrixXd b = random_matrix(rng, n, m, 0.8);
        FirClm rm = random_exact_clm(rng, a, b, H, 0.25);

        ConvexSet w_set = ConvexSet::ball(Norm::inf, 1.0, n);
        ConvexSet u_set = covering_input_set(rm, w_set);
        ConvexSet x_set = ConvexSet::ball(Norm::inf, 1e9, n);
        const int tbar = 1 + static_cast<int>(rng() % 3);
        BlendSpec spec = antiwindup_wrap(a, b, rm, w_set, x_set, u_set, tbar);

        Sequence w = random_sequence(rng, n, H, 1.3);
        Sequence reduced = saturated_internal_dynamics(spec, a, w);
        Plant plant = saturated_plant(a, b, u_set);
        SlController ctrl = blended_controller(spec);
        LoopTrace full = simulate_nominal(plant, ctrl, w);
        worst = std::max(worst, max_abs_diff(full.w_hat, reduced));
    }
    verdict(6, "saturated reduction equivalence", worst <= 1e-12,
            "max gap " + num(worst) + " <= 1e-12");
}

TEST_CASE("criterion 7: anti-windup transient bound", "[acceptance]") {
    Rng rng(1007);
    int violations = 0;
    int runs = 0;
    while (runs < 200) {
        const int n = 1 + static_cast<int>(rng() % 3);
        Eigen::MatrixXd a = random_matrix(rng, n, n, 0.7);
        const double sr = spectral_radius(a);
        if (sr >= 0.98) a *= 0.9 / sr;
        auto tbar = min_contraction_horizon(a, Norm::inf, 60);
        if (!tbar) continue;
        const double contraction = induced_norm(matrix_power(a, *tbar), Norm::inf);

        BlendSpec spec;
        spec.kind = BlendSpec::SelectorKind::sat_split;
        spec.sat_set = ConvexSet::ball(Norm::inf, 0.7 + 0.6 * (rng() % 100) / 100.0, n);
        spec.antiwindup_horizon = *tbar;

        for (Norm p : {Norm::one, Norm::two, Norm::inf}) {
            Sequence w = random_sequence(rng, n, 50, 1.0);
            Sequence what = saturated_internal_dynamics(spec, a, w);
            if (lp_norm(what, p, Norm::inf) >
                lp_norm(w, p, Norm::inf) / (1.0 - contraction) + 1e-9)
                ++violations;
        }
        ++runs;
    }

    // local branch on the unstable scalar A = 2, T_bar = 1
    Eigen::MatrixXd a2 = Eigen::MatrixXd::Constant(1, 1, 2.0);
    ConvexSet w_set = ConvexSet::ball(Norm::inf, 1.0, 1);
    bool local_ok = true;
    AwpBound bound = awp_bound(a2, 1, w_set, Norm::inf, 0.6, 0.5);
    local_ok = local_ok && bound.branch == AwpBranch::local &&
               std::abs(bound.admissible - 2.0 / 3.0) < 1e-12 &&
               std::abs(*bound.bound - 1.2) < 1e-12;
    BlendSpec local_spec;
    local_spec.kind = BlendSpec::SelectorKind::sat_split;
    local_spec.sat_set = w_set;
    local_spec.antiwindup_horizon = 1;
    for (Norm p : {Norm::one, Norm::two, Norm::inf}) {
        for (int trial = 0; trial < 30; ++trial) {
            Sequence w = clip_to_ball(random_sequence(rng, 1, 60, 0.3), p, Norm::inf,
                                      2.0 / 3.0 * 0.999);
            Sequence what = saturated_internal_dynamics(local_spec, a2, w);
            if (lp_norm(what, p, Norm::inf) > 2.0 * lp_norm(w, p, Norm::inf) + 1e-9)
                local_ok = false;
        }
    }
    verdict(7, "anti-windup lemma bounds", violations == 0 && local_ok,
            std::to_string(violations) + " violations over 200 runs x 3 norms, local branch " +
                (local_ok ? "validated" : "failed"));
}

TEST_CASE("criterion 8: finite-time convergence corollary", "[acceptance]") {
    Rng rng(1008);
    const int n = 2;
    const int H = 70;
    Eigen::MatrixXd a = random_matrix(rng, n, n, 0.5);
    a *= 0.7 / std::max(1.0, induced_norm(a, Norm::inf));
    Eigen::MatrixXd b = random_matrix(rng, n, 1, 0.8);
    FirClm rm = random_exact_clm(rng, a, b, H, 0.15);

    ConvexSet w_set = ConvexSet::ball(Norm::inf, 1.0, n);
    ConvexSet u_set = covering_input_set(rm, w_set);
    ContainmentReport sizing =
        verify_containment(rm, w_set, ConvexSet::ball(Norm::inf, 1e9, n), u_set);
    ConvexSet x_set = ConvexSet::ball(Norm::inf, 1.05 * sizing.worst_x, n);
    const int tbar = *min_contraction_horizon(a, Norm::inf, 30);
    BlendSpec spec = antiwindup_wrap(a, b, rm, w_set, x_set, u_set, tbar);
    Plant plant = saturated_plant(a, b, u_set);

    SlController c1 = blended_controller(spec);
    LoopTrace impulse = simulate_nominal(plant, c1, Sequence::impulse(n, H, 0, 9.0, 8));
    ConvergenceReport r1 = convergence_check(impulse, rm, w_set, x_set, tbar);

    SlController c2 = blended_controller(spec);
    LoopTrace persistent =
        simulate_nominal(plant, c2, Sequence::constant(Eigen::VectorXd::Constant(n, 5.0), H));
    ConvergenceReport r2 = convergence_check(persistent, rm, w_set, x_set, tbar);

    const bool pass = r1.entry_time.has_value() && r1.verified && !r2.entry_time.has_value();
    verdict(8, "convergence corollary", pass,
            "impulse t' = " +
                (r1.entry_time ? std::to_string(*r1.entry_time) : std::string("none")) +
                " verified in X, persistent -> " +
                (r2.entry_time ? std::to_string(*r2.entry_time) : std::string("none")));
}

TEST_CASE("criterion 9: nested-ball blend realizes its own map", "[acceptance]") {
    Rng rng(1009);
    double worst = 0.0;
    Eigen::MatrixXd a = random_matrix(rng, 2, 2, 0.4);
    Eigen::MatrixXd b = random_matrix(rng, 2, 1, 0.8);
    const int H = 35;
    BlendSpec spec;
    FirClm lvl1 = random_exact_clm(rng, a, b, H, 0.3);
    FirClm lvl2 = random_exact_clm(rng, a, b, H, 0.1);
    spec.levels.push_back(BlendLevel{lvl1.R, lvl1.M});
    spec.levels.push_back(BlendLevel{lvl2.R, lvl2.M});
    spec.nested.push_back(ConvexSet::ball(Norm::two, 1.0, 2));

    Plant plant = Plant::lti(a, b);
    ClmPair psi = spec.to_clm();
    for (int trial = 0; trial < 50; ++trial) {
        Sequence w = random_sequence(rng, 2, H);
        SlController ctrl = blended_controller(spec);
        LoopTrace tr = simulate_nominal(plant, ctrl, w);
        worst = std::max(worst, max_abs_diff(tr.x, psi.map_x(w)));
        worst = std::max(worst, max_abs_diff(tr.u, psi.map_u(w)));
    }
    verdict(9, "blend lemma realization", worst <= 1e-10, "max err " + num(worst) + " <= 1e-10");
}

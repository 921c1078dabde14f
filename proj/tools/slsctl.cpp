// slsctl: synthesis, simulation, and certification driver.
//
// Subcommands: synthesize, simulate, certify, demo-cartpole, demo-antiwindup.
// Every run writes its artifacts under --out-dir together with a manifest
// listing the files and the config hash.
//
// Exit codes: 0 success, 1 runtime error, 2 config error, 3 infeasibility,
// 4 certification failure.

#include <CLI11.hpp>
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "config.hpp"
#include "sls/sls.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNotCertified = 4;

struct OutDir {
    std::filesystem::path path;
    std::vector<std::string> artifacts;

    explicit OutDir(const std::string& dir) : path(dir) {
        std::filesystem::create_directories(path);
    }

    std::string file(const std::string& name) {
        artifacts.push_back(name);
        return (path / name).string();
    }

    /// FirClm bundles expand to several files under one stem.
    std::string clm_stem(const std::string& stem, bool offsets) {
        for (const char* suffix : {".json", ".R.csv", ".M.csv"})
            artifacts.push_back(stem + suffix);
        if (offsets) {
            artifacts.push_back(stem + ".r.csv");
            artifacts.push_back(stem + ".m.csv");
        }
        return (path / stem).string();
    }

    void write_manifest(const slsctl::Config& cfg, std::optional<unsigned> seed) {
        std::ofstream out(path / "manifest.txt");
        out << "config_hash " << cfg.hash() << "\n";
        if (seed) out << "seed " << *seed << "\n";
        for (const auto& a : artifacts) out << "artifact " << a << "\n";
    }
};

sls::Norm parse_norm(const std::string& p) {
    if (p == "1" || p == "one") return sls::Norm::one;
    if (p == "2" || p == "two") return sls::Norm::two;
    if (p == "inf") return sls::Norm::inf;
    throw slsctl::ConfigError("unknown p-norm: " + p + " (expected 1, 2 or inf)");
}

unsigned require_seed(const std::optional<unsigned>& seed, const char* what) {
    if (!seed)
        throw slsctl::ConfigError(std::string("--seed is mandatory for ") + what);
    return *seed;
}

sls::cartpole::CartPoleParams cartpole_params(const slsctl::Config& cfg) {
    sls::cartpole::CartPoleParams p;
    p.cart_mass = cfg.get_double("cartpole.cart_mass", p.cart_mass);
    p.pole_mass = cfg.get_double("cartpole.pole_mass", p.pole_mass);
    p.pole_length = cfg.get_double("cartpole.pole_length", p.pole_length);
    p.gravity = cfg.get_double("cartpole.gravity", p.gravity);
    p.sample_time = cfg.get_double("cartpole.sample_time", p.sample_time);
    p.validate();
    return p;
}

sls::cartpole::ReferenceTrajectory load_or_build_reference(
    const slsctl::Config& cfg, const sls::cartpole::CartPoleParams& params) {
    const std::string source = cfg.get_string("cartpole.reference", "heuristic");
    if (source == "heuristic") {
        sls::cartpole::HeuristicConfig h;
        h.duration_s = cfg.get_double("cartpole.duration_s", h.duration_s);
        return sls::cartpole::heuristic_swingup_reference(params, h);
    }
    return sls::io::load_reference(cfg.get_path("cartpole.reference"));
}

sls::LtvModel lti_model(const slsctl::Config& cfg) {
    Eigen::MatrixXd a = cfg.get_matrix("lti.a");
    Eigen::MatrixXd b = cfg.get_matrix("lti.b");
    const int horizon = cfg.get_int("lti.horizon");
    if (horizon < 1) throw slsctl::ConfigError("lti.horizon must be >= 1");
    return sls::LtvModel::lti(a, b, horizon);
}

// ---------------------------------------------------------------------------
// synthesize
// ---------------------------------------------------------------------------

int cmd_synthesize(const slsctl::Config& cfg, OutDir& out) {
    using namespace sls;
    const std::string model_kind = cfg.get_string("model");
    LtvModel model;
    std::optional<cartpole::ReferenceTrajectory> ref;

    if (model_kind == "lti") {
        model = lti_model(cfg);
    } else if (model_kind == "cartpole") {
        cartpole::CartPoleParams params = cartpole_params(cfg);
        ref = load_or_build_reference(cfg, params);
        cartpole::TrackingModel tm = cartpole::build_tracking_model(params, *ref);
        model = std::move(tm.model);
        io::save_reference(*ref, out.file("reference.csv"));
    } else {
        throw slsctl::ConfigError("model must be lti or cartpole");
    }

    H2Weights weights;
    if (cfg.has("weights.state")) weights.state = cfg.get_vector("weights.state");
    if (cfg.has("weights.input")) weights.input = cfg.get_vector("weights.input");

    const int T = cfg.get_int("fir.horizon");
    FirSynthesis syn = synthesize_h2_fir(model, T, weights);
    const double violation = verify_subspace(syn.clm, model);
    const double cost = h2_cost(syn.clm);

    io::save_fir_clm(syn.clm, out.clm_stem("kernels", syn.clm.r.has_value()));
    std::ofstream report(out.file("synthesize_report.txt"));
    report << "model " << model_kind << "\n"
           << "state_dim " << model.state_dim() << "\n"
           << "input_dim " << model.input_dim() << "\n"
           << "horizon " << model.horizon() << "\n"
           << "fir_horizon " << T << "\n"
           << "h2_cost " << io::fmt(cost) << "\n"
           << "kkt_residual " << io::fmt(syn.kkt_residual) << "\n"
           << "subspace_violation " << io::fmt(violation) << "\n";
    std::cout << "synthesize: cost=" << cost << " kkt=" << syn.kkt_residual
              << " subspace=" << violation << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

sls::Sequence disturbance_from_config(const slsctl::Config& cfg, const std::string& prefix,
                                      int dim, int horizon, sls::Rng& rng) {
    using namespace sls;
    if (cfg.has(prefix + ".impulse")) {
        Eigen::VectorXd spec = cfg.get_vector(prefix + ".impulse");  // coord, magnitude, time
        if (spec.size() != 3) throw slsctl::ConfigError(prefix + ".impulse needs coord,mag,time");
        return Sequence::impulse(dim, horizon, static_cast<int>(spec(0)), spec(1),
                                 static_cast<int>(spec(2)));
    }
    const double sigma = cfg.get_double(prefix + ".sigma", 0.0);
    if (sigma == 0.0) return Sequence::zeros(dim, horizon);
    return random_sequence(rng, dim, horizon, sigma);
}

int cmd_simulate(const slsctl::Config& cfg, OutDir& out, std::optional<unsigned> seed_flag,
                 sls::Norm p) {
    using namespace sls;
    const std::string plant_kind = cfg.get_string("plant");

    if (plant_kind == "cartpole") {
        cartpole::CartPoleParams params = cartpole_params(cfg);
        cartpole::ReferenceTrajectory ref = load_or_build_reference(cfg, params);
        FirClm clm = io::load_fir_clm(cfg.get_path("kernels"));

        cartpole::NoiseConfig noise;
        bool stochastic = false;
        for (const auto& [key, target] :
             std::initializer_list<std::pair<const char*, Eigen::Vector4d*>>{
                 {"noise.w", &noise.w_sigma}, {"noise.v", &noise.v_sigma}}) {
            if (cfg.has(key)) {
                Eigen::VectorXd v = cfg.get_vector(key);
                if (v.size() != 4) throw slsctl::ConfigError(std::string(key) + " needs 4 sigmas");
                *target = v;
                stochastic = stochastic || v.lpNorm<Eigen::Infinity>() > 0.0;
            }
        }
        noise.d_sigma = cfg.get_double("noise.d", 0.0);
        stochastic = stochastic || noise.d_sigma > 0.0;
        if (cfg.has("offset")) {
            Eigen::VectorXd off = cfg.get_vector("offset");
            if (off.size() != 4) throw slsctl::ConfigError("offset needs 4 entries");
            noise.initial_offset = off;
        }
        unsigned seed = stochastic ? require_seed(seed_flag, "stochastic simulation")
                                   : seed_flag.value_or(0);

        cartpole::TrackingResult res =
            cartpole::run_tracking_experiment(params, ref, clm, noise, seed);
        io::save_trace(res.trace, out.file("trace.csv"));
        io::save_sequence(res.normalized_error, out.file("normalized_error.csv"));
        std::ofstream report(out.file("simulate_report.txt"));
        report << "plant cartpole\n"
               << "w_hat_inf " << io::fmt(res.w_hat_inf) << "\n"
               << "w_hat_p(" << to_string(p) << ") " << io::fmt(lp_norm(res.trace.w_hat, p))
               << "\n"
               << "diverged " << (res.diverged ? "yes" : "no") << "\n";
        if (res.diverged) report << "divergence_time " << res.divergence_time << "\n";
        std::cout << "simulate: |w_hat|_inf=" << res.w_hat_inf
                  << (res.diverged ? " DIVERGED" : "") << "\n";
        return kExitOk;
    }

    if (plant_kind != "lti") throw slsctl::ConfigError("plant must be lti or cartpole");

    LtvModel model = lti_model(cfg);
    Plant plant = Plant::lti(cfg.get_matrix("lti.a"), cfg.get_matrix("lti.b"));
    FirClm clm = io::load_fir_clm(cfg.get_path("kernels"));
    const int horizon = std::min(model.horizon(), clm.horizon());

    Rng rng(seed_flag.value_or(0));
    const bool stochastic = cfg.get_double("noise.w.sigma", 0.0) > 0.0 ||
                            cfg.get_double("noise.v.sigma", 0.0) > 0.0 ||
                            cfg.get_double("noise.d.sigma", 0.0) > 0.0;
    if (stochastic) rng.seed(require_seed(seed_flag, "stochastic simulation"));

    Sequence w = disturbance_from_config(cfg, "noise.w", plant.state_dim(), horizon, rng);
    Sequence v = disturbance_from_config(cfg, "noise.v", plant.state_dim(), horizon, rng);
    Sequence d = disturbance_from_config(cfg, "noise.d", plant.input_dim(), horizon, rng);

    ClmPair psi = ClmPair::affine(clm);
    LoopTrace tr = simulate_perturbed(plant, psi, w, v, d);
    io::save_trace(tr, out.file("trace.csv"));

    const double exact_x = max_abs_diff(tr.x, psi.map_x(w));
    const double exact_u = max_abs_diff(tr.u, psi.map_u(w));
    std::ofstream report(out.file("simulate_report.txt"));
    report << "plant lti\n"
           << "w_hat_p(" << to_string(p) << ") " << io::fmt(lp_norm(tr.w_hat, p)) << "\n"
           << "max_x_dev_from_clm " << io::fmt(exact_x) << "\n"
           << "max_u_dev_from_clm " << io::fmt(exact_u) << "\n";
    std::cout << "simulate: |w_hat|_" << to_string(p) << "=" << lp_norm(tr.w_hat, p)
              << " max|x - Psi^x(w)|=" << exact_x << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

int cmd_certify(const slsctl::Config& cfg, OutDir& out, std::optional<unsigned> seed_flag,
                sls::Norm p) {
    using namespace sls;
    const std::string target = cfg.get_string("target", "kernels");
    const unsigned seed = require_seed(seed_flag, "certification");

    if (target == "awp") {
        Eigen::MatrixXd a = cfg.get_matrix("awp.a");
        const int t_bar = cfg.get_int("awp.t_bar");
        ConvexSet w_set =
            ConvexSet::ball(Norm::inf, cfg.get_double("awp.w_radius", 1.0),
                            static_cast<int>(a.rows()));
        std::optional<double> gamma;
        if (cfg.has("awp.gamma")) gamma = cfg.get_double("awp.gamma");
        AwpBound bound = awp_bound(a, t_bar, w_set, p, cfg.get_double("awp.w_norm"), gamma);

        std::ofstream report(out.file("certify_report.txt"));
        const char* branch = bound.branch == AwpBranch::global    ? "global"
                             : bound.branch == AwpBranch::local   ? "local"
                                                                  : "infeasible";
        report << "target awp\nbranch " << branch << "\ncontraction "
               << io::fmt(bound.contraction) << "\neta_bar " << io::fmt(bound.eta_bar)
               << "\nadmissible " << io::fmt(bound.admissible) << "\n";
        if (bound.bound) report << "bound " << io::fmt(*bound.bound) << "\n";
        std::cout << "certify(awp): branch=" << branch << "\n";
        return bound.branch == AwpBranch::infeasible ? kExitNotCertified : kExitOk;
    }

    Plant plant = [&]() {
        if (target == "delay") {
            const double gamma = cfg.get_double("delay.gamma");
            Eigen::MatrixXd a = Eigen::MatrixXd::Constant(1, 1, gamma);
            return Plant::lti(a, Eigen::MatrixXd::Identity(1, 1));
        }
        return Plant::lti(cfg.get_matrix("lti.a"), cfg.get_matrix("lti.b"));
    }();

    ClmPair psi = [&]() {
        if (target == "delay")
            return ClmPair(CausalOperator::identity(1), CausalOperator::zero(1, 1));
        return ClmPair::affine(io::load_fir_clm(cfg.get_path("kernels")));
    }();

    const int horizon = cfg.get_int("horizon", 60);
    const double rho = cfg.get_double("rho", 10.0);
    const int samples = cfg.get_int("samples", 100);
    GainCertificate residual_cert =
        estimate_gain(residual_operator(plant, psi), p, rho, samples, seed, horizon);
    GainCertificate psi_x_cert = estimate_gain(psi.psi_x(), p, rho, samples, seed + 1, horizon);
    GainCertificate psi_u_cert = estimate_gain(psi.psi_u(), p, rho, samples, seed + 2, horizon);

    const int n_trials = cfg.get_int("trials", 5);
    const double w_sigma = cfg.get_double("noise.w.sigma", 1.0);
    const double v_sigma = cfg.get_double("noise.v.sigma", 0.0);
    const double d_sigma = cfg.get_double("noise.d.sigma", 0.0);
    Rng rng(seed + 3);
    std::vector<std::array<Sequence, 3>> trials;
    for (int i = 0; i < n_trials; ++i)
        trials.push_back({random_sequence(rng, plant.state_dim(), horizon, w_sigma),
                          random_sequence(rng, plant.state_dim(), horizon, v_sigma),
                          random_sequence(rng, plant.input_dim(), horizon, d_sigma)});

    LoopCertificationReport rep = certify_loop(plant, psi, residual_cert, trials);
    rep.psi_x_cert = psi_x_cert;
    rep.psi_u_cert = psi_u_cert;

    std::ofstream report(out.file("certify_report.txt"));
    report << rep.summary();
    std::cout << "certify: " << residual_cert.summary() << "\n"
              << (rep.all_pass && residual_cert.contractive() ? "CERTIFIED (empirical)"
                                                              : "NOT CERTIFIED")
              << "\n";
    return rep.all_pass && residual_cert.contractive() ? kExitOk : kExitNotCertified;
}

// ---------------------------------------------------------------------------
// demo-cartpole
// ---------------------------------------------------------------------------

int cmd_demo_cartpole(const slsctl::Config& cfg, OutDir& out, std::optional<unsigned> seed_flag) {
    using namespace sls;
    const unsigned seed = require_seed(seed_flag, "the cart-pole demo");
    cartpole::CartPoleParams params = cartpole_params(cfg);
    cartpole::ReferenceTrajectory ref = load_or_build_reference(cfg, params);
    io::save_reference(ref, out.file("reference.csv"));

    cartpole::TrackingModel tm = cartpole::build_tracking_model(params, ref);
    const int T = cfg.get_int("fir.horizon", 60);
    FirSynthesis syn = synthesize_h2_fir(tm.model, T);
    io::save_fir_clm(syn.clm, out.clm_stem("kernels", true));

    const double offset_deg = cfg.get_double("offset_deg", 45.0);
    cartpole::NoiseConfig nominal;
    nominal.initial_offset << 0.0, offset_deg * M_PI / 180.0, 0.0, 0.0;

    cartpole::NoiseConfig small = nominal;
    small.w_sigma = Eigen::Vector4d::Constant(0.002);
    small.v_sigma = Eigen::Vector4d::Constant(0.002);
    small.d_sigma = 0.02;

    cartpole::NoiseConfig large = nominal;
    large.w_sigma = Eigen::Vector4d::Constant(0.01);
    large.v_sigma = Eigen::Vector4d::Constant(0.01);
    large.d_sigma = 0.1;

    std::ofstream report(out.file("demo_report.txt"));
    report << "fir_horizon " << T << "\n"
           << "h2_cost " << io::fmt(h2_cost(syn.clm)) << "\n"
           << "subspace_violation " << io::fmt(verify_subspace(syn.clm, tm.model)) << "\n"
           << "offset_deg " << offset_deg << "\n";

    int exit_code = kExitOk;
    const std::array<std::pair<const char*, cartpole::NoiseConfig>, 3> scenarios{
        {{"nominal", nominal}, {"small", small}, {"large", large}}};
    for (const auto& [name, noise] : scenarios) {
        cartpole::TrackingResult res =
            cartpole::run_tracking_experiment(params, ref, syn.clm, noise, seed);
        io::save_trace(res.trace, out.file(std::string("trace_") + name + ".csv"));
        io::save_sequence(res.normalized_error,
                          out.file(std::string("normalized_error_") + name + ".csv"));
        const int H = ref.horizon();
        const int last_second = static_cast<int>(std::round(1.0 / params.sample_time));
        double tail = 0.0;
        for (int t = std::max(0, H - last_second + 1); t <= H; ++t)
            tail = std::max(tail, res.trace.w_hat[t].lpNorm<Eigen::Infinity>());
        report << "scenario " << name << " w_hat_inf " << io::fmt(res.w_hat_inf)
               << " w_hat_tail " << io::fmt(tail) << " diverged "
               << (res.diverged ? "yes" : "no") << "\n";
        std::cout << "demo-cartpole[" << name << "]: |w_hat|_inf=" << res.w_hat_inf
                  << " tail=" << tail << (res.diverged ? " DIVERGED" : "") << "\n";
        if (res.diverged) exit_code = kExitRuntime;
    }
    return exit_code;
}

// ---------------------------------------------------------------------------
// demo-antiwindup
// ---------------------------------------------------------------------------

int cmd_demo_antiwindup(const slsctl::Config& cfg, OutDir& out,
                        std::optional<unsigned> seed_flag, sls::Norm p) {
    using namespace sls;
    const unsigned seed = require_seed(seed_flag, "the anti-windup demo");

    Eigen::MatrixXd a(2, 2), b(2, 1);
    a << 0.7, 0.2, 0.0, 0.6;
    b << 0.0, 1.0;
    if (cfg.has("lti.a")) a = cfg.get_matrix("lti.a");
    if (cfg.has("lti.b")) b = cfg.get_matrix("lti.b");
    const int n = static_cast<int>(a.rows());
    const int horizon = cfg.get_int("horizon", 80);
    const int T = cfg.get_int("fir.horizon", 8);

    FirSynthesis syn = synthesize_h2_fir(LtvModel::lti(a, b, horizon), T);
    io::save_fir_clm(syn.clm, out.clm_stem("kernels", false));

    ConvexSet w_set = ConvexSet::ball(Norm::inf, cfg.get_double("w_radius", 1.0), n);
    ContainmentReport sizing = verify_containment(
        syn.clm, w_set, ConvexSet::ball(Norm::inf, 1e12, n),
        ConvexSet::ball(Norm::inf, 1e12, static_cast<int>(b.cols())));
    ConvexSet x_set = ConvexSet::ball(Norm::inf, 1.02 * sizing.worst_x, n);
    ConvexSet u_set = ConvexSet::ball(Norm::inf, 1.02 * sizing.worst_u,
                                      static_cast<int>(b.cols()));

    BlendSpec spec;
    try {
        spec = antiwindup_wrap(a, b, syn.clm, w_set, x_set, u_set);
    } catch (const std::invalid_argument& e) {
        std::cerr << "demo-antiwindup: " << e.what() << "\n";
        return kExitInfeasible;
    }
    const int t_bar = spec.antiwindup_horizon;
    Plant plant = saturated_plant(a, b, u_set);
    io::save_blend_spec(spec, (out.path / "blend").string());
    for (const char* f : {"blend.json", "blend.level0.R.csv", "blend.level0.M.csv",
                          "blend.level1.R.csv", "blend.level1.M.csv"})
        out.artifacts.push_back(f);

    std::ofstream report(out.file("demo_report.txt"));
    report << "t_bar " << t_bar << "\n"
           << "contraction " << io::fmt(induced_norm(matrix_power(a, t_bar), Norm::inf)) << "\n"
           << "x_radius " << io::fmt(1.02 * sizing.worst_x) << "\n"
           << "u_radius " << io::fmt(1.02 * sizing.worst_u) << "\n";

    Rng rng(seed);
    struct Scenario {
        std::string name;
        Sequence w;
    };
    std::vector<Scenario> scenarios;
    scenarios.push_back({"inside", clip_to_ball(random_sequence(rng, n, horizon, 0.4),
                                                Norm::inf, Norm::inf, 0.9)});
    scenarios.push_back({"impulse", Sequence::impulse(n, horizon, 0, 6.0, 10)});
    scenarios.push_back(
        {"persistent", Sequence::constant(Eigen::VectorXd::Constant(n, 4.0), horizon)});

    int exit_code = kExitOk;
    for (const auto& sc : scenarios) {
        SlController ctrl = blended_controller(spec);
        LoopTrace tr = simulate_nominal(plant, ctrl, sc.w);
        io::save_trace(tr, out.file("trace_" + sc.name + ".csv"));

        Sequence reduced = saturated_internal_dynamics(spec, a, sc.w);
        const double gap = max_abs_diff(tr.w_hat, reduced);

        AwpBound bound = awp_bound(a, t_bar, w_set, Norm::inf, lp_norm(sc.w, p, Norm::inf));
        ConvergenceReport conv = convergence_check(tr, syn.clm, w_set, x_set, t_bar);

        const char* branch = bound.branch == AwpBranch::global    ? "global"
                             : bound.branch == AwpBranch::local   ? "local"
                                                                  : "infeasible";
        report << "scenario " << sc.name << " reduction_gap " << io::fmt(gap) << " branch "
               << branch;
        if (bound.bound)
            report << " bound " << io::fmt(*bound.bound) << " w_hat_norm "
                   << io::fmt(lp_norm(tr.w_hat, p, Norm::inf));
        report << " entry_time "
               << (conv.entry_time ? std::to_string(*conv.entry_time) : std::string("none"))
               << " verified " << (conv.verified ? "yes" : "no") << "\n";

        std::cout << "demo-antiwindup[" << sc.name << "]: gap=" << gap << " branch=" << branch
                  << " t'="
                  << (conv.entry_time ? std::to_string(*conv.entry_time) : std::string("none"))
                  << "\n";
        if (bound.bound && lp_norm(tr.w_hat, p, Norm::inf) > *bound.bound + 1e-9)
            exit_code = kExitNotCertified;
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"system level synthesis toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<unsigned> seed;
    std::string p_norm = "2";

    for (const char* name :
         {"synthesize", "simulate", "certify", "demo-cartpole", "demo-antiwindup"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key = value config file")->required();
        sub->add_option("--out-dir", out_dir, "artifact directory");
        sub->add_option("--seed", seed, "rng seed (mandatory for stochastic runs)");
        sub->add_option("--p-norm", p_norm, "sequence norm: 1, 2 or inf");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        slsctl::Config cfg = slsctl::Config::load(config_path);
        OutDir out(out_dir);
        sls::Norm p = parse_norm(p_norm);

        int code = kExitRuntime;
        if (app.got_subcommand("synthesize")) code = cmd_synthesize(cfg, out);
        else if (app.got_subcommand("simulate")) code = cmd_simulate(cfg, out, seed, p);
        else if (app.got_subcommand("certify")) code = cmd_certify(cfg, out, seed, p);
        else if (app.got_subcommand("demo-cartpole")) code = cmd_demo_cartpole(cfg, out, seed);
        else if (app.got_subcommand("demo-antiwindup"))
            code = cmd_demo_antiwindup(cfg, out, seed, p);

        out.write_manifest(cfg, seed);
        return code;
    } catch (const slsctl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const sls::SynthesisInfeasible& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

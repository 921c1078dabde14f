#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "sls/causal_operator.hpp"
#include "sls/clm.hpp"
#include "sls/plant.hpp"
#include "sls/random.hpp"
#include "sls/sequence.hpp"
#include "sls/simulate.hpp"

namespace sls {

enum class GainMethod { ratio_sup, affine_fit };

/// Incremental finite-gain certificate: ||A(a) - A(a')||_p <= gamma ||a - a'||_p + beta
/// for all sampled pairs inside the lp ball of radius rho. Sampling-based
/// certificates are empirical under-estimates, not proofs.
struct GainCertificate {
    Norm p = Norm::two;
    double gamma = 0.0;
    double beta = 0.0;
    double rho = std::numeric_limits<double>::infinity();
    int sample_count = 0;
    GainMethod method = GainMethod::ratio_sup;
    bool exact = false;  // true only for the kernel-level induced-norm path
    unsigned seed = 0;

    bool contractive() const { return gamma < 1.0; }

    std::string summary() const {
        std::string s = "p=" + std::string(to_string(p)) + " gamma=" + std::to_string(gamma) +
                        " beta=" + std::to_string(beta);
        s += rho == std::numeric_limits<double>::infinity() ? " rho=inf"
                                                            : " rho=" + std::to_string(rho);
        s += " samples=" + std::to_string(sample_count);
        s += method == GainMethod::ratio_sup ? " method=ratio_sup" : " method=affine_fit";
        s += exact ? " provenance=exact" : " provenance=empirical";
        s += contractive() ? " status=CONTRACTIVE" : " status=NOT_CONTRACTIVE";
        return s;
    }
};

/// Samples incremental gains of a causal operator over pairs drawn from the
/// lp ball of radius rho: Gaussian draws plus impulse and constant probes.
inline GainCertificate estimate_gain(const CausalOperator& op, Norm p, double rho, int samples,
                                     unsigned seed, int horizon = 40,
                                     GainMethod method = GainMethod::ratio_sup,
                                     Norm vec = Norm::two) {
    if (samples < 2) throw std::invalid_argument("estimate_gain: need at least 2 samples");
    if (rho <= 0.0) throw std::invalid_argument("estimate_gain: rho must be positive");
    Rng rng(seed);
    const int n = op.in_dim();

    std::vector<Sequence> probes;
    probes.push_back(Sequence::zeros(n, horizon));
    probes.push_back(clip_to_ball(Sequence::impulse(n, horizon, 0, rho), p, vec, rho));
    probes.push_back(
        clip_to_ball(Sequence::constant(Eigen::VectorXd::Ones(n), horizon), p, vec, rho));
    for (int i = 0; i < samples; ++i)
        probes.push_back(clip_to_ball(random_sequence(rng, n, horizon), p, vec, rho));

    std::vector<std::pair<double, double>> points;  // (||a - a'||, ||A(a) - A(a')||)
    auto record = [&](const Sequence& a, const Sequence& b) {
        double dx = lp_norm(a - b, p, vec);
        if (dx < 1e-14) return;
        double dy = lp_norm(op.evaluate(a) - op.evaluate(b), p, vec);
        points.emplace_back(dx, dy);
    };
    // pair consecutive draws, every draw against zero, and the fixed probes
    for (size_t i = 1; i < probes.size(); ++i) {
        record(probes[i], probes[0]);
        if (i + 1 < probes.size()) record(probes[i], probes[i + 1]);
    }

    GainCertificate cert;
    cert.p = p;
    cert.rho = rho;
    cert.sample_count = static_cast<int>(points.size());
    cert.method = method;
    cert.seed = seed;

    if (points.empty()) return cert;

    if (method == GainMethod::ratio_sup) {
        double g = 0.0;
        for (auto [dx, dy] : points) g = std::max(g, dy / dx);
        cert.gamma = g;
        cert.beta = 0.0;
    } else {
        // least-squares line dy ~ gamma dx + beta, then lift beta to cover all samples
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [dx, dy] : points) {
            sx += dx;
            sy += dy;
            sxx += dx * dx;
            sxy += dx * dy;
        }
        const double m = static_cast<double>(points.size());
        double denom = m * sxx - sx * sx;
        double gamma = denom > 1e-14 ? (m * sxy - sx * sy) / denom : 0.0;
        gamma = std::max(0.0, gamma);
        double beta = 0.0;
        for (auto [dx, dy] : points) beta = std::max(beta, dy - gamma * dx);
        cert.gamma = gamma;
        cert.beta = beta;
    }
    return cert;
}

/// Exact certificate for a linear FIR kernel under p = inf (max row sum).
inline GainCertificate exact_linf_gain(const LinearCausalKernel& k) {
    GainCertificate cert;
    cert.p = Norm::inf;
    cert.gamma = k.linf_induced_norm();
    cert.beta = 0.0;
    cert.exact = true;
    cert.method = GainMethod::ratio_sup;
    return cert;
}

/// Small-gain bound (w_norm + beta) / (1 - gamma). Empty when gamma >= 1 or,
/// for finite rho, when the local hypothesis ||w|| < (1 - gamma) rho - beta fails.
inline std::optional<double> small_gain_bound(const GainCertificate& cert, double w_norm) {
    if (cert.gamma >= 1.0) return std::nullopt;
    if (std::isfinite(cert.rho) && !(w_norm < (1.0 - cert.gamma) * cert.rho - cert.beta))
        return std::nullopt;
    return (w_norm + cert.beta) / (1.0 - cert.gamma);
}

struct TrialReport {
    double w_hat_norm = 0.0;
    double driving_norm = 0.0;  // ||eps||_p with eps = F(Psi(w')-(v,-d)) - F(Psi(w')) + w + v
    std::optional<double> bound;
    bool pass = false;
    double margin = 0.0;
};

struct LoopCertificationReport {
    GainCertificate residual;
    std::optional<GainCertificate> psi_x_cert, psi_u_cert, plant_cert;
    std::vector<TrialReport> trials;
    bool all_pass = true;

    std::string summary() const {
        std::string s = "residual: " + residual.summary() + "\n";
        if (psi_x_cert) s += "psi_x:    " + psi_x_cert->summary() + "\n";
        if (psi_u_cert) s += "psi_u:    " + psi_u_cert->summary() + "\n";
        if (plant_cert) s += "plant:    " + plant_cert->summary() + "\n";
        for (size_t i = 0; i < trials.size(); ++i) {
            const auto& t = trials[i];
            s += "trial " + std::to_string(i) + ": |w_hat|=" + std::to_string(t.w_hat_norm) +
                 " |eps|=" + std::to_string(t.driving_norm);
            s += t.bound ? " bound=" + std::to_string(*t.bound) : " bound=infeasible";
            s += t.pass ? " PASS" : " FAIL";
            s += "\n";
        }
        s += all_pass ? "certification: PASS\n" : "certification: FAIL\n";
        return s;
    }
};

/// Simulates each (w, v, d) trial through the perturbed loop and checks
/// ||w_hat||_p against the small-gain bound driven by the reconstructed
/// eps = F(Psi(w_hat) - (v, -d)) - F(Psi(w_hat)) + w + v.
inline LoopCertificationReport certify_loop(const Plant& plant, const ClmPair& psi,
                                            const GainCertificate& residual_cert,
                                            const std::vector<std::array<Sequence, 3>>& trials,
                                            Norm vec = Norm::two) {
    LoopCertificationReport report;
    report.residual = residual_cert;
    const Norm p = residual_cert.p;

    for (const auto& [w, v, d] : trials) {
        LoopTrace tr = simulate_perturbed(plant, psi, w, v, d);

        Sequence px = psi.map_x(tr.w_hat);
        Sequence pu = psi.map_u(tr.w_hat);
        Sequence shifted_x = px - v;
        Sequence shifted_u = pu + d;
        Sequence eps = plant.evaluate(shifted_x, shifted_u) - plant.evaluate(px, pu);
        eps += w;
        eps += v;

        TrialReport t;
        t.w_hat_norm = lp_norm(tr.w_hat, p, vec);
        t.driving_norm = lp_norm(eps, p, vec);
        t.bound = small_gain_bound(residual_cert, t.driving_norm);
        t.pass = t.bound.has_value() && t.w_hat_norm <= *t.bound + 1e-9;
        t.margin = t.bound ? *t.bound - t.w_hat_norm : 0.0;
        report.trials.push_back(t);
        report.all_pass = report.all_pass && t.pass;
    }
    return report;
}

}  // namespace sls

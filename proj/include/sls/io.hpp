#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sls/blend.hpp"
#include "sls/cartpole.hpp"
#include "sls/clm.hpp"
#include "sls/kernel.hpp"
#include "sls/sequence.hpp"
#include "sls/simulate.hpp"

namespace sls::io {

/// Shortest round-trippable decimal form.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

// ---------------------------------------------------------------------------
// Sequence CSV: header "t,c0,c1,...", one row per time step.
// ---------------------------------------------------------------------------

inline void save_sequence(const Sequence& s, const std::string& path) {
    auto out = open_out(path);
    out << "t";
    for (int i = 0; i < s.dim(); ++i) out << ",c" << i;
    out << "\n";
    for (int t = 0; t <= s.horizon(); ++t) {
        out << t;
        for (int i = 0; i < s.dim(); ++i) out << "," << fmt(s[t](i));
        out << "\n";
    }
}

inline Sequence load_sequence(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty sequence file: " + path);
    const int dim = static_cast<int>(split_csv_line(line).size()) - 1;
    if (dim < 1) throw std::runtime_error("bad sequence header in " + path);
    std::vector<Eigen::VectorXd> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != dim + 1)
            throw std::runtime_error("ragged sequence row in " + path);
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = std::stod(cells[static_cast<size_t>(i) + 1]);
        vals.push_back(std::move(v));
    }
    if (vals.empty()) throw std::runtime_error("sequence file has no rows: " + path);
    return Sequence(std::move(vals));
}

// ---------------------------------------------------------------------------
// Kernel CSV: header "t,k,<out_dim*in_dim row-major entries>".
// ---------------------------------------------------------------------------

inline void save_kernel(const LinearCausalKernel& k, const std::string& path) {
    auto out = open_out(path);
    out << "t,k";
    for (int i = 0; i < k.out_dim() * k.in_dim(); ++i) out << ",b" << i;
    out << "\n";
    for (int t = 0; t <= k.horizon(); ++t)
        for (int kk = 1; kk <= k.num_blocks(t); ++kk) {
            out << t << "," << kk;
            const Eigen::MatrixXd b = k.block(t, kk);
            for (int r = 0; r < b.rows(); ++r)
                for (int c = 0; c < b.cols(); ++c) out << "," << fmt(b(r, c));
            out << "\n";
        }
}

inline LinearCausalKernel load_kernel(const std::string& path, int in_dim, int out_dim,
                                      int horizon, int fir) {
    auto in = open_in(path);
    LinearCausalKernel k(in_dim, out_dim, horizon, fir);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != 2 + in_dim * out_dim)
            throw std::runtime_error("ragged kernel row in " + path);
        const int t = std::stoi(cells[0]);
        const int kk = std::stoi(cells[1]);
        Eigen::MatrixXd b(out_dim, in_dim);
        int idx = 2;
        for (int r = 0; r < out_dim; ++r)
            for (int c = 0; c < in_dim; ++c) b(r, c) = std::stod(cells[static_cast<size_t>(idx++)]);
        k.set_block(t, kk, b);
    }
    return k;
}

// ---------------------------------------------------------------------------
// FirClm bundle: <stem>.json metadata plus <stem>.{R,M,r,m}.csv parts.
// ---------------------------------------------------------------------------

inline void save_fir_clm(const FirClm& clm, const std::string& stem) {
    nlohmann::json meta;
    meta["state_dim"] = clm.R.out_dim();
    meta["input_dim"] = clm.M.out_dim();
    meta["horizon"] = clm.R.horizon();
    meta["fir_horizon"] = clm.R.fir_bounded() ? clm.R.fir_horizon() : -1;
    meta["has_offsets"] = clm.r.has_value();
    auto out = open_out(stem + ".json");
    out << meta.dump(2) << "\n";
    save_kernel(clm.R, stem + ".R.csv");
    save_kernel(clm.M, stem + ".M.csv");
    if (clm.r) save_sequence(*clm.r, stem + ".r.csv");
    if (clm.m) save_sequence(*clm.m, stem + ".m.csv");
}

inline FirClm load_fir_clm(const std::string& stem) {
    nlohmann::json meta;
    open_in(stem + ".json") >> meta;
    const int n = meta.at("state_dim").get<int>();
    const int m = meta.at("input_dim").get<int>();
    const int horizon = meta.at("horizon").get<int>();
    int fir = meta.at("fir_horizon").get<int>();
    if (fir < 0) fir = LinearCausalKernel::kUnboundedFir;
    FirClm clm{load_kernel(stem + ".R.csv", n, n, horizon, fir),
               load_kernel(stem + ".M.csv", n, m, horizon, fir), std::nullopt, std::nullopt};
    if (meta.at("has_offsets").get<bool>()) {
        clm.r = load_sequence(stem + ".r.csv");
        clm.m = load_sequence(stem + ".m.csv");
    }
    clm.validate();
    return clm;
}

// ---------------------------------------------------------------------------
// BlendSpec bundle: <stem>.json (selector family, sets, kernel references)
// plus per-level kernel CSVs. Custom selector callbacks cannot serialize.
// ---------------------------------------------------------------------------

inline nlohmann::json set_to_json(const ConvexSet& s) {
    nlohmann::json j;
    if (s.kind() == ConvexSet::Kind::box) {
        j["kind"] = "box";
        j["lo"] = std::vector<double>(s.lower().data(), s.lower().data() + s.lower().size());
        j["hi"] = std::vector<double>(s.upper().data(), s.upper().data() + s.upper().size());
    } else {
        j["kind"] = "ball";
        j["norm"] = to_string(s.ball_norm());
        j["radius"] = s.ball_radius();
        j["dim"] = s.dim();
    }
    return j;
}

inline ConvexSet set_from_json(const nlohmann::json& j) {
    if (j.at("kind") == "box") {
        auto lo = j.at("lo").get<std::vector<double>>();
        auto hi = j.at("hi").get<std::vector<double>>();
        return ConvexSet::box(Eigen::Map<Eigen::VectorXd>(lo.data(), static_cast<int>(lo.size())),
                              Eigen::Map<Eigen::VectorXd>(hi.data(), static_cast<int>(hi.size())));
    }
    const std::string norm = j.at("norm").get<std::string>();
    Norm n = norm == "1" ? Norm::one : norm == "2" ? Norm::two : Norm::inf;
    return ConvexSet::ball(n, j.at("radius").get<double>(), j.at("dim").get<int>());
}

inline void save_blend_spec(const BlendSpec& spec, const std::string& stem) {
    if (spec.kind == BlendSpec::SelectorKind::custom)
        throw std::invalid_argument("save_blend_spec: custom selectors cannot serialize");
    nlohmann::json meta;
    meta["state_dim"] = spec.state_dim();
    meta["input_dim"] = spec.input_dim();
    meta["levels"] = spec.num_levels();
    meta["kind"] =
        spec.kind == BlendSpec::SelectorKind::sat_split ? "sat_split" : "nested_projection";
    if (spec.kind == BlendSpec::SelectorKind::sat_split) {
        meta["sat_set"] = set_to_json(*spec.sat_set);
        meta["antiwindup_horizon"] = spec.antiwindup_horizon;
    } else {
        meta["nested"] = nlohmann::json::array();
        for (const auto& s : spec.nested) meta["nested"].push_back(set_to_json(s));
    }
    meta["kernel_fir"] = nlohmann::json::array();
    meta["kernel_horizon"] = nlohmann::json::array();
    for (int i = 0; i < spec.num_levels(); ++i) {
        const auto& lvl = spec.levels[static_cast<size_t>(i)];
        meta["kernel_fir"].push_back(lvl.R.fir_bounded() ? lvl.R.fir_horizon() : -1);
        meta["kernel_fir"].push_back(lvl.M.fir_bounded() ? lvl.M.fir_horizon() : -1);
        meta["kernel_horizon"].push_back(lvl.R.horizon());
        save_kernel(lvl.R, stem + ".level" + std::to_string(i) + ".R.csv");
        save_kernel(lvl.M, stem + ".level" + std::to_string(i) + ".M.csv");
    }
    auto out = open_out(stem + ".json");
    out << meta.dump(2) << "\n";
}

inline BlendSpec load_blend_spec(const std::string& stem) {
    nlohmann::json meta;
    open_in(stem + ".json") >> meta;
    BlendSpec spec;
    const int n = meta.at("state_dim").get<int>();
    const int m = meta.at("input_dim").get<int>();
    const int levels = meta.at("levels").get<int>();
    for (int i = 0; i < levels; ++i) {
        const int horizon = meta.at("kernel_horizon")[static_cast<size_t>(i)].get<int>();
        int fr = meta.at("kernel_fir")[static_cast<size_t>(2 * i)].get<int>();
        int fm = meta.at("kernel_fir")[static_cast<size_t>(2 * i + 1)].get<int>();
        if (fr < 0) fr = LinearCausalKernel::kUnboundedFir;
        if (fm < 0) fm = LinearCausalKernel::kUnboundedFir;
        spec.levels.push_back(BlendLevel{
            load_kernel(stem + ".level" + std::to_string(i) + ".R.csv", n, n, horizon, fr),
            load_kernel(stem + ".level" + std::to_string(i) + ".M.csv", n, m, horizon, fm)});
    }
    if (meta.at("kind") == "sat_split") {
        spec.kind = BlendSpec::SelectorKind::sat_split;
        spec.sat_set = set_from_json(meta.at("sat_set"));
        spec.antiwindup_horizon = meta.at("antiwindup_horizon").get<int>();
    } else {
        spec.kind = BlendSpec::SelectorKind::nested_projection;
        for (const auto& j : meta.at("nested")) spec.nested.push_back(set_from_json(j));
    }
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// LoopTrace CSV: one column group per signal, one row per time step.
// ---------------------------------------------------------------------------

inline void save_trace(const LoopTrace& tr, const std::string& path) {
    auto out = open_out(path);
    auto group = [&](const char* name, int dim) {
        for (int i = 0; i < dim; ++i) out << "," << name << i;
    };
    out << "t";
    group("w", tr.w.dim());
    group("x", tr.x.dim());
    group("u", tr.u.dim());
    group("what", tr.w_hat.dim());
    group("v", tr.v.dim());
    group("d", tr.d.dim());
    out << "\n";
    for (int t = 0; t <= tr.x.horizon(); ++t) {
        out << t;
        for (const Sequence* s : {&tr.w, &tr.x, &tr.u, &tr.w_hat, &tr.v, &tr.d})
            for (int i = 0; i < s->dim(); ++i) out << "," << fmt((*s)[t](i));
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// Cart-pole reference CSV: columns (t, x_c, theta, x_dot, theta_dot, f),
// SI units, radians.
// ---------------------------------------------------------------------------

inline void save_reference(const cartpole::ReferenceTrajectory& ref, const std::string& path) {
    auto out = open_out(path);
    out << "t,x_c,theta,x_dot,theta_dot,f\n";
    for (int t = 0; t <= ref.horizon(); ++t) {
        out << t;
        for (int i = 0; i < 4; ++i) out << "," << fmt(ref.states[t](i));
        out << "," << fmt(ref.inputs[t](0)) << "\n";
    }
}

inline cartpole::ReferenceTrajectory load_reference(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty reference file: " + path);
    std::vector<Eigen::VectorXd> states;
    std::vector<Eigen::VectorXd> inputs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 6) throw std::runtime_error("reference rows need 6 columns: " + path);
        Eigen::VectorXd x(4), u(1);
        for (int i = 0; i < 4; ++i) x(i) = std::stod(cells[static_cast<size_t>(i) + 1]);
        u(0) = std::stod(cells[5]);
        states.push_back(std::move(x));
        inputs.push_back(std::move(u));
    }
    if (states.empty()) throw std::runtime_error("reference file has no rows: " + path);
    cartpole::ReferenceTrajectory ref{Sequence(std::move(states)), Sequence(std::move(inputs)),
                                      cartpole::ReferenceTrajectory::Source::file};
    ref.validate();
    return ref;
}

}  // namespace sls::io

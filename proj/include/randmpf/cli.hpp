// Copyright 2026 The randmpf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "randmpf/bounds.hpp"
#include "randmpf/ensemble.hpp"
#include "randmpf/experiment.hpp"
#include "randmpf/models.hpp"
#include "randmpf/mpf.hpp"
#include "randmpf/optimizer.hpp"
#include "randmpf/output.hpp"
#include "randmpf/sampling.hpp"
#include "randmpf/text_format.hpp"

namespace randmpf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// One b vector per non-empty line; '#' and ';' start comment lines. For
/// closed-form formulas the first line is block 0.
inline std::vector<std::vector<double>> read_b_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::vector<std::vector<double>> out;
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#' || line[first] == ';') continue;
        out.push_back(parse_list(line));
    }
    if (out.empty()) throw ConfigError("'" + path + "' holds no b vectors");
    return out;
}

/// Weighted sum of Pauli strings, e.g. "ZI", "0.5*XX+0.5*ZZ" or "ZZ-XI".
inline Observable parse_observable(const std::string& text, Eigen::Index dim) {
    std::string s;
    for (char c : text) {
        if (c != ' ') s += c;
    }
    if (s.empty()) throw ConfigError("empty observable");
    Matrix acc;
    std::size_t pos = 0;
    while (pos < s.size()) {
        double sign = 1.0;
        if (s[pos] == '+' || s[pos] == '-') {
            sign = s[pos] == '-' ? -1.0 : 1.0;
            ++pos;
        }
        // Terms end in a Pauli label, so a sign after a label starts the next term.
        std::size_t end = pos;
        while (end < s.size() && !((s[end] == '+' || s[end] == '-') && end > pos &&
                                   std::string_view("IXYZ").find(s[end - 1]) != std::string_view::npos)) {
            ++end;
        }
        if (end == s.size()) end = std::string::npos;
        std::string term = s.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        pos = end == std::string::npos ? s.size() : end;
        double coef = sign;
        std::string labels = term;
        if (auto star = term.find('*'); star != std::string::npos) {
            std::vector<double> c = parse_list(term.substr(0, star));
            if (c.size() != 1) throw ConfigError("bad observable coefficient in '" + term + "'");
            coef *= c[0];
            labels = term.substr(star + 1);
        }
        Matrix p;
        try {
            p = pauli_string(labels);
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("observable: ") + e.what());
        }
        if (p.rows() != dim) {
            throw ConfigError("observable '" + labels + "' has dimension " + std::to_string(p.rows()) +
                              ", model has " + std::to_string(dim));
        }
        if (acc.size() == 0) acc = Matrix::Zero(dim, dim);
        acc += coef * p;
    }
    return Observable(std::move(acc));
}

inline MPFSpec spec_from_flags(MpfKind kind, int chi, int R, int K, const std::string& b_file) {
    if (kind == MpfKind::ChildsWiebe) {
        if (!b_file.empty()) throw ConfigError("--b-file does not apply to Childs-Wiebe formulas");
        return cw_coefficients(chi, K);
    }
    if (b_file.empty()) return build_mpf(kind, chi, R, default_initial_b(chi, R, kind));
    auto b = read_b_file(b_file);
    const std::size_t blocks = kind == MpfKind::ClosedForm ? R + 1 : R;
    if (b.size() != blocks) {
        throw ConfigError("'" + b_file + "' holds " + std::to_string(b.size()) + " b vectors, " + kind_name(kind) +
                          " with R = " + std::to_string(R) + " needs " + std::to_string(blocks));
    }
    for (const auto& v : b) {
        if (v.size() != static_cast<std::size_t>(2 * chi * R + 1)) {
            throw ConfigError("'" + b_file + "': every b vector needs 2 chi R + 1 = " +
                              std::to_string(2 * chi * R + 1) + " entries");
        }
    }
    return build_mpf(kind, chi, R, b);
}

inline std::string normalize_method(const std::string& m) {
    if (m == "ts" || m == "trotter") return "ts";
    if (m == "cw" || m == "childswiebe") return "cw";
    if (m == "matching" || m == "m") return "matching";
    if (m == "closedform" || m == "closed-form" || m == "cf") return "closedform";
    throw ConfigError("unknown method '" + m + "'");
}

/// The matching or closed-form spec the experiment asks for.
inline MPFSpec resolve_spec(MpfKind kind, const ExperimentConfig& c, std::ostream& log) {
    if (c.b_source == "file") {
        const std::string& path = kind == MpfKind::Matching ? c.matching_file : c.closedform_file;
        if (path.empty()) throw ConfigError("b_source = file needs " + kind_name(kind) + "_file");
        MPFSpec s = load_mpf(path);
        if (s.kind() != kind || s.chi != c.chi || s.R != c.R) {
            throw ConfigError("'" + path + "' is not a " + kind_name(kind) + " formula with chi = " +
                              std::to_string(c.chi) + ", R = " + std::to_string(c.R));
        }
        return s;
    }
    if (c.b_source == "optimize") {
        const OptimizerConfig& oc = kind == MpfKind::Matching ? c.matching_optimizer : c.closedform_optimizer;
        OptimResult r = optimize_mpf(kind, c.chi, c.R, oc);
        log << "optimized " << kind_name(kind) << ": Xi = " << format_double(r.Xi)
            << ", zeta = " << format_double(r.zeta) << "\n";
        return build_mpf(kind, c.chi, c.R, r.b_list);
    }
    return build_mpf(kind, c.chi, c.R, default_initial_b(c.chi, c.R, kind));
}

/// Method cases in config order. With match_depth every case has R Suzuki
/// blocks along its deepest product.
inline std::vector<MethodCase> experiment_cases(const ExperimentConfig& c, std::ostream& log) {
    if (c.methods.empty()) throw ConfigError("no methods selected");
    const int r = c.r ? c.r : c.R;
    const int K = c.K ? c.K : c.R - 1;
    if (c.match_depth && (r != c.R || K != c.R - 1)) {
        throw ConfigError("match_depth requires r = R and K = R - 1 (got r = " + std::to_string(r) +
                          ", K = " + std::to_string(K) + ", R = " + std::to_string(c.R) + ")");
    }
    std::vector<MethodCase> cases;
    for (const std::string& raw : c.methods) {
        const std::string m = normalize_method(raw);
        if (m == "ts") cases.push_back(ts_case(c.chi, r));
        if (m == "cw") {
            if (K < 1) throw ConfigError("Childs-Wiebe needs K >= 1 (R >= 2 under match_depth)");
            cases.push_back(mpf_case(cw_coefficients(c.chi, K)));
        }
        if (m == "matching") cases.push_back(mpf_case(resolve_spec(MpfKind::Matching, c, log)));
        if (m == "closedform") cases.push_back(mpf_case(resolve_spec(MpfKind::ClosedForm, c, log)));
    }
    if (c.match_depth) {
        for (const MethodCase& mc : cases) {
            if (block_depth(mc.approx.root) != c.R) {
                throw ConfigError("method " + mc.name + " breaks depth parity");
            }
        }
    }
    return cases;
}

inline void emit_csv(const std::vector<CsvRow>& rows, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        write_csv(out, rows);
        return;
    }
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    write_csv(f, rows);
}

/// Flags shared by `bounds` and `distance`; values given on the command line
/// override the config file.
struct ExperimentFlags {
    std::string config;
    std::vector<std::string> methods;
    int chi = 0, R = 0, r = 0, K = 0;
    double tau_min = 0, tau_max = 0;
    int tau_points = 0;
    std::string b_source, matching_file, closedform_file, model, csv, svg;
    int n = 0;
    std::uint64_t model_seed = 0;
    int hops = 0;
    bool no_match_depth = false;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "experiment config file");
        app->add_option("--methods", methods, "subset of ts cw matching closedform");
        app->add_option("--chi", chi, "Suzuki order 2 chi");
        app->add_option("--R", R, "blocks along the deepest product");
        app->add_option("--r", r, "TS steps (needs --no-match-depth unless equal to R)");
        app->add_option("--K", K, "Childs-Wiebe K (needs --no-match-depth unless equal to R-1)");
        app->add_option("--tau-min", tau_min);
        app->add_option("--tau-max", tau_max);
        app->add_option("--tau-points", tau_points);
        app->add_option("--b-source", b_source, "default, optimize or file")
            ->check(CLI::IsMember({"default", "optimize", "file"}));
        app->add_option("--matching-file", matching_file);
        app->add_option("--closedform-file", closedform_file);
        app->add_option("--model", model);
        app->add_option("--n", n, "model size");
        app->add_option("--model-seed", model_seed, "SYK seed");
        app->add_option("--hops", hops, "basin-hopping budget when b_source = optimize");
        app->add_option("--csv", csv, "CSV output path (default stdout)");
        app->add_option("--svg", svg, "SVG plot path");
        app->add_flag("--no-match-depth", no_match_depth);
    }

    ExperimentConfig resolve() const {
        ExperimentConfig c = config.empty() ? ExperimentConfig{} : load_experiment_config(config);
        if (!methods.empty()) c.methods = methods;
        if (chi) c.chi = chi;
        if (R) c.R = R;
        if (r) c.r = r;
        if (K) c.K = K;
        if (tau_min > 0) c.tau_min = tau_min;
        if (tau_max > 0) c.tau_max = tau_max;
        if (tau_points) c.tau_points = tau_points;
        if (!b_source.empty()) c.b_source = b_source;
        if (!matching_file.empty()) c.matching_file = matching_file;
        if (!closedform_file.empty()) c.closedform_file = closedform_file;
        if (!model.empty()) c.model.model = model;
        if (n) c.model.n = n;
        if (model_seed) c.model.seed = model_seed;
        if (hops) c.matching_optimizer.hops = c.closedform_optimizer.hops = hops;
        if (!csv.empty()) c.csv = csv;
        if (!svg.empty()) c.svg = svg;
        if (no_match_depth) c.match_depth = false;
        if (c.chi < 1 || c.R < 1) throw ConfigError("chi and R must be >= 1");
        if (!(c.tau_min > 0) || !(c.tau_max > c.tau_min) || c.tau_points < 2) {
            throw ConfigError("tau grid must satisfy 0 < tau_min < tau_max and tau_points >= 2");
        }
        return c;
    }
};

inline int cmd_coeffs(const std::string& kind_s, int chi, int R, int K, const std::string& b_file,
                      const std::string& out_path, std::ostream& out) {
    const MpfKind kind = parse_kind(kind_s);
    if (chi < 1) throw ConfigError("--chi must be >= 1");
    if (kind == MpfKind::ChildsWiebe && K < 1) throw ConfigError("--K must be >= 1 for Childs-Wiebe");
    if (kind != MpfKind::ChildsWiebe && R < 1) throw ConfigError("--R must be >= 1");
    MPFSpec spec = spec_from_flags(kind, chi, R, K, b_file);
    out << "kind " << kind_name(kind) << "\nchi " << chi << "\n";
    auto print_block = [&](const std::string& name, const LBlock& b) {
        out << name << ".b " << format_list(b.b) << "\n"
            << name << ".nu " << format_list(b.nu) << "\n"
            << name << ".C " << format_list(b.C) << "\n"
            << name << ".condition " << format_double(b.condition) << "\n";
    };
    switch (kind) {
        case MpfKind::ChildsWiebe: {
            const auto& cw = std::get<ChildsWiebe>(spec.data);
            out << "K " << K << "\nell";
            for (int l : cw.ell) out << ' ' << l;
            out << "\nC " << format_list(cw.C) << "\n";
            break;
        }
        case MpfKind::Matching: {
            out << "R " << R << "\n";
            const auto& blocks = std::get<Matching>(spec.data).blocks;
            for (std::size_t i = 0; i < blocks.size(); ++i) print_block("block" + std::to_string(i + 1), blocks[i]);
            break;
        }
        case MpfKind::ClosedForm: {
            out << "R " << R << "\n";
            const auto& cf = std::get<ClosedForm>(spec.data);
            print_block("block0", cf.block0);
            for (std::size_t i = 0; i < cf.blocks.size(); ++i) print_block("block" + std::to_string(i + 1), cf.blocks[i]);
            break;
        }
    }
    out << "Xi " << format_double(spec.resolution) << "\n";
    if (kind != MpfKind::ChildsWiebe) out << "zeta " << format_double(zeta(spec)) << "\n";
    if (!out_path.empty()) {
        save_file(out_path, spec, [](std::ostream& o, const MPFSpec& s) { write_mpf(o, s); });
        out << "wrote " << out_path << "\n";
    }
    return kExitOk;
}

inline int cmd_bounds(const ExperimentConfig& c, std::ostream& out, std::ostream& log) {
    std::vector<MethodCase> cases = experiment_cases(c, log);
    const auto taus = log_grid(c.tau_min, c.tau_max, c.tau_points);
    std::vector<CsvRow> rows;
    // tau = Lambda t, and every bound depends on Lambda and t only through tau.
    for (double tau : taus) {
        for (const MethodCase& mc : cases) rows.push_back({tau, mc.name, mc.bound(1.0, tau), "bound"});
    }
    for (const MethodCase& mc : cases) {
        log << mc.name << ": order " << mc.order << ", blocks along deepest product "
            << block_depth(mc.approx.root) << "\n";
    }
    emit_csv(rows, c.csv, out);
    if (!c.svg.empty()) save_svg(c.svg, rows, "Error bounds", "bound");
    return kExitOk;
}

inline int cmd_distance(const ExperimentConfig& c, std::ostream& out, std::ostream& log) {
    HamiltonianSpec H = build_model(c.model);
    std::vector<MethodCase> cases = experiment_cases(c, log);
    const auto taus = log_grid(c.tau_min, c.tau_max, c.tau_points);
    log << "model " << c.model.model << ": dim " << H.dim() << ", L " << H.L() << ", Lambda "
        << format_double(lambda_norm(H)) << "\n";
    std::vector<SweepRow> sweep = distance_sweep(cases, H, taus, c.series_degree);
    std::vector<CsvRow> rows;
    int violations = 0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        for (std::size_t k = 0; k < cases.size(); ++k) {
            const SweepRow& s = sweep[k * taus.size() + i];
            rows.push_back({s.tau, s.method, s.distance, "distance"});
            rows.push_back({s.tau, s.method, s.bound, "bound"});
            if (s.distance > s.bound) {
                ++violations;
                log << "bound violated: " << s.method << " tau " << format_double(s.tau) << " distance "
                    << format_double(s.distance) << " > bound " << format_double(s.bound)
                    << (s.distance <= s.full_bound ? " (full-power bound holds)" : " (full-power bound also violated)")
                    << "\n";
            }
        }
    }
    emit_csv(rows, c.csv, out);
    if (!c.svg.empty()) save_svg(c.svg, rows, "Operator distance, " + c.model.model, "distance / bound");
    return violations ? kExitNumeric : kExitOk;
}

struct SampleArgs {
    std::string model = "toy";
    int n = 0;
    std::uint64_t model_seed = 1;
    std::string observable;
    std::string mpf_file;
    double epsilon = 0.1;
    double delta = 0.05;
    std::uint64_t seed = 1;
    double tau = 0.5;
    int state = 0;
    int runs = 1;
    std::uint64_t shots = 0;
};

inline int cmd_sample(const SampleArgs& a, std::ostream& out) {
    ModelConfig mc;
    mc.model = a.model;
    mc.n = a.n;
    mc.seed = a.model_seed;
    HamiltonianSpec H = build_model(mc);
    if (H.dim() > kDensityPathMaxDim * 4) throw ConfigError("sample: model dimension too large");
    const int nq = static_cast<int>(std::lround(std::log2(static_cast<double>(H.dim()))));
    if ((Eigen::Index{1} << nq) != H.dim()) throw ConfigError("sample: model is not a qubit model");
    const std::string obs_text = a.observable.empty() ? "Z" + std::string(static_cast<std::size_t>(nq - 1), 'I')
                                                      : a.observable;
    Observable O = parse_observable(obs_text, H.dim());
    if (O.rescaled()) out << "notice: observable norm exceeds 1, rescaled by " << format_double(O.scale()) << "\n";
    if (a.state < 0 || a.state >= H.dim()) throw ConfigError("sample: --state out of range");
    QuantumState rho = QuantumState::basis(H.dim(), a.state);
    MPFSpec spec = a.mpf_file.empty() ? cw_coefficients(1, 1) : load_mpf(a.mpf_file);
    if (!(a.tau > 0)) throw ConfigError("sample: --tau must be positive");
    const double t = a.tau / lambda_norm(H);

    SamplingEnsemble ens = mpf_ensemble(spec, H.L());
    CompiledEnsemble compiled = compile(ens, H, t);
    const double Xi = ens.resolution;
    const std::uint64_t N = a.shots ? a.shots : resolution_shots(Xi, a.epsilon, a.delta).N;
    const double reference = expectation(O, rho, exact_evolution(H, t));
    const double mpf_reference = expectation(O, rho, mpf_matrix(spec, H, t));

    out << "model " << a.model << "\nobservable " << obs_text << "\nkind " << kind_name(spec.kind()) << "\nXi "
        << format_double(Xi) << "\ntau " << format_double(a.tau) << "\nN " << N << "\n";
    const double tol = (1.0 + Xi) * a.epsilon;
    if (a.runs < 1) throw ConfigError("sample: --runs must be >= 1");
    int within = 0;
    for (int run = 0; run < a.runs; ++run) {
        EstimatorState st = run_estimator(compiled, rho, O, N, a.seed, static_cast<std::uint64_t>(run));
        const double err = std::abs(st.estimate() - reference);
        within += err <= tol;
        if (run == 0) {
            out << "estimate " << format_double(st.estimate()) << "\nreference " << format_double(reference)
                << "\nmpf_reference " << format_double(mpf_reference) << "\nerror " << format_double(err)
                << "\ntolerance " << format_double(tol) << "\n";
        }
    }
    if (a.runs > 1) {
        out << "runs " << a.runs << "\nwithin_tolerance " << within << "\nfraction "
            << format_double(static_cast<double>(within) / a.runs) << "\n";
    }
    return kExitOk;
}

struct OptimizeArgs {
    std::string kind = "matching";
    int chi = 2;
    int R = 3;
    double p = 0;  // 0 selects the kind's default
    double tau_ref = 0.1;
    int hops = 100;
    std::uint64_t seed = 20240229;
    std::string loss = "bound";
    std::string out_path;
};

inline int cmd_optimize(const OptimizeArgs& a, std::ostream& out) {
    const MpfKind kind = parse_kind(a.kind);
    if (kind == MpfKind::ChildsWiebe) throw ConfigError("optimize: kind must be matching or closedform");
    if (a.chi < 1 || a.R < 1 || a.hops < 1) throw ConfigError("optimize: chi, R and hops must be >= 1");
    OptimizerConfig cfg = default_optimizer_config(kind);
    if (a.p > 0) cfg.p = a.p;
    cfg.tau_ref = a.tau_ref;
    cfg.hops = a.hops;
    cfg.seed = a.seed;
    if (a.loss != "bound" && a.loss != "resolution") throw ConfigError("optimize: --loss must be bound or resolution");
    cfg.loss = a.loss == "bound" ? LossKind::BoundTimesXiPow : LossKind::XiPow;
    OptimResult r = optimize_mpf(kind, a.chi, a.R, cfg);
    out << "kind " << kind_name(kind) << "\nchi " << a.chi << "\nR " << a.R << "\nXi " << format_double(r.Xi)
        << "\nzeta " << format_double(r.zeta) << "\nbound_at_tau_ref " << format_double(r.bound_at_tau_ref)
        << "\nloss " << format_double(r.loss_value) << "\n";
    const std::string path = a.out_path.empty()
                                 ? kind_name(kind) + "_chi" + std::to_string(a.chi) + "_R" + std::to_string(a.R) + ".ini"
                                 : a.out_path;
    save_file(path, r, [](std::ostream& o, const OptimResult& v) { write_optim(o, v); });
    out << "wrote " << path << "\n";
    return kExitOk;
}

struct SlopeArgs {
    std::string method = "ts";
    int chi = 1;
    int R = 2;
    int K = 1;
    int r = 1;
    std::string model = "anticommuting";
    int n = 0;
    std::string mpf_file;
    double tolerance = 0;  // 0 selects the method default
};

inline int cmd_slope(const SlopeArgs& a, std::ostream& out) {
    const std::string m = normalize_method(a.method);
    MethodCase mc;
    if (!a.mpf_file.empty()) {
        mc = mpf_case(load_mpf(a.mpf_file));
    } else if (m == "ts") {
        mc = ts_case(a.chi, a.r);
    } else if (m == "cw") {
        mc = mpf_case(cw_coefficients(a.chi, a.K));
    } else {
        const MpfKind kind = parse_kind(m);
        mc = mpf_case(build_mpf(kind, a.chi, a.R, default_initial_b(a.chi, a.R, kind)));
    }
    ModelConfig cfg;
    cfg.model = a.model;
    cfg.n = a.n;
    HamiltonianSpec H = build_model(cfg);
    const double tol = a.tolerance > 0 ? a.tolerance : default_slope_tolerance(mc);
    SlopeFit fit = measure_slope(mc, H);
    const bool ok = std::abs(fit.slope - mc.order) <= tol;
    out << "method " << mc.name << "\nmodel " << a.model << "\nslope " << format_double(fit.slope) << "\nexpected "
        << mc.order << " +- " << format_double(tol) << "\nwindow_t " << format_double(fit.t_lo) << " "
        << format_double(fit.t_hi) << "\npoints " << fit.points << "\n"
        << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitOk : kExitNumeric;
}

/// Parses argv and runs one subcommand. Exit codes: 0 success, 2 usage or
/// configuration error, 3 numeric diagnostic failure.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Randomized multi-product formula toolkit"};
    app.require_subcommand(1);

    std::string kind = "cw", b_file, mpf_out;
    int chi = 1, R = 0, K = 0;
    auto* coeffs = app.add_subcommand("coeffs", "print and save MPF coefficients");
    coeffs->add_option("--kind", kind, "cw, matching or closedform");
    coeffs->add_option("--chi", chi);
    coeffs->add_option("--R", R);
    coeffs->add_option("--K", K);
    coeffs->add_option("--b-file", b_file, "one b vector per line");
    coeffs->add_option("--out", mpf_out, "write the formula to this file");

    ExperimentFlags bounds_flags, distance_flags;
    auto* bounds = app.add_subcommand("bounds", "error-bound curves as CSV");
    bounds_flags.attach(bounds);
    auto* distance = app.add_subcommand("distance", "operator distance against the exact evolution as CSV");
    distance_flags.attach(distance);

    SampleArgs sa;
    auto* sample = app.add_subcommand("sample", "run the sampled estimator on a model");
    sample->add_option("--model", sa.model);
    sample->add_option("--n", sa.n);
    sample->add_option("--model-seed", sa.model_seed);
    sample->add_option("--observable", sa.observable, "Pauli string or weighted sum, e.g. 0.5*ZI+0.5*IZ");
    sample->add_option("--mpf-file", sa.mpf_file, "formula file (default Childs-Wiebe chi=1 K=1)");
    sample->add_option("--epsilon", sa.epsilon);
    sample->add_option("--delta", sa.delta);
    sample->add_option("--seed", sa.seed);
    sample->add_option("--tau", sa.tau, "Lambda t");
    sample->add_option("--state", sa.state, "computational basis index of the initial state");
    sample->add_option("--runs", sa.runs, "independent estimator runs");
    sample->add_option("--shots", sa.shots, "override the planned shot count");

    OptimizeArgs oa;
    auto* optimize = app.add_subcommand("optimize", "optimize the b vectors of a matching or closed-form formula");
    optimize->add_option("--kind", oa.kind);
    optimize->add_option("--chi", oa.chi);
    optimize->add_option("--R", oa.R);
    optimize->add_option("--p", oa.p, "resolution exponent in the loss");
    optimize->add_option("--tau-ref", oa.tau_ref);
    optimize->add_option("--hops", oa.hops);
    optimize->add_option("--seed", oa.seed);
    optimize->add_option("--loss", oa.loss, "bound or resolution");
    optimize->add_option("--out", oa.out_path);

    SlopeArgs sl;
    auto* slope = app.add_subcommand("slope", "fit the log-log slope of the operator distance");
    slope->add_option("--method", sl.method);
    slope->add_option("--chi", sl.chi);
    slope->add_option("--R", sl.R);
    slope->add_option("--K", sl.K);
    slope->add_option("--r", sl.r);
    slope->add_option("--model", sl.model);
    slope->add_option("--n", sl.n);
    slope->add_option("--mpf-file", sl.mpf_file);
    slope->add_option("--tolerance", sl.tolerance);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*coeffs) {
            if (R == 0) R = 2;
            if (K == 0) K = 1;
            return cmd_coeffs(kind, chi, R, K, b_file, mpf_out, out);
        }
        if (*bounds) return cmd_bounds(bounds_flags.resolve(), out, err);
        if (*distance) return cmd_distance(distance_flags.resolve(), out, err);
        if (*sample) return cmd_sample(sa, out);
        if (*optimize) return cmd_optimize(oa, out);
        if (*slope) return cmd_slope(sl, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NoRealSolutionError& e) {
        err << "error: " << e.what() << "\nthe closed-form family (--kind closedform) always has a solution\n";
        return kExitNumeric;
    } catch (const Error& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}

}  // namespace randmpf::cli

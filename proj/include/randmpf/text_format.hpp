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

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "randmpf/error.hpp"
#include "randmpf/models.hpp"
#include "randmpf/mpf.hpp"
#include "randmpf/optimizer.hpp"

namespace randmpf {

/// Shortest round-trip decimal form (17 significant digits).
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += format_double(v[i]);
    }
    return s;
}

inline std::vector<double> parse_list(const std::string& s) {
    std::istringstream in(s);
    std::vector<double> v;
    std::string tok;
    while (in >> tok) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("not a number: '" + tok + "'");
        }
    }
    return v;
}

namespace detail {

using boost::property_tree::ptree;

template <typename T>
T require(const ptree& pt, const std::string& key) {
    auto v = pt.get_optional<T>(key);
    if (!v) throw ConfigError("missing or malformed key '" + key + "'");
    return *v;
}

/// Present but unparsable values are errors rather than silently defaulted.
template <typename T>
T get_or(const ptree& pt, const std::string& key, const T& fallback) {
    auto child = pt.get_child_optional(key);
    if (!child) return fallback;
    auto v = child->get_value_optional<T>();
    if (!v) throw ConfigError("malformed value for '" + key + "': '" + child->data() + "'");
    return *v;
}

inline ptree read_ini_stream(std::istream& in) {
    ptree pt;
    try {
        boost::property_tree::ini_parser::read_ini(in, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("INI parse error: ") + e.what());
    }
    return pt;
}

inline void put_block(ptree& pt, const std::string& section, const LBlock& b) {
    pt.put(section + ".b", format_list(b.b));
    pt.put(section + ".nu", format_list(b.nu));
    pt.put(section + ".C", format_list(b.C));
    pt.put(section + ".condition", format_double(b.condition));
}

inline ptree mpf_tree(const MPFSpec& spec) {
    ptree pt;
    pt.put("mpf.kind", kind_name(spec.kind()));
    pt.put("mpf.chi", spec.chi);
    switch (spec.kind()) {
        case MpfKind::ChildsWiebe: {
            const auto& cw = std::get<ChildsWiebe>(spec.data);
            pt.put("mpf.K", spec.K);
            pt.put("mpf.resolution", format_double(spec.resolution));
            std::vector<double> ell(cw.ell.begin(), cw.ell.end());
            pt.put("cw.ell", format_list(ell));
            pt.put("cw.C", format_list(cw.C));
            break;
        }
        case MpfKind::Matching: {
            pt.put("mpf.R", spec.R);
            pt.put("mpf.resolution", format_double(spec.resolution));
            const auto& blocks = std::get<Matching>(spec.data).blocks;
            for (std::size_t r = 0; r < blocks.size(); ++r) put_block(pt, "block" + std::to_string(r + 1), blocks[r]);
            break;
        }
        case MpfKind::ClosedForm: {
            pt.put("mpf.R", spec.R);
            pt.put("mpf.resolution", format_double(spec.resolution));
            const auto& cf = std::get<ClosedForm>(spec.data);
            put_block(pt, "block0", cf.block0);
            for (std::size_t r = 0; r < cf.blocks.size(); ++r) {
                put_block(pt, "block" + std::to_string(r + 1), cf.blocks[r]);
            }
            break;
        }
    }
    return pt;
}

inline bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

inline MPFSpec mpf_from_tree(const ptree& pt) {
    const MpfKind kind = parse_kind(require<std::string>(pt, "mpf.kind"));
    const int chi = require<int>(pt, "mpf.chi");
    MPFSpec spec;
    if (kind == MpfKind::ChildsWiebe) {
        const int K = require<int>(pt, "mpf.K");
        std::vector<int> ell;
        if (auto s = pt.get_optional<std::string>("cw.ell")) {
            for (double v : parse_list(*s)) {
                if (v != std::floor(v)) throw ConfigError("cw.ell entries must be integers");
                ell.push_back(static_cast<int>(v));
            }
        }
        spec = cw_coefficients(chi, K, ell);
    } else {
        const int R = require<int>(pt, "mpf.R");
        const int first = kind == MpfKind::ClosedForm ? 0 : 1;
        std::vector<std::vector<double>> b_list, nus;
        for (int r = first; r <= R; ++r) {
            const std::string sec = "block" + std::to_string(r);
            b_list.push_back(parse_list(require<std::string>(pt, sec + ".b")));
            if (auto s = pt.get_optional<std::string>(sec + ".nu")) nus.push_back(parse_list(*s));
        }
        if (kind == MpfKind::Matching) {
            if (!nus.empty() && nus.size() != b_list.size()) {
                throw ConfigError("matching spec: give nu for every block or for none");
            }
            if (!nus.empty() && composition_defect(nus, chi) > 1e-10) {
                throw ConfigError("matching spec: stored nu vectors violate the composition constraint");
            }
            spec = nus.empty() ? build_matching(chi, R, b_list) : build_matching(chi, R, b_list, nus);
        } else {
            spec = build_closedform(chi, R, b_list);
            for (std::size_t n = 0; n < nus.size(); ++n) {
                std::vector<double> expect = closedform_nu(chi, R, static_cast<int>(n));
                for (std::size_t k = 0; k < expect.size() && k < nus[n].size(); ++k) {
                    if (!close(nus[n][k], expect[k], 1e-12)) {
                        throw ConfigError("closed-form spec: stored nu of block" + std::to_string(n) +
                                          " differs from the closed form");
                    }
                }
            }
        }
    }
    if (auto xi = pt.get_optional<double>("mpf.resolution")) {
        if (!close(*xi, spec.resolution, 1e-9)) {
            throw ConfigError("stored resolution " + format_double(*xi) + " disagrees with the rebuilt value " +
                              format_double(spec.resolution));
        }
    }
    return spec;
}

}  // namespace detail

inline void write_mpf(std::ostream& out, const MPFSpec& spec) {
    out << "; randmpf multi-product formula\n";
    boost::property_tree::ini_parser::write_ini(out, detail::mpf_tree(spec));
}

/// Rebuilds the formula from kind, chi, R or K and the b vectors. Stored C
/// vectors are informational; a stored resolution must agree with the rebuilt one.
inline MPFSpec read_mpf(std::istream& in) { return detail::mpf_from_tree(detail::read_ini_stream(in)); }

inline void write_optim(std::ostream& out, const OptimResult& r) {
    auto pt = detail::mpf_tree(build_mpf(r.kind, r.chi, r.R, r.b_list));
    pt.put("optimizer.Xi", format_double(r.Xi));
    pt.put("optimizer.zeta", format_double(r.zeta));
    pt.put("optimizer.bound_at_tau_ref", format_double(r.bound_at_tau_ref));
    pt.put("optimizer.loss_value", format_double(r.loss_value));
    pt.put("optimizer.history", format_list(r.history));
    out << "; randmpf optimizer result\n";
    boost::property_tree::ini_parser::write_ini(out, pt);
}

inline OptimResult read_optim(std::istream& in) {
    auto pt = detail::read_ini_stream(in);
    MPFSpec spec = detail::mpf_from_tree(pt);
    if (spec.kind() == MpfKind::ChildsWiebe) throw ConfigError("optimizer result must be matching or closed-form");
    OptimResult r;
    r.kind = spec.kind();
    r.chi = spec.chi;
    r.R = spec.R;
    const int first = r.kind == MpfKind::ClosedForm ? 0 : 1;
    for (int k = first; k <= r.R; ++k) r.b_list.push_back(parse_list(pt.get<std::string>("block" + std::to_string(k) + ".b")));
    r.Xi = detail::require<double>(pt, "optimizer.Xi");
    r.zeta = detail::require<double>(pt, "optimizer.zeta");
    r.bound_at_tau_ref = detail::require<double>(pt, "optimizer.bound_at_tau_ref");
    r.loss_value = detail::require<double>(pt, "optimizer.loss_value");
    r.history = parse_list(pt.get<std::string>("optimizer.history", ""));
    if (!detail::close(r.Xi, spec.resolution, 1e-10) || !detail::close(r.zeta, zeta(spec), 1e-10)) {
        throw ConfigError("optimizer result: stored Xi/zeta disagree with the rebuilt formula");
    }
    return r;
}

template <typename T, typename Writer>
void save_file(const std::string& path, const T& value, Writer w) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    w(out, value);
    if (!out) throw ConfigError("write failed for '" + path + "'");
}

inline MPFSpec load_mpf(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    return read_mpf(in);
}

inline OptimResult load_optim(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    return read_optim(in);
}

struct ExperimentConfig {
    std::vector<std::string> methods{"ts", "cw", "matching", "closedform"};
    int chi = 2;
    int R = 3;
    int r = 0;  // TS steps; 0 = R
    int K = 0;  // Childs-Wiebe K; 0 = R - 1
    double tau_min = 1e-3;
    double tau_max = 10.0;
    int tau_points = 60;
    std::string b_source = "default";  // default | optimize | file
    std::string matching_file;
    std::string closedform_file;
    ModelConfig model;
    OptimizerConfig matching_optimizer = default_optimizer_config(MpfKind::Matching);
    OptimizerConfig closedform_optimizer = default_optimizer_config(MpfKind::ClosedForm);
    int series_degree = 64;
    bool match_depth = true;
    std::string csv;
    std::string svg;
};

inline std::vector<std::string> split_words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

inline ExperimentConfig read_experiment_config(std::istream& in) {
    auto pt = detail::read_ini_stream(in);
    ExperimentConfig c;
    try {
        if (auto m = pt.get_optional<std::string>("experiment.methods")) c.methods = split_words(*m);
        c.chi = detail::get_or(pt, "experiment.chi", c.chi);
        c.R = detail::get_or(pt, "experiment.R", c.R);
        c.r = detail::get_or(pt, "experiment.r", c.r);
        c.K = detail::get_or(pt, "experiment.K", c.K);
        c.tau_min = detail::get_or(pt, "experiment.tau_min", c.tau_min);
        c.tau_max = detail::get_or(pt, "experiment.tau_max", c.tau_max);
        c.tau_points = detail::get_or(pt, "experiment.tau_points", c.tau_points);
        c.b_source = detail::get_or(pt, "experiment.b_source", c.b_source);
        c.matching_file = detail::get_or(pt, "experiment.matching_file", c.matching_file);
        c.closedform_file = detail::get_or(pt, "experiment.closedform_file", c.closedform_file);
        c.series_degree = detail::get_or(pt, "experiment.series_degree", c.series_degree);
        c.match_depth = detail::get_or(pt, "experiment.match_depth", c.match_depth);
        c.csv = detail::get_or(pt, "experiment.csv", c.csv);
        c.svg = detail::get_or(pt, "experiment.svg", c.svg);

        c.model.model = detail::get_or(pt, "model.name", c.model.model);
        c.model.n = detail::get_or(pt, "model.n", c.model.n);
        c.model.seed = detail::get_or(pt, "model.seed", c.model.seed);
        c.model.per_pauli = detail::get_or(pt, "model.per_pauli", c.model.per_pauli);
        c.model.hubbard.lx = detail::get_or(pt, "hubbard.lx", c.model.hubbard.lx);
        c.model.hubbard.ly = detail::get_or(pt, "hubbard.ly", c.model.hubbard.ly);
        c.model.hubbard.t = detail::get_or(pt, "hubbard.t", c.model.hubbard.t);
        c.model.hubbard.U = detail::get_or(pt, "hubbard.U", c.model.hubbard.U);
        c.model.hubbard.mu = detail::get_or(pt, "hubbard.mu", c.model.hubbard.mu);
        c.model.hubbard.h = detail::get_or(pt, "hubbard.h", c.model.hubbard.h);

        const std::string loss = detail::get_or<std::string>(pt, "optimizer.loss", "bound");
        if (loss != "bound" && loss != "resolution") throw ConfigError("optimizer.loss must be bound or resolution");
        for (OptimizerConfig* o : {&c.matching_optimizer, &c.closedform_optimizer}) {
            o->loss = loss == "bound" ? LossKind::BoundTimesXiPow : LossKind::XiPow;
            o->hops = detail::get_or(pt, "optimizer.hops", o->hops);
            o->seed = detail::get_or(pt, "optimizer.seed", o->seed);
            o->tau_ref = detail::get_or(pt, "optimizer.tau_ref", o->tau_ref);
            o->b_max = detail::get_or(pt, "optimizer.b_max", o->b_max);
            o->step_scale = detail::get_or(pt, "optimizer.step_scale", o->step_scale);
            o->accept_temperature = detail::get_or(pt, "optimizer.accept_temperature", o->accept_temperature);
            o->simplex_tol = detail::get_or(pt, "optimizer.simplex_tol", o->simplex_tol);
            o->max_local_iters = detail::get_or(pt, "optimizer.max_local_iters", o->max_local_iters);
        }
        c.matching_optimizer.p = detail::get_or(pt, "optimizer.p_matching", c.matching_optimizer.p);
        c.closedform_optimizer.p = detail::get_or(pt, "optimizer.p_closedform", c.closedform_optimizer.p);
    } catch (const boost::property_tree::ptree_bad_data& e) {
        throw ConfigError(std::string("malformed config value: ") + e.what());
    }
    if (c.tau_points < 2 || !(c.tau_min > 0) || !(c.tau_max > c.tau_min)) {
        throw ConfigError("tau grid must satisfy 0 < tau_min < tau_max and tau_points >= 2");
    }
    if (c.b_source != "default" && c.b_source != "optimize" && c.b_source != "file") {
        throw ConfigError("b_source must be default, optimize or file");
    }
    return c;
}

/// Relative matching_file and closedform_file entries are taken relative to the
/// config file's directory. Output paths stay relative to the working directory.
inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    ExperimentConfig c = read_experiment_config(in);
    const std::filesystem::path dir = std::filesystem::path(path).parent_path();
    for (std::string* f : {&c.matching_file, &c.closedform_file}) {
        if (!f->empty() && std::filesystem::path(*f).is_relative()) *f = (dir / *f).string();
    }
    return c;
}

}  // namespace randmpf

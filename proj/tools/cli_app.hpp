#pragma once

// roofent command-line front end. run_cli() is the whole program; main()
// only forwards to it so tests can drive the CLI in-process.
//
// Exit codes: 0 success, 2 input or validation error, 3 numerical flag.

#include "json_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace roofent::cli {

using io::json;

inline constexpr int kExitOk        = 0;
inline constexpr int kExitInput     = 2;
inline constexpr int kExitNumerical = 3;

struct RunConfig {
    std::string command;
    std::string state;
    std::string preset;
    std::string subalg = "diag";
    std::string subalg_b;
    std::uint64_t seed = 0;
    int restarts       = 32;
    int max_iters      = 3000;
    int polish_iters   = 50000;
    double tol         = 1e-9;
    double grad_tol    = 1e-8;
    long members       = 0;
    std::string out    = "-";
    std::string format = "json";
    int threads        = 1;
    double z_min       = -1.0 / 6.0;
    double z_max       = 1.0 / 3.0;
    int steps          = 0; // command specific default when 0
    int n              = 2;
    bool timing        = false;
    std::string convention = "symmetric";
    std::string direction  = "entanglement";
};

class InputError : public Error {
  public:
    using Error::Error;
};

// --- parsing helpers ---------------------------------------------------------------

// plain decimals, or p/q so that endpoints like 1/3 are exact
inline double parse_real(const std::string &s, const std::string &what) {
    if(const auto slash = s.find('/'); slash != std::string::npos && slash > 0)
        return parse_real(s.substr(0, slash), what) / parse_real(s.substr(slash + 1), what);
    std::size_t used = 0;
    double v         = 0.0;
    try {
        v = std::stod(s, &used);
    } catch(const std::exception &) {
        throw InputError(what + ": \"" + s + "\" is not a number");
    }
    if(used != s.size()) throw InputError(what + ": \"" + s + "\" is not a number");
    return v;
}

inline std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while(std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

/// "key=value" after "name:".
inline std::string preset_arg(const std::string &preset, const std::string &name, const std::string &key) {
    const std::string head = name + ":" + key + "=";
    if(preset.rfind(head, 0) != 0) throw InputError("preset \"" + preset + "\": expected " + head + "<value>");
    return preset.substr(head.size());
}

/// m3:z=V, m2:x=V, tracial:d=N, diag:p=a,b,...
inline Matrix state_from_preset(const std::string &preset) {
    const std::string name = preset.substr(0, preset.find(':'));
    if(name == "m3") return m3_symmetric_state(parse_real(preset_arg(preset, "m3", "z"), "m3 preset"));
    if(name == "m2") return m2_symmetric_state(parse_real(preset_arg(preset, "m2", "x"), "m2 preset"));
    if(name == "tracial") {
        const double d = parse_real(preset_arg(preset, "tracial", "d"), "tracial preset");
        if(d < 1 || d != std::floor(d) || d > 64) throw InputError("tracial preset: d must be an integer in [1, 64]");
        const auto n = static_cast<Eigen::Index>(d);
        return Matrix::Identity(n, n) / d;
    }
    if(name == "diag") {
        std::vector<double> p;
        for(const auto &s : split(preset_arg(preset, "diag", "p"), ',')) p.push_back(parse_real(s, "diag preset"));
        if(p.empty()) throw InputError("diag preset: empty probability list");
        return DensityMatrix::diagonal(p).matrix();
    }
    throw InputError("unknown preset \"" + preset + "\" (expected m3:z=, m2:x=, tracial:d= or diag:p=)");
}

inline json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if(!in) throw InputError("cannot open \"" + path + "\"");
    try {
        return json::parse(in);
    } catch(const json::parse_error &e) {
        throw InputError(path + ": " + e.what());
    }
}

/// diag, full, trivial, tensor:AxBx...:k, or a subalgebra JSON file.
inline SubalgebraSpec subalgebra_from_arg(const std::string &arg, Eigen::Index dim) {
    if(arg == "diag" || arg == "diagonal") return diagonal_subalgebra(dim);
    if(arg == "full") return full_subalgebra(dim);
    if(arg == "trivial") return trivial_subalgebra(dim);
    if(arg.rfind("tensor:", 0) == 0) {
        const auto parts = split(arg.substr(7), ':');
        if(parts.size() != 2) throw InputError("subalgebra \"" + arg + "\": expected tensor:<d1>x<d2>...:<factor>");
        std::vector<Eigen::Index> dims;
        for(const auto &s : split(parts[0], 'x')) dims.push_back(static_cast<Eigen::Index>(parse_real(s, "tensor dims")));
        const auto which = static_cast<std::size_t>(parse_real(parts[1], "tensor factor"));
        SubalgebraSpec a = tensor_factor_subalgebra(dims, which);
        if(a.ambient_dim() != dim)
            throw InputError("subalgebra \"" + arg + "\" has dimension " + std::to_string(a.ambient_dim()) +
                             " but the state has dimension " + std::to_string(dim));
        return a;
    }
    if(std::filesystem::exists(arg)) {
        SubalgebraSpec a = io::subalgebra_from_json(read_json_file(arg));
        if(a.ambient_dim() != dim) throw InputError("subalgebra file \"" + arg + "\" does not match the state dimension");
        return a;
    }
    throw InputError("unknown subalgebra \"" + arg + "\" (expected diag, full, trivial, tensor:... or a file)");
}

inline Matrix load_state(const RunConfig &c) {
    if(!c.preset.empty() && !c.state.empty()) throw InputError("give either --state or --preset, not both");
    if(!c.preset.empty()) return state_from_preset(c.preset);
    if(c.state.empty()) throw InputError("a state is required (--state FILE or --preset)");
    const json j = read_json_file(c.state);
    return DensityMatrix(io::matrix_from_json(j.contains("state") ? j["state"] : j, c.state)).matrix();
}

inline RoofOptions roof_options(const RunConfig &c) {
    RoofOptions o;
    o.seed         = c.seed;
    o.restarts     = c.restarts;
    o.value_tol    = c.tol;
    o.grad_tol     = c.grad_tol;
    o.max_iters    = c.max_iters;
    o.polish_iters = c.polish_iters;
    o.member_count = c.members;
    o.threads      = c.threads;
    return o;
}

inline json config_json(const RunConfig &c) {
    json j;
    j["command"]   = c.command;
    j["state"]     = c.state;
    j["preset"]    = c.preset;
    j["subalg"]    = c.subalg;
    j["subalg_b"]  = c.subalg_b;
    j["seed"]      = c.seed;
    j["restarts"]  = c.restarts;
    j["max_iters"] = c.max_iters;
    j["polish_iters"] = c.polish_iters;
    j["tol"]       = c.tol;
    j["grad_tol"]  = c.grad_tol;
    j["members"]   = c.members;
    j["format"]    = c.format;
    j["threads"]   = c.threads;
    j["z_min"]     = c.z_min;
    j["z_max"]     = c.z_max;
    j["steps"]     = c.steps;
    j["n"]         = c.n;
    j["timing"]    = c.timing;
    j["convention"] = c.convention;
    j["direction"]  = c.direction;
    return j;
}

/// Command line that reruns the configuration echoed in an output file
/// (without --out).
inline std::vector<std::string> args_from_config(const json &c) {
    const std::string cmd = c.at("command").get<std::string>();
    std::vector<std::string> a{cmd};
    auto put = [&](const char *flag, std::string v) {
        a.emplace_back(flag);
        a.push_back(std::move(v));
    };
    auto real = [](double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    if(!c.at("state").get<std::string>().empty()) put("--state", c.at("state").get<std::string>());
    if(!c.at("preset").get<std::string>().empty()) put("--preset", c.at("preset").get<std::string>());
    put("--subalg", c.at("subalg").get<std::string>());
    put("--seed", std::to_string(c.at("seed").get<std::uint64_t>()));
    put("--restarts", std::to_string(c.at("restarts").get<int>()));
    put("--max-iters", std::to_string(c.at("max_iters").get<int>()));
    put("--polish-iters", std::to_string(c.at("polish_iters").get<int>()));
    put("--tol", real(c.at("tol").get<double>()));
    put("--grad-tol", real(c.at("grad_tol").get<double>()));
    put("--members", std::to_string(c.at("members").get<long>()));
    put("--format", c.at("format").get<std::string>());
    put("--threads", std::to_string(c.at("threads").get<int>()));
    const int steps = c.at("steps").get<int>();
    if(cmd == "condent" && !c.at("subalg_b").get<std::string>().empty()) put("--subalg-b", c.at("subalg_b").get<std::string>());
    if(cmd == "scan-m3") {
        put("--z-min", real(c.at("z_min").get<double>()));
        put("--z-max", real(c.at("z_max").get<double>()));
        if(c.at("timing").get<bool>()) a.emplace_back("--timing");
    }
    if(cmd == "counterexample") put("--n", std::to_string(c.at("n").get<int>()));
    if((cmd == "scan-m3" || cmd == "leaf-check" || cmd == "compat") && steps > 0) put("--steps", std::to_string(steps));
    if(cmd == "compat") {
        put("--convention", c.at("convention").get<std::string>());
        put("--direction", c.at("direction").get<std::string>());
    }
    return a;
}

inline bool numerical_flag(const std::vector<std::string> &flags) {
    for(const auto &f : flags)
        for(const char *bad : {"unconverged", "witness_not_certified", "negative_conditional_entropy"})
            if(f.find(bad) != std::string::npos) return true;
    return false;
}

inline void write_text(const std::string &path, const std::string &text, std::ostream &out) {
    if(path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if(!f) throw InputError("cannot write \"" + path + "\"");
    f << text;
}

// --- commands ---------------------------------------------------------------------

inline int cmd_eof(const RunConfig &c, std::ostream &out) {
    const Matrix rho       = load_state(c);
    const SubalgebraSpec a = subalgebra_from_arg(c.subalg, rho.rows());
    const RoofResult r     = entanglement_of_formation(rho, a, roof_options(c));
    json j;
    j["config"] = config_json(c);
    j["result"] = io::to_json(r);
    write_text(c.out, j.dump(2) + "\n", out);
    return numerical_flag(r.flags) ? kExitNumerical : kExitOk;
}

inline int cmd_condent(const RunConfig &c, std::ostream &out) {
    const Matrix rho       = load_state(c);
    const SubalgebraSpec a = subalgebra_from_arg(c.subalg, rho.rows());
    json j;
    j["config"] = config_json(c);
    std::vector<std::string> flags;
    if(c.subalg_b.empty()) {
        const CondentResult r = conditional_entropy_imbedded(rho, a, roof_options(c));
        json res;
        res["mode"]               = "imbedded";
        res["value"]              = io::number(r.value);
        res["state_entropy"]      = io::number(r.state_entropy);
        res["restricted_entropy"] = io::number(r.restricted_entropy);
        res["flags"]              = io::flags_json(r.flags);
        res["stability"]          = io::to_json(r.stability);
        res["roof"]               = io::to_json(r.roof);
        j["result"]               = std::move(res);
        flags                     = r.flags;
    } else {
        const SubalgebraSpec b = subalgebra_from_arg(c.subalg_b, rho.rows());
        const PairResult r     = conditional_entropy_pair(rho, b, a, c.members, roof_options(c));
        json res;
        res["mode"]              = "pair";
        res["value"]             = io::number(r.value);
        res["restarts_agreeing"] = r.restarts_agreeing;
        res["iterations"]        = r.iterations;
        res["flags"]             = io::flags_json(r.flags);
        json elems               = json::array();
        for(const auto &e : r.decomposition.elements()) elems.push_back(io::to_json(e));
        res["povm"]     = std::move(elems);
        res["ensemble"] = io::to_json(r.decomposition.ensemble());
        j["result"]     = std::move(res);
        flags           = r.flags;
    }
    write_text(c.out, j.dump(2) + "\n", out);
    return numerical_flag(flags) ? kExitNumerical : kExitOk;
}

inline int cmd_scan_m3(const RunConfig &c, std::ostream &out, std::ostream &err) {
    const int steps = c.steps > 0 ? c.steps : 151;
    ScanOptions so;
    so.roof   = roof_options(c);
    so.timing = c.timing;
    const ScanReport rep = bifurcation_scan(uniform_grid(c.z_min, c.z_max, steps), so);
    json footer;
    footer["config"]    = config_json(c);
    footer["detected"]  = io::to_json(rep.detected);
    footer["lipschitz"] = io::number(rep.lipschitz);
    json lin            = json::array();
    for(const auto &l : leaf_linearity_along_scan(rep))
        lin.push_back({{"z", io::number(l.z)}, {"applicable", l.applicable}, {"gap", l.applicable ? io::number(l.gap) : json(nullptr)}});
    footer["leaf_linearity"] = std::move(lin);
    bool flagged             = false;
    for(const auto &r : rep.rows) flagged = flagged || numerical_flag(r.flags);
    if(c.format == "json") {
        json rows = json::array();
        for(const auto &r : rep.rows)
            rows.push_back({{"z", io::number(r.z)},
                            {"E_direct", io::number(r.E_direct)},
                            {"E_orbit1", io::number(r.E_orbit1)},
                            {"E_two_orbit", io::number(r.E_two_orbit)},
                            {"mu", io::number(r.mu)},
                            {"best_label", r.best_label},
                            {"residual", io::number(r.residual)},
                            {"flags", io::flags_json(r.flags)},
                            {"runtime_ms", io::number(r.runtime_ms)}});
        footer["rows"] = std::move(rows);
        write_text(c.out, footer.dump(2) + "\n", out);
    } else {
        write_text(c.out, io::scan_csv(rep), out);
        if(c.out == "-") err << footer.dump(2) << "\n";
        else write_text(c.out + ".footer.json", footer.dump(2) + "\n", out);
    }
    return flagged ? kExitNumerical : kExitOk;
}

inline int cmd_counterexample(const RunConfig &c, std::ostream &out) {
    const CounterexampleReport r = additivity_counterexample(c.n, roof_options(c));
    json j;
    j["config"] = config_json(c);
    j["result"] = io::to_json(r);
    write_text(c.out, j.dump(2) + "\n", out);
    return numerical_flag(r.flags) ? kExitNumerical : kExitOk;
}

/// Pure states named by --state (leaf, ensemble or {"states": [...]}) or the
/// optimal decomposition of a preset state.
struct StateSet {
    std::vector<Vector> vectors;
    std::optional<SubalgebraSpec> subalgebra; // when the input carries one
    std::vector<std::string> flags;
};

inline StateSet load_state_set(const RunConfig &c, const RoofOptions &opts) {
    StateSet s;
    if(!c.preset.empty() || c.state.empty()) {
        const Matrix rho       = load_state(c);
        const SubalgebraSpec a = subalgebra_from_arg(c.subalg, rho.rows());
        const RoofResult r     = entanglement_of_formation(rho, a, opts);
        const Leaf leaf        = leaf_from_ensemble(r, a);
        for(const auto &e : leaf.extremals) s.vectors.push_back(e.vector());
        s.flags = r.flags;
        return s;
    }
    const json j = read_json_file(c.state);
    if(j.contains("extremals")) {
        const Leaf leaf = io::leaf_from_json(j);
        for(const auto &e : leaf.extremals) s.vectors.push_back(e.vector());
        s.subalgebra = io::subalgebra_from_json(j["subalgebra"]);
    } else if(j.contains("states")) {
        for(const auto &v : j["states"]) s.vectors.push_back(io::vector_from_json(v, "states"));
    } else if(j.contains("weights")) {
        const Ensemble e = io::ensemble_from_json(j);
        for(const auto &p : e.pure_vectors()) {
            if(!p) throw InputError("ensemble input: every member must carry a pure vector");
            s.vectors.push_back(*p);
        }
    } else {
        const Matrix rho       = DensityMatrix(io::matrix_from_json(j.contains("state") ? j["state"] : j, c.state)).matrix();
        const SubalgebraSpec a = subalgebra_from_arg(c.subalg, rho.rows());
        const RoofResult r     = entanglement_of_formation(rho, a, opts);
        for(const auto &e : leaf_from_ensemble(r, a).extremals) s.vectors.push_back(e.vector());
        s.flags = r.flags;
    }
    if(s.vectors.empty()) throw InputError("no states in input");
    return s;
}

inline std::vector<std::vector<double>> leaf_grid(std::size_t k, int steps) {
    if(k == 1) return {{1.0}};
    if(k == 2) return segment_grid(steps);
    std::vector<std::vector<double>> g;
    for(std::size_t i = 0; i < k; ++i) {
        std::vector<double> v(k, 0.0);
        v[i] = 1.0;
        g.push_back(v);
    }
    for(std::size_t i = 0; i < k; ++i)
        for(std::size_t l = i + 1; l < k; ++l) {
            std::vector<double> v(k, 0.0);
            v[i] = v[l] = 0.5;
            g.push_back(v);
        }
    g.emplace_back(k, 1.0 / static_cast<double>(k));
    return g;
}

inline int cmd_leaf_check(const RunConfig &c, std::ostream &out) {
    const RoofOptions opts = roof_options(c);
    const StateSet s       = load_state_set(c, opts);
    const SubalgebraSpec a = s.subalgebra ? *s.subalgebra : subalgebra_from_arg(c.subalg, s.vectors.front().size());
    const Leaf leaf        = make_leaf(s.vectors, a);
    const LinearityReport rep = leaf_linearity_check(leaf, a, leaf_grid(leaf.extremals.size(), c.steps > 0 ? c.steps : 11), opts);
    json j;
    j["config"] = config_json(c);
    json res;
    res["leaf"]    = io::to_json(leaf, a);
    res["max_gap"] = io::number(rep.max_gap);
    json pts       = json::array();
    std::vector<std::string> flags = s.flags;
    for(const auto &p : rep.per_point) {
        pts.push_back({{"weights", p.weights},
                       {"roof", io::number(p.roof)},
                       {"linear", io::number(p.linear)},
                       {"gap", io::number(p.gap)},
                       {"flags", io::flags_json(p.flags)}});
        flags.insert(flags.end(), p.flags.begin(), p.flags.end());
    }
    res["per_point"] = std::move(pts);
    j["result"]      = std::move(res);
    write_text(c.out, j.dump(2) + "\n", out);
    return numerical_flag(flags) ? kExitNumerical : kExitOk;
}

inline int cmd_compat(const RunConfig &c, std::ostream &out) {
    const RoofOptions opts = roof_options(c);
    const StateSet s       = load_state_set(c, opts);
    const SubalgebraSpec a = s.subalgebra ? *s.subalgebra : subalgebra_from_arg(c.subalg, s.vectors.front().size());
    CompatConvention conv;
    if(c.convention == "symmetric") conv = CompatConvention::symmetric;
    else if(c.convention == "literal") conv = CompatConvention::literal;
    else throw InputError("--convention must be symmetric or literal");
    CompatDirection dir;
    if(c.direction == "entanglement") dir = CompatDirection::entanglement;
    else if(c.direction == "conditional") dir = CompatDirection::conditional;
    else throw InputError("--direction must be entanglement or conditional");
    const int count = c.steps > 0 ? c.steps : 100;

    CounterRng rng(c.seed, 0xC0FFEEULL);
    json samples = json::array();
    double min_gap = std::numeric_limits<double>::infinity();
    int violations = 0;
    for(int k = 0; k < count; ++k) {
        std::vector<cplx> g;
        json gj = json::array();
        for(std::size_t i = 0; i < s.vectors.size(); ++i) {
            g.push_back(rng.complex_normal());
            gj.push_back({g.back().real(), g.back().imag()});
        }
        const CompatResult r = compatibility_gap(s.vectors, g, a, dir, conv);
        min_gap              = std::min(min_gap, r.gap);
        if(r.gap < -1e-6) ++violations;
        samples.push_back({{"gamma", std::move(gj)},
                           {"lhs", io::number(r.lhs)},
                           {"rhs", io::number(r.rhs)},
                           {"gap", io::number(r.gap)},
                           {"off_support_mass", io::number(r.off_support_mass)}});
    }
    json pairs = json::array();
    for(std::size_t i = 0; i < s.vectors.size(); ++i)
        for(std::size_t l = i + 1; l < s.vectors.size(); ++l) {
            const FirstOrderResidual f = first_order_residual(s.vectors[i], s.vectors[l], a);
            pairs.push_back({{"i", i},
                             {"j", l},
                             {"re", io::number(f.value.real())},
                             {"im", io::number(f.value.imag())},
                             {"abs", io::number(std::abs(f.value))},
                             {"off_support_1", io::number(f.off_support_1)},
                             {"off_support_2", io::number(f.off_support_2)}});
        }
    json j;
    j["config"] = config_json(c);
    json res;
    json states = json::array();
    for(const auto &v : s.vectors) states.push_back(io::vector_to_json(v));
    res["states"]       = std::move(states);
    res["min_gap"]      = io::number(count > 0 ? min_gap : 0.0);
    res["violations"]   = violations;
    res["first_order"]  = std::move(pairs);
    res["samples"]      = std::move(samples);
    j["result"]         = std::move(res);
    write_text(c.out, j.dump(2) + "\n", out);
    return numerical_flag(s.flags) ? kExitNumerical : kExitOk;
}

// --- entry point -------------------------------------------------------------------

inline int run_cli(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    CLI::App app{"Convex and concave roofs of subalgebra-restricted entropies"};
    app.require_subcommand(1);
    RunConfig c;

    auto common = [&](CLI::App *sub) {
        sub->add_option("--state", c.state, "State (matrix JSON) or command-specific input file");
        sub->add_option("--preset", c.preset, "m3:z=V, m2:x=V, tracial:d=N or diag:p=a,b,...");
        sub->add_option("--subalg", c.subalg, "diag, full, trivial, tensor:AxB:k or subalgebra JSON file")->capture_default_str();
        sub->add_option("--seed", c.seed, "Base seed")->capture_default_str();
        sub->add_option("--restarts", c.restarts, "Optimizer restarts")->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_option("--max-iters", c.max_iters, "Iteration cap per restart")->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_option("--polish-iters", c.polish_iters, "Iteration cap for polishing the best restart")->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_option("--tol", c.tol, "Value tolerance")->capture_default_str();
        sub->add_option("--grad-tol", c.grad_tol, "Gradient tolerance")->capture_default_str();
        sub->add_option("--members", c.members, "Decomposition length (0: rank^2)")->capture_default_str();
        sub->add_option("--out", c.out, "Output path ('-' for stdout)")->capture_default_str();
        sub->add_option("--format", c.format, "json or csv")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--threads", c.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    };
    CLI::App *eof = app.add_subcommand("eof", "Entanglement of formation relative to a subalgebra");
    common(eof);
    CLI::App *cond = app.add_subcommand("condent", "Conditional entropy (imbedded, or pair form with --subalg-b)");
    common(cond);
    cond->add_option("--subalg-b", c.subalg_b, "Second subalgebra B for H(B|A)");
    CLI::App *scan = app.add_subcommand("scan-m3", "Bifurcation scan of the permutation-symmetric M3 family");
    common(scan);
    scan->add_option("--z-min", c.z_min, "Lower end of the grid")->capture_default_str();
    scan->add_option("--z-max", c.z_max, "Upper end of the grid")->capture_default_str();
    scan->add_option("--steps", c.steps, "Grid points (default 151)");
    scan->add_flag("--timing", c.timing, "Record wall time per grid point");
    CLI::App *cex = app.add_subcommand("counterexample", "Conditional-entropy additivity counterexample");
    common(cex);
    cex->add_option("--n", c.n, "Local dimension (2 or 3)")->capture_default_str();
    CLI::App *leaf = app.add_subcommand("leaf-check", "Linearity of the roof on a leaf");
    common(leaf);
    leaf->add_option("--steps", c.steps, "Points on a two-extremal segment (default 11)");
    CLI::App *compat = app.add_subcommand("compat", "Compatibility inequality sweep over random coefficients");
    common(compat);
    compat->add_option("--steps", c.steps, "Number of random coefficient vectors (default 100)");
    compat->add_option("--convention", c.convention, "symmetric or literal cross terms")->capture_default_str();
    compat->add_option("--direction", c.direction, "entanglement or conditional")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch(const CLI::CallForHelp &e) {
        out << app.help();
        return kExitOk;
    } catch(const CLI::CallForAllHelp &e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch(const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    try {
        if(eof->parsed()) {
            c.command = "eof";
            return cmd_eof(c, out);
        }
        if(cond->parsed()) {
            c.command = "condent";
            return cmd_condent(c, out);
        }
        if(scan->parsed()) {
            c.command = "scan-m3";
            if(c.format == "json" && std::find(argv, argv + argc, std::string("--format")) == argv + argc) c.format = "csv";
            return cmd_scan_m3(c, out, err);
        }
        if(cex->parsed()) {
            c.command = "counterexample";
            return cmd_counterexample(c, out);
        }
        if(leaf->parsed()) {
            c.command = "leaf-check";
            return cmd_leaf_check(c, out);
        }
        if(compat->parsed()) {
            c.command = "compat";
            return cmd_compat(c, out);
        }
    } catch(const json::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch(const Error &e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

} // namespace roofent::cli

#pragma once

// JSON forms of the library types.
//
//   matrix      {"dim": d, "re": [[...]], "im": [[...]]}   (vectors: one row)
//   subalgebra  {"ambient_dim": d, "blocks": [[n, m], ...], "framing": matrix | "identity", "kind": tag}
//   ensemble    {"weights": [...], "members": [matrix...], "target": matrix, "pure_vectors": [vector | null]}
//
// Doubles are written with round-trip precision, so parse(dump(x)) == x
// bit for bit. Non-finite values become null and read back as NaN.

#include <roofent/roofent.hpp>

#include <json.hpp>

namespace roofent::io {

using json = nlohmann::ordered_json;

class FormatError : public Error {
  public:
    using Error::Error;
};

inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline double read_number(const json &j, const std::string &where) {
    if(j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if(!j.is_number()) throw FormatError(where + ": expected a number");
    return j.get<double>();
}

inline const json &field(const json &j, const std::string &key, const std::string &where) {
    if(!j.is_object()) throw FormatError(where + ": expected an object");
    const auto it = j.find(key);
    if(it == j.end()) throw FormatError(where + ": missing field \"" + key + "\"");
    return *it;
}

// --- matrices ------------------------------------------------------------------

inline json to_json(const Matrix &m) {
    json re = json::array(), im = json::array();
    for(Eigen::Index i = 0; i < m.rows(); ++i) {
        json rr = json::array(), ri = json::array();
        for(Eigen::Index k = 0; k < m.cols(); ++k) {
            rr.push_back(number(m(i, k).real()));
            ri.push_back(number(m(i, k).imag()));
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    json j;
    j["dim"] = m.cols();
    j["re"]  = std::move(re);
    j["im"]  = std::move(im);
    return j;
}

inline json vector_to_json(const Vector &v) { return to_json(Matrix(v.transpose())); }

inline Matrix matrix_from_json(const json &j, const std::string &where = "matrix") {
    const json &re = field(j, "re", where);
    const json &im = field(j, "im", where);
    const auto dim = field(j, "dim", where).get<Eigen::Index>();
    if(!re.is_array() || !im.is_array() || re.size() != im.size())
        throw FormatError(where + ": \"re\" and \"im\" must be arrays of equal length");
    const auto rows = static_cast<Eigen::Index>(re.size());
    Matrix m(rows, dim);
    for(Eigen::Index i = 0; i < rows; ++i) {
        const json &rr = re[static_cast<std::size_t>(i)];
        const json &ri = im[static_cast<std::size_t>(i)];
        if(!rr.is_array() || !ri.is_array() || static_cast<Eigen::Index>(rr.size()) != dim ||
           static_cast<Eigen::Index>(ri.size()) != dim)
            throw FormatError(where + ": row " + std::to_string(i) + " does not have " + std::to_string(dim) + " entries");
        for(Eigen::Index k = 0; k < dim; ++k)
            m(i, k) = cplx(read_number(rr[static_cast<std::size_t>(k)], where + ".re[" + std::to_string(i) + "]"),
                           read_number(ri[static_cast<std::size_t>(k)], where + ".im[" + std::to_string(i) + "]"));
    }
    return m;
}

inline Vector vector_from_json(const json &j, const std::string &where = "vector") {
    const Matrix m = matrix_from_json(j, where);
    if(m.rows() != 1) throw FormatError(where + ": a vector has exactly one row");
    return m.row(0).transpose();
}

// --- subalgebras -----------------------------------------------------------------

inline json to_json(const SubalgebraSpec &a) {
    json j;
    j["ambient_dim"] = a.ambient_dim();
    json blocks      = json::array();
    for(const auto &b : a.blocks()) blocks.push_back({b.size, b.multiplicity});
    j["blocks"]  = std::move(blocks);
    j["framing"] = a.has_identity_frame() ? json("identity") : to_json(a.framing());
    j["kind"]    = to_string(a.kind());
    return j;
}

inline SubalgebraKind kind_from_string(const std::string &s) {
    for(auto k : {SubalgebraKind::diagonal, SubalgebraKind::tensor_factor, SubalgebraKind::full, SubalgebraKind::trivial,
                  SubalgebraKind::framed})
        if(s == to_string(k)) return k;
    throw FormatError("subalgebra: unknown kind \"" + s + "\"");
}

inline SubalgebraSpec subalgebra_from_json(const json &j) {
    const auto dim     = field(j, "ambient_dim", "subalgebra").get<Eigen::Index>();
    const json &blocks = field(j, "blocks", "subalgebra");
    if(!blocks.is_array()) throw FormatError("subalgebra.blocks: expected an array of [n, m] pairs");
    std::vector<Block> bs;
    for(const auto &b : blocks) {
        if(!b.is_array() || b.size() != 2) throw FormatError("subalgebra.blocks: each entry must be [n, m]");
        bs.push_back({b[0].get<Eigen::Index>(), b[1].get<Eigen::Index>()});
    }
    std::optional<Matrix> frame;
    if(j.contains("framing")) {
        const json &f = j["framing"];
        if(f.is_string()) {
            if(f.get<std::string>() != "identity") throw FormatError("subalgebra.framing: expected \"identity\" or a matrix");
        } else {
            frame = matrix_from_json(f, "subalgebra.framing");
        }
    }
    const SubalgebraKind kind = j.contains("kind") ? kind_from_string(j["kind"].get<std::string>()) : SubalgebraKind::framed;
    return {dim, std::move(bs), std::move(frame), kind};
}

// --- ensembles and results --------------------------------------------------------------

inline json to_json(const Ensemble &e) {
    json j;
    json w = json::array(), m = json::array(), p = json::array();
    for(std::size_t i = 0; i < e.size(); ++i) {
        w.push_back(number(e.weights()[i]));
        m.push_back(to_json(e.members()[i]));
        p.push_back(e.pure_vectors()[i] ? vector_to_json(*e.pure_vectors()[i]) : json(nullptr));
    }
    j["weights"]      = std::move(w);
    j["members"]      = std::move(m);
    j["target"]       = to_json(e.target());
    j["pure_vectors"] = std::move(p);
    return j;
}

inline Ensemble ensemble_from_json(const json &j) {
    const json &w = field(j, "weights", "ensemble");
    const json &m = field(j, "members", "ensemble");
    if(!w.is_array() || !m.is_array() || w.size() != m.size())
        throw FormatError("ensemble: \"weights\" and \"members\" must be arrays of equal length");
    std::vector<double> ws;
    std::vector<Matrix> ms;
    std::vector<std::optional<Vector>> ps;
    for(std::size_t i = 0; i < w.size(); ++i) {
        ws.push_back(read_number(w[i], "ensemble.weights"));
        ms.push_back(matrix_from_json(m[i], "ensemble.members[" + std::to_string(i) + "]"));
    }
    if(j.contains("pure_vectors") && !j["pure_vectors"].is_null()) {
        const json &p = j["pure_vectors"];
        if(!p.is_array() || p.size() != w.size()) throw FormatError("ensemble.pure_vectors: length differs from members");
        for(const auto &x : p)
            ps.push_back(x.is_null() ? std::nullopt : std::optional<Vector>(vector_from_json(x, "ensemble.pure_vectors")));
    }
    return {std::move(ws), std::move(ms), matrix_from_json(field(j, "target", "ensemble"), "ensemble.target"), std::move(ps)};
}

inline json flags_json(const std::vector<std::string> &flags) {
    json f = json::array();
    for(const auto &s : flags) f.push_back(s);
    return f;
}

inline json to_json(const RoofResult &r) {
    json j;
    j["value"]             = number(r.value);
    j["residual"]          = number(r.stationarity_residual);
    j["restarts_agreeing"] = r.restarts_agreeing;
    j["iterations"]        = r.iterations;
    j["best_restart"]      = r.best_restart;
    j["converged"]         = r.converged;
    j["flags"]             = flags_json(r.flags);
    j["ensemble"]          = to_json(r.ensemble);
    return j;
}

inline json to_json(const StabilityReport &s) {
    json j;
    j["first_order_max"] = number(s.first_order_max);
    j["second_order"]    = number(s.second_order);
    j["directions"]      = s.directions;
    j["stable"]          = s.stable;
    return j;
}

inline json to_json(const Leaf &leaf, const SubalgebraSpec &a) {
    json j;
    json ex = json::array(), vals = json::array();
    for(std::size_t i = 0; i < leaf.extremals.size(); ++i) {
        ex.push_back(vector_to_json(leaf.extremals[i].vector()));
        vals.push_back(number(leaf.point_values[i]));
    }
    j["extremals"]  = std::move(ex);
    j["values"]     = std::move(vals);
    j["subalgebra"] = to_json(a);
    return j;
}

inline Leaf leaf_from_json(const json &j) {
    const json &ex = field(j, "extremals", "leaf");
    if(!ex.is_array() || ex.empty()) throw FormatError("leaf.extremals: expected a non-empty array");
    std::vector<Vector> vs;
    for(const auto &e : ex) vs.push_back(vector_from_json(e, "leaf.extremals"));
    return make_leaf(vs, subalgebra_from_json(field(j, "subalgebra", "leaf")));
}

inline json to_json(const CounterexampleReport &r) {
    json j;
    j["n"]           = r.n;
    j["H_full"]      = number(r.H_full);
    j["H_AB"]        = number(r.H_AB);
    j["H_CC"]        = number(r.H_CC);
    j["quoted_H_AB"]  = number(r.quoted_H_AB);
    j["nonadditive"] = r.nonadditive;
    j["witness"]     = number(r.witness);
    j["upper_bound"] = number(r.upper_bound);
    j["flags"]       = flags_json(r.flags);
    return j;
}

inline json to_json(const Bracket &b) { return {{"lo", number(b.lo)}, {"hi", number(b.hi)}, {"mid", number(b.mid())}}; }

inline json to_json(const ScanDetection &d) {
    json j;
    j["z0"] = d.z0 ? to_json(*d.z0) : json(nullptr);
    j["z1"] = d.z1 ? to_json(*d.z1) : json(nullptr);
    j["z0_stability_below"] = d.z0_stability_below ? to_json(*d.z0_stability_below) : json(nullptr);
    j["z0_stability_above"] = d.z0_stability_above ? to_json(*d.z0_stability_above) : json(nullptr);
    j["z1_candidate"]       = number(d.z1_candidate);
    j["z1_minus_candidate"] = d.z1 ? number(d.z1->mid() - d.z1_candidate) : json(nullptr);
    j["bisection_steps"]    = d.bisection_steps;
    return j;
}

// --- scan CSV -----------------------------------------------------------------------------

inline std::string csv_number(double x) {
    if(std::isnan(x)) return "nan";
    if(std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string scan_csv(const ScanReport &rep) {
    std::string out = "z,E_direct,E_orbit1,E_two_orbit,mu,best_label,residual,flags,runtime_ms\n";
    for(const auto &r : rep.rows) {
        std::string flags;
        for(const auto &f : r.flags) flags += (flags.empty() ? "" : ";") + f;
        out += csv_number(r.z) + "," + csv_number(r.E_direct) + "," + csv_number(r.E_orbit1) + "," +
               csv_number(r.E_two_orbit) + "," + csv_number(r.mu) + "," + r.best_label + "," + csv_number(r.residual) +
               "," + flags + "," + csv_number(r.runtime_ms) + "\n";
    }
    return out;
}

} // namespace roofent::io

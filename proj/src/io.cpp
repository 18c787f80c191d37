#include "kko/io.hpp"

#include <fstream>
#include <set>

namespace kko {

namespace {

void require_object(const json& j, const std::string& path, const std::set<std::string>& required,
                    const std::set<std::string>& optional) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    for (const auto& key : required)
        if (!j.contains(key)) throw SchemaError(path, "missing key \"" + key + "\"");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!required.count(it.key()) && !optional.count(it.key()))
            throw SchemaError(path, "unknown key \"" + it.key() + "\"");
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
    return j.get<int>();
}

RMat real_matrix(const json& j, const std::string& path, Eigen::Index rows, Eigen::Index cols) {
    if (!j.is_array()) throw SchemaError(path, "expected an array of rows");
    if (rows >= 0 && Eigen::Index(j.size()) != rows)
        throw SchemaError(path, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
    const Eigen::Index r = Eigen::Index(j.size());
    Eigen::Index c = cols;
    RMat out;
    for (Eigen::Index i = 0; i < r; ++i) {
        const std::string rp = path + "[" + std::to_string(i) + "]";
        const json& row = j[i];
        if (!row.is_array()) throw SchemaError(rp, "expected an array");
        if (c < 0) c = Eigen::Index(row.size());
        if (Eigen::Index(row.size()) != c)
            throw SchemaError(rp, "expected " + std::to_string(c) + " entries, got " + std::to_string(row.size()));
        if (i == 0) out.resize(r, c);
        for (Eigen::Index k = 0; k < c; ++k) out(i, k) = number(row[k], rp + "[" + std::to_string(k) + "]");
    }
    if (r == 0) out.resize(0, 0);
    return out;
}

}  // namespace

json matrix_to_json(const CMat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real() + 0.0, m(i, k).imag() + 0.0});
        rows.push_back(row);
    }
    return rows;
}

CMat matrix_from_json(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a non-empty array of rows");
    const Eigen::Index r = Eigen::Index(j.size());
    Eigen::Index c = -1;
    CMat out;
    for (Eigen::Index i = 0; i < r; ++i) {
        const std::string rp = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array()) throw SchemaError(rp, "expected an array");
        if (c < 0) {
            c = Eigen::Index(j[i].size());
            out.resize(r, c);
        }
        if (Eigen::Index(j[i].size()) != c) throw SchemaError(rp, "ragged row");
        for (Eigen::Index k = 0; k < c; ++k) {
            const std::string ep = rp + "[" + std::to_string(k) + "]";
            const json& e = j[i][k];
            if (!e.is_array() || e.size() != 2) throw SchemaError(ep, "expected [re, im]");
            out(i, k) = cplx(number(e[0], ep + "[0]"), number(e[1], ep + "[1]"));
        }
    }
    return out;
}

CMat split_matrix_from_json(const json& re, const json& im, const std::string& path) {
    const RMat r = real_matrix(re, path + ".re", -1, -1);
    const RMat i = real_matrix(im, path + ".im", r.rows(), r.cols());
    CMat out(r.rows(), r.cols());
    out.real() = r;
    out.imag() = i;
    return out;
}

json class_to_json(const KOClass& x) {
    json j;
    j["degree"] = x.degree;
    j["algebra"] = x.algebra == CoefficientAlgebra::Scalar ? "scalar" : "auxiliary";
    j["first"] = matrix_to_json(x.first);
    if (!x.second_is_base) j["second"] = matrix_to_json(x.second);
    j["J"] = matrix_to_json(x.J.U);
    return j;
}

KOClass class_from_json(const json& j) {
    require_object(j, "$", {"degree", "first", "J"}, {"second", "algebra"});
    const int degree = integer(j["degree"], "$.degree");
    const CMat first = matrix_from_json(j["first"], "$.first");
    const CMat U = matrix_from_json(j["J"], "$.J");
    std::optional<CMat> second;
    if (j.contains("second")) second = matrix_from_json(j["second"], "$.second");
    CoefficientAlgebra alg = CoefficientAlgebra::Scalar;
    if (j.contains("algebra")) {
        if (!j["algebra"].is_string()) throw SchemaError("$.algebra", "expected a string");
        const std::string a = j["algebra"].get<std::string>();
        if (a == "auxiliary")
            alg = CoefficientAlgebra::Auxiliary;
        else if (a != "scalar")
            throw SchemaError("$.algebra", "expected \"scalar\" or \"auxiliary\"");
    }
    if (first.rows() != first.cols()) throw SchemaError("$.first", "matrix is not square");
    if (U.rows() != first.rows() || U.cols() != first.cols()) throw SchemaError("$.J", "size differs from payload");
    return make_class(degree, first, AntiUnitary(U), second, alg);
}

json ku_class_to_json(const KUClass& y) {
    json j;
    j["degree"] = y.degree;
    j["first"] = matrix_to_json(y.first);
    j["second"] = matrix_to_json(y.second);
    return j;
}

KUClass ku_class_from_json(const json& j) {
    require_object(j, "$", {"degree", "first"}, {"second"});
    KUClass y;
    y.degree = ((integer(j["degree"], "$.degree") % 2) + 2) % 2;
    y.first = matrix_from_json(j["first"], "$.first");
    const Eigen::Index n = y.first.rows();
    if (y.first.cols() != n) throw SchemaError("$.first", "matrix is not square");
    if (j.contains("second")) {
        y.second = matrix_from_json(j["second"], "$.second");
        if (y.second.rows() != n || y.second.cols() != n) throw SchemaError("$.second", "size differs from first");
    } else {
        y.second = y.degree == 0 ? CMat(CMat::Zero(n, n)) : identity(n);
    }
    for (const auto& [name, X] : {std::pair<const char*, const CMat*>{"$.first", &y.first}, {"$.second", &y.second}}) {
        const double r = y.degree == 0 ? std::max(fro(*X * *X - *X), fro(*X - X->adjoint()))
                                       : fro(*X * X->adjoint() - identity(n));
        if (r > 1e-8) throw SchemaError(name, y.degree == 0 ? "not a projector" : "not unitary");
    }
    return y;
}

json model_to_json(const BlochModel& m) {
    json j;
    if (!m.name.empty()) j["name"] = m.name;
    j["lattice_dim"] = m.lattice_dim;
    j["orbitals"] = m.orbitals;
    j["fermi_level"] = m.fermi_level;
    auto split = [](const CMat& a, const char* re, const char* im) {
        json o;
        json r = json::array(), i = json::array();
        for (Eigen::Index x = 0; x < a.rows(); ++x) {
            json rr = json::array(), ii = json::array();
            for (Eigen::Index y = 0; y < a.cols(); ++y) {
                rr.push_back(a(x, y).real() + 0.0);
                ii.push_back(a(x, y).imag() + 0.0);
            }
            r.push_back(rr);
            i.push_back(ii);
        }
        o[re] = r;
        o[im] = i;
        return o;
    };
    json hops = json::array();
    for (const auto& [n, h] : m.hoppings) {
        // List one of each +-pair: the first nonzero coordinate positive.
        bool keep = true;
        for (int v : n) {
            if (v != 0) {
                keep = v > 0;
                break;
            }
        }
        if (!keep || h.norm() == 0.0) continue;
        json e = split(h, "re", "im");
        json o;
        o["offset"] = n;
        o["re"] = e["re"];
        o["im"] = e["im"];
        hops.push_back(o);
    }
    j["hoppings"] = hops;
    json sym = json::object();
    if (m.symmetries.time_reversal)
        sym["time_reversal"] = split(m.symmetries.time_reversal->U, "unitary_re", "unitary_im");
    if (m.symmetries.particle_hole)
        sym["particle_hole"] = split(m.symmetries.particle_hole->U, "unitary_re", "unitary_im");
    if (m.symmetries.chiral) sym["chiral"] = split(*m.symmetries.chiral, "unitary_re", "unitary_im");
    j["symmetries"] = sym;
    if (m.spin_candidate) j["spin_candidate"] = split(*m.spin_candidate, "unitary_re", "unitary_im");
    if (m.lattice_vectors.size() && !m.lattice_vectors.isIdentity()) {
        json v = json::array();
        for (Eigen::Index c = 0; c < m.lattice_vectors.cols(); ++c) {
            json col = json::array();
            for (Eigen::Index r = 0; r < m.lattice_vectors.rows(); ++r) col.push_back(m.lattice_vectors(r, c));
            v.push_back(col);
        }
        j["lattice_vectors"] = v;
    }
    return j;
}

BlochModel model_from_json(const json& j) {
    require_object(j, "$", {"lattice_dim", "orbitals", "fermi_level", "hoppings"},
                   {"name", "symmetries", "spin_candidate", "lattice_vectors"});
    const int d = integer(j["lattice_dim"], "$.lattice_dim");
    const int o = integer(j["orbitals"], "$.orbitals");
    if (d < 0) throw SchemaError("$.lattice_dim", "must be non-negative");
    if (o <= 0) throw SchemaError("$.orbitals", "must be positive");
    std::string name;
    if (j.contains("name")) {
        if (!j["name"].is_string()) throw SchemaError("$.name", "expected a string");
        name = j["name"].get<std::string>();
    }
    BlochModel m = empty_model(d, o, name);
    m.fermi_level = number(j["fermi_level"], "$.fermi_level");
    const json& hops = j["hoppings"];
    if (!hops.is_array()) throw SchemaError("$.hoppings", "expected an array");
    std::set<Offset> seen;
    for (std::size_t i = 0; i < hops.size(); ++i) {
        const std::string p = "$.hoppings[" + std::to_string(i) + "]";
        require_object(hops[i], p, {"offset", "re", "im"}, {});
        const json& off = hops[i]["offset"];
        if (!off.is_array() || int(off.size()) != d)
            throw SchemaError(p + ".offset", "expected " + std::to_string(d) + " integers");
        Offset n(d);
        for (int k = 0; k < d; ++k) n[k] = integer(off[k], p + ".offset[" + std::to_string(k) + "]");
        Offset neg(d);
        bool zero = true;
        for (int k = 0; k < d; ++k) {
            neg[k] = -n[k];
            zero = zero && n[k] == 0;
        }
        if (seen.count(n)) throw SchemaError(p + ".offset", "offset listed twice");
        if (!zero && seen.count(neg)) throw SchemaError(p + ".offset", "offset and its negative both listed");
        seen.insert(n);
        const RMat re = real_matrix(hops[i]["re"], p + ".re", o, o);
        const RMat im = real_matrix(hops[i]["im"], p + ".im", o, o);
        CMat h(o, o);
        h.real() = re;
        h.imag() = im;
        if (zero && fro(h - h.adjoint()) > 1e-12) throw SchemaError(p, "on-site matrix is not Hermitian");
        add_hopping(m, n, h);
    }
    auto unitary = [&](const json& s, const std::string& p) {
        require_object(s, p, {"unitary_re", "unitary_im"}, {});
        CMat u(o, o);
        u.real() = real_matrix(s["unitary_re"], p + ".unitary_re", o, o);
        u.imag() = real_matrix(s["unitary_im"], p + ".unitary_im", o, o);
        if (fro(u * u.adjoint() - identity(o)) > 1e-8) throw SchemaError(p, "matrix is not unitary");
        return u;
    };
    if (j.contains("symmetries")) {
        const json& s = j["symmetries"];
        require_object(s, "$.symmetries", {}, {"time_reversal", "particle_hole", "chiral"});
        if (s.contains("time_reversal"))
            m.symmetries.time_reversal = AntiUnitary(unitary(s["time_reversal"], "$.symmetries.time_reversal"));
        if (s.contains("particle_hole"))
            m.symmetries.particle_hole = AntiUnitary(unitary(s["particle_hole"], "$.symmetries.particle_hole"));
        if (s.contains("chiral")) m.symmetries.chiral = unitary(s["chiral"], "$.symmetries.chiral");
    }
    if (j.contains("spin_candidate")) m.spin_candidate = unitary(j["spin_candidate"], "$.spin_candidate");
    if (j.contains("lattice_vectors")) {
        const RMat v = real_matrix(j["lattice_vectors"], "$.lattice_vectors", d, d);
        m.lattice_vectors = v.transpose();
    }
    return m;
}

json read_json_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw Error("IOError", "cannot open " + file);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(file, std::string("parse error: ") + e.what());
    }
}

}  // namespace kko

#include "kko/models.hpp"

#include "kko/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace kko {

namespace {

const cplx I(0.0, 1.0);

Offset negate(const Offset& n) {
    Offset m(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) m[i] = -n[i];
    return m;
}

bool is_zero(const Offset& n) {
    for (int v : n)
        if (v) return false;
    return true;
}

CMat pauli(char c) {
    CMat m(2, 2);
    switch (c) {
        case 'x': m << 0, 1, 1, 0; break;
        case 'y': m << 0, -I, I, 0; break;
        case 'z': m << 1, 0, 0, -1; break;
        default: m = identity(2);
    }
    return m;
}

double param(const ModelParams& p, const char* key, double dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : it->second;
}

// Honeycomb geometry shared by the Haldane and Kane-Mele models.
struct Honeycomb {
    Eigen::Vector2d a1{1.0, 0.0};
    Eigen::Vector2d a2{0.5, std::sqrt(3.0) / 2.0};
    Eigen::Vector2d pos(int sub, int n1, int n2) const {
        Eigen::Vector2d r = n1 * a1 + n2 * a2;
        if (sub == 1) r += (a1 + a2) / 3.0;
        return r;
    }
    // Cells of the B neighbours of A in cell 0.
    std::vector<Offset> nn() const { return {{0, 0}, {-1, 0}, {0, -1}}; }
    // One representative of each +-pair of second-neighbour offsets.
    std::vector<Offset> nnn() const { return {{1, 0}, {0, 1}, {1, -1}}; }

    // Sign of the turn along the two-bond path from (sub, n) to (sub, 0).
    int chirality(int sub, const Offset& n) const {
        const Eigen::Vector2d from = pos(sub, n[0], n[1]);
        const Eigen::Vector2d to = pos(sub, 0, 0);
        const double bond = 1.0 / std::sqrt(3.0);
        for (int c1 = -2; c1 <= 2; ++c1)
            for (int c2 = -2; c2 <= 2; ++c2) {
                const Eigen::Vector2d mid = pos(1 - sub, c1, c2);
                if (std::abs((mid - from).norm() - bond) < 1e-9 && std::abs((to - mid).norm() - bond) < 1e-9) {
                    const Eigen::Vector2d d1 = mid - from;
                    const Eigen::Vector2d d2 = to - mid;
                    return d1.x() * d2.y() - d1.y() * d2.x() > 0 ? 1 : -1;
                }
            }
        throw Error("InvalidModel", "no common neighbour");
    }
    RMat vectors() const {
        RMat v(2, 2);
        v.col(0) = a1;
        v.col(1) = a2;
        return v;
    }
};

}  // namespace

BlochModel empty_model(int lattice_dim, int orbitals, const std::string& name) {
    BlochModel m;
    m.name = name;
    m.lattice_dim = lattice_dim;
    m.orbitals = orbitals;
    m.lattice_vectors = RMat::Identity(lattice_dim, lattice_dim);
    m.hoppings[Offset(lattice_dim, 0)] = CMat::Zero(orbitals, orbitals);
    return m;
}

void add_hopping(BlochModel& m, const Offset& n, const CMat& h) {
    if (int(n.size()) != m.lattice_dim) throw Error("InvalidModel", "offset has wrong length");
    if (h.rows() != m.orbitals || h.cols() != m.orbitals)
        throw Error("InvalidModel", "hopping matrix has wrong size");
    auto slot = [&](const Offset& o) -> CMat& {
        auto it = m.hoppings.find(o);
        if (it == m.hoppings.end()) it = m.hoppings.emplace(o, CMat::Zero(m.orbitals, m.orbitals)).first;
        return it->second;
    };
    if (is_zero(n)) {
        if (fro(h - h.adjoint()) > 1e-12) throw Error("InvalidModel", "on-site matrix is not Hermitian");
        slot(n) += h;
        return;
    }
    slot(n) += h;
    slot(negate(n)) += h.adjoint();
}

void add_term(BlochModel& m, const Offset& n, int i, int j, cplx a) {
    CMat h = CMat::Zero(m.orbitals, m.orbitals);
    h(i, j) = a;
    if (is_zero(n)) {
        if (i == j) {
            h(i, i) = a.real();
        } else {
            h(j, i) = std::conj(a);
        }
    }
    add_hopping(m, n, h);
}

void validate_model(const BlochModel& m) {
    if (m.lattice_dim < 0 || m.orbitals <= 0) throw Error("InvalidModel", "bad dimensions");
    for (const auto& [n, h] : m.hoppings) {
        if (int(n.size()) != m.lattice_dim) throw Error("InvalidModel", "offset has wrong length");
        if (h.rows() != m.orbitals || h.cols() != m.orbitals)
            throw Error("InvalidModel", "hopping matrix has wrong size");
        auto it = m.hoppings.find(negate(n));
        if (it == m.hoppings.end() || fro(it->second - h.adjoint()) > 1e-12)
            throw Error("InvalidModel", "hoppings are not Hermitian-closed");
    }
}

CMat bloch(const BlochModel& m, const std::vector<double>& k) {
    if (int(k.size()) != m.lattice_dim) throw Error("DimensionMismatch", "k has wrong length");
    CMat H = CMat::Zero(m.orbitals, m.orbitals);
    for (const auto& [n, h] : m.hoppings) {
        double phase = 0.0;
        for (int i = 0; i < m.lattice_dim; ++i) phase += k[i] * n[i];
        H += std::exp(I * phase) * h;
    }
    return 0.5 * (H + H.adjoint());
}

std::vector<std::vector<double>> k_grid(int dim, int n) {
    std::vector<std::vector<double>> out;
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) total *= std::size_t(n);
    out.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::vector<double> k(dim);
        std::size_t r = idx;
        for (int i = dim - 1; i >= 0; --i) {
            k[i] = 2.0 * kPi * double(r % n) / n;
            r /= n;
        }
        out.push_back(std::move(k));
    }
    return out;
}

GapReport gap(const BlochModel& m, int grid) {
    const auto ks = k_grid(m.lattice_dim, grid);
    std::vector<double> gaps(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) {
        Eigen::SelfAdjointEigenSolver<CMat> es(bloch(m, ks[i]), Eigen::EigenvaluesOnly);
        gaps[i] = (es.eigenvalues().array() - m.fermi_level).abs().minCoeff();
    });
    GapReport rep;
    rep.gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ks.size(); ++i)
        if (gaps[i] < rep.gap) {
            rep.gap = gaps[i];
            rep.k = ks[i];
        }
    return rep;
}

SymmetryClass classify(const BlochModel& m, int grid, double gap_tolerance) {
    validate_model(m);
    const auto& sym = m.symmetries;
    std::vector<std::pair<std::string, double>> residuals;
    double scale = 1.0;
    const auto ks = k_grid(m.lattice_dim, grid);
    for (const auto& k : ks) scale = std::max(scale, fro(bloch(m, k)));
    const double tol = 1e-8 * scale;
    residuals = validate_symmetry_operators(sym, tol);
    double rt = 0.0, rc = 0.0, rs = 0.0;
    for (const auto& k : ks) {
        std::vector<double> mk(k.size());
        for (std::size_t i = 0; i < k.size(); ++i) mk[i] = -k[i];
        const CMat H = bloch(m, k);
        const CMat Hm = bloch(m, mk);
        if (sym.time_reversal) rt = std::max(rt, fro(sym.time_reversal->conjugate(H) - Hm));
        if (sym.particle_hole) rc = std::max(rc, fro(sym.particle_hole->conjugate(H) + Hm));
        if (sym.chiral) rs = std::max(rs, fro(*sym.chiral * H * sym.chiral->adjoint() + H));
    }
    std::optional<int> t, c;
    if (sym.time_reversal) {
        residuals.emplace_back("time_reversal", rt);
        if (rt > tol) throw SymmetryViolated("time_reversal", rt);
        t = sym.time_reversal->square_sign();
    }
    if (sym.particle_hole) {
        residuals.emplace_back("particle_hole", rc);
        if (rc > tol) throw SymmetryViolated("particle_hole", rc);
        c = sym.particle_hole->square_sign();
    }
    if (sym.chiral) {
        residuals.emplace_back("chiral", rs);
        if (rs > tol) throw SymmetryViolated("chiral", rs);
    }
    const GapReport g = gap(m, grid);
    residuals.emplace_back("gap", g.gap);
    if (g.gap < gap_tolerance)
        throw Error("NotGapped", "eigenvalue within " + std::to_string(g.gap) + " of the Fermi level");
    SymmetryClass out = class_from_signature(t, c, sym.chiral.has_value());
    out.residuals = std::move(residuals);
    return out;
}

BlochModel dimensional_reduce(const BlochModel& m) {
    if (m.lattice_dim < 1) throw Error("ZeroDimensional", "model has no momentum to restrict");
    BlochModel out = m;
    out.lattice_dim = m.lattice_dim - 1;
    out.hoppings.clear();
    for (const auto& [n, h] : m.hoppings) {
        Offset r(n.begin(), n.end() - 1);
        auto it = out.hoppings.find(r);
        if (it == out.hoppings.end())
            out.hoppings.emplace(r, h);
        else
            it->second += h;
    }
    if (!out.hoppings.count(Offset(out.lattice_dim, 0)))
        out.hoppings[Offset(out.lattice_dim, 0)] = CMat::Zero(m.orbitals, m.orbitals);
    out.lattice_vectors = m.lattice_vectors.topLeftCorner(out.lattice_dim, out.lattice_dim);
    if (!m.name.empty()) out.name = m.name + "_reduced";
    return out;
}

BlochModel direct_sum(const BlochModel& a, const BlochModel& b) {
    if (a.lattice_dim != b.lattice_dim) throw Error("DimensionMismatch", "lattice dimensions differ");
    BlochModel out = empty_model(a.lattice_dim, a.orbitals + b.orbitals, a.name + "+" + b.name);
    out.fermi_level = a.fermi_level;
    out.lattice_vectors = a.lattice_vectors;
    for (const auto& [n, h] : a.hoppings) {
        CMat big = CMat::Zero(out.orbitals, out.orbitals);
        big.topLeftCorner(a.orbitals, a.orbitals) = h;
        out.hoppings[n] = big;
    }
    for (const auto& [n, h] : b.hoppings) {
        auto it = out.hoppings.find(n);
        if (it == out.hoppings.end()) it = out.hoppings.emplace(n, CMat::Zero(out.orbitals, out.orbitals)).first;
        it->second.bottomRightCorner(b.orbitals, b.orbitals) += h;
    }
    auto sum_anti = [](const std::optional<AntiUnitary>& x, const std::optional<AntiUnitary>& y) {
        return (x && y) ? std::optional<AntiUnitary>(direct_sum(*x, *y)) : std::nullopt;
    };
    out.symmetries.time_reversal = sum_anti(a.symmetries.time_reversal, b.symmetries.time_reversal);
    out.symmetries.particle_hole = sum_anti(a.symmetries.particle_hole, b.symmetries.particle_hole);
    if (a.symmetries.chiral && b.symmetries.chiral)
        out.symmetries.chiral = direct_sum(*a.symmetries.chiral, *b.symmetries.chiral);
    return out;
}

BlochModel conjugate_model(const BlochModel& m) {
    BlochModel out = m;
    for (auto& [n, h] : out.hoppings) h = h.conjugate().eval();
    out.name = m.name.empty() ? "" : m.name + "_conj";
    auto conj_anti = [](std::optional<AntiUnitary>& x) {
        if (x) x = AntiUnitary(x->U.conjugate());
    };
    conj_anti(out.symmetries.time_reversal);
    conj_anti(out.symmetries.particle_hole);
    if (out.symmetries.chiral) out.symmetries.chiral = out.symmetries.chiral->conjugate().eval();
    if (out.spin_candidate) out.spin_candidate = out.spin_candidate->conjugate().eval();
    return out;
}

BlochModel ssh(double v, double w) {
    BlochModel m = empty_model(1, 2, "ssh");
    add_term(m, {0}, 0, 1, v);
    add_term(m, {1}, 1, 0, w);
    m.symmetries.time_reversal = AntiUnitary::conjugation(2);
    m.symmetries.particle_hole = AntiUnitary(pauli('z'));
    m.symmetries.chiral = pauli('z');
    return m;
}

BlochModel dirac2d(double mass) {
    BlochModel m = empty_model(2, 2, "dirac2d");
    add_hopping(m, {0, 0}, (mass - 2.0) * pauli('z'));
    add_hopping(m, {1, 0}, 0.5 * pauli('z') - 0.5 * I * pauli('x'));
    add_hopping(m, {0, 1}, 0.5 * pauli('z') - 0.5 * I * pauli('y'));
    return m;
}

BlochModel haldane(double t, double t2, double phi, double mass) {
    const Honeycomb hc;
    BlochModel m = empty_model(2, 2, "haldane");
    m.lattice_vectors = hc.vectors();
    for (const auto& n : hc.nn()) add_term(m, n, 0, 1, t);
    for (int sub = 0; sub < 2; ++sub)
        for (const auto& n : hc.nnn()) add_term(m, n, sub, sub, t2 * std::exp(I * (hc.chirality(sub, n) * phi)));
    add_term(m, {0, 0}, 0, 0, mass);
    add_term(m, {0, 0}, 1, 1, -mass);
    return m;
}

BlochModel kane_mele(double t, double lambda_so, double lambda_v, double lambda_r) {
    const Honeycomb hc;
    BlochModel m = empty_model(2, 4, "kane_mele");
    m.lattice_vectors = hc.vectors();
    auto idx = [](int spin, int sub) { return 2 * spin + sub; };
    for (int s = 0; s < 2; ++s) {
        const double sz = s == 0 ? 1.0 : -1.0;
        for (const auto& n : hc.nn()) add_term(m, n, idx(s, 0), idx(s, 1), t);
        for (int sub = 0; sub < 2; ++sub)
            for (const auto& n : hc.nnn())
                add_term(m, n, idx(s, sub), idx(s, sub), I * lambda_so * double(hc.chirality(sub, n)) * sz);
        add_term(m, {0, 0}, idx(s, 0), idx(s, 0), lambda_v);
        add_term(m, {0, 0}, idx(s, 1), idx(s, 1), -lambda_v);
    }
    if (lambda_r != 0.0) {
        // i lambda_R (s x d)_z on the bond from B (cell n) to A (cell 0).
        const double bond = 1.0 / std::sqrt(3.0);
        for (const auto& n : hc.nn()) {
            const Eigen::Vector2d d = (hc.pos(0, 0, 0) - hc.pos(1, n[0], n[1])) / bond;
            const CMat spin = I * lambda_r * (d.y() * pauli('x') - d.x() * pauli('y'));
            CMat h = CMat::Zero(4, 4);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) h(idx(a, 0), idx(b, 1)) = spin(a, b);
            if (n[0] == 0 && n[1] == 0)
                add_hopping(m, n, h + h.adjoint());
            else
                add_hopping(m, n, h);
        }
    }
    CMat iy = I * pauli('y');
    m.symmetries.time_reversal = AntiUnitary(kron(iy, identity(2)));
    m.spin_candidate = kron(pauli('z'), identity(2));
    return m;
}

BlochModel atomic_limit(int lattice_dim, double split) {
    BlochModel m = empty_model(lattice_dim, 2, "atomic");
    add_hopping(m, Offset(lattice_dim, 0), split * pauli('z'));
    return m;
}

std::vector<std::string> corpus_names() { return {"ssh", "dirac2d", "haldane", "kane_mele", "atomic"}; }

BlochModel corpus(const std::string& name, const ModelParams& p) {
    if (name == "ssh") return ssh(param(p, "v", 0.5), param(p, "w", 1.0));
    if (name == "dirac2d") return dirac2d(param(p, "mass", 1.0));
    if (name == "haldane")
        return haldane(param(p, "t", 1.0), param(p, "t2", 0.15), param(p, "phi", kPi / 2), param(p, "mass", 0.2));
    if (name == "kane_mele")
        return kane_mele(param(p, "t", 1.0), param(p, "lambda_so", 0.06), param(p, "lambda_v", 0.1),
                         param(p, "lambda_r", 0.0));
    if (name == "atomic") return atomic_limit(int(param(p, "dim", 2)), param(p, "split", 1.0));
    throw Error("UnknownModel", name);
}

}  // namespace kko

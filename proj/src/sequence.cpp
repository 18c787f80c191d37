#include "kko/sequence.hpp"

#include "kko/types.hpp"

#include <numeric>
#include <sstream>

namespace kko {

namespace {

int mod(int n, int m) { return ((n % m) + m) % m; }

long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

IMat scalar_map(const AbGroup& src, const AbGroup& dst, long long mult) {
    IMat m = IMat::Zero(dst.dim(), src.dim());
    if (src.dim() == 1 && dst.dim() == 1) m(0, 0) = mult;
    return m;
}

// Reduces torsion rows mod 2.
IVec normalize(const IVec& v, const AbGroup& g) {
    IVec out = v;
    for (int i = g.free; i < g.dim(); ++i) out(i) = mod(int(out(i) % 2), 2);
    return out;
}

// Generators of the relation lattice 2Z on the torsion coordinates.
IMat relations(const AbGroup& g) {
    IMat r = IMat::Zero(g.dim(), g.torsion);
    for (int i = 0; i < g.torsion; ++i) r(g.free + i, i) = 2;
    return r;
}

IMat hcat(const IMat& a, const IMat& b) {
    IMat out(std::max(a.rows(), b.rows()), a.cols() + b.cols());
    out << a, b;
    return out;
}

bool same_lattice(const IMat& a_cols, const IMat& b_cols) {
    const IMat a = hermite_rows(a_cols.transpose());
    const IMat b = hermite_rows(b_cols.transpose());
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool contains(const IMat& lattice_cols, const IVec& v) {
    IMat ext(lattice_cols.rows(), lattice_cols.cols() + 1);
    ext << lattice_cols, v;
    return same_lattice(lattice_cols, ext);
}

std::string vec_str(const IVec& v) {
    std::ostringstream s;
    s << "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v(i);
    s << ")";
    return s.str();
}

// Multiplicities over R; Bott-shifted realification at m is plain r at m - 2.
long long c_real(int n) {
    switch (mod(n, 8)) {
        case 0: return 1;
        case 4: return 2;
        default: return 0;
    }
}
long long r_real(int n) {
    switch (mod(n, 8)) {
        case 0: return 2;
        case 2: return 1;
        case 4: return 1;
        default: return 0;
    }
}
long long eta_real(int n) {
    switch (mod(n, 8)) {
        case 0: return 1;
        case 1: return 1;
        default: return 0;
    }
}

int complex_sign(int n) { return mod(n, 4) == 0 ? 1 : -1; }

}  // namespace

std::string AbGroup::name() const {
    if (trivial()) return "0";
    std::string s;
    auto add = [&](const std::string& part, int k) {
        if (k == 0) return;
        if (!s.empty()) s += "+";
        s += k == 1 ? part : part + "^" + std::to_string(k);
    };
    add("Z", free);
    add("Z2", torsion);
    return s;
}

std::string algebra_name(Algebra a) {
    switch (a) {
        case Algebra::R: return "R";
        case Algebra::C: return "C";
        case Algebra::H: return "H";
    }
    return "?";
}

Algebra parse_algebra(const std::string& s) {
    if (s == "R" || s == "r") return Algebra::R;
    if (s == "C" || s == "c") return Algebra::C;
    if (s == "H" || s == "h") return Algebra::H;
    throw Error("UnknownAlgebra", s);
}

std::string map_symbol(MapKind k) {
    switch (k) {
        case MapKind::Complexify: return "c";
        case MapKind::RealifyBott: return "r beta^-1";
        case MapKind::Eta: return "eta";
    }
    return "?";
}

GradedGroups builtin_groups(Algebra a) {
    static const std::array<AbGroup, 8> ko_r = {kZ, kZ2, kZ2, kZero, kZ, kZero, kZero, kZero};
    GradedGroups g;
    switch (a) {
        case Algebra::R:
            g.ko = ko_r;
            g.ku = {kZ, kZero};
            break;
        case Algebra::H:
            for (int n = 0; n < 8; ++n) g.ko[n] = ko_r[mod(n + 4, 8)];
            g.ku = {kZ, kZero};
            break;
        case Algebra::C:
            // KO of C viewed as a real algebra is KU; its complexification
            // C (x) C = C + C has twice the complex K-theory.
            for (int n = 0; n < 8; ++n) g.ko[n] = n % 2 ? kZero : kZ;
            g.ku = {AbGroup{2, 0}, kZero};
            break;
    }
    return g;
}

IMat complexify_map(Algebra a, int n) {
    const GradedGroups g = builtin_groups(a);
    const AbGroup& src = g.ko_at(n);
    const AbGroup& dst = g.ku_at(n);
    switch (a) {
        case Algebra::R: return scalar_map(src, dst, c_real(n));
        case Algebra::H: return scalar_map(src, dst, c_real(n + 4));
        case Algebra::C: {
            IMat m = IMat::Zero(dst.dim(), src.dim());
            if (mod(n, 2) == 0) {
                m(0, 0) = 1;
                m(1, 0) = complex_sign(n);
            }
            return m;
        }
    }
    return {};
}

IMat realify_plain(Algebra a, int n) {
    const GradedGroups g = builtin_groups(a);
    const AbGroup& src = g.ku_at(n);
    const AbGroup& dst = g.ko_at(n);
    switch (a) {
        case Algebra::R: return scalar_map(src, dst, r_real(n));
        case Algebra::H: return scalar_map(src, dst, r_real(n + 4));
        case Algebra::C: {
            IMat m = IMat::Zero(dst.dim(), src.dim());
            if (mod(n, 2) == 0) {
                m(0, 0) = 1;
                m(0, 1) = complex_sign(n);
            }
            return m;
        }
    }
    return {};
}

IMat eta_map(Algebra a, int n) {
    const GradedGroups g = builtin_groups(a);
    const AbGroup& src = g.ko_at(n);
    const AbGroup& dst = g.ko_at(n + 1);
    switch (a) {
        case Algebra::R: return scalar_map(src, dst, eta_real(n));
        case Algebra::H: return scalar_map(src, dst, eta_real(n + 4));
        case Algebra::C: return IMat::Zero(dst.dim(), src.dim());
    }
    return {};
}

namespace {

// KU_m -> KO_{m-2}: Bott inverse then realification.
IMat realify_bott(Algebra a, int m) {
    if (a != Algebra::C) return realify_plain(a, m - 2);
    // Over C the kernel must be the image of c at m, spanned by (1, s_m).
    const GradedGroups g = builtin_groups(a);
    IMat mat = IMat::Zero(g.ko_at(m - 2).dim(), g.ku_at(m).dim());
    if (mod(m, 2) == 0) {
        mat(0, 0) = 1;
        mat(0, 1) = -complex_sign(m);
    }
    return mat;
}

std::string ko_label(int n) { return "KO_" + std::to_string(mod(n, 8)); }
std::string ku_label(int n) { return "KU_" + std::to_string(mod(n, 2)); }

}  // namespace

ExactSequence build_sequence(Algebra a) {
    ExactSequence seq;
    seq.algebra = a;
    seq.groups = builtin_groups(a);
    const GradedGroups& g = seq.groups;
    for (int k = 0; k < 8; ++k) {
        const int m = -k;
        seq.labels.push_back(ko_label(m));
        seq.nodes.push_back(g.ko_at(m));
        seq.labels.push_back(ku_label(m));
        seq.nodes.push_back(g.ku_at(m));
        seq.labels.push_back(ko_label(m - 2));
        seq.nodes.push_back(g.ko_at(m - 2));

        seq.maps.push_back({MapKind::Complexify, mod(m, 8), ko_label(m), ku_label(m), 0, g.ko_at(m),
                            g.ku_at(m), complexify_map(a, m)});
        seq.maps.push_back({MapKind::RealifyBott, mod(m, 8), ku_label(m), ko_label(m - 2), -2,
                            g.ku_at(m), g.ko_at(m - 2), realify_bott(a, m)});
        seq.maps.push_back({MapKind::Eta, mod(m - 2, 8), ko_label(m - 2), ko_label(m - 1), 1,
                            g.ko_at(m - 2), g.ko_at(m - 1), eta_map(a, m - 2)});
    }
    return seq;
}

std::vector<SequenceMap> sequence_maps(Algebra a) { return build_sequence(a).maps; }

ExactSequence mutate_ko(const ExactSequence& seq, int n, const AbGroup& grp) {
    ExactSequence out = seq;
    const std::string label = ko_label(n);
    out.groups.ko[mod(n, 8)] = grp;
    for (std::size_t j = 0; j < out.nodes.size(); ++j)
        if (out.labels[j] == label) out.nodes[j] = grp;
    for (auto& m : out.maps) {
        if (m.source == label) m.source_group = grp;
        if (m.target == label) m.target_group = grp;
        if (m.source == label || m.target == label)
            m.matrix = IMat::Zero(m.target_group.dim(), m.source_group.dim());
    }
    return out;
}

IMat hermite_rows(const IMat& gens) {
    IMat A = gens;
    const Eigen::Index rows = A.rows();
    const Eigen::Index cols = A.cols();
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
        // Euclid on column c among rows r..end.
        while (true) {
            Eigen::Index piv = -1;
            for (Eigen::Index i = r; i < rows; ++i)
                if (A(i, c) != 0 && (piv < 0 || std::llabs(A(i, c)) < std::llabs(A(piv, c)))) piv = i;
            if (piv < 0) break;
            A.row(r).swap(A.row(piv));
            bool done = true;
            for (Eigen::Index i = r + 1; i < rows; ++i) {
                if (A(i, c) == 0) continue;
                A.row(i) -= (A(i, c) / A(r, c)) * A.row(r);
                if (A(i, c) != 0) done = false;
            }
            if (done) break;
        }
        if (A(r, c) == 0) continue;
        if (A(r, c) < 0) A.row(r) *= -1;
        for (Eigen::Index i = 0; i < r; ++i) A.row(i) -= floor_div(A(i, c), A(r, c)) * A.row(r);
        ++r;
    }
    return A.topRows(r);
}

IMat integer_kernel(const IMat& A) {
    const Eigen::Index n = A.cols();
    const Eigen::Index m = A.rows();
    // Row-reduce [A^T | I]; rows whose A^T part vanishes carry kernel vectors.
    IMat aug(n, m + n);
    aug << A.transpose(), IMat::Identity(n, n);
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < m && r < n; ++c) {
        while (true) {
            Eigen::Index piv = -1;
            for (Eigen::Index i = r; i < n; ++i)
                if (aug(i, c) != 0 && (piv < 0 || std::llabs(aug(i, c)) < std::llabs(aug(piv, c)))) piv = i;
            if (piv < 0) break;
            aug.row(r).swap(aug.row(piv));
            bool done = true;
            for (Eigen::Index i = r + 1; i < n; ++i) {
                if (aug(i, c) == 0) continue;
                aug.row(i) -= (aug(i, c) / aug(r, c)) * aug.row(r);
                if (aug(i, c) != 0) done = false;
            }
            if (done) break;
        }
        if (aug(r, c) != 0) ++r;
    }
    IMat ker(n, n - r);
    for (Eigen::Index i = r; i < n; ++i) ker.col(i - r) = aug.row(i).tail(n).transpose();
    return ker;
}

ExactnessReport verify_exactness(const ExactSequence& seq) {
    ExactnessReport rep;
    rep.algebra = seq.algebra;
    const std::size_t N = seq.nodes.size();
    for (std::size_t j = 0; j < N; ++j) {
        const SequenceMap& f = seq.maps[(j + N - 1) % N];  // into node j
        const SequenceMap& g = seq.maps[j];                // out of node j
        const AbGroup& B = seq.nodes[j];
        const AbGroup& C = g.target_group;
        NodeReport nr;
        nr.index = int(j);
        nr.label = seq.labels[j];
        nr.group = B;
        if (B.trivial()) {
            rep.nodes.push_back(nr);
            continue;
        }
        const IMat LB = relations(B);
        const IMat image = hcat(f.matrix, LB);
        // ker g = projection to B of ker [g | -L_C].
        IMat sys(C.dim(), B.dim() + C.torsion);
        sys << g.matrix, -relations(C);
        IMat kerfull = integer_kernel(sys);
        IMat kernel = hcat(kerfull.topRows(B.dim()), LB);

        std::ostringstream wit;
        for (Eigen::Index k = 0; k < f.matrix.cols(); ++k) {
            const IVec v = f.matrix.col(k);
            const IVec gv = normalize(g.matrix * v, C);
            if (!gv.isZero()) {
                nr.composite_zero = false;
                wit << map_symbol(g.kind) << "(" << map_symbol(f.kind) << "(e" << k << ")) = " << vec_str(gv)
                    << " != 0; ";
                break;
            }
        }
        for (Eigen::Index k = 0; k < kernel.cols(); ++k) {
            const IVec v = kernel.col(k);
            if (!contains(image, v)) {
                nr.kernel_in_image = false;
                wit << vec_str(normalize(v, B)) << " in ker " << map_symbol(g.kind) << " not in im "
                    << map_symbol(f.kind) << "; ";
                break;
            }
        }
        nr.pass = nr.composite_zero && nr.kernel_in_image;
        nr.witness = wit.str();
        rep.all_pass = rep.all_pass && nr.pass;
        rep.nodes.push_back(nr);
    }
    return rep;
}

ExactnessReport verify_exactness(Algebra a) { return verify_exactness(build_sequence(a)); }

}  // namespace kko

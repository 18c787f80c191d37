#include "kko/kclass.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace kko {

namespace {

constexpr double kClassTol = 1e-8;
const cplx I(0.0, 1.0);

int mod8(int d) { return ((d % 8) + 8) % 8; }

CMat omega_block(Eigen::Index blocks) {
    CMat w = CMat::Zero(2 * blocks, 2 * blocks);
    for (Eigen::Index b = 0; b < blocks; ++b) {
        w(2 * b, 2 * b + 1) = -1.0;
        w(2 * b + 1, 2 * b) = 1.0;
    }
    return w;
}

// Standard J for a row on n dimensions: conj, or Omega conj.
AntiUnitary standard_j(int degree, Eigen::Index n) {
    if (table_row(degree).j_square > 0) return AntiUnitary::conjugation(n);
    if (n % 2) throw Error("DimensionMismatch", "quaternionic rows need even size");
    return AntiUnitary(omega_block(n / 2));
}

void check_j(int degree, const AntiUnitary& J) {
    const TableRow row = table_row(degree);
    const double unit = fro(J.U * J.U.adjoint() - identity(J.dim()));
    if (unit > kClassTol) throw RelationViolated(row.degree, "J unitary", unit);
    const double sq = fro(J.square() - double(row.j_square) * identity(J.dim()));
    if (sq > kClassTol)
        throw RelationViolated(row.degree, row.j_square > 0 ? "J^2 = +1" : "J^2 = -1", sq);
}

void check_payload(int degree, const AntiUnitary& J, const CMat& X) {
    const TableRow row = table_row(degree);
    require_same_size(J.U, X, "payload and J sizes differ");
    const double r = relation_residual(degree, J, X);
    if (r > kClassTol) throw RelationViolated(row.degree, row.relation, r);
}

CMat symmetry_of(const CMat& p) { return identity(p.rows()) - 2.0 * p; }

}  // namespace

TableRow table_row(int degree) {
    static const TableRow rows[8] = {
        {0, 1, PayloadKind::ProjectorFixed, "J p J* = p"},
        {1, 1, PayloadKind::UnitaryFixed, "J u J* = u"},
        {2, 1, PayloadKind::ProjectorFlipped, "J p J* = 1 - p"},
        {3, -1, PayloadKind::UnitaryAdjoint, "J u J* = u*"},
        {4, -1, PayloadKind::ProjectorFixed, "J p J* = p"},
        {5, -1, PayloadKind::UnitaryFixed, "J u J* = u"},
        {6, -1, PayloadKind::ProjectorFlipped, "J p J* = 1 - p"},
        {7, 1, PayloadKind::UnitaryAdjoint, "J u J* = u*"},
    };
    return rows[mod8(degree)];
}

double relation_residual(int degree, const AntiUnitary& J, const CMat& X) {
    const TableRow row = table_row(degree);
    const Eigen::Index n = X.rows();
    const CMat JX = J.conjugate(X);
    double r = 0.0;
    switch (row.kind) {
        case PayloadKind::ProjectorFixed:
            r = std::max({fro(X * X - X), fro(X - X.adjoint()), fro(JX - X)});
            break;
        case PayloadKind::ProjectorFlipped:
            r = std::max({fro(X * X - X), fro(X - X.adjoint()), fro(JX - (identity(n) - X))});
            break;
        case PayloadKind::UnitaryFixed:
            r = std::max(fro(X * X.adjoint() - identity(n)), fro(JX - X));
            break;
        case PayloadKind::UnitaryAdjoint:
            r = std::max(fro(X * X.adjoint() - identity(n)), fro(JX - X.adjoint()));
            break;
    }
    return r;
}

CMat jreal_frame(const AntiUnitary& J) {
    const Eigen::Index n = J.dim();
    std::vector<CVec> vecs;
    for (Eigen::Index k = 0; k < n && Eigen::Index(vecs.size()) < n; ++k) {
        for (cplx phase : {cplx(1.0), I}) {
            CVec x = CVec::Zero(n);
            x(k) = phase;
            CVec v = x + J.apply(x);
            // Inner products between J-fixed vectors are real, so the
            // projection keeps v J-fixed.
            for (const auto& w : vecs) v -= w * w.dot(v).real();
            const double nv = v.norm();
            if (nv > 1e-6) vecs.push_back(v / nv);
            if (Eigen::Index(vecs.size()) == n) break;
        }
    }
    if (Eigen::Index(vecs.size()) != n) throw Error("FrameFailure", "no J-real frame (J^2 != +1?)");
    CMat W(n, n);
    for (Eigen::Index k = 0; k < n; ++k) W.col(k) = vecs[k];
    return W;
}

CMat quaternionic_frame(const AntiUnitary& J) {
    const Eigen::Index n = J.dim();
    if (n % 2) throw Error("FrameFailure", "odd dimension has no quaternionic frame");
    std::vector<CVec> vecs;
    for (Eigen::Index k = 0; k < n && Eigen::Index(vecs.size()) < n; ++k) {
        CVec v = CVec::Zero(n);
        v(k) = 1.0;
        for (const auto& w : vecs) v -= w * w.dot(v);
        const double nv = v.norm();
        if (nv < 1e-6) continue;
        v /= nv;
        vecs.push_back(v);
        vecs.push_back(J.apply(v));
    }
    if (Eigen::Index(vecs.size()) != n) throw Error("FrameFailure", "no quaternionic frame");
    CMat W(n, n);
    for (Eigen::Index k = 0; k < n; ++k) W.col(k) = vecs[k];
    return W;
}

CMat base_point(int degree, const AntiUnitary& J) {
    const int d = mod8(degree);
    const Eigen::Index n = J.dim();
    if (d == 0 || d == 4) return CMat::Zero(n, n);
    if (d % 2 == 1) return identity(n);
    if (n % 2) throw Error("DimensionMismatch", "rows 2 and 6 need even size");
    CMat block(2, 2);
    if (d == 2) {
        block << 0.5, -0.5 * I, 0.5 * I, 0.5;
        const CMat W = jreal_frame(J);
        return W * kron(identity(n / 2), block) * W.adjoint();
    }
    block << 1.0, 0.0, 0.0, 0.0;
    const CMat W = quaternionic_frame(J);
    return W * kron(identity(n / 2), block) * W.adjoint();
}

KOClass make_class(int degree, const CMat& first, const AntiUnitary& J,
                   const std::optional<CMat>& second, CoefficientAlgebra algebra) {
    require_square(first, "payload");
    KOClass x;
    x.degree = mod8(degree);
    x.J = J;
    x.first = first;
    x.algebra = algebra;
    check_j(x.degree, J);
    check_payload(x.degree, J, first);
    if (second) {
        check_payload(x.degree, J, *second);
        x.second = *second;
        x.second_is_base = false;
    } else {
        x.second = base_point(x.degree, J);
        x.second_is_base = true;
    }
    return x;
}

void validate(const KOClass& x) {
    check_j(x.degree, x.J);
    check_payload(x.degree, x.J, x.first);
    check_payload(x.degree, x.J, x.second);
}

KUClass complexify(const KOClass& x) {
    KUClass y;
    y.degree = x.degree % 2;
    y.first = x.first;
    y.second = x.second;
    return y;
}

KOClass realify(const KUClass& y, int target_degree) {
    const int d = mod8(target_degree);
    if (d % 2 != y.degree % 2) throw Error("ParityMismatch", "target degree parity differs");
    const TableRow row = table_row(d);
    const Eigen::Index n = y.size();
    CMat U = CMat::Zero(2 * n, 2 * n);
    U.topRightCorner(n, n) = double(row.j_square) * identity(n);
    U.bottomLeftCorner(n, n) = identity(n);
    auto doubled = [&](const CMat& a) -> CMat {
        switch (row.kind) {
            case PayloadKind::ProjectorFixed:
            case PayloadKind::UnitaryFixed: return direct_sum(a, CMat(a.conjugate()));
            case PayloadKind::ProjectorFlipped:
                return direct_sum(a, CMat(identity(n) - a.conjugate()));
            case PayloadKind::UnitaryAdjoint: return direct_sum(a, CMat(a.transpose()));
        }
        return a;
    };
    KOClass x;
    x.degree = d;
    x.J = AntiUnitary(U);
    x.first = doubled(y.first);
    x.second = doubled(y.second);
    x.second_is_base = false;
    validate(x);
    return x;
}

KOClass eta_act(const KOClass& x) {
    KOClass out;
    out.degree = mod8(x.degree + 1);
    out.algebra = x.algebra;
    out.second_is_base = x.second_is_base;
    const Eigen::Index n = x.size();
    if (x.even()) {
        // u = (1-2p)(1-2p_ref), J' = (1-2p_ref) J. For rows 0 and 4 the base
        // point is 0 and this is [1-2p, J].
        const CMat s_ref = symmetry_of(base_point(x.degree, x.J));
        out.J = x.J.after(s_ref);
        out.first = symmetry_of(x.first) * s_ref;
        out.second = symmetry_of(x.second) * s_ref;
    } else {
        const bool twisted = (x.degree == 1 || x.degree == 5);
        auto block = [&](const CMat& u) {
            CMat P(2 * n, 2 * n);
            const cplx a = twisted ? -I : cplx(1.0);
            const cplx b = twisted ? I : cplx(1.0);
            P.topLeftCorner(n, n) = 0.5 * identity(n);
            P.bottomRightCorner(n, n) = 0.5 * identity(n);
            P.topRightCorner(n, n) = 0.5 * a * u.adjoint();
            P.bottomLeftCorner(n, n) = 0.5 * b * u;
            return P;
        };
        CMat U = CMat::Zero(2 * n, 2 * n);
        if (twisted) {
            U = direct_sum(x.J.U, x.J.U);
        } else {
            U.topRightCorner(n, n) = x.J.U;
            U.bottomLeftCorner(n, n) = x.J.U;
        }
        out.J = AntiUnitary(U);
        out.first = block(x.first);
        out.second = block(x.second);
    }
    validate(out);
    return out;
}

KOClass pad_class(const KOClass& x, int units) {
    if (units <= 0) return x;
    const TableRow row = table_row(x.degree);
    const Eigen::Index unit = (row.j_square < 0 || x.degree == 2) ? 2 : 1;
    const AntiUnitary Jp = standard_j(x.degree, unit * units);
    const CMat b = base_point(x.degree, Jp);
    KOClass out = x;
    out.J = direct_sum(x.J, Jp);
    out.first = direct_sum(x.first, b);
    out.second = direct_sum(x.second, b);
    return out;
}

KOClass external_product(const KOClass& x, const KOClass& y) {
    const bool x_star = (x.degree == 0 || x.degree == 4);
    const bool y_star = (y.degree == 0 || y.degree == 4);
    if (x_star || y_star) {
        // Projector-fixed factor e acts by e*C = e (x) C + (1-e) (x) B with B
        // the base point of the other factor; J = J1 (x) J2.
        const KOClass& e = x_star ? x : y;
        const KOClass& c = x_star ? y : x;
        const CMat B = base_point(c.degree, c.J);
        auto star = [&](const CMat& proj, const CMat& C) {
            return CMat(kron(proj, C) + kron(identity(proj.rows()) - proj, B));
        };
        KOClass out;
        out.degree = mod8(x.degree + y.degree);
        out.algebra = (x.algebra == CoefficientAlgebra::Scalar && y.algebra == CoefficientAlgebra::Scalar)
                          ? CoefficientAlgebra::Scalar
                          : CoefficientAlgebra::Auxiliary;
        const AntiUnitary J = e.J.tensor(c.J);
        if (e.second_is_base && c.second_is_base) {
            out.J = J;
            out.first = star(e.first, c.first);
            out.second = star(e.first, c.second);
            out.second_is_base = true;
        } else {
            // [p][C] - [p][D] - [q][C] + [q][D], regrouped as a single difference.
            out.J = direct_sum(J, J);
            out.first = direct_sum(star(e.first, c.first), star(e.second, c.second));
            out.second = direct_sum(star(e.first, c.second), star(e.second, c.first));
            out.second_is_base = false;
        }
        validate(out);
        return out;
    }
    if (x.algebra != CoefficientAlgebra::Scalar || y.algebra != CoefficientAlgebra::Scalar)
        throw Error("NotScalarClass", "graded product of non-scalar classes in these degrees");
    // Over the scalars KO_1 and KO_2 are generated by eta and eta^2 and the
    // groups in degrees 3, 5, 6, 7 vanish, so a class here is eta^k times its
    // invariant and the product is eta^k applied to the other factor.
    for (const KOClass* a : {&x, &y}) {
        const KOClass* b = (a == &x) ? &y : &x;
        if ((a->degree == 1 || a->degree == 2) && scalar_invariant(*a) == 1) {
            KOClass out = *b;
            for (int k = 0; k < a->degree; ++k) out = eta_act(out);
            return out;
        }
    }
    const int d = mod8(x.degree + y.degree);
    const AntiUnitary J = standard_j(d, 2);
    return make_class(d, base_point(d, J), J);
}

long ku_invariant(const KUClass& y) {
    if (y.degree % 2) return 0;
    return std::lround(y.first.trace().real() - y.second.trace().real());
}

double pfaffian(const RMat& Ain) {
    const Eigen::Index n = Ain.rows();
    if (n != Ain.cols()) throw Error("DimensionMismatch", "pfaffian of non-square matrix");
    if (n % 2) throw Error("PfaffianUndefined", "odd matrix size");
    RMat A = Ain;
    double pf = 1.0;
    for (Eigen::Index k = 0; k + 1 < n; k += 2) {
        const Eigen::Index m = n - k - 1;
        RVec x = A.col(k).segment(k + 1, m);
        if (m > 1 && x.tail(m - 1).norm() > 0.0) {
            const double alpha = (x(0) >= 0 ? -1.0 : 1.0) * x.norm();
            RVec v = x;
            v(0) -= alpha;
            v.normalize();
            // Reflection on rows/cols k+1.. of determinant -1.
            A.bottomRows(m) -= 2.0 * v * (v.transpose() * A.bottomRows(m));
            A.rightCols(m) -= 2.0 * (A.rightCols(m) * v) * v.transpose();
            pf = -pf;
        }
        pf *= A(k, k + 1);
    }
    return pf;
}

long scalar_invariant(const KOClass& x) {
    if (x.algebra != CoefficientAlgebra::Scalar)
        throw Error("NotScalarClass", "class carries auxiliary coefficients");
    const Eigen::Index n = x.size();
    switch (x.degree) {
        case 0: return std::lround(x.first.trace().real() - x.second.trace().real());
        case 4: return std::lround((x.first.trace().real() - x.second.trace().real()) / 2.0);
        case 1: {
            const cplx det = (x.first * x.second.adjoint()).determinant();
            return det.real() < 0 ? 1 : 0;
        }
        case 2: {
            if (n % 2) throw Error("PfaffianUndefined", "odd matrix size");
            const CMat W = jreal_frame(x.J);
            auto pf_sign = [&](const CMat& p) {
                const CMat s = W.adjoint() * (2.0 * p - identity(n)) * W;
                const RMat A = (-I * s).real();
                return pfaffian(A) >= 0 ? 1 : -1;
            };
            return pf_sign(x.first) * pf_sign(x.second) < 0 ? 1 : 0;
        }
        default: return 0;
    }
}

double spin_residual(const KOClass& x, const CMat& S) {
    const Eigen::Index n = x.size();
    require_same_size(S, x.first, "spin operator size");
    double r = std::max({fro(S * S - identity(n)), fro(S - S.adjoint()),
                         fro(S * x.first - x.first * S), fro(x.J.conjugate(S) + S)});
    if (!x.second_is_base) r = std::max(r, fro(S * x.second - x.second * S));
    return r;
}

namespace {

// Basis of anti-Hermitian, J-real X commuting with the payload.
std::vector<CMat> spin_commutant(const KOClass& x) {
    const Eigen::Index n = x.size();
    std::vector<CMat> payloads{x.first};
    if (!x.second_is_base) payloads.push_back(x.second);
    std::vector<CMat> basis;
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = a; b < n; ++b) {
            if (a == b) {
                CMat h = CMat::Zero(n, n);
                h(a, a) = I;
                basis.push_back(h);
            } else {
                CMat h = CMat::Zero(n, n);
                h(a, b) = I;
                h(b, a) = I;
                basis.push_back(h);
                CMat g = CMat::Zero(n, n);
                g(a, b) = 1.0;
                g(b, a) = -1.0;
                basis.push_back(g);
            }
        }
    const Eigen::Index cols = Eigen::Index(basis.size());
    const Eigen::Index blocks = Eigen::Index(payloads.size()) + 1;
    RMat M(2 * n * n * blocks, cols);
    for (Eigen::Index k = 0; k < cols; ++k) {
        const CMat& X = basis[k];
        Eigen::Index row = 0;
        auto put = [&](const CMat& c) {
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index i = 0; i < n; ++i) {
                    M(row++, k) = c(i, j).real();
                    M(row++, k) = c(i, j).imag();
                }
        };
        for (const auto& P : payloads) put(X * P - P * X);
        put(x.J.conjugate(X) - X);
    }
    Eigen::SelfAdjointEigenSolver<RMat> es(M.transpose() * M);
    std::vector<CMat> out;
    for (Eigen::Index k = 0; k < cols; ++k) {
        if (es.eigenvalues()(k) > 1e-9) break;
        CMat X = CMat::Zero(n, n);
        for (Eigen::Index j = 0; j < cols; ++j) X += es.eigenvectors()(j, k) * basis[j];
        out.push_back(X);
    }
    return out;
}

std::optional<CMat> search_spin(const KOClass& x) {
    const auto basis = spin_commutant(x);
    if (basis.empty()) return std::nullopt;
    const Eigen::Index n = x.size();
    for (unsigned seed = 0; seed < 8; ++seed) {
        std::mt19937_64 rng(0x5eedULL + seed);
        std::normal_distribution<double> gauss;
        CMat A = CMat::Zero(n, n);
        for (const auto& B : basis) A += gauss(rng) * B;
        Eigen::SelfAdjointEigenSolver<CMat> es(A.adjoint() * A);
        if (es.eigenvalues().minCoeff() < 1e-8) continue;
        const CMat inv_sqrt = es.eigenvectors() *
                              es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                              es.eigenvectors().adjoint();
        const CMat K = A * inv_sqrt;
        CMat S = -I * K;
        S = 0.5 * (S + S.adjoint());
        if (spin_residual(x, S) < 1e-7) return S;
    }
    return std::nullopt;
}

}  // namespace

SpinSearch spin_operator(const KOClass& x, const std::optional<CMat>& hint) {
    SpinSearch out;
    out.target = x;
    if (hint && hint->rows() == x.size() && spin_residual(x, *hint) < 1e-8) {
        out.S = *hint;
        out.from_hint = true;
        return out;
    }
    auto search = [&](const KOClass& y) {
        for (int units = 0; units <= 2 && !out.S; ++units) {
            const KOClass padded = pad_class(y, units);
            if (auto S = search_spin(padded)) {
                out.S = S;
                out.padded_dims = int(padded.size() - y.size());
                out.target = padded;
            }
        }
    };
    search(x);
    if (!out.S && (x.degree == 3 || x.degree == 7)) {
        // J u J* = u* makes H = -i log u J-real, so exp(i t H) stays in the row
        // and ends at 1. A generic payload has too small a commutant.
        KOClass c = x;
        c.first = identity(x.size());
        c.second = identity(x.size());
        c.second_is_base = true;
        search(c);
        out.contracted = out.S.has_value();
    }
    if (x.algebra == CoefficientAlgebra::Scalar) {
        const bool criterion = scalar_invariant(eta_act(x)) == 0;
        if (criterion != out.S.has_value())
            throw Error("SpinSearchInconclusive",
                        std::string("search ") + (out.S ? "found" : "did not find") +
                            " a spin operator but eta x " + (criterion ? "vanishes" : "does not vanish"));
    }
    return out;
}

}  // namespace kko

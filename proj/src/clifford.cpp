#include "kko/clifford.hpp"

#include <random>

namespace kko {

namespace {

const cplx I(0.0, 1.0);

CMat pauli(char c) {
    CMat m = CMat::Zero(2, 2);
    switch (c) {
        case 'x': m << 0, 1, 1, 0; break;
        case 'y': m << 0, -I, I, 0; break;
        case 'z': m << 1, 0, 0, -1; break;
        default: m = identity(2);
    }
    return m;
}

// Z on qubits before k, `op` on qubit k, identity after.
CMat jw_string(int m, int k, char op) {
    CMat out = identity(1);
    for (int j = 0; j < m; ++j) out = kron(out, pauli(j < k ? 'z' : (j == k ? op : 'i')));
    return out;
}

// Ordered product of the generators selected by the bits of mask.
CMat product(const std::vector<CMat>& gens, unsigned mask, Eigen::Index dim) {
    CMat out = identity(dim);
    for (std::size_t i = 0; i < gens.size(); ++i)
        if (mask & (1u << i)) out = out * gens[i];
    return out;
}

}  // namespace

CliffordRep build_clifford(int p, int q) {
    if (p < 0 || q < 0) throw Error("InvalidSignature", "negative generator count");
    CliffordRep rep;
    rep.p = p;
    rep.q = q;
    const int n = p + q;
    const int m = (n + 1) / 2;
    rep.dim = 1 << m;
    rep.grading = identity(1);
    for (int j = 0; j < m; ++j) rep.grading = kron(rep.grading, pauli('z'));

    // Positive generators use X_0, X_1, ... then Y_{m-1}, Y_{m-2}, ...;
    // negative ones use -iY_0, -iY_1, ... then iX_{m-1}, iX_{m-2}, ...
    // Both lists stay disjoint because p + q <= 2m.
    for (int i = 0; i < p; ++i) {
        if (i < m)
            rep.generators.push_back(jw_string(m, i, 'x'));
        else
            rep.generators.push_back(jw_string(m, m - 1 - (i - m), 'y'));
    }
    for (int i = 0; i < q; ++i) {
        if (i < m)
            rep.generators.push_back(-I * jw_string(m, i, 'y'));
        else
            rep.generators.push_back(I * jw_string(m, m - 1 - (i - m), 'x'));
    }
    return rep;
}

CMat chirality(const CliffordRep& rep) {
    const int n = rep.n();
    CMat prod = identity(rep.dim);
    for (const auto& c : rep.generators) prod = prod * c;
    const int e = ((rep.q + n * (n - 1) / 2) % 4 + 4) % 4;
    static const cplx powers[4] = {1.0, I, -1.0, -I};
    return powers[e] * prod;
}

AntiUnitary intertwiner(const CliffordRep& rep) {
    const Eigen::Index dim = rep.dim;
    std::vector<CMat> group_gens = rep.generators;
    if (rep.n() % 2 == 1) group_gens.push_back(rep.grading);
    if (group_gens.size() > 24) throw Error("NoIntertwiner", "too many generators");

    // Averaging g M conj(g)^{-1} over the finite group generated by the
    // generators projects onto solutions of U conj(c) = c U.
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> gauss;
    for (int attempt = 0; attempt < 4; ++attempt) {
        CMat M(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = 0; j < dim; ++j) M(i, j) = cplx(gauss(rng), gauss(rng));
        CMat acc = CMat::Zero(dim, dim);
        const unsigned count = 1u << group_gens.size();
        for (unsigned mask = 0; mask < count; ++mask) {
            CMat g = product(group_gens, mask, dim);
            acc += g * M * g.transpose();
        }
        // Any solution is a multiple of a unitary; normalise U U^* = 1.
        const double scale = std::sqrt((acc * acc.adjoint()).trace().real() / double(dim));
        if (scale < 1e-8) continue;
        CMat U = acc / scale;
        // Fix the phase so that U conj(U) is real.
        const cplx s = (U * U.conjugate()).trace() / double(dim);
        U *= std::exp(cplx(0.0, -0.5 * std::arg(s)));
        AntiUnitary J(U);
        if (fro(U * U.adjoint() - identity(dim)) > 1e-8 || J.square_residual() > 1e-8) continue;
        for (const auto& c : rep.generators)
            if (fro(J.conjugate(c) - c) > 1e-8) throw Error("NoIntertwiner", "generator check failed");
        return J;
    }
    throw Error("NoIntertwiner", "averaging produced no solution");
}

SignTriple sign_table(int d) {
    static const int alpha[8] = {1, 1, -1, -1, -1, -1, 1, 1};
    static const int alpha_prime[8] = {1, -1, 1, 1, 1, -1, 1, 1};
    static const int alpha_dd[8] = {1, 0, -1, 0, 1, 0, -1, 0};
    d = ((d % 8) + 8) % 8;
    SignTriple t;
    t.alpha = alpha[d];
    t.alpha_prime = alpha_prime[d];
    if (d % 2 == 0) t.alpha_dd = alpha_dd[d];
    return t;
}

int ko_degree(int p, int q) { return (((q - p) % 8) + 8) % 8; }

SignTriple measured_signs(const CliffordRep& rep) {
    AntiUnitary J = intertwiner(rep);
    SignTriple t;
    t.alpha = J.square_sign();
    auto relative_sign = [&](const CMat& X) {
        const cplx s = (J.conjugate(X) * X.adjoint()).trace() / double(rep.dim);
        return s.real() >= 0 ? 1 : -1;
    };
    if (rep.n() % 2 == 1)
        t.alpha_prime = relative_sign(chirality(rep));
    else
        t.alpha_dd = relative_sign(rep.grading);
    return t;
}

CMat swap_clifford_side(const CMat& F, const CliffordRep& rep) {
    if (F.rows() != rep.dim || F.cols() != rep.dim)
        throw Error("DimensionMismatch", "operator does not act on the Clifford module");
    std::vector<CMat> right;
    for (const auto& c : rep.generators) right.push_back(c * rep.grading);
    const unsigned count = 1u << right.size();
    CMat acc = CMat::Zero(rep.dim, rep.dim);
    for (unsigned mask = 0; mask < count; ++mask) {
        CMat g = product(right, mask, rep.dim);
        const double sign = (__builtin_popcount(mask) % 2) ? -1.0 : 1.0;
        acc += sign * g.adjoint() * F * g;
    }
    return acc / double(count);
}

int span_dimension(const CliffordRep& rep) {
    const unsigned count = 1u << rep.generators.size();
    const Eigen::Index d2 = Eigen::Index(rep.dim) * rep.dim;
    CMat vecs(d2, count);
    for (unsigned mask = 0; mask < count; ++mask) {
        CMat g = product(rep.generators, mask, rep.dim);
        vecs.col(mask) = Eigen::Map<const CVec>(g.data(), d2);
    }
    Eigen::ColPivHouseholderQR<CMat> qr(vecs);
    qr.setThreshold(1e-9);
    return int(qr.rank());
}

}  // namespace kko

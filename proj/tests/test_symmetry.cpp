#include "kko/symmetry.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <set>

using namespace kko;

namespace {

CMat pauli(char c) {
    CMat m(2, 2);
    if (c == 'x') m << 0, 1, 1, 0;
    if (c == 'y') m << 0, cplx(0, -1), cplx(0, 1), 0;
    if (c == 'z') m << 1, 0, 0, -1;
    return m;
}

AntiUnitary conj(Eigen::Index n) { return AntiUnitary(identity(n)); }

// Spectral projection from the general (non-Hermitian) eigensolver.
CMat projection_oracle(const CMat& H, double mu) {
    Eigen::ComplexEigenSolver<CMat> es(H);
    const CMat V = es.eigenvectors();
    const CMat Vi = V.inverse();
    CMat P = CMat::Zero(H.rows(), H.cols());
    for (Eigen::Index i = 0; i < H.rows(); ++i)
        if (es.eigenvalues()(i).real() < mu) P += V.col(i) * Vi.row(i);
    return P;
}

}  // namespace

TEST_SUITE("symmetry") {

TEST_CASE("classify without symmetries") {
    GappedSystem s{pauli('z'), 0.0, {}, 1e-6};
    const SymmetryClass c = classify(s);
    CHECK(c.label == AZLabel::A);
    CHECK(c.complex);
    CHECK(c.degree == 0);
}

TEST_CASE("classify with time reversal") {
    // T^2 = +1 on a real Hamiltonian.
    GappedSystem a{pauli('z'), 0.0, {}, 1e-6};
    a.symmetries.time_reversal = conj(2);
    SymmetryClass c = classify(a);
    CHECK(c.label == AZLabel::AI);
    CHECK(c.degree == 0);
    CHECK(c.t_square == 1);

    // T = i sy conj on spin-1/2 (x) orbital, H = 1 (x) sz.
    GappedSystem b{kron(identity(2), pauli('z')), 0.0, {}, 1e-6};
    b.symmetries.time_reversal = AntiUnitary(kron(cplx(0, 1) * pauli('y'), identity(2)));
    c = classify(b);
    CHECK(c.label == AZLabel::AII);
    CHECK(!c.complex);
    CHECK(c.degree == 4);
    CHECK(c.t_square == -1);
}

TEST_CASE("the ten classes are distinct") {
    std::set<std::pair<int, int>> seen;
    std::set<AZLabel> labels;
    for (std::optional<int> t : {std::optional<int>(), std::optional<int>(1), std::optional<int>(-1)})
        for (std::optional<int> c : {std::optional<int>(), std::optional<int>(1), std::optional<int>(-1)})
            for (bool s : {false, true}) {
                if (t && c && !s) continue;
                const SymmetryClass k = class_from_signature(t, c, s);
                labels.insert(k.label);
                seen.insert({k.complex ? 8 + k.degree : k.degree, 0});
            }
    CHECK(labels.size() == 10);
    CHECK(seen.size() == 10);
    CHECK(class_from_signature(std::nullopt, std::nullopt, true).degree == 1);
    CHECK(class_from_signature(std::nullopt, std::nullopt, true).complex);
}

TEST_CASE("classify rejects violated symmetries and gapless systems") {
    GappedSystem s{pauli('x'), 0.0, {}, 1e-6};
    s.symmetries.time_reversal = AntiUnitary(pauli('x'));
    s.hamiltonian = pauli('z');
    CHECK_THROWS_AS(classify(s), SymmetryViolated);
    GappedSystem g{CMat(CMat::Zero(2, 2)), 0.0, {}, 1e-6};
    CHECK_THROWS(classify(g));
}

TEST_CASE("classify is basis and phase independent") {
    const CMat H = kron(identity(2), pauli('z')) + 0.3 * kron(pauli('y'), pauli('y'));
    GappedSystem s{H, 0.0, {}, 1e-6};
    s.symmetries.time_reversal = AntiUnitary(kron(cplx(0, 1) * pauli('y'), identity(2)));
    const SymmetryClass ref = classify(s);
    for (int trial = 0; trial < 5; ++trial) {
        const CMat W = testing::random_unitary(4);
        GappedSystem t = s;
        t.hamiltonian = W * H * W.adjoint();
        t.symmetries.time_reversal = AntiUnitary(W * s.symmetries.time_reversal->U * W.transpose());
        CHECK(classify(t).label == ref.label);
        const cplx phase = std::exp(cplx(0, testing::uniform(0, 6.28)));
        t.symmetries.time_reversal = AntiUnitary(phase * t.symmetries.time_reversal->U);
        CHECK(classify(t).label == ref.label);
        CHECK(classify(t).degree == 4);
    }
}

TEST_CASE("fermi projections") {
    const CMat P = fermi_projection(pauli('z'), 0.0);
    CMat e(2, 2);
    e << 0, 0, 0, 1;
    CHECK(fro(P - e) < 1e-14);
    const CMat Q = fermi_projection(CMat(-pauli('z')), 0.0);
    e << 1, 0, 0, 0;
    CHECK(fro(Q - e) < 1e-14);

    for (int trial = 0; trial < 10; ++trial) {
        CMat H = testing::random_hermitian(8);
        Eigen::SelfAdjointEigenSolver<CMat> es(H);
        const double mu = 0.5 * (es.eigenvalues()(3) + es.eigenvalues()(4));
        const CMat R = fermi_projection(H, mu);
        CHECK(fro(R * R - R) < 1e-12);
        CHECK(fro(R - R.adjoint()) < 1e-12);
        CHECK(fro(R * H - H * R) < 1e-10);
        CHECK(fro(R - projection_oracle(H, mu)) < 1e-8);
        // P(H) + P(-H) = 1 at mu = 0.
        H -= mu * identity(8);
        CHECK(fro(fermi_projection(H, 0.0) + fermi_projection(CMat(-H), 0.0) - identity(8)) < 1e-10);
    }
    CHECK_THROWS(fermi_projection(CMat(CMat::Zero(2, 2)), 0.0));
}

TEST_CASE("fermi projection respects the symmetries") {
    // Particle-hole C = sx conj with H = sz: C P C* = 1 - P.
    GappedSystem s{pauli('z'), 0.0, {}, 1e-6};
    s.symmetries.particle_hole = AntiUnitary(pauli('x'));
    const CMat P = fermi_projection(s);
    CHECK(fro(s.symmetries.particle_hole->conjugate(P) - (identity(2) - P)) < 1e-14);
    CHECK(classify(s).label == AZLabel::D);
}

TEST_CASE("detect_relation") {
    const CMat H = testing::random_hermitian(4);
    const CMat Hr = H.real().cast<cplx>();
    RelationReport r = detect_relation(conj(4), Hr);
    CHECK(r.relation == Relation::Commutes);
    CHECK(r.residual == doctest::Approx(0.0));

    r = detect_relation(AntiUnitary(pauli('x')), pauli('z'));
    CHECK(r.relation == Relation::Anticommutes);

    r = detect_relation(identity(4), H);
    CHECK(r.relation == Relation::Commutes);
    CHECK(r.residual < 1e-14);

    r = detect_relation(pauli('x'), pauli('z'));
    CHECK(r.relation == Relation::Anticommutes);
    r = detect_relation(pauli('x'), CMat(pauli('z') + pauli('x')));
    CHECK(r.relation == Relation::Neither);
}

TEST_CASE("symmetry operator validation") {
    SymmetryData d;
    d.time_reversal = conj(2);
    d.particle_hole = AntiUnitary(pauli('z'));
    d.chiral = pauli('z');
    CHECK_NOTHROW(validate_symmetry_operators(d, 1e-8));
    d.chiral = pauli('x');
    CHECK_THROWS_AS(validate_symmetry_operators(d, 1e-8), SymmetryViolated);
}

}  // TEST_SUITE

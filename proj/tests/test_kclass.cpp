#include "kko/kclass.hpp"
#include "kko/models.hpp"
#include "kko/symmetry.hpp"
#include "class_gen.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace kko;

using namespace testing;

namespace {

// Pfaffian by expansion along the first row.
double pfaffian_expansion(const RMat& A) {
    const Eigen::Index n = A.rows();
    if (n == 0) return 1.0;
    double s = 0.0;
    for (Eigen::Index j = 1; j < n; ++j) {
        std::vector<Eigen::Index> keep;
        for (Eigen::Index k = 1; k < n; ++k)
            if (k != j) keep.push_back(k);
        RMat M(n - 2, n - 2);
        for (std::size_t a = 0; a < keep.size(); ++a)
            for (std::size_t b = 0; b < keep.size(); ++b) M(a, b) = A(keep[a], keep[b]);
        s += (j % 2 ? 1.0 : -1.0) * A(0, j) * pfaffian_expansion(M);
    }
    return s;
}

}  // namespace

TEST_SUITE("kclass") {

TEST_CASE("make_class accepts the table rows") {
    CHECK_NOTHROW(make_class(0, one_by_one(1.0), conj(1)));
    CHECK_NOTHROW(make_class(1, one_by_one(-1.0), conj(1)));
    CHECK_THROWS_AS(make_class(3, one_by_one(1.0), conj(1)), RelationViolated);
    CHECK_THROWS_AS(make_class(1, one_by_one(I), conj(1)), RelationViolated);
    CHECK_THROWS_AS(make_class(0, one_by_one(0.5), conj(1)), RelationViolated);
    for (int d = 0; d < 8; ++d) {
        const AntiUnitary J = row_j(d, 4);
        const CMat b = base_point(d, J);
        CHECK(relation_residual(d, J, b) < 1e-12);
    }
}

TEST_CASE("random classes survive unitary change of basis and perturbations are rejected") {
    for (int d = 0; d < 8; ++d)
        for (int trial = 0; trial < 5; ++trial) {
            const KOClass x = random_class(d, 4);
            const CMat W = testing::random_unitary(4);
            const AntiUnitary J2(W * x.J.U * W.transpose());
            CHECK_NOTHROW(make_class(d, W * x.first * W.adjoint(), J2));
            CMat bad = x.first;
            bad(0, 1) += 0.05;
            CHECK_THROWS_AS(make_class(d, bad, x.J), RelationViolated);
        }
}

TEST_CASE("complexify drops J") {
    const KUClass y = complexify(unit_class());
    CHECK(y.degree == 0);
    CHECK(fro(y.first - one_by_one(1.0)) == 0.0);
    const KUClass z = complexify(eta_generator());
    CHECK(z.degree == 1);
    CHECK(fro(z.first - one_by_one(-1.0)) == 0.0);
}

TEST_CASE("realify examples") {
    KUClass y{0, one_by_one(1.0), one_by_one(0.0)};
    const KOClass x = realify(y, 0);
    CHECK(fro(x.first - identity(2)) < 1e-15);
    CHECK(x.J.square_sign() == 1);
    CHECK(scalar_invariant(x) == 2);

    KUClass u{1, one_by_one(I), one_by_one(1.0)};
    const KOClass r = realify(u, 1);
    CMat d(2, 2);
    d << I, 0, 0, -I;
    CHECK(fro(r.first - d) < 1e-15);
    CHECK(scalar_invariant(r) == 0);
    CHECK_THROWS(realify(u, 2));
}

TEST_CASE("realify after complexify doubles degree-0 classes") {
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Index n = testing::uniform_int(1, 16);
        const CMat Q = testing::random_orthogonal(n);
        auto proj = [&](Eigen::Index rank) {
            CMat D = CMat::Zero(n, n);
            for (Eigen::Index i = 0; i < rank; ++i) D(i, i) = 1.0;
            return CMat(Q * D * Q.adjoint());
        };
        const Eigen::Index a = testing::uniform_int(0, int(n)), b = testing::uniform_int(0, int(n));
        const KOClass x = make_class(0, proj(a), conj(n), proj(b));
        CHECK(scalar_invariant(x) == a - b);
        CHECK(scalar_invariant(realify(complexify(x), 0)) == 2 * scalar_invariant(x));
    }
}

TEST_CASE("eta generates the low degrees") {
    const KOClass e1 = eta_act(unit_class());
    CHECK(e1.degree == 1);
    CHECK(fro(e1.first - one_by_one(-1.0)) < 1e-15);
    CHECK(scalar_invariant(e1) == 1);
    const KOClass e2 = eta_act(e1);
    CHECK(e2.degree == 2);
    CHECK(scalar_invariant(e2) == 1);
    const KOClass e3 = eta_act(e2);
    CHECK(e3.degree == 3);
    CHECK(scalar_invariant(e3) == 0);
    // Trivial elements map to trivial elements.
    CHECK(scalar_invariant(eta_act(make_class(0, one_by_one(0.0), conj(1)))) == 0);
}

TEST_CASE("complexification kills the image of eta") {
    for (int trial = 0; trial < 50; ++trial) {
        const int d = trial % 8;
        const KOClass x = random_class(d, 4);
        const KUClass y = complexify(eta_act(x));
        CHECK(ku_invariant(y) == 0);
        if (y.degree == 0) CHECK(std::abs(y.first.trace() - y.second.trace()) < 1e-9);
    }
}

TEST_CASE("eta into a vanishing group gives zero") {
    for (int d : {2, 4, 5, 6})
        for (int trial = 0; trial < 4; ++trial) CHECK(scalar_invariant(eta_act(random_class(d, 4))) == 0);
}

TEST_CASE("external products") {
    const KOClass one = unit_class();
    for (int d = 0; d < 8; ++d) {
        const KOClass x = random_class(d, 2);
        const KOClass p = external_product(one, x);
        CHECK(p.degree == d);
        CHECK(scalar_invariant(p) == scalar_invariant(x));
    }
    const KOClass eta = eta_generator();
    const KOClass ee = external_product(eta, eta);
    CHECK(ee.degree == 2);
    CHECK(scalar_invariant(ee) == 1);
    CHECK(scalar_invariant(ee) == scalar_invariant(eta_act(eta_act(one))));
    const KOClass ed = external_product(eta, delta_class());
    CHECK(ed.degree == 5);
    CHECK(scalar_invariant(ed) == 0);
    CHECK(scalar_invariant(delta_class()) == 1);
    for (int trial = 0; trial < 20; ++trial) {
        const int a = testing::uniform_int(0, 7), b = testing::uniform_int(0, 7);
        const KOClass x = random_class(a, 2), y = random_class(b, 2);
        CHECK(external_product(x, y).degree == (a + b) % 8);
    }
}

TEST_CASE("auxiliary classes have no scalar invariant") {
    const KOClass x = make_class(1, one_by_one(-1.0), conj(1), std::nullopt, CoefficientAlgebra::Auxiliary);
    CHECK_THROWS(scalar_invariant(x));
    CHECK_THROWS(external_product(x, x));
}

TEST_CASE("pfaffian agrees with the expansion formula") {
    for (int n = 2; n <= 10; n += 2)
        for (int trial = 0; trial < 5; ++trial) {
            RMat A = testing::random_matrix(n).real();
            A = A - A.transpose().eval();
            const double ref = pfaffian_expansion(A);
            CHECK(pfaffian(A) == doctest::Approx(ref).epsilon(1e-10));
            CHECK(pfaffian(A) * pfaffian(A) == doctest::Approx(A.determinant()).epsilon(1e-9));
        }
    CHECK_THROWS(pfaffian(RMat::Zero(3, 3)));
}

TEST_CASE("degree-2 Pfaffian components are distinct") {
    // Pf(A) for 2x2 skew-orthogonal A is +-1; the two components are the two
    // signs and the class of eta^2 sits in the non-base one.
    RMat A(2, 2);
    A << 0, 1, -1, 0;
    CHECK(pfaffian(A) == 1.0);
    CHECK(pfaffian(RMat(-A)) == -1.0);
    const KOClass e2 = eta_act(eta_generator());
    CHECK(scalar_invariant(e2) == 1);
    CHECK(scalar_invariant(make_class(2, base_point(2, e2.J), e2.J)) == 0);
}

TEST_CASE("spin operators") {
    const SpinSearch none = spin_operator(eta_generator());
    CHECK(!none.S);

    const KOClass r = realify(KUClass{0, one_by_one(1.0), one_by_one(0.0)}, 0);
    const SpinSearch s = spin_operator(r);
    REQUIRE(s.S);
    CHECK(s.padded_dims == 0);
    CHECK(spin_residual(r, *s.S) < 1e-8);

    // Kane-Mele Fermi projector at k = 0 with J = T.
    const BlochModel km = kane_mele();
    const CMat P = fermi_projection(bloch(km, {0.0, 0.0}), km.fermi_level);
    const KOClass x = make_class(4, P, *km.symmetries.time_reversal);
    const SpinSearch k = spin_operator(x, km.spin_candidate);
    REQUIRE(k.S);
    CHECK(k.from_hint);
    CHECK(spin_residual(x, *km.spin_candidate) < 1e-12);
    const SpinSearch k2 = spin_operator(x);
    REQUIRE(k2.S);
    CHECK(!k2.contracted);
    CHECK(spin_residual(k2.target, *k2.S) < 1e-8);
    CHECK(spin_residual(padded_to(x, k2.S->rows()), *k2.S) < 1e-8);
}

TEST_CASE("spin operator exists exactly when eta kills the class") {
    int present = 0, absent = 0;
    for (int d = 0; d < 8; ++d)
        for (Eigen::Index n : {2, 4})
            for (int trial = 0; trial < 3; ++trial) {
                const KOClass x = random_class(d, n);
                const bool crit = scalar_invariant(eta_act(x)) == 0;
                const SpinSearch s = spin_operator(x);
                CHECK(s.S.has_value() == crit);
                if (s.S) {
                    CHECK(spin_residual(s.target, *s.S) < 1e-8);
                    if (!s.contracted) CHECK(spin_residual(padded_to(x, s.S->rows()), *s.S) < 1e-8);
                    if (s.contracted) CHECK((d == 3 || d == 7));
                }
                (s.S ? present : absent)++;
            }
    CHECK(present > 0);
    CHECK(absent > 0);
}

}  // TEST_SUITE

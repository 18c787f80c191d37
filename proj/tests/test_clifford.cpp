#include "kko/clifford.hpp"
#include "support.hpp"

#include <doctest.h>

#include <set>

using namespace kko;

TEST_SUITE("clifford") {

TEST_CASE("generators satisfy the Clifford relations up to n = 10") {
    for (int p = 0; p <= 10; ++p)
        for (int q = 0; p + q <= 10; ++q) {
            const CliffordRep r = build_clifford(p, q);
            CAPTURE(p);
            CAPTURE(q);
            REQUIRE(int(r.generators.size()) == p + q);
            CHECK(r.dim == 1 << ((p + q + 1) / 2));
            const CMat one = identity(r.dim);
            for (int i = 0; i < p + q; ++i) {
                const CMat& c = r.generators[i];
                CHECK(fro(c * c.adjoint() - one) < 1e-12);
                CHECK(fro(c * c - (i < p ? 1.0 : -1.0) * one) < 1e-12);
                CHECK(fro(r.grading * c + c * r.grading) < 1e-12);
                for (int j = i + 1; j < p + q; ++j) CHECK(fro(c * r.generators[j] + r.generators[j] * c) < 1e-12);
            }
            CHECK(fro(r.grading * r.grading - one) < 1e-12);
        }
}

TEST_CASE("seed representations") {
    const CliffordRep a = build_clifford(1, 0);
    CMat sx(2, 2);
    sx << 0, 1, 1, 0;
    CHECK(fro(a.generators[0] - sx) < 1e-15);
    const CliffordRep b = build_clifford(0, 1);
    CMat e(2, 2);
    e << 0, -1, 1, 0;
    CHECK(fro(b.generators[0] - e) < 1e-15);
    CMat z(2, 2);
    z << 1, 0, 0, -1;
    CHECK(fro(b.grading - z) < 1e-15);
}

TEST_CASE("Cl(8,0) acts irreducibly on a 16-dimensional module") {
    const CliffordRep r = build_clifford(8, 0);
    CHECK(r.dim == 16);
    CHECK(span_dimension(r) == 256);
}

TEST_CASE("chirality") {
    CHECK(fro(chirality(build_clifford(0, 0)) - identity(1)) < 1e-15);

    const CliffordRep r = build_clifford(2, 0);
    const CMat w = chirality(r);
    const CMat direct = cplx(0, 1) * r.generators[0] * r.generators[1];
    CHECK(fro(w - direct) < 1e-14);
    CHECK(fro(w * w - identity(r.dim)) < 1e-14);

    CliffordRep swapped = r;
    std::swap(swapped.generators[0], swapped.generators[1]);
    CHECK(fro(chirality(swapped) + w) < 1e-14);

    for (int p = 0; p <= 5; ++p)
        for (int q = 0; q <= 5; ++q) {
            const CliffordRep s = build_clifford(p, q);
            const CMat o = chirality(s);
            CHECK(fro(o * o - identity(s.dim)) < 1e-12);
        }
}

TEST_CASE("intertwiner conjugates the generators") {
    const AntiUnitary j0 = intertwiner(build_clifford(0, 0));
    CHECK(j0.square_sign() == 1);
    CHECK(std::abs(std::abs(j0.U(0, 0)) - 1.0) < 1e-14);

    for (int p = 0; p <= 6; ++p)
        for (int q = 0; q <= 6; ++q) {
            const CliffordRep r = build_clifford(p, q);
            const AntiUnitary J = intertwiner(r);
            CAPTURE(p);
            CAPTURE(q);
            CHECK(J.square_residual() < 1e-12);
            for (const CMat& c : r.generators) CHECK(fro(J.conjugate(c) - c) < 1e-12);
            // Square sign is a function of the KO degree (q - p) mod 8 alone.
            CHECK(J.square_sign() == sign_table(ko_degree(p, q)).alpha);
        }
}

TEST_CASE("intertwiner sign on the d = 0 and d = 4 rows") {
    CHECK(intertwiner(build_clifford(4, 4)).square_sign() == 1);
    CHECK(intertwiner(build_clifford(0, 8)).square_sign() == 1);
    CHECK(intertwiner(build_clifford(0, 4)).square_sign() == -1);
    CHECK(intertwiner(build_clifford(4, 0)).square_sign() == -1);
}

TEST_CASE("stored sign table") {
    const SignTriple d0 = sign_table(0);
    CHECK(d0.alpha == 1);
    CHECK(d0.alpha_dd == 1);
    const SignTriple d2 = sign_table(2);
    CHECK(d2.alpha == -1);
    CHECK(d2.alpha_dd == -1);
    CHECK(d2.alpha_prime == 1);
    const SignTriple d5 = sign_table(5);
    CHECK(d5.alpha == -1);
    CHECK(d5.alpha_prime == -1);
    CHECK(!d5.alpha_dd);
    CHECK(sign_table(-3) == sign_table(5));
}

TEST_CASE("measured signs reproduce the table and are 8-periodic") {
    for (int d = 0; d < 8; ++d) {
        const SignTriple s = sign_table(d);
        for (auto [p, q] : {std::pair{0, d}, std::pair{8 - d, 0}, std::pair{1, d + 1}}) {
            const SignTriple m = measured_signs(build_clifford(p, q));
            CAPTURE(p);
            CAPTURE(q);
            CHECK(m.alpha == s.alpha);
            if (m.alpha_prime) CHECK(*m.alpha_prime == s.alpha_prime.value_or(1));
            if (m.alpha_dd) CHECK(m.alpha_dd == s.alpha_dd);
            CHECK(bool(m.alpha_prime) == ((p + q) % 2 == 1));
            CHECK(bool(m.alpha_dd) == ((p + q) % 2 == 0));
        }
    }
    for (int q = 0; q <= 2; ++q) CHECK(measured_signs(build_clifford(8, q)) == measured_signs(build_clifford(0, q)));
}

TEST_CASE("swap_clifford_side") {
    const CliffordRep r = build_clifford(1, 0);
    CHECK(fro(swap_clifford_side(CMat::Zero(2, 2), r)) < 1e-15);

    const CMat F = testing::random_hermitian(2);
    const CMat Fp = swap_clifford_side(F, r);
    const CMat co = r.generators[0] * r.grading;
    // Odd F' against odd c^o: the graded commutator is the anticommutator.
    CHECK(fro(Fp * co + co * Fp) < 1e-12);
    CHECK(fro(swap_clifford_side(Fp, r) - Fp) < 1e-12);

    for (auto [p, q] : {std::pair{2, 1}, std::pair{0, 3}, std::pair{2, 2}}) {
        const CliffordRep s = build_clifford(p, q);
        const CMat G = testing::random_hermitian(s.dim);
        const CMat G1 = swap_clifford_side(G, s);
        CHECK(fro(swap_clifford_side(G1, s) - G1) < 1e-12);
        for (const CMat& c : s.generators) {
            const CMat o = c * s.grading;
            CHECK(fro(G1 * o + o * G1) < 1e-12);
        }
        // Already on the image: unchanged.
        CHECK(fro(swap_clifford_side(G1, s) - G1) < 1e-12);
    }
    CHECK_THROWS(swap_clifford_side(CMat::Zero(3, 3), r));
}

}  // TEST_SUITE

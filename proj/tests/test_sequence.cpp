#include "kko/sequence.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/LU>

using namespace kko;

namespace {

const SequenceMap& find_map(const ExactSequence& s, MapKind kind, const std::string& src, const std::string& tgt) {
    for (const auto& m : s.maps)
        if (m.kind == kind && m.source == src && m.target == tgt) return m;
    FAIL("no map " << src << " -> " << tgt);
    return s.maps.front();
}

// Zero as a map into Z^f + (Z2)^t: torsion rows only need to vanish mod 2.
bool zero_map(const IMat& m, const AbGroup& target) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const long long v = m(r, c);
            if (r < target.free ? v != 0 : v % 2 != 0) return false;
        }
    return true;
}

}  // namespace

TEST_SUITE("sequence") {

TEST_CASE("builtin groups") {
    const GradedGroups r = builtin_groups(Algebra::R);
    const AbGroup expect[8] = {kZ, kZ2, kZ2, kZero, kZ, kZero, kZero, kZero};
    for (int d = 0; d < 8; ++d) CHECK(r.ko_at(d) == expect[d]);
    CHECK(r.ku_at(0) == kZ);
    CHECK(r.ku_at(1) == kZero);
    CHECK(r.ko_at(1) == kZ2);

    const GradedGroups h = builtin_groups(Algebra::H);
    CHECK(h.ko_at(0) == kZ);
    CHECK(h.ko_at(1) == kZero);
    for (int d = 0; d < 8; ++d) CHECK(h.ko_at(d) == r.ko_at(d + 4));

    const GradedGroups c = builtin_groups(Algebra::C);
    CHECK(c.ko_at(3) == kZero);
    CHECK(c.ko_at(0) == kZ);
    CHECK(c.ku_at(0).free == 2);
    CHECK(algebra_name(parse_algebra("H")) == "H");
    CHECK_THROWS(parse_algebra("O"));
}

TEST_CASE("every node is exact for R, C and H") {
    for (Algebra a : {Algebra::R, Algebra::C, Algebra::H}) {
        const ExactnessReport r = verify_exactness(a);
        CHECK(r.nodes.size() == 24);
        CHECK(r.all_pass);
        for (const auto& n : r.nodes) {
            CAPTURE(n.label);
            CHECK(n.pass);
        }
    }
}

TEST_CASE("distinguished multiplicities") {
    const ExactSequence r = build_sequence(Algebra::R);
    const SequenceMap& bd = find_map(r, MapKind::RealifyBott, "KU_0", "KO_0");
    REQUIRE(bd.matrix.size() == 1);
    CHECK(std::llabs(bd.matrix(0, 0)) == 2);

    const IMat e0 = eta_map(Algebra::R, 0);
    REQUIRE(e0.size() == 1);
    CHECK(e0(0, 0) % 2 != 0);  // onto Z2

    const ExactSequence h = build_sequence(Algebra::H);
    const SequenceMap& hb = find_map(h, MapKind::RealifyBott, "KU_0", "KO_0");
    REQUIRE(hb.matrix.size() == 1);
    CHECK(std::llabs(hb.matrix(0, 0)) == 1);  // Z -> Z onto, then 0
    CHECK(builtin_groups(Algebra::H).ko_at(1).trivial());

    CHECK(complexify_map(Algebra::R, 0)(0, 0) == 1);
    CHECK(std::llabs(complexify_map(Algebra::R, 4)(0, 0)) == 2);
}

TEST_CASE("realification after complexification is twice the identity") {
    for (Algebra a : {Algebra::R, Algebra::C, Algebra::H})
        for (int n = 0; n < 8; ++n) {
            const GradedGroups g = builtin_groups(a);
            if (g.ko_at(n).free == 0) continue;
            const IMat rc = realify_plain(a, n) * complexify_map(a, n);
            const IMat top = rc.topLeftCorner(g.ko_at(n).free, g.ko_at(n).free);
            CAPTURE(n);
            CHECK(top == 2 * IMat::Identity(top.rows(), top.cols()));
        }
}

TEST_CASE("eta cubed vanishes") {
    for (Algebra a : {Algebra::R, Algebra::C, Algebra::H})
        for (int n = 0; n < 8; ++n) {
            const IMat e3 = eta_map(a, n + 2) * eta_map(a, n + 1) * eta_map(a, n);
            CHECK(zero_map(e3, builtin_groups(a).ko_at(n + 3)));
        }
}

TEST_CASE("after inverting 2 the sequence splits") {
    for (Algebra a : {Algebra::R, Algebra::C, Algebra::H}) {
        const GradedGroups g = builtin_groups(a);
        for (int i = 0; i < 8; ++i) CHECK(g.ku_at(i).free == g.ko_at(i).free + g.ko_at(i + 2).free);
    }
}

TEST_CASE("a corrupted table is caught next to the change") {
    const ExactSequence bad = mutate_ko(build_sequence(Algebra::R), 3, kZ);
    const ExactnessReport r = verify_exactness(bad);
    CHECK(!r.all_pass);
    bool ko3_fails = false;
    for (const auto& n : r.nodes)
        if (n.label == "KO_3" && !n.pass) {
            ko3_fails = true;
            CHECK(!n.witness.empty());
        }
    CHECK(ko3_fails);
}

TEST_CASE("lattice helpers") {
    for (int trial = 0; trial < 20; ++trial) {
        const int rows = testing::uniform_int(1, 4), cols = testing::uniform_int(1, 5);
        IMat A(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) A(i, j) = testing::uniform_int(-3, 3);
        const IMat K = integer_kernel(A);
        if (K.cols()) CHECK((A * K).isZero());
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(A.cast<double>());
        CHECK(K.cols() == cols - lu.rank());

        // Unimodular row operations leave the Hermite form unchanged.
        IMat U = IMat::Identity(rows, rows);
        for (int s = 0; s + 1 < rows; ++s) U(s, s + 1) = testing::uniform_int(-2, 2);
        CHECK(hermite_rows(U * A) == hermite_rows(A));
    }
}

}  // TEST_SUITE

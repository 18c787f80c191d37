#include "kko/models.hpp"
#include "kko/pairing.hpp"
#include "kko/symmetry.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace kko;

namespace {

std::vector<double> random_k(int d) {
    std::vector<double> k(d);
    for (auto& x : k) x = testing::uniform(-10.0, 10.0);
    return k;
}

// Points of the torus fixed by k -> -k.
std::vector<std::vector<double>> trims(int d) {
    std::vector<std::vector<double>> out{{}};
    for (int i = 0; i < d; ++i) {
        std::vector<std::vector<double>> next;
        for (const auto& k : out)
            for (double v : {0.0, kPi}) {
                auto q = k;
                q.push_back(v);
                next.push_back(q);
            }
        out = next;
    }
    return out;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("bloch basics") {
    BlochModel z = empty_model(2, 3);
    CHECK(fro(bloch(z, {0.3, 0.4})) == 0.0);

    BlochModel onsite = empty_model(1, 2);
    const CMat h0 = testing::random_hermitian(2);
    add_hopping(onsite, {0}, h0);
    CHECK(fro(bloch(onsite, {0.1}) - h0) < 1e-15);
    CHECK(fro(bloch(onsite, {2.7}) - h0) < 1e-15);

    BlochModel chain = empty_model(1, 1);
    add_term(chain, {1}, 0, 0, 0.7);
    for (double k : {0.0, 0.4, 1.9, 3.1}) CHECK(bloch(chain, {k})(0, 0).real() == doctest::Approx(1.4 * std::cos(k)));

    // Two sites: eigenvalues +-|v + w e^{-ik}| against the dense solver.
    const BlochModel s = ssh(0.4, 1.1);
    for (double k : {0.0, 0.5, 2.0, 3.0}) {
        Eigen::SelfAdjointEigenSolver<CMat> es(bloch(s, {k}));
        const double r = std::abs(0.4 + 1.1 * std::exp(cplx(0, -k)));
        CHECK(es.eigenvalues()(0) == doctest::Approx(-r));
        CHECK(es.eigenvalues()(1) == doctest::Approx(r));
    }
    CHECK_THROWS(add_hopping(onsite, {0}, testing::random_matrix(2)));
    CHECK_THROWS(bloch(onsite, {0.1, 0.2}));
}

TEST_CASE("bloch matrices are Hermitian") {
    for (const auto& name : corpus_names()) {
        const BlochModel m = corpus(name);
        CHECK_NOTHROW(validate_model(m));
        for (int trial = 0; trial < 20; ++trial) {
            const CMat H = bloch(m, random_k(m.lattice_dim));
            CHECK(fro(H - H.adjoint()) < 1e-12);
        }
    }
    CHECK_THROWS(corpus("graphene"));
}

TEST_CASE("gap scans") {
    const GapReport a = gap(atomic_limit(2, 0.8), 10);
    CHECK(a.gap == doctest::Approx(0.8).epsilon(1e-14));

    // Haldane: the gap closes at mass = 3 sqrt(3) t2 sin(phi).
    const double mc = 3.0 * std::sqrt(3.0) * 0.15;
    double last = 1e9;
    for (double f : {0.2, 0.6, 0.9, 0.99}) {
        const double g = gap(haldane(1.0, 0.15, kPi / 2, f * mc), 60).gap;
        CHECK(g < last);
        last = g;
    }
    CHECK(last < 0.02);

    for (const auto& name : corpus_names()) {
        const BlochModel m = corpus(name);
        for (int n : {6, 12, 24}) CHECK(gap(m, 2 * n).gap <= gap(m, n).gap + 1e-15);
    }
}

TEST_CASE("corpus classes") {
    const SymmetryClass km = classify(kane_mele());
    CHECK(km.label == AZLabel::AII);
    CHECK(km.t_square == -1);
    CHECK(km.degree == 4);

    const SymmetryClass s = classify(ssh());
    CHECK(s.chiral);
    const BlochModel m = ssh();
    for (int trial = 0; trial < 5; ++trial) {
        const RelationReport r = detect_relation(*m.symmetries.chiral, bloch(m, random_k(1)));
        CHECK(r.relation == Relation::Anticommutes);
    }
    CHECK(classify(haldane()).label == AZLabel::A);
    CHECK(classify(dirac2d()).complex);
}

TEST_CASE("declared corpus symmetries hold") {
    for (const auto& name : corpus_names()) {
        const BlochModel m = corpus(name);
        for (int trial = 0; trial < 5; ++trial) {
            const CMat H = bloch(m, random_k(m.lattice_dim));
            if (m.symmetries.chiral) CHECK(detect_relation(*m.symmetries.chiral, H).residual < 1e-10);
        }
        for (const auto& k : trims(m.lattice_dim)) {
            const CMat H = bloch(m, k);
            if (m.symmetries.time_reversal) {
                const RelationReport r = detect_relation(*m.symmetries.time_reversal, H);
                CHECK(r.relation == Relation::Commutes);
                CHECK(r.residual < 1e-10);
            }
            if (m.symmetries.particle_hole) {
                const RelationReport r = detect_relation(*m.symmetries.particle_hole, H);
                CHECK(r.relation == Relation::Anticommutes);
                CHECK(r.residual < 1e-10);
            }
        }
    }
    const BlochModel km = kane_mele();
    REQUIRE(km.spin_candidate);
    for (int trial = 0; trial < 5; ++trial) {
        const CMat H = bloch(km, random_k(2));
        CHECK(fro(*km.spin_candidate * H - H * *km.spin_candidate) < 1e-12);
    }
}

TEST_CASE("mass inversion changes the Chern number by one") {
    const long a = fhs_chern(dirac2d(1.0), 40);
    const long b = fhs_chern(dirac2d(-1.0), 40);
    CHECK(std::labs(a - b) == 1);
}

TEST_CASE("dimensional reduction") {
    const BlochModel s = ssh(0.3, 0.9);
    const BlochModel r = dimensional_reduce(s);
    CHECK(r.lattice_dim == 0);
    CHECK(fro(bloch(r, {}) - bloch(s, {0.0})) < 1e-15);
    CMat sum = CMat::Zero(2, 2);
    for (const auto& [n, h] : s.hoppings) sum += h;
    CHECK(fro(bloch(r, {}) - sum) < 1e-15);
    CHECK_THROWS(dimensional_reduce(r));

    for (const auto& name : corpus_names()) {
        const BlochModel m = corpus(name);
        const BlochModel red = dimensional_reduce(m);
        for (int trial = 0; trial < 10; ++trial) {
            auto k = random_k(m.lattice_dim - 1);
            auto full = k;
            full.push_back(0.0);
            CHECK(fro(bloch(red, k) - bloch(m, full)) < 1e-12);
        }
    }

    // A model constant in k2 keeps its first-axis hoppings.
    BlochModel flat = empty_model(2, 1);
    add_term(flat, {1, 0}, 0, 0, 0.5);
    const BlochModel f1 = dimensional_reduce(flat);
    CHECK(fro(f1.hoppings.at({1}) - flat.hoppings.at({1, 0})) == 0.0);

    const SymmetryClass c = classify(dimensional_reduce(kane_mele()));
    CHECK(c.t_square == -1);
}

TEST_CASE("direct sums and conjugate models") {
    const BlochModel h = haldane();
    const long c = fhs_chern(h, 30);
    CHECK(std::labs(c) == 1);
    CHECK(fhs_chern(conjugate_model(h), 30) == -c);
    CHECK(fhs_chern(direct_sum(h, h), 30) == 2 * c);
    CHECK(fhs_chern(direct_sum(h, conjugate_model(h)), 30) == 0);
    CHECK_THROWS(direct_sum(h, ssh()));
}

}  // TEST_SUITE

#pragma once

#include "kko/antiunitary.hpp"
#include "kko/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kko {

struct SymmetryData {
    std::optional<AntiUnitary> time_reversal;  // T H T^{-1} = H
    std::optional<AntiUnitary> particle_hole;  // C H C^{-1} = -H
    std::optional<CMat> chiral;                // S H S^{-1} = -H, S^2 = 1
};

enum class AZLabel { A, AIII, AI, BDI, D, DIII, AII, CII, C, CI };

std::string az_name(AZLabel label);

struct SymmetryClass {
    AZLabel label = AZLabel::A;
    bool complex = true;  // no antiunitary symmetry
    int degree = 0;       // ko dimension mod 8, or complex degree mod 2
    std::optional<int> t_square;
    std::optional<int> c_square;
    bool chiral = false;
    std::vector<std::pair<std::string, double>> residuals;

    std::string name() const { return az_name(label); }
};

struct GappedSystem {
    CMat hamiltonian;
    double fermi_level = 0.0;
    SymmetryData symmetries;
    double gap_tolerance = 1e-6;
};

enum class Relation { Commutes, Anticommutes, Neither };

std::string relation_name(Relation r);

struct RelationReport {
    Relation relation = Relation::Neither;
    double residual = 0.0;  // of the reported relation, or the smaller one for Neither
    double commute_residual = 0.0;
    double anticommute_residual = 0.0;
};

// Symmetry residual tolerance relative to the size of H.
double symmetry_tolerance(const CMat& H);

RelationReport detect_relation(const AntiUnitary& op, const CMat& H);
RelationReport detect_relation(const CMat& unitary, const CMat& H);

// Pure lookup from the symmetry signature to the ten classes.
SymmetryClass class_from_signature(std::optional<int> t_square, std::optional<int> c_square,
                                   bool chiral);

SymmetryClass classify(const GappedSystem& sys);

CMat fermi_projection(const GappedSystem& sys);
CMat fermi_projection(const CMat& H, double mu, double gap_tolerance = 1e-6);

// Checks S^2 = 1 and, when T and C are both given, S proportional to TC.
// Returns the residuals; throws SymmetryViolated on failure.
std::vector<std::pair<std::string, double>> validate_symmetry_operators(const SymmetryData& sym,
                                                                        double tol);

}  // namespace kko

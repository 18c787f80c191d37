#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

namespace kko {

using IMat = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
using IVec = Eigen::Matrix<long long, Eigen::Dynamic, 1>;

// Z^free + (Z2)^torsion. Coordinates list the free part first.
struct AbGroup {
    int free = 0;
    int torsion = 0;

    int dim() const { return free + torsion; }
    bool trivial() const { return dim() == 0; }
    std::string name() const;
    bool operator==(const AbGroup&) const = default;
};

inline const AbGroup kZero{0, 0};
inline const AbGroup kZ{1, 0};
inline const AbGroup kZ2{0, 1};

enum class Algebra { R, C, H };

std::string algebra_name(Algebra a);
Algebra parse_algebra(const std::string& s);

struct GradedGroups {
    std::array<AbGroup, 8> ko;
    std::array<AbGroup, 2> ku;

    const AbGroup& ko_at(int n) const { return ko[((n % 8) + 8) % 8]; }
    const AbGroup& ku_at(int n) const { return ku[((n % 2) + 2) % 2]; }
};

GradedGroups builtin_groups(Algebra a);

enum class MapKind { Complexify, RealifyBott, Eta };

std::string map_symbol(MapKind k);

// One arrow of the sequence with its matrix on generators (rows: target
// coordinates, torsion rows read mod 2).
struct SequenceMap {
    MapKind kind;
    int degree;  // degree of the source group
    std::string source;
    std::string target;
    int degree_shift;
    AbGroup source_group;
    AbGroup target_group;
    IMat matrix;
};

// Nodes KO_m, KU_m, KO_{m-2} for m = 0, -1, ..., -7 with arrows c, r beta^-1, eta
// between consecutive nodes (the last arrow wraps around).
struct ExactSequence {
    Algebra algebra = Algebra::R;
    GradedGroups groups;
    std::vector<std::string> labels;  // 24
    std::vector<AbGroup> nodes;       // 24
    std::vector<SequenceMap> maps;    // maps[j]: node j -> node j+1
};

ExactSequence build_sequence(Algebra a);
std::vector<SequenceMap> sequence_maps(Algebra a);

// Replaces KO_n (every node carrying it) by g and makes all arrows into and
// out of it zero. Negative control for the verifier.
ExactSequence mutate_ko(const ExactSequence& seq, int n, const AbGroup& g);

struct NodeReport {
    int index = 0;
    std::string label;
    AbGroup group;
    bool composite_zero = true;
    bool kernel_in_image = true;
    bool pass = true;
    std::string witness;
};

struct ExactnessReport {
    Algebra algebra = Algebra::R;
    std::vector<NodeReport> nodes;
    bool all_pass = true;
};

ExactnessReport verify_exactness(const ExactSequence& seq);
ExactnessReport verify_exactness(Algebra a);

// Lattice helpers on Z^n (exposed for tests).
// Canonical row Hermite normal form of the lattice spanned by the rows.
IMat hermite_rows(const IMat& gens);
// Integer basis (as columns) of {x : A x = 0}.
IMat integer_kernel(const IMat& A);

// Composite of maps of the given kinds starting at `degree` on KO, as a matrix
// (used for r c = 2 and eta^3 = 0 checks). Plain realification KU_n -> KO_n.
IMat realify_plain(Algebra a, int n);
IMat complexify_map(Algebra a, int n);
IMat eta_map(Algebra a, int n);

}  // namespace kko

#pragma once

#include "kko/antiunitary.hpp"
#include "kko/types.hpp"

#include <optional>
#include <string>

namespace kko {

// Scalar classes are plain matrices over C; auxiliary ones carry coefficients
// from a larger algebra (e.g. a lattice) and have no scalar invariant.
enum class CoefficientAlgebra { Scalar, Auxiliary };

// Formal difference [first] - [second] in one of the eight table pictures.
// Even degree: projectors. Odd degree: unitaries.
struct KOClass {
    int degree = 0;
    CMat first;
    CMat second;
    AntiUnitary J;
    bool second_is_base = true;
    CoefficientAlgebra algebra = CoefficientAlgebra::Scalar;

    Eigen::Index size() const { return first.rows(); }
    bool even() const { return degree % 2 == 0; }
};

struct KUClass {
    int degree = 0;  // mod 2
    CMat first;
    CMat second;

    Eigen::Index size() const { return first.rows(); }
};

enum class PayloadKind { ProjectorFixed, ProjectorFlipped, UnitaryFixed, UnitaryAdjoint };

struct TableRow {
    int degree;
    int j_square;
    PayloadKind kind;
    const char* relation;
};

TableRow table_row(int degree);

// Residual of the payload relation of the row (J X J* against X, 1-X or X*),
// together with the projector/unitary identity.
double relation_residual(int degree, const AntiUnitary& J, const CMat& X);

// Canonical trivial element for the row and J: 0 for rows 0 and 4, 1 for odd
// rows, a frame-built projector with J p J* = 1 - p for rows 2 and 6.
CMat base_point(int degree, const AntiUnitary& J);

// Unitary W with U conj(W) = W (requires J^2 = +1).
CMat jreal_frame(const AntiUnitary& J);
// Unitary W with columns w_1, J w_1, w_2, J w_2, ... (requires J^2 = -1).
CMat quaternionic_frame(const AntiUnitary& J);

// Validates all table relations; throws RelationViolated.
KOClass make_class(int degree, const CMat& first, const AntiUnitary& J,
                   const std::optional<CMat>& second = std::nullopt,
                   CoefficientAlgebra algebra = CoefficientAlgebra::Scalar);

// Re-runs make_class validation on an existing value.
void validate(const KOClass& x);

KUClass complexify(const KOClass& x);
KOClass realify(const KUClass& y, int target_degree);
KOClass eta_act(const KOClass& x);
KOClass external_product(const KOClass& x, const KOClass& y);

// Appends `units` trivial summands (1 dimension each for J^2 = +1 rows,
// 2 for J^2 = -1 rows and for row 2).
KOClass pad_class(const KOClass& x, int units);

// Rank difference (even) or 0 (odd: the complex group vanishes over scalars).
long ku_invariant(const KUClass& y);

// Integer for degrees 0 and 4, Z2 (0 or 1) for degrees 1 and 2, 0 otherwise.
long scalar_invariant(const KOClass& x);

// Pfaffian of a real antisymmetric matrix by Householder reduction.
double pfaffian(const RMat& A);

struct SpinSearch {
    std::optional<CMat> S;  // acts on target
    int padded_dims = 0;
    bool from_hint = false;
    // Set when the payload had to be contracted to the base point first
    // (degrees 3 and 7, where the row relation allows exp(i t H)).
    bool contracted = false;
    KOClass target;  // padded (and possibly contracted) class S was found for
};

// Looks for S with S^2 = 1, [S, payload] = 0, S J = -J S, first on x, then on
// its contraction to the base point when the row allows one. For scalar classes
// the answer is cross-checked against scalar_invariant(eta_act(x)) == 0 and a
// disagreement raises SpinSearchInconclusive.
SpinSearch spin_operator(const KOClass& x, const std::optional<CMat>& hint = std::nullopt);

// Residual of the three spin-operator conditions for S on x.
double spin_residual(const KOClass& x, const CMat& S);

}  // namespace kko

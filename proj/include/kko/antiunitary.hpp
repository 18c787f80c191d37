#pragma once

#include "kko/types.hpp"

namespace kko {

// Antilinear operator v -> U * conj(v).
struct AntiUnitary {
    CMat U;

    AntiUnitary() = default;
    explicit AntiUnitary(CMat u) : U(std::move(u)) {}

    static AntiUnitary conjugation(Eigen::Index n) { return AntiUnitary(identity(n)); }

    Eigen::Index dim() const { return U.rows(); }

    CVec apply(const CVec& v) const { return U * v.conjugate(); }

    // J X J^{-1} for a linear operator X.
    CMat conjugate(const CMat& X) const { return U * X.conjugate() * U.adjoint(); }

    // J^2 = U conj(U), expected to be +-1.
    CMat square() const { return U * U.conjugate(); }

    int square_sign() const {
        return square().trace().real() >= 0.0 ? 1 : -1;
    }

    double square_residual() const {
        return fro(square() - double(square_sign()) * identity(dim()));
    }

    AntiUnitary tensor(const AntiUnitary& other) const {
        return AntiUnitary(kron(U, other.U));
    }

    // J composed on the left with a unitary W: v -> W U conj(v).
    AntiUnitary after(const CMat& W) const { return AntiUnitary(W * U); }
};

inline AntiUnitary direct_sum(const AntiUnitary& a, const AntiUnitary& b) {
    return AntiUnitary(direct_sum(a.U, b.U));
}

}  // namespace kko

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace kko {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Default absolute tolerance for matrix identities.
inline constexpr double kTol = 1e-10;

inline constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ResidualTooLarge : public Error {
public:
    ResidualTooLarge(double raw, double residual)
        : Error("ResidualTooLarge", "raw value " + std::to_string(raw) +
                                        " is " + std::to_string(residual) +
                                        " away from an integer"),
          raw(raw), residual(residual) {}
    double raw;
    double residual;
};

class RelationViolated : public Error {
public:
    RelationViolated(int row, std::string relation, double residual)
        : Error("RelationViolated", "row " + std::to_string(row) + ", " +
                                        relation + ", residual " +
                                        std::to_string(residual)),
          row(row), relation(std::move(relation)), residual(residual) {}
    int row;
    std::string relation;
    double residual;
};

class SymmetryViolated : public Error {
public:
    SymmetryViolated(std::string which, double residual)
        : Error("SymmetryViolated", which + " residual " + std::to_string(residual)),
          which(std::move(which)), residual(residual) {}
    std::string which;
    double residual;
};

class FlatteningObstructed : public Error {
public:
    FlatteningObstructed(std::vector<double> k, double gap)
        : Error("FlatteningObstructed",
                "projected spin spectrum gap " + std::to_string(gap)),
          k(std::move(k)), gap(gap) {}
    std::vector<double> k;
    double gap;
};

class RealityViolated : public Error {
public:
    RealityViolated(double t, double residual)
        : Error("RealityViolated", "sample t=" + std::to_string(t) +
                                       " residual " + std::to_string(residual)),
          t(t), residual(residual) {}
    double t;
    double residual;
};

// Spectral norm is expensive; most checks use the Frobenius norm, which bounds it.
inline double fro(const CMat& m) { return m.norm(); }

inline CMat identity(Eigen::Index n) { return CMat::Identity(n, n); }

inline CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline CMat direct_sum(const CMat& a, const CMat& b) {
    CMat out = CMat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

inline void require_square(const CMat& m, const char* what) {
    if (m.rows() != m.cols())
        throw Error("DimensionMismatch", std::string(what) + " is not square");
}

inline void require_same_size(const CMat& a, const CMat& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error("DimensionMismatch", what);
}

}  // namespace kko

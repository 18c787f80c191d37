#pragma once

#include "kko/types.hpp"

#include <Eigen/QR>

#include <random>

namespace testing {

using kko::CMat;
using kko::cplx;

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(20240611ULL);
    return g;
}

inline CMat random_matrix(Eigen::Index n, Eigen::Index m = -1) {
    if (m < 0) m = n;
    std::normal_distribution<double> d;
    CMat a(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) a(i, j) = cplx(d(rng()), d(rng()));
    return a;
}

inline CMat random_hermitian(Eigen::Index n) {
    const CMat a = random_matrix(n);
    return 0.5 * (a + a.adjoint());
}

inline CMat random_unitary(Eigen::Index n) {
    Eigen::HouseholderQR<CMat> qr(random_matrix(n));
    return qr.householderQ() * CMat::Identity(n, n);
}

// Real orthogonal matrix, as a complex matrix.
inline CMat random_orthogonal(Eigen::Index n) {
    std::normal_distribution<double> d;
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = d(rng());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    return q.cast<cplx>();
}

inline int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

}  // namespace testing

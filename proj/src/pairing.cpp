#include "kko/pairing.hpp"

#include "kko/kclass.hpp"
#include "kko/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace kko {

namespace {

const cplx I(0.0, 1.0);

CMat pauli_y() {
    CMat m(2, 2);
    m << 0, -I, I, 0;
    return m;
}
CMat pauli_z() {
    CMat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

CMat comm(const CMat& a, const CMat& b) { return a * b - b * a; }

CMat mat_pow(const CMat& a, int k) {
    CMat out = identity(a.rows());
    for (int i = 0; i < k; ++i) out = out * a;
    return out;
}

double factorial(int n) { return std::tgamma(double(n) + 1.0); }

double wrap(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0) a += 2.0 * kPi;
    return a - kPi;
}

void require_uniform(const HomotopyPath& p) {
    if (p.size() < 2) throw Error("InvalidPath", "a path needs at least two samples");
    const double h = (p.t.back() - p.t.front()) / double(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i)
        if (std::abs(p.t[i] - p.t[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw Error("InvalidPath", "samples are not uniformly spaced");
}

// Central differences, one-sided at the ends.
CMat derivative(const HomotopyPath& p, std::size_t i) {
    const std::size_t n = p.size();
    if (i == 0) return (p.y[1] - p.y[0]) / (p.t[1] - p.t[0]);
    if (i == n - 1) return (p.y[n - 1] - p.y[n - 2]) / (p.t[n - 1] - p.t[n - 2]);
    return (p.y[i + 1] - p.y[i - 1]) / (p.t[i + 1] - p.t[i - 1]);
}

// Trapezoid rule over per-sample integrand values, tree-summed.
cplx trapezoid(const HomotopyPath& p, const std::vector<cplx>& f) {
    const double h = (p.t.back() - p.t.front()) / double(p.size() - 1);
    std::vector<cplx> w(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        w[i] = f[i] * h * ((i == 0 || i + 1 == f.size()) ? 0.5 : 1.0);
    return tree_sum(w);
}

std::vector<cplx> sample_integrand(const HomotopyPath& p, const std::function<cplx(std::size_t)>& f) {
    std::vector<cplx> out(p.size());
    parallel_for(p.size(), [&](std::size_t i) { out[i] = f(i); });
    return out;
}

Z2Result to_z2(cplx raw, double threshold) {
    Z2Result r;
    r.integer = round_pairing(raw, threshold);
    r.value = ((r.integer.value % 2) + 2) % 2;
    return r;
}

// Occupied-band frames on an N x N grid, index i * N + j.
long fhs_from_frames(const std::vector<CMat>& frames, int N) {
    std::vector<double> flux(frames.size());
    parallel_for(frames.size(), [&](std::size_t idx) {
        const int i = int(idx) / N;
        const int j = int(idx) % N;
        auto at = [&](int a, int b) -> const CMat& { return frames[((a + N) % N) * N + (b + N) % N]; };
        auto link = [&](const CMat& a, const CMat& b) {
            const cplx d = (a.adjoint() * b).determinant();
            return d / std::abs(d);
        };
        const cplx u1 = link(at(i, j), at(i + 1, j));
        const cplx u2 = link(at(i + 1, j), at(i + 1, j + 1));
        const cplx u3 = link(at(i + 1, j + 1), at(i, j + 1));
        const cplx u4 = link(at(i, j + 1), at(i, j));
        flux[idx] = std::arg(u1 * u2 * u3 * u4);
    });
    const double c = tree_sum(flux) / (2.0 * kPi);
    return std::lround(c);
}

}  // namespace

Represented represent(const FredholmModule& m, const CMat& a) {
    Represented r;
    const CMat eps = m.grading ? *m.grading : identity(m.dim());
    if (!m.rep) {
        if (a.rows() != m.dim()) throw Error("DimensionMismatch", "payload does not act on the module");
        r.F = m.F;
        r.eps = eps;
        r.a = a;
        return r;
    }
    const CMat& R = *m.rep;
    r.a = kron(R, a);
    if (m.dim() == r.a.rows()) {
        r.F = m.F;
        r.eps = eps;
    } else if (m.dim() == R.rows()) {
        r.F = kron(m.F, identity(a.rows()));
        r.eps = kron(eps, identity(a.rows()));
    } else {
        throw Error("DimensionMismatch", "payload size incompatible with the module");
    }
    return r;
}

void validate_module(const FredholmModule& m, double tol) {
    const Eigen::Index n = m.dim();
    double r = std::max(fro(m.F - m.F.adjoint()), fro(m.F * m.F - identity(n)));
    if (r > tol) throw Error("InvalidModule", "F is not a self-adjoint symmetry, residual " + std::to_string(r));
    if (m.grading) {
        const CMat& e = *m.grading;
        r = std::max(fro(e * e - identity(n)), fro(e * m.F + m.F * e));
        if (r > tol) throw Error("InvalidModule", "grading residual " + std::to_string(r));
    }
}

ChernCoefficients chern_coefficients(int k) {
    if (k < 0) throw Error("InvalidLevel", "negative level");
    ChernCoefficients c;
    c.n = k;
    const int n = k / 2;
    const double sign = n % 2 ? -1.0 : 1.0;
    if (k % 2 == 0) {
        c.lambda = sign * factorial(n);
        c.mu = 1.0 / (std::pow(2.0, 2 * n + 1) * factorial(n));
    } else {
        const double g = std::tgamma(n + 1.5);
        c.lambda = sign * g;
        c.mu = 1.0 / (std::pow(2.0, 2 * n + 2) * g);
    }
    return c;
}

PairingResult round_pairing(cplx raw, double threshold) {
    PairingResult r;
    r.raw = raw;
    r.value = std::lround(raw.real());
    r.residual = std::abs(raw - cplx(double(r.value), 0.0));
    if (r.residual > threshold) throw ResidualTooLarge(raw.real(), r.residual);
    return r;
}

cplx pair_even_raw(const FredholmModule& m, const CMat& e, int n) {
    const Represented r = represent(m, e);
    const CMat c = comm(r.F, r.a);
    const double sign = n % 2 ? -1.0 : 1.0;
    return sign * (r.eps * r.a * mat_pow(c, 2 * n)).trace();
}

cplx pair_odd_raw(const FredholmModule& m, const CMat& u, int n) {
    const Represented r = represent(m, u - identity(u.rows()));
    const CMat a = r.a;
    const CMat ca = comm(r.F, a);
    const CMat cas = comm(r.F, CMat(a.adjoint()));
    const double sign = n % 2 ? -1.0 : 1.0;
    return sign / std::pow(2.0, 2 * n + 1) * (a.adjoint() * ca * mat_pow(cas * ca, n)).trace();
}

PairingResult pair_even(const FredholmModule& m, const CMat& e, int n, double threshold) {
    return round_pairing(pair_even_raw(m, e, n), threshold);
}

PairingResult pair_odd(const FredholmModule& m, const CMat& u, int n, double threshold) {
    return round_pairing(pair_odd_raw(m, u, n), threshold);
}

HomotopyPath sample_path(double t0, double t1, std::size_t samples, const std::function<CMat(double)>& f) {
    if (samples < 2) throw Error("InvalidPath", "a path needs at least two samples");
    HomotopyPath p;
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = t0 + (t1 - t0) * double(i) / double(samples - 1);
        p.t.push_back(t);
        p.y.push_back(f(t));
    }
    return p;
}

HomotopyPath constant_path(const CMat& y, std::size_t samples, double t0, double t1) {
    return sample_path(t0, t1, samples, [&](double) { return y; });
}

HomotopyPath reverse(const HomotopyPath& p) {
    HomotopyPath r;
    r.t = p.t;
    r.y.assign(p.y.rbegin(), p.y.rend());
    return r;
}

HomotopyPath concatenate(const HomotopyPath& a, const HomotopyPath& b, double tol) {
    if (a.size() == 0) return b;
    if (b.size() == 0) return a;
    const double r = fro(a.y.back() - b.y.front());
    if (r > tol) throw Error("EndpointMismatch", "paths do not meet, residual " + std::to_string(r));
    HomotopyPath out = a;
    const double shift = a.t.back() - b.t.front();
    for (std::size_t i = 1; i < b.size(); ++i) {
        out.t.push_back(b.t[i] + shift);
        out.y.push_back(b.y[i]);
    }
    return out;
}

double max_step(const HomotopyPath& p) {
    double s = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        Eigen::JacobiSVD<CMat> svd(p.y[i] - p.y[i - 1]);
        s = std::max(s, svd.singularValues()(0));
    }
    return s;
}

CMat clifford_include(const CMat& s) { return kron(s, pauli_z()); }

HomotopyPath bott_suspend(const CMat& s, std::size_t samples) {
    const CMat a = clifford_include(s);
    const CMat b = kron(identity(s.rows()), pauli_y());
    return sample_path(-1.0, 1.0, samples, [&](double t) {
        return CMat(std::cos(kPi * t / 2) * a + std::sin(kPi * t / 2) * b);
    });
}

LiftPair build_complex_lift(const CMat& s1, const CMat& s2, const HomotopyPath& h, double tol) {
    require_uniform(h);
    const CMat j1 = clifford_include(s1);
    const CMat j2 = clifford_include(s2);
    if (h.y.front().rows() != j1.rows()) throw Error("DimensionMismatch", "homotopy is not in the stabilised size");
    const double r0 = fro(h.y.front() - j1);
    const double r1 = fro(h.y.back() - j2);
    if (std::max(r0, r1) > tol)
        throw Error("EndpointMismatch", "homotopy endpoints differ from j(s1), j(s2) by " +
                                            std::to_string(std::max(r0, r1)));
    const std::size_t m = h.size();
    const CMat b = kron(identity(s1.rows()), pauli_y());
    auto bott = [&](const CMat& j) {
        return sample_path(-1.0, 0.0, m, [&](double t) {
            return CMat(std::cos(kPi * t / 2) * j + std::sin(kPi * t / 2) * b);
        });
    };
    HomotopyPath hh = h;
    const double t0 = h.t.front();
    const double len = h.t.back() - t0;
    for (auto& t : hh.t) t = (t - t0) / len;
    LiftPair out;
    out.first = concatenate(bott(j1), hh, tol);
    out.second = concatenate(bott(j2), constant_path(j2, m), tol);
    return out;
}

LiftPair build_eta_lift(const CMat& s1, const CMat& s2, const HomotopyPath& h,
                        const std::optional<AntiUnitary>& J, double tol) {
    require_uniform(h);
    const double r0 = fro(h.y.front() - s1);
    const double r1 = fro(h.y.back() - s2);
    if (std::max(r0, r1) > tol)
        throw Error("EndpointMismatch", "homotopy endpoints differ from s1, s2 by " + std::to_string(std::max(r0, r1)));
    const AntiUnitary j = J ? *J : AntiUnitary::conjugation(s1.rows());
    const std::size_t m = h.size();
    HomotopyPath reflected;
    for (std::size_t i = 0; i < m; ++i) {
        reflected.t.push_back(-1.0 + double(i) / double(m - 1));
        reflected.y.push_back(j.conjugate(h.y[m - 1 - i]));
    }
    HomotopyPath hh = h;
    const double t0 = h.t.front();
    const double len = h.t.back() - t0;
    for (auto& t : hh.t) t = (t - t0) / len;
    LiftPair out;
    // The reflected half meets h at t = 0 only when J s1 J* = s1.
    out.first = concatenate(reflected, hh, std::max(tol, 1e-6));
    out.second = constant_path(s2, 2 * m - 1, -1.0, 1.0);
    return out;
}

cplx z2_complex_lift_raw(const FredholmModule& m, const HomotopyPath& path, int n, Parity parity,
                         OddPrefactor prefactor, std::vector<cplx>* integrand) {
    require_uniform(path);
    std::vector<cplx> f;
    cplx coeff;
    if (parity == Parity::Even) {
        coeff = I * factorial(2 * n + 1) / (std::pow(2.0, 4 * n + 3) * std::pow(factorial(n), 2));
        f = sample_integrand(path, [&](std::size_t i) {
            const Represented r = represent(m, path.y[i]);
            const CMat dy = represent(m, derivative(path, i)).a;
            return (r.a * dy * mat_pow(comm(r.F, r.a), 2 * n + 1)).trace();
        });
    } else {
        const double c = prefactor == OddPrefactor::TwoPi ? 2.0 : 4.0;
        coeff = I * std::pow(factorial(n), 2) / (c * kPi * factorial(2 * n));
        f = sample_integrand(path, [&](std::size_t i) {
            const CMat one = identity(path.y[i].rows());
            const Represented r = represent(m, path.y[i] - one);
            const CMat as = represent(m, CMat(path.y[i].adjoint() - one)).a;
            const CMat dy = represent(m, derivative(path, i)).a;
            const CMat x = comm(r.F, as) * comm(r.F, r.a);
            return (r.eps * as * dy * mat_pow(x, n)).trace();
        });
    }
    if (integrand) *integrand = f;
    return coeff * trapezoid(path, f);
}

Z2Result z2_pair_complex_lift(const FredholmModule& m, const HomotopyPath& path, int n, Parity parity,
                              OddPrefactor prefactor, double threshold) {
    return to_z2(z2_complex_lift_raw(m, path, n, parity, prefactor), threshold);
}

Z2Result z2_pair_conjugation(const FredholmModule& m, const CMat& u, const CMat& e, const CMat& f, int n,
                             double threshold) {
    const double r = fro(u * e * u.adjoint() - f);
    if (r > 1e-8) throw Error("NotConjugating", "u e u* - f residual " + std::to_string(r));
    const CMat one = identity(u.rows());
    const Represented rep = represent(m, u - one);
    const CMat as = represent(m, CMat(u.adjoint() - one)).a;
    const CMat ca = comm(rep.F, rep.a);
    const CMat x = comm(rep.F, as) * ca;
    const cplx raw = (as * ca * mat_pow(x, n)).trace() / std::pow(2.0, 2 * n + 2);
    return to_z2(raw, threshold);
}

Z2Result z2_pair_eta_lift(const FredholmModule& m, const HomotopyPath& path, int n, Parity parity,
                          const PathReality& reality, double threshold) {
    require_uniform(path);
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double r = relation_residual(reality.degree, reality.J, path.y[i]);
        if (r > 1e-8) throw RealityViolated(path.t[i], r);
    }
    std::vector<cplx> f;
    cplx coeff;
    if (parity == Parity::Even) {
        coeff = I * factorial(2 * n + 1) / (std::pow(2.0, 4 * n + 4) * std::pow(factorial(n), 2));
        f = sample_integrand(path, [&](std::size_t i) {
            const Represented r = represent(m, path.y[i]);
            const CMat dy = represent(m, derivative(path, i)).a;
            return (r.eps * r.a * dy * mat_pow(comm(r.F, r.a), 2 * n + 1)).trace();
        });
    } else {
        coeff = I * std::pow(factorial(n), 2) / (2.0 * kPi * factorial(2 * n));
        f = sample_integrand(path, [&](std::size_t i) {
            const CMat one = identity(path.y[i].rows());
            const Represented r = represent(m, path.y[i] - one);
            const CMat as = represent(m, CMat(path.y[i].adjoint() - one)).a;
            const CMat dy = represent(m, derivative(path, i)).a;
            const CMat x = comm(r.F, as) * comm(r.F, r.a);
            return (r.eps * as * dy * mat_pow(x, n)).trace();
        });
    }
    return to_z2(coeff * trapezoid(path, f), threshold);
}

long spectral_flow(const HomotopyPath& p, double theta) {
    auto phases = [&](const CMat& u) {
        Eigen::ComplexEigenSolver<CMat> es(u, false);
        std::vector<double> ph;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            ph.push_back(wrap(std::arg(es.eigenvalues()(i)) - theta));
        std::sort(ph.begin(), ph.end());
        return ph;
    };
    long flow = 0;
    std::vector<double> prev = phases(p.y.front());
    for (std::size_t s = 1; s < p.size(); ++s) {
        const std::vector<double> cur = phases(p.y[s]);
        const std::size_t n = cur.size();
        // Cyclic matching of sorted phases with the smallest total motion.
        std::size_t best = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t shift = 0; shift < n; ++shift) {
            double cost = 0.0;
            for (std::size_t j = 0; j < n; ++j) cost += std::abs(wrap(cur[(j + shift) % n] - prev[j]));
            if (cost < best_cost) {
                best_cost = cost;
                best = shift;
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double a = prev[j];
            const double b = a + wrap(cur[(j + best) % n] - a);
            // Crossings of phase 0 (mod 2 pi) along the short arc a -> b.
            flow += long(std::floor(b / (2.0 * kPi))) - long(std::floor(a / (2.0 * kPi)));
        }
        prev = cur;
    }
    return flow;
}

FredholmModule dirac_phase_module(const std::vector<std::complex<double>>& positions) {
    const Eigen::Index N = Eigen::Index(positions.size());
    CVec u(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const cplx z = positions[i];
        u(i) = std::abs(z) < 1e-12 ? cplx(1.0) : z / std::abs(z);
    }
    FredholmModule m;
    m.F = CMat::Zero(2 * N, 2 * N);
    m.F.topRightCorner(N, N) = u.asDiagonal();
    m.F.bottomLeftCorner(N, N) = u.conjugate().asDiagonal();
    m.grading = direct_sum(identity(N), CMat(-identity(N)));
    m.rep = identity(2);
    m.ko_dimension = 0;
    return m;
}

std::vector<std::complex<double>> window_positions(const BlochModel& m, int L) {
    if (m.lattice_dim != 2) throw Error("DimensionMismatch", "window needs a 2-D model");
    const RMat& V = m.lattice_vectors.size() ? m.lattice_vectors : RMat(RMat::Identity(2, 2));
    std::vector<std::complex<double>> pos;
    const int lo = -L / 2;
    for (int i = lo; i < lo + L; ++i)
        for (int j = lo; j < lo + L; ++j) {
            const Eigen::Vector2d r = double(i) * V.col(0) + double(j) * V.col(1);
            for (int a = 0; a < m.orbitals; ++a) pos.emplace_back(r.x(), r.y());
        }
    return pos;
}

CMat occupied_frame(const CMat& H, double mu) {
    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    Eigen::Index occ = 0;
    while (occ < H.rows() && es.eigenvalues()(occ) < mu) ++occ;
    return es.eigenvectors().leftCols(occ);
}

CMat window_projection(const BlochModel& m, int L) {
    if (m.lattice_dim != 2) throw Error("DimensionMismatch", "window needs a 2-D model");
    const int K = 2 * L;
    const int o = m.orbitals;
    const auto ks = k_grid(2, K);
    std::vector<CMat> Pk(ks.size());
    std::vector<double> gaps(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) {
        const CMat H = bloch(m, ks[i]);
        Eigen::SelfAdjointEigenSolver<CMat> es(H);
        gaps[i] = (es.eigenvalues().array() - m.fermi_level).abs().minCoeff();
        Eigen::Index occ = 0;
        while (occ < H.rows() && es.eigenvalues()(occ) < m.fermi_level) ++occ;
        const CMat V = es.eigenvectors().leftCols(occ);
        Pk[i] = V * V.adjoint();
    });
    const double g = *std::min_element(gaps.begin(), gaps.end());
    if (g < 1e-6) throw Error("NotGapped", "eigenvalue within " + std::to_string(g) + " of the Fermi level");

    // p(n) = K^-2 sum_k P(k) e^{-i k.n}, separably over the two axes, for
    // n in (-L, L)^2.
    const int span = 2 * L - 1;
    std::vector<CMat> half(std::size_t(span) * K, CMat::Zero(o, o));  // [n1][k2]
    parallel_for(std::size_t(span), [&](std::size_t a) {
        const int n1 = int(a) - (L - 1);
        for (int k2 = 0; k2 < K; ++k2) {
            CMat acc = CMat::Zero(o, o);
            for (int k1 = 0; k1 < K; ++k1)
                acc += std::exp(-I * (2.0 * kPi * k1 * n1 / K)) * Pk[std::size_t(k1) * K + k2];
            half[a * K + k2] = acc;
        }
    });
    std::vector<CMat> p(std::size_t(span) * span);
    parallel_for(std::size_t(span), [&](std::size_t a) {
        for (int b = 0; b < span; ++b) {
            const int n2 = b - (L - 1);
            CMat acc = CMat::Zero(o, o);
            for (int k2 = 0; k2 < K; ++k2) acc += std::exp(-I * (2.0 * kPi * k2 * n2 / K)) * half[a * K + k2];
            p[a * span + b] = acc / double(K * K);
        }
    });
    const Eigen::Index N = Eigen::Index(L) * L * o;
    CMat P(N, N);
    const int lo = -L / 2;
    parallel_for(std::size_t(L) * L, [&](std::size_t r) {
        const int i = lo + int(r) / L;
        const int j = lo + int(r) % L;
        for (int c = 0; c < L * L; ++c) {
            const int i2 = lo + c / L;
            const int j2 = lo + c % L;
            const CMat& blk = p[std::size_t(i2 - i + L - 1) * span + (j2 - j + L - 1)];
            P.block(Eigen::Index(r) * o, Eigen::Index(c) * o, o, o) = blk;
        }
    });
    return P;
}

ChernResult realspace_chern(const BlochModel& m, int L, double threshold) {
    if (L < 2) throw Error("InvalidTruncation", "L must be at least 2");
    const CMat P = window_projection(m, L);
    const auto pos = window_positions(m, L);
    const Eigen::Index N = P.rows();
    CVec u(N);
    for (Eigen::Index i = 0; i < N; ++i) u(i) = std::abs(pos[i]) < 1e-12 ? cplx(1.0) : pos[i] / std::abs(pos[i]);

    // With F = [[0, U], [U*, 0]] the n = 1 pairing is
    // tr(P [U*,P][U,P]) - tr(P [U,P][U*,P]) = -tr(P D), D = A*A - A A*, A = [U, P].
    CMat A(N, N);
    for (Eigen::Index c = 0; c < N; ++c)
        for (Eigen::Index r = 0; r < N; ++r) A(r, c) = (u(r) - u(c)) * P(r, c);
    const CMat B = A.adjoint();

    const Eigen::Index bs = 128;
    const Eigen::Index nb = (N + bs - 1) / bs;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index a = 0; a < nb; ++a)
        for (Eigen::Index b = 0; b <= a; ++b) pairs.emplace_back(a, b);
    std::vector<double> part(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t k) {
        const auto [a, b] = pairs[k];
        const Eigen::Index r0 = a * bs, rl = std::min(bs, N - r0);
        const Eigen::Index c0 = b * bs, cl = std::min(bs, N - c0);
        // D block (a, b) = A_{:,a}^* A_{:,b} - B_{:,a}^* B_{:,b}.
        CMat D = A.middleCols(r0, rl).adjoint() * A.middleCols(c0, cl);
        D.noalias() -= B.middleCols(r0, rl).adjoint() * B.middleCols(c0, cl);
        // sum_{i in a, j in b} P_ij conj(D_ij); the (b, a) block gives the conjugate.
        const cplx s = (P.block(r0, c0, rl, cl).array() * D.array().conjugate()).sum();
        part[k] = a == b ? s.real() : 2.0 * s.real();
    });
    const double value = -tree_sum(part);
    ChernResult res;
    res.gap = gap(m, 2 * L).gap;
    res.pairing = round_pairing(cplx(value, 0.0), threshold);
    return res;
}

namespace {

// Polar unitary of the chiral block of H(k) at each k of an N-point grid.
std::vector<CMat> chiral_unitaries(const BlochModel& m, int N, double* min_gap) {
    if (m.lattice_dim != 1) throw Error("DimensionMismatch", "winding needs a 1-D model");
    if (!m.symmetries.chiral) throw Error("MissingSymmetry", "winding needs a chiral operator");
    Eigen::SelfAdjointEigenSolver<CMat> ss(CMat(0.5 * (*m.symmetries.chiral + m.symmetries.chiral->adjoint())));
    Eigen::Index nm = 0;
    while (nm < ss.eigenvalues().size() && ss.eigenvalues()(nm) < 0) ++nm;
    const Eigen::Index np = ss.eigenvalues().size() - nm;
    if (np != nm) throw Error("DimensionMismatch", "chiral sublattices have different sizes");
    const CMat Vp = ss.eigenvectors().rightCols(np);
    const CMat Vm = ss.eigenvectors().leftCols(nm);
    const auto ks = k_grid(1, N);
    std::vector<CMat> us(ks.size());
    std::vector<double> gaps(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) {
        const CMat H = bloch(m, ks[i]);
        const CMat q = Vp.adjoint() * H * Vm;
        Eigen::JacobiSVD<CMat> svd(q, Eigen::ComputeFullU | Eigen::ComputeFullV);
        gaps[i] = svd.singularValues().size() ? svd.singularValues().minCoeff() : 0.0;
        us[i] = svd.matrixU() * svd.matrixV().adjoint();
    });
    const double g = *std::min_element(gaps.begin(), gaps.end());
    if (g < 1e-6) throw Error("NotGapped", "chiral block singular value " + std::to_string(g));
    if (min_gap) *min_gap = g;
    return us;
}

}  // namespace

WindingResult realspace_winding(const BlochModel& m, int L, int n, double threshold) {
    if (L < 2) throw Error("InvalidTruncation", "L must be at least 2");
    const int K = 2 * L;
    double g = 0.0;
    const auto us = chiral_unitaries(m, K, &g);
    const Eigen::Index o = us[0].rows();
    // u_{x,y} = v(y - x), v(d) = K^-1 sum_k u(k) e^{-i k d}.
    std::vector<CMat> v(std::size_t(2 * L - 1), CMat::Zero(o, o));
    for (int a = 0; a < 2 * L - 1; ++a) {
        const int d = a - (L - 1);
        for (int k = 0; k < K; ++k) v[a] += std::exp(-I * (2.0 * kPi * k * d / K)) * us[k];
        v[a] /= double(K);
    }
    CMat U(Eigen::Index(L) * o, Eigen::Index(L) * o);
    for (int r = 0; r < L; ++r)
        for (int c = 0; c < L; ++c) U.block(r * o, c * o, o, o) = v[std::size_t(c - r + L - 1)];
    FredholmModule fm;
    fm.F = CMat::Zero(U.rows(), U.cols());
    const int lo = -L / 2;
    for (int r = 0; r < L; ++r)
        for (Eigen::Index a = 0; a < o; ++a) fm.F(r * o + a, r * o + a) = lo + r >= 0 ? 1.0 : -1.0;
    fm.ko_dimension = 1;
    WindingResult res;
    res.gap = g;
    res.pairing = pair_odd(fm, U, n, threshold);
    return res;
}

long bloch_winding(const BlochModel& m, int grid) {
    const auto us = chiral_unitaries(m, grid, nullptr);
    double total = 0.0;
    for (int i = 0; i < grid; ++i) {
        const cplx a = us[i].determinant();
        const cplx b = us[(i + 1) % grid].determinant();
        total += std::arg(b / a);
    }
    return std::lround(total / (2.0 * kPi));
}

Z2Instance eta_generator_instance(std::size_t samples) {
    Z2Instance z;
    z.module.F = CMat::Zero(2, 2);
    z.module.F(0, 1) = z.module.F(1, 0) = 1.0;
    CMat eps = identity(2);
    eps(1, 1) = -1.0;
    z.module.grading = eps;
    CMat rep = CMat::Zero(2, 2);
    rep(0, 0) = 1.0;
    z.module.rep = rep;
    z.module.ko_dimension = 0;
    const HomotopyPath h = sample_path(0.0, 1.0, samples, [](double t) {
        CMat y(1, 1);
        y(0, 0) = std::exp(I * (kPi * (1.0 - t)));
        return y;
    });
    CMat s1(1, 1), s2(1, 1);
    s1(0, 0) = -1.0;
    s2(0, 0) = 1.0;
    z.path = build_eta_lift(s1, s2, h).first;
    return z;
}

long fhs_chern(const BlochModel& m, int grid) {
    if (m.lattice_dim != 2) throw Error("DimensionMismatch", "Chern number needs a 2-D model");
    const auto ks = k_grid(2, grid);
    std::vector<CMat> frames(ks.size());
    std::vector<double> gaps(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) {
        const CMat H = bloch(m, ks[i]);
        Eigen::SelfAdjointEigenSolver<CMat> es(H);
        gaps[i] = (es.eigenvalues().array() - m.fermi_level).abs().minCoeff();
        Eigen::Index occ = 0;
        while (occ < H.rows() && es.eigenvalues()(occ) < m.fermi_level) ++occ;
        frames[i] = es.eigenvectors().leftCols(occ);
    });
    const double g = *std::min_element(gaps.begin(), gaps.end());
    if (g < 1e-6) throw Error("NotGapped", "eigenvalue within " + std::to_string(g) + " of the Fermi level");
    return fhs_from_frames(frames, grid);
}

SpinChernResult spin_chern_kane_mele(const BlochModel& m, const CMat& S, int grid, double min_gap) {
    if (m.lattice_dim != 2) throw Error("DimensionMismatch", "spin Chern number needs a 2-D model");
    if (S.rows() != m.orbitals) throw Error("DimensionMismatch", "spin operator size");
    const auto ks = k_grid(2, grid);
    std::vector<CMat> frames(ks.size());
    std::vector<double> fgap(ks.size());
    std::vector<long> npos(ks.size());
    std::vector<double> bgap(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) {
        const CMat H = bloch(m, ks[i]);
        Eigen::SelfAdjointEigenSolver<CMat> es(H);
        bgap[i] = (es.eigenvalues().array() - m.fermi_level).abs().minCoeff();
        Eigen::Index occ = 0;
        while (occ < H.rows() && es.eigenvalues()(occ) < m.fermi_level) ++occ;
        const CMat V = es.eigenvectors().leftCols(occ);
        CMat M = V.adjoint() * S * V;
        M = 0.5 * (M + M.adjoint());
        Eigen::SelfAdjointEigenSolver<CMat> ms(M);
        fgap[i] = ms.eigenvalues().size() ? ms.eigenvalues().cwiseAbs().minCoeff() : 0.0;
        Eigen::Index neg = 0;
        while (neg < M.rows() && ms.eigenvalues()(neg) < 0) ++neg;
        npos[i] = long(M.rows() - neg);
        frames[i] = V * ms.eigenvectors().rightCols(M.rows() - neg);
    });
    const double g = *std::min_element(bgap.begin(), bgap.end());
    if (g < 1e-6) throw Error("NotGapped", "eigenvalue within " + std::to_string(g) + " of the Fermi level");
    SpinChernResult res;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < ks.size(); ++i)
        if (fgap[i] < fgap[worst]) worst = i;
    res.flattening_gap = fgap[worst];
    res.worst_k = ks[worst];
    if (res.flattening_gap < min_gap) throw FlatteningObstructed(res.worst_k, res.flattening_gap);
    for (std::size_t i = 0; i < ks.size(); ++i)
        if (npos[i] != npos[0]) throw FlatteningObstructed(ks[i], fgap[i]);
    res.spin_chern = fhs_from_frames(frames, grid);
    res.kane_mele = ((res.spin_chern % 2) + 2) % 2;
    return res;
}

}  // namespace kko

#pragma once

#include "kko/antiunitary.hpp"
#include "kko/models.hpp"
#include "kko/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace kko {

// Finite truncation (H, eps, phi, F). With `rep` set, phi(a) = rep (x) a and
// F, eps are ampliated to F (x) 1 when a is a matrix over the algebra;
// without it, payloads are already operators on H.
struct FredholmModule {
    CMat F;
    std::optional<CMat> grading;
    std::optional<CMat> rep;
    std::optional<AntiUnitary> J;
    int ko_dimension = 0;

    Eigen::Index dim() const { return F.rows(); }
    bool graded() const { return grading.has_value(); }
};

// F, eps (identity if ungraded) and phi(a) on the module ampliated to a's size.
struct Represented {
    CMat F;
    CMat eps;
    CMat a;
};

Represented represent(const FredholmModule& m, const CMat& a);

// Checks F = F*, F^2 = 1 and (if graded) eps^2 = 1, eps F = -F eps.
void validate_module(const FredholmModule& m, double tol = 1e-8);

struct ChernCoefficients {
    int n = 0;
    double lambda = 0.0;
    double mu = 0.0;
};

ChernCoefficients chern_coefficients(int n);

// Every integer-valued formula reports its raw value and distance to the
// rounded integer.
struct PairingResult {
    long value = 0;
    cplx raw;
    double residual = 0.0;
};

inline constexpr double kResidualThreshold = 0.1;

// Rounds raw, throws ResidualTooLarge above threshold.
PairingResult round_pairing(cplx raw, double threshold = kResidualThreshold);

cplx pair_even_raw(const FredholmModule& m, const CMat& e, int n);
cplx pair_odd_raw(const FredholmModule& m, const CMat& u, int n);
PairingResult pair_even(const FredholmModule& m, const CMat& e, int n, double threshold = kResidualThreshold);
PairingResult pair_odd(const FredholmModule& m, const CMat& u, int n, double threshold = kResidualThreshold);

struct HomotopyPath {
    std::vector<double> t;
    std::vector<CMat> y;

    std::size_t size() const { return t.size(); }
};

HomotopyPath sample_path(double t0, double t1, std::size_t samples,
                         const std::function<CMat(double)>& f);
HomotopyPath constant_path(const CMat& y, std::size_t samples = 401, double t0 = 0.0, double t1 = 1.0);
// Same samples traversed backwards on the same parameter interval.
HomotopyPath reverse(const HomotopyPath& p);
// b follows a; b is shifted to start where a ends and the shared endpoint is
// kept once. Endpoints must agree to tol.
HomotopyPath concatenate(const HomotopyPath& a, const HomotopyPath& b, double tol = 1e-8);
// Largest operator-norm step between consecutive samples.
double max_step(const HomotopyPath& p);

// beta s_t = cos(pi t/2) s (x) sz + sin(pi t/2) 1 (x) sy on t in [-1, 1], i.e.
// the graded s (x) 1 + i sin 1 (x) e with e = [[0,-1],[1,0]].
HomotopyPath bott_suspend(const CMat& s, std::size_t samples = 401);
// j(s) = s (x) sz, the Clifford-stabilised form used by the lifts.
CMat clifford_include(const CMat& s);

struct LiftPair {
    HomotopyPath first;
    HomotopyPath second;
};

// Bott segment on [-1, 0] followed by h on [0, 1]; the second path is the
// Bott segment of s2 followed by the constant j(s2). h must run from j(s1) to j(s2).
LiftPair build_complex_lift(const CMat& s1, const CMat& s2, const HomotopyPath& h, double tol = 1e-8);
// conj(h_{-t}) on [-1, 0] followed by h on [0, 1]; second path constant s2.
// J defaults to entrywise conjugation. h must run from s1 to s2.
LiftPair build_eta_lift(const CMat& s1, const CMat& s2, const HomotopyPath& h,
                        const std::optional<AntiUnitary>& J = std::nullopt, double tol = 1e-8);

enum class Parity { Even, Odd };

// The unitary-path formula is printed with 4 pi in one place and 2 pi in
// another; 2 pi is the one that is integral on the desk instance.
enum class OddPrefactor { TwoPi, FourPi };

struct Z2Result {
    long value = 0;  // 0 or 1
    PairingResult integer;
};

// Even: i(2n+1)!/(2^{4n+3}(n!)^2) int tr(y y' [F,y]^{2n+1}) over a projector path.
// Odd: i(n!)^2/(c pi (2n)!) int tr(eps (y*-1) y' ([F,y*-1][F,y-1])^n) over a unitary path.
Z2Result z2_pair_complex_lift(const FredholmModule& m, const HomotopyPath& path, int n,
                              Parity parity = Parity::Even,
                              OddPrefactor prefactor = OddPrefactor::TwoPi,
                              double threshold = kResidualThreshold);

// 1/2^{2n+2} tr((u*-1)[F,u-1]([F,u*-1][F,u-1])^n); requires u e u* = f.
Z2Result z2_pair_conjugation(const FredholmModule& m, const CMat& u, const CMat& e, const CMat& f, int n,
                             double threshold = kResidualThreshold);

// Reality data for the path samples: each sample must satisfy the table
// relation of `degree` with respect to J.
struct PathReality {
    AntiUnitary J;
    int degree = 1;
};

// Even: i(2n+1)!/(2^{4n+4}(n!)^2) int tr(eps y y' [F,y]^{2n+1}).
// Odd: i(n!)^2/(2 pi (2n)!) int tr(eps (y*-1) y' ([F,y*-1][F,y-1])^n).
Z2Result z2_pair_eta_lift(const FredholmModule& m, const HomotopyPath& path, int n, Parity parity,
                          const PathReality& reality, double threshold = kResidualThreshold);

// Raw integrals without rounding (used by tests and the CLI integrand dump).
cplx z2_complex_lift_raw(const FredholmModule& m, const HomotopyPath& path, int n, Parity parity,
                         OddPrefactor prefactor, std::vector<cplx>* integrand = nullptr);

// Signed count of eigenphase crossings of e^{i theta} along a unitary path.
long spectral_flow(const HomotopyPath& unitaries, double theta = 0.5);

// Dirac-phase module on sites with the given planar positions: H = C^2 (x)
// l^2(sites), F = [[0, U], [U*, 0]], eps = diag(1, -1), phi(a) = 1_2 (x) a,
// U the phase of x + iy (1 at the origin).
FredholmModule dirac_phase_module(const std::vector<std::complex<double>>& positions);

// Site positions (cell Cartesian coordinates, repeated per orbital) of the
// L x L window centred on the origin cell.
std::vector<std::complex<double>> window_positions(const BlochModel& m, int L);

// Fermi projection of the infinite lattice restricted to the L x L window,
// from a 2L x 2L momentum grid.
CMat window_projection(const BlochModel& m, int L);

struct ChernResult {
    PairingResult pairing;
    double gap = 0.0;
};

// -(tr(P [U,P][U*,P]) - tr(P [U*,P][U,P])), the n = 1 even pairing with the
// Dirac-phase module, evaluated by fixed row blocks with tree summation.
ChernResult realspace_chern(const BlochModel& m, int L, double threshold = kResidualThreshold);

// Odd pairing of a 1-D chiral model against the position-sign module F =
// sign(x) (x >= 0 counted positive) on L cells. The chiral block q(k) of H(k)
// in the eigenbasis of S is flattened to its polar unitary u(k). With
// H_{x,y} = h(y-x) the value is minus the winding of det u(k) in k.
struct WindingResult {
    PairingResult pairing;
    double gap = 0.0;
};

WindingResult realspace_winding(const BlochModel& m, int L, int n = 0, double threshold = kResidualThreshold);

// Winding number of det u(k) over an N-point grid (u as in realspace_winding).
long bloch_winding(const BlochModel& m, int grid = 200);

// The eta generator against the rank-one graded scalar module: F = sx,
// eps = sz, phi(a) = diag(1, 0) (x) a, and the loop obtained from
// h_t = exp(i pi (1 - t)) by build_eta_lift.
struct Z2Instance {
    FredholmModule module;
    HomotopyPath path;
};

Z2Instance eta_generator_instance(std::size_t samples = 401);

// Plaquette field strength on an N x N grid, occupied bands below mu.
long fhs_chern(const BlochModel& m, int grid = 60);

// Frames of the occupied space (columns) for H(k).
CMat occupied_frame(const CMat& H, double mu);

struct SpinChernResult {
    long spin_chern = 0;
    long kane_mele = 0;
    double flattening_gap = 0.0;
    std::vector<double> worst_k;
};

// Splits the occupied space by the sign of P S P per k and returns the Chern
// number of the positive sector. Throws FlatteningObstructed below min_gap.
SpinChernResult spin_chern_kane_mele(const BlochModel& m, const CMat& S, int grid = 60, double min_gap = 1e-6);

}  // namespace kko

#pragma once

#include "kko/symmetry.hpp"
#include "kko/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kko {

using Offset = std::vector<int>;

// H(k) = sum_n h(n) e^{i k.n}. Hoppings are stored closed under n -> -n with
// h(-n) = h(n)^*, so the sum runs over every stored offset.
struct BlochModel {
    std::string name;
    int lattice_dim = 0;
    int orbitals = 0;
    std::map<Offset, CMat> hoppings;
    double fermi_level = 0.0;
    SymmetryData symmetries;
    std::optional<CMat> spin_candidate;
    RMat lattice_vectors;  // columns; identity when empty
};

BlochModel empty_model(int lattice_dim, int orbitals, const std::string& name = "");

// Adds h at n and h^* at -n. For n = 0 the matrix must be Hermitian and is
// added once.
void add_hopping(BlochModel& m, const Offset& n, const CMat& h);

// Adds amplitude a to <orbital i, cell 0| H |orbital j, cell n> and its mirror.
void add_term(BlochModel& m, const Offset& n, int i, int j, cplx a);

// Checks sizes and the Hermitian closure; throws InvalidModel.
void validate_model(const BlochModel& m);

CMat bloch(const BlochModel& m, const std::vector<double>& k);

// Uniform endpoint-exclusive grid with n points per axis, 2 pi j / n.
std::vector<std::vector<double>> k_grid(int dim, int n);

struct GapReport {
    double gap = 0.0;
    std::vector<double> k;
};

GapReport gap(const BlochModel& m, int grid = 60);

// Per-k symmetry residuals: T H(k) T^-1 = H(-k), C H(k) C^-1 = -H(-k),
// S H(k) S^-1 = -H(k); then the gap check on the grid.
SymmetryClass classify(const BlochModel& m, int grid = 6, double gap_tolerance = 1e-6);

// H'(k_1..k_{d-1}) = H(k_1..k_{d-1}, 0).
BlochModel dimensional_reduce(const BlochModel& m);

// Orbital direct sum; symmetries are summed when both sides carry them.
BlochModel direct_sum(const BlochModel& a, const BlochModel& b);

// H'(k) = conj(H(-k)); reverses Chern numbers.
BlochModel conjugate_model(const BlochModel& m);

// Corpus. Parameters missing from the map take the defaults below.
using ModelParams = std::map<std::string, double>;
BlochModel corpus(const std::string& name, const ModelParams& params = {});
std::vector<std::string> corpus_names();

BlochModel ssh(double v = 0.5, double w = 1.0);
// d(k) = (sin kx, sin ky, m - 2 + cos kx + cos ky). Plaquette Chern number -1
// for 0 < m < 2, +1 for 2 < m < 4, 0 outside [0, 4].
BlochModel dirac2d(double mass = 1.0);
BlochModel haldane(double t = 1.0, double t2 = 0.15, double phi = kPi / 2, double mass = 0.2);
// Orbital index 2*spin + sublattice.
BlochModel kane_mele(double t = 1.0, double lambda_so = 0.06, double lambda_v = 0.1,
                     double lambda_r = 0.0);
// Zero hopping, on-site energies split around mu = 0.
BlochModel atomic_limit(int lattice_dim = 2, double split = 1.0);

}  // namespace kko

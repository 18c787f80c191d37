#pragma once

#include "kko/antiunitary.hpp"
#include "kko/types.hpp"

#include <optional>
#include <vector>

namespace kko {

// Matrix representation of Cl(p,q): p generators square to +1, q to -1.
// The generator list order is the orientation.
struct CliffordRep {
    int p = 0;
    int q = 0;
    int dim = 1;
    std::vector<CMat> generators;
    CMat grading;

    int n() const { return p + q; }
};

struct SignTriple {
    int alpha = 1;
    std::optional<int> alpha_prime;
    std::optional<int> alpha_dd;

    bool operator==(const SignTriple&) const = default;
};

// Jordan-Wigner construction on ceil((p+q)/2) qubits.
CliffordRep build_clifford(int p, int q);

CMat chirality(const CliffordRep& rep);

// J_R commuting with every generator (as an antilinear map), and with the
// grading when p+q is odd. Throws NoIntertwiner if none is found.
AntiUnitary intertwiner(const CliffordRep& rep);

// Stored (alpha, alpha', alpha'') row for d mod 8; alpha'' only for even d.
SignTriple sign_table(int d);

// KO degree of the module of Cl(p,q): (q - p) mod 8.
int ko_degree(int p, int q);

// Signs read off a representation: alpha from J_R^2, alpha' from
// J_R omega J_R^{-1} (odd p+q), alpha'' from J_R eps J_R^{-1} (even p+q).
SignTriple measured_signs(const CliffordRep& rep);

// F' = 2^{-n} sum_I (-1)^{|I|} (c_I^o)^* F c_I^o with c_i^o = c_i eps.
// F' anticommutes with every c_i^o.
CMat swap_clifford_side(const CMat& F, const CliffordRep& rep);

// Real dimension of the complex span of all ordered generator products.
int span_dimension(const CliffordRep& rep);

}  // namespace kko

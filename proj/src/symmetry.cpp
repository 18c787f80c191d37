#include "kko/symmetry.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>

namespace kko {

std::string az_name(AZLabel label) {
    switch (label) {
        case AZLabel::A: return "A";
        case AZLabel::AIII: return "AIII";
        case AZLabel::AI: return "AI";
        case AZLabel::BDI: return "BDI";
        case AZLabel::D: return "D";
        case AZLabel::DIII: return "DIII";
        case AZLabel::AII: return "AII";
        case AZLabel::CII: return "CII";
        case AZLabel::C: return "C";
        case AZLabel::CI: return "CI";
    }
    return "?";
}

std::string relation_name(Relation r) {
    switch (r) {
        case Relation::Commutes: return "commutes";
        case Relation::Anticommutes: return "anticommutes";
        case Relation::Neither: return "neither";
    }
    return "?";
}

double symmetry_tolerance(const CMat& H) { return 1e-8 * std::max(1.0, fro(H)); }

namespace {
RelationReport report_from(const CMat& image, const CMat& H) {
    RelationReport r;
    r.commute_residual = fro(image - H);
    r.anticommute_residual = fro(image + H);
    const double tol = symmetry_tolerance(H);
    if (r.commute_residual <= tol) {
        r.relation = Relation::Commutes;
        r.residual = r.commute_residual;
    } else if (r.anticommute_residual <= tol) {
        r.relation = Relation::Anticommutes;
        r.residual = r.anticommute_residual;
    } else {
        r.relation = Relation::Neither;
        r.residual = std::min(r.commute_residual, r.anticommute_residual);
    }
    return r;
}
}  // namespace

RelationReport detect_relation(const AntiUnitary& op, const CMat& H) {
    require_same_size(op.U, H, "antiunitary and matrix sizes differ");
    return report_from(op.conjugate(H), H);
}

RelationReport detect_relation(const CMat& unitary, const CMat& H) {
    require_same_size(unitary, H, "unitary and matrix sizes differ");
    return report_from(unitary * H * unitary.adjoint(), H);
}

SymmetryClass class_from_signature(std::optional<int> t, std::optional<int> c, bool chiral) {
    SymmetryClass out;
    out.t_square = t;
    out.c_square = c;
    out.chiral = chiral || (t && c);
    if (!t && !c) {
        out.complex = true;
        out.label = chiral ? AZLabel::AIII : AZLabel::A;
        out.degree = chiral ? 1 : 0;
        return out;
    }
    out.complex = false;
    if (t && !c) {
        out.label = *t > 0 ? AZLabel::AI : AZLabel::AII;
        out.degree = *t > 0 ? 0 : 4;
    } else if (c && !t) {
        out.label = *c > 0 ? AZLabel::D : AZLabel::C;
        out.degree = *c > 0 ? 2 : 6;
    } else if (*t > 0 && *c > 0) {
        out.label = AZLabel::BDI;
        out.degree = 1;
    } else if (*t < 0 && *c > 0) {
        out.label = AZLabel::DIII;
        out.degree = 3;
    } else if (*t < 0 && *c < 0) {
        out.label = AZLabel::CII;
        out.degree = 5;
    } else {
        out.label = AZLabel::CI;
        out.degree = 7;
    }
    return out;
}

std::vector<std::pair<std::string, double>> validate_symmetry_operators(const SymmetryData& sym,
                                                                        double tol) {
    std::vector<std::pair<std::string, double>> res;
    auto check_unitary = [&](const CMat& U, const std::string& name) {
        const double r = fro(U * U.adjoint() - identity(U.rows()));
        if (r > tol) throw SymmetryViolated(name + " unitarity", r);
    };
    if (sym.time_reversal) {
        check_unitary(sym.time_reversal->U, "time_reversal");
        const double r = sym.time_reversal->square_residual();
        res.emplace_back("time_reversal_square", r);
        if (r > tol) throw SymmetryViolated("time_reversal square", r);
    }
    if (sym.particle_hole) {
        check_unitary(sym.particle_hole->U, "particle_hole");
        const double r = sym.particle_hole->square_residual();
        res.emplace_back("particle_hole_square", r);
        if (r > tol) throw SymmetryViolated("particle_hole square", r);
    }
    if (sym.chiral) {
        const CMat& S = *sym.chiral;
        check_unitary(S, "chiral");
        const double r = fro(S * S - identity(S.rows()));
        res.emplace_back("chiral_square", r);
        if (r > tol) throw SymmetryViolated("chiral square", r);
        if (sym.time_reversal && sym.particle_hole) {
            // T C as a linear map is U_T conj(U_C); S must be a phase times it.
            const CMat tc = sym.time_reversal->U * sym.particle_hole->U.conjugate();
            const CMat x = S * tc.adjoint();
            const cplx lambda = x.trace() / double(x.rows());
            const double rp = fro(x - lambda * identity(x.rows()));
            res.emplace_back("chiral_vs_tc", rp);
            if (rp > tol || std::abs(std::abs(lambda) - 1.0) > tol)
                throw SymmetryViolated("chiral not proportional to TC", rp);
        }
    }
    return res;
}

SymmetryClass classify(const GappedSystem& sys) {
    const CMat& H = sys.hamiltonian;
    require_square(H, "hamiltonian");
    const double tol = symmetry_tolerance(H);
    auto residuals = validate_symmetry_operators(sys.symmetries, tol);
    std::optional<int> t, c;
    bool chiral = false;
    if (sys.symmetries.time_reversal) {
        auto r = detect_relation(*sys.symmetries.time_reversal, H);
        residuals.emplace_back("time_reversal", r.commute_residual);
        if (r.commute_residual > tol) throw SymmetryViolated("time_reversal", r.commute_residual);
        t = sys.symmetries.time_reversal->square_sign();
    }
    if (sys.symmetries.particle_hole) {
        auto r = detect_relation(*sys.symmetries.particle_hole, H);
        residuals.emplace_back("particle_hole", r.anticommute_residual);
        if (r.anticommute_residual > tol)
            throw SymmetryViolated("particle_hole", r.anticommute_residual);
        c = sys.symmetries.particle_hole->square_sign();
    }
    if (sys.symmetries.chiral) {
        auto r = detect_relation(*sys.symmetries.chiral, H);
        residuals.emplace_back("chiral", r.anticommute_residual);
        if (r.anticommute_residual > tol) throw SymmetryViolated("chiral", r.anticommute_residual);
        chiral = true;
    }
    // The gap precondition.
    fermi_projection(H, sys.fermi_level, sys.gap_tolerance);
    SymmetryClass out = class_from_signature(t, c, chiral);
    out.residuals = std::move(residuals);
    return out;
}

CMat fermi_projection(const CMat& H, double mu, double gap_tolerance) {
    require_square(H, "hamiltonian");
    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    const auto& w = es.eigenvalues();
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < w.size(); ++i) gap = std::min(gap, std::abs(w(i) - mu));
    if (gap < gap_tolerance)
        throw Error("NotGapped", "eigenvalue within " + std::to_string(gap) + " of the Fermi level");
    Eigen::Index occ = 0;
    while (occ < w.size() && w(occ) < mu) ++occ;
    const CMat V = es.eigenvectors().leftCols(occ);
    return V * V.adjoint();
}

CMat fermi_projection(const GappedSystem& sys) {
    return fermi_projection(sys.hamiltonian, sys.fermi_level, sys.gap_tolerance);
}

}  // namespace kko

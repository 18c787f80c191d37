#include "kko/clifford.hpp"
#include "kko/io.hpp"
#include "kko/kclass.hpp"
#include "kko/models.hpp"
#include "kko/pairing.hpp"
#include "kko/parallel.hpp"
#include "kko/sequence.hpp"
#include "kko/symmetry.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace kko;

namespace {

py::dict pairing_dict(const PairingResult& r) {
    py::dict d;
    d["value"] = r.value;
    d["raw"] = r.raw;
    d["residual"] = r.residual;
    return d;
}

py::dict sign_dict(const SignTriple& s) {
    py::dict d;
    d["alpha"] = s.alpha;
    d["alpha_prime"] = s.alpha_prime ? py::object(py::int_(*s.alpha_prime)) : py::object(py::none());
    d["alpha_dd"] = s.alpha_dd ? py::object(py::int_(*s.alpha_dd)) : py::object(py::none());
    return d;
}

BlochModel load_model(const std::string& file) { return model_from_json(read_json_file(file)); }

}  // namespace

PYBIND11_MODULE(_kko, m) {
    m.doc() = "Real and complex K-theory of finite classes, index pairings and lattice invariants";

    static py::exception<Error> error(m, "KkoError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    m.def("set_thread_count", &set_thread_count, py::arg("n"));
    m.def("thread_count", &thread_count);

    // clifford
    m.def("sign_table", [](int d) { return sign_dict(sign_table(d)); }, py::arg("d"));
    m.def("ko_degree", &ko_degree, py::arg("p"), py::arg("q"));
    m.def("measured_signs", [](int p, int q) { return sign_dict(measured_signs(build_clifford(p, q))); },
          py::arg("p"), py::arg("q"));
    m.def("clifford_generators", [](int p, int q) { return build_clifford(p, q).generators; }, py::arg("p"),
          py::arg("q"));

    // classes
    py::class_<KOClass>(m, "KOClass")
        .def_readonly("degree", &KOClass::degree)
        .def_readonly("first", &KOClass::first)
        .def_readonly("second", &KOClass::second)
        .def_property_readonly("J", [](const KOClass& x) { return x.J.U; })
        .def_property_readonly("size", &KOClass::size)
        .def("__repr__", [](const KOClass& x) {
            return "<KOClass degree " + std::to_string(x.degree) + ", size " + std::to_string(x.size()) + ">";
        });
    py::class_<KUClass>(m, "KUClass")
        .def(py::init([](int degree, const CMat& first, const CMat& second) {
                 return KUClass{degree, first, second};
             }),
             py::arg("degree"), py::arg("first"), py::arg("second"))
        .def_readonly("degree", &KUClass::degree)
        .def_readonly("first", &KUClass::first)
        .def_readonly("second", &KUClass::second);

    m.def("make_class",
          [](int degree, const CMat& first, const CMat& J, std::optional<CMat> second) {
              return make_class(degree, first, AntiUnitary(J), second);
          },
          py::arg("degree"), py::arg("first"), py::arg("J"), py::arg("second") = py::none());
    m.def("complexify", &complexify);
    m.def("realify", &realify, py::arg("y"), py::arg("target_degree"));
    m.def("eta_act", &eta_act);
    m.def("external_product", &external_product);
    m.def("scalar_invariant", &scalar_invariant);
    m.def("ku_invariant", &ku_invariant);
    m.def("pfaffian", &pfaffian);
    m.def("spin_operator", [](const KOClass& x) -> std::optional<CMat> { return spin_operator(x).S; });

    // sequence
    m.def("verify_exactness", [](const std::string& algebra) {
        const ExactnessReport r = verify_exactness(parse_algebra(algebra));
        py::list nodes;
        for (const auto& n : r.nodes) {
            py::dict d;
            d["label"] = n.label;
            d["pass"] = n.pass;
            d["witness"] = n.witness;
            nodes.append(d);
        }
        py::dict out;
        out["all_pass"] = r.all_pass;
        out["nodes"] = nodes;
        return out;
    }, py::arg("algebra"));

    // models
    py::class_<BlochModel>(m, "BlochModel")
        .def_readonly("name", &BlochModel::name)
        .def_readonly("lattice_dim", &BlochModel::lattice_dim)
        .def_readonly("orbitals", &BlochModel::orbitals)
        .def_readonly("fermi_level", &BlochModel::fermi_level)
        .def_readonly("spin_candidate", &BlochModel::spin_candidate)
        .def("bloch", [](const BlochModel& b, const std::vector<double>& k) { return bloch(b, k); }, py::arg("k"))
        .def("__repr__", [](const BlochModel& b) {
            return "<BlochModel " + b.name + ", dim " + std::to_string(b.lattice_dim) + ", " +
                   std::to_string(b.orbitals) + " orbitals>";
        });
    m.def("corpus", &corpus, py::arg("name"), py::arg("params") = ModelParams{});
    m.def("corpus_names", &corpus_names);
    m.def("load_model", &load_model, py::arg("path"));
    m.def("direct_sum", py::overload_cast<const BlochModel&, const BlochModel&>(&direct_sum));
    m.def("conjugate_model", &conjugate_model);
    m.def("dimensional_reduce", &dimensional_reduce);
    m.def("gap", [](const BlochModel& b, int grid) { return gap(b, grid).gap; }, py::arg("model"),
          py::arg("grid") = 60);
    m.def("classify", [](const BlochModel& b, int grid) {
        const SymmetryClass c = classify(b, grid);
        py::dict d;
        d["label"] = c.name();
        d["complex"] = c.complex;
        d["degree"] = c.degree;
        d["t_square"] = c.t_square;
        d["c_square"] = c.c_square;
        d["chiral"] = c.chiral;
        return d;
    }, py::arg("model"), py::arg("grid") = 6);

    // invariants
    m.def("fhs_chern", &fhs_chern, py::arg("model"), py::arg("grid") = 60);
    m.def("realspace_chern", [](const BlochModel& b, int L, double threshold) {
        return pairing_dict(realspace_chern(b, L, threshold).pairing);
    }, py::arg("model"), py::arg("L") = 40, py::arg("threshold") = kResidualThreshold);
    m.def("realspace_winding", [](const BlochModel& b, int L, int n) {
        return pairing_dict(realspace_winding(b, L, n).pairing);
    }, py::arg("model"), py::arg("L") = 40, py::arg("n") = 0);
    m.def("bloch_winding", &bloch_winding, py::arg("model"), py::arg("grid") = 200);
    m.def("spin_chern_kane_mele", [](const BlochModel& b, std::optional<CMat> S, int grid) {
        if (!S) S = b.spin_candidate;
        if (!S) throw Error("MissingSymmetry", "model has no spin candidate");
        const SpinChernResult r = spin_chern_kane_mele(b, *S, grid);
        py::dict d;
        d["spin_chern"] = r.spin_chern;
        d["kane_mele"] = r.kane_mele;
        d["flattening_gap"] = r.flattening_gap;
        return d;
    }, py::arg("model"), py::arg("S") = py::none(), py::arg("grid") = 60);
    m.def("chern_coefficients", [](int n) {
        const ChernCoefficients c = chern_coefficients(n);
        return py::make_tuple(c.lambda, c.mu);
    }, py::arg("n"));
    m.def("pair_even", [](const CMat& F, const CMat& grading, const CMat& e, int n) {
        FredholmModule fm{F, grading, std::nullopt, std::nullopt, 0};
        return pairing_dict(pair_even(fm, e, n));
    }, py::arg("F"), py::arg("grading"), py::arg("e"), py::arg("n"));
    m.def("pair_odd", [](const CMat& F, const CMat& u, int n) {
        FredholmModule fm{F, std::nullopt, std::nullopt, std::nullopt, 1};
        return pairing_dict(pair_odd(fm, u, n));
    }, py::arg("F"), py::arg("u"), py::arg("n"));
    m.def("z2_eta_generator", [](std::size_t samples) {
        const Z2Instance z = eta_generator_instance(samples);
        const Z2Result r = z2_pair_complex_lift(z.module, z.path, 0, Parity::Odd);
        py::dict d = pairing_dict(r.integer);
        d["z2"] = r.value;
        d["spectral_flow"] = spectral_flow(z.path);
        return d;
    }, py::arg("samples") = 401);
}

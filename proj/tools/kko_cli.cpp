#include "kko/clifford.hpp"
#include "kko/io.hpp"
#include "kko/kclass.hpp"
#include "kko/models.hpp"
#include "kko/pairing.hpp"
#include "kko/parallel.hpp"
#include "kko/sequence.hpp"
#include "kko/symmetry.hpp"

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

using kko::cplx;
using kko::json;

namespace {

struct Output {
    json result = json::object();
    json residuals = json::object();
    bool ok = true;
    std::vector<std::string> summary;
};

struct ModelSource {
    std::string file;
    std::string corpus;
    std::vector<std::string> params;
};

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json sign_json(const kko::SignTriple& s) {
    json j;
    j["alpha"] = s.alpha;
    j["alpha_prime"] = s.alpha_prime ? json(*s.alpha_prime) : json(nullptr);
    j["alpha_dd"] = s.alpha_dd ? json(*s.alpha_dd) : json(nullptr);
    return j;
}

kko::BlochModel load_model(const ModelSource& src) {
    if (src.file.empty() == src.corpus.empty())
        throw kko::Error("UsageError", "give exactly one of --model FILE or --corpus NAME");
    if (!src.file.empty()) {
        if (!src.params.empty()) throw kko::Error("UsageError", "--param only applies to --corpus");
        return kko::model_from_json(kko::read_json_file(src.file));
    }
    kko::ModelParams p;
    for (const auto& kv : src.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw kko::Error("UsageError", "expected key=value, got " + kv);
        try {
            std::size_t used = 0;
            const double v = std::stod(kv.substr(eq + 1), &used);
            if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
            p[kv.substr(0, eq)] = v;
        } catch (const std::logic_error&) {
            throw kko::Error("UsageError", "bad number in " + kv);
        }
    }
    return kko::corpus(src.corpus, p);
}

json source_json(const ModelSource& src) {
    json j;
    if (!src.file.empty()) j["model"] = src.file;
    if (!src.corpus.empty()) {
        j["corpus"] = src.corpus;
        j["params"] = src.params;
    }
    return j;
}

void write_csv(const std::string& file, const std::string& header, const std::vector<std::vector<double>>& rows) {
    std::ofstream out(file);
    if (!out) throw kko::Error("IOError", "cannot write " + file);
    out << header << "\n" << std::setprecision(17);
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
        out << "\n";
    }
}

// (k..., gap) over the model's grid.
std::vector<std::vector<double>> gap_rows(const kko::BlochModel& m, int grid) {
    const auto ks = kko::k_grid(m.lattice_dim, grid);
    std::vector<std::vector<double>> rows(ks.size());
    kko::parallel_for(ks.size(), [&](std::size_t i) {
        Eigen::SelfAdjointEigenSolver<kko::CMat> es(kko::bloch(m, ks[i]), Eigen::EigenvaluesOnly);
        rows[i] = ks[i];
        rows[i].push_back((es.eigenvalues().array() - m.fermi_level).abs().minCoeff());
    });
    return rows;
}

std::string gap_header(int dim) {
    std::string h;
    for (int i = 0; i < dim; ++i) h += "k" + std::to_string(i + 1) + ",";
    return h + "gap";
}

json class_summary(const kko::KOClass& x) {
    json j = kko::class_to_json(x);
    try {
        j["scalar_invariant"] = kko::scalar_invariant(x);
    } catch (const kko::Error&) {
        j["scalar_invariant"] = nullptr;
    }
    j["relation_residual"] = std::max(kko::relation_residual(x.degree, x.J, x.first),
                                      kko::relation_residual(x.degree, x.J, x.second));
    return j;
}

kko::KOClass read_class(const std::string& file) { return kko::class_from_json(kko::read_json_file(file)); }

// ---- commands ----

Output cmd_classify(const ModelSource& src, int grid, double gap_tol, int gap_grid, const std::string& plot) {
    const kko::BlochModel m = load_model(src);
    Output o;
    const kko::SymmetryClass c = kko::classify(m, grid, gap_tol);
    o.result["label"] = c.name();
    o.result["complex"] = c.complex;
    o.result["ko_dimension"] = c.degree;
    o.result["t_square"] = c.t_square ? json(*c.t_square) : json(nullptr);
    o.result["c_square"] = c.c_square ? json(*c.c_square) : json(nullptr);
    o.result["chiral"] = c.chiral;
    for (const auto& [k, v] : c.residuals) o.residuals[k] = v;
    const kko::GapReport g = kko::gap(m, gap_grid);
    o.result["gap"] = g.gap;
    o.result["gap_k"] = g.k;
    if (!plot.empty()) write_csv(plot, gap_header(m.lattice_dim), gap_rows(m, gap_grid));
    o.summary.push_back("class " + c.name() + (c.complex ? ", complex degree " : ", ko dimension ") +
                        std::to_string(c.degree));
    return o;
}

Output cmd_invariant(const std::string& type, const ModelSource& src, int L, int grid, int level, double threshold,
                     std::size_t samples, const std::string& plot) {
    Output o;
    auto put = [&](const kko::PairingResult& r) {
        o.result["value"] = r.value;
        o.result["raw"] = complex_json(r.raw);
        o.residuals["rounding"] = r.residual;
        o.ok = o.ok && r.residual <= threshold;
    };
    if (type == "z2-lift") {
        const kko::Z2Instance z = kko::eta_generator_instance(samples);
        std::vector<cplx> f;
        const cplx raw = kko::z2_complex_lift_raw(z.module, z.path, 0, kko::Parity::Odd, kko::OddPrefactor::TwoPi, &f);
        const kko::PairingResult r = kko::round_pairing(raw, threshold);
        const long flow = kko::spectral_flow(z.path);
        put(r);
        o.result["value"] = ((r.value % 2) + 2) % 2;
        o.result["integer"] = r.value;
        o.result["spectral_flow"] = flow;
        const bool agree = ((r.value - flow) % 2) == 0;
        o.result["parity_agrees"] = agree;
        o.ok = o.ok && agree;
        if (!plot.empty()) {
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < f.size(); ++i) rows.push_back({z.path.t[i], f[i].real(), f[i].imag()});
            write_csv(plot, "t,integrand_re,integrand_im", rows);
        }
        o.summary.push_back("z2 lift pairing " + std::to_string(((r.value % 2) + 2) % 2) + ", spectral flow " +
                            std::to_string(flow));
        return o;
    }
    const kko::BlochModel m = load_model(src);
    if (type == "chern") {
        if (level != 1) throw kko::Error("InvalidLevel", "the real-space Chern number uses level 1");
        const kko::ChernResult c = kko::realspace_chern(m, L, threshold);
        const long fhs = kko::fhs_chern(m, grid);
        put(c.pairing);
        o.result["fhs"] = fhs;
        o.result["gap"] = c.gap;
        o.residuals["fhs_mismatch"] = double(std::labs(c.pairing.value - fhs));
        o.ok = o.ok && c.pairing.value == fhs;
        o.summary.push_back("chern " + std::to_string(c.pairing.value) + " (plaquette oracle " + std::to_string(fhs) + ")");
    } else if (type == "pair-even") {
        const kko::FredholmModule fm = kko::dirac_phase_module(kko::window_positions(m, L));
        const kko::CMat P = kko::window_projection(m, L);
        const kko::PairingResult r = kko::pair_even(fm, P, level, threshold);
        put(r);
        o.summary.push_back("even pairing " + std::to_string(r.value));
    } else if (type == "pair-odd") {
        const kko::WindingResult w = kko::realspace_winding(m, L, level, threshold);
        const long wind = kko::bloch_winding(m, std::max(grid, 8));
        put(w.pairing);
        o.result["bloch_winding"] = wind;
        o.result["gap"] = w.gap;
        o.residuals["winding_mismatch"] = double(std::labs(w.pairing.value + wind));
        o.ok = o.ok && w.pairing.value == -wind;
        o.summary.push_back("odd pairing " + std::to_string(w.pairing.value));
    } else if (type == "spin-chern" || type == "kane-mele") {
        if (!m.spin_candidate) throw kko::Error("MissingSymmetry", "model has no spin_candidate");
        const kko::SpinChernResult s = kko::spin_chern_kane_mele(m, *m.spin_candidate, grid);
        o.result["value"] = type == "spin-chern" ? s.spin_chern : s.kane_mele;
        o.result["spin_chern"] = s.spin_chern;
        o.result["kane_mele"] = s.kane_mele;
        o.result["flattening_gap"] = s.flattening_gap;
        o.result["worst_k"] = s.worst_k;
        o.summary.push_back("spin chern " + std::to_string(s.spin_chern) + ", kane-mele " + std::to_string(s.kane_mele));
    } else {
        throw kko::Error("UsageError", "unknown invariant type " + type);
    }
    if (!plot.empty()) write_csv(plot, gap_header(m.lattice_dim), gap_rows(m, grid));
    return o;
}

Output cmd_clifford_table() {
    Output o;
    json rows = json::array();
    std::ostringstream text;
    text << " d  alpha  alpha'  alpha''  measured\n";
    for (int d = 0; d < 8; ++d) {
        const kko::SignTriple s = kko::sign_table(d);
        const kko::CliffordRep rep = kko::build_clifford(0, d);
        const kko::SignTriple got = kko::measured_signs(rep);
        bool match = got.alpha == s.alpha;
        if (got.alpha_prime) match = match && got.alpha_prime == s.alpha_prime;
        if (got.alpha_dd) match = match && got.alpha_dd == s.alpha_dd;
        json r;
        r["d"] = d;
        r["stored"] = sign_json(s);
        r["measured"] = sign_json(got);
        r["representation"] = {{"p", 0}, {"q", d}, {"dim", rep.dim}};
        r["match"] = match;
        rows.push_back(r);
        o.ok = o.ok && match;
        auto cell = [](std::optional<int> v) { return v ? (*v > 0 ? std::string("+1") : std::string("-1")) : std::string(" ."); };
        text << std::setw(2) << d << "  " << std::setw(5) << cell(s.alpha) << "  " << std::setw(6) << cell(s.alpha_prime)
             << "  " << std::setw(7) << cell(s.alpha_dd) << "  " << (match ? "ok" : "MISMATCH") << "\n";
    }
    o.result["rows"] = rows;
    o.summary.push_back(text.str());
    return o;
}

json exactness_json(const kko::ExactnessReport& r) {
    json nodes = json::array();
    for (const auto& n : r.nodes) {
        json j;
        j["index"] = n.index;
        j["label"] = n.label;
        j["group"] = n.group.name();
        j["composite_zero"] = n.composite_zero;
        j["kernel_in_image"] = n.kernel_in_image;
        j["pass"] = n.pass;
        if (!n.witness.empty()) j["witness"] = n.witness;
        nodes.push_back(j);
    }
    return nodes;
}

Output cmd_sequence_verify(const std::string& alg) {
    Output o;
    const kko::Algebra a = kko::parse_algebra(alg);
    const kko::ExactSequence seq = kko::build_sequence(a);
    const kko::ExactnessReport r = kko::verify_exactness(seq);
    o.result["algebra"] = kko::algebra_name(a);
    o.result["nodes"] = exactness_json(r);
    json maps = json::array();
    for (const auto& m : seq.maps) {
        json j;
        j["map"] = kko::map_symbol(m.kind);
        j["source"] = m.source;
        j["target"] = m.target;
        json mat = json::array();
        for (Eigen::Index i = 0; i < m.matrix.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index k = 0; k < m.matrix.cols(); ++k) row.push_back(m.matrix(i, k));
            mat.push_back(row);
        }
        j["matrix"] = mat;
        maps.push_back(j);
    }
    o.result["maps"] = maps;
    o.result["all_pass"] = r.all_pass;
    o.ok = r.all_pass;
    int passed = 0;
    for (const auto& n : r.nodes) passed += n.pass;
    o.summary.push_back("sequence over " + kko::algebra_name(a) + ": " + std::to_string(passed) + "/" +
                        std::to_string(r.nodes.size()) + " nodes exact");
    return o;
}

Output cmd_ktheory(const std::string& op, const std::vector<std::string>& files, int degree) {
    Output o;
    auto need = [&](std::size_t n) {
        if (files.size() != n) throw kko::Error("UsageError", op + " takes " + std::to_string(n) + " class file(s)");
    };
    if (op == "complexify") {
        need(1);
        const kko::KUClass y = kko::complexify(read_class(files[0]));
        o.result["class"] = kko::ku_class_to_json(y);
        o.result["ku_invariant"] = kko::ku_invariant(y);
    } else if (op == "realify") {
        need(1);
        const kko::KUClass y = kko::ku_class_from_json(kko::read_json_file(files[0]));
        o.result["class"] = class_summary(kko::realify(y, degree));
    } else if (op == "eta") {
        need(1);
        o.result["class"] = class_summary(kko::eta_act(read_class(files[0])));
    } else if (op == "product") {
        need(2);
        o.result["class"] = class_summary(kko::external_product(read_class(files[0]), read_class(files[1])));
    } else if (op == "invariant") {
        need(1);
        const kko::KOClass x = read_class(files[0]);
        const json s = class_summary(x);
        o.result["degree"] = x.degree;
        o.result["scalar_invariant"] = s["scalar_invariant"];
        o.residuals["relation"] = s["relation_residual"];
        if (x.algebra == kko::CoefficientAlgebra::Scalar) {
            o.result["eta_invariant"] = kko::scalar_invariant(kko::eta_act(x));
            const kko::SpinSearch sp = kko::spin_operator(x);
            o.result["spin_operator"] = sp.S.has_value();
            if (sp.S) {
                o.result["spin_padding"] = sp.padded_dims;
                o.result["spin_contracted"] = sp.contracted;
                o.residuals["spin"] = kko::spin_residual(sp.target, *sp.S);
            }
        }
    } else {
        throw kko::Error("UsageError", "unknown ktheory operation " + op);
    }
    if (o.result.contains("class") && o.result["class"].contains("scalar_invariant"))
        o.summary.push_back(op + ": degree " + o.result["class"]["degree"].dump() + ", invariant " +
                            o.result["class"]["scalar_invariant"].dump());
    else
        o.summary.push_back(op + " done");
    return o;
}

Output cmd_tables() {
    Output o;
    const Output cl = cmd_clifford_table();
    o.result["sign_table"] = cl.result["rows"];
    o.ok = cl.ok;
    json seqs = json::object();
    for (kko::Algebra a : {kko::Algebra::R, kko::Algebra::C, kko::Algebra::H}) {
        const kko::ExactnessReport r = kko::verify_exactness(a);
        json j;
        j["all_pass"] = r.all_pass;
        json failing = json::array();
        for (const auto& n : r.nodes)
            if (!n.pass) failing.push_back(n.label);
        j["failing"] = failing;
        seqs[kko::algebra_name(a)] = j;
        o.ok = o.ok && r.all_pass;
    }
    o.result["sequence"] = seqs;
    const kko::GradedGroups g = kko::builtin_groups(kko::Algebra::R);
    const char* gens[8] = {"1", "eta", "eta^2", "", "delta", "", "", ""};
    json ring = json::array();
    for (int d = 0; d < 8; ++d) {
        json j;
        j["degree"] = d;
        j["group"] = g.ko_at(d).name();
        j["generator"] = g.ko_at(d).trivial() ? json(nullptr) : json(gens[d]);
        ring.push_back(j);
    }
    o.result["ko_ring"] = ring;
    json coeff = json::array();
    for (int n = 0; n <= 10; ++n) {
        const kko::ChernCoefficients c = kko::chern_coefficients(n);
        coeff.push_back({{"n", n}, {"lambda", c.lambda}, {"mu", c.mu}});
    }
    o.result["chern_coefficients"] = coeff;
    o.summary = cl.summary;
    o.summary.push_back(std::string("sequences ") + (o.ok ? "exact" : "NOT exact"));
    return o;
}

Output cmd_model_export(const ModelSource& src, const std::string& out) {
    Output o;
    const kko::BlochModel m = load_model(src);
    const json j = kko::model_to_json(m);
    if (out.empty()) {
        o.result["model"] = j;
    } else {
        std::ofstream f(out);
        if (!f) throw kko::Error("IOError", "cannot write " + out);
        f << j.dump(2) << "\n";
        o.result["file"] = out;
    }
    o.summary.push_back("exported " + m.name);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Real K-theory and topological invariants at desk scale"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    bool timing = false;
    bool compact = false;
    app.add_option("--threads", threads, "worker threads (overrides KKO_THREADS)")->check(CLI::NonNegativeNumber);
    app.add_flag("--timing", timing, "include wall time in the JSON report");
    app.add_flag("--compact", compact, "single-line JSON");

    std::function<Output()> run;
    std::string command;
    json params = json::object();

    auto add_source = [](CLI::App* sub, ModelSource& src) {
        sub->add_option("--model", src.file, "model file (JSON)");
        sub->add_option("--corpus", src.corpus, "corpus model name");
        sub->add_option("--param", src.params, "corpus parameter key=value")->expected(0, -1);
    };

    ModelSource csrc;
    int cgrid = 6, cgap_grid = 60;
    double cgap_tol = 1e-6;
    std::string cplot;
    auto* classify = app.add_subcommand("classify", "symmetry class of a model");
    classify->add_option("model_file", csrc.file, "model file (JSON)");
    classify->add_option("--corpus", csrc.corpus, "corpus model name");
    classify->add_option("--param", csrc.params, "corpus parameter key=value")->expected(0, -1);
    classify->add_option("--grid", cgrid, "k points per axis for symmetry checks");
    classify->add_option("--gap-grid", cgap_grid, "k points per axis for the gap scan");
    classify->add_option("--gap-tol", cgap_tol, "minimal gap at the Fermi level");
    classify->add_option("--plot-data", cplot, "write (k, gap) CSV");
    classify->callback([&] {
        command = "classify";
        params = source_json(csrc);
        params["grid"] = cgrid;
        params["gap_grid"] = cgap_grid;
        params["gap_tol"] = cgap_tol;
        run = [&] { return cmd_classify(csrc, cgrid, cgap_tol, cgap_grid, cplot); };
    });

    ModelSource isrc;
    std::string itype;
    int itrunc = 0, igrid = 60, ilevel = 1;
    double ithreshold = kko::kResidualThreshold;
    std::size_t isamples = 401;
    std::string iplot;
    auto* invariant = app.add_subcommand("invariant", "index pairings and lattice invariants");
    invariant->add_option("--type", itype, "invariant")
        ->required()
        ->check(CLI::IsMember({"chern", "spin-chern", "kane-mele", "pair-even", "pair-odd", "z2-lift"}));
    add_source(invariant, isrc);
    invariant->add_option("--truncation", itrunc, "window side length L (default 40, pair-even 16)");
    invariant->add_option("--grid", igrid, "k points per axis");
    invariant->add_option("--level", ilevel, "pairing level n")->check(CLI::NonNegativeNumber);
    invariant->add_option("--threshold", ithreshold, "rounding residual threshold");
    invariant->add_option("--samples", isamples, "path samples (z2-lift)");
    invariant->add_option("--plot-data", iplot, "write (k, gap) or (t, integrand) CSV");
    invariant->callback([&] {
        command = "invariant";
        if (itrunc == 0) itrunc = itype == "pair-even" ? 16 : 40;
        params = itype == "z2-lift" ? json::object() : source_json(isrc);
        params["type"] = itype;
        if (itype == "z2-lift") {
            params["samples"] = isamples;
        } else {
            params["truncation"] = itrunc;
            params["grid"] = igrid;
            params["level"] = ilevel;
        }
        params["threshold"] = ithreshold;
        run = [&] { return cmd_invariant(itype, isrc, itrunc, igrid, ilevel, ithreshold, isamples, iplot); };
    });

    auto* clifford = app.add_subcommand("clifford", "Clifford algebra data");
    clifford->require_subcommand(1);
    clifford->add_subcommand("table", "sign table with measured signs")->callback([&] {
        command = "clifford table";
        run = [] { return cmd_clifford_table(); };
    });

    std::string salg = "R";
    auto* sequence = app.add_subcommand("sequence", "real/complex long exact sequence");
    sequence->require_subcommand(1);
    auto* verify = sequence->add_subcommand("verify", "check exactness at all 24 nodes");
    verify->add_option("--algebra", salg, "R, C or H")->check(CLI::IsMember({"R", "C", "H"}));
    verify->callback([&] {
        command = "sequence verify";
        params["algebra"] = salg;
        run = [&] { return cmd_sequence_verify(salg); };
    });

    auto* ktheory = app.add_subcommand("ktheory", "operations on class files");
    ktheory->require_subcommand(1);
    std::vector<std::string> kfiles;
    int kdegree = 0;
    for (const char* op : {"complexify", "realify", "eta", "product", "invariant"}) {
        auto* sub = ktheory->add_subcommand(op, std::string(op) + " of class file(s)");
        sub->add_option("files", kfiles, "class JSON file(s)")->required();
        if (std::string(op) == "realify") sub->add_option("--degree", kdegree, "target degree")->required();
        sub->callback([&, op] {
            command = std::string("ktheory ") + op;
            params["files"] = kfiles;
            if (std::string(op) == "realify") params["degree"] = kdegree;
            run = [&, op] { return cmd_ktheory(op, kfiles, kdegree); };
        });
    }

    app.add_subcommand("tables", "sign table, sequences, ring and coefficients")->callback([&] {
        command = "tables";
        run = [] { return cmd_tables(); };
    });

    ModelSource msrc;
    std::string mout;
    auto* model = app.add_subcommand("model", "corpus models");
    model->require_subcommand(1);
    auto* mexport = model->add_subcommand("export", "write a corpus model as a model file");
    mexport->add_option("name", msrc.corpus, "corpus model name")->required();
    mexport->add_option("--param", msrc.params, "parameter key=value")->expected(0, -1);
    mexport->add_option("-o,--output", mout, "output file (default: inside the report)");
    mexport->callback([&] {
        command = "model export";
        params = source_json(msrc);
        run = [&] { return cmd_model_export(msrc, mout); };
    });
    model->add_subcommand("list", "corpus names")->callback([&] {
        command = "model list";
        run = [] {
            Output o;
            o.result["models"] = kko::corpus_names();
            return o;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (threads > 0) kko::set_thread_count(threads);

    json report;
    report["schema"] = 1;
    report["command"] = command;
    report["params"] = params;
    int code = 0;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        Output o = run();
        report["result"] = o.result;
        report["residuals"] = o.residuals;
        report["ok"] = o.ok;
        for (const auto& s : o.summary) std::cerr << s << (s.empty() || s.back() != '\n' ? "\n" : "");
        code = o.ok ? 0 : 1;
    } catch (const kko::ResidualTooLarge& e) {
        report["error"] = {{"kind", e.kind()}, {"message", e.what()}, {"raw", e.raw}, {"residual", e.residual}};
        report["ok"] = false;
        std::cerr << e.what() << "\n";
        code = 1;
    } catch (const kko::SchemaError& e) {
        report["error"] = {{"kind", e.kind()}, {"message", e.what()}, {"path", e.path}};
        report["ok"] = false;
        std::cerr << e.what() << "\n";
        code = 2;
    } catch (const kko::Error& e) {
        report["error"] = {{"kind", e.kind()}, {"message", e.what()}};
        report["ok"] = false;
        std::cerr << e.what() << "\n";
        code = 2;
    }
    if (timing) {
        const auto dt = std::chrono::steady_clock::now() - t0;
        report["timing_ms"] = std::chrono::duration<double, std::milli>(dt).count();
    }
    std::cout << (compact ? report.dump() : report.dump(2)) << "\n";
    return code;
}

#include "branchhist/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "branchhist/builtin.hpp"
#include "branchhist/chain.hpp"
#include "branchhist/coarse.hpp"
#include "branchhist/document.hpp"
#include "branchhist/format.hpp"
#include "branchhist/hpo.hpp"

namespace branchhist {

namespace {

// Early return with a fixed status from inside a command.
struct Exit {
    int code;
};

class FileError : public Error {
public:
    using Error::Error;
};

std::string read_file(const std::string& path) {
    if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    if (in.bad()) throw FileError("cannot read " + path);
    return text;
}

Document load(const std::string& path) { return parse_document(read_file(path)); }

const BranchingFamily& require_family(const Document& doc) {
    if (const auto* f = std::get_if<BranchingFamily>(&doc)) {
        require_valid(*f);
        return *f;
    }
    throw NotABranchingFamilyError("document is a history list, not a branching family");
}

struct Histories {
    std::vector<HistorySequence> seqs;
    std::vector<std::string> leaf_names;
    const EvolutionProvider* evolution;
    const DensityMatrix* rho;
};

Histories histories_of(const Document& doc) {
    if (const auto* f = std::get_if<BranchingFamily>(&doc)) {
        require_valid(*f);
        Histories h{histories(*f), {}, &f->evolution(), &f->initial_state()};
        for (NodeId id : f->leaves()) h.leaf_names.push_back(to_string(id));
        return h;
    }
    const auto& list = std::get<HistoryList>(doc);
    return Histories{list.histories, std::vector<std::string>(list.histories.size(), "-"), &list.evolution,
                     &list.rho};
}

std::string history_name(std::size_t i) { return "h" + std::to_string(i + 1); }

std::string fixed(double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string pad_right(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string pad_left(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

void print_weight_table(const Histories& h, const WeightTable& table, bool csv, std::ostream& out) {
    if (csv) {
        out << "history,leaf,weight\n";
        for (std::size_t i = 0; i < table.size(); ++i) {
            out << history_name(i) << ',' << (h.leaf_names[i] == "-" ? "" : h.leaf_names[i]) << ','
                << format_real(table.weights[i]) << '\n';
        }
        out << "sum,," << format_real(table.sum()) << '\n';
        return;
    }
    out << pad_right("history", 9) << pad_right("leaf", 7) << "weight\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << pad_right(history_name(i), 9) << pad_right(h.leaf_names[i], 7) << format_real(table.weights[i]) << '\n';
    }
    out << "sum = " << format_real(table.sum()) << '\n';
}

double max_off_diagonal(const DecoherenceMatrix& d, bool real_part) {
    double m = 0.0;
    for (std::size_t a = 0; a < d.size(); ++a) {
        for (std::size_t b = 0; b < d.size(); ++b) {
            if (a != b) m = std::max(m, real_part ? std::abs(d(a, b).real()) : std::abs(d(a, b)));
        }
    }
    return m;
}

void print_magnitudes(const DecoherenceMatrix& d, std::ostream& out) {
    out << "|D|  (" << d.size() << " x " << d.size() << ")\n";
    out << pad_right("", 6);
    for (std::size_t b = 0; b < d.size(); ++b) out << pad_left(history_name(b), 11);
    out << '\n';
    for (std::size_t a = 0; a < d.size(); ++a) {
        out << pad_right(history_name(a), 6);
        for (std::size_t b = 0; b < d.size(); ++b) out << pad_left(fixed(std::abs(d(a, b)), "%.3e"), 11);
        out << '\n';
    }
}

// Returns true when consistent.
bool print_consistency(const DecoherenceMatrix& d, bool weak, double tol, std::ostream& out) {
    print_magnitudes(d, out);
    const bool ok = weak ? is_weakly_consistent(d, tol) : is_consistent(d, tol);
    out << "max off-diagonal " << (weak ? "|Re D|" : "|D|") << " = " << fixed(max_off_diagonal(d, weak), "%.3e")
        << '\n';
    out << (ok ? "consistent" : "inconsistent") << " (" << (weak ? "weak" : "medium") << ", tol "
        << fixed(tol, "%g") << ")\n";
    return ok;
}

NodeId parse_node(const std::string& text) {
    std::string_view s = text;
    if (!s.empty() && (s.front() == 'm' || s.front() == 'M')) s.remove_prefix(1);
    std::uint32_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
        throw CLI::ValidationError("--leaves", "not a node id: " + text);
    }
    return NodeId{v};
}

std::string describe(const HistorySequence& seq) {
    std::string s;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i > 0) s += " -> ";
        s += "t=" + format_real(seq[i].time) + " rank " + std::to_string(seq[i].projector.rank());
    }
    return s.empty() ? "(empty)" : s;
}

// ---------------------------------------------------------------- commands

int cmd_validate(const std::string& path, std::ostream& out) {
    Document doc = [&] {
        try {
            return load(path);
        } catch (const DocumentError& e) {
            out << "INVALID\n" << e.what() << '\n';
            throw Exit{exit_code::invalid};
        }
    }();
    if (const auto* f = std::get_if<BranchingFamily>(&doc)) {
        const ValidationReport report = validate(*f);
        if (report.ok()) {
            out << "OK\n";
            return exit_code::ok;
        }
        out << "INVALID\n" << report.to_string();
        return exit_code::invalid;
    }
    const auto& list = std::get<HistoryList>(doc);
    if (to_branching_family(list)) {
        out << "OK (history list; regroups into a branching family)\n";
        return exit_code::ok;
    }
    out << "INVALID\nhistory list: NOT a branching family\n";
    return exit_code::invalid;
}

int cmd_weights(const std::string& path, bool csv, std::ostream& out) {
    const Document doc = load(path);
    const Histories h = histories_of(doc);
    print_weight_table(h, weight_table(h.seqs, *h.evolution, *h.rho), csv, out);
    return exit_code::ok;
}

int cmd_consistency(const std::string& path, bool weak, double tol, std::ostream& out) {
    const Document doc = load(path);
    const Histories h = histories_of(doc);
    const DecoherenceMatrix d = decoherence_matrix(h.seqs, *h.evolution, *h.rho);
    return print_consistency(d, weak, tol, out) ? exit_code::ok : exit_code::inconsistent;
}

int cmd_coarse(const std::string& path, const std::string& leaves, double tol, std::ostream& out) {
    std::vector<std::string> parts;
    std::stringstream ss(leaves);
    for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
    if (parts.size() != 2) throw CLI::ValidationError("--leaves", "expected two leaves, e.g. --leaves m3,m4");
    const NodeId a = parse_node(parts[0]);
    const NodeId b = parse_node(parts[1]);

    const Document doc = load(path);
    const BranchingFamily& family = require_family(doc);
    HistorySequence sum = [&] {
        try {
            return intra_branch_sum(family, a, b);
        } catch (const TransBranchError& e) {
            out << e.what() << '\n';
            throw Exit{exit_code::trans_branch};
        }
    }();
    const auto& evo = family.evolution();
    const auto& rho = family.initial_state();
    const double wa = weight(history_of(family, a), evo, rho, tol);
    const double wb = weight(history_of(family, b), evo, rho, tol);
    const double ws = weight(sum, evo, rho, tol);
    const double discrepancy = ws - wa - wb;
    out << "intra-branch sum of " << to_string(a) << " and " << to_string(b) << " (siblings under "
        << to_string(*family.at(a).parent) << ")\n";
    out << "summed history: " << describe(sum) << '\n';
    out << "W(" << to_string(a) << ") = " << format_real(wa) << '\n';
    out << "W(" << to_string(b) << ") = " << format_real(wb) << '\n';
    out << "W(sum) = " << format_real(ws) << '\n';
    out << "discrepancy = " << fixed(discrepancy, "%.3e") << '\n';
    out << "additive: " << (verify_intra_additivity(family, a, b, tol) ? "yes" : "no") << " (tol " << fixed(tol, "%g")
        << ")\n";
    return exit_code::ok;
}

void print_hpo(const std::vector<HistorySequence>& seqs, std::ostream& out) {
    std::vector<HistoryProjector> ys;
    try {
        ys = embed_all(seqs);
    } catch (const NotEmbeddableError& e) {
        out << "not embeddable: " << e.what() << '\n';
        return;
    }
    const auto& first = ys.front();
    out << "history space: " << first.slot_dim() << "^" << first.slots() << " = " << first.matrix().rows()
        << " (slot times";
    for (double t : first.slot_times()) out << ' ' << format_real(t);
    out << ")\n";
    const bool family = is_hpo_family(ys);
    out << "HPO family: " << (family ? "yes" : "no") << '\n';
    for (std::size_t i = 0; i < ys.size(); ++i) {
        out << "  " << history_name(i) << ": " << (is_homogeneous(ys[i]) ? "homogeneous" : "inhomogeneous") << '\n';
    }
    if (!family) return;
    const HPOFamily f(ys);
    out << "pairwise sums:\n";
    for (std::size_t i = 0; i < ys.size(); ++i) {
        for (std::size_t j = i + 1; j < ys.size(); ++j) {
            std::vector<int> sel(ys.size(), 0);
            sel[i] = sel[j] = 1;
            out << "  " << history_name(i) << "+" << history_name(j) << ": "
                << (is_homogeneous(sum_hpo(f, sel)) ? "homogeneous" : "inhomogeneous") << '\n';
        }
    }
}

int cmd_hpo_check(const std::string& path, std::ostream& out) {
    const Document doc = load(path);
    const Histories h = histories_of(doc);
    if (h.seqs.empty()) throw DimensionError("no histories to embed");
    print_hpo(h.seqs, out);
    return exit_code::ok;
}

int cmd_export_dot(const std::string& path, bool weights, std::ostream& out) {
    const Document doc = load(path);
    if (const auto* f = std::get_if<BranchingFamily>(&doc)) require_valid(*f);
    out << export_dot(doc, weights);
    return exit_code::ok;
}

void print_weights_line(const WeightTable& table, std::ostream& out) {
    out << "weights:";
    for (double w : table.weights) out << ' ' << format_real(w);
    out << '\n';
}

int demo_family(const BranchingFamily& f, std::ostream& out) {
    const WeightTable table = weight_table(f);
    print_weights_line(table, out);
    out << "sum = " << format_real(table.sum()) << "; branching family (validated)\n";
    out << "product-shaped: " << (is_product_shaped(f) ? "yes" : "no") << '\n';
    print_consistency(decoherence_matrix(f), false, kDefaultTol, out);
    return exit_code::ok;
}

int cmd_demo(const std::string& name, bool document_only, std::ostream& out) {
    if (name == "isham-hpo") {
        const IshamCounterexample ex = isham_counterexample();
        if (document_only) {
            out << serialize_history_list(ex.histories);
            return exit_code::ok;
        }
        out << "# demo isham-hpo: four two-time homogeneous histories\n"
               "# bases: phi=|0>, psi=|1>, chi=|+>, chi'=|->; rho=|0><0|; t1=0, t2=1; trivial dynamics\n"
               "# h1 = chi then psi, h2 = chi' then psi, h3 = phi then phi, h4 = psi then phi\n";
        out << serialize_history_list(ex.histories);
        print_weights_line(ex.weights, out);
        const bool branching = to_branching_family(ex.histories).has_value();
        out << "sum = " << format_real(ex.weights.sum()) << "; "
            << (branching ? "branching family" : "NOT a branching family") << '\n';
        const DecoherenceMatrix d = decoherence_matrix(ex.histories.histories, ex.histories.evolution, ex.histories.rho);
        out << "D(h1,h2) = " << format_real(d(0, 1).real()) << '\n';
        print_hpo(ex.histories.histories, out);
        return exit_code::ok;
    }
    BranchingFamily f = [&] {
        if (name == "fig2") return builtin::fig2();
        if (name == "branch-no-prod") return builtin::branch_no_prod();
        return builtin::isham_reversed();
    }();
    if (document_only) {
        out << serialize_family(f);
        return exit_code::ok;
    }
    if (name == "fig2") {
        out << "# demo fig2: qutrit family with branch-dependent times and lengths\n"
               "# rho=|u><u|, u=(|0>+|1>+|2>)/sqrt3; trivial dynamics\n"
               "# m1 branch: |0><0| at t=0, then the Fourier basis at t=1\n"
               "# m2 branch: |1><1|+|2><2| at t=0, then {|0><0|+|s><s|, |a><a|} at t=1.5, s,a=(|1>+-|2>)/sqrt2\n";
    } else if (name == "branch-no-prod") {
        out << "# demo branch-no-prod: a branching family that is not a product family\n"
               "# phi=|0>, psi=|1> at t=0; after phi the computational basis, after psi the Hadamard basis, at t=1\n"
               "# rho=I/2; trivial dynamics\n";
    } else {
        out << "# demo isham-reversed: the four histories with the time order reversed\n"
               "# psi=|1>, phi=|0> at t=0; after psi {chi=|+>, chi'=|->}, after phi {phi, psi}, at t=1\n"
               "# rho=|0><0|; trivial dynamics\n";
    }
    out << serialize_family(f);
    return demo_family(f, out);
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Branching families of quantum histories: weights, consistency, coarse graining", "branchhist"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    std::string path;
    bool csv = false;
    bool weak = false;
    double tol = kDefaultTol;
    std::string leaves;
    bool with_weights = false;
    std::string demo_name;
    bool document_only = false;

    auto* validate_cmd = app.add_subcommand("validate", "Check a document; prints OK or a report");
    validate_cmd->add_option("file", path, "Family document (- for stdin)")->required();

    auto* weights_cmd = app.add_subcommand("weights", "Leaf-ordered weight table");
    weights_cmd->add_option("file", path, "Family document (- for stdin)")->required();
    weights_cmd->add_flag("--csv", csv, "CSV output");

    auto* consistency_cmd = app.add_subcommand("consistency", "Decoherence matrix and consistency verdict");
    consistency_cmd->add_option("file", path, "Family document (- for stdin)")->required();
    consistency_cmd->add_flag("--weak", weak, "Check only real parts");
    consistency_cmd->add_option("--tol", tol, "Tolerance")->check(CLI::NonNegativeNumber)->capture_default_str();

    auto* coarse_cmd = app.add_subcommand("coarse", "Intra-branch sum of two sibling leaves");
    coarse_cmd->add_option("file", path, "Family document (- for stdin)")->required();
    coarse_cmd->add_option("--leaves", leaves, "Two leaf ids, e.g. m3,m4")->required();
    coarse_cmd->add_option("--tol", tol, "Tolerance")->check(CLI::NonNegativeNumber)->capture_default_str();

    auto* hpo_cmd = app.add_subcommand("hpo-check", "Embed histories into the history space");
    hpo_cmd->add_option("file", path, "Family or history-list document (- for stdin)")->required();

    auto* dot_cmd = app.add_subcommand("export-dot", "Graphviz rendering of the tree");
    dot_cmd->add_option("file", path, "Family document (- for stdin)")->required();
    dot_cmd->add_flag("--weights", with_weights, "Annotate leaves with weights");

    auto* demo_cmd = app.add_subcommand("demo", "Built-in families");
    demo_cmd->add_option("name", demo_name, "fig2 | branch-no-prod | isham-hpo | isham-reversed")
        ->required()
        ->check(CLI::IsMember({"fig2", "branch-no-prod", "isham-hpo", "isham-reversed"}));
    demo_cmd->add_flag("--document", document_only, "Print only the document");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_code::ok : exit_code::usage;
    }

    try {
        if (*validate_cmd) return cmd_validate(path, out);
        if (*weights_cmd) return cmd_weights(path, csv, out);
        if (*consistency_cmd) return cmd_consistency(path, weak, tol, out);
        if (*coarse_cmd) return cmd_coarse(path, leaves, tol, out);
        if (*hpo_cmd) return cmd_hpo_check(path, out);
        if (*dot_cmd) return cmd_export_dot(path, with_weights, out);
        if (*demo_cmd) return cmd_demo(demo_name, document_only, out);
        return exit_code::usage;
    } catch (const Exit& e) {
        return e.code;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const FileError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::file;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::data;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_code::internal;
    }
}

}  // namespace branchhist

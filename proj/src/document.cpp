#include "branchhist/document.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "branchhist/format.hpp"

namespace branchhist {

using json = nlohmann::json;

DocumentError::DocumentError(Stage stage, std::string message, std::size_t line, std::size_t column,
                             std::string pointer, std::vector<NodeId> nodes)
    : Error([&] {
          std::string where;
          if (line > 0) {
              where = "line " + std::to_string(line) + ", column " + std::to_string(column) + ": ";
          } else if (!pointer.empty()) {
              where = pointer + ": ";
          } else if (!nodes.empty()) {
              where = "nodes";
              for (std::size_t i = 0; i < nodes.size(); ++i) where += (i ? ", " : " ") + to_string(nodes[i]);
              where += ": ";
          }
          return where + message;
      }()),
      stage_(stage),
      line_(line),
      column_(column),
      pointer_(std::move(pointer)),
      nodes_(std::move(nodes)) {}

namespace {

// ---------------------------------------------------------------- syntax

class PositionedSax : public nlohmann::detail::json_sax_dom_parser<json> {
public:
    explicit PositionedSax(json& root) : json_sax_dom_parser(root, false) {}

    template <class Exception>
    bool parse_error(std::size_t position, const std::string& /*token*/, const Exception& ex) {
        error_byte = position;
        error_message = ex.what();
        return false;
    }

    std::size_t error_byte = 0;
    std::string error_message;
};

json parse_json(std::string_view text) {
    json root;
    PositionedSax sax(root);
    const bool ok = json::sax_parse(text.begin(), text.end(), &sax);
    if (ok && sax.error_message.empty()) return root;

    // error_byte counts characters read, so it points one past the offender.
    const std::size_t upto = std::min(text.size(), sax.error_byte > 0 ? sax.error_byte - 1 : 0);
    std::size_t line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < upto; ++i) {
        if (text[i] == '\n') {
            ++line;
            line_start = i + 1;
        }
    }
    // Drop nlohmann's "[json.exception.parse_error.101] parse error at line 1, column 2: " prefix;
    // the position is reported separately.
    std::string msg = sax.error_message;
    if (msg.rfind("[json.exception", 0) == 0) {
        if (const auto close = msg.find("] "); close != std::string::npos) msg.erase(0, close + 2);
    }
    if (msg.rfind("parse error", 0) == 0) {
        if (const auto colon = msg.find(": "); colon != std::string::npos) msg.erase(0, colon + 2);
    }
    if (msg.rfind("syntax error", 0) != 0) msg = "syntax error: " + msg;
    throw DocumentError(DocumentError::Stage::syntax, msg, line, upto - line_start + 1);
}

// ---------------------------------------------------------------- schema

[[noreturn]] void schema_error(const std::string& ptr, const std::string& msg) {
    throw DocumentError(DocumentError::Stage::schema, msg, 0, 0, ptr);
}

[[noreturn]] void semantic_error(const std::string& ptr, const std::string& msg) {
    throw DocumentError(DocumentError::Stage::semantic, msg, 0, 0, ptr);
}

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

void require_object(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) schema_error(ptr, "expected an object");
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            schema_error(child(ptr, key), "unknown field \"" + key + "\"");
        }
    }
}

const json& field(const json& obj, const std::string& ptr, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(child(ptr, key), std::string("missing required field \"") + key + "\"");
    return *it;
}

const json* optional_field(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::uint64_t as_unsigned(const json& j, const std::string& ptr, std::uint64_t max) {
    if (!j.is_number_integer()) schema_error(ptr, "expected a non-negative integer");
    if (j.is_number_unsigned()) {
        const auto v = j.get<std::uint64_t>();
        if (v > max) schema_error(ptr, "integer exceeds " + std::to_string(max));
        return v;
    }
    const auto v = j.get<std::int64_t>();
    if (v < 0) schema_error(ptr, "expected a non-negative integer");
    if (static_cast<std::uint64_t>(v) > max) schema_error(ptr, "integer exceeds " + std::to_string(max));
    return static_cast<std::uint64_t>(v);
}

double as_real(const json& j, const std::string& ptr) {
    if (!j.is_number()) schema_error(ptr, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) schema_error(ptr, "expected a finite number");
    return v;
}

ComplexMatrix as_matrix(const json& j, const std::string& ptr, std::size_t dim) {
    if (!j.is_array() || j.size() != dim) {
        schema_error(ptr, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix of [re, im] pairs");
    }
    const auto d = static_cast<Eigen::Index>(dim);
    ComplexMatrix m(d, d);
    for (std::size_t r = 0; r < dim; ++r) {
        const auto rp = child(ptr, r);
        const json& row = j[r];
        if (!row.is_array() || row.size() != dim) schema_error(rp, "expected a row of " + std::to_string(dim) + " entries");
        for (std::size_t c = 0; c < dim; ++c) {
            const auto cp = child(rp, c);
            const json& e = row[c];
            if (!e.is_array() || e.size() != 2) schema_error(cp, "expected an [re, im] pair");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                Complex(as_real(e[0], child(cp, 0)), as_real(e[1], child(cp, 1)));
        }
    }
    return m;
}

template <class F>
auto semantic(const std::string& ptr, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const DocumentError&) {
        throw;
    } catch (const Error& e) {
        semantic_error(ptr, e.what());
    }
}

struct Common {
    std::size_t dim;
    DensityMatrix rho;
    EvolutionProvider evolution;
};

EvolutionProvider read_dynamics(const json& j, const std::string& ptr, std::size_t dim) {
    if (!j.is_object()) schema_error(ptr, "expected an object");
    const json& kind = field(j, ptr, "kind");
    if (!kind.is_string()) schema_error(child(ptr, "kind"), "expected a string");
    const auto k = kind.get<std::string>();
    if (k == "trivial") {
        require_object(j, ptr, {"kind"});
        return EvolutionProvider::trivial(dim);
    }
    if (k == "hamiltonian") {
        require_object(j, ptr, {"kind", "hamiltonian"});
        const auto hp = child(ptr, "hamiltonian");
        ComplexMatrix h = as_matrix(field(j, ptr, "hamiltonian"), hp, dim);
        return semantic(hp, [&] { return EvolutionProvider::hamiltonian(std::move(h)); });
    }
    if (k == "unitary_table") {
        require_object(j, ptr, {"kind", "breakpoints", "unitaries"});
        const auto bp = child(ptr, "breakpoints");
        const json& bj = field(j, ptr, "breakpoints");
        if (!bj.is_array()) schema_error(bp, "expected an array of times");
        std::vector<double> breakpoints;
        for (std::size_t i = 0; i < bj.size(); ++i) breakpoints.push_back(as_real(bj[i], child(bp, i)));
        const auto up = child(ptr, "unitaries");
        const json& uj = field(j, ptr, "unitaries");
        if (!uj.is_array()) schema_error(up, "expected an array of matrices");
        std::vector<Unitary> unitaries;
        for (std::size_t i = 0; i < uj.size(); ++i) {
            ComplexMatrix u = as_matrix(uj[i], child(up, i), dim);
            unitaries.push_back(semantic(child(up, i), [&] { return Unitary(std::move(u)); }));
        }
        return semantic(ptr, [&] { return EvolutionProvider::piecewise(std::move(breakpoints), std::move(unitaries)); });
    }
    schema_error(child(ptr, "kind"), "unknown dynamics kind \"" + k + "\"");
}

Common read_common(const json& root) {
    const std::size_t dim = static_cast<std::size_t>(as_unsigned(field(root, "#", "dim"), "#/dim", kMaxDocumentDim));
    if (dim == 0) schema_error("#/dim", "dimension must be positive");
    EvolutionProvider evolution = read_dynamics(field(root, "#", "dynamics"), "#/dynamics", dim);
    const json& is = field(root, "#", "initial_state");
    DensityMatrix rho = [&] {
        if (is.is_string()) {
            if (is.get<std::string>() != "maximally_mixed") {
                schema_error("#/initial_state", "expected \"maximally_mixed\" or a matrix");
            }
            return DensityMatrix::maximally_mixed(dim);
        }
        ComplexMatrix m = as_matrix(is, "#/initial_state", dim);
        return semantic("#/initial_state", [&] { return DensityMatrix(std::move(m)); });
    }();
    return Common{dim, std::move(rho), std::move(evolution)};
}

BranchingFamily read_family(const json& root) {
    require_object(root, "#", {"dim", "dynamics", "initial_state", "nodes"});
    Common c = read_common(root);
    const json& nodes = field(root, "#", "nodes");
    if (!nodes.is_array()) schema_error("#/nodes", "expected an array of nodes");
    std::vector<Moment> moments;
    moments.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto np = child("#/nodes", i);
        const json& n = nodes[i];
        require_object(n, np, {"id", "parent", "time", "projector"});
        Moment m;
        m.id = NodeId{static_cast<std::uint32_t>(
            as_unsigned(field(n, np, "id"), child(np, "id"), std::numeric_limits<std::uint32_t>::max() - 1))};
        m.time = as_real(field(n, np, "time"), child(np, "time"));
        if (const json* p = optional_field(n, "parent")) {
            m.parent = NodeId{static_cast<std::uint32_t>(
                as_unsigned(*p, child(np, "parent"), std::numeric_limits<std::uint32_t>::max() - 1))};
        }
        if (const json* p = optional_field(n, "projector")) m.projector = as_matrix(*p, child(np, "projector"), c.dim);
        moments.push_back(std::move(m));
    }
    return BranchingFamily::assemble(c.dim, std::move(moments), std::move(c.rho), std::move(c.evolution));
}

HistoryList read_history_list(const json& root) {
    require_object(root, "#", {"dim", "dynamics", "initial_state", "histories"});
    Common c = read_common(root);
    const json& hs = field(root, "#", "histories");
    if (!hs.is_array()) schema_error("#/histories", "expected an array of histories");
    std::vector<HistorySequence> seqs;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const auto hp = child("#/histories", i);
        if (!hs[i].is_array()) schema_error(hp, "expected an array of steps");
        std::vector<HistoryStep> steps;
        for (std::size_t k = 0; k < hs[i].size(); ++k) {
            const auto sp = child(hp, k);
            const json& s = hs[i][k];
            require_object(s, sp, {"time", "projector"});
            const double t = as_real(field(s, sp, "time"), child(sp, "time"));
            ComplexMatrix p = as_matrix(field(s, sp, "projector"), child(sp, "projector"), c.dim);
            steps.push_back(HistoryStep{t, semantic(child(sp, "projector"), [&] { return Projector(std::move(p)); })});
        }
        seqs.push_back(semantic(hp, [&] { return HistorySequence(c.dim, std::move(steps)); }));
    }
    return HistoryList{c.dim, std::move(c.rho), std::move(c.evolution), std::move(seqs)};
}

json parse_root(std::string_view text) {
    json root = parse_json(text);
    if (!root.is_object()) schema_error("#", "expected a JSON object at the top level");
    return root;
}

// ---------------------------------------------------------------- writing

json matrix_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_common(json& root, std::size_t dim, const DensityMatrix& rho, const EvolutionProvider& evolution) {
    root["dim"] = dim;
    json dyn = json::object();
    if (evolution.as_trivial()) {
        dyn["kind"] = "trivial";
    } else if (const auto* h = evolution.as_hamiltonian()) {
        dyn["kind"] = "hamiltonian";
        dyn["hamiltonian"] = matrix_json(h->hamiltonian);
    } else if (const auto* p = evolution.as_piecewise()) {
        dyn["kind"] = "unitary_table";
        json bps = json::array();
        for (double t : p->breakpoints) bps.push_back(t);
        dyn["breakpoints"] = std::move(bps);
        json us = json::array();
        for (const auto& u : p->unitaries) us.push_back(matrix_json(u.matrix()));
        dyn["unitaries"] = std::move(us);
    }
    root["dynamics"] = std::move(dyn);
    if (rho.matrix() == identity(dim) / static_cast<double>(dim)) {
        root["initial_state"] = "maximally_mixed";
    } else {
        root["initial_state"] = matrix_json(rho.matrix());
    }
}

std::size_t depth(const json& j) {
    if (!j.is_array()) return 0;
    std::size_t d = 0;
    for (const auto& e : j) d = std::max(d, depth(e));
    return d + 1;
}

bool has_object(const json& j) {
    if (j.is_object()) return true;
    if (j.is_array()) return std::any_of(j.begin(), j.end(), [](const json& e) { return has_object(e); });
    return false;
}

void emit(const json& j, std::string& out, std::size_t indent) {
    const std::string pad(indent, ' ');
    const std::string inner(indent + 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ",\n";
                first = false;
                out += inner + json(key).dump() + ": ";
                emit(value, out, indent + 2);
            }
            out += "\n" + pad + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            const bool inline_array = !has_object(j) && depth(j) <= 2;
            out += inline_array ? "[" : "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i > 0) out += inline_array ? ", " : ",\n";
                if (!inline_array) out += inner;
                emit(j[i], out, indent + 2);
            }
            if (!inline_array) out += "\n" + pad;
            out += "]";
            return;
        }
        case json::value_t::number_float:
            out += format_canonical(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

std::string canonical(const json& root) {
    std::string out;
    emit(root, out, 0);
    out += "\n";
    return out;
}

}  // namespace

BranchingFamily parse_family_unchecked(std::string_view text) {
    const json root = parse_root(text);
    if (root.contains("histories") && !root.contains("nodes")) {
        schema_error("#/histories", "history-list document where a branching family was expected");
    }
    return read_family(root);
}

BranchingFamily parse_family(std::string_view text) {
    BranchingFamily family = parse_family_unchecked(text);
    ValidationReport report = validate(family);
    if (!report.ok()) {
        std::set<NodeId> ids;
        for (const auto& v : report.violations) ids.insert(v.nodes.begin(), v.nodes.end());
        std::string msg = "invalid branching family:\n" + report.to_string();
        if (!msg.empty() && msg.back() == '\n') msg.pop_back();
        std::vector<NodeId> nodes(ids.begin(), ids.end());
        std::string pointer = nodes.empty() ? "#" : "";
        throw DocumentError(DocumentError::Stage::semantic, msg, 0, 0, std::move(pointer), std::move(nodes));
    }
    return family;
}

std::string serialize_family(const BranchingFamily& family) {
    json root = json::object();
    write_common(root, family.dim(), family.initial_state(), family.evolution());
    json nodes = json::array();
    for (std::size_t i = 0; i < family.size(); ++i) {
        const Moment& m = family.moment(i);
        json n = json::object();
        n["id"] = m.id.value;
        if (m.parent) n["parent"] = m.parent->value;
        n["time"] = m.time;
        if (m.projector) n["projector"] = matrix_json(*m.projector);
        nodes.push_back(std::move(n));
    }
    root["nodes"] = std::move(nodes);
    return canonical(root);
}

HistoryList parse_history_list(std::string_view text) {
    const json root = parse_root(text);
    if (root.contains("nodes") && !root.contains("histories")) {
        schema_error("#/nodes", "branching-family document where a history list was expected");
    }
    return read_history_list(root);
}

std::string serialize_history_list(const HistoryList& list) {
    json root = json::object();
    write_common(root, list.dim, list.rho, list.evolution);
    json hs = json::array();
    for (const auto& seq : list.histories) {
        json steps = json::array();
        for (const auto& s : seq.steps()) {
            json step = json::object();
            step["time"] = s.time;
            step["projector"] = matrix_json(s.projector.matrix());
            steps.push_back(std::move(step));
        }
        hs.push_back(std::move(steps));
    }
    root["histories"] = std::move(hs);
    return canonical(root);
}

Document parse_document(std::string_view text) {
    const json root = parse_root(text);
    const bool nodes = root.contains("nodes");
    const bool hists = root.contains("histories");
    if (nodes == hists) schema_error("#", "expected exactly one of \"nodes\" or \"histories\"");
    if (nodes) return read_family(root);
    return read_history_list(root);
}

std::string export_dot(const BranchingFamily& family, bool annotate_weights) {
    require_valid(family);
    std::map<std::uint32_t, double> weights;
    if (annotate_weights) {
        const WeightTable table = weight_table(family);
        for (std::size_t i = 0; i < table.size(); ++i) weights[table.leaves[i].value] = table.weights[i];
    }
    std::ostringstream os;
    os << "digraph branching_family {\n";
    os << "  rankdir=BT;\n";
    os << "  node [shape=box, fontname=\"monospace\"];\n";
    for (std::size_t i = 0; i < family.size(); ++i) {
        const Moment& m = family.moment(i);
        os << "  " << to_string(m.id) << " [label=\"" << to_string(m.id) << "\\nt=" << format_real(m.time);
        if (m.projector) {
            const auto rank = static_cast<long>(std::llround(std::max(0.0, m.projector->trace().real())));
            os << "\\nrank " << rank;
        }
        if (const auto it = weights.find(m.id.value); it != weights.end()) os << "\\nW=" << format_real(it->second);
        os << "\"];\n";
    }
    for (std::size_t i = 0; i < family.size(); ++i) {
        const Moment& m = family.moment(i);
        if (m.parent) os << "  " << to_string(*m.parent) << " -> " << to_string(m.id) << ";\n";
    }
    os << "}\n";
    return os.str();
}

std::string export_dot(const Document& doc, bool annotate_weights) {
    if (const auto* f = std::get_if<BranchingFamily>(&doc)) return export_dot(*f, annotate_weights);
    throw NotABranchingFamilyError("export-dot: history-list document is not a branching family");
}

}  // namespace branchhist

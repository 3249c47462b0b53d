#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "branchhist/chain.hpp"
#include "branchhist/errors.hpp"
#include "branchhist/structure.hpp"

// Family documents: UTF-8 JSON.
//
//   {
//     "dim": 2,
//     "dynamics": {"kind": "trivial"}
//               | {"kind": "hamiltonian", "hamiltonian": M}
//               | {"kind": "unitary_table", "breakpoints": [t0, ...], "unitaries": [M, ...]},
//     "initial_state": "maximally_mixed" | M,
//     "nodes": [{"id": 0, "time": 0.0},
//               {"id": 1, "parent": 0, "time": 1.0, "projector": M}, ...]
//   }
//
// A history-list document carries "histories": [[{"time": t, "projector": M}, ...], ...]
// in place of "nodes". M is a row-major nested array of [re, im] pairs.
//
// Canonical form: sorted keys, two-space indentation, nodes in insertion
// order, floats printed with 17 significant digits, trailing newline.
namespace branchhist {

inline constexpr std::size_t kMaxDocumentDim = 256;

class DocumentError : public Error {
public:
    enum class Stage { syntax, schema, semantic };

    DocumentError(Stage stage, std::string message, std::size_t line = 0, std::size_t column = 0,
                  std::string pointer = {}, std::vector<NodeId> nodes = {});

    Stage stage() const noexcept { return stage_; }
    // 1-based; zero when the error is not tied to a text position.
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    // JSON pointer to the offending value (schema and some semantic errors).
    const std::string& pointer() const noexcept { return pointer_; }
    // Offending node ids (family validation errors).
    const std::vector<NodeId>& nodes() const noexcept { return nodes_; }
    // Whether any position information is attached.
    bool positioned() const noexcept { return line_ > 0 || !pointer_.empty() || !nodes_.empty(); }

private:
    Stage stage_;
    std::size_t line_;
    std::size_t column_;
    std::string pointer_;
    std::vector<NodeId> nodes_;
};

class NotABranchingFamilyError : public Error {
public:
    using Error::Error;
};

// Parses and validates. Node insertion order is document order.
BranchingFamily parse_family(std::string_view text);
// Parses without running structural validation; use validate() afterwards.
BranchingFamily parse_family_unchecked(std::string_view text);
std::string serialize_family(const BranchingFamily& family);

HistoryList parse_history_list(std::string_view text);
std::string serialize_history_list(const HistoryList& list);

// Either kind of document; families are returned unvalidated.
using Document = std::variant<BranchingFamily, HistoryList>;
Document parse_document(std::string_view text);

// Graphviz digraph, nodes in insertion order. Labels carry id, time and
// projector rank; with weights, leaves also carry W.
std::string export_dot(const BranchingFamily& family, bool annotate_weights = false);
// History lists are refused with NotABranchingFamilyError.
std::string export_dot(const Document& doc, bool annotate_weights = false);

}  // namespace branchhist

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "branchhist/dynamics.hpp"
#include "branchhist/errors.hpp"
#include "branchhist/linalg.hpp"

namespace branchhist {

struct NodeId {
    std::uint32_t value = 0;

    static constexpr NodeId root() noexcept { return NodeId{0}; }
    friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

std::string to_string(NodeId id);

// A node of the branching tree. The projector stored at a child describes
// the system at its parent's time; the root carries none.
struct Moment {
    NodeId id;
    std::optional<NodeId> parent;
    double time = 0.0;
    std::optional<ComplexMatrix> projector;
};

struct HistoryStep {
    double time;
    Projector projector;
};

// Time-ordered (time, projector) chain: P¹ ⊙ P² ⊙ … ⊙ Pⁿ.
class HistorySequence {
public:
    // Throws InvariantError for non-increasing times and DimensionError for
    // projectors that are not dim x dim.
    HistorySequence(std::size_t dim, std::vector<HistoryStep> steps);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return steps_.size(); }
    bool empty() const noexcept { return steps_.empty(); }
    const HistoryStep& operator[](std::size_t i) const { return steps_[i]; }
    std::span<const HistoryStep> steps() const noexcept { return steps_; }

private:
    std::size_t dim_;
    std::vector<HistoryStep> steps_;
};

struct Violation {
    enum class Kind {
        no_root,
        multiple_roots,
        root_id,
        duplicate_id,
        dangling_parent,
        unreachable,
        root_projector,
        missing_projector,
        dimension_mismatch,
        not_projector,
        time_order,
        not_orthogonal,
        incomplete,
        zero_projector,
        evolution_range,
    };

    Kind kind;
    std::vector<NodeId> nodes;
    std::string message;
};

const char* to_string(Violation::Kind kind);

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool has(Violation::Kind kind) const noexcept;
    // One line per violation: "<kind> [ids]: message".
    std::string to_string() const;
};

class InvalidFamilyError : public Error {
public:
    explicit InvalidFamilyError(ValidationReport report);
    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

// A finite branching structure with times and projector assignments, plus
// the initial state and dynamics. Persistent value: extend() returns a new
// family and never touches the receiver.
class BranchingFamily {
public:
    static BranchingFamily create(std::size_t dim, double root_time, DensityMatrix rho, EvolutionProvider evolution);
    // rho = I/dim.
    static BranchingFamily create(std::size_t dim, double root_time, EvolutionProvider evolution);

    // Hand-assembled family, kept in the given node order. Nothing is checked
    // beyond what is needed to index the nodes; run validate() before use.
    static BranchingFamily assemble(std::size_t dim, std::vector<Moment> moments, DensityMatrix rho,
                                    EvolutionProvider evolution);

    // Adds one child per decomposition member below the maximal node `leaf`.
    // Child times may differ from each other but must exceed the leaf's time.
    BranchingFamily extend(NodeId leaf, const Decomposition& decomposition,
                           std::span<const double> child_times) const;

    std::size_t dim() const noexcept { return dim_; }
    const DensityMatrix& initial_state() const noexcept { return rho_; }
    const EvolutionProvider& evolution() const noexcept { return evolution_; }

    // Moments in insertion order.
    std::size_t size() const noexcept { return moments_.size(); }
    const Moment& moment(std::size_t i) const { return *moments_[i]; }
    const Moment* find(NodeId id) const;
    const Moment& at(NodeId id) const;

    std::span<const NodeId> children(NodeId id) const;
    bool is_leaf(NodeId id) const { return children(id).empty(); }
    // Depth-first, children in insertion order. Fixes the history index α.
    std::vector<NodeId> leaves() const;
    // Root-to-node path, root first.
    std::vector<NodeId> path_to(NodeId id) const;

private:
    BranchingFamily(std::size_t dim, DensityMatrix rho, EvolutionProvider evolution)
        : dim_(dim), rho_(std::move(rho)), evolution_(std::move(evolution)) {}

    void index(std::shared_ptr<const Moment> m);

    std::size_t dim_;
    DensityMatrix rho_;
    EvolutionProvider evolution_;
    std::vector<std::shared_ptr<const Moment>> moments_;
    std::unordered_map<std::uint32_t, std::size_t> by_id_;
    std::unordered_map<std::uint32_t, std::vector<NodeId>> children_;
    std::optional<NodeId> root_;
    std::uint32_t next_id_ = 0;
};

ValidationReport validate(const BranchingFamily& family, double tol = kDefaultTol,
                          ZeroProjectors zeros = ZeroProjectors::reject);

// Throws InvalidFamilyError when validate() reports anything.
void require_valid(const BranchingFamily& family, double tol = kDefaultTol);

// History for the path root → leaf: [(τ(m₀), P(m₁)), …, (τ(m_{k-1}), P(m_k))].
HistorySequence history_of(const BranchingFamily& family, NodeId leaf);

// One sequence per leaf in leaves() order. Refuses invalid families.
std::vector<HistorySequence> histories(const BranchingFamily& family);

// Symmetric tree for a product family: every node at depth i gets the full
// decomposition i+1 as children. Leaves get time t_n + 1.
BranchingFamily from_product(std::size_t dim, std::span<const double> times,
                             std::span<const Decomposition> decompositions, DensityMatrix rho,
                             EvolutionProvider evolution);

// True iff all nodes at equal depth share their time and carry child
// projector lists equal within tol.
bool is_product_shaped(const BranchingFamily& family, double tol = kDefaultTol);

// Free-standing sequences sharing an initial state and dynamics, e.g. a
// homogeneous HPO family that is not a branching family.
struct HistoryList {
    std::size_t dim;
    DensityMatrix rho;
    EvolutionProvider evolution;
    std::vector<HistorySequence> histories;
};

// Rebuilds a branching family whose histories are exactly `list`, grouping
// by shared prefixes. Returns nullopt when no such family exists: distinct
// projectors at a branching point do not form a decomposition, branch
// times disagree, or one history is a prefix of another.
std::optional<BranchingFamily> to_branching_family(const HistoryList& list, double tol = kDefaultTol);

}  // namespace branchhist

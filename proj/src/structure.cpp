#include "branchhist/structure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_set>

#include "branchhist/format.hpp"

namespace branchhist {

std::string to_string(NodeId id) { return "m" + std::to_string(id.value); }

HistorySequence::HistorySequence(std::size_t dim, std::vector<HistoryStep> steps)
    : dim_(dim), steps_(std::move(steps)) {
    if (dim_ == 0) throw DimensionError("history sequence: dim must be positive");
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        if (steps_[i].projector.dim() != dim_) throw DimensionError("history sequence: projector dimension mismatch");
        if (!std::isfinite(steps_[i].time)) throw InvariantError("history sequence: non-finite time");
        if (i > 0 && !(steps_[i - 1].time < steps_[i].time)) {
            throw InvariantError("history sequence: times must be strictly increasing");
        }
    }
}

const char* to_string(Violation::Kind kind) {
    switch (kind) {
        case Violation::Kind::no_root: return "no_root";
        case Violation::Kind::multiple_roots: return "multiple_roots";
        case Violation::Kind::root_id: return "root_id";
        case Violation::Kind::duplicate_id: return "duplicate_id";
        case Violation::Kind::dangling_parent: return "dangling_parent";
        case Violation::Kind::unreachable: return "unreachable";
        case Violation::Kind::root_projector: return "root_projector";
        case Violation::Kind::missing_projector: return "missing_projector";
        case Violation::Kind::dimension_mismatch: return "dimension_mismatch";
        case Violation::Kind::not_projector: return "not_projector";
        case Violation::Kind::time_order: return "time_order";
        case Violation::Kind::not_orthogonal: return "not_orthogonal";
        case Violation::Kind::incomplete: return "incomplete";
        case Violation::Kind::zero_projector: return "zero_projector";
        case Violation::Kind::evolution_range: return "evolution_range";
    }
    return "unknown";
}

bool ValidationReport::has(Violation::Kind kind) const noexcept {
    return std::any_of(violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& v : violations) {
        os << branchhist::to_string(v.kind) << " [";
        for (std::size_t i = 0; i < v.nodes.size(); ++i) os << (i ? "," : "") << branchhist::to_string(v.nodes[i]);
        os << "]: " << v.message << '\n';
    }
    return os.str();
}

InvalidFamilyError::InvalidFamilyError(ValidationReport report)
    : Error("invalid branching family:\n" + report.to_string()), report_(std::move(report)) {}

// ---------------------------------------------------------------------------

BranchingFamily BranchingFamily::create(std::size_t dim, double root_time, DensityMatrix rho,
                                        EvolutionProvider evolution) {
    if (dim == 0) throw DimensionError("family dimension must be positive");
    if (rho.dim() != dim) throw DimensionError("initial state dimension differs from family dimension");
    if (evolution.dim() != dim) throw DimensionError("evolution dimension differs from family dimension");
    if (!std::isfinite(root_time)) throw InvariantError("root time must be finite");
    BranchingFamily f(dim, std::move(rho), std::move(evolution));
    f.index(std::make_shared<const Moment>(Moment{NodeId::root(), std::nullopt, root_time, std::nullopt}));
    return f;
}

BranchingFamily BranchingFamily::create(std::size_t dim, double root_time, EvolutionProvider evolution) {
    return create(dim, root_time, DensityMatrix::maximally_mixed(dim), std::move(evolution));
}

BranchingFamily BranchingFamily::assemble(std::size_t dim, std::vector<Moment> moments, DensityMatrix rho,
                                          EvolutionProvider evolution) {
    BranchingFamily f(dim, std::move(rho), std::move(evolution));
    for (auto& m : moments) f.index(std::make_shared<const Moment>(std::move(m)));
    return f;
}

void BranchingFamily::index(std::shared_ptr<const Moment> m) {
    const auto pos = moments_.size();
    by_id_.try_emplace(m->id.value, pos);
    if (m->parent) {
        children_[m->parent->value].push_back(m->id);
    } else if (!root_) {
        root_ = m->id;
    }
    next_id_ = std::max(next_id_, m->id.value + 1);
    moments_.push_back(std::move(m));
}

BranchingFamily BranchingFamily::extend(NodeId leaf, const Decomposition& decomposition,
                                        std::span<const double> child_times) const {
    const Moment& parent = at(leaf);
    if (!is_leaf(leaf)) throw InvariantError("extend: " + to_string(leaf) + " is not a maximal node");
    if (decomposition.dim() != dim_) throw DimensionError("extend: decomposition dimension differs from family");
    if (child_times.size() != decomposition.size()) {
        throw DimensionError("extend: need exactly one child time per decomposition member");
    }
    for (double t : child_times) {
        if (!std::isfinite(t) || !(t > parent.time)) {
            throw InvariantError("extend: child time " + format_real(t) + " does not exceed parent time " +
                                 format_real(parent.time));
        }
    }
    BranchingFamily out = *this;
    for (std::size_t i = 0; i < decomposition.size(); ++i) {
        out.index(std::make_shared<const Moment>(
            Moment{NodeId{out.next_id_}, leaf, child_times[i], decomposition[i].matrix()}));
    }
    return out;
}

const Moment* BranchingFamily::find(NodeId id) const {
    const auto it = by_id_.find(id.value);
    return it == by_id_.end() ? nullptr : moments_[it->second].get();
}

const Moment& BranchingFamily::at(NodeId id) const {
    if (const auto* m = find(id)) return *m;
    throw Error("no node " + to_string(id) + " in family");
}

std::span<const NodeId> BranchingFamily::children(NodeId id) const {
    const auto it = children_.find(id.value);
    if (it == children_.end()) return {};
    return it->second;
}

std::vector<NodeId> BranchingFamily::leaves() const {
    std::vector<NodeId> out;
    if (!root_) return out;
    std::unordered_set<std::uint32_t> seen;
    std::vector<NodeId> stack{*root_};
    while (!stack.empty()) {
        const NodeId n = stack.back();
        stack.pop_back();
        if (!seen.insert(n.value).second) continue;
        const auto kids = children(n);
        if (kids.empty()) out.push_back(n);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

std::vector<NodeId> BranchingFamily::path_to(NodeId id) const {
    std::vector<NodeId> path{id};
    const Moment* m = &at(id);
    while (m->parent) {
        if (path.size() > moments_.size()) throw Error("path_to: parent relation has a cycle");
        path.push_back(*m->parent);
        m = &at(*m->parent);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

// ---------------------------------------------------------------------------

ValidationReport validate(const BranchingFamily& family, double tol, ZeroProjectors zeros) {
    using K = Violation::Kind;
    ValidationReport report;
    auto add = [&](K kind, std::vector<NodeId> nodes, std::string msg) {
        report.violations.push_back(Violation{kind, std::move(nodes), std::move(msg)});
    };
    const auto d = static_cast<Eigen::Index>(family.dim());

    if (family.initial_state().dim() != family.dim()) {
        add(K::dimension_mismatch, {}, "initial state dimension differs from family dimension");
    }
    if (family.evolution().dim() != family.dim()) {
        add(K::dimension_mismatch, {}, "evolution dimension differs from family dimension");
    }

    std::vector<NodeId> roots;
    std::map<std::uint32_t, std::size_t> id_count;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const Moment& m = family.moment(i);
        ++id_count[m.id.value];
        if (!std::isfinite(m.time)) add(K::time_order, {m.id}, "time is not finite");
        if (!m.parent) {
            roots.push_back(m.id);
            if (m.projector) add(K::root_projector, {m.id}, "root carries a projector");
            continue;
        }
        if (!family.find(*m.parent)) {
            add(K::dangling_parent, {m.id, *m.parent}, "parent does not exist");
        }
        if (!m.projector) {
            add(K::missing_projector, {m.id}, "non-root node carries no projector");
        } else if (m.projector->rows() != d || m.projector->cols() != d) {
            add(K::dimension_mismatch, {m.id}, "projector is not " + std::to_string(d) + "x" + std::to_string(d));
        } else if (!is_projector(*m.projector, tol)) {
            add(K::not_projector, {m.id}, "P·P = P† = P fails");
        }
    }
    for (const auto& [id, count] : id_count) {
        if (count > 1) add(K::duplicate_id, {NodeId{id}}, "id used by " + std::to_string(count) + " nodes");
    }
    if (roots.empty()) add(K::no_root, {}, "no node without parent");
    if (roots.size() > 1) add(K::multiple_roots, roots, "more than one node without parent");
    if (roots.size() == 1 && roots.front() != NodeId::root()) {
        add(K::root_id, roots, "root must have id " + to_string(NodeId::root()));
    }
    if (!report.ok()) return report;

    // Reachability from the root; anything left over sits on a cycle.
    std::unordered_set<std::uint32_t> reached;
    std::vector<NodeId> stack{roots.front()};
    while (!stack.empty()) {
        const NodeId n = stack.back();
        stack.pop_back();
        if (!reached.insert(n.value).second) continue;
        for (NodeId c : family.children(n)) stack.push_back(c);
    }
    for (std::size_t i = 0; i < family.size(); ++i) {
        const Moment& m = family.moment(i);
        if (!reached.count(m.id.value)) add(K::unreachable, {m.id}, "not reachable from the root");
    }
    if (!report.ok()) return report;

    for (std::size_t i = 0; i < family.size(); ++i) {
        const Moment& m = family.moment(i);
        const auto kids = family.children(m.id);
        if (kids.empty()) continue;
        if (!family.evolution().covers(m.time)) {
            add(K::evolution_range, {m.id}, "evolution provides no propagator at t=" + format_real(m.time));
        }
        ComplexMatrix sum = ComplexMatrix::Zero(d, d);
        bool usable = true;
        for (std::size_t a = 0; a < kids.size(); ++a) {
            const Moment& ca = family.at(kids[a]);
            if (!(m.time < ca.time)) {
                add(K::time_order, {m.id, ca.id},
                    "child time " + format_real(ca.time) + " does not exceed parent time " + format_real(m.time));
            }
            if (!ca.projector || ca.projector->rows() != d || ca.projector->cols() != d) {
                usable = false;
                continue;
            }
            if (zeros == ZeroProjectors::reject && max_abs(*ca.projector) <= tol) {
                add(K::zero_projector, {ca.id}, "zero projector in a decomposition");
            }
            sum += *ca.projector;
            for (std::size_t b = a + 1; b < kids.size(); ++b) {
                const Moment& cb = family.at(kids[b]);
                if (!cb.projector || cb.projector->rows() != d || cb.projector->cols() != d) continue;
                if (max_abs(*ca.projector * *cb.projector) > tol) {
                    add(K::not_orthogonal, {ca.id, cb.id}, "sibling projectors are not orthogonal");
                }
            }
        }
        if (usable && max_abs(sum - ComplexMatrix::Identity(d, d)) > tol) {
            add(K::incomplete, {m.id}, "child projectors do not sum to the identity");
        }
    }
    return report;
}

void require_valid(const BranchingFamily& family, double tol) {
    auto report = validate(family, tol);
    if (!report.ok()) throw InvalidFamilyError(std::move(report));
}

namespace {

HistorySequence path_history(const BranchingFamily& family, NodeId leaf) {
    const auto path = family.path_to(leaf);
    std::vector<HistoryStep> steps;
    steps.reserve(path.size() - 1);
    for (std::size_t i = 1; i < path.size(); ++i) {
        const Moment& prev = family.at(path[i - 1]);
        const Moment& cur = family.at(path[i]);
        steps.push_back(HistoryStep{prev.time, Projector(*cur.projector)});
    }
    return HistorySequence(family.dim(), std::move(steps));
}

}  // namespace

HistorySequence history_of(const BranchingFamily& family, NodeId leaf) {
    require_valid(family);
    if (!family.is_leaf(leaf)) throw Error("history_of: " + to_string(leaf) + " is not a leaf");
    return path_history(family, leaf);
}

std::vector<HistorySequence> histories(const BranchingFamily& family) {
    require_valid(family);
    std::vector<HistorySequence> out;
    for (NodeId leaf : family.leaves()) out.push_back(path_history(family, leaf));
    return out;
}

BranchingFamily from_product(std::size_t dim, std::span<const double> times,
                             std::span<const Decomposition> decompositions, DensityMatrix rho,
                             EvolutionProvider evolution) {
    if (times.empty() || times.size() != decompositions.size()) {
        throw DimensionError("from_product: need one time per decomposition (at least one)");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || (i > 0 && !(times[i - 1] < times[i]))) {
            throw InvariantError("from_product: times must be finite and strictly increasing");
        }
    }
    const double t_star = times.back() + 1.0;
    auto family = BranchingFamily::create(dim, times.front(), std::move(rho), std::move(evolution));
    std::vector<NodeId> frontier{NodeId::root()};
    for (std::size_t i = 0; i < decompositions.size(); ++i) {
        const double child_time = i + 1 < times.size() ? times[i + 1] : t_star;
        const std::vector<double> child_times(decompositions[i].size(), child_time);
        std::vector<NodeId> next;
        for (NodeId n : frontier) {
            family = family.extend(n, decompositions[i], child_times);
            const auto kids = family.children(n);
            next.insert(next.end(), kids.begin(), kids.end());
        }
        frontier = std::move(next);
    }
    return family;
}

bool is_product_shaped(const BranchingFamily& family, double tol) {
    require_valid(family, tol);
    std::vector<NodeId> level{NodeId::root()};
    while (!level.empty()) {
        const Moment& first = family.at(level.front());
        const auto ref = family.children(level.front());
        std::vector<NodeId> next;
        for (NodeId n : level) {
            const Moment& m = family.at(n);
            if (m.time != first.time) return false;
            const auto kids = family.children(n);
            if (kids.size() != ref.size()) return false;
            for (std::size_t i = 0; i < kids.size(); ++i) {
                if (max_abs(*family.at(kids[i]).projector - *family.at(ref[i]).projector) > tol) return false;
            }
            next.insert(next.end(), kids.begin(), kids.end());
        }
        level = std::move(next);
    }
    return true;
}

}  // namespace branchhist

namespace branchhist {

namespace {

using Group = std::vector<const HistorySequence*>;

// Grows the subtree below `node` for the sequences in `group`, which all
// share their first `depth` steps. Returns false when no tree exists.
bool grow(BranchingFamily& family, NodeId node, const Group& group, std::size_t depth, double tol) {
    if (group.size() == 1 && group.front()->size() == depth) return true;
    for (const auto* s : group) {
        if (s->size() <= depth) return false;  // a history that is a prefix of another
    }
    const double t = (*group.front())[depth].time;
    if (t != family.at(node).time) return false;

    std::vector<ComplexMatrix> projectors;
    std::vector<Group> parts;
    for (const auto* s : group) {
        const ComplexMatrix& p = (*s)[depth].projector.matrix();
        auto it = std::find_if(projectors.begin(), projectors.end(),
                               [&](const ComplexMatrix& q) { return max_abs(p - q) <= tol; });
        if (it == projectors.end()) {
            projectors.push_back(p);
            parts.push_back({s});
        } else {
            parts[static_cast<std::size_t>(it - projectors.begin())].push_back(s);
        }
    }
    if (!is_decomposition(projectors, tol)) return false;

    std::vector<double> child_times;
    for (const auto& part : parts) {
        const auto* s = part.front();
        const double next = s->size() > depth + 1 ? (*s)[depth + 1].time : t + 1.0;
        for (const auto* other : part) {
            const double other_next = other->size() > depth + 1 ? (*other)[depth + 1].time : t + 1.0;
            if (other_next != next) return false;
        }
        child_times.push_back(next);
    }
    family = family.extend(node, Decomposition(std::move(projectors), tol), child_times);
    const std::vector<NodeId> kids(family.children(node).begin(), family.children(node).end());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!grow(family, kids[i], parts[i], depth + 1, tol)) return false;
    }
    return true;
}

}  // namespace

std::optional<BranchingFamily> to_branching_family(const HistoryList& list, double tol) {
    if (list.histories.empty()) return std::nullopt;
    for (const auto& s : list.histories) {
        if (s.dim() != list.dim) throw DimensionError("to_branching_family: dimension mismatch");
    }
    const auto& first = list.histories.front();
    const double root_time = first.empty() ? 0.0 : first[0].time;
    auto family = BranchingFamily::create(list.dim, root_time, list.rho, list.evolution);
    Group all;
    for (const auto& s : list.histories) all.push_back(&s);
    if (!grow(family, NodeId::root(), all, 0, tol)) return std::nullopt;
    if (!validate(family, tol).ok()) return std::nullopt;
    return family;
}

}  // namespace branchhist

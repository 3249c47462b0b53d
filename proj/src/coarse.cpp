#include "branchhist/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "branchhist/errors.hpp"

namespace branchhist {

double event_probability(const WeightTable& table, std::span<const std::size_t> subset) {
    std::vector<std::size_t> idx(subset.begin(), subset.end());
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    double mu = 0.0;
    for (std::size_t i : idx) {
        if (i >= table.size()) {
            throw DimensionError("event_probability: history index " + std::to_string(i) + " out of range");
        }
        mu += table.weights[i];
    }
    return mu;
}

HistorySequence intra_branch_sum(const BranchingFamily& family, NodeId leaf_a, NodeId leaf_b) {
    require_valid(family);
    if (leaf_a == leaf_b) throw SummationError("intra_branch_sum: a history cannot be summed with itself");
    for (NodeId n : {leaf_a, leaf_b}) {
        if (!family.is_leaf(n)) throw SummationError("intra_branch_sum: " + to_string(n) + " is not a leaf");
    }
    const Moment& a = family.at(leaf_a);
    const Moment& b = family.at(leaf_b);
    if (a.parent != b.parent) {
        throw TransBranchError("trans-branch sum undefined: " + to_string(leaf_a) + " and " + to_string(leaf_b) +
                               " do not share their last branching node");
    }
    const HistorySequence prefix = history_of(family, leaf_a);
    std::vector<HistoryStep> steps(prefix.steps().begin(), prefix.steps().end());
    steps.back().projector = Projector(*a.projector + *b.projector);
    return HistorySequence(family.dim(), std::move(steps));
}

bool verify_intra_additivity(const BranchingFamily& family, NodeId leaf_a, NodeId leaf_b, double tol) {
    const HistorySequence sum = intra_branch_sum(family, leaf_a, leaf_b);
    const auto& evo = family.evolution();
    const auto& rho = family.initial_state();
    const double w_sum = weight(sum, evo, rho);
    const double w_a = weight(history_of(family, leaf_a), evo, rho);
    const double w_b = weight(history_of(family, leaf_b), evo, rho);
    return std::abs(w_sum - w_a - w_b) <= tol;
}

HistorySequence product_sum(const HistorySequence& a, const HistorySequence& b, double tol) {
    if (a.dim() != b.dim()) throw DimensionError("product_sum: dimension mismatch");
    if (a.size() != b.size()) throw SummationError("product_sum: sequences have different lengths");
    std::vector<std::size_t> differing;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].time != b[i].time) throw SummationError("product_sum: sequences are not defined at the same times");
        if (max_abs(a[i].projector.matrix() - b[i].projector.matrix()) > tol) differing.push_back(i);
    }
    if (differing.size() != 1) {
        throw SummationError("product_sum: sequences differ at " + std::to_string(differing.size()) +
                             " positions, need exactly one");
    }
    const std::size_t j = differing.front();
    const ComplexMatrix& pa = a[j].projector.matrix();
    const ComplexMatrix& pb = b[j].projector.matrix();
    if (max_abs(pa * pb) > tol) {
        throw SummationError("product_sum: differing projectors are not orthogonal, their sum is no projector");
    }
    std::vector<HistoryStep> steps(a.steps().begin(), a.steps().end());
    steps[j].projector = Projector(pa + pb);
    return HistorySequence(a.dim(), std::move(steps));
}

AdditivityCheck verify_product_additivity(const HistorySequence& a, const HistorySequence& b,
                                          const EvolutionProvider& evolution, const DensityMatrix& rho,
                                          double tol) {
    const HistorySequence sum = product_sum(a, b, tol);
    const double discrepancy =
        weight(sum, evolution, rho) - weight(a, evolution, rho) - weight(b, evolution, rho);
    return AdditivityCheck{std::abs(discrepancy) <= tol, discrepancy};
}

}  // namespace branchhist

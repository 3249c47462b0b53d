#pragma once

#include <cstddef>
#include <span>

#include "branchhist/chain.hpp"
#include "branchhist/structure.hpp"

namespace branchhist {

// μ of a set of histories: the sum of their weights, taken in increasing
// index order. Duplicate indices count once.
double event_probability(const WeightTable& table, std::span<const std::size_t> subset);

// Sum of two sibling leaves: the shared prefix followed by P_a + P_b.
// Leaves with different parents throw TransBranchError; there is no single
// history for such a sum.
HistorySequence intra_branch_sum(const BranchingFamily& family, NodeId leaf_a, NodeId leaf_b);

// |W(sum) - W(a) - W(b)| <= tol for sibling leaves a, b.
bool verify_intra_additivity(const BranchingFamily& family, NodeId leaf_a, NodeId leaf_b,
                             double tol = kDefaultTol);

// Product-family sum: the sequences must share times and agree (within tol)
// everywhere except one position, where the two projectors must be
// orthogonal. Anything else throws SummationError.
HistorySequence product_sum(const HistorySequence& a, const HistorySequence& b, double tol = kDefaultTol);

struct AdditivityCheck {
    bool additive;
    // W(sum) - W(a) - W(b).
    double discrepancy;
};

AdditivityCheck verify_product_additivity(const HistorySequence& a, const HistorySequence& b,
                                          const EvolutionProvider& evolution, const DensityMatrix& rho,
                                          double tol = kDefaultTol);

}  // namespace branchhist

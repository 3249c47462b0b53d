#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "branchhist/dynamics.hpp"
#include "branchhist/linalg.hpp"
#include "branchhist/structure.hpp"

namespace branchhist {

struct ChainOperator {
    ComplexMatrix matrix;
    // Index of the history in the family's leaf order, when known.
    std::optional<std::size_t> history;
};

// Weights in leaf order, paired with the leaf each history ends at (empty
// when the weights come from free-standing sequences).
struct WeightTable {
    std::vector<double> weights;
    std::vector<NodeId> leaves;

    std::size_t size() const noexcept { return weights.size(); }
    // Left-to-right in index order.
    double sum() const noexcept;
};

// D_αβ = <K_α, K_β>_ρ.
class DecoherenceMatrix {
public:
    explicit DecoherenceMatrix(ComplexMatrix entries) : d_(std::move(entries)) {}

    std::size_t size() const noexcept { return static_cast<std::size_t>(d_.rows()); }
    const ComplexMatrix& entries() const noexcept { return d_; }
    Complex operator()(std::size_t a, std::size_t b) const {
        return d_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
    // Real parts of the diagonal.
    std::vector<double> diagonal() const;

private:
    ComplexMatrix d_;
};

// K with K† = P¹·T(t₁,t₂)·P²·…·Pⁿ, built step by step:
// K = P₁, then K ← P_i · propagator(t_{i-1} → t_i) · K.
// The empty sequence gives the identity.
ComplexMatrix chain_operator(const HistorySequence& seq, const EvolutionProvider& evolution);

// Tr[ρ K† K]. Negative values above -tol are clamped to zero; anything lower,
// or an imaginary part beyond tol, is an InvariantError.
double weight(const HistorySequence& seq, const EvolutionProvider& evolution, const DensityMatrix& rho,
              double tol = kDefaultTol);

// Same, from an already computed chain operator.
double weight_of(const ComplexMatrix& chain, const DensityMatrix& rho, double tol = kDefaultTol);

// K ρ K†, unnormalized; its trace is the weight.
ComplexMatrix evolved_state(const HistorySequence& seq, const EvolutionProvider& evolution,
                            const DensityMatrix& rho);

std::vector<ChainOperator> chain_operators(const BranchingFamily& family);

WeightTable weight_table(const BranchingFamily& family, double tol = kDefaultTol);
WeightTable weight_table(std::span<const HistorySequence> seqs, const EvolutionProvider& evolution,
                         const DensityMatrix& rho, double tol = kDefaultTol);

DecoherenceMatrix decoherence_matrix(std::span<const HistorySequence> seqs, const EvolutionProvider& evolution,
                                     const DensityMatrix& rho);
DecoherenceMatrix decoherence_matrix(const BranchingFamily& family);

// Medium consistency: every off-diagonal |D_αβ| <= tol.
bool is_consistent(const DecoherenceMatrix& d, double tol = kDefaultTol);
// Weak consistency: every off-diagonal |Re D_αβ| <= tol.
bool is_weakly_consistent(const DecoherenceMatrix& d, double tol = kDefaultTol);

// No step projector is zero, yet the chain operator vanishes.
bool is_dynamically_impossible(const HistorySequence& seq, const EvolutionProvider& evolution,
                               double tol = kDefaultTol);

}  // namespace branchhist

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "branchhist/chain.hpp"
#include "branchhist/structure.hpp"

namespace branchhist {

// History spaces above this dimension (d^n) are refused; the dense
// history-space operators would not fit desk-scale memory.
inline constexpr std::size_t kMaxHistorySpaceDim = 1024;

// Relative threshold on the second operator-Schmidt singular value.
inline constexpr double kSchmidtRankTol = 1e-7;

// A projector on the n-fold tensor product of the d-dimensional system space.
class HistoryProjector {
public:
    HistoryProjector(ComplexMatrix m, std::size_t slot_dim, std::vector<double> slot_times,
                     double tol = kDefaultTol);

    const ComplexMatrix& matrix() const noexcept { return m_; }
    std::size_t slot_dim() const noexcept { return slot_dim_; }
    std::size_t slots() const noexcept { return times_.size(); }
    const std::vector<double>& slot_times() const noexcept { return times_; }

private:
    ComplexMatrix m_;
    std::size_t slot_dim_;
    std::vector<double> times_;
};

// P¹ ⊗ P² ⊗ … ⊗ Pⁿ with slot times = step times.
HistoryProjector embed(const HistorySequence& seq);

// Embeds every sequence. All sequences must share their times exactly,
// otherwise NotEmbeddableError: a history space fixes n global times.
std::vector<HistoryProjector> embed_all(std::span<const HistorySequence> seqs);

// Pairwise orthogonal and summing to the history-space identity.
// Throws DimensionError when members disagree on slots or times.
bool is_hpo_family(std::span<const HistoryProjector> members, double tol = kDefaultTol);

class HPOFamily {
public:
    // Throws InvariantError unless is_hpo_family(members, tol).
    explicit HPOFamily(std::vector<HistoryProjector> members, double tol = kDefaultTol);

    std::size_t size() const noexcept { return members_.size(); }
    const HistoryProjector& operator[](std::size_t i) const { return members_[i]; }
    std::span<const HistoryProjector> members() const noexcept { return members_; }

private:
    std::vector<HistoryProjector> members_;
};

// Σ π_α Y^α with π_α ∈ {0, 1}: the literal matrix sum, which is again a
// history projector but usually not a homogeneous one.
HistoryProjector sum_hpo(const HPOFamily& family, std::span<const int> selector);

// Whether y factors into an n-fold tensor product of d x d projectors.
// Operator-Schmidt rank across (first slot | rest) must be one, then the
// same test recurses on the remaining factor.
bool is_homogeneous(const HistoryProjector& y, double rel_tol = kSchmidtRankTol);

// Σ over selected α, β of D_αβ: the quadratic-form value of the weight on a
// sum of histories. Throws InvariantError if the result is not real within tol.
double extended_weight(const DecoherenceMatrix& d, std::span<const int> selector, double tol = kDefaultTol);

struct IshamCounterexample {
    HistoryList histories;
    HPOFamily family;
    WeightTable weights;
};

// The two-time homogeneous family whose weights are 1/4, 1/4, 1, 0.
IshamCounterexample isham_counterexample();

}  // namespace branchhist

#pragma once

#include <string>
#include <vector>

#include "branchhist/structure.hpp"

// Fixed example families. Qubit bases: φ = |0>, ψ = |1>, χ = |+>, χ' = |->;
// the Hadamard-basis projectors are stored with exact entries ±1/2.
namespace branchhist::builtin {

ComplexMatrix plus_projector();   // |+><+|
ComplexMatrix minus_projector();  // |-><-|

// Root with two branches at different times; the first branch splits three
// ways (qutrit Fourier basis), the second two ways. Eight nodes, five
// histories. Trivial dynamics, ρ = |u><u| with u = (1,1,1)/√3.
BranchingFamily fig2();

// Two times t₁ = 0, t₂ = 1. After |0><0| the computational basis is used
// again, after |1><1| the Hadamard basis: branching, not product-shaped.
// ρ = I/2, trivial dynamics.
BranchingFamily branch_no_prod();

// h₁ = χ⊙ψ, h₂ = χ'⊙ψ, h₃ = φ⊙φ, h₄ = ψ⊙φ at t = 0, 1 with ρ = |φ><φ| and
// trivial dynamics. A homogeneous HPO family whose weights sum to 3/2.
HistoryList isham_histories();

// The same four histories with their time order reversed, ordered so that
// leaf i is the mirror image of h_i. This one is a branching family.
BranchingFamily isham_reversed();

struct NamedFamily {
    std::string name;
    BranchingFamily family;
};

// Product families used to exercise the HPO embedding. Projector entries are
// dyadic so history-space sums are exact.
std::vector<NamedFamily> product_families();

}  // namespace branchhist::builtin

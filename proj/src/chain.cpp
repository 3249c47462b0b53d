#include "branchhist/chain.hpp"

#include <cmath>

#include "branchhist/errors.hpp"
#include "branchhist/format.hpp"

namespace branchhist {

double WeightTable::sum() const noexcept {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

std::vector<double> DecoherenceMatrix::diagonal() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(i, i).real();
    return out;
}

ComplexMatrix chain_operator(const HistorySequence& seq, const EvolutionProvider& evolution) {
    if (evolution.dim() != seq.dim()) throw DimensionError("chain_operator: evolution dimension mismatch");
    if (seq.empty()) return identity(seq.dim());
    ComplexMatrix k = seq[0].projector.matrix();
    for (std::size_t i = 1; i < seq.size(); ++i) {
        const Unitary t = evolution.propagator(seq[i - 1].time, seq[i].time);
        k = seq[i].projector.matrix() * (t.matrix() * k);
    }
    return k;
}

double weight_of(const ComplexMatrix& chain, const DensityMatrix& rho, double tol) {
    const Complex w = hs_inner(rho.matrix(), chain, chain);
    if (std::abs(w.imag()) > tol) throw InvariantError("weight has imaginary part " + format_real(w.imag()));
    if (w.real() < -tol) throw InvariantError("weight is negative: " + format_real(w.real()));
    return w.real() < 0.0 ? 0.0 : w.real();
}

double weight(const HistorySequence& seq, const EvolutionProvider& evolution, const DensityMatrix& rho,
              double tol) {
    if (rho.dim() != seq.dim()) throw DimensionError("weight: initial state dimension mismatch");
    return weight_of(chain_operator(seq, evolution), rho, tol);
}

ComplexMatrix evolved_state(const HistorySequence& seq, const EvolutionProvider& evolution,
                            const DensityMatrix& rho) {
    if (rho.dim() != seq.dim()) throw DimensionError("evolved_state: initial state dimension mismatch");
    const ComplexMatrix k = chain_operator(seq, evolution);
    return k * rho.matrix() * k.adjoint();
}

std::vector<ChainOperator> chain_operators(const BranchingFamily& family) {
    const auto seqs = histories(family);
    std::vector<ChainOperator> out;
    out.reserve(seqs.size());
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        out.push_back(ChainOperator{chain_operator(seqs[i], family.evolution()), i});
    }
    return out;
}

WeightTable weight_table(std::span<const HistorySequence> seqs, const EvolutionProvider& evolution,
                         const DensityMatrix& rho, double tol) {
    WeightTable table;
    table.weights.reserve(seqs.size());
    for (const auto& s : seqs) table.weights.push_back(weight(s, evolution, rho, tol));
    return table;
}

WeightTable weight_table(const BranchingFamily& family, double tol) {
    const auto seqs = histories(family);
    WeightTable table = weight_table(seqs, family.evolution(), family.initial_state(), tol);
    table.leaves = family.leaves();
    return table;
}

DecoherenceMatrix decoherence_matrix(std::span<const HistorySequence> seqs, const EvolutionProvider& evolution,
                                     const DensityMatrix& rho) {
    std::vector<ComplexMatrix> ks;
    ks.reserve(seqs.size());
    for (const auto& s : seqs) {
        if (s.dim() != rho.dim()) throw DimensionError("decoherence_matrix: dimension mismatch");
        ks.push_back(chain_operator(s, evolution));
    }
    const auto n = static_cast<Eigen::Index>(ks.size());
    ComplexMatrix d(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            d(a, b) = hs_inner(rho.matrix(), ks[static_cast<std::size_t>(a)], ks[static_cast<std::size_t>(b)]);
        }
    }
    return DecoherenceMatrix(std::move(d));
}

DecoherenceMatrix decoherence_matrix(const BranchingFamily& family) {
    const auto seqs = histories(family);
    return decoherence_matrix(seqs, family.evolution(), family.initial_state());
}

bool is_consistent(const DecoherenceMatrix& d, double tol) {
    for (std::size_t a = 0; a < d.size(); ++a) {
        for (std::size_t b = 0; b < d.size(); ++b) {
            if (a != b && std::abs(d(a, b)) > tol) return false;
        }
    }
    return true;
}

bool is_weakly_consistent(const DecoherenceMatrix& d, double tol) {
    for (std::size_t a = 0; a < d.size(); ++a) {
        for (std::size_t b = 0; b < d.size(); ++b) {
            if (a != b && std::abs(d(a, b).real()) > tol) return false;
        }
    }
    return true;
}

bool is_dynamically_impossible(const HistorySequence& seq, const EvolutionProvider& evolution, double tol) {
    for (const auto& step : seq.steps()) {
        if (step.projector.is_zero(tol)) return false;
    }
    return max_abs(chain_operator(seq, evolution)) <= tol;
}

}  // namespace branchhist

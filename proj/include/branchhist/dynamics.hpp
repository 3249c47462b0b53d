#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "branchhist/linalg.hpp"

namespace branchhist {

// Unitary time development T supplying the propagators interleaved into
// chain operators. Schrödinger picture; time is a plain real number.
class EvolutionProvider {
public:
    enum class Kind { trivial, hamiltonian, unitary_table };

    struct Trivial {
        std::size_t dim;
    };

    struct ConstantHamiltonian {
        ComplexMatrix hamiltonian;
        // Cached spectral decomposition of the Hermitian part.
        ComplexMatrix eigenvectors;
        Eigen::VectorXd eigenvalues;
    };

    // unitaries[k] maps states at breakpoints[k] to states at breakpoints[k+1].
    struct PiecewiseUnitary {
        std::vector<double> breakpoints;
        std::vector<Unitary> unitaries;
    };

    static EvolutionProvider trivial(std::size_t dim);
    // Throws InvariantError when h is not Hermitian.
    static EvolutionProvider hamiltonian(ComplexMatrix h);
    // Breakpoints strictly increasing, one unitary per interval.
    static EvolutionProvider piecewise(std::vector<double> breakpoints, std::vector<Unitary> unitaries);

    Kind kind() const noexcept;
    std::size_t dim() const noexcept;

    // Maps states at t_from to states at t_to. Backward requests return the
    // adjoint of the forward propagator. PiecewiseUnitary only answers for
    // times that are breakpoints; anything else is a TimeRangeError.
    Unitary propagator(double t_from, double t_to) const;

    // Whether propagator() accepts t as an endpoint.
    bool covers(double t) const noexcept;

    const Trivial* as_trivial() const noexcept { return std::get_if<Trivial>(&impl_); }
    const ConstantHamiltonian* as_hamiltonian() const noexcept {
        return std::get_if<ConstantHamiltonian>(&impl_);
    }
    const PiecewiseUnitary* as_piecewise() const noexcept { return std::get_if<PiecewiseUnitary>(&impl_); }

private:
    using Impl = std::variant<Trivial, ConstantHamiltonian, PiecewiseUnitary>;
    explicit EvolutionProvider(Impl impl) : impl_(std::move(impl)) {}
    Impl impl_;
};

}  // namespace branchhist

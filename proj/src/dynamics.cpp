#include "branchhist/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "branchhist/errors.hpp"

namespace branchhist {

namespace {

std::ptrdiff_t breakpoint_index(const std::vector<double>& bps, double t) {
    const auto it = std::lower_bound(bps.begin(), bps.end(), t);
    if (it == bps.end() || *it != t) return -1;
    return it - bps.begin();
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

EvolutionProvider EvolutionProvider::trivial(std::size_t dim) {
    if (dim == 0) throw DimensionError("trivial evolution: dim must be positive");
    return EvolutionProvider(Trivial{dim});
}

EvolutionProvider EvolutionProvider::hamiltonian(ComplexMatrix h) {
    if (h.rows() != h.cols() || h.rows() == 0) throw DimensionError("hamiltonian must be square");
    if (!is_hermitian(h)) throw InvariantError("hamiltonian is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
    return EvolutionProvider(ConstantHamiltonian{std::move(h), es.eigenvectors(), es.eigenvalues()});
}

EvolutionProvider EvolutionProvider::piecewise(std::vector<double> breakpoints, std::vector<Unitary> unitaries) {
    if (breakpoints.size() < 2) throw DimensionError("unitary table needs at least two breakpoints");
    if (unitaries.size() + 1 != breakpoints.size()) {
        throw DimensionError("unitary table needs exactly one unitary per interval");
    }
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
        if (!std::isfinite(breakpoints[k]) || !(breakpoints[k] < breakpoints[k + 1])) {
            throw InvariantError("unitary table breakpoints must be finite and strictly increasing");
        }
    }
    const std::size_t d = unitaries.front().dim();
    for (const auto& u : unitaries) {
        if (u.dim() != d) throw DimensionError("unitary table: mixed dimensions");
    }
    return EvolutionProvider(PiecewiseUnitary{std::move(breakpoints), std::move(unitaries)});
}

EvolutionProvider::Kind EvolutionProvider::kind() const noexcept {
    return std::visit(overloaded{[](const Trivial&) { return Kind::trivial; },
                                 [](const ConstantHamiltonian&) { return Kind::hamiltonian; },
                                 [](const PiecewiseUnitary&) { return Kind::unitary_table; }},
                      impl_);
}

std::size_t EvolutionProvider::dim() const noexcept {
    return std::visit(
        overloaded{[](const Trivial& t) { return t.dim; },
                   [](const ConstantHamiltonian& h) { return static_cast<std::size_t>(h.hamiltonian.rows()); },
                   [](const PiecewiseUnitary& p) { return p.unitaries.front().dim(); }},
        impl_);
}

bool EvolutionProvider::covers(double t) const noexcept {
    if (const auto* p = as_piecewise()) return breakpoint_index(p->breakpoints, t) >= 0;
    return std::isfinite(t);
}

Unitary EvolutionProvider::propagator(double t_from, double t_to) const {
    return std::visit(
        overloaded{
            [](const Trivial& t) { return Unitary::identity(t.dim); },
            [&](const ConstantHamiltonian& h) {
                const double dt = t_to - t_from;
                ComplexVector phases(h.eigenvalues.size());
                for (Eigen::Index k = 0; k < phases.size(); ++k) {
                    phases(k) = std::exp(Complex(0.0, -h.eigenvalues(k) * dt));
                }
                return Unitary(h.eigenvectors * phases.asDiagonal() * h.eigenvectors.adjoint());
            },
            [&](const PiecewiseUnitary& p) {
                const auto from = breakpoint_index(p.breakpoints, t_from);
                const auto to = breakpoint_index(p.breakpoints, t_to);
                if (from < 0 || to < 0) {
                    throw TimeRangeError("unitary table has no breakpoint at t=" +
                                         std::to_string(from < 0 ? t_from : t_to));
                }
                const auto lo = std::min(from, to);
                const auto hi = std::max(from, to);
                Unitary u = Unitary::identity(p.unitaries.front().dim());
                for (auto k = lo; k < hi; ++k) u = p.unitaries[static_cast<std::size_t>(k)].then_after(u);
                return from <= to ? u : u.adjoint();
            }},
        impl_);
}

}  // namespace branchhist

#include "branchhist/builtin.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace branchhist::builtin {

namespace {

ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    ComplexMatrix m(n, n);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (const auto& x : row) m(i, j++) = x;
        ++i;
    }
    return m;
}

ComplexMatrix zero() { return basis_projector(2, 0); }
ComplexMatrix one() { return basis_projector(2, 1); }

Decomposition computational(std::size_t dim) {
    std::vector<ComplexMatrix> ps;
    for (std::size_t i = 0; i < dim; ++i) ps.push_back(basis_projector(dim, i));
    return Decomposition(std::move(ps));
}

Decomposition hadamard() { return Decomposition({plus_projector(), minus_projector()}); }

std::vector<double> times_of(std::size_t n, double t) { return std::vector<double>(n, t); }

}  // namespace

ComplexMatrix plus_projector() { return from_rows({{0.5, 0.5}, {0.5, 0.5}}); }
ComplexMatrix minus_projector() { return from_rows({{0.5, -0.5}, {-0.5, 0.5}}); }

BranchingFamily fig2() {
    constexpr std::size_t d = 3;
    ComplexVector u = ComplexVector::Ones(d) / std::sqrt(3.0);
    const DensityMatrix rho(ket_projector(u));
    auto f = BranchingFamily::create(d, 0.0, rho, EvolutionProvider::trivial(d));

    const ComplexMatrix p0 = basis_projector(d, 0);
    const ComplexMatrix p12 = basis_projector(d, 1) + basis_projector(d, 2);
    f = f.extend(NodeId::root(), Decomposition({p0, p12}), std::array{1.0, 1.5});
    const NodeId m1 = f.children(NodeId::root())[0];
    const NodeId m2 = f.children(NodeId::root())[1];

    // m1: qutrit Fourier basis.
    std::vector<ComplexMatrix> fourier;
    for (std::size_t k = 0; k < d; ++k) {
        ComplexVector v(d);
        for (std::size_t j = 0; j < d; ++j) {
            v(static_cast<Eigen::Index>(j)) = std::polar(1.0, 2.0 * std::numbers::pi * double(j * k) / double(d));
        }
        fourier.push_back(ket_projector(v));
    }
    f = f.extend(m1, Decomposition(std::move(fourier)), std::array{2.0, 2.0, 2.0});

    // m2: |0><0| + |s><s| and |a><a| with s, a = (|1> ± |2>)/√2.
    ComplexMatrix sym = ComplexMatrix::Zero(d, d);
    sym(1, 1) = sym(1, 2) = sym(2, 1) = sym(2, 2) = 0.5;
    ComplexMatrix anti = sym;
    anti(1, 2) = anti(2, 1) = -0.5;
    f = f.extend(m2, Decomposition({p0 + sym, anti}), std::array{2.5, 2.5});
    return f;
}

BranchingFamily branch_no_prod() {
    auto f = BranchingFamily::create(2, 0.0, EvolutionProvider::trivial(2));
    f = f.extend(NodeId::root(), computational(2), times_of(2, 1.0));
    const NodeId phi1 = f.children(NodeId::root())[0];
    const NodeId phi2 = f.children(NodeId::root())[1];
    f = f.extend(phi1, computational(2), times_of(2, 2.0));
    f = f.extend(phi2, hadamard(), times_of(2, 2.0));
    return f;
}

HistoryList isham_histories() {
    auto seq = [](const ComplexMatrix& first, const ComplexMatrix& second) {
        return HistorySequence(2, {HistoryStep{0.0, Projector(first)}, HistoryStep{1.0, Projector(second)}});
    };
    return HistoryList{2,
                       DensityMatrix(zero()),
                       EvolutionProvider::trivial(2),
                       {seq(plus_projector(), one()), seq(minus_projector(), one()), seq(zero(), zero()),
                        seq(one(), zero())}};
}

BranchingFamily isham_reversed() {
    auto f = BranchingFamily::create(2, 0.0, DensityMatrix(zero()), EvolutionProvider::trivial(2));
    f = f.extend(NodeId::root(), Decomposition({one(), zero()}), times_of(2, 1.0));
    const NodeId psi = f.children(NodeId::root())[0];
    const NodeId phi = f.children(NodeId::root())[1];
    f = f.extend(psi, hadamard(), times_of(2, 2.0));
    f = f.extend(phi, Decomposition({zero(), one()}), times_of(2, 2.0));
    return f;
}

std::vector<NamedFamily> product_families() {
    std::vector<NamedFamily> out;
    {
        const std::array<double, 2> t{0.0, 1.0};
        const std::array<Decomposition, 2> ds{computational(2), hadamard()};
        out.push_back({"qubit-zx", from_product(2, t, ds, DensityMatrix(zero()), EvolutionProvider::trivial(2))});
    }
    {
        const ComplexMatrix sx = from_rows({{0.0, 1.0}, {1.0, 0.0}});
        const std::array<double, 3> t{0.0, 0.5, 1.25};
        const std::array<Decomposition, 3> ds{computational(2), hadamard(), computational(2)};
        out.push_back({"qubit-zxz", from_product(2, t, ds, DensityMatrix::maximally_mixed(2),
                                                 EvolutionProvider::hamiltonian(sx))});
    }
    {
        // Two qubits: parity at t = 0, then the Bell basis at t = 1.
        ComplexMatrix even = basis_projector(4, 0) + basis_projector(4, 3);
        ComplexMatrix odd = basis_projector(4, 1) + basis_projector(4, 2);
        auto bell = [](Eigen::Index a, Eigen::Index b, double sign) {
            ComplexMatrix p = ComplexMatrix::Zero(4, 4);
            p(a, a) = p(b, b) = 0.5;
            p(a, b) = p(b, a) = 0.5 * sign;
            return p;
        };
        const std::array<double, 2> t{0.0, 1.0};
        const std::array<Decomposition, 2> ds{
            Decomposition({even, odd}),
            Decomposition({bell(0, 3, 1.0), bell(0, 3, -1.0), bell(1, 2, 1.0), bell(1, 2, -1.0)})};
        out.push_back({"two-qubit-bell", from_product(4, t, ds, DensityMatrix(basis_projector(4, 1)),
                                                      EvolutionProvider::trivial(4))});
    }
    return out;
}

}  // namespace branchhist::builtin

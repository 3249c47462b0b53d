#include "branchhist/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "branchhist/errors.hpp"

namespace branchhist {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

}  // namespace

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

ComplexMatrix identity(std::size_t dim) {
    return ComplexMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

ComplexMatrix adjoint(const ComplexMatrix& m) { return m.adjoint(); }

ComplexMatrix ket_projector(const ComplexVector& v) {
    const double n2 = v.squaredNorm();
    if (n2 == 0.0) throw InvariantError("ket_projector: zero vector");
    return (v * v.adjoint()) / n2;
}

ComplexMatrix basis_projector(std::size_t dim, std::size_t i) {
    if (i >= dim) throw DimensionError("basis_projector: index out of range");
    ComplexMatrix p = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    return p;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    require_square(m, "is_hermitian");
    return max_abs(m - m.adjoint()) <= tol;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
    require_square(m, "is_unitary");
    return max_abs(m.adjoint() * m - ComplexMatrix::Identity(m.rows(), m.cols())) <= tol;
}

bool is_projector(const ComplexMatrix& m, double tol) {
    require_square(m, "is_projector");
    return max_abs(m * m - m) <= tol && max_abs(m.adjoint() - m) <= tol;
}

bool is_decomposition(std::span<const ComplexMatrix> ps, double tol, ZeroProjectors zeros) {
    if (ps.empty()) throw DimensionError("is_decomposition: empty list");
    const Eigen::Index d = ps.front().rows();
    for (const auto& p : ps) {
        require_square(p, "is_decomposition");
        if (p.rows() != d) throw DimensionError("is_decomposition: mixed dimensions");
    }
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!is_projector(ps[i], tol)) return false;
        if (zeros == ZeroProjectors::reject && max_abs(ps[i]) <= tol) return false;
        for (std::size_t j = i + 1; j < ps.size(); ++j) {
            if (max_abs(ps[i] * ps[j]) > tol) return false;
        }
        sum += ps[i];
    }
    return max_abs(sum - ComplexMatrix::Identity(d, d)) <= tol;
}

Complex hs_inner(const ComplexMatrix& rho, const ComplexMatrix& k1, const ComplexMatrix& k2) {
    if (rho.rows() != rho.cols() || k1.rows() != rho.rows() || k1.cols() != rho.cols() ||
        k2.rows() != rho.rows() || k2.cols() != rho.cols()) {
        throw DimensionError("hs_inner: operands must share one square dimension");
    }
    // Tr[rho·A] = Σ_ij rho_ij A_ji with A = k1†·k2.
    const ComplexMatrix a = k1.adjoint() * k2;
    return rho.cwiseProduct(a.transpose()).sum();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Projector::Projector(ComplexMatrix m, double tol) : m_(std::move(m)) {
    if (!is_projector(m_, tol)) throw InvariantError("matrix is not a projector (P·P = P† = P fails)");
}

std::size_t Projector::rank() const {
    return static_cast<std::size_t>(std::max(0.0, std::round(m_.trace().real())));
}

Decomposition::Decomposition(std::vector<ComplexMatrix> ps, double tol, ZeroProjectors zeros) {
    if (!is_decomposition(ps, tol, zeros)) {
        throw InvariantError("projectors do not form a decomposition of the identity");
    }
    ps_.reserve(ps.size());
    for (auto& p : ps) ps_.emplace_back(std::move(p), tol);
}

DensityMatrix::DensityMatrix(ComplexMatrix m, double tol) : m_(std::move(m)) {
    require_square(m_, "DensityMatrix");
    if (!is_hermitian(m_, tol)) throw InvariantError("density matrix is not Hermitian");
    if (std::abs(m_.trace() - Complex(1.0)) > tol) {
        throw InvariantError("density matrix trace differs from 1");
    }
    const ComplexMatrix herm = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) throw InvariantError("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    if (dim == 0) throw DimensionError("maximally_mixed: dim must be positive");
    return DensityMatrix(identity(dim) / static_cast<double>(dim));
}

Unitary::Unitary(ComplexMatrix m, double tol) : m_(std::move(m)) {
    if (!is_unitary(m_, tol)) throw InvariantError("matrix is not unitary");
}

Unitary Unitary::identity(std::size_t dim) { return Unitary(branchhist::identity(dim), Trusted{}); }

Unitary Unitary::adjoint() const { return Unitary(m_.adjoint(), Trusted{}); }

Unitary Unitary::then_after(const Unitary& other) const {
    if (other.dim() != dim()) throw DimensionError("Unitary product: dimension mismatch");
    return Unitary(m_ * other.m_, Trusted{});
}

Unitary mat_exp_skew(const ComplexMatrix& h, double dt) {
    if (!is_hermitian(h)) throw InvariantError("mat_exp_skew: Hamiltonian is not Hermitian");
    const ComplexMatrix herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm);
    const ComplexMatrix& v = es.eigenvectors();
    ComplexVector phases(v.cols());
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        phases(k) = std::exp(Complex(0.0, -es.eigenvalues()(k) * dt));
    }
    return Unitary(v * phases.asDiagonal() * v.adjoint());
}

}  // namespace branchhist

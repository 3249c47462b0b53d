#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace branchhist {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Tolerance for every algebraic invariant, measured in the max-entry norm.
inline constexpr double kDefaultTol = 1e-9;

double max_abs(const ComplexMatrix& m);
ComplexMatrix identity(std::size_t dim);
ComplexMatrix adjoint(const ComplexMatrix& m);

// |v><v| / <v|v>. Throws InvariantError for the zero vector.
ComplexMatrix ket_projector(const ComplexVector& v);
// |i><i| in the computational basis of a dim-dimensional space.
ComplexMatrix basis_projector(std::size_t dim, std::size_t i);

bool is_hermitian(const ComplexMatrix& m, double tol = kDefaultTol);
bool is_unitary(const ComplexMatrix& m, double tol = kDefaultTol);

// P·P = P and P† = P, both within tol. Throws DimensionError when not square.
bool is_projector(const ComplexMatrix& m, double tol = kDefaultTol);

enum class ZeroProjectors { reject, allow };

// Members are projectors, pairwise orthogonal and sum to the identity.
// Throws DimensionError for an empty list or mixed dimensions.
bool is_decomposition(std::span<const ComplexMatrix> ps, double tol = kDefaultTol,
                      ZeroProjectors zeros = ZeroProjectors::reject);

// Tr[rho · k1† · k2], evaluated without forming the full product.
Complex hs_inner(const ComplexMatrix& rho, const ComplexMatrix& k1, const ComplexMatrix& k2);

// Row-major block convention: (A ⊗ B)[i*rB + k, j*cB + l] = A[i,j]·B[k,l].
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

class Projector {
public:
    explicit Projector(ComplexMatrix m, double tol = kDefaultTol);

    const ComplexMatrix& matrix() const noexcept { return m_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    bool is_zero(double tol = kDefaultTol) const { return max_abs(m_) <= tol; }
    // Dimension of the range, rounded from the trace.
    std::size_t rank() const;

private:
    ComplexMatrix m_;
};

class Decomposition {
public:
    explicit Decomposition(std::vector<ComplexMatrix> ps, double tol = kDefaultTol,
                           ZeroProjectors zeros = ZeroProjectors::reject);

    std::size_t size() const noexcept { return ps_.size(); }
    std::size_t dim() const noexcept { return ps_.front().dim(); }
    const Projector& operator[](std::size_t i) const { return ps_[i]; }
    auto begin() const noexcept { return ps_.begin(); }
    auto end() const noexcept { return ps_.end(); }

private:
    std::vector<Projector> ps_;
};

class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m, double tol = kDefaultTol);
    static DensityMatrix maximally_mixed(std::size_t dim);

    const ComplexMatrix& matrix() const noexcept { return m_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }

private:
    ComplexMatrix m_;
};

class Unitary {
public:
    explicit Unitary(ComplexMatrix m, double tol = kDefaultTol);
    static Unitary identity(std::size_t dim);

    const ComplexMatrix& matrix() const noexcept { return m_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    Unitary adjoint() const;
    // this · other, i.e. other applied first.
    Unitary then_after(const Unitary& other) const;

private:
    struct Trusted {};
    Unitary(ComplexMatrix m, Trusted) : m_(std::move(m)) {}
    ComplexMatrix m_;
};

// exp(-i·H·dt) via the eigendecomposition of the Hermitian H.
// Throws InvariantError when H is not Hermitian within kDefaultTol.
Unitary mat_exp_skew(const ComplexMatrix& h, double dt);

}  // namespace branchhist

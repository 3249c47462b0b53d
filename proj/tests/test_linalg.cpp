#include <doctest.h>

#include <cmath>
#include <numbers>

#include "branchhist/errors.hpp"
#include "branchhist/linalg.hpp"
#include "support/random.hpp"

using namespace branchhist;

namespace {

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

// Truncated exponential series; fine for small ‖H dt‖.
ComplexMatrix taylor_exp(const ComplexMatrix& h, double dt, int terms) {
    const ComplexMatrix a = Complex(0, -dt) * h;
    ComplexMatrix term = ComplexMatrix::Identity(h.rows(), h.cols());
    ComplexMatrix sum = term;
    for (int k = 1; k < terms; ++k) {
        term = term * a / static_cast<double>(k);
        sum += term;
    }
    return sum;
}

}  // namespace

TEST_CASE("exp(-i sz pi) is -I") {
    const Unitary u = mat_exp_skew(pauli_z(), std::numbers::pi);
    CHECK(max_abs(u.matrix() + identity(2)) < 1e-14);
}

TEST_CASE("exp(-i sx pi/2) is -i sx") {
    const Unitary u = mat_exp_skew(pauli_x(), std::numbers::pi / 2);
    CHECK(max_abs(u.matrix() - Complex(0, -1) * pauli_x()) < 1e-14);
}

TEST_CASE("mat_exp_skew agrees with the Taylor series") {
    testsupport::Rng rng(7);
    for (std::size_t d = 1; d <= 5; ++d) {
        for (int rep = 0; rep < 10; ++rep) {
            const ComplexMatrix h = testsupport::random_hermitian(d, rng);
            const double dt = 0.3;
            CHECK(max_abs(mat_exp_skew(h, dt).matrix() - taylor_exp(h, dt, 60)) < 1e-12);
        }
    }
}

TEST_CASE("mat_exp_skew rejects non-Hermitian input") {
    ComplexMatrix m(2, 2);
    m << 0, 1, 0, 0;
    CHECK_THROWS_AS(mat_exp_skew(m, 1.0), InvariantError);
}

TEST_CASE("kron follows the row-major block layout") {
    testsupport::Rng rng(3);
    const ComplexMatrix a = testsupport::random_hermitian(2, rng);
    const ComplexMatrix b = testsupport::random_hermitian(3, rng);
    const ComplexMatrix k = kron(a, b);
    REQUIRE(k.rows() == 6);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q) CHECK(k(i * 3 + p, j * 3 + q) == a(i, j) * b(p, q));
}

TEST_CASE("hs_inner equals the naive trace") {
    testsupport::Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const ComplexMatrix rho = testsupport::random_density(3, rng).matrix();
        const ComplexMatrix k1 = testsupport::haar_unitary(3, rng) * 0.7;
        const ComplexMatrix k2 = testsupport::random_hermitian(3, rng);
        const Complex naive = (rho * k1.adjoint() * k2).trace();
        CHECK(std::abs(hs_inner(rho, k1, k2) - naive) < 1e-12);
    }
}

TEST_CASE("projector predicates") {
    CHECK(is_projector(basis_projector(3, 1)));
    CHECK(is_projector(ComplexMatrix::Zero(2, 2)));
    CHECK_FALSE(is_projector(pauli_x()));
    CHECK_THROWS_AS(is_projector(ComplexMatrix::Zero(2, 3)), DimensionError);
    CHECK_THROWS_AS((void)Projector(pauli_z()), InvariantError);
    CHECK(Projector(basis_projector(4, 0) + basis_projector(4, 2)).rank() == 2);

    ComplexVector v(2);
    v << 1, Complex(0, 1);
    const ComplexMatrix p = ket_projector(v);
    CHECK(is_projector(p));
    CHECK(std::abs(p(0, 1) - Complex(0, -0.5)) < 1e-15);
    CHECK_THROWS_AS(ket_projector(ComplexVector::Zero(2)), InvariantError);
}

TEST_CASE("decompositions") {
    const std::vector<ComplexMatrix> z{basis_projector(2, 0), basis_projector(2, 1)};
    CHECK(is_decomposition(z));
    const std::vector<ComplexMatrix> incomplete{basis_projector(2, 0)};
    CHECK_FALSE(is_decomposition(incomplete));
    const std::vector<ComplexMatrix> overlap{basis_projector(2, 0), identity(2)};
    CHECK_FALSE(is_decomposition(overlap));
    const std::vector<ComplexMatrix> with_zero{identity(2), ComplexMatrix::Zero(2, 2)};
    CHECK_FALSE(is_decomposition(with_zero));
    CHECK(is_decomposition(with_zero, kDefaultTol, ZeroProjectors::allow));
    CHECK_THROWS_AS(is_decomposition(std::span<const ComplexMatrix>{}), DimensionError);
    const std::vector<ComplexMatrix> mixed{basis_projector(2, 0), basis_projector(3, 1)};
    CHECK_THROWS_AS(is_decomposition(mixed), DimensionError);
    CHECK_THROWS_AS((void)Decomposition(incomplete), InvariantError);

    testsupport::Rng rng(5);
    for (std::size_t d = 2; d <= 4; ++d) {
        for (std::size_t k = 1; k <= d; ++k) {
            const Decomposition dec = testsupport::random_decomposition(d, k, rng);
            CHECK(dec.size() == k);
        }
    }
}

TEST_CASE("density matrices") {
    CHECK(DensityMatrix::maximally_mixed(3).matrix().trace().real() == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)DensityMatrix(identity(2)), InvariantError);
    ComplexMatrix neg(2, 2);
    neg << 1.5, 0, 0, -0.5;
    CHECK_THROWS_AS((void)DensityMatrix(neg), InvariantError);
    CHECK_THROWS_AS(DensityMatrix(pauli_x() * 0.5 + identity(2) * 0.5 + Complex(0, 1) * basis_projector(2, 0)),
                    InvariantError);
}

TEST_CASE("unitaries") {
    testsupport::Rng rng(9);
    const Unitary u(testsupport::haar_unitary(4, rng));
    CHECK(is_unitary(u.matrix()));
    CHECK(max_abs(u.then_after(u.adjoint()).matrix() - identity(4)) < 1e-12);
    CHECK_THROWS_AS((void)Unitary(identity(2) * 2.0), InvariantError);
}

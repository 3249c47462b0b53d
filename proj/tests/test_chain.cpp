#include <doctest.h>

#include <cmath>
#include <numbers>

#include "branchhist/builtin.hpp"
#include "branchhist/chain.hpp"
#include "branchhist/errors.hpp"
#include "support/random.hpp"

using namespace branchhist;

namespace {

ComplexMatrix m2(Complex a, Complex b, Complex c, Complex d) {
    ComplexMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

HistorySequence two_step(const ComplexMatrix& p1, double t1, const ComplexMatrix& p2, double t2) {
    return HistorySequence(2, {HistoryStep{t1, Projector(p1)}, HistoryStep{t2, Projector(p2)}});
}

}  // namespace

TEST_CASE("hand-computed chain operators of the four-history example") {
    const HistoryList list = builtin::isham_histories();
    const ComplexMatrix k1 = chain_operator(list.histories[0], list.evolution);
    const ComplexMatrix k2 = chain_operator(list.histories[1], list.evolution);
    CHECK(max_abs(k1 - m2(0, 0, 0.5, 0.5)) == 0.0);
    CHECK(max_abs(k2 - m2(0, 0, -0.5, 0.5)) == 0.0);

    // D12 = Tr[rho K1† K2] by hand: K1† K2 = [[-1/4, 1/4], [-1/4, 1/4]], rho = |0><0|.
    const ComplexMatrix k1dk2 = k1.adjoint() * k2;
    CHECK(max_abs(k1dk2 - m2(-0.25, 0.25, -0.25, 0.25)) == 0.0);

    const DecoherenceMatrix d = decoherence_matrix(list.histories, list.evolution, list.rho);
    CHECK(std::abs(d(0, 1) - Complex(-0.25, 0)) < 1e-15);
    const auto w = weight_table(list.histories, list.evolution, list.rho).weights;
    CHECK(w == std::vector<double>{0.25, 0.25, 1.0, 0.0});
    CHECK_FALSE(is_consistent(d));
    CHECK_FALSE(is_weakly_consistent(d));
}

TEST_CASE("the empty history has the identity as chain operator") {
    const HistorySequence empty(3, {});
    CHECK(max_abs(chain_operator(empty, EvolutionProvider::trivial(3)) - identity(3)) == 0.0);
}

TEST_CASE("weight under sigma-x precession is sin^2") {
    const auto evo = EvolutionProvider::hamiltonian(m2(0, 1, 1, 0));
    const DensityMatrix rho(basis_projector(2, 0));
    for (double dt : {0.1, 0.7, 1.3, 2.9}) {
        const auto h = two_step(basis_projector(2, 0), 1.0, basis_projector(2, 1), 1.0 + dt);
        const double s = std::sin(dt);
        CHECK(weight(h, evo, rho) == doctest::Approx(s * s).epsilon(1e-13));
        CHECK(evolved_state(h, evo, rho).trace().real() == doctest::Approx(s * s).epsilon(1e-13));
        // K = P2 U P1 = -i sin(dt) |1><0|.
        CHECK(max_abs(chain_operator(h, evo) - m2(0, 0, Complex(0, -s), 0)) < 1e-14);
    }
}

TEST_CASE("weights and decoherence matrix agree on random families") {
    testsupport::Rng rng(31);
    for (int i = 0; i < 30; ++i) {
        const auto f = testsupport::random_family(rng);
        const auto table = weight_table(f);
        const auto d = decoherence_matrix(f);
        CHECK(max_abs(d.entries() - d.entries().adjoint()) < 1e-12);
        const auto diag = d.diagonal();
        for (std::size_t a = 0; a < table.size(); ++a) CHECK(std::abs(diag[a] - table.weights[a]) < 1e-12);
        CHECK(std::abs(table.sum() - 1.0) < 1e-9);
        CHECK(table.leaves == f.leaves());
    }
}

TEST_CASE("medium and weak consistency differ on imaginary interference") {
    const DecoherenceMatrix d(m2(0.5, Complex(0, 0.1), Complex(0, -0.1), 0.5));
    CHECK_FALSE(is_consistent(d));
    CHECK(is_weakly_consistent(d));
    CHECK(is_consistent(d, 0.2));
}

TEST_CASE("computational-basis families are consistent") {
    const auto f = builtin::product_families()[0].family;  // Z then X with rho = |0><0|
    CHECK(is_consistent(decoherence_matrix(f)));
}

TEST_CASE("dynamical impossibility") {
    const auto trivial = EvolutionProvider::trivial(2);
    CHECK(is_dynamically_impossible(two_step(basis_projector(2, 0), 0, basis_projector(2, 1), 1), trivial));
    CHECK_FALSE(is_dynamically_impossible(two_step(basis_projector(2, 0), 0, basis_projector(2, 0), 1), trivial));
    CHECK_FALSE(
        is_dynamically_impossible(two_step(ComplexMatrix::Zero(2, 2), 0, basis_projector(2, 1), 1), trivial));

    const auto flip = EvolutionProvider::hamiltonian(m2(0, 1, 1, 0));
    CHECK(is_dynamically_impossible(
        two_step(basis_projector(2, 0), 0, basis_projector(2, 0), std::numbers::pi / 2), flip));
    CHECK_FALSE(is_dynamically_impossible(
        two_step(basis_projector(2, 0), 0, basis_projector(2, 1), std::numbers::pi / 2), flip));
}

TEST_CASE("dimension mismatches are rejected") {
    const auto h = two_step(basis_projector(2, 0), 0, basis_projector(2, 1), 1);
    CHECK_THROWS_AS(chain_operator(h, EvolutionProvider::trivial(3)), DimensionError);
    CHECK_THROWS_AS(weight(h, EvolutionProvider::trivial(2), DensityMatrix::maximally_mixed(3)), DimensionError);
}

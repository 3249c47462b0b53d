#include <doctest.h>

#include <array>

#include "branchhist/builtin.hpp"
#include "branchhist/chain.hpp"
#include "branchhist/errors.hpp"
#include "branchhist/structure.hpp"
#include "support/random.hpp"

using namespace branchhist;

namespace {

Decomposition z_basis() { return Decomposition({basis_projector(2, 0), basis_projector(2, 1)}); }

Moment node(std::uint32_t id, std::optional<std::uint32_t> parent, double t, std::optional<ComplexMatrix> p) {
    Moment m;
    m.id = NodeId{id};
    if (parent) m.parent = NodeId{*parent};
    m.time = t;
    m.projector = std::move(p);
    return m;
}

ValidationReport check(std::vector<Moment> ms, EvolutionProvider evo = EvolutionProvider::trivial(2)) {
    return validate(BranchingFamily::assemble(2, std::move(ms), DensityMatrix::maximally_mixed(2), std::move(evo)));
}

const ComplexMatrix P0 = basis_projector(2, 0);
const ComplexMatrix P1 = basis_projector(2, 1);

}  // namespace

TEST_CASE("a lone root is one empty history") {
    const auto f = BranchingFamily::create(2, 0.0, EvolutionProvider::trivial(2));
    CHECK(validate(f).ok());
    CHECK(f.leaves() == std::vector<NodeId>{NodeId::root()});
    const auto hs = histories(f);
    REQUIRE(hs.size() == 1);
    CHECK(hs[0].empty());
    CHECK(weight_table(f).weights == std::vector<double>{1.0});
}

TEST_CASE("extend is persistent and numbers children in order") {
    const auto f0 = BranchingFamily::create(2, 0.0, EvolutionProvider::trivial(2));
    const auto f1 = f0.extend(NodeId::root(), z_basis(), std::array{1.0, 2.0});
    CHECK(f0.size() == 1);
    CHECK(f1.size() == 3);
    const auto kids = f1.children(NodeId::root());
    REQUIRE(kids.size() == 2);
    CHECK(kids[0] == NodeId{1});
    CHECK(kids[1] == NodeId{2});
    CHECK(f1.at(NodeId{2}).time == 2.0);
    CHECK(f1.path_to(NodeId{2}) == std::vector<NodeId>{NodeId{0}, NodeId{2}});
    CHECK(to_string(NodeId{2}) == "m2");

    CHECK_THROWS_AS(f1.extend(NodeId::root(), z_basis(), std::array{3.0, 3.0}), InvariantError);
    CHECK_THROWS_AS(f1.extend(NodeId{1}, z_basis(), std::array{1.0, 3.0}), InvariantError);
    CHECK_THROWS_AS(f1.extend(NodeId{1}, z_basis(), std::array{3.0}), DimensionError);
    CHECK_THROWS(f1.at(NodeId{9}));
}

TEST_CASE("history of a leaf pairs parent times with child projectors") {
    const auto f = builtin::fig2();
    CHECK(f.size() == 8);
    const auto leaves = f.leaves();
    REQUIRE(leaves.size() == 5);
    const auto h = history_of(f, leaves[4]);
    REQUIRE(h.size() == 2);
    CHECK(h[0].time == 0.0);
    CHECK(h[1].time == 1.5);
    CHECK(h[0].projector.rank() == 2);
    CHECK(h[1].projector.rank() == 1);
    CHECK_THROWS(history_of(f, NodeId::root()));
}

TEST_CASE("validate reports each structural defect") {
    using K = Violation::Kind;
    CHECK(check({node(0, {}, 0, {}), node(1, 0, 1, P0), node(2, 0, 1, P1)}).ok());

    CHECK(check({node(1, 2, 0, P0), node(2, 1, 0, P1)}).has(K::no_root));
    CHECK(check({node(0, {}, 0, {}), node(1, {}, 0, {})}).has(K::multiple_roots));
    CHECK(check({node(3, {}, 0, {})}).has(K::root_id));
    CHECK(check({node(0, {}, 0, {}), node(1, 0, 1, P0), node(1, 0, 1, P1)}).has(K::duplicate_id));
    CHECK(check({node(0, {}, 0, {}), node(1, 7, 1, P0)}).has(K::dangling_parent));
    CHECK(check({node(0, {}, 0, {}), node(1, 2, 1, P0), node(2, 1, 1, P1)}).has(K::unreachable));
    CHECK(check({node(0, {}, 0, identity(2))}).has(K::root_projector));
    CHECK(check({node(0, {}, 0, {}), node(1, 0, 1, {}), node(2, 0, 1, P1)}).has(K::missing_projector));
    CHECK(check({node(0, {}, 0, {}), node(1, 0, 1, identity(3))}).has(K::dimension_mismatch));

    ComplexMatrix half = identity(2) * 0.5;
    CHECK(check({node(0, {}, 0, {}), node(1, 0, 1, half), node(2, 0, 1, half)}).has(K::not_projector));
    CHECK(check({node(0, {}, 0, {}), node(1, 0, 0, P0), node(2, 0, 1, P1)}).has(K::time_order));
    CHECK(check({node(0, {}, 0, {}), node(1, 0, 1, P0), node(2, 0, 1, identity(2))}).has(K::not_orthogonal));
    CHECK(check({node(0, {}, 0, {}), node(1, 0, 1, P0)}).has(K::incomplete));
    CHECK(check({node(0, {}, 0, {}), node(1, 0, 1, identity(2)), node(2, 0, 1, ComplexMatrix::Zero(2, 2))})
              .has(K::zero_projector));

    const auto table = EvolutionProvider::piecewise({0.0, 1.0}, {Unitary::identity(2)});
    CHECK(check({node(0, {}, 0, {}), node(1, 0, 1, P0), node(2, 0, 1, P1)}, table).ok());
    const auto report =
        check({node(0, {}, 0.5, {}), node(1, 0, 1, P0), node(2, 0, 1, P1)}, table);
    CHECK(report.has(K::evolution_range));
    CHECK(report.to_string().find("m0") != std::string::npos);
}

TEST_CASE("invalid families are refused by history extraction") {
    const auto bad = BranchingFamily::assemble(2, {node(0, {}, 0, {}), node(1, 0, 1, P0)},
                                               DensityMatrix::maximally_mixed(2), EvolutionProvider::trivial(2));
    CHECK_THROWS_AS(histories(bad), InvalidFamilyError);
    CHECK_THROWS_AS(require_valid(bad), InvalidFamilyError);
}

TEST_CASE("from_product builds the full cartesian tree") {
    testsupport::Rng rng(2);
    const std::array<std::size_t, 3> sizes{2, 3, 2};
    std::vector<Decomposition> ds;
    for (auto k : sizes) ds.push_back(testsupport::random_decomposition(3, k, rng));
    const std::array<double, 3> times{0.0, 0.4, 1.0};
    const auto f = from_product(3, times, ds, testsupport::random_density(3, rng), EvolutionProvider::trivial(3));
    CHECK(validate(f).ok());
    CHECK(f.leaves().size() == 12);
    CHECK(f.size() == 1 + 2 + 6 + 12);
    CHECK(is_product_shaped(f));
    for (NodeId leaf : f.leaves()) CHECK(f.at(leaf).time == 2.0);
}

TEST_CASE("branch-no-prod is a family but not a product") {
    const auto f = builtin::branch_no_prod();
    CHECK(validate(f).ok());
    CHECK_FALSE(is_product_shaped(f));
    CHECK(histories(f).size() == 4);
}

TEST_CASE("history lists regroup into families only when they branch") {
    CHECK_FALSE(to_branching_family(builtin::isham_histories()).has_value());

    const auto fig2 = builtin::fig2();
    const HistoryList list{fig2.dim(), fig2.initial_state(), fig2.evolution(), histories(fig2)};
    const auto regrown = to_branching_family(list);
    REQUIRE(regrown.has_value());
    CHECK(validate(*regrown).ok());
    const auto w1 = weight_table(fig2).weights;
    const auto w2 = weight_table(*regrown).weights;
    REQUIRE(w1.size() == w2.size());
    for (std::size_t i = 0; i < w1.size(); ++i) CHECK(w1[i] == doctest::Approx(w2[i]).epsilon(1e-12));

    // One history a strict prefix of another.
    auto hs = histories(builtin::branch_no_prod());
    hs.push_back(HistorySequence(2, {HistoryStep{0.0, Projector(P0)}}));
    CHECK_FALSE(to_branching_family(HistoryList{2, DensityMatrix::maximally_mixed(2), EvolutionProvider::trivial(2),
                                                hs})
                    .has_value());
}

TEST_CASE("history sequences require increasing times") {
    CHECK_THROWS_AS(HistorySequence(2, {HistoryStep{1.0, Projector(P0)}, HistoryStep{1.0, Projector(P1)}}),
                    InvariantError);
    CHECK_THROWS_AS(HistorySequence(3, {HistoryStep{1.0, Projector(P0)}}), DimensionError);
}

TEST_CASE("random families validate") {
    testsupport::Rng rng(17);
    for (int i = 0; i < 40; ++i) {
        const auto f = testsupport::random_family(rng);
        CHECK(validate(f).ok());
    }
}

#include "support/random.hpp"

#include <algorithm>
#include <cmath>

namespace testsupport {

using namespace branchhist;

namespace {

ComplexMatrix ginibre(std::size_t d, Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    const auto k = static_cast<Eigen::Index>(d);
    ComplexMatrix g(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) g(i, j) = Complex(n(rng), n(rng));
    }
    return g;
}

std::size_t uniform(std::size_t lo, std::size_t hi, Rng& rng) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

ComplexMatrix haar_unitary(std::size_t d, Rng& rng) {
    const ComplexMatrix g = ginibre(d, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < q.cols(); ++i) {
        const Complex rii = r(i, i);
        q.col(i) *= rii / std::abs(rii);
    }
    return q;
}

Decomposition random_decomposition(std::size_t d, std::size_t k, Rng& rng) {
    const ComplexMatrix u = haar_unitary(d, rng);
    // Random composition of d into k positive parts.
    std::vector<std::size_t> cuts;
    std::vector<std::size_t> pool(d - 1);
    for (std::size_t i = 0; i < d - 1; ++i) pool[i] = i + 1;
    std::shuffle(pool.begin(), pool.end(), rng);
    cuts.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k - 1));
    cuts.push_back(0);
    cuts.push_back(d);
    std::sort(cuts.begin(), cuts.end());
    std::vector<ComplexMatrix> ps;
    for (std::size_t g = 0; g + 1 < cuts.size(); ++g) {
        ComplexMatrix p = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t c = cuts[g]; c < cuts[g + 1]; ++c) {
            const auto col = u.col(static_cast<Eigen::Index>(c));
            p += col * col.adjoint();
        }
        ps.push_back(0.5 * (p + p.adjoint()));
    }
    return Decomposition(std::move(ps));
}

DensityMatrix random_density(std::size_t d, Rng& rng) {
    const ComplexMatrix g = ginibre(d, rng);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

ComplexMatrix random_hermitian(std::size_t d, Rng& rng) {
    const ComplexMatrix g = ginibre(d, rng);
    return 0.5 * (g + g.adjoint());
}

EvolutionProvider random_provider(std::size_t d, EvolutionProvider::Kind kind, Rng& rng) {
    switch (kind) {
        case EvolutionProvider::Kind::trivial:
            return EvolutionProvider::trivial(d);
        case EvolutionProvider::Kind::hamiltonian:
            return EvolutionProvider::hamiltonian(random_hermitian(d, rng));
        case EvolutionProvider::Kind::unitary_table:
            break;
    }
    std::vector<double> bps;
    std::vector<Unitary> us;
    for (int t = 0; t <= kGridEnd; ++t) bps.push_back(t);
    for (int t = 0; t < kGridEnd; ++t) us.emplace_back(haar_unitary(d, rng));
    return EvolutionProvider::piecewise(std::move(bps), std::move(us));
}

std::size_t depth_of(const BranchingFamily& f, NodeId id) { return f.path_to(id).size() - 1; }

std::vector<double> random_child_times(const BranchingFamily& f, NodeId leaf, std::size_t k, Rng& rng) {
    const double t = f.at(leaf).time;
    std::vector<double> times;
    const bool grid = f.evolution().kind() == EvolutionProvider::Kind::unitary_table;
    for (std::size_t i = 0; i < k; ++i) {
        if (grid) {
            times.push_back(t + static_cast<double>(uniform(1, 2, rng)));
        } else {
            times.push_back(t + std::uniform_real_distribution<double>(0.1, 1.5)(rng));
        }
    }
    return times;
}

BranchingFamily random_family(Rng& rng, const FamilyOptions& opts) {
    const std::size_t d = uniform(opts.min_dim, opts.max_dim, rng);
    const auto kind = static_cast<EvolutionProvider::Kind>(uniform(0, 2, rng));
    EvolutionProvider evo = random_provider(d, kind, rng);
    BranchingFamily f = BranchingFamily::create(d, 0.0, random_density(d, rng), std::move(evo));
    const std::size_t extensions = uniform(1, opts.max_extensions, rng);
    for (std::size_t e = 0; e < extensions; ++e) {
        std::vector<NodeId> open;
        for (NodeId leaf : f.leaves()) {
            if (depth_of(f, leaf) < opts.max_depth) open.push_back(leaf);
        }
        if (open.empty()) break;
        const NodeId leaf = open[uniform(0, open.size() - 1, rng)];
        const std::size_t k = uniform(std::min<std::size_t>(2, d), d, rng);
        f = f.extend(leaf, random_decomposition(d, k, rng), random_child_times(f, leaf, k, rng));
    }
    return f;
}

namespace {

bool same_evolution(const EvolutionProvider& a, const EvolutionProvider& b) {
    if (a.kind() != b.kind() || a.dim() != b.dim()) return false;
    if (const auto* ha = a.as_hamiltonian()) return ha->hamiltonian == b.as_hamiltonian()->hamiltonian;
    if (const auto* pa = a.as_piecewise()) {
        const auto* pb = b.as_piecewise();
        if (pa->breakpoints != pb->breakpoints || pa->unitaries.size() != pb->unitaries.size()) return false;
        for (std::size_t i = 0; i < pa->unitaries.size(); ++i) {
            if (pa->unitaries[i].matrix() != pb->unitaries[i].matrix()) return false;
        }
    }
    return true;
}

}  // namespace

bool structurally_equal(const BranchingFamily& a, const BranchingFamily& b) {
    if (a.dim() != b.dim() || a.size() != b.size()) return false;
    if (a.initial_state().matrix() != b.initial_state().matrix()) return false;
    if (!same_evolution(a.evolution(), b.evolution())) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Moment& x = a.moment(i);
        const Moment& y = b.moment(i);
        if (x.id != y.id || x.parent != y.parent || x.time != y.time) return false;
        if (x.projector.has_value() != y.projector.has_value()) return false;
        if (x.projector && *x.projector != *y.projector) return false;
    }
    return true;
}

}  // namespace testsupport

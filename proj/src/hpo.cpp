#include "branchhist/hpo.hpp"

#include <cmath>
#include <string>

#include "branchhist/builtin.hpp"
#include "branchhist/errors.hpp"
#include "branchhist/format.hpp"

namespace branchhist {

namespace {

std::size_t history_space_dim(std::size_t d, std::size_t n) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (total > kMaxHistorySpaceDim / d) {
            throw DimensionError("history space dimension " + std::to_string(d) + "^" + std::to_string(n) +
                                 " exceeds " + std::to_string(kMaxHistorySpaceDim));
        }
        total *= d;
    }
    return total;
}

void check_selector(std::span<const int> selector, std::size_t expected) {
    if (selector.size() != expected) {
        throw DimensionError("selector has " + std::to_string(selector.size()) + " entries, expected " +
                             std::to_string(expected));
    }
    for (int s : selector) {
        if (s != 0 && s != 1) throw DimensionError("selector entries must be 0 or 1");
    }
}

// Operator-Schmidt test on an n-slot operator over d-dimensional slots.
bool product_of_slots(const ComplexMatrix& m, Eigen::Index d, std::size_t n, double rel_tol) {
    if (n <= 1) return true;
    const Eigen::Index rest = m.rows() / d;
    // R[(i1,j1), (i2,j2)] = M[i1*rest + i2, j1*rest + j2]
    ComplexMatrix r(d * d, rest * rest);
    for (Eigen::Index i1 = 0; i1 < d; ++i1) {
        for (Eigen::Index j1 = 0; j1 < d; ++j1) {
            for (Eigen::Index i2 = 0; i2 < rest; ++i2) {
                for (Eigen::Index j2 = 0; j2 < rest; ++j2) {
                    r(i1 * d + j1, i2 * rest + j2) = m(i1 * rest + i2, j1 * rest + j2);
                }
            }
        }
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(r, Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    if (s(0) == 0.0) return true;  // zero operator: 0 ⊗ anything
    if (s.size() > 1 && s(1) > rel_tol * s(0)) return false;
    // R = s₀ u v†, so the remaining factor is B[i2, j2] = conj(v[i2*rest + j2]).
    const ComplexVector v = svd.matrixV().col(0);
    ComplexMatrix b(rest, rest);
    for (Eigen::Index i2 = 0; i2 < rest; ++i2) {
        for (Eigen::Index j2 = 0; j2 < rest; ++j2) b(i2, j2) = std::conj(v(i2 * rest + j2));
    }
    return product_of_slots(b, d, n - 1, rel_tol);
}

}  // namespace

HistoryProjector::HistoryProjector(ComplexMatrix m, std::size_t slot_dim, std::vector<double> slot_times,
                                   double tol)
    : m_(std::move(m)), slot_dim_(slot_dim), times_(std::move(slot_times)) {
    if (slot_dim_ == 0 || times_.empty()) throw DimensionError("history projector needs at least one slot");
    const auto n = static_cast<Eigen::Index>(history_space_dim(slot_dim_, times_.size()));
    if (m_.rows() != n || m_.cols() != n) {
        throw DimensionError("history projector must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    if (!is_projector(m_, tol)) throw InvariantError("history operator is not a projector");
}

HistoryProjector embed(const HistorySequence& seq) {
    if (seq.empty()) throw DimensionError("embed: empty history has no slots");
    history_space_dim(seq.dim(), seq.size());
    ComplexMatrix m = seq[0].projector.matrix();
    std::vector<double> times{seq[0].time};
    for (std::size_t i = 1; i < seq.size(); ++i) {
        m = kron(m, seq[i].projector.matrix());
        times.push_back(seq[i].time);
    }
    return HistoryProjector(std::move(m), seq.dim(), std::move(times));
}

std::vector<HistoryProjector> embed_all(std::span<const HistorySequence> seqs) {
    std::vector<HistoryProjector> out;
    for (const auto& s : seqs) {
        if (!out.empty()) {
            bool same = s.size() == out.front().slots() && s.dim() == out.front().slot_dim();
            for (std::size_t i = 0; same && i < s.size(); ++i) same = s[i].time == out.front().slot_times()[i];
            if (!same) {
                throw NotEmbeddableError(
                    "histories are not defined at one common set of times; no single history space holds them");
            }
        }
        out.push_back(embed(s));
    }
    return out;
}

bool is_hpo_family(std::span<const HistoryProjector> members, double tol) {
    if (members.empty()) throw DimensionError("is_hpo_family: empty member list");
    const auto& first = members.front();
    for (const auto& y : members) {
        if (y.slot_dim() != first.slot_dim() || y.slot_times() != first.slot_times()) {
            throw DimensionError("is_hpo_family: members disagree on slots");
        }
    }
    const Eigen::Index n = first.matrix().rows();
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            if (max_abs(members[a].matrix() * members[b].matrix()) > tol) return false;
        }
        sum += members[a].matrix();
    }
    return max_abs(sum - ComplexMatrix::Identity(n, n)) <= tol;
}

HPOFamily::HPOFamily(std::vector<HistoryProjector> members, double tol) : members_(std::move(members)) {
    if (!is_hpo_family(members_, tol)) {
        throw InvariantError("history projectors do not decompose the history identity");
    }
}

HistoryProjector sum_hpo(const HPOFamily& family, std::span<const int> selector) {
    check_selector(selector, family.size());
    const auto& first = family[0];
    const Eigen::Index n = first.matrix().rows();
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (std::size_t a = 0; a < family.size(); ++a) {
        if (selector[a] == 1) sum += family[a].matrix();
    }
    return HistoryProjector(std::move(sum), first.slot_dim(), first.slot_times());
}

bool is_homogeneous(const HistoryProjector& y, double rel_tol) {
    return product_of_slots(y.matrix(), static_cast<Eigen::Index>(y.slot_dim()), y.slots(), rel_tol);
}

double extended_weight(const DecoherenceMatrix& d, std::span<const int> selector, double tol) {
    check_selector(selector, d.size());
    Complex w = 0.0;
    for (std::size_t a = 0; a < d.size(); ++a) {
        if (selector[a] != 1) continue;
        for (std::size_t b = 0; b < d.size(); ++b) {
            if (selector[b] == 1) w += d(a, b);
        }
    }
    if (std::abs(w.imag()) > tol) throw InvariantError("extended weight has imaginary part " + format_real(w.imag()));
    return w.real();
}

IshamCounterexample isham_counterexample() {
    HistoryList list = builtin::isham_histories();
    HPOFamily family(embed_all(list.histories));
    WeightTable weights = weight_table(list.histories, list.evolution, list.rho);
    return IshamCounterexample{std::move(list), std::move(family), std::move(weights)};
}

}  // namespace branchhist

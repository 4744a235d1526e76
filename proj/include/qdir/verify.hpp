// Copyright 2026 The qdir Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Seeded property suite behind `qdir verify`. Each property draws its own
// instances from a generator seeded with (seed, property index), so the
// report is identical for any thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "qdir/densmat.hpp"
#include "qdir/quantumprob.hpp"
#include "qdir/random.hpp"
#include "qdir/scoring.hpp"
#include "qdir/textrep.hpp"
#include "qdir/tomography.hpp"

namespace qdir::verify {

struct PropertyResult {
    std::string name;
    std::size_t samples = 0;
    /// "max_dev" (must stay <= bound) or "min_value" (must reach >= bound).
    std::string statistic_name = "max_dev";
    double statistic = 0.0;
    double bound = 0.0;
    bool passed = false;

    std::string format() const {
        return fmt::format("{}: samples={} {}={:.3e} bound={:.1e} {}", name, samples, statistic_name, statistic,
                           bound, passed ? "PASS" : "FAIL");
    }
};

struct VerifyOptions {
    std::uint64_t seed = 2013;
    std::vector<Index> sizes = {2, 5, 20, 50};
    unsigned threads = 1;
};

struct VerifyReport {
    std::vector<PropertyResult> results;

    bool all_passed() const {
        return std::all_of(results.begin(), results.end(), [](const PropertyResult& r) { return r.passed; });
    }

    const PropertyResult* find(std::string_view name) const {
        for (const auto& r : results) {
            if (r.name == name) return &r;
        }
        return nullptr;
    }

    std::string to_string() const {
        std::string out;
        for (const auto& r : results) out += r.format() + "\n";
        out += fmt::format("summary: {}/{} properties passed\n",
                           std::count_if(results.begin(), results.end(), [](const auto& r) { return r.passed; }),
                           results.size());
        return out;
    }
};

using random::Rng;

/// Tracks the worst deviation over samples.
class Deviation {
  public:
    void add(double dev) {
        ++samples_;
        if (std::isnan(dev)) dev = std::numeric_limits<double>::infinity();
        worst_ = std::max(worst_, dev);
    }
    void fail() { add(std::numeric_limits<double>::infinity()); }

    PropertyResult upper(std::string name, double bound) const {
        return PropertyResult{std::move(name), samples_, "max_dev", worst_, bound, worst_ <= bound};
    }

  private:
    std::size_t samples_ = 0;
    double worst_ = 0.0;
};

inline PropertyResult at_least(std::string name, std::size_t samples, double value, double bound) {
    return PropertyResult{std::move(name), samples, "min_value", value, bound, value >= bound};
}

// ---------------------------------------------------------------------------
// Random instance helpers

namespace detail {

inline DensityMatrix random_density(Rng& rng, Index dim) { return new_density(random::density_matrix(rng, dim)); }

inline ProjectorEvent dense_event(const DenseVector& v) { return ProjectorEvent(SparseVector(v.sparseView(0.0))); }

inline TermVector nonnegative_term_vector(Rng& rng, Index dim, double fill) {
    return TermVector::normalized(SparseVector(random::nonnegative_unit(rng, dim, fill).sparseView(0.0)));
}

/// Corpus with `docs` documents over `vocab` synthetic terms "t<i>".
inline Corpus random_corpus(Rng& rng, std::size_t docs, Index vocab, std::size_t max_len) {
    Vocabulary v;
    for (Index i = 0; i < vocab; ++i) v.add("t" + std::to_string(i));
    std::uniform_int_distribution<std::size_t> len(1, max_len);
    std::uniform_int_distribution<Index> term(0, vocab - 1);
    std::vector<DocumentCounts> out;
    for (std::size_t d = 0; d < docs; ++d) {
        std::map<Index, std::uint64_t> counts;
        const std::size_t n = len(rng);
        for (std::size_t k = 0; k < n; ++k) counts[term(rng)] += 1;
        DocumentCounts dc{"d" + std::to_string(d), {}, 0};
        for (const auto& [t, c] : counts) dc.counts.push_back({t, c});
        out.push_back(std::move(dc));
    }
    return Corpus(std::move(v), std::move(out));
}

inline std::vector<std::string> doc_ids(std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(fmt::format("doc{:03d}", i));
    return ids;
}

/// Log-likelihood of a diagonal state written out directly:
/// sum over events of count * log(sum_a theta_a u_a^2).
inline double diagonal_log_likelihood(const DenseVector& theta, const EventSequence& seq) {
    double total = 0.0;
    for (const auto& e : seq) {
        double p = 0.0;
        for (SparseVector::InnerIterator it(e.vector()); it; ++it) p += theta(it.index()) * it.value() * it.value();
        if (p <= 0.0) return kNegInf;
        total += std::log(p);
    }
    return total;
}

/// Best diagonal density for `seq` at dim 3 over the simplex grid of `step`.
inline double best_diagonal_grid(const EventSequence& seq, double step) {
    const int n = static_cast<int>(std::lround(1.0 / step));
    double best = kNegInf;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; i + j <= n; ++j) {
            DenseVector theta(3);
            theta << i * step, j * step, std::max(0.0, 1.0 - (i + j) * step);
            best = std::max(best, diagonal_log_likelihood(theta, seq));
        }
    }
    return best;
}

/// Largest per-step decrease of the log-likelihood along an estimation.
inline double worst_decrease(const EstimateResult& r) {
    double worst = 0.0;
    for (std::size_t k = 1; k < r.log.size(); ++k) {
        worst = std::max(worst, r.log[k - 1].log_likelihood - r.log[k].log_likelihood);
    }
    return worst;
}

/// ||normalize(R rho R) - rho||_max for the undiluted operator.
inline double fixed_point_residual(const DensityMatrix& rho, const EventSequence& seq) {
    const DenseMatrix r = r_operator(rho, seq).dense() / static_cast<double>(seq.size());
    const DenseMatrix dense = rho.to_symmetric().dense();
    DenseMatrix next = r * dense * r;
    next /= next.trace();
    return max_abs_diff(next, dense);
}

/// Dim-3 sequence mixing e0, e1, a compound k(0,1) and e2.
inline EventSequence compound_sequence(Rng& rng, std::size_t length) {
    std::uniform_real_distribution<double> w(0.2, 1.0);
    std::discrete_distribution<int> kind({0.3, 0.2, 0.35, 0.15});
    const ProjectorEvent e0 = standard_basis_event(0, 3, "c");
    const ProjectorEvent e1 = standard_basis_event(1, 3, "a");
    const ProjectorEvent e2 = standard_basis_event(2, 3, "x");
    const ProjectorEvent k = superpose(3, {{0, w(rng)}, {1, w(rng)}}, "c_a");
    EventSequence seq;
    std::size_t compounds = 0;
    for (std::size_t i = 0; i < length; ++i) {
        switch (kind(rng)) {
            case 0: seq.push_back(e0); break;
            case 1: seq.push_back(e1); break;
            case 2: seq.push_back(k); ++compounds; break;
            default: seq.push_back(e2); break;
        }
    }
    // Keep the compound frequency at or above 0.2.
    while (compounds * 5 < seq.size()) {
        seq.push_back(k);
        ++compounds;
    }
    return seq;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Properties

inline PropertyResult density_invariants(Rng& rng, const VerifyOptions& opt) {
    Deviation dev;
    for (int s = 0; s < 1000; ++s) {
        const Index dim = opt.sizes[static_cast<std::size_t>(s) % opt.sizes.size()];
        DensityMatrix rho = s % 3 == 0   ? diagonal_density(random::distribution(rng, dim))
                            : s % 3 == 1 ? pure_state(random::unit(rng, dim))
                                         : detail::random_density(rng, dim);
        const DenseMatrix m = rho.to_symmetric().dense();
        const bool symmetric = (m - m.transpose()).cwiseAbs().maxCoeff() == 0.0;
        const EigenDecomposition e = eigendecompose(rho);
        dev.add(symmetric ? std::max({std::abs(m.trace() - 1.0), -e.values.minCoeff(), 0.0})
                          : std::numeric_limits<double>::infinity());
    }
    return dev.upper("density_invariants", kTraceTol);
}

inline PropertyResult eigen_reconstruction(Rng& rng, const VerifyOptions& opt) {
    Deviation dev;
    std::vector<Index> dims = opt.sizes;
    dims.push_back(200);
    for (Index dim : dims) {
        const DensityMatrix rho = detail::random_density(rng, dim);
        const EigenDecomposition e = eigendecompose(rho);
        const double ortho = max_abs_diff(e.vectors.transpose() * e.vectors, DenseMatrix::Identity(dim, dim));
        const double recon = max_abs_diff(e.reconstruct(), rho.to_symmetric().dense());
        dev.add(std::max({ortho, recon, std::abs(e.values.sum() - 1.0)}));
    }
    return dev.upper("eigen_reconstruction", 1e-8);
}

inline PropertyResult purity_extremes(Rng& rng, const VerifyOptions& opt) {
    Deviation dev;
    for (Index dim : opt.sizes) {
        for (int s = 0; s < 25; ++s) dev.add(std::abs(purity(pure_state(random::unit(rng, dim))) - 1.0));
        const DensityMatrix uniform = diagonal_density(DenseVector::Constant(dim, 1.0 / static_cast<double>(dim)));
        dev.add(std::abs(purity(uniform) - 1.0 / static_cast<double>(dim)));
    }
    return dev.upper("purity_extremes", 1e-9);
}

inline PropertyResult matrix_functions(Rng& rng, const VerifyOptions& opt) {
    Deviation dev;
    for (Index dim : opt.sizes) {
        for (int s = 0; s < 10; ++s) {
            const DensityMatrix rho = detail::random_density(rng, dim);
            const DenseMatrix m = rho.to_symmetric().dense();
            const DenseMatrix root = matrix_sqrt(rho).dense();
            dev.add(max_abs_diff(root * root, m));

            const SupportLog log = matrix_log(rho);
            const EigenDecomposition le = qdir::detail::decompose_symmetric(log.log.dense());
            const DenseMatrix exp_log = le.vectors * le.values.array().exp().matrix().asDiagonal() *
                                        le.vectors.transpose();
            const DenseMatrix off_support = DenseMatrix::Identity(dim, dim) - log.support_projector.dense();
            dev.add(max_abs_diff(exp_log - off_support, m));
        }
    }
    return dev.upper("matrix_functions", 1e-8);
}

inline PropertyResult bloch_regions(Rng& rng, const VerifyOptions&) {
    Deviation dev;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int s = 0; s < 200; ++s) {
        const DensityMatrix rho = detail::random_density(rng, 2);
        dev.add(max_abs_diff(from_bloch(bloch_coordinates(rho)).dense(), rho.to_symmetric().dense()));

        const double t = u01(rng);
        const BlochPoint diag = bloch_coordinates(diagonal_density(DenseVector{{t, 1.0 - t}}));
        dev.add(std::abs(diag.x));

        const BlochPoint pure = bloch_coordinates(pure_state(random::nonnegative_unit(rng, 2, 1.0)));
        dev.add(std::max(std::abs(pure.norm() - 1.0), -pure.x));
    }
    return dev.upper("bloch_regions", 1e-10);
}

inline PropertyResult gleason_normalization(Rng& rng, const VerifyOptions& opt) {
    Deviation dev;
    for (Index dim : opt.sizes) {
        for (int s = 0; s < 500; ++s) {
            const DensityMatrix rho = detail::random_density(rng, dim);
            const DenseMatrix basis = random::orthonormal_basis(rng, dim);
            double total = 0.0;
            for (Index i = 0; i < dim; ++i) total += measure(rho, detail::dense_event(basis.col(i)));
            dev.add(std::abs(total - 1.0));
        }
    }
    return dev.upper("gleason_normalization", 1e-8);
}

inline PropertyResult povm_reduction(Rng& rng, const VerifyOptions& opt) {
    Deviation dev;
    std::uniform_int_distribution<int> count(2, 5);
    for (Index dim : opt.sizes) {
        for (int s = 0; s < 50; ++s) {
            const int k = count(rng);
            std::vector<DenseMatrix> parts;
            DenseMatrix total = DenseMatrix::Zero(dim, dim);
            for (int i = 0; i < k; ++i) {
                const DenseMatrix g = random::gaussian(rng, dim, dim);
                parts.push_back(g * g.transpose());
                total += parts.back();
            }
            // M_i = S^{-1/2} A_i S^{-1/2} with S = sum_i A_i.
            const EigenDecomposition se = qdir::detail::decompose_symmetric(total);
            const DenseMatrix inv_root =
                se.vectors * se.values.cwiseSqrt().cwiseInverse().asDiagonal() * se.vectors.transpose();
            Povm povm;
            for (const auto& a : parts) povm.operators.emplace_back(inv_root * a * inv_root);
            const PovmDiagnostics diag = validate_povm(povm);

            const SymmetricMatrix rho = detail::random_density(rng, dim).to_symmetric();
            double prob = 0.0;
            for (const auto& m : povm.operators) prob += trace_product(rho, m);
            dev.add(diag.passed ? std::abs(prob - 1.0) : std::numeric_limits<double>::infinity());
        }
    }
    return dev.upper("povm_reduction", 1e-8);
}

inline PropertyResult measure_nonnegative(Rng& rng, const VerifyOptions& opt) {
    Deviation dev;
    for (Index dim : opt.sizes) {
        for (int s = 0; s < 200; ++s) {
            const DensityMatrix rho = detail::random_density(rng, dim);
            dev.add(std::max(0.0, -measure(rho, detail::dense_event(random::unit(rng, dim)))));
        }
    }
    return dev.upper("measure_nonnegative", 1e-12);
}

inline PropertyResult non_likelihood_witness(Rng&, const VerifyOptions&) {
    const DensityMatrix rho = diagonal_density(DenseVector{{0.5, 0.5}});
    const double total = measure(rho, standard_basis_event(0, 2)) + measure(rho, standard_basis_event(1, 2)) +
                         measure(rho, superpose(2, {{0, 1.0}, {1, 1.0}}));
    Deviation dev;
    dev.add(std::abs(total - 1.5));
    return dev.upper("non_likelihood_witness", 1e-9);
}

inline PropertyResult ql_quantum_equals_classical(Rng& rng, const VerifyOptions&) {
    Deviation dev;
    std::uniform_int_distribution<Index> vocab(5, 80);
    std::uniform_int_distribution<std::size_t> qlen(1, 20);
    std::uniform_real_distribution<double> mu(1.0, 3000.0);
    std::uniform_real_distribution<double> lambda(0.05, 0.95);
    for (int s = 0; s < 200; ++s) {
        const Index n = vocab(rng);
        const Corpus corpus = detail::random_corpus(rng, 5, n, 60);
        const Smoothing smoothing = s % 2 == 0 ? Smoothing::dirichlet(mu(rng)) : Smoothing::jelinek_mercer(lambda(rng));
        const LanguageModelParams theta = estimate_lm(std::size_t{0}, corpus, smoothing);
        const DensityMatrix rho = lm_density(theta);

        std::vector<Index> seen;
        for (Index t = 0; t < n; ++t) {
            if (corpus.collection_count(t) > 0) seen.push_back(t);
        }
        std::uniform_int_distribution<std::size_t> term(0, seen.size() - 1);
        std::vector<Index> query(qlen(rng));
        EventSequence events;
        for (auto& t : query) {
            t = seen[term(rng)];
            events.push_back(standard_basis_event(t, n));
        }
        const double classical = ql_classical(query, theta);
        const double quantum = ql_quantum(events, rho);
        if (std::isinf(classical) || std::isinf(quantum)) {
            dev.add(classical == quantum ? 0.0 : std::numeric_limits<double>::infinity());
            continue;
        }
        dev.add(std::abs(quantum - classical) / std::max(std::abs(classical), std::numeric_limits<double>::min()));
    }
    return dev.upper("ql_quantum_equals_classical", 1e-12);
}

inline PropertyResult vn_diagonal_equals_kl(Rng& rng, const VerifyOptions&) {
    Deviation dev;
    std::uniform_int_distribution<Index> dims(2, 100);
    for (int s = 0; s < 200; ++s) {
        const Index n = dims(rng);
        const DenseVector q = random::distribution(rng, n);
        const DenseVector d = random::distribution(rng, n);
        const double kl = kl_divergence(LanguageModelParams(q), LanguageModelParams(d));
        const double vn = vn_divergence_general(diagonal_density(q), diagonal_density(d));
        dev.add(std::abs(vn - kl));
    }
    return dev.upper("vn_diagonal_equals_kl", 1e-10);
}

inline PropertyResult vn_worked_value(Rng&, const VerifyOptions&) {
    const DensityMatrix q = diagonal_density(DenseVector{{0.5, 0.5}});
    const DensityMatrix d = new_density(SymmetricMatrix::from_rows({{0.5, 0.25}, {0.25, 0.5}}));
    const double expected = std::log(0.5) - 0.5 * (std::log(0.75) + std::log(0.25));
    Deviation dev;
    dev.add(std::abs(vn_divergence(q, d) - expected));
    return dev.upper("vn_worked_value", 1e-10);
}

/// Rankings of random nonnegative corpora under two score functions.
template <class ScoreA, class ScoreB>
PropertyResult rank_equivalence(Rng& rng, std::string name, ScoreA&& a, ScoreB&& b) {
    constexpr Index kDim = 30;
    constexpr std::size_t kDocs = 50;
    const auto ids = detail::doc_ids(kDocs);
    std::size_t divergent = 0;
    std::size_t negative = 0;
    for (int s = 0; s < 100; ++s) {
        std::vector<TermVector> docs;
        for (std::size_t i = 0; i < kDocs; ++i) docs.push_back(detail::nonnegative_term_vector(rng, kDim, 0.3));
        const TermVector q = detail::nonnegative_term_vector(rng, kDim, 0.3);
        const std::string qid = "q" + std::to_string(s);
        for (const auto& d : docs) {
            if (cosine(q, d) < 0.0) ++negative;
        }
        const RankedList la = rank_with(qid, ids, [&](std::size_t i) { return a(q, docs[i]); });
        const RankedList lb = rank_with(qid, ids, [&](std::size_t i) { return b(q, docs[i]); });
        if (!assert_rank_equivalent(la, lb).equivalent) ++divergent;
    }
    const auto bad = static_cast<double>(divergent + negative);
    return PropertyResult{std::move(name), 100, "max_dev", bad, 0.0, bad == 0.0};
}

inline PropertyResult squared_cosine_rank_equivalence(Rng& rng, const VerifyOptions&) {
    return rank_equivalence(
        rng, "squared_cosine_rank_equivalence", [](const TermVector& q, const TermVector& d) { return cosine(q, d); },
        [](const TermVector& q, const TermVector& d) { return vsm_quantum_likelihood(vsm_density(d), q); });
}

inline PropertyResult fidelity_rank_equivalence(Rng& rng, const VerifyOptions&) {
    return rank_equivalence(
        rng, "fidelity_rank_equivalence", [](const TermVector& q, const TermVector& d) { return cosine(q, d); },
        [](const TermVector& q, const TermVector& d) { return fidelity(vsm_density(q), vsm_density(d)); });
}

inline PropertyResult fidelity_equals_cosine(Rng& rng, const VerifyOptions& opt) {
    Deviation dev;
    for (int s = 0; s < 1000; ++s) {
        const Index dim = opt.sizes[static_cast<std::size_t>(s) % opt.sizes.size()];
        const TermVector q = detail::nonnegative_term_vector(rng, dim, 0.5);
        const TermVector d = detail::nonnegative_term_vector(rng, dim, 0.5);
        dev.add(std::abs(fidelity(vsm_density(q), vsm_density(d)) - cosine(q, d)));
    }
    return dev.upper("fidelity_equals_cosine", 1e-10);
}

inline PropertyResult fidelity_fast_vs_general(Rng& rng, const VerifyOptions& opt) {
    Deviation dev;
    for (int s = 0; s < 200; ++s) {
        const Index dim = opt.sizes[static_cast<std::size_t>(s) % opt.sizes.size()];
        const DensityMatrix q = vsm_density(detail::nonnegative_term_vector(rng, dim, 0.5));
        const DensityMatrix d = vsm_density(detail::nonnegative_term_vector(rng, dim, 0.5));
        dev.add(std::abs(fidelity(q, d) - fidelity_general(q, d)));
    }
    return dev.upper("fidelity_fast_vs_general", 1e-8);
}

inline PropertyResult vn_identity(Rng& rng, const VerifyOptions& opt) {
    Deviation dev;
    for (Index dim : opt.sizes) {
        for (int s = 0; s < 20; ++s) {
            const DensityMatrix rho = detail::random_density(rng, dim);
            dev.add(std::abs(vn_divergence(rho, rho)));
        }
    }
    return dev.upper("vn_identity", 1e-10);
}

inline PropertyResult vn_klein_nonnegative(Rng& rng, const VerifyOptions& opt) {
    Deviation dev;
    for (Index dim : opt.sizes) {
        for (int s = 0; s < 20; ++s) {
            const DensityMatrix a = detail::random_density(rng, dim);
            const DensityMatrix b = new_density(random::density_matrix(rng, dim, dim));
            dev.add(std::max(0.0, -vn_divergence(a, b)));
        }
    }
    return dev.upper("vn_klein_nonnegative", 1e-10);
}

inline PropertyResult vn_asymmetry(Rng&, const VerifyOptions&) {
    const DensityMatrix rho = new_density(SymmetricMatrix::from_rows({{0.5, 0.25}, {0.25, 0.5}}));
    const DensityMatrix sigma = diagonal_density(DenseVector{{0.9, 0.1}});
    return at_least("vn_asymmetry", 1, std::abs(vn_divergence(rho, sigma) - vn_divergence(sigma, rho)), 1e-3);
}

inline PropertyResult fidelity_symmetry(Rng& rng, const VerifyOptions& opt) {
    Deviation dev;
    for (Index dim : opt.sizes) {
        for (int s = 0; s < 20; ++s) {
            const DensityMatrix a = detail::random_density(rng, dim);
            const DensityMatrix b = detail::random_density(rng, dim);
            dev.add(std::abs(fidelity(a, b) - fidelity(b, a)));
        }
    }
    return dev.upper("fidelity_symmetry", 1e-8);
}

inline PropertyResult fidelity_range(Rng& rng, const VerifyOptions& opt) {
    Deviation dev;
    for (Index dim : opt.sizes) {
        for (int s = 0; s < 20; ++s) {
            const DensityMatrix a = detail::random_density(rng, dim);
            const DensityMatrix b = detail::random_density(rng, dim);
            const double f = fidelity(a, b);
            dev.add(std::max({f - 1.0, -f, std::abs(fidelity(a, a) - 1.0)}));
        }
    }
    return dev.upper("fidelity_range", 1e-8);
}

inline PropertyResult fast_paths_vs_dense(Rng& rng, const VerifyOptions& opt) {
    Deviation dev;
    for (Index dim : opt.sizes) {
        for (int s = 0; s < 20; ++s) {
            const DensityMatrix dq = diagonal_density(random::distribution(rng, dim));
            const DensityMatrix dd = diagonal_density(random::distribution(rng, dim));
            const DensityMatrix pure = pure_state(random::unit(rng, dim));
            const DensityMatrix dq_dense = new_density(dq.to_symmetric());
            const DensityMatrix dd_dense = new_density(dd.to_symmetric());
            const DensityMatrix pure_dense = new_density(pure.to_symmetric());
            const ProjectorEvent e = detail::dense_event(random::unit(rng, dim));

            dev.add(std::abs(measure(dq, e) - measure(dq_dense, e)));
            dev.add(std::abs(measure(pure, e) - measure(pure_dense, e)));
            dev.add(std::abs(measure(pure, e) - trace_product(pure.to_symmetric(), e.projector())));
            dev.add(std::abs(fidelity(dq, dd) - fidelity(dq_dense, dd_dense)));
            dev.add(std::abs(vn_divergence(dq, dd) - vn_divergence(dq_dense, dd_dense)));
            dev.add(std::abs(purity(pure) - purity(pure_dense)));
        }
    }
    return dev.upper("fast_paths_vs_dense", 1e-10);
}

inline PropertyResult rpr_classical_consistency(Rng& rng, const VerifyOptions&) {
    Deviation dev;
    for (Index dim : {Index{2}, Index{5}, Index{10}}) {
        for (int s = 0; s < 5; ++s) {
            std::uniform_int_distribution<Index> term(0, dim - 1);
            EventSequence seq;
            for (int k = 0; k < 100; ++k) seq.push_back(standard_basis_event(term(rng), dim));
            const EstimateResult r = rpr_estimate(seq, dim);
            const DensityMatrix oracle = empirical_diagonal_oracle(seq, dim);
            const bool ok = r.converged && r.log.size() <= 501 && detail::worst_decrease(r) <= 1e-10;
            dev.add(ok ? max_abs_diff(r.density.to_symmetric().dense(), oracle.to_symmetric().dense())
                       : std::numeric_limits<double>::infinity());
        }
    }
    return dev.upper("rpr_classical_consistency", 1e-6);
}

inline PropertyResult rpr_pure_recovery(Rng& rng, const VerifyOptions&) {
    Deviation dev;
    for (Index dim : {Index{2}, Index{5}, Index{10}}) {
        for (int s = 0; s < 5; ++s) {
            const ProjectorEvent p = detail::dense_event(random::nonnegative_unit(rng, dim, 0.6));
            EventSequence seq;
            for (int k = 0; k < 50; ++k) seq.push_back(p);
            const EstimateResult r = rpr_estimate(seq, dim);
            dev.add(r.converged ? max_abs_diff(r.density.to_symmetric().dense(), p.projector().dense())
                                : std::numeric_limits<double>::infinity());
        }
    }
    return dev.upper("rpr_pure_recovery", 1e-6);
}

inline PropertyResult rpr_monotone(Rng& rng, const VerifyOptions&) {
    Deviation dev;
    for (int s = 0; s < 10; ++s) {
        const EventSequence seq = detail::compound_sequence(rng, 100);
        dev.add(detail::worst_decrease(rpr_estimate(seq, 3)));
    }
    return dev.upper("rpr_monotone", 1e-10);
}

inline PropertyResult rpr_fixed_point(Rng& rng, const VerifyOptions&) {
    Deviation dev;
    for (int s = 0; s < 10; ++s) {
        const EventSequence seq = detail::compound_sequence(rng, 100);
        const EstimateResult r = rpr_estimate(seq, 3);
        dev.add(r.converged ? detail::fixed_point_residual(r.density, seq) : std::numeric_limits<double>::infinity());
    }
    return dev.upper("rpr_fixed_point", 1e-6);
}

inline PropertyResult rpr_beats_diagonal_grid(Rng& rng, const VerifyOptions&) {
    Deviation dev;
    for (int s = 0; s < 10; ++s) {
        const EventSequence seq = detail::compound_sequence(rng, 100);
        const EstimateResult r = rpr_estimate(seq, 3);
        const double ll = sequence_log_likelihood(r.density, seq);
        dev.add(std::max(0.0, detail::best_diagonal_grid(seq, 0.01) - ll));
    }
    return dev.upper("rpr_beats_diagonal_grid", 0.0);
}

inline PropertyResult rpr_off_diagonal(Rng& rng, const VerifyOptions&) {
    double smallest = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 10; ++s) {
        const EventSequence seq = detail::compound_sequence(rng, 100);
        const DenseMatrix m = rpr_estimate(seq, 3).density.to_symmetric().dense();
        const DenseMatrix off = m - DenseMatrix(m.diagonal().asDiagonal());
        smallest = std::min(smallest, off.maxCoeff());
    }
    return at_least("rpr_off_diagonal", 10, smallest, 0.01);
}

using Property = PropertyResult (*)(Rng&, const VerifyOptions&);

inline const std::vector<Property>& properties() {
    static const std::vector<Property> all = {
        density_invariants,
        eigen_reconstruction,
        purity_extremes,
        matrix_functions,
        bloch_regions,
        gleason_normalization,
        povm_reduction,
        measure_nonnegative,
        non_likelihood_witness,
        ql_quantum_equals_classical,
        vn_diagonal_equals_kl,
        vn_worked_value,
        squared_cosine_rank_equivalence,
        fidelity_equals_cosine,
        fidelity_fast_vs_general,
        fidelity_rank_equivalence,
        vn_identity,
        vn_klein_nonnegative,
        vn_asymmetry,
        fidelity_symmetry,
        fidelity_range,
        fast_paths_vs_dense,
        rpr_classical_consistency,
        rpr_pure_recovery,
        rpr_monotone,
        rpr_fixed_point,
        rpr_beats_diagonal_grid,
        rpr_off_diagonal,
    };
    return all;
}

inline VerifyReport run(const VerifyOptions& opt) {
    if (opt.sizes.empty()) throw Error(ErrorCode::kInvalidArgument, "verify needs at least one size");
    for (Index s : opt.sizes) {
        if (s < 2) throw Error(ErrorCode::kInvalidArgument, "verify sizes must be >= 2");
    }
    const auto& props = properties();
    VerifyReport report;
    report.results.resize(props.size());
    parallel_for(props.size(), opt.threads, [&](std::size_t i) {
        std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                          static_cast<std::uint32_t>(i)};
        Rng rng(seq);
        try {
            report.results[i] = props[i](rng, opt);
        } catch (const std::exception& e) {
            report.results[i] = PropertyResult{"property_" + std::to_string(i) + " (" + e.what() + ")", 0, "max_dev",
                                               std::numeric_limits<double>::infinity(), 0.0, false};
        }
    });
    return report;
}

}  // namespace qdir::verify

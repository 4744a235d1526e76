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

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include <Eigen/SVD>

#include "qdir/densmat.hpp"
#include "qdir/quantumprob.hpp"
#include "qdir/textrep.hpp"

namespace qdir {

inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Vector space scores

inline double cosine(const TermVector& q, const TermVector& d) {
    if (q.dim() != d.dim()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "cosine of dims " + std::to_string(q.dim()) + " and " + std::to_string(d.dim()));
    }
    if (!q.is_normalized() || !d.is_normalized()) {
        throw Error(ErrorCode::kNotNormalized, "cosine needs l2-normalized term vectors");
    }
    return q.weights().dot(d.weights());
}

/// mu_{rho_d}(|q><q|) = <q|d>^2 for a pure document density.
inline double vsm_quantum_likelihood(const DensityMatrix& rho_d, const TermVector& q) {
    if (!is_pure(rho_d)) {
        throw Error(ErrorCode::kNotPure, "vsm quantum likelihood needs a pure document density");
    }
    if (!q.is_normalized()) {
        throw Error(ErrorCode::kNotNormalized, "query term vector must be l2-normalized");
    }
    return measure(rho_d, ProjectorEvent(q.weights()));
}

/// tr sqrt(sqrt(rho_q) rho_d sqrt(rho_q)), evaluated as the trace norm of
/// sqrt(rho_q) sqrt(rho_d): the singular values of that product are the
/// square roots of the eigenvalues of the inner matrix.
inline double fidelity_general(const DensityMatrix& rho_q, const DensityMatrix& rho_d) {
    if (rho_q.dim() != rho_d.dim()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "fidelity of dims " + std::to_string(rho_q.dim()) + " and " + std::to_string(rho_d.dim()));
    }
    const DenseMatrix product = matrix_sqrt(rho_q).dense() * matrix_sqrt(rho_d).dense();
    Eigen::BDCSVD<DenseMatrix> svd(product);
    return svd.singularValues().sum();
}

/// Fidelity with fast paths for pure/pure (|<q|d>|) and diagonal/diagonal
/// (sum_i sqrt(p_i q_i)) pairs.
inline double fidelity(const DensityMatrix& rho_q, const DensityMatrix& rho_d) {
    if (rho_q.dim() != rho_d.dim()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "fidelity of dims " + std::to_string(rho_q.dim()) + " and " + std::to_string(rho_d.dim()));
    }
    if (rho_q.is_rank_one() && rho_d.is_rank_one()) {
        return std::abs(rho_q.state_vector().dot(rho_d.state_vector()));
    }
    if (rho_q.is_diagonal() && rho_d.is_diagonal()) {
        return rho_q.diagonal_weights().cwiseProduct(rho_d.diagonal_weights()).cwiseSqrt().sum();
    }
    return fidelity_general(rho_q, rho_d);
}

// ---------------------------------------------------------------------------
// Language model scores

/// sum_i log theta_{q_i}; -inf if any query term has zero probability.
inline double ql_classical(const std::vector<Index>& query_terms, const LanguageModelParams& theta_d) {
    if (query_terms.empty()) {
        throw Error(ErrorCode::kNoKnownTerms, "query likelihood of an empty query");
    }
    double total = 0.0;
    for (Index t : query_terms) {
        if (t < 0 || t >= theta_d.dim()) {
            throw Error(ErrorCode::kIndexOutOfRange, "query term " + std::to_string(t) + " outside the model");
        }
        const double p = theta_d(t);
        if (p <= 0.0) return kNegInf;
        total += std::log(p);
    }
    return total;
}

inline double ql_quantum(const EventSequence& seq, const DensityMatrix& rho_d) {
    return sequence_log_likelihood(rho_d, seq);
}

/// The nonnegative divergence sum_w q_w log(q_w / d_w), with 0 log 0 = 0.
inline double kl_divergence(const LanguageModelParams& theta_q, const LanguageModelParams& theta_d) {
    if (theta_q.dim() != theta_d.dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "KL of dims " + std::to_string(theta_q.dim()) + " and " +
                                                       std::to_string(theta_d.dim()));
    }
    double total = 0.0;
    for (Index w = 0; w < theta_q.dim(); ++w) {
        const double q = theta_q(w);
        if (q <= 0.0) continue;
        const double d = theta_d(w);
        if (d <= 0.0) return kPosInf;
        total += q * std::log(q / d);
    }
    return total;
}

/// Von Neumann divergence through the eigenbasis double sum
///   sum_i l_i log l_i - sum_{i,j} l_i log z_j <r_i|s_j>^2.
/// Returns +inf when the support of rho_q is not inside the support of rho_d.
inline double vn_divergence_general(const DensityMatrix& rho_q, const DensityMatrix& rho_d) {
    if (rho_q.dim() != rho_d.dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "VN of dims " + std::to_string(rho_q.dim()) + " and " +
                                                       std::to_string(rho_d.dim()));
    }
    const EigenDecomposition eq = eigendecompose(rho_q);
    const EigenDecomposition ed = eigendecompose(rho_d);
    const DenseMatrix overlap = (eq.vectors.transpose() * ed.vectors).cwiseAbs2();
    const Index n = eq.dim();

    double entropy_term = 0.0;
    double cross_term = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double l = eq.values(i);
        if (l <= kSupportTol) continue;
        entropy_term += l * std::log(l);
        for (Index j = 0; j < n; ++j) {
            const double z = ed.values(j);
            if (z > kSupportTol) {
                cross_term += l * std::log(z) * overlap(i, j);
            } else if (overlap(i, j) > kSupportTol) {
                return kPosInf;
            }
        }
    }
    return entropy_term - cross_term;
}

inline double vn_divergence(const DensityMatrix& rho_q, const DensityMatrix& rho_d) {
    if (rho_q.is_diagonal() && rho_d.is_diagonal()) {
        if (rho_q.dim() != rho_d.dim()) {
            throw Error(ErrorCode::kDimensionMismatch, "VN of dims " + std::to_string(rho_q.dim()) + " and " +
                                                           std::to_string(rho_d.dim()));
        }
        return kl_divergence(LanguageModelParams(rho_q.diagonal_weights()),
                             LanguageModelParams(rho_d.diagonal_weights()));
    }
    return vn_divergence_general(rho_q, rho_d);
}

// ---------------------------------------------------------------------------
// Methods and ranking

enum class ScoringMethod { kCosine, kVsmQuantum, kFidelity, kQlClassical, kQlQuantum, kNegKl, kNegVn };

inline constexpr ScoringMethod kAllMethods[] = {
    ScoringMethod::kCosine,      ScoringMethod::kVsmQuantum, ScoringMethod::kFidelity, ScoringMethod::kQlClassical,
    ScoringMethod::kQlQuantum,   ScoringMethod::kNegKl,      ScoringMethod::kNegVn,
};

inline std::string_view method_name(ScoringMethod m) {
    switch (m) {
        case ScoringMethod::kCosine: return "cosine";
        case ScoringMethod::kVsmQuantum: return "vsm-quantum";
        case ScoringMethod::kFidelity: return "fidelity";
        case ScoringMethod::kQlClassical: return "ql-classical";
        case ScoringMethod::kQlQuantum: return "ql-quantum";
        case ScoringMethod::kNegKl: return "neg-kl";
        case ScoringMethod::kNegVn: return "neg-vn";
    }
    return "?";
}

inline ScoringMethod parse_method(std::string_view name) {
    for (ScoringMethod m : kAllMethods) {
        if (method_name(m) == name) return m;
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown scoring method '" + std::string(name) + "'");
}

/// Which representation a method reads on each side.
enum class Representation { kTermVector, kTermList, kLanguageModel, kEventSequence, kDensity };

struct MethodRequirements {
    Representation document;
    Representation query;
};

inline MethodRequirements requirements(ScoringMethod m) {
    switch (m) {
        case ScoringMethod::kCosine: return {Representation::kTermVector, Representation::kTermVector};
        case ScoringMethod::kVsmQuantum: return {Representation::kDensity, Representation::kTermVector};
        case ScoringMethod::kFidelity: return {Representation::kDensity, Representation::kDensity};
        case ScoringMethod::kQlClassical: return {Representation::kLanguageModel, Representation::kTermList};
        case ScoringMethod::kQlQuantum: return {Representation::kDensity, Representation::kEventSequence};
        case ScoringMethod::kNegKl: return {Representation::kLanguageModel, Representation::kLanguageModel};
        case ScoringMethod::kNegVn: return {Representation::kDensity, Representation::kDensity};
    }
    return {};
}

inline bool uses_vector_space(ScoringMethod m) {
    return m == ScoringMethod::kCosine || m == ScoringMethod::kVsmQuantum || m == ScoringMethod::kFidelity;
}

struct DocumentRepresentation {
    std::string id;
    std::optional<TermVector> vector;
    std::optional<LanguageModelParams> lm;
    std::optional<DensityMatrix> density;
};

struct QueryRepresentation {
    std::string id;
    std::optional<TermVector> vector;
    std::optional<std::vector<Index>> terms;
    std::optional<LanguageModelParams> lm;
    std::optional<EventSequence> events;
    std::optional<DensityMatrix> density;
};

namespace detail {

template <class T>
const T& need(const std::optional<T>& slot, ScoringMethod m, const char* what) {
    if (!slot) {
        throw Error(ErrorCode::kRepresentationMismatch,
                    std::string("method ") + std::string(method_name(m)) + " needs " + what);
    }
    return *slot;
}

}  // namespace detail

/// Higher is better; divergence methods return the negated divergence.
inline double score(ScoringMethod m, const DocumentRepresentation& d, const QueryRepresentation& q) {
    using detail::need;
    switch (m) {
        case ScoringMethod::kCosine:
            return cosine(need(q.vector, m, "a query term vector"), need(d.vector, m, "a document term vector"));
        case ScoringMethod::kVsmQuantum:
            return vsm_quantum_likelihood(need(d.density, m, "a pure document density"),
                                          need(q.vector, m, "a query term vector"));
        case ScoringMethod::kFidelity:
            return fidelity(need(q.density, m, "a query density"), need(d.density, m, "a document density"));
        case ScoringMethod::kQlClassical:
            return ql_classical(need(q.terms, m, "query term indices"), need(d.lm, m, "a document language model"));
        case ScoringMethod::kQlQuantum:
            return ql_quantum(need(q.events, m, "a query event sequence"), need(d.density, m, "a document density"));
        case ScoringMethod::kNegKl:
            return -kl_divergence(need(q.lm, m, "a query language model"), need(d.lm, m, "a document language model"));
        case ScoringMethod::kNegVn:
            return -vn_divergence(need(q.density, m, "a query density"), need(d.density, m, "a document density"));
    }
    return kNegInf;
}

struct ScoredDocument {
    std::string doc_id;
    double score = 0.0;

    bool operator==(const ScoredDocument&) const = default;
};

/// Scores non-increasing, ties by doc-id ascending, -inf (and NaN) last.
struct RankedList {
    std::string query_id;
    std::vector<ScoredDocument> entries;

    std::size_t size() const noexcept { return entries.size(); }
};

inline RankedList make_ranked_list(std::string query_id, std::vector<ScoredDocument> entries) {
    for (auto& e : entries) {
        if (std::isnan(e.score)) e.score = kNegInf;
    }
    std::sort(entries.begin(), entries.end(), [](const ScoredDocument& a, const ScoredDocument& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    return RankedList{std::move(query_id), std::move(entries)};
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers, each owning a
/// contiguous block. The first exception by index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    const std::size_t block = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                const std::size_t lo = t * block;
                const std::size_t hi = std::min(n, lo + block);
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Ranks documents by score_fn(i) for document i.
template <class ScoreFn>
RankedList rank_with(std::string query_id, const std::vector<std::string>& doc_ids, ScoreFn&& score_fn,
                     unsigned threads = 1) {
    std::vector<ScoredDocument> entries(doc_ids.size());
    parallel_for(doc_ids.size(), threads, [&](std::size_t i) { entries[i] = {doc_ids[i], score_fn(i)}; });
    return make_ranked_list(std::move(query_id), std::move(entries));
}

inline RankedList rank(std::span<const DocumentRepresentation> docs, const QueryRepresentation& query,
                       ScoringMethod method, unsigned threads = 1) {
    std::vector<std::string> ids;
    ids.reserve(docs.size());
    for (const auto& d : docs) ids.push_back(d.id);
    return rank_with(query.id, ids, [&](std::size_t i) { return score(method, docs[i], query); }, threads);
}

struct RankEquivalenceReport {
    bool equivalent = false;
    /// 1-based rank of the first disagreement; 0 when equivalent.
    std::size_t first_divergent_rank = 0;
    std::string detail;
};

namespace detail {

/// Tie-group id per position: adjacent entries within `tol` share a group.
inline std::vector<std::size_t> tie_groups(const RankedList& list, double tol) {
    std::vector<std::size_t> groups(list.size());
    std::size_t g = 0;
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (i > 0) {
            const double a = list.entries[i - 1].score;
            const double b = list.entries[i].score;
            const bool tied = a == b || std::abs(a - b) <= tol;
            if (!tied) ++g;
        }
        groups[i] = g;
    }
    return groups;
}

}  // namespace detail

/// Two rankings are equivalent when no pair of documents is strictly
/// ordered one way in a and strictly the other way in b. Documents within
/// `tie_tol` of each other in either list count as tied.
inline RankEquivalenceReport assert_rank_equivalent(const RankedList& a, const RankedList& b,
                                                    double tie_tol = 1e-12) {
    if (a.query_id != b.query_id) {
        throw Error(ErrorCode::kDocSetMismatch, "query ids differ: '" + a.query_id + "' vs '" + b.query_id + "'");
    }
    if (a.size() != b.size()) {
        throw Error(ErrorCode::kDocSetMismatch, "ranked lists have different lengths");
    }
    const auto ga = detail::tie_groups(a, tie_tol);
    const auto gb = detail::tie_groups(b, tie_tol);
    std::map<std::string, std::size_t> group_in_b;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!group_in_b.emplace(b.entries[i].doc_id, gb[i]).second) {
            throw Error(ErrorCode::kDocSetMismatch, "duplicate doc id '" + b.entries[i].doc_id + "'");
        }
    }

    // Canonical orders: (group in a, group in b, id) and (group in b, group in a, id).
    // They coincide exactly when there is no strict inversion.
    using Key = std::tuple<std::size_t, std::size_t, std::string>;
    std::vector<Key> by_a, by_b;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto it = group_in_b.find(a.entries[i].doc_id);
        if (it == group_in_b.end()) {
            throw Error(ErrorCode::kDocSetMismatch, "doc '" + a.entries[i].doc_id + "' missing from second list");
        }
        by_a.emplace_back(ga[i], it->second, a.entries[i].doc_id);
        by_b.emplace_back(it->second, ga[i], a.entries[i].doc_id);
    }
    std::sort(by_a.begin(), by_a.end());
    std::sort(by_b.begin(), by_b.end());

    for (std::size_t k = 0; k < by_a.size(); ++k) {
        if (std::get<2>(by_a[k]) != std::get<2>(by_b[k])) {
            return RankEquivalenceReport{false, k + 1,
                                         "rank " + std::to_string(k + 1) + ": '" + std::get<2>(by_a[k]) +
                                             "' vs '" + std::get<2>(by_b[k]) + "'"};
        }
    }
    return RankEquivalenceReport{true, 0, "identical orderings"};
}

}  // namespace qdir

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
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qdir/densmat.hpp"

namespace qdir {

/// Lowercased alphanumeric runs; everything else separates tokens.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

/// Insertion-ordered term <-> index bijection. Index i is the basis vector e_i.
class Vocabulary {
  public:
    Index add(const std::string& term) {
        auto [it, inserted] = index_.try_emplace(term, static_cast<Index>(terms_.size()));
        if (inserted) terms_.push_back(term);
        return it->second;
    }

    std::optional<Index> find(std::string_view term) const {
        auto it = index_.find(std::string(term));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& term(Index i) const { return terms_.at(static_cast<std::size_t>(i)); }
    const std::vector<std::string>& terms() const noexcept { return terms_; }
    Index size() const noexcept { return static_cast<Index>(terms_.size()); }
    bool empty() const noexcept { return terms_.empty(); }

    bool operator==(const Vocabulary& other) const { return terms_ == other.terms_; }

  private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string, Index> index_;
};

struct TermCount {
    Index term = 0;
    std::uint64_t count = 0;

    bool operator==(const TermCount&) const = default;
};

struct DocumentCounts {
    std::string id;
    /// Sorted by term index, counts > 0.
    std::vector<TermCount> counts;
    std::uint64_t length = 0;

    bool operator==(const DocumentCounts&) const = default;
};

class Corpus {
  public:
    Corpus() = default;

    Corpus(Vocabulary vocabulary, std::vector<DocumentCounts> documents)
        : vocabulary_(std::move(vocabulary)), documents_(std::move(documents)) {
        const auto n = static_cast<std::size_t>(vocabulary_.size());
        collection_counts_.assign(n, 0);
        document_frequencies_.assign(n, 0);
        for (std::size_t d = 0; d < documents_.size(); ++d) {
            auto& doc = documents_[d];
            if (!by_id_.try_emplace(doc.id, d).second) {
                throw Error(ErrorCode::kDuplicateDocId, "duplicate document id '" + doc.id + "'");
            }
            std::sort(doc.counts.begin(), doc.counts.end(),
                      [](const TermCount& a, const TermCount& b) { return a.term < b.term; });
            std::uint64_t length = 0;
            for (std::size_t k = 0; k < doc.counts.size(); ++k) {
                const auto& tc = doc.counts[k];
                if (tc.term < 0 || tc.term >= vocabulary_.size()) {
                    throw Error(ErrorCode::kIndexOutOfRange,
                                "document '" + doc.id + "' references term " + std::to_string(tc.term));
                }
                if (tc.count == 0 || (k > 0 && doc.counts[k - 1].term == tc.term)) {
                    throw Error(ErrorCode::kInvalidArgument,
                                "document '" + doc.id + "' has a zero or repeated term count");
                }
                collection_counts_[static_cast<std::size_t>(tc.term)] += tc.count;
                document_frequencies_[static_cast<std::size_t>(tc.term)] += 1;
                length += tc.count;
            }
            doc.length = length;
            total_tokens_ += length;
        }
    }

    const Vocabulary& vocabulary() const noexcept { return vocabulary_; }
    Index dim() const noexcept { return vocabulary_.size(); }
    std::size_t size() const noexcept { return documents_.size(); }
    const std::vector<DocumentCounts>& documents() const noexcept { return documents_; }
    const DocumentCounts& document(std::size_t i) const { return documents_.at(i); }

    std::optional<std::size_t> find(std::string_view id) const {
        auto it = by_id_.find(std::string(id));
        if (it == by_id_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t require(std::string_view id) const {
        if (auto d = find(id)) return *d;
        throw Error(ErrorCode::kUnknownDoc, "unknown document '" + std::string(id) + "'");
    }

    std::uint64_t collection_count(Index term) const { return collection_counts_.at(static_cast<std::size_t>(term)); }
    std::uint64_t document_frequency(Index term) const {
        return document_frequencies_.at(static_cast<std::size_t>(term));
    }
    const std::vector<std::uint64_t>& collection_counts() const noexcept { return collection_counts_; }
    const std::vector<std::uint64_t>& document_frequencies() const noexcept { return document_frequencies_; }
    std::uint64_t total_tokens() const noexcept { return total_tokens_; }

  private:
    Vocabulary vocabulary_;
    std::vector<DocumentCounts> documents_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::vector<std::uint64_t> collection_counts_;
    std::vector<std::uint64_t> document_frequencies_;
    std::uint64_t total_tokens_ = 0;
};

struct RawDocument {
    std::string id;
    std::string text;
};

/// Tokenizes every document; the vocabulary follows first occurrence order.
inline Corpus build_corpus(const std::vector<RawDocument>& docs) {
    Vocabulary vocab;
    std::vector<DocumentCounts> counted;
    counted.reserve(docs.size());
    for (const auto& doc : docs) {
        std::map<Index, std::uint64_t> counts;
        for (const auto& token : tokenize(doc.text)) counts[vocab.add(token)] += 1;
        DocumentCounts dc{doc.id, {}, 0};
        for (const auto& [term, count] : counts) dc.counts.push_back({term, count});
        counted.push_back(std::move(dc));
    }
    return Corpus(std::move(vocab), std::move(counted));
}

/// Keeps the `cap` terms with the largest collection frequency (ties by
/// original index) and drops all other tokens. Surviving terms keep their
/// relative order.
inline Corpus cap_vocabulary(const Corpus& corpus, std::size_t cap) {
    if (static_cast<std::size_t>(corpus.dim()) <= cap) return corpus;
    std::vector<Index> order(static_cast<std::size_t>(corpus.dim()));
    for (Index i = 0; i < corpus.dim(); ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return corpus.collection_count(a) > corpus.collection_count(b); });
    order.resize(cap);
    std::sort(order.begin(), order.end());

    Vocabulary vocab;
    std::unordered_map<Index, Index> remap;
    for (Index old : order) remap[old] = vocab.add(corpus.vocabulary().term(old));

    std::vector<DocumentCounts> docs;
    for (const auto& doc : corpus.documents()) {
        DocumentCounts dc{doc.id, {}, 0};
        for (const auto& tc : doc.counts) {
            if (auto it = remap.find(tc.term); it != remap.end()) dc.counts.push_back({it->second, tc.count});
        }
        docs.push_back(std::move(dc));
    }
    return Corpus(std::move(vocab), std::move(docs));
}

/// Nonnegative sparse term weights, optionally l2-normalized.
class TermVector {
  public:
    static TermVector raw(SparseVector weights) {
        check_nonnegative(weights);
        return TermVector(std::move(weights), false);
    }

    /// Throws ZeroVector if there is nothing to normalize.
    static TermVector normalized(SparseVector weights) {
        check_nonnegative(weights);
        weights.prune(0.0);
        const double norm = weights.norm();
        if (!(norm >= kZeroNormTol)) {
            throw Error(ErrorCode::kZeroVector, "term vector has no nonzero weight");
        }
        return TermVector(weights / norm, true);
    }

    Index dim() const noexcept { return weights_.size(); }
    const SparseVector& weights() const noexcept { return weights_; }
    bool is_normalized() const noexcept { return normalized_; }
    double norm() const { return weights_.norm(); }
    double weight(Index i) const { return weights_.coeff(i); }

  private:
    TermVector(SparseVector w, bool normalized) : weights_(std::move(w)), normalized_(normalized) {}

    static void check_nonnegative(const SparseVector& w) {
        for (SparseVector::InnerIterator it(w); it; ++it) {
            if (!(it.value() >= 0.0)) {
                throw Error(ErrorCode::kInvalidArgument, "term weights must be nonnegative");
            }
        }
    }

    SparseVector weights_;
    bool normalized_ = false;
};

enum class Weighting { kTf, kTfIdf };

inline std::string_view weighting_name(Weighting w) { return w == Weighting::kTf ? "tf" : "tfidf"; }

inline Weighting parse_weighting(std::string_view s) {
    if (s == "tf") return Weighting::kTf;
    if (s == "tfidf") return Weighting::kTfIdf;
    throw Error(ErrorCode::kInvalidArgument, "unknown weighting '" + std::string(s) + "' (tf|tfidf)");
}

/// ln((N + 1) / (df + 1))
inline double idf(const Corpus& corpus, Index term) {
    const auto n = static_cast<double>(corpus.size());
    const auto df = static_cast<double>(corpus.document_frequency(term));
    return std::log((n + 1.0) / (df + 1.0));
}

inline TermVector tfidf_vector(std::size_t doc, const Corpus& corpus, Weighting scheme) {
    const DocumentCounts& d = corpus.document(doc);
    if (d.length == 0) {
        throw Error(ErrorCode::kEmptyDocument, "document '" + d.id + "' has no tokens");
    }
    SparseVector w(corpus.dim());
    w.reserve(static_cast<Index>(d.counts.size()));
    for (const auto& tc : d.counts) {
        double weight = static_cast<double>(tc.count);
        if (scheme == Weighting::kTfIdf) weight *= idf(corpus, tc.term);
        w.insert(tc.term) = weight;
    }
    return TermVector::normalized(std::move(w));
}

inline TermVector tfidf_vector(std::string_view doc_id, const Corpus& corpus, Weighting scheme) {
    return tfidf_vector(corpus.require(doc_id), corpus, scheme);
}

struct KnownTerms {
    std::vector<Index> terms;
    std::size_t dropped = 0;
};

/// Maps tokens to vocabulary indices, dropping (and counting) unknown ones.
inline KnownTerms known_terms(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    KnownTerms out;
    for (const auto& t : tokens) {
        if (auto idx = vocab.find(t)) {
            out.terms.push_back(*idx);
        } else {
            ++out.dropped;
        }
    }
    if (out.terms.empty()) {
        throw Error(ErrorCode::kNoKnownTerms, "no query token is in the vocabulary");
    }
    return out;
}

/// Query counterpart of tfidf_vector: query term counts, idf from the corpus.
inline TermVector query_vector(const std::vector<std::string>& tokens, const Corpus& corpus, Weighting scheme) {
    const KnownTerms known = known_terms(tokens, corpus.vocabulary());
    SparseVector w(corpus.dim());
    for (Index t : known.terms) w.coeffRef(t) += 1.0;
    if (scheme == Weighting::kTfIdf) {
        for (SparseVector::InnerIterator it(w); it; ++it) it.valueRef() *= idf(corpus, it.index());
    }
    return TermVector::normalized(std::move(w));
}

struct Smoothing {
    enum class Kind { kNone, kJelinekMercer, kDirichlet };

    Kind kind = Kind::kDirichlet;
    double parameter = 2000.0;

    static Smoothing none() { return {Kind::kNone, 0.0}; }

    static Smoothing jelinek_mercer(double lambda) {
        if (!(lambda > 0.0 && lambda < 1.0)) {
            throw Error(ErrorCode::kInvalidArgument, "Jelinek-Mercer lambda must lie in (0, 1)");
        }
        return {Kind::kJelinekMercer, lambda};
    }

    static Smoothing dirichlet(double mu) {
        if (!(mu > 0.0)) {
            throw Error(ErrorCode::kInvalidArgument, "Dirichlet mu must be positive");
        }
        return {Kind::kDirichlet, mu};
    }

    /// "none", "jm:<lambda>" or "dirichlet:<mu>".
    static Smoothing parse(std::string_view spec) {
        if (spec == "none") return none();
        const auto colon = spec.find(':');
        if (colon == std::string_view::npos) {
            throw Error(ErrorCode::kInvalidArgument, "bad smoothing '" + std::string(spec) + "'");
        }
        const std::string kind(spec.substr(0, colon));
        const std::string value(spec.substr(colon + 1));
        double parameter = 0.0;
        try {
            std::size_t used = 0;
            parameter = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw Error(ErrorCode::kInvalidArgument, "bad smoothing parameter '" + value + "'");
        }
        if (kind == "jm") return jelinek_mercer(parameter);
        if (kind == "dirichlet") return dirichlet(parameter);
        throw Error(ErrorCode::kInvalidArgument, "unknown smoothing kind '" + kind + "'");
    }

    std::string to_string() const {
        switch (kind) {
            case Kind::kNone: return "none";
            case Kind::kJelinekMercer: return "jm:" + std::to_string(parameter);
            case Kind::kDirichlet: return "dirichlet:" + std::to_string(parameter);
        }
        return {};
    }
};

/// Categorical distribution over the vocabulary.
class LanguageModelParams {
  public:
    explicit LanguageModelParams(DenseVector theta, Smoothing smoothing = Smoothing::none())
        : theta_(std::move(theta)), smoothing_(smoothing) {
        if (theta_.size() < 1) throw Error(ErrorCode::kNotDistribution, "empty distribution");
        if (!(theta_.minCoeff() >= 0.0)) throw Error(ErrorCode::kNotDistribution, "negative probability");
        const double s = theta_.sum();
        if (!(std::abs(s - 1.0) <= kTraceTol)) {
            throw Error(ErrorCode::kNotDistribution, "probabilities sum to " + std::to_string(s));
        }
    }

    Index dim() const noexcept { return theta_.size(); }
    const DenseVector& theta() const noexcept { return theta_; }
    double operator()(Index i) const { return theta_(i); }
    const Smoothing& smoothing() const noexcept { return smoothing_; }

  private:
    DenseVector theta_;
    Smoothing smoothing_;
};

/// Collection term counts over total tokens.
inline DenseVector collection_model(const Corpus& corpus) {
    if (corpus.total_tokens() == 0) {
        throw Error(ErrorCode::kEmptyDocument, "collection has no tokens");
    }
    DenseVector c(corpus.dim());
    const auto total = static_cast<double>(corpus.total_tokens());
    for (Index i = 0; i < corpus.dim(); ++i) c(i) = static_cast<double>(corpus.collection_count(i)) / total;
    return c;
}

/// Same as estimate_lm but with a precomputed collection model.
inline LanguageModelParams estimate_lm(const DocumentCounts& doc, const DenseVector& collection,
                                       const Smoothing& smoothing) {
    const auto len = static_cast<double>(doc.length);
    DenseVector theta = DenseVector::Zero(collection.size());
    switch (smoothing.kind) {
        case Smoothing::Kind::kNone:
        case Smoothing::Kind::kJelinekMercer: {
            if (doc.length == 0) {
                throw Error(ErrorCode::kEmptyDocument, "document '" + doc.id + "' has no tokens");
            }
            for (const auto& tc : doc.counts) theta(tc.term) = static_cast<double>(tc.count) / len;
            if (smoothing.kind == Smoothing::Kind::kJelinekMercer) {
                const double lambda = smoothing.parameter;
                theta = (1.0 - lambda) * theta + lambda * collection;
            }
            break;
        }
        case Smoothing::Kind::kDirichlet: {
            const double mu = smoothing.parameter;
            theta = mu * collection;
            for (const auto& tc : doc.counts) theta(tc.term) += static_cast<double>(tc.count);
            theta /= len + mu;
            break;
        }
    }
    return LanguageModelParams(std::move(theta), smoothing);
}

inline LanguageModelParams estimate_lm(std::size_t doc, const Corpus& corpus, const Smoothing& smoothing) {
    const DocumentCounts& d = corpus.document(doc);
    if (smoothing.kind != Smoothing::Kind::kDirichlet && d.length == 0) {
        throw Error(ErrorCode::kEmptyDocument, "document '" + d.id + "' has no tokens");
    }
    return estimate_lm(d, collection_model(corpus), smoothing);
}

inline LanguageModelParams estimate_lm(std::string_view doc_id, const Corpus& corpus, const Smoothing& smoothing) {
    return estimate_lm(corpus.require(doc_id), corpus, smoothing);
}

struct QueryModel {
    LanguageModelParams model;
    std::vector<Index> terms;
    std::size_t dropped = 0;
};

/// Maximum-likelihood model of the in-vocabulary query tokens.
inline QueryModel query_lm(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    KnownTerms known = known_terms(tokens, vocab);
    DenseVector theta = DenseVector::Zero(vocab.size());
    for (Index t : known.terms) theta(t) += 1.0;
    theta /= static_cast<double>(known.terms.size());
    return QueryModel{LanguageModelParams(std::move(theta)), std::move(known.terms), known.dropped};
}

inline DensityMatrix lm_density(const LanguageModelParams& theta) { return diagonal_density(theta.theta()); }

inline DensityMatrix vsm_density(const TermVector& v) {
    if (v.weights().nonZeros() == 0 || v.norm() < kZeroNormTol) {
        throw Error(ErrorCode::kZeroVector, "cannot build a VSM density from a zero vector");
    }
    if (!v.is_normalized() || std::abs(v.norm() - 1.0) > 1e-9) {
        throw Error(ErrorCode::kNotNormalized, "VSM density needs an l2-normalized term vector");
    }
    return pure_state(v.weights());
}

}  // namespace qdir

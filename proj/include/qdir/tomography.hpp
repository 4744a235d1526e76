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

// Maximum-likelihood density estimation from projector events with the
// iterative R rho R scheme:
//
//   R(rho)   = (1/m) sum_i P_i / tr(rho P_i)
//   R_a      = (1 - a) I + a R(rho)
//   rho'     = R_a rho R_a / tr(R_a rho R_a)
//
// starting from the maximally mixed state I/dim.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qdir/densmat.hpp"
#include "qdir/quantumprob.hpp"
#include "qdir/textrep.hpp"

namespace qdir {

struct EstimatorConfig {
    int max_iterations = 500;
    /// Stop once the log-likelihood gain per step, relative to max(1, |LL|),
    /// drops below this...
    double rel_tolerance = 1e-9;
    /// ...and the iterate moves by at most this much in max-norm.
    double step_tolerance = 1e-9;
    /// Initial a in (0, 1]; 1 is the undiluted iteration.
    double dilution = 1.0;
    /// A step that lowers the log-likelihood by more than this is rejected
    /// and retried with half the dilution.
    double monotonicity_slack = 1e-10;
    double min_dilution = 1.0 / 1024.0;
    Index max_dim = 2000;
};

/// Single-term and compound concepts sharing one term space.
class ConceptSet {
  public:
    ConceptSet() = default;
    explicit ConceptSet(std::vector<ProjectorEvent> concepts) : concepts_(std::move(concepts)) {
        for (const auto& c : concepts_) {
            if (c.dim() != concepts_.front().dim()) {
                throw Error(ErrorCode::kDimensionMismatch, "concepts of differing dims");
            }
        }
    }

    const std::vector<ProjectorEvent>& concepts() const noexcept { return concepts_; }
    std::size_t size() const noexcept { return concepts_.size(); }
    const ProjectorEvent& operator[](std::size_t i) const { return concepts_.at(i); }

    /// Observation sequence with concept i repeated counts[i] times.
    EventSequence sequence(const std::vector<std::size_t>& counts) const {
        if (counts.size() != concepts_.size()) {
            throw Error(ErrorCode::kInvalidArgument, "one count per concept expected");
        }
        EventSequence seq;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            for (std::size_t k = 0; k < counts[i]; ++k) seq.push_back(concepts_[i]);
        }
        return seq;
    }

  private:
    std::vector<ProjectorEvent> concepts_;
};

/// Superposition f_a e_a + f_b e_b of two vocabulary terms, labeled "a_b".
inline ProjectorEvent compound_event(const std::string& term_a, const std::string& term_b, double weight_a,
                                     double weight_b, const Vocabulary& vocab) {
    const auto a = vocab.find(term_a);
    if (!a) throw Error(ErrorCode::kUnknownTerm, "unknown term '" + term_a + "'");
    const auto b = vocab.find(term_b);
    if (!b) throw Error(ErrorCode::kUnknownTerm, "unknown term '" + term_b + "'");
    if (*a == *b) {
        throw Error(ErrorCode::kInvalidArgument, "compound concept needs two distinct terms");
    }
    return superpose(vocab.size(), {{*a, weight_a}, {*b, weight_b}}, term_a + "_" + term_b);
}

namespace detail {

struct WeightedEvent {
    const ProjectorEvent* event;
    double count;
};

/// Collapses repeated events (same sparse vector) into counts, in order of
/// first appearance.
inline std::vector<WeightedEvent> aggregate(const EventSequence& seq) {
    std::map<std::vector<std::pair<Index, double>>, std::size_t> slot;
    std::vector<WeightedEvent> out;
    for (const auto& e : seq) {
        std::vector<std::pair<Index, double>> key;
        for (SparseVector::InnerIterator it(e.vector()); it; ++it) key.emplace_back(it.index(), it.value());
        auto [pos, inserted] = slot.try_emplace(std::move(key), out.size());
        if (inserted) {
            out.push_back({&e, 1.0});
        } else {
            out[pos->second].count += 1.0;
        }
    }
    return out;
}

inline double weighted_log_likelihood(const DensityMatrix& rho, const std::vector<WeightedEvent>& events) {
    double total = 0.0;
    for (const auto& w : events) {
        const double p = measure(rho, *w.event);
        if (p <= kSupportTol) return kNegInf;
        total += w.count * std::log(p);
    }
    return total;
}

inline void add_scaled_dyad(DenseMatrix& acc, const SparseVector& u, double scale) {
    for (SparseVector::InnerIterator a(u); a; ++a) {
        for (SparseVector::InnerIterator b(u); b; ++b) acc(a.index(), b.index()) += scale * a.value() * b.value();
    }
}

inline DenseMatrix r_operator_weighted(const DensityMatrix& rho, const std::vector<WeightedEvent>& events) {
    DenseMatrix r = DenseMatrix::Zero(rho.dim(), rho.dim());
    for (const auto& w : events) {
        const double p = measure(rho, *w.event);
        if (p <= kSupportTol) {
            throw Error(ErrorCode::kZeroMeasureEvent,
                        "event " + w.event->describe() + " has measure " + std::to_string(p));
        }
        add_scaled_dyad(r, w.event->vector(), w.count / p);
    }
    return r;
}

inline DensityMatrix rpr_step(const DensityMatrix& rho, const DenseMatrix& r_normalized, double dilution) {
    const Index n = rho.dim();
    const DenseMatrix ra = (1.0 - dilution) * DenseMatrix::Identity(n, n) + dilution * r_normalized;
    const DenseMatrix dense = rho.to_symmetric().dense();
    DenseMatrix next = ra * dense * ra;
    next /= next.trace();
    return new_density(SymmetricMatrix(next));
}

}  // namespace detail

/// R(rho) = sum_i P_i / tr(rho P_i) over the sequence (not divided by m).
inline SymmetricMatrix r_operator(const DensityMatrix& rho, const EventSequence& seq) {
    if (!seq.empty() && seq.dim() != rho.dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "sequence dim " + std::to_string(seq.dim()) +
                                                       " vs density dim " + std::to_string(rho.dim()));
    }
    return SymmetricMatrix(detail::r_operator_weighted(rho, detail::aggregate(seq)));
}

struct IterationRecord {
    int iteration = 0;
    double log_likelihood = 0.0;
    double delta = 0.0;
    double dilution = 1.0;
};

struct EstimateResult {
    DensityMatrix density;
    std::vector<IterationRecord> log;
    bool converged = false;
    double final_dilution = 1.0;
};

inline EstimateResult rpr_estimate(const EventSequence& seq, Index dim, const EstimatorConfig& config = {}) {
    if (seq.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot estimate from an empty sequence");
    if (dim < 2) throw Error(ErrorCode::kInvalidArgument, "estimation needs dim >= 2");
    if (dim > config.max_dim) {
        throw Error(ErrorCode::kInvalidArgument,
                    "dim " + std::to_string(dim) + " exceeds the configured cap " + std::to_string(config.max_dim));
    }
    if (seq.dim() != dim) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "sequence dim " + std::to_string(seq.dim()) + " vs requested dim " + std::to_string(dim));
    }
    if (!(config.dilution > 0.0 && config.dilution <= 1.0)) {
        throw Error(ErrorCode::kInvalidArgument, "dilution must lie in (0, 1]");
    }
    if (config.max_iterations < 1) throw Error(ErrorCode::kInvalidArgument, "max_iterations must be positive");

    const auto events = detail::aggregate(seq);
    const auto m = static_cast<double>(seq.size());

    DensityMatrix rho = new_density(SymmetricMatrix(DenseMatrix::Identity(dim, dim) / static_cast<double>(dim)));
    double ll = detail::weighted_log_likelihood(rho, events);
    double dilution = config.dilution;
    double previous_step = std::numeric_limits<double>::infinity();

    EstimateResult result{rho, {{0, ll, 0.0, dilution}}, false, dilution};
    for (int k = 1; k <= config.max_iterations; ++k) {
        const DenseMatrix r = detail::r_operator_weighted(rho, events) / m;
        DensityMatrix next = detail::rpr_step(rho, r, dilution);
        double next_ll = detail::weighted_log_likelihood(next, events);
        while (next_ll < ll - config.monotonicity_slack && dilution * 0.5 >= config.min_dilution) {
            dilution *= 0.5;
            next = detail::rpr_step(rho, r, dilution);
            next_ll = detail::weighted_log_likelihood(next, events);
        }
        if (next_ll < ll - config.monotonicity_slack) break;  // no dilution restores monotonicity

        const double step = max_abs_diff(next.to_symmetric().dense(), rho.to_symmetric().dense());
        const double delta = next_ll - ll;
        rho = std::move(next);
        ll = next_ll;
        result.log.push_back({k, ll, delta, dilution});

        const bool ll_settled = std::abs(delta) <= config.rel_tolerance * std::max(1.0, std::abs(ll));
        if (ll_settled && step <= config.step_tolerance) {
            result.converged = true;
            break;
        }
        // Equal-likelihood cycles never trip the monotonicity check; damp
        // them once the likelihood has settled but the steps stop shrinking.
        if (ll_settled && step > 0.5 * previous_step && dilution * 0.5 >= config.min_dilution) dilution *= 0.5;
        previous_step = step;
    }
    result.density = std::move(rho);
    result.final_dilution = dilution;
    return result;
}

/// Diagonal density of empirical frequencies for a basis-event sequence.
inline DensityMatrix empirical_diagonal_oracle(const EventSequence& seq, Index dim) {
    if (seq.empty()) throw Error(ErrorCode::kInvalidArgument, "empty event sequence");
    if (seq.dim() != dim) {
        throw Error(ErrorCode::kDimensionMismatch, "sequence dim does not match " + std::to_string(dim));
    }
    DenseVector freq = DenseVector::Zero(dim);
    for (const auto& e : seq) {
        const auto idx = e.basis_index();
        if (!idx) throw Error(ErrorCode::kNonBasisEvent, "event " + e.describe() + " is not a basis projector");
        freq(*idx) += 1.0;
    }
    return diagonal_density(freq / static_cast<double>(seq.size()));
}

}  // namespace qdir

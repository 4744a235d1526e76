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

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdir/densmat.hpp"

namespace qdir {

/// Elementary event |u><u| for a unit vector u, kept as the sparse vector.
class ProjectorEvent {
  public:
    /// Normalizes u; throws ZeroVector when it has (numerically) no length.
    explicit ProjectorEvent(SparseVector u, std::string label = {}) : label_(std::move(label)) {
        const double norm = u.norm();
        if (!(norm >= kZeroNormTol)) {
            throw Error(ErrorCode::kZeroVector, "projector event needs a nonzero vector");
        }
        u.prune(0.0);
        vector_ = u / norm;
    }

    Index dim() const noexcept { return vector_.size(); }
    const SparseVector& vector() const noexcept { return vector_; }
    const std::string& label() const noexcept { return label_; }

    /// The single index when the event is a standard basis projector.
    std::optional<Index> basis_index() const {
        if (vector_.nonZeros() != 1) return std::nullopt;
        SparseVector::InnerIterator it(vector_);
        if (it.value() != 1.0) return std::nullopt;
        return it.index();
    }

    SymmetricMatrix projector() const {
        DenseVector v = DenseVector(vector_);
        return SymmetricMatrix(v * v.transpose());
    }

    std::string describe() const {
        if (!label_.empty()) return label_;
        if (auto idx = basis_index()) return "e(" + std::to_string(*idx) + ")";
        std::string out = "k(";
        bool first = true;
        for (SparseVector::InnerIterator it(vector_); it; ++it) {
            if (!first) out += ",";
            out += std::to_string(it.index()) + ":" + std::to_string(it.value());
            first = false;
        }
        return out + ")";
    }

  private:
    SparseVector vector_;
    std::string label_;
};

/// Ordered i.i.d. observations; all events share one dimension.
class EventSequence {
  public:
    EventSequence() = default;
    explicit EventSequence(std::vector<ProjectorEvent> events) : events_(std::move(events)) {
        for (const auto& e : events_) {
            if (e.dim() != events_.front().dim()) {
                throw Error(ErrorCode::kDimensionMismatch, "event sequence mixes dims " +
                                                               std::to_string(events_.front().dim()) + " and " +
                                                               std::to_string(e.dim()));
            }
        }
    }

    void push_back(ProjectorEvent e) {
        if (!events_.empty() && e.dim() != dim()) {
            throw Error(ErrorCode::kDimensionMismatch, "event dim " + std::to_string(e.dim()) +
                                                           " does not match sequence dim " + std::to_string(dim()));
        }
        events_.push_back(std::move(e));
    }

    bool empty() const noexcept { return events_.empty(); }
    std::size_t size() const noexcept { return events_.size(); }
    Index dim() const noexcept { return events_.empty() ? 0 : events_.front().dim(); }
    const std::vector<ProjectorEvent>& events() const noexcept { return events_; }
    auto begin() const { return events_.begin(); }
    auto end() const { return events_.end(); }

  private:
    std::vector<ProjectorEvent> events_;
};

inline ProjectorEvent standard_basis_event(Index index, Index dim, std::string label = {}) {
    if (index < 0 || index >= dim) {
        throw Error(ErrorCode::kIndexOutOfRange,
                    "basis index " + std::to_string(index) + " outside dim " + std::to_string(dim));
    }
    SparseVector u(dim);
    u.insert(index) = 1.0;
    return ProjectorEvent(std::move(u), std::move(label));
}

struct WeightedIndex {
    Index index = 0;
    double weight = 0.0;
};

/// Dyad on the normalized superposition sum_w f(w) e_w. Weights are
/// nonnegative; repeated indices accumulate.
inline ProjectorEvent superpose(Index dim, const std::vector<WeightedIndex>& components, std::string label = {}) {
    SparseVector u(dim);
    for (const auto& c : components) {
        if (c.index < 0 || c.index >= dim) {
            throw Error(ErrorCode::kIndexOutOfRange,
                        "component index " + std::to_string(c.index) + " outside dim " + std::to_string(dim));
        }
        if (!(c.weight >= 0.0)) {
            throw Error(ErrorCode::kInvalidArgument, "superposition weights must be nonnegative");
        }
        u.coeffRef(c.index) += c.weight;
    }
    u.prune(0.0);
    if (u.nonZeros() == 0) {
        throw Error(ErrorCode::kAllZeroWeights, "superposition needs at least one nonzero weight");
    }
    return ProjectorEvent(std::move(u), std::move(label));
}

/// Quadratic form <u|rho|u>, never materializing the dyad.
inline double measure(const DensityMatrix& rho, const ProjectorEvent& event) {
    if (rho.dim() != event.dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "density dim " + std::to_string(rho.dim()) + " vs event dim " +
                                                       std::to_string(event.dim()));
    }
    const SparseVector& u = event.vector();
    switch (rho.structure()) {
        case DensityMatrix::Structure::kDiagonal: {
            const DenseVector& w = rho.diagonal_weights();
            double sum = 0.0;
            for (SparseVector::InnerIterator it(u); it; ++it) sum += w(it.index()) * it.value() * it.value();
            return sum;
        }
        case DensityMatrix::Structure::kRankOne: {
            const double overlap = rho.state_vector().dot(u);
            return overlap * overlap;
        }
        case DensityMatrix::Structure::kGeneral: break;
    }
    double sum = 0.0;
    for (SparseVector::InnerIterator a(u); a; ++a) {
        for (SparseVector::InnerIterator b(u); b; ++b) sum += a.value() * b.value() * rho(a.index(), b.index());
    }
    return sum;
}

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// sum_i log mu_rho(event_i); -inf once any event has measure <= kSupportTol.
inline double sequence_log_likelihood(const DensityMatrix& rho, const EventSequence& seq) {
    if (seq.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "likelihood of an empty event sequence");
    }
    double total = 0.0;
    for (const auto& e : seq) {
        const double p = measure(rho, e);
        if (p <= kSupportTol) return kNegInf;
        total += std::log(p);
    }
    return total;
}

struct Povm {
    std::vector<SymmetricMatrix> operators;
};

struct PovmDiagnostics {
    /// max(0, -smallest eigenvalue) over all operators.
    double psd_defect = 0.0;
    /// ||sum_i M_i - I||_max
    double completeness_defect = 0.0;
    bool passed = false;
};

inline PovmDiagnostics validate_povm(const Povm& p) {
    if (p.operators.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "POVM has no operators");
    }
    const Index n = p.operators.front().dim();
    DenseMatrix total = DenseMatrix::Zero(n, n);
    PovmDiagnostics d;
    for (const auto& m : p.operators) {
        if (m.dim() != n) {
            throw Error(ErrorCode::kDimensionMismatch, "POVM operators of differing dims");
        }
        const EigenDecomposition e = detail::decompose_symmetric(m.dense());
        d.psd_defect = std::max(d.psd_defect, -e.values(n - 1));
        total += m.dense();
    }
    d.completeness_defect = max_abs_diff(total, DenseMatrix::Identity(n, n));
    d.passed = d.psd_defect <= kPsdTol && d.completeness_defect <= 1e-8;
    return d;
}

}  // namespace qdir

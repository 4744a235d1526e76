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

// Subcommands of the `qdir` tool. Each returns the process exit code and
// writes diagnostics to `err`; argument parsing lives in tools/qdir.cpp.

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "qdir/io.hpp"
#include "qdir/scoring.hpp"
#include "qdir/textrep.hpp"
#include "qdir/tomography.hpp"
#include "qdir/verify.hpp"

namespace qdir::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 1,
    kExitVerificationFailure = 2,
    kExitNotConverged = 3,
};

namespace detail {

/// Writes to `path` when given, otherwise to `fallback`.
class OutputTarget {
  public:
    OutputTarget(const std::string& path, std::ostream& fallback) {
        if (!path.empty()) file_ = io::open_output(path);
        stream_ = path.empty() ? &fallback : &file_;
    }
    std::ostream& stream() { return *stream_; }

  private:
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// index

struct IndexOptions {
    std::string corpus_path;
    std::string index_path;
};

inline int cmd_index(const IndexOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        auto in = io::open_input(opt.corpus_path);
        const Corpus corpus = build_corpus(io::read_tsv(in));
        if (corpus.size() == 0) err << "warning: corpus '" << opt.corpus_path << "' has no documents\n";
        auto idx = io::open_output(opt.index_path);
        io::save_index(corpus, idx);
        out << "documents: " << corpus.size() << "\n";
        out << "vocabulary: " << corpus.dim() << "\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

// ---------------------------------------------------------------------------
// score

struct RunConfig {
    ScoringMethod method = ScoringMethod::kCosine;
    Smoothing smoothing = Smoothing::dirichlet(2000.0);
    Weighting weighting = Weighting::kTfIdf;
    std::optional<std::size_t> vocab_cap;
    std::string tag = "qdir";
};

struct ScoreOptions {
    std::string index_path;
    std::string queries_path;
    std::string out_path;
    RunConfig config;
    unsigned threads = 1;
};

namespace detail {

/// Document-side state shared by every query of a run.
struct ScoringContext {
    const Corpus& corpus;
    const RunConfig& config;
    std::vector<std::string> ids;
    std::vector<std::optional<DocumentRepresentation>> vsm_docs;
    std::optional<DenseVector> collection;
    std::size_t unrepresentable = 0;
};

inline ScoringContext prepare_documents(const Corpus& corpus, const RunConfig& config) {
    ScoringContext ctx{corpus, config, {}, {}, {}, 0};
    for (const auto& d : corpus.documents()) ctx.ids.push_back(d.id);
    if (uses_vector_space(config.method)) {
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            try {
                DocumentRepresentation rep{corpus.document(i).id, tfidf_vector(i, corpus, config.weighting), {}, {}};
                if (config.method != ScoringMethod::kCosine) rep.density = vsm_density(*rep.vector);
                ctx.vsm_docs.emplace_back(std::move(rep));
            } catch (const Error&) {
                ctx.vsm_docs.emplace_back(std::nullopt);
                ++ctx.unrepresentable;
            }
        }
    } else if (corpus.total_tokens() > 0) {
        ctx.collection = collection_model(corpus);
        for (const auto& d : corpus.documents()) {
            if (d.length == 0 && config.smoothing.kind != Smoothing::Kind::kDirichlet) ++ctx.unrepresentable;
        }
    } else {
        ctx.unrepresentable = corpus.size();
    }
    return ctx;
}

inline QueryRepresentation represent_query(const RawDocument& q, const ScoringContext& ctx, std::ostream& err) {
    const auto tokens = tokenize(q.text);
    const Corpus& corpus = ctx.corpus;
    QueryRepresentation rep;
    rep.id = q.id;
    const KnownTerms known = known_terms(tokens, corpus.vocabulary());
    if (known.dropped > 0) {
        err << "query " << q.id << ": dropped " << known.dropped << " out-of-vocabulary token(s)\n";
    }
    switch (ctx.config.method) {
        case ScoringMethod::kCosine:
        case ScoringMethod::kVsmQuantum: rep.vector = query_vector(tokens, corpus, ctx.config.weighting); break;
        case ScoringMethod::kFidelity:
            rep.density = vsm_density(query_vector(tokens, corpus, ctx.config.weighting));
            break;
        case ScoringMethod::kQlClassical: rep.terms = known.terms; break;
        case ScoringMethod::kQlQuantum: {
            EventSequence events;
            for (Index t : known.terms) events.push_back(standard_basis_event(t, corpus.dim(), corpus.vocabulary().term(t)));
            rep.events = std::move(events);
            break;
        }
        case ScoringMethod::kNegKl: rep.lm = query_lm(tokens, corpus.vocabulary()).model; break;
        case ScoringMethod::kNegVn: rep.density = lm_density(query_lm(tokens, corpus.vocabulary()).model); break;
    }
    return rep;
}

/// Score of document i; unrepresentable documents score -inf.
inline double score_document(std::size_t i, const QueryRepresentation& q, const ScoringContext& ctx) {
    const ScoringMethod m = ctx.config.method;
    if (uses_vector_space(m)) {
        const auto& rep = ctx.vsm_docs[i];
        return rep ? score(m, *rep, q) : kNegInf;
    }
    if (!ctx.collection) return kNegInf;
    const DocumentCounts& d = ctx.corpus.document(i);
    if (d.length == 0 && ctx.config.smoothing.kind != Smoothing::Kind::kDirichlet) return kNegInf;
    DocumentRepresentation rep{d.id, {}, estimate_lm(d, *ctx.collection, ctx.config.smoothing), {}};
    if (m == ScoringMethod::kQlQuantum || m == ScoringMethod::kNegVn) rep.density = lm_density(*rep.lm);
    return score(m, rep, q);
}

}  // namespace detail

inline int cmd_score(const ScoreOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        auto idx_in = io::open_input(opt.index_path);
        Corpus corpus = io::load_index(idx_in);
        if (opt.config.vocab_cap) corpus = cap_vocabulary(corpus, *opt.config.vocab_cap);
        auto q_in = io::open_input(opt.queries_path);
        const auto queries = io::read_tsv(q_in);

        const auto ctx = detail::prepare_documents(corpus, opt.config);
        if (ctx.unrepresentable > 0) {
            err << "warning: " << ctx.unrepresentable << " document(s) cannot be represented under "
                << method_name(opt.config.method) << " and score -inf\n";
        }

        detail::OutputTarget target(opt.out_path, out);
        bool failed = false;
        for (const auto& q : queries) {
            try {
                const QueryRepresentation rep = detail::represent_query(q, ctx, err);
                const RankedList list = rank_with(
                    q.id, ctx.ids, [&](std::size_t i) { return detail::score_document(i, rep, ctx); }, opt.threads);
                io::write_trec_run(target.stream(), list, opt.config.tag);
            } catch (const Error& e) {
                err << "query " << q.id << ": " << e.what() << "\n";
                failed = true;
            }
        }
        return failed ? kExitInputError : kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

// ---------------------------------------------------------------------------
// verify

struct VerifyCommandOptions {
    verify::VerifyOptions verify;
    std::string out_path;
};

inline int cmd_verify(const VerifyCommandOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const verify::VerifyReport report = verify::run(opt.verify);
        detail::OutputTarget target(opt.out_path, out);
        target.stream() << "seed: " << opt.verify.seed << "\n" << report.to_string();
        return report.all_passed() ? kExitOk : kExitVerificationFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOptions {
    std::string events_path;
    std::optional<Index> dim;
    std::string index_path;
    EstimatorConfig estimator;
    std::string out_path;
    std::string log_path;
};

inline int cmd_estimate(const EstimateOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        std::optional<Corpus> corpus;
        if (!opt.index_path.empty()) {
            auto in = io::open_input(opt.index_path);
            corpus = io::load_index(in);
        }
        const Vocabulary* vocab = corpus ? &corpus->vocabulary() : nullptr;
        Index dim = 0;
        if (opt.dim) {
            dim = *opt.dim;
        } else if (corpus) {
            dim = corpus->dim();
        } else {
            throw Error(ErrorCode::kInvalidArgument, "estimate needs --dim or --index");
        }
        if (vocab && dim != vocab->size()) {
            throw Error(ErrorCode::kInvalidArgument, "--dim disagrees with the index vocabulary size");
        }

        auto in = io::open_input(opt.events_path);
        const EventSequence seq = io::read_events(in, dim, vocab);
        const EstimateResult result = rpr_estimate(seq, dim, opt.estimator);

        detail::OutputTarget target(opt.out_path, out);
        io::write_density(target.stream(), result.density.to_symmetric().dense());
        if (!opt.log_path.empty()) {
            auto log = io::open_output(opt.log_path);
            io::write_iteration_log(log, result.log);
        }
        const auto& last = result.log.back();
        err << fmt::format("iterations: {} log_likelihood: {:.12g} dilution: {} converged: {}\n", last.iteration,
                           last.log_likelihood, result.final_dilution, result.converged ? "yes" : "no");
        return result.converged ? kExitOk : kExitNotConverged;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

// ---------------------------------------------------------------------------
// bloch

struct BlochOptions {
    std::string densities_path;
    std::string sweep;  // "", "diagonal" or "pure-positive"
    int points = 101;
    std::string out_path;
};

inline void write_bloch_row(std::ostream& out, const std::string& label, const DensityMatrix& rho) {
    const BlochPoint p = bloch_coordinates(rho);
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", label, p.x, p.y, p.z, purity(rho));
}

/// Diagonal family diag(t, 1 - t), t in [0, 1].
inline std::vector<std::pair<std::string, DensityMatrix>> diagonal_sweep(int points) {
    std::vector<std::pair<std::string, DensityMatrix>> out;
    for (int k = 0; k < points; ++k) {
        const double t = points == 1 ? 0.5 : static_cast<double>(k) / (points - 1);
        out.emplace_back("diagonal_" + std::to_string(k), diagonal_density(DenseVector{{t, 1.0 - t}}));
    }
    return out;
}

/// Pure states on (cos a, sin a), a in [0, pi/2].
inline std::vector<std::pair<std::string, DensityMatrix>> pure_positive_sweep(int points) {
    std::vector<std::pair<std::string, DensityMatrix>> out;
    for (int k = 0; k < points; ++k) {
        const double a = points == 1 ? std::numbers::pi / 4 : std::numbers::pi / 2 * k / (points - 1);
        out.emplace_back("pure_positive_" + std::to_string(k),
                         pure_state(DenseVector{{std::max(0.0, std::cos(a)), std::sin(a)}}));
    }
    return out;
}

inline int cmd_bloch(const BlochOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        if (opt.densities_path.empty() && opt.sweep.empty()) {
            throw Error(ErrorCode::kInvalidArgument, "bloch needs a densities file or --sweep");
        }
        if (opt.points < 1) throw Error(ErrorCode::kInvalidArgument, "--points must be positive");
        std::vector<io::LabeledMatrix> inputs;
        if (!opt.densities_path.empty()) {
            auto in = io::open_input(opt.densities_path);
            inputs = io::read_densities(in);
        }
        std::vector<std::pair<std::string, DensityMatrix>> sweep;
        if (opt.sweep == "diagonal") {
            sweep = diagonal_sweep(opt.points);
        } else if (opt.sweep == "pure-positive") {
            sweep = pure_positive_sweep(opt.points);
        } else if (!opt.sweep.empty()) {
            throw Error(ErrorCode::kInvalidArgument, "unknown sweep '" + opt.sweep + "' (diagonal|pure-positive)");
        }

        detail::OutputTarget target(opt.out_path, out);
        target.stream() << "label,x,y,z,purity\n";
        bool failed = false;
        for (const auto& m : inputs) {
            try {
                if (m.matrix.rows() != 2) {
                    throw Error(ErrorCode::kWrongDimension, "dim " + std::to_string(m.matrix.rows()) + " != 2");
                }
                write_bloch_row(target.stream(), m.label, new_density(SymmetricMatrix(m.matrix)));
            } catch (const Error& e) {
                err << "density '" << m.label << "' (line " << m.line << "): " << e.what() << "\n";
                failed = true;
            }
        }
        for (const auto& [label, rho] : sweep) write_bloch_row(target.stream(), label, rho);
        return failed ? kExitInputError : kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

}  // namespace qdir::cli

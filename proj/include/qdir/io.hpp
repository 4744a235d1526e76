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

// Text formats read and written by the command line tool.
//
//   corpus / queries   <id>\t<text> per line (blank lines ignored)
//   index              JSON document, see save_index
//   density            "<dim>" line, then dim lines of dim numbers
//   density list       density blocks, each optionally preceded by "# <label>"
//   events             <count>\te(<i>)  or  <count>\tk(<i>,<j>,<w_i>,<w_j>)
//                      where i, j are term indices or vocabulary terms
//   run                TREC: <qid> Q0 <docid> <rank> <score> <tag>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qdir/densmat.hpp"
#include "qdir/quantumprob.hpp"
#include "qdir/scoring.hpp"
#include "qdir/textrep.hpp"
#include "qdir/tomography.hpp"

namespace qdir::io {

inline constexpr int kIndexFormatVersion = 1;

inline Error parse_error(std::size_t line, const std::string& what) {
    return Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + what);
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "' for reading");
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// `<id>\t<text>` records. Blank lines are skipped; a nonblank line without
/// a TAB or with an empty id is a ParseError.
inline std::vector<RawDocument> read_tsv(std::istream& in) {
    std::vector<RawDocument> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw parse_error(lineno, "expected <id><TAB><text>");
        if (tab == 0) throw parse_error(lineno, "empty id");
        out.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Index

inline nlohmann::json index_to_json(const Corpus& corpus) {
    nlohmann::json docs = nlohmann::json::array();
    for (const auto& d : corpus.documents()) {
        nlohmann::json counts = nlohmann::json::array();
        for (const auto& tc : d.counts) counts.push_back({tc.term, tc.count});
        docs.push_back({{"id", d.id}, {"length", d.length}, {"counts", std::move(counts)}});
    }
    return {
        {"format", "qdir-index"},
        {"version", kIndexFormatVersion},
        {"vocabulary", corpus.vocabulary().terms()},
        {"documents", std::move(docs)},
        {"statistics",
         {{"documents", corpus.size()},
          {"total_tokens", corpus.total_tokens()},
          {"collection_counts", corpus.collection_counts()},
          {"document_frequencies", corpus.document_frequencies()}}},
    };
}

inline Corpus index_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format") != "qdir-index") throw Error(ErrorCode::kParseError, "not a qdir index");
        if (j.at("version").get<int>() != kIndexFormatVersion) {
            throw Error(ErrorCode::kParseError, "unsupported index version " + j.at("version").dump());
        }
        Vocabulary vocab;
        for (const auto& t : j.at("vocabulary")) {
            const auto term = t.get<std::string>();
            if (vocab.add(term) != vocab.size() - 1) throw Error(ErrorCode::kParseError, "repeated term " + term);
        }
        std::vector<DocumentCounts> docs;
        for (const auto& d : j.at("documents")) {
            DocumentCounts dc{d.at("id").get<std::string>(), {}, 0};
            for (const auto& pair : d.at("counts")) {
                dc.counts.push_back({pair.at(0).get<Index>(), pair.at(1).get<std::uint64_t>()});
            }
            docs.push_back(std::move(dc));
        }
        Corpus corpus(std::move(vocab), std::move(docs));
        const auto& stats = j.at("statistics");
        const bool consistent =
            stats.at("documents").get<std::size_t>() == corpus.size() &&
            stats.at("total_tokens").get<std::uint64_t>() == corpus.total_tokens() &&
            stats.at("collection_counts").get<std::vector<std::uint64_t>>() == corpus.collection_counts() &&
            stats.at("document_frequencies").get<std::vector<std::uint64_t>>() == corpus.document_frequencies();
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            if (j.at("documents").at(i).at("length").get<std::uint64_t>() != corpus.document(i).length) {
                throw Error(ErrorCode::kParseError, "stored length of '" + corpus.document(i).id + "' is stale");
            }
        }
        if (!consistent) throw Error(ErrorCode::kParseError, "stored statistics disagree with document counts");
        return corpus;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kParseError, std::string("malformed index: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::kParseError) throw;
        throw Error(ErrorCode::kParseError, e.what());
    }
}

inline void save_index(const Corpus& corpus, std::ostream& out) { out << index_to_json(corpus).dump(1) << "\n"; }

inline Corpus load_index(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kParseError, std::string("index is not valid JSON: ") + e.what());
    }
    return index_from_json(j);
}

// ---------------------------------------------------------------------------
// Densities

inline void write_density(std::ostream& out, const DenseMatrix& m) {
    out << m.rows() << "\n";
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << fmt::format("{:.17g}", m(i, j));
        out << "\n";
    }
}

struct LabeledMatrix {
    std::string label;
    DenseMatrix matrix;
    std::size_t line = 0;
};

namespace detail {

inline double parse_double(std::string_view token, std::size_t lineno) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw parse_error(lineno, "bad number '" + std::string(token) + "'");
    }
    return v;
}

template <class Int>
Int parse_int(std::string_view token, std::size_t lineno) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw parse_error(lineno, "bad integer '" + std::string(token) + "'");
    }
    return v;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace detail

/// Reads density blocks. Matrices must be square and symmetric to 1e-9.
inline std::vector<LabeledMatrix> read_densities(std::istream& in) {
    std::vector<LabeledMatrix> out;
    std::string line;
    std::size_t lineno = 0;
    std::string pending_label;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            pending_label = std::string(trim(t.substr(1)));
            continue;
        }
        LabeledMatrix block;
        block.line = lineno;
        block.label = pending_label.empty() ? "rho" + std::to_string(out.size()) : pending_label;
        pending_label.clear();
        const auto dim = detail::parse_int<Index>(t, lineno);
        if (dim < 1) throw parse_error(lineno, "dimension must be positive");
        block.matrix.resize(dim, dim);
        for (Index i = 0; i < dim; ++i) {
            if (!std::getline(in, line)) throw parse_error(lineno + 1, "unexpected end of density block");
            ++lineno;
            const auto tokens = detail::split_ws(line);
            if (static_cast<Index>(tokens.size()) != dim) {
                throw parse_error(lineno, "expected " + std::to_string(dim) + " entries, got " +
                                              std::to_string(tokens.size()));
            }
            for (Index j = 0; j < dim; ++j) block.matrix(i, j) = detail::parse_double(tokens[static_cast<std::size_t>(j)], lineno);
        }
        if ((block.matrix - block.matrix.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
            throw parse_error(block.line, "matrix '" + block.label + "' is not symmetric");
        }
        out.push_back(std::move(block));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Events

namespace detail {

inline Index resolve_term(std::string_view token, const Vocabulary* vocab, Index dim, std::size_t lineno) {
    token = trim(token);
    if (token.empty()) throw parse_error(lineno, "empty term reference");
    const bool numeric = std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
    Index idx = 0;
    if (numeric) {
        idx = parse_int<Index>(token, lineno);
    } else {
        if (!vocab) throw parse_error(lineno, "term '" + std::string(token) + "' needs an index to resolve");
        const auto found = vocab->find(token);
        if (!found) throw parse_error(lineno, "unknown term '" + std::string(token) + "'");
        idx = *found;
    }
    if (idx >= dim) {
        throw parse_error(lineno, "index " + std::to_string(idx) + " outside dim " + std::to_string(dim));
    }
    return idx;
}

inline std::string term_label(Index idx, const Vocabulary* vocab) {
    return vocab ? vocab->term(idx) : "e" + std::to_string(idx);
}

}  // namespace detail

/// Parses an events file into a sequence of dimension `dim`. Term names
/// resolve through `vocab` when one is given.
inline EventSequence read_events(std::istream& in, Index dim, const Vocabulary* vocab = nullptr) {
    EventSequence seq;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view t = trim(line);
        if (t.empty()) continue;
        const auto tab = t.find('\t');
        if (tab == std::string_view::npos) throw parse_error(lineno, "expected <count><TAB><event>");
        const auto count = detail::parse_int<std::uint64_t>(trim(t.substr(0, tab)), lineno);
        if (count == 0) throw parse_error(lineno, "count must be positive");
        const std::string_view spec = trim(t.substr(tab + 1));
        if (spec.size() < 4 || spec[1] != '(' || spec.back() != ')') {
            throw parse_error(lineno, "expected e(...) or k(...), got '" + std::string(spec) + "'");
        }
        const std::string_view body = spec.substr(2, spec.size() - 3);
        std::vector<std::string_view> args;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= body.size(); ++i) {
            if (i == body.size() || body[i] == ',') {
                args.push_back(body.substr(start, i - start));
                start = i + 1;
            }
        }
        std::optional<ProjectorEvent> event;
        try {
            if (spec[0] == 'e' && args.size() == 1) {
                const Index idx = detail::resolve_term(args[0], vocab, dim, lineno);
                event = standard_basis_event(idx, dim, detail::term_label(idx, vocab));
            } else if (spec[0] == 'k' && args.size() == 4) {
                const Index a = detail::resolve_term(args[0], vocab, dim, lineno);
                const Index b = detail::resolve_term(args[1], vocab, dim, lineno);
                if (a == b) throw parse_error(lineno, "compound event needs two distinct terms");
                const double wa = detail::parse_double(trim(args[2]), lineno);
                const double wb = detail::parse_double(trim(args[3]), lineno);
                event = superpose(dim, {{a, wa}, {b, wb}},
                                  detail::term_label(a, vocab) + "_" + detail::term_label(b, vocab));
            } else {
                throw parse_error(lineno, "expected e(<term>) or k(<term>,<term>,<w>,<w>)");
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::kParseError) throw;
            throw parse_error(lineno, e.what());
        }
        for (std::uint64_t k = 0; k < count; ++k) seq.push_back(*event);
    }
    if (seq.empty()) throw Error(ErrorCode::kParseError, "events file contains no events");
    return seq;
}

inline void write_iteration_log(std::ostream& out, const std::vector<IterationRecord>& log) {
    out << "iteration,log_likelihood,delta\n";
    for (const auto& r : log) out << fmt::format("{},{:.17g},{:.17g}\n", r.iteration, r.log_likelihood, r.delta);
}

// ---------------------------------------------------------------------------
// Runs

inline void write_trec_run(std::ostream& out, const RankedList& list, std::string_view tag) {
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        const auto& e = list.entries[i];
        out << fmt::format("{} Q0 {} {} {:.6f} {}\n", list.query_id, e.doc_id, i + 1, e.score, tag);
    }
}

}  // namespace qdir::io

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

#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "qdir/commands.hpp"

namespace {

std::vector<qdir::Index> parse_sizes(const std::string& text) {
    std::vector<qdir::Index> sizes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) sizes.push_back(std::stol(item));
    return sizes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Density-matrix views of vector space and language models for retrieval"};
    app.require_subcommand(1);

    // index
    qdir::cli::IndexOptions index_opt;
    auto* index_cmd = app.add_subcommand("index", "Build an index from a <id><TAB><text> corpus file");
    index_cmd->add_option("corpus", index_opt.corpus_path, "Corpus file")->required();
    index_cmd->add_option("index", index_opt.index_path, "Index file to write")->required();

    // score
    qdir::cli::ScoreOptions score_opt;
    std::string method, smoothing = "dirichlet:2000", weighting = "tfidf";
    std::size_t vocab_cap = 0;
    auto* score_cmd = app.add_subcommand("score", "Rank indexed documents for each query; writes a TREC run");
    score_cmd->add_option("index", score_opt.index_path, "Index file")->required();
    score_cmd->add_option("queries", score_opt.queries_path, "Queries file (<id><TAB><text>)")->required();
    score_cmd->add_option("--method", method,
                          "cosine|vsm-quantum|fidelity|ql-classical|ql-quantum|neg-kl|neg-vn")
        ->required();
    score_cmd->add_option("--smoothing", smoothing, "dirichlet:<mu>|jm:<lambda>|none")->capture_default_str();
    score_cmd->add_option("--weighting", weighting, "tf|tfidf")->capture_default_str();
    score_cmd->add_option("--vocab-cap", vocab_cap, "Keep the N most frequent terms (0 keeps all)");
    score_cmd->add_option("--tag", score_opt.config.tag, "Run tag")->capture_default_str();
    score_cmd->add_option("--threads", score_opt.threads, "Scoring threads")->capture_default_str();
    score_cmd->add_option("--out", score_opt.out_path, "Run file (default stdout)");

    // verify
    qdir::cli::VerifyCommandOptions verify_opt;
    std::string sizes = "2,5,20,50";
    auto* verify_cmd = app.add_subcommand("verify", "Run the seeded property suite");
    verify_cmd->add_option("--seed", verify_opt.verify.seed, "PRNG seed")->capture_default_str();
    verify_cmd->add_option("--sizes", sizes, "Comma-separated dimensions")->capture_default_str();
    verify_cmd->add_option("--threads", verify_opt.verify.threads, "Worker threads")->capture_default_str();
    verify_cmd->add_option("--out", verify_opt.out_path, "Report file (default stdout)");

    // estimate
    qdir::cli::EstimateOptions estimate_opt;
    qdir::Index dim = 0;
    auto* estimate_cmd = app.add_subcommand("estimate", "Maximum-likelihood density from an events file");
    estimate_cmd->add_option("events", estimate_opt.events_path, "Events file")->required();
    estimate_cmd->add_option("--dim", dim, "Hilbert space dimension");
    estimate_cmd->add_option("--index", estimate_opt.index_path, "Index used to resolve term names");
    estimate_cmd->add_option("--max-iter", estimate_opt.estimator.max_iterations)->capture_default_str();
    estimate_cmd->add_option("--tol", estimate_opt.estimator.rel_tolerance, "Relative log-likelihood tolerance")
        ->capture_default_str();
    estimate_cmd->add_option("--dilution", estimate_opt.estimator.dilution, "Initial dilution in (0, 1]")
        ->capture_default_str();
    estimate_cmd->add_option("--max-dim", estimate_opt.estimator.max_dim)->capture_default_str();
    estimate_cmd->add_option("--out", estimate_opt.out_path, "Density file (default stdout)");
    estimate_cmd->add_option("--log", estimate_opt.log_path, "Iteration log CSV");

    // bloch
    qdir::cli::BlochOptions bloch_opt;
    auto* bloch_cmd = app.add_subcommand("bloch", "Bloch coordinates of 2x2 densities as CSV");
    bloch_cmd->add_option("densities", bloch_opt.densities_path, "Densities file");
    bloch_cmd->add_option("--sweep", bloch_opt.sweep, "diagonal|pure-positive");
    bloch_cmd->add_option("--points", bloch_opt.points, "Sweep points")->capture_default_str();
    bloch_cmd->add_option("--out", bloch_opt.out_path, "CSV file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? qdir::cli::kExitOk : qdir::cli::kExitInputError;
    }

    try {
        if (*index_cmd) return qdir::cli::cmd_index(index_opt, std::cout, std::cerr);
        if (*score_cmd) {
            score_opt.config.method = qdir::parse_method(method);
            score_opt.config.smoothing = qdir::Smoothing::parse(smoothing);
            score_opt.config.weighting = qdir::parse_weighting(weighting);
            if (vocab_cap > 0) score_opt.config.vocab_cap = vocab_cap;
            return qdir::cli::cmd_score(score_opt, std::cout, std::cerr);
        }
        if (*verify_cmd) {
            verify_opt.verify.sizes = parse_sizes(sizes);
            return qdir::cli::cmd_verify(verify_opt, std::cout, std::cerr);
        }
        if (*estimate_cmd) {
            if (estimate_cmd->count("--dim") > 0) estimate_opt.dim = dim;
            return qdir::cli::cmd_estimate(estimate_opt, std::cout, std::cerr);
        }
        if (*bloch_cmd) return qdir::cli::cmd_bloch(bloch_opt, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return qdir::cli::kExitInputError;
    }
    return qdir::cli::kExitInputError;
}

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


#include "qdir/io.hpp"

#include <functional>
#include <iterator>
#include <sstream>

#include "gtest/gtest.h"

#include "test_util.hpp"

using namespace qdir;
using qdir::testing::error_of;

namespace {

std::string message_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

Corpus toy_corpus() { return build_corpus({{"d1", "a b a"}, {"d2", "b c"}, {"d3", "c c c d"}}); }

}  // namespace

TEST(ReadTsv, ParsesRecords) {
    std::istringstream in("d1\tHello world\n\nd2\ttab\tinside\r\n");
    const auto docs = io::read_tsv(in);
    ASSERT_EQ(docs.size(), 2u);
    EXPECT_EQ(docs[0].id, "d1");
    EXPECT_EQ(docs[0].text, "Hello world");
    EXPECT_EQ(docs[1].text, "tab\tinside");
}

TEST(ReadTsv, ReportsLineOfMalformedRecord) {
    std::istringstream no_tab("d1\tok\n\nbroken line\n");
    EXPECT_NE(message_of([&] { io::read_tsv(no_tab); }).find("line 3"), std::string::npos);
    std::istringstream no_id("\tmissing id\n");
    EXPECT_EQ(error_of([&] { io::read_tsv(no_id); }), ErrorCode::kParseError);
    std::istringstream empty("");
    EXPECT_TRUE(io::read_tsv(empty).empty());
}

TEST(Index, RoundTrip) {
    const Corpus c = toy_corpus();
    std::stringstream buf;
    io::save_index(c, buf);
    const Corpus back = io::load_index(buf);
    EXPECT_EQ(back.vocabulary(), c.vocabulary());
    EXPECT_EQ(back.documents(), c.documents());
    EXPECT_EQ(back.collection_counts(), c.collection_counts());
    EXPECT_EQ(back.document_frequencies(), c.document_frequencies());
    EXPECT_EQ(back.total_tokens(), c.total_tokens());

    std::stringstream again;
    io::save_index(back, again);
    std::stringstream first;
    io::save_index(c, first);
    EXPECT_EQ(again.str(), first.str());
}

TEST(Index, RejectsCorruptFiles) {
    nlohmann::json j = io::index_to_json(toy_corpus());
    j["statistics"]["total_tokens"] = 99;
    EXPECT_EQ(error_of([&] { io::index_from_json(j); }), ErrorCode::kParseError);

    j = io::index_to_json(toy_corpus());
    j["version"] = 7;
    EXPECT_EQ(error_of([&] { io::index_from_json(j); }), ErrorCode::kParseError);

    j = io::index_to_json(toy_corpus());
    j["documents"][0]["counts"][0][0] = 40;
    EXPECT_EQ(error_of([&] { io::index_from_json(j); }), ErrorCode::kParseError);

    j = io::index_to_json(toy_corpus());
    j.erase("vocabulary");
    EXPECT_EQ(error_of([&] { io::index_from_json(j); }), ErrorCode::kParseError);

    std::istringstream garbage("{not json");
    EXPECT_EQ(error_of([&] { io::load_index(garbage); }), ErrorCode::kParseError);
}

TEST(Densities, WriteThenRead) {
    const DenseMatrix m = (DenseMatrix(2, 2) << 0.5, 0.25, 0.25, 0.5).finished();
    std::stringstream buf;
    io::write_density(buf, m);
    EXPECT_EQ(buf.str(), "2\n0.5 0.25\n0.25 0.5\n");
    const auto read = io::read_densities(buf);
    ASSERT_EQ(read.size(), 1u);
    EXPECT_EQ(read[0].matrix, m);
    EXPECT_EQ(read[0].label, "rho0");
}

TEST(Densities, FullPrecision) {
    const DenseMatrix m = (DenseMatrix(1, 1) << 1.0 / 3.0).finished();
    std::stringstream buf;
    io::write_density(buf, m);
    EXPECT_EQ(io::read_densities(buf)[0].matrix(0, 0), 1.0 / 3.0);
}

TEST(Densities, LabelsAndErrors) {
    std::istringstream in("# sigma\n2\n0.5 0.5\n0.5 0.5\n\n2\n1 0\n0 0\n");
    const auto read = io::read_densities(in);
    ASSERT_EQ(read.size(), 2u);
    EXPECT_EQ(read[0].label, "sigma");
    EXPECT_EQ(read[1].label, "rho1");
    EXPECT_EQ(read[1].line, 6u);

    std::istringstream asym("2\n0.5 0.1\n0.3 0.5\n");
    EXPECT_EQ(error_of([&] { io::read_densities(asym); }), ErrorCode::kParseError);
    std::istringstream short_row("2\n0.5 0.5\n0.5\n");
    EXPECT_NE(message_of([&] { io::read_densities(short_row); }).find("line 3"), std::string::npos);
    std::istringstream truncated("3\n1 0 0\n");
    EXPECT_EQ(error_of([&] { io::read_densities(truncated); }), ErrorCode::kParseError);
    std::istringstream bad_number("1\nx\n");
    EXPECT_EQ(error_of([&] { io::read_densities(bad_number); }), ErrorCode::kParseError);
}

TEST(Events, BasisAndCompound) {
    std::istringstream in("2\te(0)\n\n1\tk(0, 2, 3, 4)\n");
    const EventSequence seq = io::read_events(in, 3);
    ASSERT_EQ(seq.size(), 3u);
    auto it = seq.begin();
    EXPECT_EQ(it->basis_index(), 0);
    EXPECT_EQ(it->label(), "e0");
    ++it;
    ++it;
    EXPECT_NEAR(it->vector().coeff(0), 0.6, 1e-15);
    EXPECT_NEAR(it->vector().coeff(2), 0.8, 1e-15);
    EXPECT_EQ(it->label(), "e0_e2");
}

TEST(Events, TermNamesThroughVocabulary) {
    const Corpus c = toy_corpus();
    std::istringstream in("1\te(c)\n1\tk(a,b,1,1)\n");
    const EventSequence seq = io::read_events(in, c.dim(), &c.vocabulary());
    EXPECT_EQ(seq.begin()->basis_index(), 2);
    EXPECT_EQ(std::next(seq.begin())->label(), "a_b");

    std::istringstream unknown("1\te(zzz)\n");
    EXPECT_EQ(error_of([&] { io::read_events(unknown, c.dim(), &c.vocabulary()); }), ErrorCode::kParseError);
    std::istringstream no_vocab("1\te(a)\n");
    EXPECT_EQ(error_of([&] { io::read_events(no_vocab, 4); }), ErrorCode::kParseError);
}

TEST(Events, Errors) {
    const auto code = [](const std::string& text, Index dim) {
        std::istringstream in(text);
        return error_of([&] { io::read_events(in, dim); });
    };
    EXPECT_EQ(code("", 2), ErrorCode::kParseError);
    EXPECT_EQ(code("\n\n", 2), ErrorCode::kParseError);
    EXPECT_EQ(code("1 e(0)\n", 2), ErrorCode::kParseError);
    EXPECT_EQ(code("0\te(0)\n", 2), ErrorCode::kParseError);
    EXPECT_EQ(code("1\te(2)\n", 2), ErrorCode::kParseError);
    EXPECT_EQ(code("1\tk(0,0,1,1)\n", 2), ErrorCode::kParseError);
    EXPECT_EQ(code("1\tk(0,1,0,0)\n", 2), ErrorCode::kParseError);
    EXPECT_EQ(code("1\tk(0,1,-1,1)\n", 2), ErrorCode::kParseError);
    EXPECT_EQ(code("1\tf(0)\n", 2), ErrorCode::kParseError);
    EXPECT_EQ(code("1\te(0,1)\n", 2), ErrorCode::kParseError);
    std::istringstream late("1\te(0)\n1\te(5)\n");
    EXPECT_NE(message_of([&] { io::read_events(late, 2); }).find("line 2"), std::string::npos);
}

TEST(IterationLog, Format) {
    std::ostringstream out;
    io::write_iteration_log(out, {{0, -2.0, 0.0, 1.0}, {1, -1.5, 0.5, 1.0}});
    EXPECT_EQ(out.str(), "iteration,log_likelihood,delta\n0,-2,0\n1,-1.5,0.5\n");
}

TEST(TrecRun, Format) {
    const RankedList list = make_ranked_list("q7", {{"d2", 0.25}, {"d1", 0.5}, {"d3", kNegInf}});
    std::ostringstream out;
    io::write_trec_run(out, list, "qdir");
    EXPECT_EQ(out.str(),
              "q7 Q0 d1 1 0.500000 qdir\n"
              "q7 Q0 d2 2 0.250000 qdir\n"
              "q7 Q0 d3 3 -inf qdir\n");
}

TEST(Files, MissingPathIsIoError) {
    EXPECT_EQ(error_of([] { io::open_input("/nonexistent/dir/file"); }), ErrorCode::kIoError);
    EXPECT_EQ(error_of([] { io::open_output("/nonexistent/dir/file"); }), ErrorCode::kIoError);
}

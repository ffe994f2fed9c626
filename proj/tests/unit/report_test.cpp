// Copyright 2026 The hfree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <iomanip>
#include <sstream>

#include "hfree/report.hpp"

namespace hfree {
namespace {

std::string fmt_hex(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << v;
  return out.str();
}

ExtensionPattern parse(const std::string& text) {
  std::istringstream in(text);
  return parse_pattern_text(in, "p");
}

TEST(Hash, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Hash, ConfigHashIsOrderSensitiveAndStable) {
  const HeaderFields a = {{"n", "100"}, {"h", "K3"}};
  const HeaderFields b = {{"h", "K3"}, {"n", "100"}};
  EXPECT_EQ(config_hash(a).size(), 16U);
  EXPECT_EQ(config_hash(a), config_hash(a));
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a), fmt_hex(fnv1a("n=100\nh=K3\n")));
}

TEST(Header, Lines) {
  std::ostringstream out;
  write_header_block(out, {{"seed", "4"}, {"n", "10"}});
  EXPECT_EQ(out.str(), "# seed: 4\n# n: 10\n");
}

TEST(Csv, CheckpointAndCensusRows) {
  std::ostringstream out;
  write_checkpoint_header(out);
  TrackSample s;
  s.i = 12;
  s.t = 0.5;
  s.pattern = 0;
  s.anchor = 3;
  s.observed = 40;
  s.predicted = 41.25;
  s.env_lo = 30;
  s.env_hi = 52.5;
  s.trackable = true;
  write_checkpoint_row(out, s, "degree");
  EXPECT_EQ(out.str(),
            "i,t,pattern,anchor,observed,predicted,env_lo,env_hi,trackable\n"
            "12,0.5,degree,3,40,41.25,30,52.5,1\n");
  std::ostringstream census;
  write_census_header(census);
  CensusReport r;
  r.observed = 6;
  r.predicted = 5.5;
  r.regime = Regime::Critical;
  write_census_row(census, 7, 0.25, "K4,4", r);
  EXPECT_EQ(census.str(), "i,t,gamma,observed,predicted,regime\n7,0.25,K4,4,6,5.5,Critical\n");
}

TEST(FormatReal, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 123456.789, 1e-9}) {
    EXPECT_NEAR(std::stod(format_real(x)) / x, 1.0, 1e-8);
  }
  EXPECT_EQ(format_real(2.0), "2");
}

TEST(PatternText, JIndicesFollowFileOrder) {
  // Edges listed out of canonical order: J = second `e` line = {0, 2}.
  const ExtensionPattern p = parse("v 3\ne 1 2\ne 0 2\nJ 1\nA 1\n");
  ASSERT_EQ(p.e_j(), 1U);
  EXPECT_EQ(p.j().edges()[0], (Edge{0, 2}));
  ASSERT_EQ(p.open_edges().size(), 1U);
  EXPECT_EQ(p.open_edges()[0], (Edge{1, 2}));
  EXPECT_EQ(p.anchor().size(), 1U);
  EXPECT_EQ(p.name(), "p");
}

TEST(PatternText, Defaults) {
  const ExtensionPattern p = parse("v 2\ne 0 1\n");
  EXPECT_EQ(p.e_j(), 1U);
  EXPECT_TRUE(p.anchor().empty());
}

TEST(PatternText, Errors) {
  EXPECT_THROW(parse("v 3\ne 0 1\nJ 3\n"), GraphError);
  EXPECT_THROW(parse("v 3\ne 0 1\nJ 0\nJ 0\n"), GraphError);
  EXPECT_THROW(parse("v 3\ne 0 1\nA 0\nA 1\n"), GraphError);
  EXPECT_THROW(parse("v 3\ne 0 1\nA 0 1\n"), GraphError);  // anchor not independent
  EXPECT_THROW(parse("v 3\ne 0 1\nJ x\n"), GraphError);
  EXPECT_THROW(load_pattern("/nonexistent/file.pattern"), GraphError);
}

TEST(PatternFile, NameFromStem) {
  const ExtensionPattern p = load_pattern(HFREE_TEST_DATA_DIR "/cherry_open.pattern");
  EXPECT_EQ(p.name(), "cherry_open");
  EXPECT_EQ(p.e_gamma(), 2U);
  EXPECT_EQ(p.e_j(), 1U);
}

TEST(FitCsv, HeaderCommentsAndErrors) {
  std::istringstream in("# sweep\nn,value\n1024,10\n\n2048,20.5\n");
  const auto rows = parse_fit_csv(in);
  ASSERT_EQ(rows.size(), 2U);
  EXPECT_EQ(rows[1], (std::pair<double, double>{2048, 20.5}));
  std::istringstream bad("1024,10\nfoo,bar\n");
  EXPECT_THROW(parse_fit_csv(bad), std::invalid_argument);
  std::istringstream nocomma("1024 10\n");
  EXPECT_THROW(parse_fit_csv(nocomma), std::invalid_argument);
}

}  // namespace
}  // namespace hfree

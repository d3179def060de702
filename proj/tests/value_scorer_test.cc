// Copyright 2025 The ctmcts Authors.
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

#include <sstream>

#include "ctmcts/error.h"
#include "ctmcts/prompts.h"
#include "ctmcts/value_scorer.h"
#include "doctest.h"
#include "fixtures.h"

using namespace ctmcts;
using namespace ctmcts::testing;

namespace {
double label(std::vector<std::string> golds, const std::string& path) {
  return containment_label(golds, path);
}
}  // namespace

TEST_CASE("containment label grades") {
  CHECK(label({"james tuchet"}, "...james tuchet, 5th baron audley...") == kFullMatch);
  CHECK(label({"james tuchet"}, "...george tuchet was...") == kPartialMatch);
  CHECK(label({"fluid"}, "the consul is an opera") == kNoMatch);
  CHECK(label({"James Tuchet"}, "JAMES TUCHET") == kFullMatch);
  CHECK(label({"the opera"}, "a famous the house") == kNoMatch);  // stopwords only
  CHECK(label({"x y"}, "x y") == kFullMatch);
  CHECK(label({"x y"}, "x z y ") == kNoMatch);  // one-symbol words never partial
  CHECK(label({"tuchet"}, "tuchets ") == kFullMatch);  // substring rule first
  CHECK(label({"james tuchet"}, "tuchetson ") == kNoMatch);
  CHECK(label({"james tuchet"}, "a tuchet") == kNoMatch);  // word may still grow
  CHECK(label({"water", "fluid"}, "retains fluid") == kFullMatch);
}

TEST_CASE("label is monotone under extension") {
  const std::vector<std::string> golds = {"george orwell", "eric blair"};
  const std::string text = "the author eric arthur blair wrote as george orwell in london";
  double prev = 0.0;
  for (std::size_t n = 1; n <= text.size(); ++n) {
    const double l = containment_label(golds, text.substr(0, n));
    CHECK(l >= prev);
    prev = l;
  }
  CHECK(prev == kFullMatch);
}

TEST_CASE("stopword list") {
  CHECK(stopwords().size() == 50);
  bool has_the = false;
  for (auto w : stopwords()) has_the = has_the || w == "the";
  CHECK(has_the);
}

TEST_CASE("oracle scorer") {
  const OracleScorer s({"fluid"});
  CHECK(s.score("q", "retains fluid") == 1.0);
  CHECK(s.score("q", "the opera") == 0.0);
  CHECK_THROWS_AS(s.score("", "x"), ContractError);
  CHECK_THROWS_AS(s.score("q", ""), ContractError);
  CHECK_THROWS_AS(OracleScorer({}), ContractError);
}

TEST_CASE("remote scorer") {
  StubServer stub;
  nlohmann::json seen;
  std::mutex mu;
  stub.server().Post("/v1/value", [&](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    {
      std::lock_guard<std::mutex> lock(mu);
      seen = body;
    }
    const std::string ref = body["reference"];
    if (ref == "high") res.set_content(R"({"score": 1.4})", "application/json");
    else if (ref == "low") res.set_content(R"({"score": -2})", "application/json");
    else if (ref == "text") res.set_content(R"({"score": "0.5"})", "application/json");
    else res.set_content(R"({"score": 0.73})", "application/json");
  });
  stub.start();

  const RemoteScorer client(HttpClientConfig{stub.url()}, PromptSide::kClient,
                            default_value_template());
  CHECK(client.score("who?", "path") == doctest::Approx(0.73));
  {
    std::lock_guard<std::mutex> lock(mu);
    CHECK(seen["query"] == "who?");
    CHECK(seen["reference"] == "path");
    const std::string prompt = seen["prompt"];
    CHECK(prompt.find("Query: who?\nGenerated reference: path\nScore:") != std::string::npos);
  }
  CHECK(client.score("q", "high") == 1.0);
  CHECK(client.score("q", "low") == 0.0);
  CHECK_THROWS_AS(client.score("q", "text"), ProtocolError);

  const RemoteScorer server(HttpClientConfig{stub.url()}, PromptSide::kServer, "");
  CHECK(server.score("q", "path") == doctest::Approx(0.73));
  std::lock_guard<std::mutex> lock(mu);
  CHECK_FALSE(seen.contains("prompt"));
}

TEST_CASE("training pairs") {
  std::vector<Trajectory> rollouts(3);
  rollouts[0].text = "lives in valmora.";
  rollouts[1].text = "enjoys tea";
  rollouts[2].text = "valmora city ";
  std::ostringstream out;
  const std::vector<std::string> golds = {"valmora city"};
  CHECK(emit_training_pairs("where?", rollouts, golds, out) == 3);
  std::istringstream lines(out.str());
  std::string line;
  std::vector<double> labels;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["question"] == "where?");
    labels.push_back(j["label"]);
  }
  CHECK(labels == std::vector<double>{0.8, 0.0, 1.0});
}

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

#include "ctmcts/config.h"
#include "ctmcts/error.h"
#include "ctmcts/harness.h"
#include "ctmcts/metrics.h"
#include "doctest.h"
#include "fixtures.h"

using namespace ctmcts;
using namespace ctmcts::testing;

namespace {

Engine make_engine(const std::vector<Document>& docs, RunConfig cfg = {}) {
  return Engine(IndexBundle{CorpusIndex::build(docs), docs}, std::move(cfg));
}

std::vector<std::string> golds(std::initializer_list<const char*> g) {
  return {g.begin(), g.end()};
}

}  // namespace

TEST_CASE("exact match") {
  CHECK(exact_match("Beijing", golds({"beijing"})) == 1.0);
  CHECK(exact_match("the opera", golds({"opera"})) == 1.0);
  CHECK(exact_match("fluid", golds({"water"})) == 0.0);
  CHECK(exact_match("Menotti!", golds({"x", "menotti"})) == 1.0);
  CHECK(exact_match("  An   Apple. ", golds({"apple"})) == 1.0);
  CHECK_THROWS_AS(exact_match("x", {}), ContractError);
  CHECK(normalize_answer("The  Consul, an Opera!") == "consul opera");
}

TEST_CASE("token f1") {
  CHECK(token_f1("the opera house", golds({"opera"})) == doctest::Approx(2.0 / 3.0));
  CHECK(token_f1("gian carlo menotti", golds({"gian carlo menotti"})) == 1.0);
  CHECK(token_f1("fluid", golds({"water"})) == 0.0);
  CHECK(token_f1("x b b", golds({"b c", "b b"})) == doctest::Approx(0.8));
  CHECK(token_f1("the", golds({"a"})) == 1.0);  // both empty after normalization
  CHECK_THROWS_AS(token_f1("x", {}), ContractError);
}

TEST_CASE("dataset parsing") {
  std::istringstream ok(
      "{\"id\": \"a\", \"question\": \"q1\", \"subject\": \"s\", \"golden_answers\": [\"x\"]}\n"
      "\n"
      "{\"id\": 7, \"question\": \"q2\", \"golden_answers\": [\"y\", \"z\"]}\n");
  const auto ex = read_dataset_jsonl(ok);
  REQUIRE(ex.size() == 2);
  CHECK(ex[0].subject == "s");
  CHECK(ex[1].id == "7");
  CHECK_FALSE(ex[1].subject.has_value());
  CHECK(ex[1].gold_answers.size() == 2);

  auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_dataset_jsonl(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1L;
  };
  const std::string good = "{\"id\":\"a\",\"question\":\"q\",\"golden_answers\":[\"x\"]}\n";
  CHECK(line_of(good + "not json\n") == 2);
  CHECK(line_of(good + good + "{\"id\":\"b\",\"question\":\"q\"}\n") == 3);
  CHECK(line_of("{\"id\":\"b\",\"question\":\"q\",\"golden_answers\":[]}\n") == 1);
  CHECK(line_of("{\"question\":\"q\",\"golden_answers\":[\"x\"]}\n") == 1);
  std::istringstream empty("\n\n");
  try {
    read_dataset_jsonl(empty);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "no examples");
  }
}

TEST_CASE("retrieval evaluation on planted answers") {
  const Fixture f = planted_answer_fixture(20);
  const Engine engine = make_engine(f.documents);
  const auto report =
      run_eval(engine, f.examples, EvalMode::kRetrievalOnly, engine.config().search);
  CHECK(report.em == 1.0);
  CHECK(report.failures == 0);
  REQUIRE(report.per_example.size() == 20);
  double em = 0.0, f1 = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    const auto& r = report.per_example[i];
    CHECK(r.id == f.examples[i].id);
    CHECK(r.f1 <= 1.0);
    CHECK(r.rollout_count > 0);
    em += r.em;
    f1 += r.f1;
  }
  CHECK(report.em == doctest::Approx(em / 20));
  CHECK(report.f1 == doctest::Approx(f1 / 20));
}

TEST_CASE("reports are deterministic across worker counts") {
  const Fixture f = planted_answer_fixture(8);
  RunConfig one;
  one.workers = 1;
  RunConfig four;
  four.workers = 4;
  const Engine a = make_engine(f.documents, one);
  const Engine b = make_engine(f.documents, four);
  const auto ra = run_eval(a, f.examples, EvalMode::kRetrievalOnly, a.config().search);
  const auto rb = run_eval(b, f.examples, EvalMode::kRetrievalOnly, b.config().search);
  CHECK(report_json(ra, false).dump() == report_json(rb, false).dump());
  CHECK_FALSE(report_json(ra, false).contains("avg_latency_ms"));
  CHECK(report_json(ra, true).contains("avg_latency_ms"));
  std::ostringstream log;
  write_example_log(ra, false, log);
  const std::string lines = log.str();
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 8);
}

TEST_CASE("full reasoning evaluation with a scripted reader") {
  const Fixture f = planted_answer_fixture(6);
  Engine engine = make_engine(f.documents);
  CHECK_THROWS_AS(engine.generator_for(f.examples[0]), Error);
  engine.set_generator_factory([](const QAExample& ex) -> std::unique_ptr<Generator> {
    return std::make_unique<EvidenceReader>(*ex.subject, ex.question);
  });
  const auto report = run_eval(engine, f.examples, EvalMode::kFullReasoning, engine.config().search);
  CHECK(report.em == 1.0);
  CHECK(report.f1 == 1.0);
  for (const auto& r : report.per_example) CHECK(r.search_count == 1);
}

TEST_CASE("engine failures are flagged and score zero") {
  const Fixture f = planted_answer_fixture(2);
  Engine engine = make_engine(f.documents);
  engine.set_generator_factory([](const QAExample&) -> std::unique_ptr<Generator> {
    return std::make_unique<ScriptedGenerator>(std::vector<std::string>{});
  });
  const auto report = run_eval(engine, f.examples, EvalMode::kFullReasoning, engine.config().search);
  CHECK(report.failures == 2);
  CHECK(report.em == 0.0);
  CHECK(report.per_example[0].error == "script exhausted");
}

TEST_CASE("grid expansion") {
  const auto points = expand_grid(nlohmann::json::parse(R"({"M": [1, 2], "G": [1, 6, 10]})"));
  REQUIRE(points.size() == 6);
  CHECK(points[0] == nlohmann::json::parse(R"({"G": 1, "M": 1})"));
  CHECK(points[1] == nlohmann::json::parse(R"({"G": 1, "M": 2})"));
  CHECK(points[5] == nlohmann::json::parse(R"({"G": 10, "M": 2})"));
  CHECK_THROWS_AS(expand_grid(nlohmann::json::object()), ContractError);
  CHECK_THROWS_AS(expand_grid(nlohmann::json::parse(R"({"G": []})")), ContractError);
  CHECK_THROWS_AS(expand_grid(nlohmann::json::parse(R"({"depth": [1]})")), ContractError);
}

TEST_CASE("ablation rows and csv") {
  const Fixture f = planted_answer_fixture(4);
  RunConfig cfg;
  cfg.search.simulations = 10;
  const Engine engine = make_engine(f.documents, cfg);
  const auto rows = run_ablation(engine, f.examples, EvalMode::kRetrievalOnly,
                                 nlohmann::json::parse(R"({"G": [1, 6], "strategy": ["greedy"]})"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].report.config.granularity == 1);
  CHECK(rows[1].report.config.granularity == 6);
  CHECK(rows[0].report.config.strategy == Strategy::kGreedy);
  CHECK(rows[0].report.config.simulations == 10);
  std::ostringstream csv;
  write_ablation_csv(rows, csv);
  std::istringstream lines(csv.str());
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header == "G,strategy,latency_ms,avg_rollout_count,avg_path_length,em,f1");
  CHECK(first.rfind("1,greedy,", 0) == 0);
}

TEST_CASE("training pairs for a dataset") {
  const Fixture f = planted_answer_fixture(3);
  const Engine engine = make_engine(f.documents);
  std::ostringstream out;
  const std::size_t n = emit_dataset_training_pairs(engine, f.examples, out);
  CHECK(n > 0);
  std::istringstream lines(out.str());
  std::string line;
  std::size_t count = 0, full = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    ++count;
    const double label = j["label"];
    CHECK((label == 0.0 || label == 0.8 || label == 1.0));
    if (label == 1.0) ++full;
  }
  CHECK(count == n);
  CHECK(full > 0);
}

TEST_CASE("run config") {
  RunConfig c;
  apply_json(c, nlohmann::json::parse(
                    R"({"G": 3, "M": 1, "lambda": 0.5, "strategy": "beam", "doc_select": "window",
                        "window_chars": 10, "workers": 2, "timing": true, "seed": 9})"));
  CHECK(c.search.granularity == 3);
  CHECK(c.search.expansions == 1);
  CHECK(c.search.lambda == 0.5);
  CHECK(c.search.strategy == Strategy::kBeam);
  CHECK(c.select == SelectStrategy::kWindow);
  CHECK(c.window_chars == 10);
  CHECK(c.timing);
  CHECK(c.search.seed == 9);
  CHECK_THROWS_AS(apply_json(c, nlohmann::json::parse(R"({"depth": 2})")), ParseError);
  CHECK_THROWS_AS(apply_json(c, nlohmann::json::parse(R"({"G": "six"})")), ParseError);
  CHECK_THROWS_AS(apply_json(c, nlohmann::json::parse("[1]")), ParseError);

  const std::string path = write_temp("cfg.json", R"({"M": 3, "top_k": 5})");
  const RunConfig loaded = load_run_config(path);
  CHECK(loaded.search.expansions == 3);
  CHECK(loaded.search.top_k == 5);
  CHECK(run_config_json(loaded)["M"] == 3);

  RunConfig bad;
  bad.tokenizer = "bpe";
  CHECK_THROWS_AS(bad.validate(), ContractError);
  bad = RunConfig{};
  bad.policy = "remote";
  CHECK_THROWS_AS(make_engine(three_doc_corpus(), bad), ContractError);
}

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

#include "doctest.h"
#include "fixtures.h"
#include "json.hpp"

using namespace ctmcts;
using namespace ctmcts::testing;

namespace {

const std::string kCli = CTMCTS_CLI;

int cli(const std::string& args, const std::string& stdout_name = "stdout.txt") {
  return run_command(kCli + " " + args + " > " + temp_path(stdout_name) + " 2> " +
                     temp_path("stderr.txt"));
}

std::string out(const std::string& name = "stdout.txt") { return read_file(temp_path(name)); }

struct Files {
  Fixture f = planted_answer_fixture(5);
  std::string corpus = write_temp("cli_corpus.jsonl", corpus_jsonl(f.documents));
  std::string dataset = write_temp("cli_dataset.jsonl", dataset_jsonl(f.examples));
  std::string index = temp_path("cli.ctix");
};

}  // namespace

TEST_CASE("index build then search") {
  Files files;
  REQUIRE(cli("index build --corpus " + files.corpus + " --out " + files.index) == 0);
  const std::string first_index = read_file(files.index);
  REQUIRE(first_index.rfind("CTIX", 0) == 0);
  REQUIRE(cli("index build --corpus " + files.corpus + " --out " + files.index) == 0);
  CHECK(read_file(files.index) == first_index);

  const std::string args = "search --index " + files.index +
                           " --question 'where does p001 live?' --subject p001 --gold " +
                           files.f.examples[1].gold_answers[0] + " --seed 3";
  REQUIRE(cli(args) == 0);
  const std::string first = out();
  const auto j = nlohmann::json::parse(first);
  CHECK(j["subject"] == "p001");
  CHECK(j["config"]["strategy"] == "ct-mcts");
  CHECK_FALSE(j["trajectories"].empty());
  CHECK(j["evidence"][0]["doc_id"] == files.f.answer_doc[1]);
  REQUIRE(cli(args) == 0);
  CHECK(out() == first);
}

TEST_CASE("baselines need no gold answers") {
  Files files;
  REQUIRE(cli("search --corpus " + files.corpus +
              " --question q --subject p002 --strategy greedy --doc-select path") == 0);
  const auto j = nlohmann::json::parse(out());
  CHECK(j["trajectories"].size() == 1);
  CHECK(j["trajectories"][0]["value"].is_null());
  CHECK(j["evidence"][0]["strategy"] == "path");
}

TEST_CASE("flags override the config file") {
  Files files;
  const std::string cfg = write_temp("cli_cfg.json", R"({"G": 2, "M": 1, "simulations": 5})");
  REQUIRE(cli("search --corpus " + files.corpus + " --config " + cfg +
              " -G 4 --question q --subject p000 --gold x") == 0);
  const auto j = nlohmann::json::parse(out());
  CHECK(j["config"]["G"] == 4);
  CHECK(j["config"]["M"] == 1);
  CHECK(j["config"]["simulations"] == 5);
}

TEST_CASE("answer with a scripted generator") {
  Files files;
  const std::string script = write_temp(
      "cli_script.json",
      R"(["<search> (subject: p003, question: where?) </search>", "<answer> somewhere </answer>"])");
  REQUIRE(cli("answer --corpus " + files.corpus + " --question 'where does p003 live?' --gold " +
              files.f.examples[3].gold_answers[0] + " --script " + script) == 0);
  const auto j = nlohmann::json::parse(out());
  CHECK(j["final_answer"] == "somewhere");
  CHECK(j["search_count"] == 1);
  CHECK(j["steps"][0]["action"] == "search");
  CHECK(j["steps"][0]["retrieval"]["evidence"].size() >= 1);
}

TEST_CASE("eval, ablate and training pairs are reproducible") {
  Files files;
  REQUIRE(cli("index build --corpus " + files.corpus + " --out " + files.index) == 0);
  const std::string log = temp_path("cli_log.jsonl");
  const std::string eval = "eval --index " + files.index + " --dataset " + files.dataset +
                           " --mode retrieval --simulations 10 --log " + log;
  REQUIRE(cli(eval) == 0);
  const std::string report = out();
  const std::string first_log = read_file(log);
  const auto j = nlohmann::json::parse(report);
  CHECK(j["em"] == 1.0);
  CHECK(j["examples"] == 5);
  CHECK_FALSE(j.contains("avg_latency_ms"));
  REQUIRE(cli(eval + " --workers 1") == 0);
  CHECK(out() == report);
  CHECK(read_file(log) == first_log);

  REQUIRE(cli(eval + " --timing") == 0);
  CHECK(nlohmann::json::parse(out()).contains("avg_latency_ms"));

  const std::string sweep = write_temp("cli_sweep.json", R"({"G": [1, 6]})");
  const std::string csv = temp_path("cli.csv");
  const std::string ablate_json = temp_path("cli_ablate.json");
  const std::string ablate = "ablate --index " + files.index + " --dataset " + files.dataset +
                             " --sweep " + sweep + " --simulations 10 --csv " + csv +
                             " --out " + ablate_json;
  REQUIRE(cli(ablate) == 0);
  const std::string first_ablate = read_file(ablate_json);
  CHECK(read_file(csv).rfind("G,latency_ms,", 0) == 0);
  CHECK(nlohmann::json::parse(first_ablate).size() == 2);
  REQUIRE(cli(ablate) == 0);
  CHECK(read_file(ablate_json) == first_ablate);

  const std::string pairs = temp_path("cli_pairs.jsonl");
  const std::string emit = "emit-training-pairs --index " + files.index + " --dataset " +
                           files.dataset + " --simulations 10 --out " + pairs;
  REQUIRE(cli(emit) == 0);
  const std::string first_pairs = read_file(pairs);
  CHECK_FALSE(first_pairs.empty());
  REQUIRE(cli(emit) == 0);
  CHECK(read_file(pairs) == first_pairs);
}

TEST_CASE("errors exit with status 2 and a message") {
  Files files;
  CHECK(cli("search --corpus /nonexistent.jsonl --question q --gold x") == 2);
  CHECK(read_file(temp_path("stderr.txt")).rfind("error: ", 0) == 0);
  CHECK(cli("search --corpus " + files.corpus + " --question q") == 2);  // oracle without gold
  CHECK(cli("search --corpus " + files.corpus + " --question q --gold x -G zero") == 2);
  CHECK(cli("search --corpus " + files.corpus + " --question q --gold x --strategy dfs") == 2);
  const std::string bad = write_temp("cli_bad.jsonl", "{\"id\": \"a\"}\n");
  CHECK(cli("eval --corpus " + files.corpus + " --dataset " + bad) == 2);
  CHECK(read_file(temp_path("stderr.txt")).find("line 1") != std::string::npos);
  CHECK(cli("ablate --corpus " + files.corpus + " --dataset " + files.dataset + " --sweep " +
            write_temp("cli_empty_sweep.json", "{}")) == 2);
  CHECK(cli("frobnicate") != 0);
}

TEST_CASE("dead corpus exits with status 3") {
  const std::vector<Document> docs = {make_document(0, "t", "abc")};
  const std::string corpus = write_temp("cli_dead.jsonl", corpus_jsonl(docs));
  const std::string vocab = write_temp("cli_vocab.json", R"(["z", "zz"])");
  CHECK(cli("search --corpus " + corpus + " --tokenizer vocab --vocab " + vocab +
            " --policy uniform --question q --strategy greedy") == 3);
  CHECK(nlohmann::json::parse(out())["dead_corpus"] == true);
}

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

// Command-line front end: index building, single searches and answers,
// evaluation, ablation sweeps and value-training data.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ctmcts/config.h"
#include "ctmcts/corpus.h"
#include "ctmcts/corpus_index.h"
#include "ctmcts/error.h"
#include "ctmcts/harness.h"
#include "ctmcts/orchestrator.h"
#include "json.hpp"

namespace {

using nlohmann::json;
using namespace ctmcts;

// Run options shared by every subcommand that searches. Each flag is kept as
// text and only written into the config overlay when given, so flags beat the
// config file and the file beats the defaults.
struct RunFlags {
  std::string config_path;
  std::string index_path;
  std::string corpus_path;
  std::map<std::string, std::string> given;  // config key -> raw flag value
  bool timing = false;

  void add_to(CLI::App& app) {
    app.add_option("--config", config_path, "JSON config file (flags override it)");
    app.add_option("--index", index_path, "Index file from `index build`");
    app.add_option("--corpus", corpus_path, "Corpus JSONL, indexed on the fly");
    text(app, "--strategy", "strategy", "ct-mcts | beam | greedy");
    text(app, "-G,--granularity", "G", "Tokens per tree node");
    text(app, "-M,--expansions", "M", "Children expanded per simulation");
    text(app, "--top-k", "top_k", "Candidate pool of the first expansion token");
    text(app, "--lambda", "lambda", "UCT exploration constant");
    text(app, "--simulations", "simulations", "Simulations per search");
    text(app, "--max-rollout-tokens", "max_rollout_tokens", "Rollout length cap in tokens");
    text(app, "--length-cap", "length_cap", "path | appended");
    text(app, "--temperature", "temperature", "Sampling temperature of expansion");
    text(app, "--paths", "paths_returned", "Trajectories returned per search");
    text(app, "--beam-width", "beam_width", "Beam width of the beam baseline");
    text(app, "--seed", "seed", "Random seed");
    text(app, "--doc-select", "doc_select", "path | window | document");
    text(app, "--window-chars", "window_chars", "Context per side for window selection");
    text(app, "--max-searches", "max_searches", "Search budget per question");
    text(app, "--workers", "workers", "Worker threads for datasets");
    text(app, "--tokenizer", "tokenizer", "char | word | vocab");
    text(app, "--vocab", "vocab", "JSON array of token surfaces (tokenizer vocab)");
    text(app, "--policy", "policy", "uniform | ngram | remote");
    text(app, "--ngram-order", "ngram_order", "Order of the n-gram policy");
    text(app, "--prompt-weight", "prompt_weight", "Share of the prompt cache in the n-gram policy");
    text(app, "--scorer", "scorer", "oracle | remote");
    text(app, "--value-prompt-side", "value_prompt_side", "client | server: who fills the value prompt");
    text(app, "--lm-url", "lm_url", "Language model service (default $CT_LM_URL)");
    text(app, "--value-url", "value_url", "Value service (default $CT_VALUE_URL)");
    text(app, "--reasoning-template", "reasoning_template", "Reasoning prompt file");
    text(app, "--retrieval-template", "retrieval_template", "Retrieval prompt file");
    text(app, "--value-template", "value_template", "Value prompt file");
    app.add_flag("--timing", timing, "Include wall-clock fields in JSON reports");
  }

  void text(CLI::App& app, const std::string& flag, const std::string& key,
            const std::string& help) {
    app.add_option_function<std::string>(
        flag, [this, key](const std::string& v) { given[key] = v; }, help);
  }

  static const std::set<std::string>& text_keys() {
    static const std::set<std::string> keys = {
        "strategy", "length_cap", "doc_select", "tokenizer", "vocab", "policy", "scorer",
        "value_prompt_side", "lm_url", "value_url", "reasoning_template", "retrieval_template",
        "value_template"};
    return keys;
  }

  RunConfig config() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_run_config(config_path);
    json overlay = json::object();
    for (const auto& [key, raw] : given) {
      if (text_keys().count(key)) {
        overlay[key] = raw;
      } else {
        try {
          overlay[key] = json::parse(raw);
        } catch (const json::parse_error&) {
          throw ParseError("--" + key + " expects a number, got `" + raw + "`");
        }
      }
    }
    apply_json(cfg, overlay);
    if (timing) cfg.timing = true;
    apply_environment(cfg);
    cfg.validate();
    return cfg;
  }

  IndexBundle bundle() const {
    if (!index_path.empty()) return load_index_file(index_path);
    if (!corpus_path.empty()) {
      IndexBundle b;
      b.documents = load_corpus_jsonl(corpus_path);
      b.index = CorpusIndex::build(b.documents);
      return b;
    }
    throw ContractError("give --index or --corpus");
  }
};

// The baselines never score; this stands in when no gold answers are given.
class UnusedScorer : public ValueScorer {
 public:
  double score(const std::string&, const std::string&) const override {
    throw ContractError("baseline strategies do not score paths");
  }
};

void write_json(const json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  return out;
}

json trajectory_json(const Trajectory& t) {
  json j = {{"text", t.text},
            {"tokens", t.token_ids.size()},
            {"cum_logprob", t.cum_logprob},
            {"doc_ids", t.doc_ids}};
  j["value"] = t.value ? json(*t.value) : json(nullptr);
  return j;
}

json stats_json(const SearchStats& s) {
  return {{"simulations", s.simulations}, {"rollouts", s.rollouts},
          {"policy_calls", s.policy_calls}, {"cache_hits", s.cache_hits},
          {"tree_nodes", s.tree_nodes},   {"exhausted", s.exhausted},
          {"dead_corpus", s.dead_corpus}};
}

json evidence_json(const std::vector<Evidence>& evidence) {
  json out = json::array();
  for (const Evidence& e : evidence)
    out.push_back({{"doc_id", e.doc_id},
                   {"strategy", select_strategy_name(e.strategy)},
                   {"source_trajectory", e.source_trajectory},
                   {"text", e.text}});
  return out;
}

json retrieval_json(const Retrieval& r) {
  json trajs = json::array();
  for (const auto& t : r.search.trajectories) trajs.push_back(trajectory_json(t));
  return {{"subject", r.subject},
          {"question", r.question},
          {"subject_fallback", r.subject_fallback},
          {"dead_corpus", r.search.dead_corpus},
          {"stats", stats_json(r.search.stats)},
          {"trajectories", trajs},
          {"evidence", evidence_json(r.evidence)}};
}

std::vector<std::string> read_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open script " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("script " + path + ": " + e.what());
  }
  if (!j.is_array()) throw ParseError("script must be a JSON array of replies");
  return j.get<std::vector<std::string>>();
}

// {"id": ..., "replies": [...]} per line, for scripted dataset runs.
std::map<std::string, std::vector<std::string>> read_script_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open script " + path);
  std::map<std::string, std::vector<std::string>> out;
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      const std::string id = j.at("id").is_string() ? j.at("id").get<std::string>()
                                                    : j.at("id").dump();
      out[id] = j.at("replies").get<std::vector<std::string>>();
    } catch (const json::exception&) {
      throw ParseError("script: expected {\"id\", \"replies\"}", n);
    }
  }
  return out;
}

void install_scripts(Engine& engine, const std::string& script_path) {
  if (script_path.empty()) return;
  auto scripts = std::make_shared<std::map<std::string, std::vector<std::string>>>(
      read_script_jsonl(script_path));
  engine.set_generator_factory([scripts](const QAExample& ex) -> std::unique_ptr<Generator> {
    auto it = scripts->find(ex.id);
    if (it == scripts->end()) throw Error("no script for example " + ex.id);
    return std::make_unique<ScriptedGenerator>(it->second);
  });
}

int run(int argc, char** argv) {
  CLI::App app{"Corpus-traversing retrieval: FM-index search driven by a language model"};
  app.require_subcommand(1);

  // index build
  auto* index_cmd = app.add_subcommand("index", "Index management");
  index_cmd->require_subcommand(1);
  auto* build_cmd = index_cmd->add_subcommand("build", "Build an index file from a corpus");
  std::string build_corpus, build_out;
  std::uint32_t sample_rate = CorpusIndex::kDefaultSampleRate;
  build_cmd->add_option("--corpus", build_corpus, "Corpus JSONL {id, title, text}")->required();
  build_cmd->add_option("--out", build_out, "Output index file")->required();
  build_cmd->add_option("--sample-rate", sample_rate, "Suffix array sampling rate");

  // search
  auto* search_cmd = app.add_subcommand("search", "Retrieve evidence for one question");
  RunFlags search_flags;
  search_flags.add_to(*search_cmd);
  std::string question, subject, out_path;
  std::vector<std::string> golds;
  search_cmd->add_option("--question", question)->required();
  search_cmd->add_option("--subject", subject, "Restricts the search to matching documents");
  search_cmd->add_option("--gold", golds, "Gold answers for the oracle scorer");
  search_cmd->add_option("--out", out_path, "Report file (default stdout)");

  // answer
  auto* answer_cmd = app.add_subcommand("answer", "Run the reasoning loop for one question");
  RunFlags answer_flags;
  answer_flags.add_to(*answer_cmd);
  std::string answer_question_text, answer_script, answer_out;
  std::vector<std::string> answer_golds;
  answer_cmd->add_option("--question", answer_question_text)->required();
  answer_cmd->add_option("--gold", answer_golds, "Gold answers for the oracle scorer");
  answer_cmd->add_option("--script", answer_script, "JSON array of scripted generator replies");
  answer_cmd->add_option("--out", answer_out, "Trace file (default stdout)");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a dataset");
  RunFlags eval_flags;
  eval_flags.add_to(*eval_cmd);
  std::string dataset, mode = "retrieval", eval_out, eval_log, eval_script;
  eval_cmd->add_option("--dataset", dataset, "Dataset JSONL")->required();
  eval_cmd->add_option("--mode", mode, "retrieval | full");
  eval_cmd->add_option("--out", eval_out, "Report file (default stdout)");
  eval_cmd->add_option("--log", eval_log, "Per-example JSONL log");
  eval_cmd->add_option("--script", eval_script, "JSONL of {id, replies} for scripted generation");

  // ablate
  auto* ablate_cmd = app.add_subcommand("ablate", "Sweep a parameter grid over a dataset");
  RunFlags ablate_flags;
  ablate_flags.add_to(*ablate_cmd);
  std::string ablate_dataset, ablate_mode = "retrieval", sweep_path, csv_path, ablate_out,
                              ablate_script;
  ablate_cmd->add_option("--dataset", ablate_dataset, "Dataset JSONL")->required();
  ablate_cmd->add_option("--sweep", sweep_path, "JSON grid over G, M, strategy, top_k, lambda")
      ->required();
  ablate_cmd->add_option("--mode", ablate_mode, "retrieval | full");
  ablate_cmd->add_option("--csv", csv_path, "CSV summary (default stdout)");
  ablate_cmd->add_option("--out", ablate_out, "JSON reports, one per grid point");
  ablate_cmd->add_option("--script", ablate_script, "JSONL of {id, replies}");

  // emit-training-pairs
  auto* emit_cmd =
      app.add_subcommand("emit-training-pairs", "Label CT-MCTS rollouts for value training");
  RunFlags emit_flags;
  emit_flags.add_to(*emit_cmd);
  std::string emit_dataset, emit_out;
  emit_cmd->add_option("--dataset", emit_dataset, "Dataset JSONL")->required();
  emit_cmd->add_option("--out", emit_out, "Output JSONL")->required();

  CLI11_PARSE(app, argc, argv);

  if (*build_cmd) {
    const std::vector<Document> docs = load_corpus_jsonl(build_corpus);
    const CorpusIndex index = CorpusIndex::build(docs, sample_rate);
    save_index_file(build_out, index, docs);
    std::cerr << "indexed " << docs.size() << " documents, " << index.size() << " bytes\n";
    return 0;
  }

  if (*search_cmd) {
    const RunConfig cfg = search_flags.config();
    Engine engine(search_flags.bundle(), cfg);
    QAExample ex{"cli", question, std::nullopt, golds};
    if (cfg.scorer == "oracle" && cfg.search.strategy == Strategy::kCtMcts && golds.empty())
      throw ContractError("the oracle scorer needs --gold");
    std::shared_ptr<const ValueScorer> scorer = std::make_shared<UnusedScorer>();
    if (cfg.search.strategy == Strategy::kCtMcts) scorer = engine.scorer_for(ex);
    const Retrieval r = retrieve(engine.retrieval_setup(cfg.search), *scorer, subject, question);
    json j = retrieval_json(r);
    j["config"] = run_config_json(cfg);
    write_json(j, out_path);
    return r.search.dead_corpus ? 3 : 0;
  }

  if (*answer_cmd) {
    const RunConfig cfg = answer_flags.config();
    Engine engine(answer_flags.bundle(), cfg);
    if (!answer_script.empty()) {
      const auto replies = read_script(answer_script);
      engine.set_generator_factory([replies](const QAExample&) -> std::unique_ptr<Generator> {
        return std::make_unique<ScriptedGenerator>(replies);
      });
    }
    if (cfg.scorer == "oracle" && answer_golds.empty())
      throw ContractError("the oracle scorer needs --gold");
    QAExample ex{"cli", answer_question_text, std::nullopt, answer_golds};
    auto generator = engine.generator_for(ex);
    const ReasoningTrace trace =
        answer_question(answer_question_text, engine.retrieval_setup(cfg.search), *generator,
                        *engine.scorer_for(ex), cfg.reasoning);
    json steps = json::array();
    for (const ReasoningStep& s : trace.steps) {
      json step = {{"generated", s.generated},
                   {"action", action_kind_name(s.action.kind)},
                   {"payload", s.action.payload}};
      if (s.action.kind == ActionKind::kSearch) {
        step["subject"] = s.action.subject;
        step["question"] = s.action.question;
      }
      if (s.retrieval) step["retrieval"] = retrieval_json(*s.retrieval);
      if (s.empty_retrieval) step["empty_retrieval"] = true;
      steps.push_back(std::move(step));
    }
    json j = {{"question", answer_question_text},
              {"final_answer", trace.final_answer ? json(*trace.final_answer) : json(nullptr)},
              {"search_count", trace.search_count},
              {"forced_answer", trace.forced_answer},
              {"steps", steps},
              {"config", run_config_json(cfg)}};
    if (trace.error) j["error"] = *trace.error;
    write_json(j, answer_out);
    return trace.error ? 4 : 0;
  }

  if (*eval_cmd) {
    const RunConfig cfg = eval_flags.config();
    const auto examples = load_dataset(dataset);
    Engine engine(eval_flags.bundle(), cfg);
    install_scripts(engine, eval_script);
    const EvalReport report = run_eval(engine, examples, parse_eval_mode(mode), cfg.search);
    write_json(report_json(report, cfg.timing), eval_out);
    if (!eval_log.empty()) {
      auto log = open_out(eval_log);
      write_example_log(report, cfg.timing, log);
    }
    return 0;
  }

  if (*ablate_cmd) {
    const RunConfig cfg = ablate_flags.config();
    const auto examples = load_dataset(ablate_dataset);
    std::ifstream sweep_in(sweep_path);
    if (!sweep_in) throw Error("cannot open sweep " + sweep_path);
    json sweep;
    try {
      sweep = json::parse(sweep_in);
    } catch (const json::parse_error& e) {
      throw ParseError("sweep " + sweep_path + ": " + e.what());
    }
    Engine engine(ablate_flags.bundle(), cfg);
    install_scripts(engine, ablate_script);
    const auto rows = run_ablation(engine, examples, parse_eval_mode(ablate_mode), sweep);
    if (csv_path.empty()) {
      write_ablation_csv(rows, std::cout);
    } else {
      auto csv = open_out(csv_path);
      write_ablation_csv(rows, csv);
    }
    if (!ablate_out.empty()) {
      json all = json::array();
      for (const auto& row : rows)
        all.push_back({{"settings", row.settings}, {"report", report_json(row.report, cfg.timing)}});
      write_json(all, ablate_out);
    }
    return 0;
  }

  if (*emit_cmd) {
    const RunConfig cfg = emit_flags.config();
    const auto examples = load_dataset(emit_dataset);
    Engine engine(emit_flags.bundle(), cfg);
    auto out = open_out(emit_out);
    const std::size_t n = emit_dataset_training_pairs(engine, examples, out);
    std::cerr << "wrote " << n << " training pairs\n";
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ctmcts::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

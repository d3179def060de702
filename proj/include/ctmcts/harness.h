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

#pragma once

#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ctmcts/config.h"
#include "ctmcts/corpus_index.h"
#include "ctmcts/orchestrator.h"
#include "ctmcts/tokenizer.h"
#include "json.hpp"

namespace ctmcts {

struct QAExample {
  std::string id;
  std::string question;
  std::optional<std::string> subject;
  std::vector<std::string> gold_answers;
};

// JSON Lines {"id", "question", "subject"?, "golden_answers": [...]}; a numeric
// id is accepted and printed as text. Throws ParseError with the line number,
// and Error("no examples") for an empty file.
std::vector<QAExample> read_dataset_jsonl(std::istream& in);
std::vector<QAExample> load_dataset(const std::string& path);

using GeneratorFactory = std::function<std::unique_ptr<Generator>(const QAExample&)>;

// A loaded corpus with the tokenizer, policy and scorers a run needs. Safe to
// share between worker threads once built.
class Engine {
 public:
  Engine(IndexBundle bundle, RunConfig cfg);

  const RunConfig& config() const { return cfg_; }
  const std::vector<Document>& documents() const { return *docs_; }
  const CorpusIndex& full_index() const { return *index_; }
  const Tokenizer& tokenizer() const { return *tokenizer_; }
  const TokenBridge& bridge() const { return *bridge_; }
  const Policy& policy() const { return *policy_; }
  const DocumentTable& table() const { return *table_; }
  SubjectIndexCache& subject_indices() const { return *subjects_; }

  RetrievalSetup retrieval_setup(const SearchConfig& search) const;

  // Oracle scorer over the example's gold answers, or the shared remote one.
  std::shared_ptr<const ValueScorer> scorer_for(const QAExample& ex) const;

  // The installed factory, else a remote generator at lm_url. Throws Error
  // when neither exists.
  std::unique_ptr<Generator> generator_for(const QAExample& ex) const;
  void set_generator_factory(GeneratorFactory f) { generators_ = std::move(f); }

 private:
  RunConfig cfg_;
  std::shared_ptr<const std::vector<Document>> docs_;
  std::shared_ptr<const CorpusIndex> index_;
  std::unique_ptr<Tokenizer> tokenizer_;
  std::unique_ptr<TokenBridge> bridge_;
  std::unique_ptr<Policy> policy_;
  std::unique_ptr<DocumentTable> table_;
  std::unique_ptr<SubjectIndexCache> subjects_;
  std::shared_ptr<const ValueScorer> remote_scorer_;
  PromptTemplates prompts_;
  GeneratorFactory generators_;
};

// Builds the tokenizer named by cfg ("char", "word" or "vocab").
std::unique_ptr<Tokenizer> make_tokenizer(const RunConfig& cfg, std::span<const Document> docs);

enum class EvalMode { kRetrievalOnly, kFullReasoning };
const char* eval_mode_name(EvalMode m);
EvalMode parse_eval_mode(const std::string& name);  // "retrieval" | "full"

struct ExampleResult {
  std::string id;
  double em = 0.0;  // retrieval mode: 1 when some evidence contains a gold answer
  double f1 = 0.0;  // retrieval mode: best containment label of the returned paths
  double latency_ms = 0.0;
  int rollout_count = 0;
  double path_length = 0.0;  // retrieved_path_length, mean over searches
  std::string prediction;    // final answer, or the top path in retrieval mode
  std::vector<DocId> evidence_docs;
  int search_count = 0;
  bool failed = false;
  std::string error;
};

struct EvalReport {
  EvalMode mode = EvalMode::kRetrievalOnly;
  double em = 0.0;
  double f1 = 0.0;
  double latency_ms = 0.0;
  double rollout_count = 0.0;
  double path_length = 0.0;
  int failures = 0;
  std::vector<ExampleResult> per_example;
  SearchConfig config;
};

// Evaluates every example on a pool of cfg.workers threads; results keep the
// dataset order. Per-example failures score 0 and are flagged.
EvalReport run_eval(const Engine& engine, std::span<const QAExample> examples, EvalMode mode,
                    const SearchConfig& search);

// Mean token count of the returned trajectories; 0 when none came back.
double retrieved_path_length(const SearchResult& r);

ExampleResult evaluate_example(const Engine& engine, const QAExample& ex, EvalMode mode,
                               const SearchConfig& search);

// Latency fields appear only with `timing`, so untimed reports of identical
// runs are byte-identical.
nlohmann::json report_json(const EvalReport& r, bool timing);
nlohmann::json example_json(const ExampleResult& r, bool timing);
void write_example_log(const EvalReport& r, bool timing, std::ostream& out);

// Parameter grid: {"G": [...], "M": [...], "strategy": [...], "top_k": [...],
// "lambda": [...]}, any non-empty subset. Returns one settings object per grid
// point (cartesian product, keys in the order above). Throws ContractError for
// an empty grid or an unknown key.
std::vector<nlohmann::json> expand_grid(const nlohmann::json& sweep);

struct AblationRow {
  nlohmann::json settings;
  EvalReport report;
};

std::vector<AblationRow> run_ablation(const Engine& engine, std::span<const QAExample> examples,
                                      EvalMode mode, const nlohmann::json& sweep);

// Columns: the swept parameters, then latency_ms, avg_rollout_count,
// avg_path_length, em, f1.
void write_ablation_csv(std::span<const AblationRow> rows, std::ostream& out);

// Runs CT-MCTS for every example (its subject, else the full index) and
// writes every rollout with its containment label. Returns the pair count.
std::size_t emit_dataset_training_pairs(const Engine& engine,
                                        std::span<const QAExample> examples,
                                        std::ostream& out);

}  // namespace ctmcts

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

#include "ctmcts/harness.h"

#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include "ctmcts/error.h"
#include "ctmcts/metrics.h"
#include "ctmcts/text.h"

namespace ctmcts {

namespace {

constexpr const char* kGridKeys[] = {"G", "M", "strategy", "top_k", "lambda"};

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

bool contains_gold(const std::string& text, std::span<const std::string> golds) {
  for (const auto& g : golds) {
    const std::string n = normalize_trimmed(g);
    if (!n.empty() && text.find(n) != std::string::npos) return true;
  }
  return false;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<QAExample> read_dataset_jsonl(std::istream& in) {
  std::vector<QAExample> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw ParseError("dataset: invalid JSON", line_no);
    }
    if (!j.is_object()) throw ParseError("dataset: line is not an object", line_no);
    QAExample ex;
    if (j.contains("id") && j["id"].is_string()) ex.id = j["id"].get<std::string>();
    else if (j.contains("id") && j["id"].is_number_integer()) ex.id = std::to_string(j["id"].get<long long>());
    else throw ParseError("dataset: missing `id`", line_no);
    if (!j.contains("question") || !j["question"].is_string() ||
        trim(j["question"].get<std::string>()).empty())
      throw ParseError("dataset: missing `question`", line_no);
    ex.question = j["question"].get<std::string>();
    if (j.contains("subject") && !j["subject"].is_null()) {
      if (!j["subject"].is_string()) throw ParseError("dataset: `subject` must be text", line_no);
      ex.subject = j["subject"].get<std::string>();
    }
    if (!j.contains("golden_answers") || !j["golden_answers"].is_array())
      throw ParseError("dataset: missing `golden_answers`", line_no);
    for (const auto& g : j["golden_answers"]) {
      if (!g.is_string()) throw ParseError("dataset: gold answers must be text", line_no);
      ex.gold_answers.push_back(g.get<std::string>());
    }
    if (ex.gold_answers.empty()) throw ParseError("dataset: empty `golden_answers`", line_no);
    out.push_back(std::move(ex));
  }
  if (out.empty()) throw Error("no examples");
  return out;
}

std::vector<QAExample> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset " + path);
  return read_dataset_jsonl(in);
}

std::unique_ptr<Tokenizer> make_tokenizer(const RunConfig& cfg, std::span<const Document> docs) {
  if (cfg.tokenizer == "char") return std::make_unique<VocabTokenizer>(make_char_tokenizer(docs));
  if (cfg.tokenizer == "word") return std::make_unique<VocabTokenizer>(make_word_tokenizer(docs));
  if (cfg.tokenizer == "vocab")
    return std::make_unique<VocabTokenizer>(VocabTokenizer::load_json(cfg.vocab_path));
  throw ContractError("unknown tokenizer `" + cfg.tokenizer + "`");
}

Engine::Engine(IndexBundle bundle, RunConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  docs_ = std::make_shared<const std::vector<Document>>(std::move(bundle.documents));
  index_ = std::make_shared<const CorpusIndex>(std::move(bundle.index));
  tokenizer_ = make_tokenizer(cfg_, *docs_);
  bridge_ = std::make_unique<TokenBridge>(*tokenizer_, index_->alphabet());
  if (cfg_.policy == "uniform") {
    policy_ = std::make_unique<UniformPolicy>(tokenizer_->vocab_size());
  } else if (cfg_.policy == "ngram") {
    policy_ = std::make_unique<NgramPolicy>(index_, *bridge_, cfg_.ngram_order,
                                            cfg_.prompt_weight);
  } else {
    if (cfg_.lm_url.empty()) throw ContractError("policy `remote` needs an LM url");
    policy_ = std::make_unique<RemoteLanguageModel>(HttpClientConfig{cfg_.lm_url});
  }
  table_ = std::make_unique<DocumentTable>(*docs_);
  subjects_ = std::make_unique<SubjectIndexCache>(index_, docs_, SubjectIndexCache::kDefaultCapacity,
                                                  index_->sample_rate());
  if (!cfg_.reasoning_template.empty()) prompts_.reasoning = load_template(cfg_.reasoning_template);
  if (!cfg_.retrieval_template.empty()) prompts_.retrieval = load_template(cfg_.retrieval_template);
  if (!cfg_.value_template.empty()) prompts_.value = load_template(cfg_.value_template);
  if (cfg_.scorer == "remote") {
    if (cfg_.value_url.empty()) throw ContractError("scorer `remote` needs a value url");
    remote_scorer_ = std::make_shared<RemoteScorer>(
        HttpClientConfig{cfg_.value_url},
        cfg_.value_prompt == "server" ? PromptSide::kServer : PromptSide::kClient, prompts_.value);
  }
}

RetrievalSetup Engine::retrieval_setup(const SearchConfig& search) const {
  RetrievalSetup s;
  s.indices = subjects_.get();
  s.documents = table_.get();
  s.bridge = bridge_.get();
  s.policy = policy_.get();
  s.search = search;
  s.select = cfg_.select;
  s.window_chars = cfg_.window_chars;
  s.prompts = prompts_;
  return s;
}

std::shared_ptr<const ValueScorer> Engine::scorer_for(const QAExample& ex) const {
  if (remote_scorer_) return remote_scorer_;
  return std::make_shared<OracleScorer>(ex.gold_answers);
}

std::unique_ptr<Generator> Engine::generator_for(const QAExample& ex) const {
  if (generators_) return generators_(ex);
  if (cfg_.lm_url.empty())
    throw Error("full reasoning needs a generator: set CT_LM_URL or --lm-url, or pass --script");
  return std::make_unique<RemoteLanguageModel>(HttpClientConfig{cfg_.lm_url});
}

const char* eval_mode_name(EvalMode m) {
  return m == EvalMode::kRetrievalOnly ? "retrieval" : "full";
}

EvalMode parse_eval_mode(const std::string& name) {
  if (name == "retrieval" || name == "retrieval_only") return EvalMode::kRetrievalOnly;
  if (name == "full" || name == "full_reasoning") return EvalMode::kFullReasoning;
  throw ContractError("unknown eval mode `" + name + "`");
}

double retrieved_path_length(const SearchResult& r) {
  if (r.trajectories.empty()) return 0.0;
  double total = 0.0;
  for (const Trajectory& t : r.trajectories) total += static_cast<double>(t.token_ids.size());
  return total / static_cast<double>(r.trajectories.size());
}

ExampleResult evaluate_example(const Engine& engine, const QAExample& ex, EvalMode mode,
                               const SearchConfig& search) {
  ExampleResult res;
  res.id = ex.id;
  const auto start = std::chrono::steady_clock::now();
  try {
    const RetrievalSetup setup = engine.retrieval_setup(search);
    const auto scorer = engine.scorer_for(ex);
    if (mode == EvalMode::kRetrievalOnly) {
      const Retrieval r = retrieve(setup, *scorer, ex.subject.value_or(""), ex.question);
      res.search_count = 1;
      res.rollout_count = r.search.stats.rollouts;
      if (!r.search.trajectories.empty()) {
        res.path_length = retrieved_path_length(r.search);
        res.prediction = r.search.trajectories.front().text;
      }
      for (const Evidence& e : r.evidence) {
        res.evidence_docs.push_back(e.doc_id);
        if (contains_gold(e.text, ex.gold_answers)) res.em = 1.0;
      }
      for (const Trajectory& t : r.search.trajectories)
        res.f1 = std::max(res.f1, containment_label(ex.gold_answers, t.text));
    } else {
      auto generator = engine.generator_for(ex);
      const ReasoningTrace trace =
          answer_question(ex.question, setup, *generator, *scorer, engine.config().reasoning);
      res.search_count = trace.search_count;
      double total_length = 0.0;
      int searches = 0;
      for (const ReasoningStep& s : trace.steps) {
        if (!s.retrieval) continue;
        res.rollout_count += s.retrieval->search.stats.rollouts;
        total_length += retrieved_path_length(s.retrieval->search);
        ++searches;
        for (const Evidence& e : s.retrieval->evidence) res.evidence_docs.push_back(e.doc_id);
      }
      if (searches > 0) res.path_length = total_length / searches;
      if (trace.error) {
        res.failed = true;
        res.error = *trace.error;
      } else {
        res.prediction = trace.final_answer.value_or("");
        res.em = exact_match(res.prediction, ex.gold_answers);
        res.f1 = token_f1(res.prediction, ex.gold_answers);
      }
    }
  } catch (const std::exception& e) {
    res = ExampleResult{};
    res.id = ex.id;
    res.failed = true;
    res.error = e.what();
  }
  res.latency_ms = elapsed_ms(start);
  return res;
}

EvalReport run_eval(const Engine& engine, std::span<const QAExample> examples, EvalMode mode,
                    const SearchConfig& search) {
  if (examples.empty()) throw Error("no examples");
  search.validate();
  EvalReport report;
  report.mode = mode;
  report.config = search;
  report.per_example.resize(examples.size());
  parallel_for(examples.size(), engine.config().workers, [&](std::size_t i) {
    report.per_example[i] = evaluate_example(engine, examples[i], mode, search);
  });
  const double n = static_cast<double>(examples.size());
  for (const ExampleResult& r : report.per_example) {
    report.em += r.em;
    report.f1 += r.f1;
    report.latency_ms += r.latency_ms;
    report.rollout_count += r.rollout_count;
    report.path_length += r.path_length;
    if (r.failed) ++report.failures;
  }
  report.em /= n;
  report.f1 /= n;
  report.latency_ms /= n;
  report.rollout_count /= n;
  report.path_length /= n;
  return report;
}

nlohmann::json example_json(const ExampleResult& r, bool timing) {
  nlohmann::json j = {{"id", r.id},
                      {"em", r.em},
                      {"f1", r.f1},
                      {"rollout_count", r.rollout_count},
                      {"path_length", r.path_length},
                      {"search_count", r.search_count},
                      {"prediction", r.prediction},
                      {"evidence_docs", r.evidence_docs}};
  if (timing) j["latency_ms"] = r.latency_ms;
  if (r.failed) j["error"] = r.error;
  return j;
}

nlohmann::json report_json(const EvalReport& r, bool timing) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& e : r.per_example) per.push_back(example_json(e, timing));
  nlohmann::json j = {{"mode", eval_mode_name(r.mode)},
                      {"examples", r.per_example.size()},
                      {"em", r.em},
                      {"f1", r.f1},
                      {"avg_rollout_count", r.rollout_count},
                      {"avg_path_length", r.path_length},
                      {"failures", r.failures},
                      {"config", search_config_json(r.config)},
                      {"per_example", std::move(per)}};
  if (timing) j["avg_latency_ms"] = r.latency_ms;
  return j;
}

void write_example_log(const EvalReport& r, bool timing, std::ostream& out) {
  for (const auto& e : r.per_example) out << example_json(e, timing).dump() << '\n';
}

std::vector<nlohmann::json> expand_grid(const nlohmann::json& sweep) {
  if (!sweep.is_object() || sweep.empty()) throw ContractError("ablation grid is empty");
  for (const auto& [key, values] : sweep.items()) {
    if (std::find(std::begin(kGridKeys), std::end(kGridKeys), key) == std::end(kGridKeys))
      throw ContractError("ablation grid: unknown parameter `" + key + "`");
    if (!values.is_array() || values.empty())
      throw ContractError("ablation grid: `" + key + "` needs a non-empty list");
  }
  std::vector<nlohmann::json> points{nlohmann::json::object()};
  for (const char* key : kGridKeys) {
    if (!sweep.contains(key)) continue;
    std::vector<nlohmann::json> grown;
    for (const auto& p : points) {
      for (const auto& v : sweep[key]) {
        nlohmann::json q = p;
        q[key] = v;
        grown.push_back(std::move(q));
      }
    }
    points = std::move(grown);
  }
  return points;
}

std::vector<AblationRow> run_ablation(const Engine& engine, std::span<const QAExample> examples,
                                      EvalMode mode, const nlohmann::json& sweep) {
  std::vector<AblationRow> rows;
  for (const nlohmann::json& point : expand_grid(sweep)) {
    RunConfig cfg = engine.config();
    apply_json(cfg, point);
    rows.push_back({point, run_eval(engine, examples, mode, cfg.search)});
  }
  return rows;
}

void write_ablation_csv(std::span<const AblationRow> rows, std::ostream& out) {
  std::vector<std::string> keys;
  if (!rows.empty())
    for (const char* k : kGridKeys)
      if (rows.front().settings.contains(k)) keys.emplace_back(k);
  for (const auto& k : keys) out << k << ',';
  out << "latency_ms,avg_rollout_count,avg_path_length,em,f1\n";
  for (const AblationRow& row : rows) {
    for (const auto& k : keys) {
      const auto& v = row.settings[k];
      out << (v.is_string() ? v.get<std::string>() : v.dump()) << ',';
    }
    const EvalReport& r = row.report;
    out << r.latency_ms << ',' << r.rollout_count << ',' << r.path_length << ',' << r.em << ','
        << r.f1 << '\n';
  }
}

std::size_t emit_dataset_training_pairs(const Engine& engine,
                                        std::span<const QAExample> examples,
                                        std::ostream& out) {
  SearchConfig search = engine.config().search;
  search.strategy = Strategy::kCtMcts;
  std::vector<std::string> chunks(examples.size());
  std::vector<std::size_t> counts(examples.size(), 0);
  parallel_for(examples.size(), engine.config().workers, [&](std::size_t i) {
    const QAExample& ex = examples[i];
    const RetrievalSetup setup = engine.retrieval_setup(search);
    const auto scorer = engine.scorer_for(ex);
    const Retrieval r = retrieve(setup, *scorer, ex.subject.value_or(""), ex.question);
    std::ostringstream buf;
    counts[i] = emit_training_pairs(ex.question, r.search.rollouts, ex.gold_answers, buf);
    chunks[i] = buf.str();
  });
  std::size_t total = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    out << chunks[i];
    total += counts[i];
  }
  if (!out) throw Error("failed to write training pairs");
  return total;
}

}  // namespace ctmcts

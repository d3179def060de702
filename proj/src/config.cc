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

#include "ctmcts/config.h"

#include <cstdlib>
#include <fstream>

#include "ctmcts/error.h"

namespace ctmcts {

namespace {

template <typename T>
T get_as(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("config: `" + key + "` has the wrong type");
  }
}

}  // namespace

void RunConfig::validate() const {
  search.validate();
  if (workers < 1) throw ContractError("workers must be >= 1");
  if (reasoning.max_searches < 1) throw ContractError("max_searches must be >= 1");
  if (tokenizer != "char" && tokenizer != "word" && tokenizer != "vocab")
    throw ContractError("tokenizer must be char, word or vocab");
  if (tokenizer == "vocab" && vocab_path.empty())
    throw ContractError("tokenizer `vocab` needs a vocab file");
  if (policy != "uniform" && policy != "ngram" && policy != "remote")
    throw ContractError("policy must be uniform, ngram or remote");
  if (ngram_order < 1) throw ContractError("ngram_order must be >= 1");
  if (!(prompt_weight >= 0.0 && prompt_weight < 1.0))
    throw ContractError("prompt_weight must lie in [0, 1)");
  if (scorer != "oracle" && scorer != "remote")
    throw ContractError("scorer must be oracle or remote");
  if (value_prompt != "client" && value_prompt != "server")
    throw ContractError("value_prompt_side must be client or server");
}

void apply_json(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "G") c.search.granularity = get_as<int>(v, key);
    else if (key == "M") c.search.expansions = get_as<int>(v, key);
    else if (key == "top_k") c.search.top_k = get_as<int>(v, key);
    else if (key == "lambda") c.search.lambda = get_as<double>(v, key);
    else if (key == "simulations") c.search.simulations = get_as<int>(v, key);
    else if (key == "max_rollout_tokens") c.search.max_rollout_tokens = get_as<int>(v, key);
    else if (key == "length_cap") c.search.length_cap = parse_length_cap(get_as<std::string>(v, key));
    else if (key == "temperature") c.search.temperature = get_as<double>(v, key);
    else if (key == "paths_returned") c.search.paths_returned = get_as<int>(v, key);
    else if (key == "beam_width") c.search.beam_width = get_as<int>(v, key);
    else if (key == "strategy") c.search.strategy = parse_strategy(get_as<std::string>(v, key));
    else if (key == "seed") c.search.seed = get_as<std::uint64_t>(v, key);
    else if (key == "doc_select") c.select = parse_select_strategy(get_as<std::string>(v, key));
    else if (key == "window_chars") c.window_chars = get_as<std::size_t>(v, key);
    else if (key == "max_searches") c.reasoning.max_searches = get_as<int>(v, key);
    else if (key == "max_turns") c.reasoning.max_turns = get_as<int>(v, key);
    else if (key == "max_new_tokens") c.reasoning.max_new_tokens = get_as<int>(v, key);
    else if (key == "workers") c.workers = get_as<int>(v, key);
    else if (key == "timing") c.timing = get_as<bool>(v, key);
    else if (key == "tokenizer") c.tokenizer = get_as<std::string>(v, key);
    else if (key == "vocab") c.vocab_path = get_as<std::string>(v, key);
    else if (key == "policy") c.policy = get_as<std::string>(v, key);
    else if (key == "ngram_order") c.ngram_order = get_as<int>(v, key);
    else if (key == "prompt_weight") c.prompt_weight = get_as<double>(v, key);
    else if (key == "scorer") c.scorer = get_as<std::string>(v, key);
    else if (key == "value_prompt_side") c.value_prompt = get_as<std::string>(v, key);
    else if (key == "lm_url") c.lm_url = get_as<std::string>(v, key);
    else if (key == "value_url") c.value_url = get_as<std::string>(v, key);
    else if (key == "reasoning_template") c.reasoning_template = get_as<std::string>(v, key);
    else if (key == "retrieval_template") c.retrieval_template = get_as<std::string>(v, key);
    else if (key == "value_template") c.value_template = get_as<std::string>(v, key);
    else throw ParseError("config: unknown key `" + key + "`");
  }
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
  apply_json(base, j);
  return base;
}

void apply_environment(RunConfig& c) {
  if (const char* lm = std::getenv("CT_LM_URL"); lm && c.lm_url.empty()) c.lm_url = lm;
  if (const char* v = std::getenv("CT_VALUE_URL"); v && c.value_url.empty()) c.value_url = v;
}

nlohmann::json search_config_json(const SearchConfig& s) {
  return {{"G", s.granularity},
          {"M", s.expansions},
          {"top_k", s.top_k},
          {"lambda", s.lambda},
          {"simulations", s.simulations},
          {"max_rollout_tokens", s.max_rollout_tokens},
          {"length_cap", length_cap_name(s.length_cap)},
          {"temperature", s.temperature},
          {"paths_returned", s.paths_returned},
          {"beam_width", s.beam_width},
          {"strategy", strategy_name(s.strategy)},
          {"seed", s.seed}};
}

nlohmann::json run_config_json(const RunConfig& c) {
  nlohmann::json j = search_config_json(c.search);
  j["doc_select"] = select_strategy_name(c.select);
  j["window_chars"] = c.window_chars;
  j["max_searches"] = c.reasoning.max_searches;
  j["tokenizer"] = c.tokenizer;
  j["policy"] = c.policy;
  j["ngram_order"] = c.ngram_order;
  j["prompt_weight"] = c.prompt_weight;
  j["scorer"] = c.scorer;
  return j;
}

}  // namespace ctmcts

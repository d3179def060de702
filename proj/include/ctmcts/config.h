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

#include <string>

#include "ctmcts/doc_select.h"
#include "ctmcts/orchestrator.h"
#include "ctmcts/search.h"
#include "json.hpp"

namespace ctmcts {

// Every knob of a run. The JSON form uses the CLI flag names ("G", "M",
// "top_k", "lambda", "simulations", ...); see apply_json for the full list.
struct RunConfig {
  SearchConfig search;
  SelectStrategy select = SelectStrategy::kCompleteDocument;
  std::size_t window_chars = kDefaultWindowChars;
  ReasoningConfig reasoning;
  int workers = 4;
  bool timing = false;  // put wall-clock fields into JSON reports

  std::string tokenizer = "char";  // char | word | vocab
  std::string vocab_path;          // JSON array of surfaces, for "vocab"
  std::string policy = "ngram";    // uniform | ngram | remote
  int ngram_order = NgramPolicy::kDefaultOrder;
  double prompt_weight = 0.5;      // n-gram policy: share of the prompt cache
  std::string scorer = "oracle";   // oracle | remote
  std::string value_prompt = "client";  // client | server
  std::string lm_url;
  std::string value_url;
  std::string reasoning_template;  // file paths; empty = built-in
  std::string retrieval_template;
  std::string value_template;

  // Throws ContractError for inconsistent settings.
  void validate() const;
};

// Overlays the keys present in `j` onto `cfg`. Unknown keys and ill-typed
// values raise ParseError.
void apply_json(RunConfig& cfg, const nlohmann::json& j);
RunConfig load_run_config(const std::string& path, RunConfig base = {});

// CT_LM_URL and CT_VALUE_URL, when set, fill empty endpoint fields.
void apply_environment(RunConfig& cfg);

nlohmann::json search_config_json(const SearchConfig& cfg);
nlohmann::json run_config_json(const RunConfig& cfg);

}  // namespace ctmcts

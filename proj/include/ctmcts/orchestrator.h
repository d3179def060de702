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

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctmcts/doc_select.h"
#include "ctmcts/policy.h"
#include "ctmcts/prompts.h"
#include "ctmcts/search.h"
#include "ctmcts/subject_index.h"
#include "ctmcts/token_bridge.h"
#include "ctmcts/value_scorer.h"

namespace ctmcts {

enum class ActionKind { kThink, kSearch, kAnswer, kMalformed };

const char* action_kind_name(ActionKind k);

struct Action {
  ActionKind kind = ActionKind::kThink;
  std::string subject;   // search only
  std::string question;  // search only
  std::string payload;   // answer text, think text, or the malformed fragment
};

// Reads the first complete <search> or <answer> tag of a generation. A search
// body looks like "(subject : s, question : q)"; spaces around ':' and ',' and
// the parentheses are optional. An unclosed or unparsable search yields
// kMalformed; text without either tag yields kThink.
Action parse_action(std::string_view generated);

// Everything one retrieval call needs, shared across questions.
struct RetrievalSetup {
  SubjectIndexCache* indices = nullptr;
  const DocumentTable* documents = nullptr;
  const TokenBridge* bridge = nullptr;
  const Policy* policy = nullptr;
  SearchConfig search;
  SelectStrategy select = SelectStrategy::kCompleteDocument;
  std::size_t window_chars = kDefaultWindowChars;
  PromptTemplates prompts;
};

struct Retrieval {
  std::string subject;
  std::string question;
  SearchResult search;
  std::vector<Evidence> evidence;
  bool subject_fallback = false;  // no document matched; the full index was used
};

// Subject sub-index -> search with the configured strategy -> doc selection.
// An empty subject searches the full index.
Retrieval retrieve(const RetrievalSetup& setup, const ValueScorer& scorer,
                   const std::string& subject, const std::string& question);

inline constexpr std::size_t kInformationDocChars = 1500;

// "<information>For {subject} : Doc 0. ... Doc 1. ...</information>", every
// document cut to kInformationDocChars code points.
std::string information_block(std::string_view subject, std::span<const Evidence> evidence);

struct ReasoningStep {
  std::string generated;
  Action action;
  std::optional<Retrieval> retrieval;  // set for executed searches
  bool empty_retrieval = false;        // search returned nothing usable
};

struct ReasoningTrace {
  std::vector<ReasoningStep> steps;
  std::optional<std::string> final_answer;
  int search_count = 0;
  bool forced_answer = false;
  std::optional<std::string> error;  // transport or protocol failure
};

struct ReasoningConfig {
  int max_searches = 6;
  int max_turns = 16;  // guard against generators that never act
  int max_new_tokens = 512;
  std::string forced_answer_suffix =
      "\nNo more searches are available. Give the final answer now inside "
      "<answer> and </answer>.\n";
};

// The think / search / answer loop for one question.
ReasoningTrace answer_question(const std::string& question, const RetrievalSetup& setup,
                               Generator& generator, const ValueScorer& scorer,
                               const ReasoningConfig& cfg);

}  // namespace ctmcts

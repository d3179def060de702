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

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "ctmcts/corpus_index.h"
#include "ctmcts/http_client.h"
#include "ctmcts/token_bridge.h"
#include "ctmcts/tokenizer.h"

namespace ctmcts {

// What the policy conditions on: the retrieval prompt and the constrained
// path decoded so far (the two are concatenated).
struct PolicyContext {
  std::string prompt_text;
  std::string path_text;
};

struct LogProbEntry {
  TokenId id;
  double logprob;  // <= 0, finite
};

// Log-probabilities for a requested candidate subset, not renormalized over
// it. Candidates the model does not know end up in `unknown_ids`.
struct SparseLogProbs {
  std::vector<LogProbEntry> entries;
  std::vector<TokenId> unknown_ids;
};

// Next-token scoring. Implementations must tolerate concurrent calls.
class Policy {
 public:
  virtual ~Policy() = default;
  // Throws ContractError for an empty candidate list.
  virtual SparseLogProbs logprobs_for(const PolicyContext& ctx,
                                      std::span<const TokenId> candidates) const = 0;
};

// Free-form continuation, used by the reasoning loop.
class Generator {
 public:
  virtual ~Generator() = default;
  // Continuation truncated right after the first stop string.
  virtual std::string generate(const std::string& prompt,
                               std::span<const std::string> stop, int max_tokens) = 0;
};

// Cuts `text` right after the earliest occurrence of any stop string.
std::string truncate_at_stop(const std::string& text, std::span<const std::string> stop);

// ln(1/V) for every in-vocabulary candidate.
class UniformPolicy : public Policy {
 public:
  explicit UniformPolicy(std::size_t vocab_size) : vocab_size_(vocab_size) {}
  SparseLogProbs logprobs_for(const PolicyContext& ctx,
                              std::span<const TokenId> candidates) const override;

 private:
  std::size_t vocab_size_;
};

// Byte-level n-gram model whose counts come straight from a corpus index.
//
// P(c | ctx) is the maximum-likelihood estimate under the longest suffix of
// the last (order - 1) path bytes that was seen followed by c; the empty
// context uses add-one smoothing over the corpus alphabet, so every score is
// finite. A token scores the sum over its surface bytes. The prompt is not
// used.
// Corpus n-gram model, optionally mixed with an n-gram cache over the tail of
// the prompt so that paths echoing the question rank higher:
//   P = (1 - w) * P_corpus + w * P_prompt.
class NgramPolicy : public Policy {
 public:
  static constexpr int kDefaultOrder = 3;
  static constexpr std::size_t kPromptWindowBytes = 256;

  NgramPolicy(std::shared_ptr<const CorpusIndex> index, const TokenBridge& bridge,
              int order = kDefaultOrder, double prompt_weight = 0.0);

  SparseLogProbs logprobs_for(const PolicyContext& ctx,
                              std::span<const TokenId> candidates) const override;

  // log P_corpus(symbol | context), context = any preceding text.
  double symbol_logprob(std::string_view context, std::uint8_t symbol) const;

  // P_prompt(symbol | context) from n-gram counts over `window`: the longest
  // context suffix seen in the window decides; 0 when nothing matches.
  double prompt_probability(std::string_view window, std::string_view context,
                            std::uint8_t symbol) const;

  // Normalized tail of a prompt, the text the cache counts over.
  static std::string prompt_window(std::string_view prompt);

  int order() const { return order_; }
  double prompt_weight() const { return prompt_weight_; }

 private:
  std::shared_ptr<const CorpusIndex> index_;
  const TokenBridge* bridge_;
  int order_;
  double prompt_weight_;
  double log_unigram_denominator_;
};

// Replays a fixed list of replies; throws "script exhausted" once empty.
class ScriptedGenerator : public Generator {
 public:
  explicit ScriptedGenerator(std::vector<std::string> replies)
      : replies_(replies.begin(), replies.end()) {}

  std::string generate(const std::string& prompt, std::span<const std::string> stop,
                       int max_tokens) override;

  std::size_t remaining() const;
  const std::vector<std::string>& prompts_seen() const { return prompts_; }

 private:
  mutable std::mutex mu_;
  std::deque<std::string> replies_;
  std::vector<std::string> prompts_;
};

// Client for an external model service:
//   POST /v1/logprobs {"prompt", "path", "candidate_ids"} -> {"entries": [{"id", "logprob"}]}
//   POST /v1/generate {"prompt", "stop", "max_tokens"}    -> {"text"}
class RemoteLanguageModel : public Policy, public Generator {
 public:
  explicit RemoteLanguageModel(HttpClientConfig config) : client_(std::move(config)) {}

  SparseLogProbs logprobs_for(const PolicyContext& ctx,
                              std::span<const TokenId> candidates) const override;
  std::string generate(const std::string& prompt, std::span<const std::string> stop,
                       int max_tokens) override;

 private:
  JsonHttpClient client_;
};

}  // namespace ctmcts

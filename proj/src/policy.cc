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

#include "ctmcts/policy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "ctmcts/error.h"
#include "ctmcts/text.h"

namespace ctmcts {

std::string truncate_at_stop(const std::string& text, std::span<const std::string> stop) {
  std::size_t first = std::string::npos;
  std::size_t cut = 0;
  for (const auto& s : stop) {
    if (s.empty()) continue;
    const auto pos = text.find(s);
    if (pos != std::string::npos && (first == std::string::npos || pos < first)) {
      first = pos;
      cut = pos + s.size();
    }
  }
  return first == std::string::npos ? text : text.substr(0, cut);
}

SparseLogProbs UniformPolicy::logprobs_for(const PolicyContext& /*ctx*/,
                                           std::span<const TokenId> candidates) const {
  if (candidates.empty()) throw ContractError("logprobs_for needs at least one candidate");
  SparseLogProbs out;
  const double lp = -std::log(static_cast<double>(vocab_size_));
  for (TokenId id : candidates) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_size_) {
      out.unknown_ids.push_back(id);
    } else {
      out.entries.push_back({id, lp});
    }
  }
  return out;
}

NgramPolicy::NgramPolicy(std::shared_ptr<const CorpusIndex> index,
                         const TokenBridge& bridge, int order, double prompt_weight)
    : index_(std::move(index)), bridge_(&bridge), order_(order), prompt_weight_(prompt_weight) {
  if (order_ < 1) throw ContractError("n-gram order must be >= 1");
  if (!(prompt_weight_ >= 0.0 && prompt_weight_ < 1.0))
    throw ContractError("prompt weight must lie in [0, 1)");
  const double text_symbols =
      static_cast<double>(index_->size() - index_->num_documents());
  log_unigram_denominator_ =
      std::log(text_symbols + static_cast<double>(index_->alphabet().size()));
}

double NgramPolicy::symbol_logprob(std::string_view context, std::uint8_t symbol) const {
  const std::size_t max_ctx = static_cast<std::size_t>(order_ - 1);
  if (context.size() > max_ctx) context = context.substr(context.size() - max_ctx);
  for (std::size_t k = context.size(); k > 0; --k) {
    const IndexInterval iv = index_->find(context.substr(context.size() - k));
    if (iv.empty()) continue;
    const IndexInterval hit = index_->extend(iv, symbol);
    if (hit.empty()) continue;
    std::uint64_t total = 0;
    for (const auto& ns : index_->next_symbols(iv)) total += ns.interval.width();
    return std::log(static_cast<double>(hit.width()) / static_cast<double>(total));
  }
  const double count = static_cast<double>(index_->extend(index_->root(), symbol).width());
  return std::log(count + 1.0) - log_unigram_denominator_;
}

double NgramPolicy::prompt_probability(std::string_view window, std::string_view context,
                                       std::uint8_t symbol) const {
  const std::size_t max_ctx = static_cast<std::size_t>(order_ - 1);
  if (context.size() > max_ctx) context = context.substr(context.size() - max_ctx);
  for (std::size_t k = context.size() + 1; k-- > 0;) {
    const std::string_view suffix = context.substr(context.size() - k);
    std::size_t seen = 0, hits = 0;
    for (std::size_t at = window.find(suffix); at != std::string_view::npos && at + k < window.size();
         at = window.find(suffix, at + 1)) {
      ++seen;
      if (static_cast<std::uint8_t>(window[at + k]) == symbol) ++hits;
    }
    if (seen > 0) return static_cast<double>(hits) / static_cast<double>(seen);
  }
  return 0.0;
}

std::string NgramPolicy::prompt_window(std::string_view prompt) {
  std::size_t from = prompt.size() > kPromptWindowBytes ? prompt.size() - kPromptWindowBytes : 0;
  while (from < prompt.size() && (static_cast<unsigned char>(prompt[from]) & 0xC0) == 0x80) ++from;
  return normalize(prompt.substr(from));
}

SparseLogProbs NgramPolicy::logprobs_for(const PolicyContext& ctx,
                                         std::span<const TokenId> candidates) const {
  if (candidates.empty()) throw ContractError("logprobs_for needs at least one candidate");
  SparseLogProbs out;
  const std::size_t max_ctx = static_cast<std::size_t>(order_ - 1);
  const std::string_view path = ctx.path_text;
  const std::string base(path.substr(path.size() > max_ctx ? path.size() - max_ctx : 0));
  // Candidates mostly share their first byte's context; memoize per call.
  std::unordered_map<std::string, double> memo;
  const std::size_t vocab = bridge_->tokenizer().vocab_size();
  // One search asks many times with the same prompt; keep its window.
  thread_local std::string last_prompt, window;
  if (prompt_weight_ > 0.0 && (window.empty() || last_prompt != ctx.prompt_text)) {
    last_prompt = ctx.prompt_text;
    window = prompt_window(ctx.prompt_text);
  }
  auto score = [&](const std::string& context, std::uint8_t symbol) {
    const double corpus = symbol_logprob(context, symbol);
    if (prompt_weight_ <= 0.0) return corpus;
    return std::log((1.0 - prompt_weight_) * std::exp(corpus) +
                    prompt_weight_ * prompt_probability(window, context, symbol));
  };
  for (TokenId id : candidates) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab || bridge_->surface(id).empty()) {
      out.unknown_ids.push_back(id);
      continue;
    }
    std::string context = base;
    double lp = 0.0;
    for (char ch : bridge_->surface(id)) {
      std::string key = context;
      key.push_back(ch);
      auto it = memo.find(key);
      if (it == memo.end())
        it = memo.emplace(key, score(context, static_cast<std::uint8_t>(ch))).first;
      lp += it->second;
      context.push_back(ch);
      if (context.size() > max_ctx) context.erase(0, context.size() - max_ctx);
    }
    out.entries.push_back({id, lp});
  }
  return out;
}

std::string ScriptedGenerator::generate(const std::string& prompt,
                                        std::span<const std::string> stop,
                                        int max_tokens) {
  if (max_tokens < 1) throw ContractError("max_tokens must be >= 1");
  std::lock_guard<std::mutex> lock(mu_);
  if (replies_.empty()) throw Error("script exhausted");
  prompts_.push_back(prompt);
  std::string reply = std::move(replies_.front());
  replies_.pop_front();
  return truncate_at_stop(reply, stop);
}

std::size_t ScriptedGenerator::remaining() const {
  std::lock_guard<std::mutex> lock(mu_);
  return replies_.size();
}

SparseLogProbs RemoteLanguageModel::logprobs_for(const PolicyContext& ctx,
                                                 std::span<const TokenId> candidates) const {
  if (candidates.empty()) throw ContractError("logprobs_for needs at least one candidate");
  nlohmann::json body = {{"prompt", ctx.prompt_text},
                         {"path", ctx.path_text},
                         {"candidate_ids", std::vector<TokenId>(candidates.begin(), candidates.end())}};
  const nlohmann::json reply = client_.post("/v1/logprobs", body);
  if (!reply.is_object() || !reply.contains("entries") || !reply["entries"].is_array())
    throw ProtocolError("/v1/logprobs reply lacks an `entries` array");

  std::unordered_map<TokenId, double> got;
  for (const auto& e : reply["entries"]) {
    if (!e.is_object() || !e.contains("id") || !e.contains("logprob") ||
        !e["id"].is_number_integer() || !e["logprob"].is_number())
      throw ProtocolError("/v1/logprobs entry needs integer `id` and numeric `logprob`");
    const double lp = e["logprob"].get<double>();
    if (!std::isfinite(lp) || lp > 1e-9)
      throw ProtocolError("/v1/logprobs returned a logprob outside (-inf, 0]");
    if (!got.emplace(e["id"].get<TokenId>(), std::min(lp, 0.0)).second)
      throw ProtocolError("/v1/logprobs returned a duplicate id");
  }
  SparseLogProbs out;
  std::unordered_set<TokenId> seen;
  for (TokenId id : candidates) {
    if (!seen.insert(id).second) continue;
    auto it = got.find(id);
    if (it == got.end()) {
      out.unknown_ids.push_back(id);
    } else {
      out.entries.push_back({id, it->second});
    }
  }
  return out;
}

std::string RemoteLanguageModel::generate(const std::string& prompt,
                                          std::span<const std::string> stop,
                                          int max_tokens) {
  if (max_tokens < 1) throw ContractError("max_tokens must be >= 1");
  nlohmann::json body = {{"prompt", prompt},
                         {"stop", std::vector<std::string>(stop.begin(), stop.end())},
                         {"max_tokens", max_tokens}};
  const nlohmann::json reply = client_.post("/v1/generate", body);
  if (!reply.is_object() || !reply.contains("text") || !reply["text"].is_string())
    throw ProtocolError("/v1/generate reply lacks a string `text`");
  return truncate_at_stop(reply["text"].get<std::string>(), stop);
}

}  // namespace ctmcts

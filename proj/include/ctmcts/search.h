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
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctmcts/corpus_index.h"
#include "ctmcts/policy.h"
#include "ctmcts/token_bridge.h"
#include "ctmcts/trajectory.h"
#include "ctmcts/value_scorer.h"

namespace ctmcts {

enum class Strategy { kCtMcts, kBeam, kGreedy };

// How max_rollout_tokens bounds a decode.
enum class LengthCap {
  kAppended,  // at most max_rollout_tokens appended by each rollout
  kPath,      // the whole path is at most max_rollout_tokens long
};

struct SearchConfig {
  int granularity = 6;   // G: tokens packed into one tree node
  int expansions = 2;    // M: children created per simulation
  int top_k = 8;         // candidate pool for the first expansion token
  double lambda = 1.0;   // UCT exploration constant
  int simulations = 30;  // S
  int max_rollout_tokens = 64;
  LengthCap length_cap = LengthCap::kAppended;
  double temperature = 1.0;
  int paths_returned = 3;  // P
  int beam_width = 4;      // baseline beam search only
  Strategy strategy = Strategy::kCtMcts;
  std::uint64_t seed = 0;

  // Throws ContractError on any out-of-range field.
  void validate() const;
};

const char* strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);  // "ct-mcts" | "beam" | "greedy"
const char* length_cap_name(LengthCap c);
LengthCap parse_length_cap(const std::string& name);  // "appended" | "path"

// Q + lambda * sqrt(log(n_total) / (1 + n_sa)). Throws ContractError when
// n_total < 1 or n_sa < 0.
double uct_score(double q, std::int64_t n_sa, std::int64_t n_total, double lambda);

struct SearchNode {
  static constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

  std::vector<TokenId> tokens;  // this node's own tokens (empty at the root)
  IndexInterval interval;       // interval of the full root-to-here path
  std::string path_text;        // decoded root-to-here path
  std::size_t path_tokens = 0;  // token count of the root-to-here path
  double path_logprob = 0.0;    // cumulative policy logprob of the path
  std::int64_t visits = 0;      // N
  double value_sum = 0.0;       // W
  std::vector<std::size_t> children;
  std::size_t parent = kNoParent;
  std::size_t open_starts = 0;  // top-k first tokens no child starts with yet
  bool terminal = false;   // no valid continuation
  bool exhausted = false;  // terminal, or every child exhausted and no open starts

  double q() const { return visits > 0 ? value_sum / static_cast<double>(visits) : 0.0; }
};

// Arena of nodes; node 0 is the root.
class SearchTree {
 public:
  explicit SearchTree(IndexInterval root_interval);

  static constexpr std::size_t kRoot = 0;

  const SearchNode& node(std::size_t id) const { return nodes_[id]; }
  SearchNode& node(std::size_t id) { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }

  std::size_t add_child(std::size_t parent, std::vector<TokenId> tokens,
                        IndexInterval interval, std::string path_text,
                        double path_logprob);

  // Root-to-node token ids.
  std::vector<TokenId> path_token_ids(std::size_t id) const;

  // Marks `id` terminal and propagates exhaustion towards the root.
  void mark_terminal(std::size_t id);
  // Records how many untried starts `id` has left and propagates exhaustion.
  void set_open_starts(std::size_t id, std::size_t open);

  // N += 1 and W += value on every node from `leaf` up to the root.
  // Throws ContractError unless 0 <= value <= 1.
  void backpropagate(std::size_t leaf, double value);

 private:
  void refresh_exhausted(std::size_t id);
  void propagate_exhausted(std::size_t from);

  std::vector<SearchNode> nodes_;
};

// Descends from the root by UCT (unvisited children count as Q = 0; a zero
// visit total makes the exploration term 0), skipping exhausted subtrees and
// breaking ties by insertion order, down to a non-terminal leaf. Returns
// nullopt once the whole tree is exhausted.
std::optional<std::size_t> select(const SearchTree& tree, double lambda);

// A valid next token together with its policy score.
struct ScoredToken {
  TokenId token;
  IndexInterval interval;
  double logprob;
};

struct SearchStats {
  int simulations = 0;
  int rollouts = 0;
  std::int64_t policy_calls = 0;
  std::int64_t cache_hits = 0;
  std::size_t tree_nodes = 0;
  bool exhausted = false;
  bool dead_corpus = false;
};

// Shared machinery of every decoding strategy: the corpus interval walk, the
// policy, and a per-search memo of scored continuations keyed by path text.
// The memo is exact for any policy that is a function of (prompt, path).
class DecodeContext {
 public:
  DecodeContext(const CorpusIndex& index, const TokenBridge& bridge, const Policy& policy,
                std::string prompt_text);

  // Valid continuations of `path_text` with their logprobs, sorted by token
  // id. Tokens the policy does not know are dropped.
  const std::vector<ScoredToken>& next(const std::string& path_text, IndexInterval interval);

  const CorpusIndex& index() const { return *index_; }
  const TokenBridge& bridge() const { return *bridge_; }
  SearchStats& stats() { return stats_; }
  const SearchStats& stats() const { return stats_; }

 private:
  const CorpusIndex* index_;
  const TokenBridge* bridge_;
  const Policy* policy_;
  std::string prompt_;
  std::unordered_map<std::string, std::vector<ScoredToken>> memo_;
  SearchStats stats_;
};

// The stochastic beam expansion of a non-terminal node. Returns the ids of the
// new children (at most M); none means the node was marked terminal.
std::vector<std::size_t> expand(SearchTree& tree, std::size_t node, DecodeContext& ctx,
                                const SearchConfig& cfg, std::mt19937_64& rng);

// Greedy constrained decode from `node` (argmax logprob, ties to the lowest
// token id). `value` is left unset.
Trajectory rollout(const SearchTree& tree, std::size_t node, DecodeContext& ctx,
                   const SearchConfig& cfg);

struct SearchResult {
  std::vector<Trajectory> trajectories;  // best first, at most P (or beam_width)
  std::vector<Trajectory> rollouts;      // every scored rollout, in order
  SearchStats stats;
  bool dead_corpus = false;
};

// One CT-MCTS episode over a single index, step by step.
class CtMcts {
 public:
  CtMcts(const CorpusIndex& index, const TokenBridge& bridge, const Policy& policy,
         const ValueScorer& scorer, SearchConfig cfg, std::string question,
         std::string prompt_text);

  // select -> expand -> rollout and score every new child -> backpropagate.
  // Returns false once the tree is exhausted (or the corpus is dead).
  bool simulate();
  // Up to cfg.simulations simulations.
  void run();

  // Top-P distinct texts by (value desc, cum_logprob desc).
  std::vector<Trajectory> best() const;
  SearchResult result() const;

  const SearchTree& tree() const { return tree_; }
  const std::vector<Trajectory>& pool() const { return pool_; }
  const SearchStats& stats() const { return ctx_.stats(); }

 private:
  void score_and_backpropagate(std::size_t node);

  SearchConfig cfg_;
  std::string question_;
  const ValueScorer* scorer_;
  DecodeContext ctx_;
  SearchTree tree_;
  std::mt19937_64 rng_;
  std::vector<Trajectory> pool_;
};

// Full CT-MCTS search.
SearchResult ct_mcts_search(const std::string& question, const std::string& prompt_text,
                            const CorpusIndex& index, const TokenBridge& bridge,
                            const Policy& policy, const ValueScorer& scorer,
                            const SearchConfig& cfg);

// Baseline: one greedy decode from the empty path, unscored.
SearchResult greedy_search(const std::string& prompt_text, const CorpusIndex& index,
                           const TokenBridge& bridge, const Policy& policy,
                           const SearchConfig& cfg);

// Baseline: deterministic beam search ranked by cumulative logprob (ties by
// token sequence), unscored. Returns the final beams, best first.
SearchResult beam_search(const std::string& prompt_text, const CorpusIndex& index,
                         const TokenBridge& bridge, const Policy& policy, int beam_width,
                         const SearchConfig& cfg);

// Dispatches on cfg.strategy. Unscored strategies ignore `scorer`.
SearchResult run_strategy(const std::string& question, const std::string& prompt_text,
                          const CorpusIndex& index, const TokenBridge& bridge,
                          const Policy& policy, const ValueScorer& scorer,
                          const SearchConfig& cfg);

}  // namespace ctmcts

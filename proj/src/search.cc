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

#include "ctmcts/search.h"

#include <algorithm>
#include <cmath>

#include "ctmcts/error.h"

namespace ctmcts {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ContractError(std::string("search config: ") + what);
}

// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool by_logprob_then_id(const ScoredToken& a, const ScoredToken& b) {
  if (a.logprob != b.logprob) return a.logprob > b.logprob;
  return a.token < b.token;
}

// Draws `count` distinct entries, each draw proportional to exp(lp / T) among
// those left.
std::vector<ScoredToken> sample_distinct(std::vector<ScoredToken> pool, std::size_t count,
                                         double temperature, std::mt19937_64& rng) {
  std::vector<ScoredToken> picked;
  while (picked.size() < count && !pool.empty()) {
    double top = pool.front().logprob;
    for (const auto& c : pool) top = std::max(top, c.logprob);
    std::vector<double> weight(pool.size());
    double total = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      weight[i] = std::exp((pool[i].logprob - top) / temperature);
      total += weight[i];
    }
    const double u = uniform01(rng) * total;
    std::size_t choice = pool.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      acc += weight[i];
      if (u < acc) {
        choice = i;
        break;
      }
    }
    picked.push_back(pool[choice]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(choice));
  }
  return picked;
}

struct Beam {
  std::vector<TokenId> tokens;
  IndexInterval interval;
  std::string text;
  double logprob = 0.0;
  bool done = false;
};

bool beam_before(const Beam& a, const Beam& b) {
  if (a.logprob != b.logprob) return a.logprob > b.logprob;
  return a.tokens < b.tokens;
}

// Token budget left for a path of `path_tokens` tokens under a cap that
// counts from `start_tokens`.
int remaining_budget(const SearchConfig& cfg, std::size_t path_tokens) {
  if (cfg.length_cap == LengthCap::kAppended) return cfg.max_rollout_tokens;
  const auto cap = static_cast<std::size_t>(cfg.max_rollout_tokens);
  return path_tokens >= cap ? 0 : static_cast<int>(cap - path_tokens);
}

bool better_trajectory(const Trajectory& a, const Trajectory& b) {
  const double va = a.value.value_or(0.0), vb = b.value.value_or(0.0);
  if (va != vb) return va > vb;
  if (a.cum_logprob != b.cum_logprob) return a.cum_logprob > b.cum_logprob;
  return a.text < b.text;
}

Trajectory finish(const CorpusIndex& index, std::string text, std::vector<TokenId> tokens,
                  double logprob, IndexInterval interval) {
  Trajectory t;
  t.text = std::move(text);
  t.token_ids = std::move(tokens);
  t.cum_logprob = logprob;
  if (!t.text.empty()) t.doc_ids = index.locate_docs(interval);
  return t;
}

}  // namespace

void SearchConfig::validate() const {
  require(granularity >= 1, "G must be >= 1");
  require(expansions >= 1, "M must be >= 1");
  require(top_k >= expansions, "top_k must be >= M");
  require(std::isfinite(lambda) && lambda > 0.0, "lambda must be > 0");
  require(simulations >= 1, "simulations must be >= 1");
  require(max_rollout_tokens >= 0, "max_rollout_tokens must be >= 0");
  require(std::isfinite(temperature) && temperature > 0.0, "temperature must be > 0");
  require(paths_returned >= 1, "paths_returned must be >= 1");
  require(beam_width >= 1, "beam_width must be >= 1");
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kCtMcts: return "ct-mcts";
    case Strategy::kBeam: return "beam";
    case Strategy::kGreedy: return "greedy";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "ct-mcts" || name == "ct_mcts") return Strategy::kCtMcts;
  if (name == "beam") return Strategy::kBeam;
  if (name == "greedy") return Strategy::kGreedy;
  throw ContractError("unknown strategy `" + name + "`");
}

const char* length_cap_name(LengthCap c) {
  return c == LengthCap::kAppended ? "appended" : "path";
}

LengthCap parse_length_cap(const std::string& name) {
  if (name == "appended") return LengthCap::kAppended;
  if (name == "path") return LengthCap::kPath;
  throw ContractError("unknown length cap `" + name + "`");
}

double uct_score(double q, std::int64_t n_sa, std::int64_t n_total, double lambda) {
  if (n_total < 1) throw ContractError("uct_score: n_total must be >= 1");
  if (n_sa < 0) throw ContractError("uct_score: n_sa must be >= 0");
  return q + lambda * std::sqrt(std::log(static_cast<double>(n_total)) /
                                (1.0 + static_cast<double>(n_sa)));
}

// ---------------------------------------------------------------------------

SearchTree::SearchTree(IndexInterval root_interval) {
  SearchNode root;
  root.interval = root_interval;
  nodes_.push_back(std::move(root));
}

std::size_t SearchTree::add_child(std::size_t parent, std::vector<TokenId> tokens,
                                  IndexInterval interval, std::string path_text,
                                  double path_logprob) {
  SearchNode n;
  n.path_tokens = nodes_[parent].path_tokens + tokens.size();
  n.tokens = std::move(tokens);
  n.interval = interval;
  n.path_text = std::move(path_text);
  n.path_logprob = path_logprob;
  n.parent = parent;
  const std::size_t id = nodes_.size();
  nodes_.push_back(std::move(n));
  nodes_[parent].children.push_back(id);
  nodes_[parent].exhausted = false;
  return id;
}

std::vector<TokenId> SearchTree::path_token_ids(std::size_t id) const {
  std::vector<const SearchNode*> chain;
  for (std::size_t at = id; at != SearchNode::kNoParent; at = nodes_[at].parent)
    chain.push_back(&nodes_[at]);
  std::vector<TokenId> out;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    out.insert(out.end(), (*it)->tokens.begin(), (*it)->tokens.end());
  return out;
}

void SearchTree::mark_terminal(std::size_t id) {
  nodes_[id].terminal = true;
  nodes_[id].exhausted = true;
  propagate_exhausted(nodes_[id].parent);
}

void SearchTree::set_open_starts(std::size_t id, std::size_t open) {
  nodes_[id].open_starts = open;
  propagate_exhausted(id);
}

void SearchTree::propagate_exhausted(std::size_t from) {
  for (std::size_t at = from; at != SearchNode::kNoParent; at = nodes_[at].parent) {
    const bool before = nodes_[at].exhausted;
    refresh_exhausted(at);
    if (nodes_[at].exhausted == before) break;
  }
}

void SearchTree::refresh_exhausted(std::size_t id) {
  SearchNode& n = nodes_[id];
  if (n.terminal) {
    n.exhausted = true;
    return;
  }
  n.exhausted = !n.children.empty() && n.open_starts == 0 &&
                std::all_of(n.children.begin(), n.children.end(),
                            [&](std::size_t c) { return nodes_[c].exhausted; });
}

void SearchTree::backpropagate(std::size_t leaf, double value) {
  if (!(value >= 0.0 && value <= 1.0))
    throw ContractError("backpropagate: value must lie in [0,1]");
  for (std::size_t at = leaf; at != SearchNode::kNoParent; at = nodes_[at].parent) {
    nodes_[at].visits += 1;
    nodes_[at].value_sum += value;
  }
}

std::optional<std::size_t> select(const SearchTree& tree, double lambda) {
  std::size_t at = SearchTree::kRoot;
  if (tree.node(at).exhausted) return std::nullopt;
  while (!tree.node(at).children.empty()) {
    const SearchNode& n = tree.node(at);
    std::int64_t total = 0;
    for (std::size_t c : n.children) total += tree.node(c).visits;
    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (std::size_t c : n.children) {
      const SearchNode& child = tree.node(c);
      if (child.exhausted) continue;
      const double s =
          total > 0 ? uct_score(child.q(), child.visits, total, lambda) : child.q();
      if (!best || s > best_score) {
        best = c;
        best_score = s;
      }
    }
    // Every child is exhausted but untried starts remain: widen this node.
    if (!best) return at;
    at = *best;
  }
  if (tree.node(at).terminal) return std::nullopt;
  return at;
}

// ---------------------------------------------------------------------------

DecodeContext::DecodeContext(const CorpusIndex& index, const TokenBridge& bridge,
                             const Policy& policy, std::string prompt_text)
    : index_(&index), bridge_(&bridge), policy_(&policy), prompt_(std::move(prompt_text)) {}

const std::vector<ScoredToken>& DecodeContext::next(const std::string& path_text,
                                                    IndexInterval interval) {
  if (auto it = memo_.find(path_text); it != memo_.end()) {
    ++stats_.cache_hits;
    return it->second;
  }
  std::vector<ScoredToken> out;
  const std::vector<ValidToken> valid = bridge_->valid_next_tokens(*index_, interval);
  if (!valid.empty()) {
    std::vector<TokenId> ids;
    ids.reserve(valid.size());
    for (const auto& v : valid) ids.push_back(v.token);
    const SparseLogProbs lp = policy_->logprobs_for(PolicyContext{prompt_, path_text}, ids);
    ++stats_.policy_calls;
    std::unordered_map<TokenId, double> by_id;
    for (const auto& e : lp.entries) by_id.emplace(e.id, e.logprob);
    for (const auto& v : valid) {
      auto hit = by_id.find(v.token);
      if (hit != by_id.end()) out.push_back({v.token, v.interval, hit->second});
    }
  }
  return memo_.emplace(path_text, std::move(out)).first->second;
}

std::vector<std::size_t> expand(SearchTree& tree, std::size_t id, DecodeContext& ctx,
                                const SearchConfig& cfg, std::mt19937_64& rng) {
  const SearchNode& node = tree.node(id);
  if (node.terminal) throw ContractError("expand: node is terminal");
  const int budget = std::min(cfg.granularity, remaining_budget(cfg, node.path_tokens));
  if (budget <= 0) {
    tree.mark_terminal(id);
    return {};
  }

  std::vector<ScoredToken> candidates = ctx.next(node.path_text, node.interval);
  if (candidates.empty()) {
    tree.mark_terminal(id);
    return {};
  }
  std::sort(candidates.begin(), candidates.end(), by_logprob_then_id);
  if (candidates.size() > static_cast<std::size_t>(cfg.top_k))
    candidates.resize(static_cast<std::size_t>(cfg.top_k));

  // Starts that an existing child already begins with are not drawn again.
  auto used = [&](TokenId t) {
    const auto& kids = tree.node(id).children;
    return std::any_of(kids.begin(), kids.end(),
                       [&](std::size_t c) { return tree.node(c).tokens.front() == t; });
  };
  std::vector<ScoredToken> fresh;
  for (const ScoredToken& c : candidates)
    if (!used(c.token)) fresh.push_back(c);
  if (fresh.empty()) {
    tree.set_open_starts(id, 0);
    return {};
  }

  const auto& bridge = ctx.bridge();
  std::vector<Beam> beams;
  for (const ScoredToken& s : sample_distinct(fresh, static_cast<std::size_t>(cfg.expansions),
                                              cfg.temperature, rng)) {
    beams.push_back({{s.token}, s.interval, node.path_text + bridge.surface(s.token), s.logprob});
  }
  const std::size_t width = beams.size();

  for (int step = 1; step < budget; ++step) {
    std::vector<Beam> pool;
    bool extended = false;
    for (Beam& b : beams) {
      if (!b.done) {
        std::vector<ScoredToken> next = ctx.next(b.text, b.interval);
        if (next.empty()) {
          b.done = true;
        } else {
          std::sort(next.begin(), next.end(), by_logprob_then_id);
          if (next.size() > width) next.resize(width);
          for (const ScoredToken& s : next) {
            Beam e = b;
            e.tokens.push_back(s.token);
            e.interval = s.interval;
            e.text += bridge.surface(s.token);
            e.logprob += s.logprob;
            pool.push_back(std::move(e));
          }
          extended = true;
          continue;
        }
      }
      pool.push_back(b);
    }
    std::sort(pool.begin(), pool.end(), beam_before);
    if (pool.size() > width) pool.resize(width);
    beams = std::move(pool);
    if (!extended) break;
  }

  std::vector<std::size_t> created;
  for (Beam& b : beams) {
    const SearchNode& parent = tree.node(id);
    const bool duplicate =
        std::any_of(parent.children.begin(), parent.children.end(),
                    [&](std::size_t c) { return tree.node(c).tokens == b.tokens; });
    if (duplicate) continue;
    const double lp = parent.path_logprob + b.logprob;
    created.push_back(tree.add_child(id, std::move(b.tokens), b.interval, std::move(b.text), lp));
  }
  std::size_t open = 0;
  for (const ScoredToken& c : candidates) open += used(c.token) ? 0 : 1;
  tree.set_open_starts(id, open);
  return created;
}

Trajectory rollout(const SearchTree& tree, std::size_t id, DecodeContext& ctx,
                   const SearchConfig& cfg) {
  const SearchNode& node = tree.node(id);
  std::string text = node.path_text;
  IndexInterval iv = node.interval;
  std::vector<TokenId> tokens = tree.path_token_ids(id);
  double logprob = node.path_logprob;
  const int budget = remaining_budget(cfg, node.path_tokens);
  for (int step = 0; step < budget; ++step) {
    const std::vector<ScoredToken>& next = ctx.next(text, iv);
    if (next.empty()) break;
    const ScoredToken* best = &next.front();
    for (const ScoredToken& s : next)
      if (s.logprob > best->logprob) best = &s;  // ids ascending: first max wins
    const ScoredToken chosen = *best;
    text += ctx.bridge().surface(chosen.token);
    iv = chosen.interval;
    tokens.push_back(chosen.token);
    logprob += chosen.logprob;
  }
  return finish(ctx.index(), std::move(text), std::move(tokens), logprob, iv);
}

// ---------------------------------------------------------------------------

CtMcts::CtMcts(const CorpusIndex& index, const TokenBridge& bridge, const Policy& policy,
               const ValueScorer& scorer, SearchConfig cfg, std::string question,
               std::string prompt_text)
    : cfg_(std::move(cfg)),
      question_(std::move(question)),
      scorer_(&scorer),
      ctx_(index, bridge, policy, std::move(prompt_text)),
      tree_(index.root()),
      rng_(cfg_.seed) {
  cfg_.validate();
}

bool CtMcts::simulate() {
  SearchStats& st = ctx_.stats();
  if (st.dead_corpus || st.exhausted) return false;
  const std::optional<std::size_t> leaf = select(tree_, cfg_.lambda);
  if (!leaf) {
    st.exhausted = true;
    return false;
  }
  const std::vector<std::size_t> children = expand(tree_, *leaf, ctx_, cfg_, rng_);
  if (children.empty()) {
    if (*leaf == SearchTree::kRoot && ctx_.next("", tree_.node(*leaf).interval).empty()) {
      st.dead_corpus = true;
      st.exhausted = true;
      return false;
    }
    // A widening attempt that found nothing new only closes the node.
    if (tree_.node(*leaf).children.empty()) score_and_backpropagate(*leaf);
  } else {
    for (std::size_t c : children) score_and_backpropagate(c);
  }
  ++st.simulations;
  return true;
}

void CtMcts::run() {
  for (int i = 0; i < cfg_.simulations; ++i)
    if (!simulate()) break;
}

void CtMcts::score_and_backpropagate(std::size_t id) {
  Trajectory t = rollout(tree_, id, ctx_, cfg_);
  const double v = t.text.empty() ? 0.0 : scorer_->score(question_, t.text);
  t.value = v;
  pool_.push_back(std::move(t));
  ++ctx_.stats().rollouts;
  tree_.backpropagate(id, v);

  // A child with nowhere to go is terminal right away, so selection never
  // spends a simulation on it.
  const SearchNode& n = tree_.node(id);
  if (!n.terminal && (remaining_budget(cfg_, n.path_tokens) == 0 ||
                      ctx_.next(n.path_text, n.interval).empty()))
    tree_.mark_terminal(id);
}

std::vector<Trajectory> CtMcts::best() const {
  std::vector<const Trajectory*> order;
  for (const auto& t : pool_) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(),
                   [](const Trajectory* a, const Trajectory* b) { return better_trajectory(*a, *b); });
  std::vector<Trajectory> out;
  for (const Trajectory* t : order) {
    if (out.size() >= static_cast<std::size_t>(cfg_.paths_returned)) break;
    if (t->text.empty()) continue;
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](const Trajectory& o) { return o.text == t->text; });
    if (!seen) out.push_back(*t);
  }
  return out;
}

SearchResult CtMcts::result() const {
  SearchResult r;
  r.trajectories = best();
  r.rollouts = pool_;
  r.stats = ctx_.stats();
  r.stats.tree_nodes = tree_.size();
  r.dead_corpus = r.stats.dead_corpus;
  return r;
}

SearchResult ct_mcts_search(const std::string& question, const std::string& prompt_text,
                            const CorpusIndex& index, const TokenBridge& bridge,
                            const Policy& policy, const ValueScorer& scorer,
                            const SearchConfig& cfg) {
  CtMcts engine(index, bridge, policy, scorer, cfg, question, prompt_text);
  engine.run();
  return engine.result();
}

SearchResult greedy_search(const std::string& prompt_text, const CorpusIndex& index,
                           const TokenBridge& bridge, const Policy& policy,
                           const SearchConfig& cfg) {
  cfg.validate();
  DecodeContext ctx(index, bridge, policy, prompt_text);
  const SearchTree tree(index.root());
  SearchResult r;
  if (ctx.next("", index.root()).empty()) {
    r.dead_corpus = r.stats.dead_corpus = true;
    return r;
  }
  r.trajectories.push_back(rollout(tree, SearchTree::kRoot, ctx, cfg));
  r.stats = ctx.stats();
  r.stats.rollouts = 1;
  r.stats.tree_nodes = 1;
  return r;
}

SearchResult beam_search(const std::string& prompt_text, const CorpusIndex& index,
                         const TokenBridge& bridge, const Policy& policy, int beam_width,
                         const SearchConfig& cfg) {
  cfg.validate();
  if (beam_width < 1) throw ContractError("beam_search: beam_width must be >= 1");
  DecodeContext ctx(index, bridge, policy, prompt_text);
  SearchResult r;
  if (ctx.next("", index.root()).empty()) {
    r.dead_corpus = r.stats.dead_corpus = true;
    return r;
  }
  const auto width = static_cast<std::size_t>(beam_width);
  std::vector<Beam> beams{Beam{{}, index.root(), "", 0.0, false}};
  for (int step = 0; step < cfg.max_rollout_tokens; ++step) {
    std::vector<Beam> pool;
    bool extended = false;
    for (Beam& b : beams) {
      if (!b.done) {
        const std::vector<ScoredToken>& next = ctx.next(b.text, b.interval);
        if (next.empty()) {
          b.done = true;
        } else {
          for (const ScoredToken& s : next) {
            Beam e = b;
            e.tokens.push_back(s.token);
            e.interval = s.interval;
            e.text += bridge.surface(s.token);
            e.logprob += s.logprob;
            pool.push_back(std::move(e));
          }
          extended = true;
          continue;
        }
      }
      pool.push_back(b);
    }
    std::sort(pool.begin(), pool.end(), beam_before);
    if (pool.size() > width) pool.resize(width);
    beams = std::move(pool);
    if (!extended) break;
  }
  for (Beam& b : beams)
    r.trajectories.push_back(
        finish(index, std::move(b.text), std::move(b.tokens), b.logprob, b.interval));
  r.stats = ctx.stats();
  r.stats.rollouts = static_cast<int>(r.trajectories.size());
  return r;
}

SearchResult run_strategy(const std::string& question, const std::string& prompt_text,
                          const CorpusIndex& index, const TokenBridge& bridge,
                          const Policy& policy, const ValueScorer& scorer,
                          const SearchConfig& cfg) {
  switch (cfg.strategy) {
    case Strategy::kCtMcts:
      return ct_mcts_search(question, prompt_text, index, bridge, policy, scorer, cfg);
    case Strategy::kBeam:
      return beam_search(prompt_text, index, bridge, policy, cfg.beam_width, cfg);
    case Strategy::kGreedy:
      return greedy_search(prompt_text, index, bridge, policy, cfg);
  }
  throw ContractError("unknown strategy");
}

}  // namespace ctmcts

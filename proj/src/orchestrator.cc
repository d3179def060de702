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

#include "ctmcts/orchestrator.h"

#include <regex>

#include "ctmcts/error.h"
#include "ctmcts/text.h"

namespace ctmcts {

namespace {

const std::string kSearchOpen = "<search>", kSearchClose = "</search>";
const std::string kAnswerOpen = "<answer>", kAnswerClose = "</answer>";
const std::string kThinkOpen = "<think>", kThinkClose = "</think>";

std::string cut_chars(const std::string& text, std::size_t max_chars) {
  return text.substr(0, utf8_step_forward(text, 0, max_chars));
}

}  // namespace

const char* action_kind_name(ActionKind k) {
  switch (k) {
    case ActionKind::kThink: return "think";
    case ActionKind::kSearch: return "search";
    case ActionKind::kAnswer: return "answer";
    case ActionKind::kMalformed: return "malformed";
  }
  return "?";
}

Action parse_action(std::string_view text) {
  Action a;
  const std::size_t s = text.find(kSearchOpen);
  const std::size_t ans = text.find(kAnswerOpen);

  if (ans != std::string_view::npos && (s == std::string_view::npos || ans < s)) {
    const std::size_t body = ans + kAnswerOpen.size();
    const std::size_t close = text.find(kAnswerClose, body);
    if (close != std::string_view::npos) {
      a.kind = ActionKind::kAnswer;
      a.payload = trim(text.substr(body, close - body));
      return a;
    }
  }

  if (s != std::string_view::npos) {
    const std::size_t body = s + kSearchOpen.size();
    const std::size_t close = text.find(kSearchClose, body);
    const std::string inner(text.substr(body, close == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : close - body));
    if (close != std::string_view::npos) {
      static const std::regex query(
          R"(^\s*\(?\s*subject\s*:\s*([\s\S]*?)\s*,\s*question\s*:\s*([\s\S]*?)\s*\)?\s*$)",
          std::regex::icase);
      std::smatch m;
      if (std::regex_match(inner, m, query) && !trim(m[1].str()).empty() &&
          !trim(m[2].str()).empty()) {
        a.kind = ActionKind::kSearch;
        a.subject = trim(m[1].str());
        a.question = trim(m[2].str());
        a.payload = trim(inner);
        return a;
      }
    }
    a.kind = ActionKind::kMalformed;
    a.payload = trim(inner);
    return a;
  }

  a.kind = ActionKind::kThink;
  const std::size_t t = text.find(kThinkOpen);
  if (t != std::string_view::npos) {
    const std::size_t body = t + kThinkOpen.size();
    const std::size_t close = text.find(kThinkClose, body);
    a.payload = trim(text.substr(body, close == std::string_view::npos ? std::string_view::npos
                                                                       : close - body));
  } else {
    a.payload = trim(text);
  }
  return a;
}

Retrieval retrieve(const RetrievalSetup& setup, const ValueScorer& scorer,
                   const std::string& subject, const std::string& question) {
  Retrieval r;
  r.subject = subject;
  r.question = question;
  std::shared_ptr<const CorpusIndex> index;
  if (normalize_trimmed(subject).empty()) {
    index = setup.indices->full();
  } else {
    index = setup.indices->get(subject);
    r.subject_fallback = index == setup.indices->full();
  }
  const std::string prompt = fill_template(
      setup.prompts.retrieval, {{"question", retrieval_query(subject, question)}});
  r.search = run_strategy(question, prompt, *index, *setup.bridge, *setup.policy, scorer,
                          setup.search);
  std::vector<Trajectory> ranked;
  for (const Trajectory& t : r.search.trajectories) {
    if (ranked.size() >= static_cast<std::size_t>(setup.search.paths_returned)) break;
    if (!t.text.empty()) ranked.push_back(t);
  }
  if (!ranked.empty())
    r.evidence = select_documents(ranked, *index, *setup.documents, setup.select,
                                  setup.window_chars);
  return r;
}

std::string information_block(std::string_view subject, std::span<const Evidence> evidence) {
  std::string out = "<information>For ";
  out += subject;
  out += " :";
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    out += " Doc " + std::to_string(i) + ". ";
    out += cut_chars(evidence[i].text, kInformationDocChars);
  }
  out += "</information>";
  return out;
}

ReasoningTrace answer_question(const std::string& question, const RetrievalSetup& setup,
                               Generator& generator, const ValueScorer& scorer,
                               const ReasoningConfig& cfg) {
  if (cfg.max_searches < 1) throw ContractError("max_searches must be >= 1");
  ReasoningTrace trace;
  std::string context = fill_template(setup.prompts.reasoning, {{"question", question}});
  const std::vector<std::string> stops = {kSearchClose, kAnswerClose};

  try {
    bool budget_spent = false;
    for (int turn = 0; turn < cfg.max_turns && !budget_spent; ++turn) {
      ReasoningStep step;
      step.generated = generator.generate(context, stops, cfg.max_new_tokens);
      step.action = parse_action(step.generated);
      context += step.generated;

      if (step.action.kind == ActionKind::kAnswer) {
        trace.final_answer = step.action.payload;
        trace.steps.push_back(std::move(step));
        return trace;
      }
      if (step.action.kind == ActionKind::kSearch) {
        if (trace.search_count >= cfg.max_searches) {
          budget_spent = true;
        } else {
          Retrieval r = retrieve(setup, scorer, step.action.subject, step.action.question);
          ++trace.search_count;
          step.empty_retrieval = r.evidence.empty();
          context += "\n\n" + information_block(step.action.subject, r.evidence) + "\n\n";
          step.retrieval = std::move(r);
        }
      }
      trace.steps.push_back(std::move(step));
    }

    // Search budget or turn guard used up: one last forced answer.
    trace.forced_answer = true;
    context += cfg.forced_answer_suffix;
    ReasoningStep last;
    last.generated = generator.generate(context, stops, cfg.max_new_tokens);
    last.action = parse_action(last.generated);
    trace.final_answer = last.action.kind == ActionKind::kAnswer ? last.action.payload
                                                                 : trim(last.generated);
    trace.steps.push_back(std::move(last));
  } catch (const TransportError& e) {
    trace.error = e.what();
  } catch (const ProtocolError& e) {
    trace.error = e.what();
  }
  return trace;
}

}  // namespace ctmcts

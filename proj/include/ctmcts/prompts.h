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
#include <string_view>
#include <utility>
#include <vector>

namespace ctmcts {

// Built-in templates, identical to prompts/{reasoning,retrieval,value}.txt.
const std::string& default_reasoning_template();  // {question}
const std::string& default_retrieval_template();  // {question}
const std::string& default_value_template();      // {query_text}, {rollout_text}

struct PromptTemplates {
  std::string reasoning = default_reasoning_template();
  std::string retrieval = default_retrieval_template();
  std::string value = default_value_template();
};

// Reads a template file verbatim. Throws Error when unreadable.
std::string load_template(const std::string& path);

// Replaces every `{name}` with its value. Unknown placeholders are left as is;
// substituted text is never rescanned.
std::string fill_template(std::string_view tmpl,
                          const std::vector<std::pair<std::string, std::string>>& values);

// "subject: <subject>, question: <question>", the query line of the retrieval
// prompt.
std::string retrieval_query(std::string_view subject, std::string_view question);

}  // namespace ctmcts

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

#include "fixtures.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sys/wait.h>
#include <unistd.h>

#include "ctmcts/text.h"
#include "json.hpp"

namespace ctmcts::testing {

std::uint64_t naive_count(const std::vector<Document>& docs, const std::string& pattern) {
  std::uint64_t n = 0;
  for (const Document& d : docs) {
    if (pattern.empty()) {
      n += d.body.size() + 1;
      continue;
    }
    for (std::size_t at = d.body.find(pattern); at != std::string::npos;
         at = d.body.find(pattern, at + 1))
      ++n;
  }
  return n;
}

std::vector<DocId> naive_docs(const std::vector<Document>& docs, const std::string& pattern) {
  std::vector<DocId> out;
  for (const Document& d : docs)
    if (d.body.find(pattern) != std::string::npos) out.push_back(d.id);
  std::sort(out.begin(), out.end());
  return out;
}

bool naive_is_substring(const std::vector<Document>& docs, const std::string& text) {
  return std::any_of(docs.begin(), docs.end(), [&](const Document& d) {
    return d.body.find(text) != std::string::npos;
  });
}

std::vector<TokenId> brute_force_valid(const std::vector<Document>& docs, const Tokenizer& tok,
                                       const std::string& path) {
  std::vector<TokenId> out;
  for (std::size_t id = 0; id < tok.vocab_size(); ++id) {
    const std::string s = normalize(tok.surface(static_cast<TokenId>(id)));
    if (s.empty()) continue;
    if (naive_is_substring(docs, path + s)) out.push_back(static_cast<TokenId>(id));
  }
  return out;
}

std::vector<Document> three_doc_corpus(bool long_trap_body) {
  return {make_document(0, "The Consul", "the consul is an opera"),
          make_document(1, "Arlecchino", "arlecchino is a one-act opera"),
          make_document(2, "Trap (plumbing)",
                        long_trap_body ? "the trap retains fluid to prevent sewer gases"
                                       : "the trap retains fluid")};
}

std::vector<Document> random_corpus(std::mt19937_64& rng, std::size_t max_docs,
                                    std::size_t max_total_bytes, const std::string& alphabet) {
  std::uniform_int_distribution<std::size_t> ndocs(1, max_docs);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  const std::size_t n = ndocs(rng);
  const std::size_t per_doc = std::max<std::size_t>(1, max_total_bytes / n);
  std::uniform_int_distribution<std::size_t> len(1, per_doc);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) {
    std::string body;
    const std::size_t l = len(rng);
    for (std::size_t k = 0; k < l; ++k) body += alphabet[pick(rng)];
    Document d;
    d.id = static_cast<DocId>(i);
    d.title = "doc";
    d.body = body;  // alphabet is already normalized
    docs.push_back(std::move(d));
  }
  return docs;
}

namespace {

std::string code(char prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%03zu", prefix, i);
  return buf;
}

std::string made_up_word(std::mt19937_64& rng, const std::string& letters, std::size_t len,
                         std::set<std::string>& used) {
  std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
  for (;;) {
    std::string w;
    for (std::size_t k = 0; k < len; ++k) w += letters[pick(rng)];
    if (used.insert(w).second) return w;
  }
}

}  // namespace

Fixture trap_suite(std::size_t questions, std::uint64_t seed) {
  Fixture f;
  std::mt19937_64 rng(seed);
  std::set<std::string> used;
  const std::string letters = "abcdfghijklmnopqrstuvwxyz";  // no 'e'
  DocId next = 0;
  for (std::size_t i = 0; i < questions; ++i) {
    const std::string subject = code('q', i);
    const std::string gold = made_up_word(rng, letters, 6, used);
    f.documents.push_back(make_document(next++, subject + " notes", std::string(400, 'e')));
    std::string body;
    for (int r = 0; r < 8; ++r) body += (r ? " " : "") + gold;
    const DocId answer = next++;
    f.documents.push_back(make_document(answer, subject + " record", body));
    f.examples.push_back({subject, "what is recorded for " + subject + "?", subject, {gold}});
    f.answer_doc.push_back(answer);
  }
  return f;
}

Fixture planted_answer_fixture(std::size_t questions) {
  Fixture f;
  std::mt19937_64 rng(3);
  std::set<std::string> used;
  const std::string letters = "bdfgklmnprstvz";
  const std::string vowels = "aiou";
  DocId next = 0;
  for (std::size_t i = 0; i < questions; ++i) {
    const std::string subject = code('p', i);
    std::string city;
    do {
      city.clear();
      std::uniform_int_distribution<std::size_t> c(0, letters.size() - 1), v(0, vowels.size() - 1);
      for (int k = 0; k < 3; ++k) {
        city += letters[c(rng)];
        city += vowels[v(rng)];
      }
    } while (!used.insert(city).second);
    f.documents.push_back(make_document(next++, subject + " hobbies",
                                        subject + " enjoys tea and long walks by the river."));
    const DocId answer = next++;
    f.documents.push_back(
        make_document(answer, subject + " biography", subject + " lives in " + city + "."));
    f.documents.push_back(make_document(next++, subject + " career",
                                        subject + " worked as a clerk for many years."));
    f.examples.push_back({subject, "where does " + subject + " live?", subject, {city}});
    f.answer_doc.push_back(answer);
  }
  return f;
}

Fixture granularity_fixture(std::size_t questions, std::uint64_t seed) {
  static const std::vector<std::string> words = {
      "river", "stone", "market", "winter", "garden", "bridge", "castle", "forest",
      "letter", "window", "harbor", "silver", "ancient", "quiet", "northern", "village",
      "people", "travel", "summer", "mountain", "valley", "music", "painter", "festival",
      "history", "island", "engine", "railway", "station", "library", "theatre", "church",
      "of", "the", "and", "in", "with", "near", "was", "by"};
  Fixture f;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::set<std::string> used;
  const std::string letters = "bdfgklmnprstvz";
  auto prose = [&](std::size_t n_words) {
    std::string s;
    for (std::size_t k = 0; k < n_words; ++k) s += (k ? " " : "") + words[pick(rng)];
    return s;
  };
  DocId next = 0;
  for (std::size_t i = 0; i < questions; ++i) {
    const std::string subject = code('g', i);
    const std::string gold = made_up_word(rng, letters, 7, used);
    const DocId answer = next + 1;
    for (int d = 0; d < 3; ++d) {
      std::string body = prose(35);
      if (next == answer) body += " the founder of " + subject + " was " + gold + ". ";
      else body += " ";
      body += prose(35);
      f.documents.push_back(make_document(next++, subject + " part " + std::to_string(d), body));
    }
    f.examples.push_back({subject, "who founded " + subject + "?", subject, {gold}});
    f.answer_doc.push_back(answer);
  }
  return f;
}

std::string EvidenceReader::generate(const std::string& prompt, std::span<const std::string>,
                                     int) {
  ++calls_;
  if (calls_ == 1) {
    return "<think>I should look this up.</think>\n<search> (subject : " + subject_ +
           ", question : " + question_ + ") </search>";
  }
  const std::size_t info = prompt.rfind("<information>");
  if (info != std::string::npos) {
    static const std::regex lives(R"(lives in ([a-z]+))");
    std::smatch m;
    const std::string block = prompt.substr(info);
    if (std::regex_search(block, m, lives)) return "<answer> " + m[1].str() + " </answer>";
  }
  return "<answer> unknown </answer>";
}

StubServer::StubServer() = default;

void StubServer::start() {
  port_ = server_.bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { server_.listen_after_bind(); });
  server_.wait_until_ready();
}

StubServer::~StubServer() {
  server_.stop();
  if (thread_.joinable()) thread_.join();
}

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("ctmcts_tests_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = temp_path(name);
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

int run_command(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string corpus_jsonl(const std::vector<Document>& docs) {
  std::string out;
  for (const Document& d : docs)
    out += nlohmann::json{{"id", d.id}, {"title", d.title}, {"text", d.body}}.dump() + "\n";
  return out;
}

std::string dataset_jsonl(const std::vector<QAExample>& examples) {
  std::string out;
  for (const QAExample& e : examples) {
    nlohmann::json j = {{"id", e.id}, {"question", e.question}, {"golden_answers", e.gold_answers}};
    if (e.subject) j["subject"] = *e.subject;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace ctmcts::testing

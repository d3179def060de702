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
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ctmcts/corpus.h"
#include "ctmcts/harness.h"
#include "ctmcts/policy.h"
#include "ctmcts/tokenizer.h"
#include "httplib.h"

namespace ctmcts::testing {

// ---- oracles -------------------------------------------------------------

// Overlapping occurrences of `pattern` over all bodies; the empty pattern
// matches every position plus each terminator.
std::uint64_t naive_count(const std::vector<Document>& docs, const std::string& pattern);
// Ids of bodies containing `pattern`, ascending.
std::vector<DocId> naive_docs(const std::vector<Document>& docs, const std::string& pattern);
bool naive_is_substring(const std::vector<Document>& docs, const std::string& text);
// Token ids t with path + surface(t) inside some body, by trying every token.
std::vector<TokenId> brute_force_valid(const std::vector<Document>& docs,
                                       const Tokenizer& tok, const std::string& path);

// ---- corpora ---------------------------------------------------------------

// "the consul is an opera" / "arlecchino is a one-act opera" / the trap body.
std::vector<Document> three_doc_corpus(bool long_trap_body = false);

// Random corpus of up to `max_docs` documents over a small alphabet.
std::vector<Document> random_corpus(std::mt19937_64& rng, std::size_t max_docs,
                                    std::size_t max_total_bytes, const std::string& alphabet);

struct Fixture {
  std::vector<Document> documents;
  std::vector<QAExample> examples;
  std::vector<DocId> answer_doc;  // per example, the document holding the answer
};

// Per question "qNNN": a trap document whose body is one long run of 'e' and
// an answer document repeating the gold word, spelled without 'e'. Both carry
// the subject in the title only.
Fixture trap_suite(std::size_t questions, std::uint64_t seed = 7);

// Per question "pNNN": "pNNN lives in <city>." plus two distractors that share
// the subject. The city is a unique made-up word.
Fixture planted_answer_fixture(std::size_t questions = 20);

// Per question "gNNN": three documents of several hundred characters of
// word-salad prose, one of which states the answer mid-way.
Fixture granularity_fixture(std::size_t questions = 12, std::uint64_t seed = 11);

// ---- test doubles ----------------------------------------------------------

// Searches once with the question's subject, then answers with the word that
// follows "lives in" in the injected information (or "unknown").
class EvidenceReader : public Generator {
 public:
  EvidenceReader(std::string subject, std::string question)
      : subject_(std::move(subject)), question_(std::move(question)) {}
  std::string generate(const std::string& prompt, std::span<const std::string> stop,
                       int max_tokens) override;
  int calls() const { return calls_; }

 private:
  std::string subject_, question_;
  int calls_ = 0;
};

// An httplib server on a free loopback port, running on its own thread.
class StubServer {
 public:
  StubServer();
  ~StubServer();
  httplib::Server& server() { return server_; }
  void start();
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

// Writes `text` to a fresh file under the temp dir and returns its path.
std::string write_temp(const std::string& name, const std::string& text);
std::string temp_path(const std::string& name);

// Runs a shell command and returns its exit status (-1 if it did not exit).
int run_command(const std::string& command);
std::string read_file(const std::string& path);

std::string corpus_jsonl(const std::vector<Document>& docs);
std::string dataset_jsonl(const std::vector<QAExample>& examples);

}  // namespace ctmcts::testing

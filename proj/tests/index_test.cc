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

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "ctmcts/bit_vector.h"
#include "ctmcts/corpus_index.h"
#include "ctmcts/error.h"
#include "ctmcts/subject_index.h"
#include "ctmcts/suffix_array.h"
#include "ctmcts/wavelet_matrix.h"
#include "doctest.h"
#include "fixtures.h"

using namespace ctmcts;
using namespace ctmcts::testing;

namespace {

std::vector<Document> one(const std::string& body) { return {make_document(0, "t", body)}; }

}  // namespace

TEST_CASE("bit vector rank matches a running count") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {0u, 1u, 63u, 64u, 65u, 511u, 512u, 513u, 5000u}) {
    BitVector bv(n);
    std::vector<bool> ref(n);
    for (std::size_t i = 0; i < n; ++i)
      if (rng() % 3 == 0) {
        bv.set(i);
        ref[i] = true;
      }
    bv.build_rank();
    std::size_t ones = 0;
    for (std::size_t i = 0; i <= n; ++i) {
      CHECK(bv.rank1(i) == ones);
      if (i < n) ones += ref[i];
    }
  }
}

TEST_CASE("wavelet matrix access, rank and distinct symbols") {
  std::mt19937_64 rng(2);
  std::vector<std::uint8_t> codes(700);
  for (auto& c : codes) c = static_cast<std::uint8_t>(rng() % 40);
  const WaveletMatrix wm(codes, 6);
  for (std::size_t i = 0; i < codes.size(); ++i) CHECK(wm.access(i) == codes[i]);
  for (std::uint8_t c = 0; c < 40; c += 7)
    for (std::size_t i = 0; i <= codes.size(); i += 37)
      CHECK(wm.rank(c, i) == static_cast<std::size_t>(std::count(codes.begin(), codes.begin() + i, c)));
  const auto got = wm.distinct_in_range(100, 180);
  std::set<std::uint8_t> want(codes.begin() + 100, codes.begin() + 180);
  CHECK(got.size() == want.size());
  for (const auto& s : got) {
    CHECK(want.count(s.code));
    CHECK(s.rank_hi - s.rank_lo ==
          static_cast<std::size_t>(std::count(codes.begin() + 100, codes.begin() + 180, s.code)));
  }
}

TEST_CASE("suffix array against sorting") {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 30; ++round) {
    std::vector<std::uint8_t> text(1 + rng() % 300);
    for (auto& c : text) c = static_cast<std::uint8_t>(rng() % 4);
    const auto sa = build_suffix_array(text);
    std::vector<std::uint32_t> ref(text.size());
    for (std::uint32_t i = 0; i < ref.size(); ++i) ref[i] = i;
    std::sort(ref.begin(), ref.end(), [&](std::uint32_t a, std::uint32_t b) {
      return std::lexicographical_compare(text.begin() + a, text.end(), text.begin() + b, text.end());
    });
    CHECK(sa == ref);
  }
}

TEST_CASE("abracadabra") {
  const auto idx = CorpusIndex::build(one("abracadabra"));
  CHECK(idx.root().width() == 12);
  CHECK(idx.count("abra") == 2);
  CHECK(idx.extend(idx.find("abr"), 'a').width() == 2);
  CHECK(idx.extend(idx.find("abra"), 'z').empty());
  CHECK(idx.extend(idx.root(), 'a').width() == 5);
  CHECK(idx.count("x") == 0);
}

TEST_CASE("single symbol corpus and widths") {
  const auto idx = CorpusIndex::build(one("x"));
  CHECK(idx.count("x") == 1);
  CHECK(idx.count("y") == 0);
  const auto two = CorpusIndex::build(std::vector<Document>{make_document(0, "a", "aaaaa"),
                                                            make_document(1, "b", "bbbbbbb")});
  CHECK(two.root().width() == 14);
}

TEST_CASE("three-document corpus") {
  const auto docs = three_doc_corpus();
  const auto idx = CorpusIndex::build(docs);
  CHECK(idx.count("opera") == 2);
  CHECK(idx.locate_docs(idx.find("opera")) == std::vector<DocId>{0, 1});
  CHECK(idx.locate_docs(idx.find("fluid")) == std::vector<DocId>{2});
  CHECK(idx.locate_docs(idx.find(docs[1].body)) == std::vector<DocId>{1});
  CHECK(idx.locate_docs(IndexInterval{3, 3}).empty());
  // Never across a document boundary.
  CHECK(idx.count("operaarlecchino") == 0);
  CHECK(idx.count("opera arlecchino") == 0);

  const auto occ = idx.locate(idx.find("is"), 2);
  std::vector<Occurrence> want;
  for (const auto& d : docs)
    for (std::size_t at = d.body.find("is"); at != std::string::npos; at = d.body.find("is", at + 1))
      want.push_back({d.id, at});
  std::sort(want.begin(), want.end());
  CHECK(occ == want);
}

TEST_CASE("build errors") {
  CHECK_THROWS_AS(CorpusIndex::build(std::vector<Document>{}), BuildError);
  Document bad{4, "t", std::string("a\0b", 3)};
  try {
    CorpusIndex::build(std::vector<Document>{bad});
    FAIL("expected BuildError");
  } catch (const BuildError& e) {
    CHECK(std::string(e.what()).find("4") != std::string::npos);
  }
  CHECK_THROWS_AS(CorpusIndex::build(one("abc"), 0), BuildError);
}

TEST_CASE("random corpora agree with the naive scanner") {
  std::mt19937_64 rng(4);
  for (int round = 0; round < 20; ++round) {
    const auto docs = random_corpus(rng, 12, 3000, "abc d");
    const auto idx = CorpusIndex::build(docs, 1 + static_cast<std::uint32_t>(rng() % 40));
    for (int q = 0; q < 100; ++q) {
      std::string p;
      if (q % 2 == 0) {
        const auto& d = docs[rng() % docs.size()];
        const std::size_t at = rng() % d.body.size();
        p = d.body.substr(at, 1 + rng() % 8);
      } else {
        for (std::size_t k = 0, n = 1 + rng() % 5; k < n; ++k) p += "abc d"[rng() % 5];
      }
      CHECK(idx.count(p) == naive_count(docs, p));
      CHECK(idx.locate_docs(idx.find(p)) == naive_docs(docs, p));
    }
    // Round trip: widths at every step of a sampled substring.
    const auto& d = docs[rng() % docs.size()];
    IndexInterval iv = idx.root();
    for (std::size_t k = 0; k < std::min<std::size_t>(d.body.size(), 20); ++k) {
      iv = idx.extend(iv, static_cast<std::uint8_t>(d.body[k]));
      CHECK(iv.width() == naive_count(docs, d.body.substr(0, k + 1)));
    }
  }
}

TEST_CASE("next_symbols lists exactly the continuations") {
  const auto docs = three_doc_corpus();
  const auto idx = CorpusIndex::build(docs);
  const auto next = idx.next_symbols(idx.find("th"));
  std::set<char> got;
  for (const auto& n : next) got.insert(static_cast<char>(n.symbol));
  CHECK(got == std::set<char>{'e'});
  const auto end = idx.next_symbols(idx.find("fluid"));
  CHECK(end.empty());  // only the sentinel follows
}

TEST_CASE("save and load round trip") {
  const auto docs = three_doc_corpus();
  const auto idx = CorpusIndex::build(docs, 3);
  const std::string path = temp_path("three.ctix");
  save_index_file(path, idx, docs);
  const IndexBundle b = load_index_file(path);
  CHECK(b.documents.size() == 3);
  CHECK(b.documents[2].body == docs[2].body);
  for (const std::string p : {"opera", "the", "a", "fluid", "zz", ""}) {
    CHECK(b.index.count(p) == idx.count(p));
    if (!p.empty()) CHECK(b.index.locate_docs(b.index.find(p)) == idx.locate_docs(idx.find(p)));
  }
  std::ostringstream a, c;
  idx.save(a);
  b.index.save(c);
  CHECK(a.str() == c.str());

  SUBCASE("bad magic") {
    const std::string bad = write_temp("bad.ctix", "NOPE1234");
    CHECK_THROWS_AS(load_index_file(bad), ParseError);
  }
  SUBCASE("truncated") {
    std::ostringstream full;
    idx.save(full);
    const std::string cut = write_temp("cut.ctix", full.str().substr(0, full.str().size() / 2));
    CHECK_THROWS_AS(load_index_file(cut), ParseError);
  }
}

TEST_CASE("subject sub-indices") {
  const auto docs = three_doc_corpus();
  const auto trap = build_subject_subindex(docs, "trap");
  REQUIRE(trap.has_value());
  CHECK(trap->doc_ids() == std::vector<DocId>{2});
  const auto opera = build_subject_subindex(docs, "Opera");
  REQUIRE(opera.has_value());
  CHECK(opera->doc_ids() == std::vector<DocId>{0, 1});
  CHECK_FALSE(build_subject_subindex(docs, "zzz").has_value());
  CHECK_THROWS_AS(build_subject_subindex(docs, "   "), ContractError);

  auto full = std::make_shared<const CorpusIndex>(CorpusIndex::build(docs));
  auto shared_docs = std::make_shared<const std::vector<Document>>(docs);
  SubjectIndexCache cache(full, shared_docs, 2);
  CHECK(cache.get("zzz") == full);
  const auto t1 = cache.get("TRAP");
  const auto t2 = cache.get("trap");
  CHECK(t1 == t2);
  CHECK(t1->doc_ids() == std::vector<DocId>{2});
  cache.get("opera");
  cache.get("consul");  // evicts "trap"
  CHECK(cache.size() <= 2);
  const std::size_t before = cache.builds();
  cache.get("trap");
  CHECK(cache.builds() == before + 1);
}

#include "doctest.h"

#include <algorithm>
#include <set>

#include "chunkcrew/corpus.hpp"
#include "chunkcrew/errors.hpp"
#include "chunkcrew/generators.hpp"
#include "chunkcrew/member.hpp"
#include "chunkcrew/testcase.hpp"
#include "chunkcrew/tokenizer.hpp"

using namespace crew;

TEST_CASE("default grid parameters") {
  const auto lengths = default_lengths();
  REQUIRE(lengths.size() == 15);
  CHECK(lengths.front() == 1000);
  CHECK(lengths.back() == 128000);
  CHECK(std::is_sorted(lengths.begin(), lengths.end()));

  const auto depths = default_single_depths();
  REQUIRE(depths.size() == 10);
  CHECK(depths.front() == doctest::Approx(0.0));
  CHECK(depths.back() == doctest::Approx(1.0));

  CHECK(multi_depth_pairs().size() == 6);
  for (const auto& [a, b] : multi_depth_pairs()) CHECK(a < b);
}

TEST_CASE("entity replacement is whole-word, case-aware, longest-first") {
  const std::vector<std::pair<std::string, std::string>> m = {
      {"New York", "Ostrine"}, {"New York City", "Veldmara"}};
  CHECK(apply_entity_replacement("He moved to New York City from New York.", m) ==
        "He moved to Veldmara from Ostrine.");
  CHECK(apply_entity_replacement("NEW YORK wins", m) == "OSTRINE wins");
  CHECK(apply_entity_replacement("new york wins", m) == "ostrine wins");
  // "New Yorker" is a different word and stays untouched.
  CHECK(apply_entity_replacement("a New Yorker visits", m) == "a New Yorker visits");

  CHECK_THROWS_AS(
      apply_entity_replacement("x", {{"", "y"}}), InvalidInputError);
  CHECK_THROWS_AS(
      apply_entity_replacement("x", {{"dup", "a"}, {"dup", "b"}}), InvalidInputError);
}

TEST_CASE("single-doc placement hits the target token count exactly") {
  const Corpus corpus = Corpus::synthetic(80, 200, 400, 3);
  const auto needles = synthetic_single_needles(4, 3);
  for (double depth : {0.0, 0.5, 1.0}) {
    const TestCase c = build_single_doc_case(needles[0], corpus, {4000, {depth}}, 9);
    CHECK(count_tokens(c.document) == 4000);
    CHECK(c.document.find(c.gold) != std::string::npos);
    CHECK(c.kind == TaskKind::niah_single);
    REQUIRE(c.meta.depths.size() == 1);
    CHECK(c.meta.depths[0] == doctest::Approx(depth));
  }
}

TEST_CASE("single-doc placement respects the requested depth") {
  const Corpus corpus = Corpus::synthetic(120, 200, 400, 4);
  const auto needles = synthetic_single_needles(4, 4);
  const TestCase shallow = build_single_doc_case(needles[1], corpus, {8000, {0.0}}, 5);
  const TestCase deep = build_single_doc_case(needles[1], corpus, {8000, {1.0}}, 5);
  const double pos_shallow =
      static_cast<double>(shallow.document.find(shallow.gold)) / shallow.document.size();
  const double pos_deep =
      static_cast<double>(deep.document.find(deep.gold)) / deep.document.size();
  CHECK(pos_shallow < 0.1);
  CHECK(pos_deep > 0.9);
}

TEST_CASE("single-doc generator validates its inputs") {
  const Corpus tiny = Corpus::synthetic(3, 50, 80, 1);
  const auto needles = synthetic_single_needles(2, 1);
  CHECK_THROWS_AS(build_single_doc_case(needles[0], tiny, {100000, {0.5}}, 1), CorpusError);

  NeedleSpec two_docs = synthetic_multi_needles(1, 1)[0];
  const Corpus corpus = Corpus::synthetic(40, 200, 400, 1);
  CHECK_THROWS_AS(build_single_doc_case(two_docs, corpus, {2000, {0.5}}, 1),
                  InvalidInputError);
  CHECK_THROWS_AS(build_single_doc_case(needles[0], corpus, {2000, {0.2, 0.8}}, 1),
                  InvalidInputError);
}

TEST_CASE("multi-doc case carries both facts and validates depth order") {
  const Corpus corpus = Corpus::synthetic(80, 200, 400, 6);
  const auto needles = synthetic_multi_needles(4, 6);
  const TestCase c = build_multi_doc_case(needles[0], corpus, {6000, {0.0, 2.0 / 3.0}}, 2);
  CHECK(count_tokens(c.document) == 6000);
  REQUIRE(c.meta.subquestions.size() == 2);
  for (const auto& sq : c.meta.subquestions) {
    REQUIRE(sq.gold_hint.has_value());
    CHECK(c.document.find(*sq.gold_hint) != std::string::npos);
  }
  CHECK(c.meta.compose.kind == ComposeKind::entity_select);

  CHECK_THROWS_AS(build_multi_doc_case(needles[0], corpus, {6000, {0.9, 0.1}}, 2),
                  InvalidInputError);
  CHECK_THROWS_AS(
      build_multi_doc_case(synthetic_single_needles(1, 6)[0], corpus, {6000, {0.1, 0.9}}, 2),
      InvalidInputError);
}

TEST_CASE("passkey cases are exact-length with a single marker") {
  const TestCase c = gen_passkey(5000, 0.25, 77);
  CHECK(count_tokens(c.document) == 5000);
  CHECK(passkey_extract(c.document) == c.gold);
  CHECK(c.document.find("The pass key is") == c.document.rfind("The pass key is"));
  CHECK_THROWS_AS(gen_passkey(50, 0.5, 1), InvalidInputError);
}

TEST_CASE("number cases repeat the marker and keep filler figures distinct") {
  const TestCase c = gen_number(3000, 3, 15);
  CHECK(count_tokens(c.document) == 3000);
  CHECK(number_extract(c.document) == c.gold);
  std::size_t markers = 0;
  const std::string lead = "The hidden number is " + c.gold;
  for (std::size_t pos = c.document.find(lead); pos != std::string::npos;
       pos = c.document.find(lead, pos + 1)) {
    ++markers;
  }
  CHECK(markers == 3);
  CHECK_THROWS_AS(gen_number(3000, 1, 1), InvalidInputError);
  CHECK_THROWS_AS(gen_number(20, 2, 1), InvalidInputError);
}

TEST_CASE("kv cases look up to their own gold value") {
  const TestCase c = gen_kv(100, 42, 7);
  const std::size_t kpos = c.query.find("Key: \"");
  REQUIRE(kpos != std::string::npos);
  const std::size_t kend = c.query.find('"', kpos + 6);
  const std::string key = c.query.substr(kpos + 6, kend - kpos - 6);
  CHECK(kv_lookup(c.document, key) == c.gold);
  CHECK_THROWS_AS(gen_kv(10, 10, 1), InvalidInputError);
  CHECK_THROWS_AS(gen_kv(10, -1, 1), InvalidInputError);
}

TEST_CASE("math cases have unique extremes by construction") {
  for (auto variant : {MathVariant::top1, MathVariant::top2, MathVariant::top3,
                       MathVariant::min}) {
    const TestCase c = gen_math(300, variant, 23);
    const auto nums = integers_in(c.document);
    CHECK(nums.size() == 300);
    std::set<long long> distinct(nums.begin(), nums.end());
    const long long vmax = *distinct.rbegin();
    // The three largest and the minimum occur exactly once each.
    for (long long v : {vmax, vmax - 1, vmax - 2, *distinct.begin()}) {
      CHECK(std::count(nums.begin(), nums.end(), v) == 1);
    }
    for (long long v : nums) {
      CHECK(v >= 1);
      CHECK(v <= 100);
    }
  }
  CHECK_THROWS_AS(gen_math(3, MathVariant::top1, 1), InvalidInputError);
}

TEST_CASE("suite generation is deterministic and sized lengths x depths x samples") {
  const Corpus corpus = Corpus::synthetic(80, 200, 400, 11);
  const auto needles = synthetic_single_needles(8, 11);
  GeneratorConfig config;
  config.lengths = {1000, 3000};
  config.depths = {0.0, 0.5, 1.0};
  config.samples_per_cell = 2;
  config.seed = 5;

  auto run = [&] {
    StreamHash hash;
    std::size_t count = 0;
    generate_niah_single(config, corpus, needles, [&](const TestCase& c) {
      hash.update(to_json_line(c));
      ++count;
    });
    return std::make_pair(hash.value, count);
  };
  const auto [h1, n1] = run();
  const auto [h2, n2] = run();
  CHECK(n1 == 2 * 3 * 2);
  CHECK(n1 == n2);
  CHECK(h1 == h2);

  config.seed = 6;
  const auto [h3, n3] = run();
  CHECK(n3 == n1);
  CHECK(h3 != h1);
}

TEST_CASE("test cases round-trip through JSONL") {
  const Corpus corpus = Corpus::synthetic(60, 200, 400, 2);
  const auto needles = synthetic_multi_needles(2, 2);
  const TestCase c = build_multi_doc_case(needles[1], corpus, {4000, {0.0, 1.0}}, 3);
  const TestCase back = parse_test_case(to_json_line(c));
  CHECK(back.id == c.id);
  CHECK(back.kind == c.kind);
  CHECK(back.document == c.document);
  CHECK(back.gold == c.gold);
  CHECK(back.meta.subquestions.size() == c.meta.subquestions.size());
  CHECK(back.meta.compose.kind == c.meta.compose.kind);
  CHECK(to_json_line(back) == to_json_line(c));

  CHECK_THROWS_AS(parse_test_case("not json"), InvalidInputError);
  CHECK_THROWS_AS(parse_test_case("{\"id\": \"missing-the-rest\"}"), InvalidInputError);
}

TEST_CASE("corpus loading validates shape") {
  CHECK_THROWS_AS(Corpus::load_json_file("/nonexistent/corpus.json"), CorpusError);
  const Corpus corpus = Corpus::synthetic(10, 50, 100, 1);
  CHECK(corpus.docs.size() == 10);
  CHECK(corpus.total_tokens >= 500);
  for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
    CHECK(count_tokens(corpus.docs[i]) == corpus.token_counts[i]);
  }
}

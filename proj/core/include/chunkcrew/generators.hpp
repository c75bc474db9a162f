#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "chunkcrew/corpus.hpp"
#include "chunkcrew/member.hpp"
#include "chunkcrew/testcase.hpp"

namespace crew {

/// One question with the document(s) that answer it, plus optional entity
/// replacements to apply before placement.
struct NeedleSpec {
  std::string question;
  std::string answer;
  std::vector<std::string> needle_docs;  // 1 (single-doc) or 2 (multi-doc)
  std::vector<std::pair<std::string, std::string>> entity_map;  // original -> fictional
  std::vector<Subquestion> subquestions;  // scripted multi-hop plan, may be empty
  ComposeRule compose;
};

struct PlacementPlan {
  std::size_t context_length = 0;  // tokens
  std::vector<double> depths;      // 1 entry single-doc, 2 entries multi-doc
};

struct GeneratorConfig {
  std::vector<std::size_t> lengths;   // defaults: 15 values spanning 1k..128k
  std::vector<double> depths;         // single-doc: 10 values 0..1
  std::size_t samples_per_cell = 10;
  std::uint64_t seed = 0;
  std::vector<std::string> corpus_paths;
};

std::vector<std::size_t> default_lengths();
std::vector<double> default_single_depths();
std::vector<std::pair<double, double>> multi_depth_pairs();  // the 6 combinations

/// Whole-word, case-insensitive replacement of every original by its
/// fictional counterpart, longest original first. The replacement adopts the
/// capitalization shape of the matched occurrence.
std::string apply_entity_replacement(
    const std::string& doc,
    const std::vector<std::pair<std::string, std::string>>& entity_map);

TestCase build_single_doc_case(const NeedleSpec& needle, const Corpus& corpus,
                               const PlacementPlan& plan, std::uint64_t seed);
TestCase build_multi_doc_case(const NeedleSpec& needle, const Corpus& corpus,
                              const PlacementPlan& plan, std::uint64_t seed);

TestCase gen_passkey(std::size_t length, double depth, std::uint64_t seed);
TestCase gen_number(std::size_t length, int occurrences, std::uint64_t seed);
TestCase gen_kv(int num_pairs, int key_index, std::uint64_t seed);
TestCase gen_math(int count, MathVariant variant, std::uint64_t seed);

/// Deterministic needle pools with fictional entities, used when no needle
/// file is supplied.
std::vector<NeedleSpec> synthetic_single_needles(std::size_t n, std::uint64_t seed);
std::vector<NeedleSpec> synthetic_multi_needles(std::size_t n, std::uint64_t seed);

using CaseSink = std::function<void(const TestCase&)>;

/// Emit lengths x depths x samples cases in a fixed order. Every case is
/// checked against its own oracle (gold findable, token count within 2%)
/// before it reaches the sink.
void generate_niah_single(const GeneratorConfig& config, const Corpus& corpus,
                          const std::vector<NeedleSpec>& needles, const CaseSink& sink);
void generate_niah_multi(const GeneratorConfig& config, const Corpus& corpus,
                         const std::vector<NeedleSpec>& needles, const CaseSink& sink);

/// Post-construction sanity check run by the generators; exposed for tests.
void oracle_check(const TestCase& c);

}  // namespace crew

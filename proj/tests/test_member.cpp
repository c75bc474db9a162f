#include "doctest.h"

#include "chunkcrew/errors.hpp"
#include "chunkcrew/member.hpp"

using namespace crew;

TEST_CASE("passkey extraction matches either phrasing") {
  CHECK(passkey_extract("noise. The pass key is 71432. Remember it. more noise") == "71432");
  CHECK(passkey_extract("cut off ... 71432 is the pass key. tail") == "71432");
  CHECK_FALSE(passkey_extract("no key anywhere").has_value());
}

TEST_CASE("hidden number extraction matches either phrasing") {
  CHECK(number_extract("The hidden number is 9034217. Remember it.") == "9034217");
  CHECK(number_extract("9034217 is the hidden number.") == "9034217");
  CHECK_FALSE(number_extract("The ledger records the figure 123.").has_value());
}

TEST_CASE("kv lookup scans quoted pairs line by line") {
  const std::string doc =
      "\"aaa-1\": \"val-1\"\n"
      "\"bbb-2\": \"val-2\"\n"
      "\"ccc-3\": \"val-3\"\n";
  CHECK(kv_lookup(doc, "bbb-2") == "val-2");
  CHECK_FALSE(kv_lookup(doc, "zzz-9").has_value());
  CHECK_THROWS_AS(kv_lookup(doc, ""), InvalidInputError);
}

TEST_CASE("integer scanning handles separators and negatives") {
  const auto nums = integers_in("81 7, -3 and 80.\n12");
  CHECK(nums == std::vector<long long>{81, 7, -3, 80, 12});
}

TEST_CASE("math reports are distinct-value extremes") {
  const std::string chunk = "94 93 93 94 7 81";
  CHECK(math_report(chunk, MathVariant::top1) == std::vector<long long>{94});
  CHECK(math_report(chunk, MathVariant::top2) == std::vector<long long>{94, 93});
  CHECK(math_report(chunk, MathVariant::top3) == std::vector<long long>{94, 93, 81});
  CHECK(math_report(chunk, MathVariant::min) == std::vector<long long>{7});
  CHECK(math_report("no digits", MathVariant::top1).empty());
}

TEST_CASE("math variant is inferred from the instruction text") {
  CHECK(math_variant_from_instruction("find the largest number") == MathVariant::top1);
  CHECK(math_variant_from_instruction("the second-largest number") == MathVariant::top2);
  CHECK(math_variant_from_instruction("largest, second-largest and third-largest") ==
        MathVariant::top3);
  CHECK(math_variant_from_instruction("the smallest number of the list") == MathVariant::min);
}

TEST_CASE("expert names round-trip") {
  for (auto kind : {ExpertKind::qa, ExpertKind::kv, ExpertKind::number, ExpertKind::passkey,
                    ExpertKind::math_find}) {
    CHECK(expert_from_name(expert_name(kind)) == kind);
  }
  CHECK(expert_from_name("ns member") == ExpertKind::number);
  CHECK_FALSE(expert_from_name("Poet member").has_value());
}

TEST_CASE("truthful member answers whenever its chunk holds the answer") {
  HallucinationProfile profile;
  profile.p_reject_correct = 0.0;  // would always fabricate if it could
  profile.fabrication_pool = {"wrong"};
  SimulatedMember m(1, ExpertKind::qa, profile, "the answer is Quellan today");
  Instruction inst{"where?", 0};
  for (int i = 0; i < 20; ++i) {
    const auto r = m.respond(inst, std::string("Quellan"));
    CHECK(r.kind == MemberResponse::answer);
    CHECK(r.content == "Quellan");
  }
}

TEST_CASE("member without the answer rejects or fabricates per profile") {
  Instruction inst{"where?", 0};

  HallucinationProfile honest;
  honest.p_reject_correct = 1.0;
  SimulatedMember m1(1, ExpertKind::qa, honest, "nothing relevant here");
  for (int i = 0; i < 20; ++i) {
    CHECK(m1.respond(inst, std::string("Quellan")).kind == MemberResponse::reject);
  }

  HallucinationProfile liar;
  liar.p_reject_correct = 0.0;
  liar.fabrication_pool = {"Mark Gibson"};
  SimulatedMember m2(1, ExpertKind::qa, liar, "nothing relevant here");
  for (int i = 0; i < 20; ++i) {
    const auto r = m2.respond(inst, std::string("Quellan"));
    CHECK(r.kind == MemberResponse::answer);
    CHECK(r.content == "Mark Gibson");
  }
}

TEST_CASE("empty fabrication pool draws a token from the member's own chunk") {
  HallucinationProfile liar;
  liar.p_reject_correct = 0.0;
  SimulatedMember m(3, ExpertKind::qa, liar, "alpha beta gamma");
  const auto r = m.respond(Instruction{"where?", 0}, std::string("Quellan"));
  CHECK(r.kind == MemberResponse::answer);
  CHECK((r.content == "alpha" || r.content == "beta" || r.content == "gamma"));
}

TEST_CASE("member responses are deterministic per seed and ordinal") {
  HallucinationProfile profile;
  profile.p_reject_correct = 0.5;
  profile.fabrication_pool = {"x", "y", "z"};
  profile.rng_seed = 99;
  Instruction inst{"where?", 0};

  auto run = [&](int ordinal) {
    SimulatedMember m(ordinal, ExpertKind::qa, profile, "no answer present");
    std::string trace;
    for (int i = 0; i < 32; ++i) {
      const auto r = m.respond(inst, std::string("Quellan"));
      trace += r.kind == MemberResponse::reject ? "R" : r.content;
    }
    return trace;
  };
  CHECK(run(1) == run(1));
  CHECK(run(1) != run(2));  // independent per-member streams
}

TEST_CASE("merged evaluation honors post_merge_fidelity") {
  Instruction inst{"where?", 0};
  HallucinationProfile faithful;
  faithful.post_merge_fidelity = 1.0;
  Rng rng1(7);
  const auto r1 = evaluate_merged(ExpertKind::qa, faithful, "contains Quellan here", inst,
                                  std::string("Quellan"), rng1, 1);
  CHECK(r1.kind == MemberResponse::answer);
  CHECK(r1.content == "Quellan");

  HallucinationProfile faithless;
  faithless.post_merge_fidelity = 0.0;
  faithless.fabrication_pool = {"Mark Gibson"};
  Rng rng2(7);
  const auto r2 = evaluate_merged(ExpertKind::qa, faithless, "contains Quellan here", inst,
                                  std::string("Quellan"), rng2, 1);
  CHECK(r2.kind == MemberResponse::answer);
  CHECK(r2.content == "Mark Gibson");
}

TEST_CASE("kv member reads the key out of the instruction") {
  Instruction inst{"Finding the corresponding value from a dictionary and a key.\n"
                   "Key: \"aaa-1\"\nThe value associated with the specified key is: ",
                   0};
  const auto r = extract_answer(ExpertKind::kv, "\"aaa-1\": \"val-1\"\n", inst, std::nullopt);
  CHECK(r == "val-1");
  const auto miss =
      extract_answer(ExpertKind::kv, "\"bbb-2\": \"val-2\"\n", inst, std::nullopt);
  CHECK_FALSE(miss.has_value());
}

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "claimtrace/dataset.hpp"
#include "claimtrace/errors.hpp"
#include "claimtrace/mock_backend.hpp"
#include "test_support.hpp"

using namespace claimtrace;
using namespace claimtrace::testing;

namespace {

GoldInstance tiny(const std::string& id) {
  GoldInstance g;
  g.id = id;
  g.question = "Q?";
  g.response = "Aspirin reduces fever.";
  g.context_sentences = {{{0, "Aspirin reduces fever in adults.", 0, 32}, Origin::Context, 0}};
  g.sentence_claim_groups = {{0, {{"Aspirin reduces fever", {0}, {}}}}};
  return g;
}

std::vector<GoldInstance> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_instances(in);
}

std::vector<std::string> ids(const std::vector<GoldInstance>& v) {
  std::vector<std::string> out;
  for (const auto& g : v) out.push_back(g.id);
  return out;
}

}  // namespace

TEST(LoadInstances, NasalPassagesFixture) {
  const auto instances = load_instances(fixture("nasal_passages.jsonl"));
  ASSERT_EQ(instances.size(), 1u);
  const auto& g = instances[0];
  ASSERT_EQ(g.sentence_claim_groups.size(), 1u);
  const auto& claims = g.sentence_claim_groups[0].claims;
  ASSERT_EQ(claims.size(), 2u);
  EXPECT_EQ(claims[0].support_indices, (std::set<std::size_t>{0}));
  EXPECT_EQ(claims[0].contradict_indices, (std::set<std::size_t>{2}));
  EXPECT_EQ(claims[1].support_indices, (std::set<std::size_t>{1}));
  EXPECT_EQ(claims[1].contradict_indices, (std::set<std::size_t>{3}));
  EXPECT_EQ(g.context_sentences.size(), 4u);
  EXPECT_EQ(g.context_sentences[2].origin, Origin::Augmented);
}

TEST(LoadInstances, SyntheticFixtureHasAtLeastTenInstances) {
  const auto instances = load_instances(fixture("synthetic.jsonl"));
  EXPECT_GE(instances.size(), 10u);
}

TEST(LoadInstances, EmptyInputGivesEmptyList) {
  EXPECT_TRUE(parse("").empty());
  EXPECT_TRUE(parse("\n  \n").empty());
}

TEST(LoadInstances, MissingFileThrows) {
  EXPECT_THROW(load_instances("/nonexistent/instances.jsonl"), std::runtime_error);
}

TEST(LoadInstances, CitationOutsideContextIsAValidationError) {
  auto g = tiny("bad-cite");
  g.sentence_claim_groups[0].claims[0].support_indices = {99};
  try {
    parse(serialize_instance(g) + "\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.instance_id(), "bad-cite");
  }
}

TEST(LoadInstances, SentenceIndexOutsideResponseIsAValidationError) {
  auto g = tiny("bad-sentence");
  g.sentence_claim_groups[0].sentence_index = 3;
  EXPECT_THROW(parse(serialize_instance(g)), ValidationError);
}

TEST(LoadInstances, DuplicateContextIndexIsAValidationError) {
  auto g = tiny("dup");
  g.context_sentences.push_back(g.context_sentences[0]);
  EXPECT_THROW(validate(g), ValidationError);
}

TEST(LoadInstances, ParseErrorsCarryTheLineNumber) {
  const std::string good = serialize_instance(tiny("a"));
  try {
    parse(good + "\n\n{not json\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    parse(good + "\n{\"id\": \"x\"}\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse(R"({"id":"x","question":"","response":"A.","context_sentences":[],)"
                     R"("sentence_claim_groups":[],"source_corpus":"Elsewhere"})"),
               ParseError);
}

TEST(SaveInstances, RoundTripIsIdentity) {
  for (const char* name : {"nasal_passages.jsonl", "nasal_passages_pre.jsonl", "synthetic.jsonl"}) {
    const auto instances = load_instances(fixture(name));
    const auto path = std::filesystem::temp_directory_path() / ("claimtrace_roundtrip_" + std::string(name));
    save_instances(path, instances);
    EXPECT_EQ(load_instances(path), instances) << name;
    std::ostringstream a, b;
    write_instances(a, instances);
    write_instances(b, load_instances(path));
    EXPECT_EQ(a.str(), b.str());
    std::filesystem::remove(path);
  }
}

TEST(Lcg64, ReferenceSequence) {
  // state' = a * state + c (mod 2^64); draw = state' >> 33.
  Lcg64 rng(42);
  const std::uint64_t s1 = 6364136223846793005ull * 42ull + 1442695040888963407ull;
  const std::uint64_t s2 = 6364136223846793005ull * s1 + 1442695040888963407ull;
  EXPECT_EQ(rng.next(), s1 >> 33);
  EXPECT_EQ(rng.next(), s2 >> 33);
}

TEST(SplitTrainEval, TenInstancesThreeToSeven) {
  std::vector<GoldInstance> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(tiny("i" + std::to_string(i)));
  const auto [train, eval] = split_train_eval(ten, 42, 0.3);
  EXPECT_EQ(train.size(), 3u);
  EXPECT_EQ(eval.size(), 7u);
  const auto [train2, eval2] = split_train_eval(ten, 42, 0.3);
  EXPECT_EQ(ids(train), ids(train2));
  EXPECT_EQ(ids(eval), ids(eval2));

  std::vector<std::string> all = ids(train);
  const auto rest = ids(eval);
  all.insert(all.end(), rest.begin(), rest.end());
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, ids(ten));
}

TEST(SplitTrainEval, SeedFortyTwoMembershipIsFrozen) {
  // Hand-run Fisher-Yates with the reference generator.
  std::vector<GoldInstance> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(tiny("i" + std::to_string(i)));
  std::vector<std::string> order = ids(ten);
  std::uint64_t state = 42;
  for (std::size_t i = order.size() - 1; i >= 1; --i) {
    state = 6364136223846793005ull * state + 1442695040888963407ull;
    std::swap(order[i], order[(state >> 33) % (i + 1)]);
  }
  const auto [train, eval] = split_train_eval(ten, 42, 0.3);
  EXPECT_EQ(ids(train), std::vector<std::string>(order.begin(), order.begin() + 3));
  EXPECT_EQ(ids(eval), std::vector<std::string>(order.begin() + 3, order.end()));
}

TEST(SplitTrainEval, RoundingEdgeCases) {
  const auto [train, eval] = split_train_eval({tiny("only")}, 42, 0.3);
  EXPECT_TRUE(train.empty());
  EXPECT_EQ(eval.size(), 1u);
  const auto [t0, e0] = split_train_eval({}, 42, 0.3);
  EXPECT_TRUE(t0.empty());
  EXPECT_TRUE(e0.empty());
  EXPECT_THROW(split_train_eval({}, 42, 0.0), std::invalid_argument);
  EXPECT_THROW(split_train_eval({}, 42, 1.0), std::invalid_argument);
}

TEST(SplitTrainEval, PermutedInputKeepsSizesButMayMoveMembers) {
  std::vector<GoldInstance> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(tiny("i" + std::to_string(i)));
  std::vector<GoldInstance> reversed(ten.rbegin(), ten.rend());
  const auto [a_train, a_eval] = split_train_eval(ten, 42, 0.3);
  const auto [b_train, b_eval] = split_train_eval(reversed, 42, 0.3);
  EXPECT_EQ(a_train.size(), b_train.size());
  EXPECT_EQ(a_eval.size(), b_eval.size());
}

TEST(AugmentContradictory, NasalPassagesPreAugmentation) {
  const auto pre = load_instances(fixture("nasal_passages_pre.jsonl")).at(0);
  const MockBackend mock;
  const auto result = augment_contradictory(pre, mock, mock, 3);
  EXPECT_EQ(result.added, 2u);
  EXPECT_TRUE(result.failed_claims.empty());
  const auto& ctx = result.instance.context_sentences;
  ASSERT_EQ(ctx.size(), 4u);
  EXPECT_EQ(ctx[2].index(), 2u);
  EXPECT_EQ(ctx[3].index(), 3u);
  EXPECT_EQ(ctx[2].origin, Origin::Augmented);
  EXPECT_EQ(ctx[3].origin, Origin::Augmented);
  const auto& claims = result.instance.sentence_claim_groups[0].claims;
  EXPECT_EQ(claims[0].support_indices, (std::set<std::size_t>{0}));
  EXPECT_EQ(claims[0].contradict_indices, (std::set<std::size_t>{2}));
  EXPECT_EQ(claims[1].support_indices, (std::set<std::size_t>{1}));
  EXPECT_EQ(claims[1].contradict_indices, (std::set<std::size_t>{3}));
  EXPECT_EQ(mock.judge(ctx[2].text(), claims[0].text), EntailmentLabel::Contradiction);
  EXPECT_EQ(mock.judge(ctx[3].text(), claims[1].text), EntailmentLabel::Contradiction);
  EXPECT_NO_THROW(validate(result.instance));
}

TEST(AugmentContradictory, PreservesExistingContextAndCitations) {
  for (const auto& pre : load_instances(fixture("synthetic_pre.jsonl"))) {
    const MockBackend mock;
    const auto result = augment_contradictory(pre, mock, mock, 3, OnAugmentationFailure::Skip);
    std::size_t claims = 0;
    for (const auto& g : pre.sentence_claim_groups) claims += g.claims.size();
    EXPECT_EQ(result.added + result.failed_claims.size(), claims);
    EXPECT_EQ(result.instance.context_sentences.size(), pre.context_sentences.size() + result.added);
    for (std::size_t i = 0; i < pre.context_sentences.size(); ++i) {
      EXPECT_EQ(result.instance.context_sentences[i], pre.context_sentences[i]);
    }
    for (std::size_t g = 0; g < pre.sentence_claim_groups.size(); ++g) {
      for (std::size_t c = 0; c < pre.sentence_claim_groups[g].claims.size(); ++c) {
        const auto& before = pre.sentence_claim_groups[g].claims[c];
        const auto& after = result.instance.sentence_claim_groups[g].claims[c];
        EXPECT_EQ(after.support_indices, before.support_indices);
        EXPECT_TRUE(std::includes(after.contradict_indices.begin(), after.contradict_indices.end(),
                                  before.contradict_indices.begin(),
                                  before.contradict_indices.end()));
      }
    }
  }
}

TEST(AugmentContradictory, GivesUpAfterRetries) {
  const auto pre = tiny("stubborn");
  const ConstantNegator negator("Something unrelated.");
  const MockBackend mock;
  try {
    augment_contradictory(pre, negator, mock, 2);
    FAIL() << "expected AugmentationFailed";
  } catch (const AugmentationFailed& e) {
    EXPECT_EQ(e.claim(), "Aspirin reduces fever");
  }
  EXPECT_EQ(negator.calls, 3u);  // one attempt plus two retries
}

TEST(AugmentContradictory, SkipModeRecordsFailures) {
  const auto pre = tiny("stubborn");
  const ConstantNegator negator("Something unrelated.");
  const MockBackend mock;
  const auto result = augment_contradictory(pre, negator, mock, 1, OnAugmentationFailure::Skip);
  EXPECT_EQ(result.added, 0u);
  EXPECT_EQ(result.failed_claims, (std::vector<std::string>{"Aspirin reduces fever"}));
  EXPECT_EQ(result.instance, pre);
}

TEST(AugmentContradictory, TrivialNegationSucceedsFirstTry) {
  const auto pre = tiny("easy");
  const MockBackend mock;
  const auto result = augment_contradictory(pre, mock, mock, 0);
  EXPECT_EQ(result.added, 1u);
  EXPECT_EQ(result.instance.context_sentences.back().text(), "Aspirin does not reduce fever");
}

TEST(SourceCorpus, RoundTripsThroughText) {
  for (auto c : {SourceCorpus::PubMedQA, SourceCorpus::BioASQ, SourceCorpus::TracSum,
                 SourceCorpus::Synthetic}) {
    EXPECT_EQ(parse_source_corpus(to_string(c)), c);
  }
  EXPECT_THROW(parse_source_corpus("pubmedqa"), std::invalid_argument);
}

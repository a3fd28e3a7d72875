#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "claimtrace/errors.hpp"
#include "claimtrace/grounding.hpp"
#include "claimtrace/metrics.hpp"
#include "claimtrace/mock_backend.hpp"
#include "test_support.hpp"

using namespace claimtrace;
using namespace claimtrace::testing;

namespace {

const std::string kResponse =
    "Keeping nasal passages clear and exercising regularly is good for sleep.";

std::vector<ContextSentence> nasal_context() {
  const std::vector<std::string> docs{
      "Clear nasal passages are good for sleep. Regular exercise helps you sleep better."};
  const std::vector<std::string> augmented{"Clear nasal passages are not good for sleep.",
                                           "Regular exercise does not help you sleep better."};
  return index_context(docs, augmented);
}

std::vector<Claim> claims_of(const std::vector<std::string>& texts) {
  std::vector<Claim> out;
  for (const auto& t : texts) out.push_back({t, 0, true, 1});
  return out;
}

/// Embedder that records how often and with how many texts it was called.
class RecordingEmbedder final : public Embedder {
public:
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override {
    batches.push_back(texts.size());
    return mock.embed(texts);
  }
  MockBackend mock;
  mutable std::vector<std::size_t> batches;
};

/// Decomposer that fails with a malformed reply a fixed number of times.
class FlakyDecomposer final : public Decomposer {
public:
  explicit FlakyDecomposer(std::size_t failures) : failures_(failures) {}
  std::vector<std::string> decompose(std::string_view sentence,
                                     const DecompositionContext&) const override {
    if (calls++ < failures_) throw MalformedReply("not a list", "garbage");
    return {std::string(sentence)};
  }
  mutable std::size_t calls = 0;

private:
  std::size_t failures_;
};

GroundingConfig mock_config(double tau = 0.5) {
  GroundingConfig config;
  config.backends = make_mock_backends();
  config.tau = tau;
  return config;
}

/// Raw cosine matrix for random claims against random context, built with the
/// mock embedder so that scores come from a realistic spread.
struct RandomCase {
  std::vector<Claim> claims;
  std::vector<ContextSentence> context;
  Matrix raw;
};

RandomCase random_case(std::mt19937_64& rng) {
  static const std::vector<std::string> kWords{"aspirin", "fever",  "sleep", "exercise",
                                               "statins", "stroke", "risk",  "good",
                                               "reduces", "lowers", "blood", "pressure"};
  std::uniform_int_distribution<std::size_t> word(0, kWords.size() - 1);
  std::uniform_int_distribution<std::size_t> len(1, 4);
  std::bernoulli_distribution negate(0.3);
  auto sentence = [&] {
    std::string s;
    const std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == 1 && negate(rng)) s += " not";
      s += (s.empty() ? "" : " ") + kWords[word(rng)];
    }
    return s;
  };
  RandomCase rc;
  std::vector<std::string> claim_texts(1 + rng() % 4);
  for (auto& t : claim_texts) t = sentence();
  std::vector<std::string> docs(1 + rng() % 6);
  for (auto& d : docs) d = sentence();
  rc.claims = claims_of(claim_texts);
  for (std::size_t j = 0; j < docs.size(); ++j) {
    rc.context.push_back({{j, docs[j], 0, docs[j].size()}, Origin::Context, j});
  }
  const MockBackend mock;
  rc.raw = score_matrix(mock.embed(claim_texts), mock.embed(docs));
  return rc;
}

}  // namespace

TEST(SignOf, ThreeCaseTable) {
  EXPECT_EQ(sign_of(EntailmentLabel::Entailment), 1);
  EXPECT_EQ(sign_of(EntailmentLabel::Contradiction), -1);
  EXPECT_EQ(sign_of(EntailmentLabel::Neutral), 0);
}

TEST(VerifyDecomposition, NasalPassagesSentenceYieldsTwoVerifiedClaims) {
  const MockBackend mock;
  const auto claims = verify_decomposition(kResponse, 0, mock, mock, 3);
  ASSERT_EQ(claims.size(), 2u);
  EXPECT_EQ(claims[0].text, "Keeping nasal passages clear is good for sleep.");
  EXPECT_EQ(claims[1].text, "Exercising regularly is good for sleep.");
  for (const auto& c : claims) {
    EXPECT_TRUE(c.verified);
    EXPECT_EQ(c.attempts_used, 1u);
    EXPECT_EQ(c.parent_sentence_index, 0u);
  }
}

TEST(VerifyDecomposition, AtomicSentenceIsItsOwnClaim) {
  const MockBackend mock;
  const auto claims = verify_decomposition("Aspirin reduces fever.", 4, mock, mock, 3);
  ASSERT_EQ(claims.size(), 1u);
  EXPECT_EQ(claims[0].text, "Aspirin reduces fever.");
  EXPECT_TRUE(claims[0].verified);
  EXPECT_EQ(claims[0].parent_sentence_index, 4u);
}

TEST(VerifyDecomposition, UnrelatedClaimIsFlaggedAfterExhaustion) {
  const MockBackend mock;
  const ScriptedDecomposer adversary({{"The moon is made of cheese."}});
  const auto claims = verify_decomposition("Aspirin reduces fever.", 0, adversary, mock, 2);
  ASSERT_EQ(claims.size(), 1u);
  EXPECT_EQ(claims[0].text, "The moon is made of cheese.");
  EXPECT_FALSE(claims[0].verified);
  EXPECT_EQ(claims[0].attempts_used, 2u);
  EXPECT_EQ(adversary.calls, 2u);
}

TEST(VerifyDecomposition, WholeSentenceIsRedecomposedUntilAllClaimsPass) {
  const MockBackend mock;
  const ScriptedDecomposer scripted({{"Aspirin reduces fever.", "Aspirin cures cancer."},
                                     {"Aspirin reduces fever."}});
  const auto claims = verify_decomposition("Aspirin reduces fever.", 0, scripted, mock, 3);
  ASSERT_EQ(claims.size(), 1u);
  EXPECT_TRUE(claims[0].verified);
  EXPECT_EQ(claims[0].attempts_used, 2u);
  EXPECT_EQ(scripted.calls, 2u);
}

TEST(VerifyDecomposition, MalformedReplyConsumesAnAttempt) {
  const MockBackend mock;
  const FlakyDecomposer once(1);
  const auto claims = verify_decomposition("Aspirin reduces fever.", 0, once, mock, 3);
  ASSERT_EQ(claims.size(), 1u);
  EXPECT_EQ(claims[0].attempts_used, 2u);

  const FlakyDecomposer always(10);
  EXPECT_THROW(verify_decomposition("Aspirin reduces fever.", 0, always, mock, 3), MalformedReply);
  EXPECT_EQ(always.calls, 3u);
}

TEST(VerifyDecomposition, ZeroAttemptsIsRejected) {
  const MockBackend mock;
  EXPECT_THROW(verify_decomposition("A.", 0, mock, mock, 0), std::invalid_argument);
}

TEST(ScoreMatrix, MatchesNaiveDoubleLoop) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 1 + rng() % 6;
    const std::size_t m = 1 + rng() % 8;
    const std::size_t d = 1 + rng() % 32;
    std::vector<EmbeddingVector> e;
    std::vector<EmbeddingVector> v;
    for (std::size_t i = 0; i < p; ++i) e.push_back(random_unit(rng, d));
    for (std::size_t j = 0; j < m; ++j) v.push_back(random_unit(rng, d));
    const Matrix got = score_matrix(e, v);
    ASSERT_EQ(got.rows(), p);
    ASSERT_EQ(got.cols(), m);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        double naive = 0.0;
        for (std::size_t k = 0; k < d; ++k) naive += e[i][k] * v[j][k];
        EXPECT_LT(std::fabs(got(i, j) - naive), 1e-12);
        EXPECT_LE(std::fabs(got(i, j)), 1.0 + 1e-12);
      }
    }
  }
}

TEST(ScoreMatrix, DimensionMismatchAndEmptyInputs) {
  const std::vector<EmbeddingVector> a{EmbeddingVector(std::vector<double>{1.0, 0.0})};
  const std::vector<EmbeddingVector> b{EmbeddingVector(std::vector<double>{1.0, 0.0, 0.0})};
  EXPECT_THROW(score_matrix(a, b), DimensionMismatch);
  const Matrix no_context = score_matrix(a, {});
  EXPECT_EQ(no_context.rows(), 1u);
  EXPECT_EQ(no_context.cols(), 0u);
}

TEST(ThresholdAndSign, NasalPassagesMatrix) {
  const auto context = nasal_context();
  const MockBackend mock;
  const auto claims = claims_of({"Keeping nasal passages clear is good for sleep",
                                 "Exercising regularly is good for sleep"});
  std::vector<std::string> claim_texts{claims[0].text, claims[1].text};
  std::vector<std::string> ctx_texts;
  for (const auto& c : context) ctx_texts.push_back(c.text());
  const Matrix raw = score_matrix(mock.embed(claim_texts), mock.embed(ctx_texts));
  const auto signed_m = threshold_and_sign(raw, 0.5, mock, claims, context);

  const double c1_score = 5.0 / (2.0 * std::sqrt(7.0));
  EXPECT_NEAR(signed_m(0, 0), 1.0, 1e-12);
  EXPECT_EQ(signed_m(0, 1), 0.0);  // above tau, but Neutral
  EXPECT_NEAR(signed_m(0, 2), -1.0, 1e-12);
  EXPECT_EQ(signed_m(0, 3), 0.0);
  EXPECT_EQ(signed_m(1, 0), 0.0);
  EXPECT_NEAR(signed_m(1, 1), c1_score, 1e-12);
  EXPECT_EQ(signed_m(1, 2), 0.0);
  EXPECT_NEAR(signed_m(1, 3), -c1_score, 1e-12);
}

TEST(ThresholdAndSign, JudgeCalledExactlyAboveThreshold) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const RandomCase rc = random_case(rng);
    for (double tau : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const CountingJudge judge;
      const auto m = threshold_and_sign(rc.raw, tau, judge, rc.claims, rc.context);
      std::size_t above = 0;
      for (double x : rc.raw.data()) above += x > tau ? 1 : 0;
      EXPECT_EQ(judge.calls.load(), above);
      EXPECT_EQ(m.judged_pairs, above);
      for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
          const double expected =
              rc.raw(i, j) > tau
                  ? rc.raw(i, j) * sign_of(judge.mock.judge(rc.context[j].text(), rc.claims[i].text))
                  : 0.0;
          EXPECT_EQ(m(i, j), expected);
        }
      }
    }
  }
}

TEST(ThresholdAndSign, ThresholdIsStrict) {
  Matrix raw(1, 2);
  raw(0, 0) = 0.5;
  raw(0, 1) = std::nextafter(0.5, 1.0);
  const ConstantJudge judge(EntailmentLabel::Entailment);
  const auto claims = claims_of({"c"});
  const std::vector<ContextSentence> context{{{0, "a", 0, 1}, Origin::Context, 0},
                                             {{1, "b", 0, 1}, Origin::Context, 0}};
  const auto m = threshold_and_sign(raw, 0.5, judge, claims, context);
  EXPECT_EQ(m(0, 0), 0.0);
  EXPECT_EQ(m(0, 1), raw(0, 1));
  EXPECT_EQ(m.judged_pairs, 1u);
}

TEST(ThresholdAndSign, TauOutsideUnitIntervalIsRejected) {
  const Matrix raw(1, 1, 0.7);
  const ConstantJudge judge(EntailmentLabel::Entailment);
  const auto claims = claims_of({"c"});
  const std::vector<ContextSentence> context{{{0, "a", 0, 1}, Origin::Context, 0}};
  EXPECT_THROW(threshold_and_sign(raw, -0.1, judge, claims, context), std::invalid_argument);
  EXPECT_THROW(threshold_and_sign(raw, 1.5, judge, claims, context), std::invalid_argument);
}

TEST(ThresholdAndSign, NonzeroEntriesAreNestedAcrossTaus) {
  std::mt19937_64 rng(13);
  const MockBackend mock;
  const std::vector<double> taus{0.0, 0.25, 0.5, 0.75, 1.0};
  for (int trial = 0; trial < 200; ++trial) {
    const RandomCase rc = random_case(rng);
    std::set<std::pair<std::size_t, std::size_t>> previous;
    std::size_t previous_calls = SIZE_MAX;
    for (std::size_t t = 0; t < taus.size(); ++t) {
      const auto m = threshold_and_sign(rc.raw, taus[t], mock, rc.claims, rc.context);
      std::set<std::pair<std::size_t, std::size_t>> nonzero;
      for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
          if (m(i, j) != 0.0) nonzero.insert({i, j});
        }
      }
      if (t > 0) {
        EXPECT_TRUE(std::includes(previous.begin(), previous.end(), nonzero.begin(), nonzero.end()));
      }
      EXPECT_LE(m.judged_pairs, previous_calls);
      previous = std::move(nonzero);
      previous_calls = m.judged_pairs;
    }
    EXPECT_TRUE(previous.empty());  // tau = 1 excludes everything
  }
}

TEST(ThresholdAndSign, ParallelEqualsSequential) {
  std::mt19937_64 rng(17);
  const MockBackend mock;
  for (int trial = 0; trial < 50; ++trial) {
    const RandomCase rc = random_case(rng);
    EXPECT_EQ(threshold_and_sign(rc.raw, 0.25, mock, rc.claims, rc.context, 1),
              threshold_and_sign(rc.raw, 0.25, mock, rc.claims, rc.context, 4));
  }
}

TEST(ThresholdAndSign, ColumnPermutationPermutesColumns) {
  std::mt19937_64 rng(19);
  const MockBackend mock;
  for (int trial = 0; trial < 50; ++trial) {
    const RandomCase rc = random_case(rng);
    std::vector<std::size_t> perm(rc.context.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<ContextSentence> permuted_context;
    Matrix permuted_raw(rc.raw.rows(), rc.raw.cols());
    for (std::size_t j = 0; j < perm.size(); ++j) {
      permuted_context.push_back(rc.context[perm[j]]);
      for (std::size_t i = 0; i < rc.raw.rows(); ++i) permuted_raw(i, j) = rc.raw(i, perm[j]);
    }
    const auto base = threshold_and_sign(rc.raw, 0.25, mock, rc.claims, rc.context);
    const auto moved = threshold_and_sign(permuted_raw, 0.25, mock, rc.claims, permuted_context);
    for (std::size_t i = 0; i < base.rows(); ++i) {
      for (std::size_t j = 0; j < perm.size(); ++j) EXPECT_EQ(moved(i, j), base(i, perm[j]));
    }
  }
}

TEST(Aggregate, UnionOfClaimRowsMappedToContextIndices) {
  SignedScoreMatrix m;
  m.entries = Matrix(2, 3);
  m.entries(0, 0) = 0.8;
  m.entries(0, 2) = -0.7;
  m.entries(1, 2) = 0.9;
  const std::vector<ContextSentence> context{{{4, "a", 0, 1}, Origin::Context, 0},
                                             {{7, "b", 0, 1}, Origin::Context, 0},
                                             {{9, "c", 0, 1}, Origin::Augmented, 1}};
  const auto g = aggregate({0, "s", 0, 1}, claims_of({"x", "y"}), m, context);
  EXPECT_EQ(g.supports, (std::vector<std::size_t>{4, 9}));
  EXPECT_EQ(g.contradicts, (std::vector<std::size_t>{9}));

  const auto by_column = aggregate({0, "s", 0, 1}, claims_of({"x", "y"}), m);
  EXPECT_EQ(by_column.supports, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(by_column.contradicts, (std::vector<std::size_t>{2}));
}

TEST(GroundResponse, NasalPassagesEndToEnd) {
  const auto context = nasal_context();
  const auto result = ground_response(kResponse, context, mock_config());
  ASSERT_EQ(result.size(), 1u);
  const auto& s = result[0];
  ASSERT_EQ(s.claims.size(), 2u);
  EXPECT_EQ(s.supports, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(s.contradicts, (std::vector<std::size_t>{2, 3}));
  EXPECT_GT(s.matrix(0, 0), 0.0);
  EXPECT_LT(s.matrix(0, 2), 0.0);
  EXPECT_GT(s.matrix(1, 1), 0.0);
  EXPECT_LT(s.matrix(1, 3), 0.0);
  EXPECT_EQ(faithfulness_rates(result).acr, 1.0);
}

TEST(GroundResponse, ContextIsEmbeddedOnceInOneBatch) {
  auto config = mock_config();
  auto embedder = std::make_shared<RecordingEmbedder>();
  config.backends.embedder = embedder;
  const auto context = nasal_context();
  ground_response(kResponse + " Aspirin reduces fever.", context, config);
  ASSERT_FALSE(embedder->batches.empty());
  EXPECT_EQ(embedder->batches.front(), context.size());
  EXPECT_EQ(std::count(embedder->batches.begin(), embedder->batches.end(), context.size()), 1);
}

TEST(GroundResponse, EmptyResponseIsAnError) {
  EXPECT_THROW(ground_response("   ", nasal_context(), mock_config()), EmptyResponse);
}

TEST(GroundResponse, EmptyContextLeavesEveryClaimUnverified) {
  const auto result = ground_response(kResponse, {}, mock_config());
  const auto rates = faithfulness_rates(result);
  EXPECT_EQ(rates.ucr, 1.0);
  EXPECT_TRUE(result[0].supports.empty());
  EXPECT_TRUE(result[0].contradicts.empty());
}

TEST(GroundResponse, UnverifiedClaimsAreFlaggedOrExcluded) {
  auto config = mock_config();
  config.backends.decomposer =
      std::make_shared<ScriptedDecomposer>(std::vector<std::vector<std::string>>{{"Unrelated."}});
  config.max_attempts = 2;
  const auto flagged = ground_response("Aspirin reduces fever.", {}, config);
  ASSERT_EQ(flagged[0].claims.size(), 1u);
  EXPECT_FALSE(flagged[0].claims[0].verified);

  config.backends.decomposer =
      std::make_shared<ScriptedDecomposer>(std::vector<std::vector<std::string>>{{"Unrelated."}});
  config.exclude_unverified = true;
  const auto excluded = ground_response("Aspirin reduces fever.", {}, config);
  EXPECT_TRUE(excluded[0].claims.empty());
  EXPECT_EQ(excluded[0].matrix.rows(), 0u);
}

TEST(GroundResponse, ParallelismDoesNotChangeTheResult) {
  const auto context = nasal_context();
  auto parallel = mock_config();
  parallel.parallelism = 4;
  const std::string response = kResponse + " Regular exercise helps you sleep better. Aspirin reduces fever.";
  EXPECT_EQ(ground_response(response, context, mock_config()),
            ground_response(response, context, parallel));
}

TEST(GroundResponse, MissingBackendIsAConfigError) {
  GroundingConfig config;
  EXPECT_THROW(ground_response(kResponse, {}, config), ConfigError);
}

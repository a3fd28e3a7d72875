#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "claimtrace/backends.hpp"
#include "claimtrace/grounding.hpp"

namespace claimtrace {

/// Per-claim evidence pattern. Every claim falls in exactly one class.
enum class ClaimClass { Faithful, Ambiguous, Hallucinated, Unverified };

/// Classification of one row of an already-thresholded signed matrix.
ClaimClass classify_row(std::span<const double> row) noexcept;

struct FaithfulnessRates {
  double fcr = 0.0;
  double acr = 0.0;
  double hcr = 0.0;
  double ucr = 0.0;
  std::size_t claim_count = 0;

  std::size_t faithful = 0;
  std::size_t ambiguous = 0;
  std::size_t hallucinated = 0;
  std::size_t unverified = 0;

  /// fcr + acr + hcr + ucr, correctly rounded (no intermediate rounding).
  double rate_sum() const noexcept;
};

/// Rates over the rows of one matrix. Throws EmptyMatrix when it has no rows.
FaithfulnessRates faithfulness_rates(const SignedScoreMatrix& matrix);

/// Rates over all claim rows of a grounded response. Throws EmptyMatrix when
/// no sentence has any claim.
FaithfulnessRates faithfulness_rates(std::span<const SentenceGrounding> response);

/// Builds rates from raw class counts.
FaithfulnessRates rates_from_counts(std::size_t faithful, std::size_t ambiguous,
                                    std::size_t hallucinated, std::size_t unverified);

struct SentenceClaims {
  std::string sentence;
  std::vector<std::string> claims;
};

/// Fraction of claims entailed by their own sentence.
double cer(std::span<const SentenceClaims> response, const EntailmentJudge& judge);

/// Mean cosine between the claim and each evidence sentence. Throws NoEvidence.
double ecss(const std::string& claim, std::span<const std::string> evidence,
            const Embedder& embedder);

struct ScoredEvidence {
  std::string sentence;
  /// Signed score of this sentence for the un-negated claim.
  double score = 0.0;
};

/// Polarity-flip consistency of one claim: the claim is negated once, every
/// evidence sentence is re-judged against the negation with the same
/// magnitude, and a sentence counts as consistent when
/// |score(c) + score(not c)| <= epsilon. With epsilon == 0 the test is done
/// on signs only. Throws NoEvidence.
double pfcr(const std::string& claim, std::span<const ScoredEvidence> evidence,
            const Negator& negator, const EntailmentJudge& judge, double epsilon);

struct PrfScores {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;

  bool operator==(const PrfScores&) const = default;
};

/// Set precision/recall/F1. Both sets empty scores (1, 1, 1); otherwise an
/// undefined ratio counts as 0.
PrfScores citation_prf(const std::set<std::size_t>& predicted, const std::set<std::size_t>& gold);

/// Component-wise mean. An empty input yields (0, 0, 0).
PrfScores mean_prf(std::span<const PrfScores> scores);

/// Claim precision (share of predicted claims entailed by the gold set) and
/// recall (share of gold claims entailed by the predicted set). A set acts as
/// premise by joining its claims with "; ".
std::pair<double, double> claim_precision_recall(std::span<const std::string> predicted,
                                                 std::span<const std::string> gold,
                                                 const EntailmentJudge& judge);

/// Which selected evidence enters ECSS: both polarities, or supporters only.
enum class EvidencePolarity { Both, SupportsOnly };

/// Response-level reference-free scores. Means are over claims that have at
/// least one selected evidence sentence; `scored_claims` is that count and
/// the optionals are empty when it is zero.
struct GroundingQuality {
  double cer = 0.0;
  std::optional<double> ecss;
  std::optional<double> pfcr;
  std::size_t claim_count = 0;
  std::size_t scored_claims = 0;
  std::size_t unverified_decompositions = 0;
};

struct QualityOptions {
  double epsilon = 0.0;
  EvidencePolarity ecss_polarity = EvidencePolarity::Both;
};

GroundingQuality grounding_quality(std::span<const SentenceGrounding> response,
                                   std::span<const ContextSentence> context,
                                   const Backends& backends, const QualityOptions& options = {});

}  // namespace claimtrace

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <optional>
#include <string_view>
#include <vector>

#include "claimtrace/backends.hpp"
#include "claimtrace/segmentation.hpp"

namespace claimtrace {

struct Claim {
  std::string text;
  std::size_t parent_sentence_index = 0;
  /// Entailed by its parent sentence under the configured judge.
  bool verified = false;
  std::size_t attempts_used = 0;

  bool operator==(const Claim&) const = default;
};

/// Dense row-major matrix of doubles.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Claims x context sentences. An entry is the raw cosine times the entailment
/// sign when the cosine is strictly above `tau`, and 0 otherwise.
struct SignedScoreMatrix {
  Matrix entries;
  double tau = 0.5;
  /// Number of (claim, sentence) pairs that were sent to the judge.
  std::size_t judged_pairs = 0;

  std::size_t rows() const noexcept { return entries.rows(); }
  std::size_t cols() const noexcept { return entries.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }

  bool operator==(const SignedScoreMatrix&) const = default;
};

struct SentenceGrounding {
  SentenceSpan sentence;
  std::vector<Claim> claims;
  SignedScoreMatrix matrix;
  /// Context indices with a positive entry in some claim row (sorted, unique).
  std::vector<std::size_t> supports;
  /// Context indices with a negative entry in some claim row (sorted, unique).
  std::vector<std::size_t> contradicts;

  bool operator==(const SentenceGrounding&) const = default;
};

/// Entailment -> +1, Contradiction -> -1, Neutral -> 0.
int sign_of(EntailmentLabel label) noexcept;

/// Decomposes `sentence` and checks each claim against it, re-running the
/// whole decomposition while some claim is not entailed, up to
/// `max_attempts` calls in total. After the last attempt, non-entailed claims
/// are returned with verified=false. A MalformedReply from the decomposer
/// consumes an attempt; on the final attempt it propagates.
std::vector<Claim> verify_decomposition(std::string_view sentence, std::size_t sentence_index,
                                        const Decomposer& decomposer,
                                        const EntailmentJudge& judge, std::size_t max_attempts,
                                        const DecompositionContext& context = {});

/// M = E V^T. Rows follow `claims`, columns follow `context`.
Matrix score_matrix(std::span<const EmbeddingVector> claims,
                    std::span<const EmbeddingVector> context);

/// Keeps M_ij only when M_ij > tau and multiplies it by the sign of
/// judge(context_j, claim_i). The judge is called for exactly the entries
/// above the threshold. `parallelism` > 1 spreads those calls over threads;
/// the result does not depend on it.
SignedScoreMatrix threshold_and_sign(const Matrix& raw, double tau, const EntailmentJudge& judge,
                                     std::span<const Claim> claims,
                                     std::span<const ContextSentence> context,
                                     std::size_t parallelism = 1);

/// Citation sets are the union over claim rows. Column j is reported as
/// context[j].index() when `context` is given, otherwise as j.
SentenceGrounding aggregate(const SentenceSpan& sentence, std::vector<Claim> claims,
                            SignedScoreMatrix matrix,
                            std::span<const ContextSentence> context = {});

struct GroundingConfig {
  Backends backends;
  double tau = 0.5;
  std::size_t max_attempts = 3;
  /// Drop claims that never passed verification instead of flagging them.
  bool exclude_unverified = false;
  std::size_t parallelism = 1;
  std::optional<std::string> question;
};

/// End-to-end grounding of every response sentence against the context.
/// Context sentences are embedded once, in a single batch.
std::vector<SentenceGrounding> ground_response(std::string_view response,
                                               std::span<const ContextSentence> context,
                                               const GroundingConfig& config);

}  // namespace claimtrace

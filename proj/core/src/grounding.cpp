#include "claimtrace/grounding.hpp"

#include <algorithm>
#include <stdexcept>

#include "claimtrace/errors.hpp"
#include "parallel.hpp"

namespace claimtrace {

int sign_of(EntailmentLabel label) noexcept {
  switch (label) {
    case EntailmentLabel::Entailment: return 1;
    case EntailmentLabel::Contradiction: return -1;
    case EntailmentLabel::Neutral: return 0;
  }
  return 0;
}

std::vector<Claim> verify_decomposition(std::string_view sentence, std::size_t sentence_index,
                                        const Decomposer& decomposer,
                                        const EntailmentJudge& judge, std::size_t max_attempts,
                                        const DecompositionContext& context) {
  if (max_attempts == 0) throw std::invalid_argument("max_attempts must be at least 1");

  std::vector<Claim> claims;
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    std::vector<std::string> texts;
    try {
      texts = decomposer.decompose(sentence, context);
    } catch (const MalformedReply&) {
      if (attempt == max_attempts) throw;
      continue;
    }
    if (texts.empty()) texts.emplace_back(sentence);

    claims.clear();
    bool all_entailed = true;
    for (auto& text : texts) {
      const bool entailed = judge.judge(sentence, text) == EntailmentLabel::Entailment;
      all_entailed = all_entailed && entailed;
      claims.push_back({std::move(text), sentence_index, entailed, attempt});
    }
    if (all_entailed) break;
  }
  return claims;
}

Matrix score_matrix(std::span<const EmbeddingVector> claims,
                    std::span<const EmbeddingVector> context) {
  Matrix m(claims.size(), context.size());
  // Rows are unit vectors, so cosines lie in [-1, 1]; clamp away rounding
  // that would otherwise let a self-match exceed tau = 1.
  for (std::size_t i = 0; i < claims.size(); ++i) {
    for (std::size_t j = 0; j < context.size(); ++j) {
      m(i, j) = std::clamp(claims[i].dot(context[j]), -1.0, 1.0);
    }
  }
  return m;
}

SignedScoreMatrix threshold_and_sign(const Matrix& raw, double tau, const EntailmentJudge& judge,
                                     std::span<const Claim> claims,
                                     std::span<const ContextSentence> context,
                                     std::size_t parallelism) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in [0, 1]");
  if (raw.rows() != claims.size() || raw.cols() != context.size()) {
    throw DimensionMismatch("score matrix shape does not match claims x context");
  }

  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  for (std::size_t i = 0; i < raw.rows(); ++i) {
    for (std::size_t j = 0; j < raw.cols(); ++j) {
      if (raw(i, j) > tau) candidates.emplace_back(i, j);
    }
  }

  std::vector<int> signs(candidates.size(), 0);
  detail::parallel_for(candidates.size(), parallelism, [&](std::size_t k) {
    const auto [i, j] = candidates[k];
    signs[k] = sign_of(judge.judge(context[j].text(), claims[i].text));
  });

  SignedScoreMatrix out{Matrix(raw.rows(), raw.cols()), tau, candidates.size()};
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto [i, j] = candidates[k];
    out.entries(i, j) = raw(i, j) * signs[k];
  }
  return out;
}

SentenceGrounding aggregate(const SentenceSpan& sentence, std::vector<Claim> claims,
                            SignedScoreMatrix matrix, std::span<const ContextSentence> context) {
  if (matrix.rows() != claims.size()) {
    throw DimensionMismatch("matrix rows do not match claim count");
  }
  if (!context.empty() && context.size() != matrix.cols()) {
    throw DimensionMismatch("matrix columns do not match context size");
  }
  SentenceGrounding out{sentence, std::move(claims), std::move(matrix), {}, {}};
  for (std::size_t j = 0; j < out.matrix.cols(); ++j) {
    bool support = false;
    bool contradict = false;
    for (std::size_t i = 0; i < out.matrix.rows(); ++i) {
      support = support || out.matrix(i, j) > 0.0;
      contradict = contradict || out.matrix(i, j) < 0.0;
    }
    const std::size_t index = context.empty() ? j : context[j].index();
    if (support) out.supports.push_back(index);
    if (contradict) out.contradicts.push_back(index);
  }
  std::sort(out.supports.begin(), out.supports.end());
  std::sort(out.contradicts.begin(), out.contradicts.end());
  return out;
}

std::vector<SentenceGrounding> ground_response(std::string_view response,
                                               std::span<const ContextSentence> context,
                                               const GroundingConfig& config) {
  const auto& b = config.backends;
  if (!b.decomposer || !b.judge || !b.embedder) {
    throw ConfigError("grounding needs decomposer, judge and embedder backends");
  }

  const std::vector<SentenceSpan> sentences = split_sentences(response);
  if (sentences.empty()) throw EmptyResponse();

  std::vector<EmbeddingVector> context_vecs;
  if (!context.empty()) {
    std::vector<std::string> texts;
    texts.reserve(context.size());
    for (const auto& s : context) texts.push_back(s.text());
    context_vecs = b.embedder->embed(texts);
    if (context_vecs.size() != context.size()) {
      throw DimensionMismatch("embedder returned the wrong number of context vectors");
    }
  }

  const DecompositionContext decomposition_context{config.question, std::string(response)};
  std::vector<std::vector<Claim>> claims_per_sentence(sentences.size());
  detail::parallel_for(sentences.size(), config.parallelism, [&](std::size_t s) {
    auto claims = verify_decomposition(sentences[s].text, s, *b.decomposer, *b.judge,
                                       config.max_attempts, decomposition_context);
    if (config.exclude_unverified) std::erase_if(claims, [](const Claim& c) { return !c.verified; });
    claims_per_sentence[s] = std::move(claims);
  });

  std::vector<SentenceGrounding> out;
  out.reserve(sentences.size());
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    auto& claims = claims_per_sentence[s];
    std::vector<EmbeddingVector> claim_vecs;
    if (!claims.empty()) {
      std::vector<std::string> texts;
      texts.reserve(claims.size());
      for (const auto& c : claims) texts.push_back(c.text);
      claim_vecs = b.embedder->embed(texts);
    }
    const Matrix raw = score_matrix(claim_vecs, context_vecs);
    SignedScoreMatrix signed_matrix =
        threshold_and_sign(raw, config.tau, *b.judge, claims, context, config.parallelism);
    out.push_back(aggregate(sentences[s], std::move(claims), std::move(signed_matrix), context));
  }
  return out;
}

}  // namespace claimtrace

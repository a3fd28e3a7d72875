#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "claimtrace/backends.hpp"

namespace claimtrace {

namespace lexicon {

/// Normalized content terms of `text`, in order of appearance (duplicates kept).
/// Lowercases, drops stop words and negation markers, maps a few irregular and
/// near-synonym forms to one canonical term ("better" -> "good") and strips
/// common inflectional suffixes.
std::vector<std::string> content_terms(std::string_view text);

/// Number of negation markers ("not", "no", "never", "cannot", "n't", ...).
std::size_t negation_count(std::string_view text);

/// Lowercased word tokens, before any filtering.
std::vector<std::string> tokens(std::string_view text);

}  // namespace lexicon

/// Deterministic offline stand-in for all four model roles.
///
/// - decompose: splits coordinated subjects (or a gerund's coordinated
///   objects, or coordinated verb phrases) on "and" and distributes the shared
///   part; list answers to "List ..." questions become "<topic> include <item>."
/// - judge: Entailment when the hypothesis' content terms are a subset of the
///   premise's and the negation parity matches, Contradiction when the terms
///   are a subset but the parity differs, otherwise Neutral.
/// - embed: content-term multiset hashed into `dimension` buckets, L2-normalized.
/// - negate: toggles the first auxiliary ("can" <-> "cannot", "is" <-> "is not",
///   "helps" <-> "does not help"), else prefixes "It is not the case that".
class MockBackend final : public Decomposer,
                          public EntailmentJudge,
                          public Embedder,
                          public Negator {
public:
  explicit MockBackend(std::size_t dimension = 64);

  std::vector<std::string> decompose(std::string_view sentence,
                                     const DecompositionContext& context) const override;
  EntailmentLabel judge(std::string_view premise, std::string_view hypothesis) const override;
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;
  std::string negate(std::string_view claim) const override;

  EmbeddingVector embed_one(std::string_view text) const;
  std::size_t dimension() const noexcept { return dimension_; }

  /// Bucket a normalized term hashes to.
  std::size_t bucket(std::string_view term) const noexcept;

private:
  std::size_t dimension_;
};

Backends make_mock_backends(std::size_t dimension = 64);

}  // namespace claimtrace

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "claimtrace/backends.hpp"
#include "claimtrace/segmentation.hpp"

namespace claimtrace {

enum class SourceCorpus { PubMedQA, BioASQ, TracSum, Synthetic };

std::string_view to_string(SourceCorpus corpus) noexcept;
SourceCorpus parse_source_corpus(std::string_view text);

struct GoldClaim {
  std::string text;
  std::set<std::size_t> support_indices;
  std::set<std::size_t> contradict_indices;

  bool operator==(const GoldClaim&) const = default;
};

struct SentenceClaimGroup {
  std::size_t sentence_index = 0;
  std::vector<GoldClaim> claims;

  bool operator==(const SentenceClaimGroup&) const = default;
};

/// One annotated example. Context sentences are stored pre-segmented so that
/// cited indices never depend on the splitter.
struct GoldInstance {
  std::string id;
  std::string question;
  std::string response;
  std::vector<ContextSentence> context_sentences;
  std::vector<SentenceClaimGroup> sentence_claim_groups;
  SourceCorpus source_corpus = SourceCorpus::Synthetic;

  bool operator==(const GoldInstance&) const = default;

  /// Context sentence with the given index, or nullptr.
  const ContextSentence* context_at(std::size_t index) const noexcept;
};

/// Throws ValidationError on the first broken invariant: duplicate context
/// indices, a citation to a missing context index, or a sentence_index
/// outside the segmented response.
void validate(const GoldInstance& instance);

/// One JSON object per line; blank lines are skipped. Every instance is
/// validated. Throws ParseError(line, reason) or ValidationError.
std::vector<GoldInstance> parse_instances(std::istream& in);
std::vector<GoldInstance> load_instances(const std::filesystem::path& path);

std::string serialize_instance(const GoldInstance& instance);
void write_instances(std::ostream& out, const std::vector<GoldInstance>& instances);
void save_instances(const std::filesystem::path& path, const std::vector<GoldInstance>& instances);

/// 64-bit linear congruential generator:
///   state' = 6364136223846793005 * state + 1442695040888963407 (mod 2^64)
/// and each draw returns the upper 31 bits (state' >> 33).
class Lcg64 {
public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ull;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ull;

  explicit Lcg64(std::uint64_t seed) noexcept : state_(seed) {}
  std::uint64_t next() noexcept {
    state_ = kMultiplier * state_ + kIncrement;
    return state_ >> 33;
  }

private:
  std::uint64_t state_;
};

/// Fisher-Yates shuffle driven by Lcg64(seed): for i = n-1 down to 1, swap
/// element i with element next() % (i + 1). The first round(fraction * n)
/// shuffled instances form the training split.
std::pair<std::vector<GoldInstance>, std::vector<GoldInstance>> split_train_eval(
    std::vector<GoldInstance> instances, std::uint64_t seed, double train_fraction);

enum class OnAugmentationFailure { Throw, Skip };

struct AugmentationResult {
  GoldInstance instance;
  std::size_t added = 0;
  std::vector<std::string> failed_claims;
};

/// Adds one contradicting context sentence per gold claim: the claim is
/// negated, the judge must label (negation, claim) as Contradiction, and the
/// negation is tried up to 1 + max_retries times. Accepted negations are
/// appended as Augmented context and cited in the claim's contradict set.
AugmentationResult augment_contradictory(const GoldInstance& instance, const Negator& negator,
                                         const EntailmentJudge& judge, std::size_t max_retries,
                                         OnAugmentationFailure on_failure =
                                             OnAugmentationFailure::Throw);

}  // namespace claimtrace

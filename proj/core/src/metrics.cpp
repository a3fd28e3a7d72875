#include "claimtrace/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "claimtrace/errors.hpp"

namespace claimtrace {
namespace {

// Shewchuk's exact partial-sum summation, rounded once at the end.
double exact_sum(std::initializer_list<double> values) {
  std::vector<double> partials;
  for (double x : values) {
    std::size_t used = 0;
    for (double y : partials) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[used++] = lo;
      x = hi;
    }
    partials.resize(used);
    partials.push_back(x);
  }
  double total = 0.0;
  for (auto it = partials.rbegin(); it != partials.rend(); ++it) total += *it;
  return total;
}

std::string join_claims(std::span<const std::string> claims) {
  std::string out;
  for (const auto& c : claims) {
    if (!out.empty()) out += "; ";
    out += c;
  }
  return out;
}

double mean(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

ClaimClass classify_row(std::span<const double> row) noexcept {
  const bool support = std::any_of(row.begin(), row.end(), [](double v) { return v > 0.0; });
  const bool contradict = std::any_of(row.begin(), row.end(), [](double v) { return v < 0.0; });
  if (support && !contradict) return ClaimClass::Faithful;
  if (support && contradict) return ClaimClass::Ambiguous;
  if (contradict) return ClaimClass::Hallucinated;
  return ClaimClass::Unverified;
}

double FaithfulnessRates::rate_sum() const noexcept { return exact_sum({fcr, acr, hcr, ucr}); }

FaithfulnessRates rates_from_counts(std::size_t faithful, std::size_t ambiguous,
                                    std::size_t hallucinated, std::size_t unverified) {
  const std::size_t p = faithful + ambiguous + hallucinated + unverified;
  if (p == 0) throw EmptyMatrix();
  const auto n = static_cast<double>(p);
  FaithfulnessRates r;
  r.claim_count = p;
  r.faithful = faithful;
  r.ambiguous = ambiguous;
  r.hallucinated = hallucinated;
  r.unverified = unverified;
  r.fcr = static_cast<double>(faithful) / n;
  r.acr = static_cast<double>(ambiguous) / n;
  r.hcr = static_cast<double>(hallucinated) / n;
  r.ucr = static_cast<double>(unverified) / n;
  return r;
}

namespace {

void count_rows(const SignedScoreMatrix& matrix, std::array<std::size_t, 4>& counts) {
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    ++counts[static_cast<std::size_t>(classify_row(matrix.entries.row(i)))];
  }
}

}  // namespace

FaithfulnessRates faithfulness_rates(const SignedScoreMatrix& matrix) {
  std::array<std::size_t, 4> counts{};
  count_rows(matrix, counts);
  return rates_from_counts(counts[0], counts[1], counts[2], counts[3]);
}

FaithfulnessRates faithfulness_rates(std::span<const SentenceGrounding> response) {
  std::array<std::size_t, 4> counts{};
  for (const auto& sentence : response) count_rows(sentence.matrix, counts);
  return rates_from_counts(counts[0], counts[1], counts[2], counts[3]);
}

double cer(std::span<const SentenceClaims> response, const EntailmentJudge& judge) {
  std::size_t total = 0;
  std::size_t entailed = 0;
  for (const auto& group : response) {
    for (const auto& claim : group.claims) {
      ++total;
      if (judge.judge(group.sentence, claim) == EntailmentLabel::Entailment) ++entailed;
    }
  }
  if (total == 0) throw std::invalid_argument("CER needs at least one claim");
  return static_cast<double>(entailed) / static_cast<double>(total);
}

double ecss(const std::string& claim, std::span<const std::string> evidence,
            const Embedder& embedder) {
  if (evidence.empty()) throw NoEvidence();
  std::vector<std::string> texts;
  texts.reserve(evidence.size() + 1);
  texts.push_back(claim);
  texts.insert(texts.end(), evidence.begin(), evidence.end());
  const auto vecs = embedder.embed(texts);
  double sum = 0.0;
  for (std::size_t k = 1; k < vecs.size(); ++k) sum += vecs[0].dot(vecs[k]);
  return sum / static_cast<double>(evidence.size());
}

double pfcr(const std::string& claim, std::span<const ScoredEvidence> evidence,
            const Negator& negator, const EntailmentJudge& judge, double epsilon) {
  if (evidence.empty()) throw NoEvidence();
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");
  const std::string negated = negator.negate(claim);
  std::size_t consistent = 0;
  for (const auto& item : evidence) {
    const int flipped_sign = sign_of(judge.judge(item.sentence, negated));
    bool ok = false;
    if (epsilon == 0.0) {
      const int original_sign = (item.score > 0.0) - (item.score < 0.0);
      ok = original_sign + flipped_sign == 0;
    } else {
      const double flipped = std::fabs(item.score) * flipped_sign;
      ok = std::fabs(item.score + flipped) <= epsilon;
    }
    if (ok) ++consistent;
  }
  return static_cast<double>(consistent) / static_cast<double>(evidence.size());
}

PrfScores citation_prf(const std::set<std::size_t>& predicted, const std::set<std::size_t>& gold) {
  if (predicted.empty() && gold.empty()) return {1.0, 1.0, 1.0};
  std::size_t tp = 0;
  for (std::size_t x : predicted) tp += gold.count(x);
  const double precision =
      predicted.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(predicted.size());
  const double recall =
      gold.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(gold.size());
  const double f1 =
      precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  return {recall, precision, f1};
}

PrfScores mean_prf(std::span<const PrfScores> scores) {
  if (scores.empty()) return {};
  PrfScores sum;
  for (const auto& s : scores) {
    sum.recall += s.recall;
    sum.precision += s.precision;
    sum.f1 += s.f1;
  }
  const auto n = static_cast<double>(scores.size());
  return {sum.recall / n, sum.precision / n, sum.f1 / n};
}

std::pair<double, double> claim_precision_recall(std::span<const std::string> predicted,
                                                 std::span<const std::string> gold,
                                                 const EntailmentJudge& judge) {
  if (predicted.empty() || gold.empty()) {
    throw std::invalid_argument("claim precision/recall needs non-empty claim lists");
  }
  const std::string gold_premise = join_claims(gold);
  const std::string predicted_premise = join_claims(predicted);
  std::size_t precise = 0;
  for (const auto& c : predicted) {
    if (judge.judge(gold_premise, c) == EntailmentLabel::Entailment) ++precise;
  }
  std::size_t recalled = 0;
  for (const auto& c : gold) {
    if (judge.judge(predicted_premise, c) == EntailmentLabel::Entailment) ++recalled;
  }
  return {static_cast<double>(precise) / static_cast<double>(predicted.size()),
          static_cast<double>(recalled) / static_cast<double>(gold.size())};
}

GroundingQuality grounding_quality(std::span<const SentenceGrounding> response,
                                   std::span<const ContextSentence> context,
                                   const Backends& backends, const QualityOptions& options) {
  if (!backends.judge || !backends.embedder || !backends.negator) {
    throw ConfigError("quality metrics need judge, embedder and negator backends");
  }
  GroundingQuality q;

  std::vector<SentenceClaims> groups;
  for (const auto& s : response) {
    SentenceClaims g{s.sentence.text, {}};
    for (const auto& c : s.claims) {
      g.claims.push_back(c.text);
      if (!c.verified) ++q.unverified_decompositions;
    }
    q.claim_count += g.claims.size();
    groups.push_back(std::move(g));
  }
  if (q.claim_count == 0) return q;
  q.cer = cer(groups, *backends.judge);

  std::vector<double> ecss_values;
  std::vector<double> pfcr_values;
  for (const auto& s : response) {
    for (std::size_t i = 0; i < s.claims.size(); ++i) {
      std::vector<std::string> ecss_evidence;
      std::vector<ScoredEvidence> scored;
      for (std::size_t j = 0; j < s.matrix.cols(); ++j) {
        const double v = s.matrix(i, j);
        if (v == 0.0) continue;
        scored.push_back({context[j].text(), v});
        if (options.ecss_polarity == EvidencePolarity::Both || v > 0.0) {
          ecss_evidence.push_back(context[j].text());
        }
      }
      if (scored.empty()) continue;
      ++q.scored_claims;
      if (!ecss_evidence.empty()) {
        ecss_values.push_back(ecss(s.claims[i].text, ecss_evidence, *backends.embedder));
      }
      pfcr_values.push_back(
          pfcr(s.claims[i].text, scored, *backends.negator, *backends.judge, options.epsilon));
    }
  }
  if (!ecss_values.empty()) q.ecss = mean(ecss_values);
  if (!pfcr_values.empty()) q.pfcr = mean(pfcr_values);
  return q;
}

}  // namespace claimtrace

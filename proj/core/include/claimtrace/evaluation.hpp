#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "claimtrace/dataset.hpp"
#include "claimtrace/grounding.hpp"
#include "claimtrace/metrics.hpp"

namespace claimtrace {

struct EvaluationOptions {
  GroundingConfig grounding;
  QualityOptions quality;
  /// Also score decomposition quality against the gold claims (judge calls).
  bool claim_metrics = true;
};

/// Scores of one gold instance. Citation PRF is computed per annotated
/// sentence and averaged over the instance's sentences.
struct InstanceScores {
  std::string id;
  SourceCorpus corpus = SourceCorpus::Synthetic;
  PrfScores supportive;
  PrfScores contradictory;
  /// Empty when the grounded response has no claims.
  std::optional<FaithfulnessRates> rates;
  std::optional<GroundingQuality> quality;
  std::optional<double> claim_precision;
  std::optional<double> claim_recall;
  /// Wall-clock seconds spent grounding the full response.
  double seconds = 0.0;
  std::size_t judged_pairs = 0;
  std::vector<SentenceGrounding> grounding;
};

/// Grounds the instance response against its gold context and scores it.
InstanceScores evaluate_instance(const GoldInstance& instance, const EvaluationOptions& options);

std::vector<InstanceScores> evaluate_instances(std::span<const GoldInstance> instances,
                                               const EvaluationOptions& options);

/// Citation-only comparison of an already-predicted instance (same schema as
/// the gold file) against its gold counterpart. Sentence groups are matched
/// by sentence_index; a sentence missing on one side has empty citation sets.
InstanceScores score_predictions(const GoldInstance& gold, const GoldInstance& predicted);

/// Pairs gold and predicted instances by id. Throws ValidationError when a
/// gold id has no prediction.
std::vector<InstanceScores> score_prediction_file(std::span<const GoldInstance> gold,
                                                  std::span<const GoldInstance> predicted);

/// One aggregated table row. Optional columns are means over the instances
/// where the value is defined, and empty when it is defined nowhere.
struct CorpusRow {
  std::string corpus;
  std::size_t instances = 0;
  PrfScores supportive;
  PrfScores contradictory;
  std::optional<double> cer;
  std::optional<double> ecss;
  std::optional<double> pfcr;
  std::optional<double> fcr;
  std::optional<double> acr;
  std::optional<double> hcr;
  std::optional<double> ucr;
  std::optional<double> claim_precision;
  std::optional<double> claim_recall;
  double mean_seconds = 0.0;
  std::size_t judged_pairs = 0;
};

/// One row per source corpus present (in enum order) followed by an "all" row.
std::vector<CorpusRow> summarize(std::span<const InstanceScores> scores);
CorpusRow summarize_all(std::span<const InstanceScores> scores);

struct SweepRow {
  double tau = 0.0;
  CorpusRow metrics;
  std::vector<InstanceScores> instances;
};

/// Evaluates the corpus once per tau. Throws std::invalid_argument when
/// `taus` is empty.
std::vector<SweepRow> sweep(std::span<const GoldInstance> instances, std::span<const double> taus,
                            EvaluationOptions options);

std::string render_table_json(std::span<const CorpusRow> rows);
std::string render_table_tsv(std::span<const CorpusRow> rows);
std::string render_sweep_json(std::span<const SweepRow> rows);
std::string render_sweep_tsv(std::span<const SweepRow> rows);

}  // namespace claimtrace

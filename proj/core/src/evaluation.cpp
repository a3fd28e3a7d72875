#include "claimtrace/evaluation.hpp"

#include <chrono>
#include <charconv>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "claimtrace/errors.hpp"

namespace claimtrace {
namespace {

using ordered_json = nlohmann::ordered_json;

struct CitationSets {
  std::set<std::size_t> supports;
  std::set<std::size_t> contradicts;
};

CitationSets gold_sets(const SentenceClaimGroup& group) {
  CitationSets out;
  for (const auto& c : group.claims) {
    out.supports.insert(c.support_indices.begin(), c.support_indices.end());
    out.contradicts.insert(c.contradict_indices.begin(), c.contradict_indices.end());
  }
  return out;
}

CitationSets predicted_sets(const SentenceGrounding& s) {
  return {std::set<std::size_t>(s.supports.begin(), s.supports.end()),
          std::set<std::size_t>(s.contradicts.begin(), s.contradicts.end())};
}

double mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::optional<double> mean_if_any(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return mean(values);
}

void score_citations(InstanceScores& scores,
                     const std::vector<std::pair<CitationSets, CitationSets>>& pairs) {
  std::vector<PrfScores> supportive;
  std::vector<PrfScores> contradictory;
  for (const auto& [predicted, gold] : pairs) {
    supportive.push_back(citation_prf(predicted.supports, gold.supports));
    contradictory.push_back(citation_prf(predicted.contradicts, gold.contradicts));
  }
  scores.supportive = mean_prf(supportive);
  scores.contradictory = mean_prf(contradictory);
}

std::string number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

std::string cell(const std::optional<double>& v) { return v ? number(*v) : "NA"; }

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json row_json(const CorpusRow& r) {
  return ordered_json{
      {"corpus", r.corpus},
      {"instances", r.instances},
      {"R_e", r.supportive.recall},
      {"P_e", r.supportive.precision},
      {"F1_e", r.supportive.f1},
      {"R_c", r.contradictory.recall},
      {"P_c", r.contradictory.precision},
      {"F1_c", r.contradictory.f1},
      {"CER", optional_json(r.cer)},
      {"ECSS", optional_json(r.ecss)},
      {"PFCR", optional_json(r.pfcr)},
      {"FCR", optional_json(r.fcr)},
      {"ACR", optional_json(r.acr)},
      {"HCR", optional_json(r.hcr)},
      {"UCR", optional_json(r.ucr)},
      {"claim_precision", optional_json(r.claim_precision)},
      {"claim_recall", optional_json(r.claim_recall)},
      {"mean_seconds", r.mean_seconds},
      {"judge_calls", r.judged_pairs},
  };
}

constexpr const char* kTableHeader =
    "corpus\tinstances\tR_e\tP_e\tF1_e\tR_c\tP_c\tF1_c\tCER\tECSS\tPFCR\tFCR\tACR\tHCR\tUCR\t"
    "claim_precision\tclaim_recall\tmean_seconds\tjudge_calls";

std::string row_tsv(const CorpusRow& r) {
  std::ostringstream out;
  out << r.corpus << '\t' << r.instances << '\t' << number(r.supportive.recall) << '\t'
      << number(r.supportive.precision) << '\t' << number(r.supportive.f1) << '\t'
      << number(r.contradictory.recall) << '\t' << number(r.contradictory.precision) << '\t'
      << number(r.contradictory.f1) << '\t' << cell(r.cer) << '\t' << cell(r.ecss) << '\t'
      << cell(r.pfcr) << '\t' << cell(r.fcr) << '\t' << cell(r.acr) << '\t' << cell(r.hcr)
      << '\t' << cell(r.ucr) << '\t' << cell(r.claim_precision) << '\t' << cell(r.claim_recall)
      << '\t' << number(r.mean_seconds) << '\t' << r.judged_pairs;
  return out.str();
}

CorpusRow summarize_group(std::string name, std::span<const InstanceScores* const> group) {
  CorpusRow row;
  row.corpus = std::move(name);
  row.instances = group.size();
  if (group.empty()) return row;

  std::vector<PrfScores> supportive;
  std::vector<PrfScores> contradictory;
  std::vector<double> cer, ecss, pfcr, fcr, acr, hcr, ucr, cp, cr;
  double seconds = 0.0;
  for (const InstanceScores* s : group) {
    supportive.push_back(s->supportive);
    contradictory.push_back(s->contradictory);
    if (s->quality && s->quality->claim_count > 0) {
      cer.push_back(s->quality->cer);
      if (s->quality->ecss) ecss.push_back(*s->quality->ecss);
      if (s->quality->pfcr) pfcr.push_back(*s->quality->pfcr);
    }
    if (s->rates) {
      fcr.push_back(s->rates->fcr);
      acr.push_back(s->rates->acr);
      hcr.push_back(s->rates->hcr);
      ucr.push_back(s->rates->ucr);
    }
    if (s->claim_precision) cp.push_back(*s->claim_precision);
    if (s->claim_recall) cr.push_back(*s->claim_recall);
    seconds += s->seconds;
    row.judged_pairs += s->judged_pairs;
  }
  row.supportive = mean_prf(supportive);
  row.contradictory = mean_prf(contradictory);
  row.cer = mean_if_any(cer);
  row.ecss = mean_if_any(ecss);
  row.pfcr = mean_if_any(pfcr);
  row.fcr = mean_if_any(fcr);
  row.acr = mean_if_any(acr);
  row.hcr = mean_if_any(hcr);
  row.ucr = mean_if_any(ucr);
  row.claim_precision = mean_if_any(cp);
  row.claim_recall = mean_if_any(cr);
  row.mean_seconds = seconds / static_cast<double>(group.size());
  return row;
}

}  // namespace

InstanceScores evaluate_instance(const GoldInstance& instance, const EvaluationOptions& options) {
  InstanceScores scores;
  scores.id = instance.id;
  scores.corpus = instance.source_corpus;

  GroundingConfig config = options.grounding;
  if (!config.question && !instance.question.empty()) config.question = instance.question;

  const auto start = std::chrono::steady_clock::now();
  scores.grounding = ground_response(instance.response, instance.context_sentences, config);
  scores.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::size_t claim_count = 0;
  for (const auto& s : scores.grounding) {
    scores.judged_pairs += s.matrix.judged_pairs;
    claim_count += s.claims.size();
  }

  std::vector<std::pair<CitationSets, CitationSets>> pairs;
  std::vector<double> precisions;
  std::vector<double> recalls;
  for (const auto& group : instance.sentence_claim_groups) {
    const SentenceGrounding& predicted = scores.grounding.at(group.sentence_index);
    pairs.emplace_back(predicted_sets(predicted), gold_sets(group));

    if (options.claim_metrics && config.backends.judge && !predicted.claims.empty() &&
        !group.claims.empty()) {
      std::vector<std::string> predicted_texts;
      for (const auto& c : predicted.claims) predicted_texts.push_back(c.text);
      std::vector<std::string> gold_texts;
      for (const auto& c : group.claims) gold_texts.push_back(c.text);
      const auto [p, r] = claim_precision_recall(predicted_texts, gold_texts, *config.backends.judge);
      precisions.push_back(p);
      recalls.push_back(r);
    }
  }
  score_citations(scores, pairs);
  scores.claim_precision = mean_if_any(precisions);
  scores.claim_recall = mean_if_any(recalls);

  if (claim_count > 0) {
    scores.rates = faithfulness_rates(scores.grounding);
    if (config.backends.negator) {
      scores.quality = grounding_quality(scores.grounding, instance.context_sentences,
                                         config.backends, options.quality);
    }
  }
  return scores;
}

std::vector<InstanceScores> evaluate_instances(std::span<const GoldInstance> instances,
                                               const EvaluationOptions& options) {
  std::vector<InstanceScores> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) out.push_back(evaluate_instance(inst, options));
  return out;
}

InstanceScores score_predictions(const GoldInstance& gold, const GoldInstance& predicted) {
  InstanceScores scores;
  scores.id = gold.id;
  scores.corpus = gold.source_corpus;

  std::map<std::size_t, CitationSets> predicted_by_sentence;
  for (const auto& g : predicted.sentence_claim_groups) {
    CitationSets sets = gold_sets(g);
    auto& slot = predicted_by_sentence[g.sentence_index];
    slot.supports.insert(sets.supports.begin(), sets.supports.end());
    slot.contradicts.insert(sets.contradicts.begin(), sets.contradicts.end());
  }
  std::vector<std::pair<CitationSets, CitationSets>> pairs;
  for (const auto& g : gold.sentence_claim_groups) {
    auto it = predicted_by_sentence.find(g.sentence_index);
    pairs.emplace_back(it == predicted_by_sentence.end() ? CitationSets{} : it->second,
                       gold_sets(g));
  }
  score_citations(scores, pairs);
  return scores;
}

std::vector<InstanceScores> score_prediction_file(std::span<const GoldInstance> gold,
                                                  std::span<const GoldInstance> predicted) {
  std::map<std::string, const GoldInstance*> by_id;
  for (const auto& p : predicted) by_id.emplace(p.id, &p);
  std::vector<InstanceScores> out;
  out.reserve(gold.size());
  for (const auto& g : gold) {
    auto it = by_id.find(g.id);
    if (it == by_id.end()) throw ValidationError(g.id, "no prediction for this instance");
    out.push_back(score_predictions(g, *it->second));
  }
  return out;
}

std::vector<CorpusRow> summarize(std::span<const InstanceScores> scores) {
  std::vector<CorpusRow> rows;
  for (auto corpus : {SourceCorpus::PubMedQA, SourceCorpus::BioASQ, SourceCorpus::TracSum,
                      SourceCorpus::Synthetic}) {
    std::vector<const InstanceScores*> group;
    for (const auto& s : scores) {
      if (s.corpus == corpus) group.push_back(&s);
    }
    if (!group.empty()) rows.push_back(summarize_group(std::string(to_string(corpus)), group));
  }
  rows.push_back(summarize_all(scores));
  return rows;
}

CorpusRow summarize_all(std::span<const InstanceScores> scores) {
  std::vector<const InstanceScores*> all;
  all.reserve(scores.size());
  for (const auto& s : scores) all.push_back(&s);
  return summarize_group("all", all);
}

std::vector<SweepRow> sweep(std::span<const GoldInstance> instances, std::span<const double> taus,
                            EvaluationOptions options) {
  if (taus.empty()) throw std::invalid_argument("sweep needs at least one tau");
  std::vector<SweepRow> rows;
  rows.reserve(taus.size());
  for (double tau : taus) {
    options.grounding.tau = tau;
    SweepRow row;
    row.tau = tau;
    row.instances = evaluate_instances(instances, options);
    row.metrics = summarize_all(row.instances);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string render_table_json(std::span<const CorpusRow> rows) {
  ordered_json out = ordered_json::array();
  for (const auto& r : rows) out.push_back(row_json(r));
  return out.dump(2) + "\n";
}

std::string render_table_tsv(std::span<const CorpusRow> rows) {
  std::string out = std::string(kTableHeader) + "\n";
  for (const auto& r : rows) out += row_tsv(r) + "\n";
  return out;
}

std::string render_sweep_json(std::span<const SweepRow> rows) {
  ordered_json out = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json entry;
    entry["tau"] = r.tau;
    const ordered_json metrics = row_json(r.metrics);
    for (const auto& [key, value] : metrics.items()) entry[key] = value;
    out.push_back(std::move(entry));
  }
  return out.dump(2) + "\n";
}

std::string render_sweep_tsv(std::span<const SweepRow> rows) {
  std::string out = "tau\t" + std::string(kTableHeader) + "\n";
  for (const auto& r : rows) out += number(r.tau) + "\t" + row_tsv(r.metrics) + "\n";
  return out;
}

}  // namespace claimtrace

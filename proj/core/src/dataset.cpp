#include "claimtrace/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "claimtrace/errors.hpp"

namespace claimtrace {
namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

ordered_json to_json(const ContextSentence& s) {
  return ordered_json{
      {"index", s.span.index},         {"text", s.span.text},
      {"char_start", s.span.char_start}, {"char_end", s.span.char_end},
      {"origin", to_string(s.origin)}, {"document", s.document},
  };
}

ordered_json to_json(const GoldInstance& inst) {
  ordered_json context = ordered_json::array();
  for (const auto& s : inst.context_sentences) context.push_back(to_json(s));
  ordered_json groups = ordered_json::array();
  for (const auto& g : inst.sentence_claim_groups) {
    ordered_json claims = ordered_json::array();
    for (const auto& c : g.claims) {
      claims.push_back({{"text", c.text},
                        {"support_indices", c.support_indices},
                        {"contradict_indices", c.contradict_indices}});
    }
    groups.push_back({{"sentence_index", g.sentence_index}, {"claims", std::move(claims)}});
  }
  return ordered_json{
      {"id", inst.id},
      {"question", inst.question},
      {"response", inst.response},
      {"context_sentences", std::move(context)},
      {"sentence_claim_groups", std::move(groups)},
      {"source_corpus", to_string(inst.source_corpus)},
  };
}

template <typename T>
T field(const json& obj, const char* name) {
  if (!obj.contains(name)) throw std::invalid_argument(std::string("missing field '") + name + "'");
  try {
    return obj.at(name).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("field '") + name + "' has the wrong type");
  }
}

GoldInstance from_json(const json& obj) {
  if (!obj.is_object()) throw std::invalid_argument("record is not a JSON object");
  GoldInstance inst;
  inst.id = field<std::string>(obj, "id");
  inst.question = field<std::string>(obj, "question");
  inst.response = field<std::string>(obj, "response");
  inst.source_corpus = parse_source_corpus(field<std::string>(obj, "source_corpus"));

  for (const auto& s : field<json>(obj, "context_sentences")) {
    ContextSentence cs;
    cs.span.index = field<std::size_t>(s, "index");
    cs.span.text = field<std::string>(s, "text");
    cs.span.char_start = s.contains("char_start") ? field<std::size_t>(s, "char_start") : 0;
    cs.span.char_end =
        s.contains("char_end") ? field<std::size_t>(s, "char_end") : cs.span.text.size();
    cs.origin = s.contains("origin") ? parse_origin(field<std::string>(s, "origin"))
                                     : Origin::Context;
    cs.document = s.contains("document") ? field<std::size_t>(s, "document") : 0;
    inst.context_sentences.push_back(std::move(cs));
  }
  for (const auto& g : field<json>(obj, "sentence_claim_groups")) {
    SentenceClaimGroup group;
    group.sentence_index = field<std::size_t>(g, "sentence_index");
    for (const auto& c : field<json>(g, "claims")) {
      GoldClaim claim;
      claim.text = field<std::string>(c, "text");
      claim.support_indices = field<std::set<std::size_t>>(c, "support_indices");
      claim.contradict_indices = field<std::set<std::size_t>>(c, "contradict_indices");
      group.claims.push_back(std::move(claim));
    }
    inst.sentence_claim_groups.push_back(std::move(group));
  }
  return inst;
}

}  // namespace

std::string_view to_string(SourceCorpus corpus) noexcept {
  switch (corpus) {
    case SourceCorpus::PubMedQA: return "PubMedQA";
    case SourceCorpus::BioASQ: return "BioASQ";
    case SourceCorpus::TracSum: return "TracSum";
    case SourceCorpus::Synthetic: return "Synthetic";
  }
  return "Synthetic";
}

SourceCorpus parse_source_corpus(std::string_view text) {
  for (auto c : {SourceCorpus::PubMedQA, SourceCorpus::BioASQ, SourceCorpus::TracSum,
                 SourceCorpus::Synthetic}) {
    if (to_string(c) == text) return c;
  }
  throw std::invalid_argument("unknown source_corpus: " + std::string(text));
}

const ContextSentence* GoldInstance::context_at(std::size_t index) const noexcept {
  for (const auto& s : context_sentences) {
    if (s.index() == index) return &s;
  }
  return nullptr;
}

void validate(const GoldInstance& instance) {
  std::unordered_set<std::size_t> indices;
  for (const auto& s : instance.context_sentences) {
    if (!indices.insert(s.index()).second) {
      throw ValidationError(instance.id, "duplicate context index " + std::to_string(s.index()));
    }
    if (s.text().empty()) {
      throw ValidationError(instance.id, "empty context sentence " + std::to_string(s.index()));
    }
  }
  const std::size_t sentence_count = split_sentences(instance.response).size();
  for (const auto& g : instance.sentence_claim_groups) {
    if (g.sentence_index >= sentence_count) {
      throw ValidationError(instance.id, "sentence_index " + std::to_string(g.sentence_index) +
                                             " but the response has " +
                                             std::to_string(sentence_count) + " sentences");
    }
    for (const auto& c : g.claims) {
      for (const auto* cited : {&c.support_indices, &c.contradict_indices}) {
        for (std::size_t idx : *cited) {
          if (!indices.contains(idx)) {
            throw ValidationError(instance.id, "claim '" + c.text + "' cites missing context index " +
                                                   std::to_string(idx));
          }
        }
      }
    }
  }
}

std::vector<GoldInstance> parse_instances(std::istream& in) {
  std::vector<GoldInstance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    GoldInstance inst;
    try {
      inst = from_json(json::parse(line));
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
    validate(inst);
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<GoldInstance> load_instances(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_instances(in);
}

std::string serialize_instance(const GoldInstance& instance) { return to_json(instance).dump(); }

void write_instances(std::ostream& out, const std::vector<GoldInstance>& instances) {
  for (const auto& inst : instances) out << serialize_instance(inst) << '\n';
}

void save_instances(const std::filesystem::path& path, const std::vector<GoldInstance>& instances) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_instances(out, instances);
}

std::pair<std::vector<GoldInstance>, std::vector<GoldInstance>> split_train_eval(
    std::vector<GoldInstance> instances, std::uint64_t seed, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie strictly between 0 and 1");
  }
  Lcg64 rng(seed);
  for (std::size_t i = instances.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next() % i);
    std::swap(instances[i - 1], instances[j]);
  }
  const auto cut = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(instances.size())));
  std::vector<GoldInstance> train(std::make_move_iterator(instances.begin()),
                                  std::make_move_iterator(instances.begin() +
                                                          static_cast<std::ptrdiff_t>(cut)));
  std::vector<GoldInstance> eval(
      std::make_move_iterator(instances.begin() + static_cast<std::ptrdiff_t>(cut)),
      std::make_move_iterator(instances.end()));
  return {std::move(train), std::move(eval)};
}

AugmentationResult augment_contradictory(const GoldInstance& instance, const Negator& negator,
                                         const EntailmentJudge& judge, std::size_t max_retries,
                                         OnAugmentationFailure on_failure) {
  AugmentationResult result{instance, 0, {}};
  GoldInstance& out = result.instance;

  std::size_t next_index = 0;
  std::size_t next_document = 0;
  for (const auto& s : out.context_sentences) {
    next_index = std::max(next_index, s.index() + 1);
    next_document = std::max(next_document, s.document + 1);
  }

  for (auto& group : out.sentence_claim_groups) {
    for (auto& claim : group.claims) {
      std::optional<std::string> accepted;
      for (std::size_t attempt = 0; attempt <= max_retries && !accepted; ++attempt) {
        std::string negated = negator.negate(claim.text);
        if (!negated.empty() &&
            judge.judge(negated, claim.text) == EntailmentLabel::Contradiction) {
          accepted = std::move(negated);
        }
      }
      if (!accepted) {
        if (on_failure == OnAugmentationFailure::Throw) throw AugmentationFailed(claim.text);
        result.failed_claims.push_back(claim.text);
        continue;
      }
      ContextSentence added;
      added.span = {next_index, *accepted, 0, accepted->size()};
      added.origin = Origin::Augmented;
      added.document = next_document++;
      out.context_sentences.push_back(std::move(added));
      claim.contradict_indices.insert(next_index);
      ++next_index;
      ++result.added;
    }
  }
  return result;
}

}  // namespace claimtrace

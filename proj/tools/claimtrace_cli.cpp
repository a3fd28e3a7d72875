// Command-line front end: ground a response, evaluate or sweep a gold corpus,
// split a corpus, and augment it with contradicting context.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "claimtrace/backends.hpp"
#include "claimtrace/dataset.hpp"
#include "claimtrace/errors.hpp"
#include "claimtrace/evaluation.hpp"
#include "claimtrace/grounding.hpp"
#include "claimtrace/metrics.hpp"
#include "claimtrace/report.hpp"
#include "claimtrace/segmentation.hpp"

namespace {

using namespace claimtrace;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBackend = 2;
constexpr int kExitValidation = 3;

/// I/O failure: missing input, unwritable output.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string backend = "mock";
  std::string base_url;
  std::string api_key_env;
  std::string model;
  double tau = 0.5;
  double epsilon = 0.0;
  std::size_t max_attempts = 3;
  std::size_t parallelism = 1;
  std::size_t max_in_flight = 8;
  std::string format = "json";
  std::string output;
  bool supports_only_ecss = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, const std::vector<std::string>& formats) {
  cmd->add_option("--backend", o.backend, "Backend kind")
      ->check(CLI::IsMember({"mock", "remote"}))
      ->capture_default_str();
  cmd->add_option("--base-url", o.base_url, "OpenAI-compatible endpoint, e.g. http://host:8000/v1");
  cmd->add_option("--api-key-env", o.api_key_env, "Name of the env var holding the API key");
  cmd->add_option("--model", o.model, "Model identifier used for every remote role");
  cmd->add_option("--tau", o.tau, "Evidence threshold in [0,1]")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--epsilon", o.epsilon, "Polarity-flip tolerance")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--max-attempts", o.max_attempts, "Decomposition attempts per sentence")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--parallelism", o.parallelism, "Worker threads for backend calls")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-in-flight", o.max_in_flight, "Concurrent remote requests")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember(formats))
      ->capture_default_str();
  cmd->add_option("-o,--output", o.output, "Output file (default: stdout)");
  cmd->add_flag("--ecss-supports-only", o.supports_only_ecss,
                "Average ECSS over supporting evidence only");
}

BackendConfig backend_config(const CommonOptions& o) {
  BackendConfig config;
  config.kind = parse_backend_kind(o.backend);
  if (!o.base_url.empty()) config.base_url = o.base_url;
  config.api_key_env = o.api_key_env;
  if (!o.model.empty()) config.model_names["default"] = o.model;
  config.max_in_flight = o.max_in_flight;
  config.validate();
  return config;
}

GroundingConfig grounding_config(const CommonOptions& o) {
  GroundingConfig config;
  config.backends = make_backends(backend_config(o));
  config.tau = o.tau;
  config.max_attempts = o.max_attempts;
  config.parallelism = o.parallelism;
  return config;
}

QualityOptions quality_options(const CommonOptions& o) {
  return {o.epsilon, o.supports_only_ecss ? EvidencePolarity::SupportsOnly : EvidencePolarity::Both};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Documents are separated by one or more blank lines.
std::vector<std::string> read_documents(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> documents;
  std::string current;
  std::string line;
  auto flush = [&] {
    if (!current.empty()) documents.push_back(std::move(current));
    current.clear();
  };
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      flush();
      continue;
    }
    if (!current.empty()) current += '\n';
    current += line;
  }
  flush();
  return documents;
}

std::vector<GoldInstance> read_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_instances(in);
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw IoError("cannot write " + output);
  out << text;
  if (!out) throw IoError("failed writing " + output);
}

struct GroundArgs {
  std::string response_file;
  std::string context_file;
  std::string augmented_file;
  std::string question;
  std::string gold_file;
  std::string instance_id;
  bool no_quality = false;
};

int run_ground(const CommonOptions& o, const GroundArgs& a) {
  std::string response;
  std::vector<ContextSentence> context;
  std::optional<std::string> question;
  if (!a.question.empty()) question = a.question;

  if (!a.gold_file.empty()) {
    const auto instances = read_instances(a.gold_file);
    const GoldInstance* chosen = nullptr;
    for (const auto& inst : instances) {
      if (a.instance_id.empty() || inst.id == a.instance_id) {
        chosen = &inst;
        break;
      }
    }
    if (!chosen) throw IoError("no matching instance in " + a.gold_file);
    response = chosen->response;
    context = chosen->context_sentences;
    if (!question && !chosen->question.empty()) question = chosen->question;
  } else {
    response = read_file(a.response_file);
    std::vector<std::string> documents;
    std::vector<std::string> augmented;
    if (!a.context_file.empty()) documents = read_documents(a.context_file);
    if (!a.augmented_file.empty()) augmented = read_documents(a.augmented_file);
    context = index_context(documents, augmented);
  }

  GroundingConfig config = grounding_config(o);
  config.question = question;
  auto sentences = ground_response(response, context, config);

  GroundReport report = make_report(response, context, std::move(sentences), o.tau);
  if (!a.no_quality && report.rates) {
    report.quality =
        grounding_quality(report.sentences, report.context, config.backends, quality_options(o));
  }
  emit(render(report, parse_report_format(o.format)), o.output);
  return kExitOk;
}

int run_evaluate(const CommonOptions& o, const std::string& gold_file,
                 const std::string& predictions_file) {
  const auto gold = read_instances(gold_file);
  std::vector<InstanceScores> scores;
  if (!predictions_file.empty()) {
    const auto predicted = read_instances(predictions_file);
    scores = score_prediction_file(gold, predicted);
  } else {
    EvaluationOptions options;
    options.grounding = grounding_config(o);
    options.quality = quality_options(o);
    scores = evaluate_instances(gold, options);
  }
  const auto rows = summarize(scores);
  emit(o.format == "tsv" ? render_table_tsv(rows) : render_table_json(rows), o.output);
  return kExitOk;
}

int run_sweep(const CommonOptions& o, const std::string& gold_file, std::vector<double> taus) {
  for (double t : taus) {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("sweep values must lie in [0,1]");
  }
  const auto gold = read_instances(gold_file);
  EvaluationOptions options;
  options.grounding = grounding_config(o);
  options.quality = quality_options(o);
  const auto rows = sweep(gold, taus, options);
  emit(o.format == "tsv" ? render_sweep_tsv(rows) : render_sweep_json(rows), o.output);
  return kExitOk;
}

int run_split(const std::string& input, std::uint64_t seed, double fraction,
              const std::string& train_out, const std::string& eval_out) {
  auto [train, eval] = split_train_eval(read_instances(input), seed, fraction);
  std::ostringstream train_text;
  write_instances(train_text, train);
  std::ostringstream eval_text;
  write_instances(eval_text, eval);
  emit(train_text.str(), train_out);
  emit(eval_text.str(), eval_out);
  std::cerr << "train: " << train.size() << "  eval: " << eval.size() << '\n';
  return kExitOk;
}

int run_augment(const CommonOptions& o, const std::string& input, std::size_t max_retries,
                bool skip_failures) {
  const auto instances = read_instances(input);
  const Backends backends = make_backends(backend_config(o));
  if (!backends.negator || !backends.judge) {
    throw ConfigError("augmentation needs negator and judge backends");
  }
  std::vector<GoldInstance> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    auto result = augment_contradictory(
        inst, *backends.negator, *backends.judge, max_retries,
        skip_failures ? OnAugmentationFailure::Skip : OnAugmentationFailure::Throw);
    for (const auto& claim : result.failed_claims) {
      std::cerr << "warning: " << inst.id << ": no contradicting sentence for '" << claim << "'\n";
    }
    out.push_back(std::move(result.instance));
  }
  std::ostringstream text;
  write_instances(text, out);
  emit(text.str(), o.output);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Claim-level grounding of generated answers against their context"};
  app.require_subcommand(1);

  CommonOptions ground_opts;
  GroundArgs ground_args;
  auto* ground = app.add_subcommand("ground", "Ground one response and write a report");
  add_common(ground, ground_opts, {"json", "html", "tsv"});
  auto* response_opt =
      ground->add_option("--response", ground_args.response_file, "Response text file")
          ->check(CLI::ExistingFile);
  ground->add_option("--context", ground_args.context_file,
                     "Context text file; documents separated by blank lines")
      ->check(CLI::ExistingFile);
  ground->add_option("--augmented", ground_args.augmented_file,
                     "Extra context appended after the documents, same layout")
      ->check(CLI::ExistingFile);
  ground->add_option("--question", ground_args.question, "Question the response answers");
  auto* gold_opt = ground->add_option("--gold", ground_args.gold_file,
                                      "Take response and context from an instance file instead")
                       ->check(CLI::ExistingFile);
  ground->add_option("--id", ground_args.instance_id, "Instance id within --gold (default: first)");
  ground->add_flag("--no-quality", ground_args.no_quality, "Skip CER/ECSS/PFCR");
  response_opt->excludes(gold_opt);

  CommonOptions eval_opts;
  std::string eval_gold;
  std::string eval_predictions;
  auto* evaluate = app.add_subcommand("evaluate", "Score a gold corpus per source corpus");
  add_common(evaluate, eval_opts, {"json", "tsv"});
  evaluate->add_option("--gold", eval_gold, "Gold instance file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--predictions", eval_predictions,
                       "Pre-computed predictions in the instance format; skips grounding")
      ->check(CLI::ExistingFile);

  CommonOptions sweep_opts;
  std::string sweep_gold;
  std::vector<double> taus{0.0, 0.25, 0.5, 0.75, 1.0};
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate a gold corpus at several thresholds");
  add_common(sweep_cmd, sweep_opts, {"json", "tsv"});
  sweep_cmd->add_option("--gold", sweep_gold, "Gold instance file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--sweep", taus, "Comma-separated thresholds")
      ->delimiter(',')
      ->capture_default_str();

  std::string split_input;
  std::uint64_t seed = 42;
  double fraction = 0.3;
  std::string train_out;
  std::string eval_out;
  auto* split = app.add_subcommand("split", "Deterministic train/eval split");
  split->add_option("--input", split_input, "Instance file")->required()->check(CLI::ExistingFile);
  split->add_option("--seed", seed, "Shuffle seed")->capture_default_str();
  split->add_option("--fraction", fraction, "Training fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  split->add_option("--train-out", train_out, "Training split file")->required();
  split->add_option("--eval-out", eval_out, "Evaluation split file")->required();

  CommonOptions augment_opts;
  std::string augment_input;
  std::size_t max_retries = 3;
  bool skip_failures = false;
  auto* augment =
      app.add_subcommand("augment", "Add one contradicting context sentence per gold claim");
  add_common(augment, augment_opts, {"jsonl"});
  augment_opts.format = "jsonl";
  augment->add_option("--input", augment_input, "Instance file")->required()->check(CLI::ExistingFile);
  augment->add_option("--max-retries", max_retries, "Extra negation attempts per claim")
      ->capture_default_str();
  augment->add_flag("--skip-failures", skip_failures,
                    "Warn and continue when a claim cannot be negated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ground) {
      if (ground_args.response_file.empty() && ground_args.gold_file.empty()) {
        std::cerr << "ground: one of --response or --gold is required\n";
        return kExitUsage;
      }
      return run_ground(ground_opts, ground_args);
    }
    if (*evaluate) return run_evaluate(eval_opts, eval_gold, eval_predictions);
    if (*sweep_cmd) return run_sweep(sweep_opts, sweep_gold, taus);
    if (*split) return run_split(split_input, seed, fraction, train_out, eval_out);
    if (*augment) return run_augment(augment_opts, augment_input, max_retries, skip_failures);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBackend;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

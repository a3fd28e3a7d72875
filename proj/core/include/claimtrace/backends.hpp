#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace claimtrace {

enum class EntailmentLabel { Entailment, Contradiction, Neutral };

std::string_view to_string(EntailmentLabel label) noexcept;

/// Case-insensitive; surrounding whitespace is ignored. Throws MalformedReply
/// for anything other than exactly one of the three label words.
EntailmentLabel parse_label(std::string_view text);

/// Unit-length embedding. The constructor normalizes its input and rejects
/// zero or non-finite vectors.
class EmbeddingVector {
public:
  explicit EmbeddingVector(std::vector<double> components);

  std::size_t dimension() const noexcept { return components_.size(); }
  std::span<const double> components() const noexcept { return components_; }
  double operator[](std::size_t i) const { return components_[i]; }

  /// Plain left-to-right dot product. Throws DimensionMismatch.
  double dot(const EmbeddingVector& other) const;

  bool operator==(const EmbeddingVector&) const = default;

private:
  std::vector<double> components_;
};

/// Optional surrounding text handed to the decomposer.
struct DecompositionContext {
  std::optional<std::string> question;
  std::optional<std::string> full_response;
};

class Decomposer {
public:
  virtual ~Decomposer() = default;
  /// Returns at least one claim. An atomic sentence comes back as itself.
  virtual std::vector<std::string> decompose(std::string_view sentence,
                                             const DecompositionContext& context) const = 0;
};

class EntailmentJudge {
public:
  virtual ~EntailmentJudge() = default;
  virtual EntailmentLabel judge(std::string_view premise, std::string_view hypothesis) const = 0;
};

class Embedder {
public:
  virtual ~Embedder() = default;
  /// One vector per input, in input order.
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const = 0;
};

class Negator {
public:
  virtual ~Negator() = default;
  virtual std::string negate(std::string_view claim) const = 0;
};

/// The four model roles the pipeline needs. Implementations must be safe to
/// call concurrently.
struct Backends {
  std::shared_ptr<const Decomposer> decomposer;
  std::shared_ptr<const EntailmentJudge> judge;
  std::shared_ptr<const Embedder> embedder;
  std::shared_ptr<const Negator> negator;
};

enum class BackendKind { Remote, Mock };

std::string_view to_string(BackendKind kind) noexcept;
BackendKind parse_backend_kind(std::string_view text);

struct BackendConfig {
  // Decoding is pinned to greedy; these are not configurable.
  static constexpr double kTemperature = 0.0;
  static constexpr double kTopK = 1.0;

  BackendKind kind = BackendKind::Mock;
  std::optional<std::string> base_url;
  std::string api_key_env;
  /// role ("decompose", "entail", "embed", "negate") -> model identifier
  std::map<std::string, std::string> model_names;
  std::chrono::duration<double> timeout{60.0};
  std::size_t max_retries = 3;
  std::chrono::duration<double> initial_backoff{0.5};
  std::size_t max_in_flight = 8;
  std::size_t mock_dimension = 64;

  double temperature() const noexcept { return kTemperature; }
  double top_k() const noexcept { return kTopK; }

  /// Throws ConfigError when a Remote config lacks base_url, api_key_env or a model name.
  void validate() const;
  /// Model name for a role; falls back to the "default" entry, then throws.
  const std::string& model_for(std::string_view role) const;
};

Backends make_backends(const BackendConfig& config);

}  // namespace claimtrace

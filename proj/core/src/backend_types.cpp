#include <algorithm>
#include <cctype>
#include <cmath>

#include "claimtrace/backends.hpp"
#include "claimtrace/errors.hpp"
#include "claimtrace/mock_backend.hpp"
#include "claimtrace/remote_backend.hpp"

namespace claimtrace {
namespace {

std::string lower_trimmed(std::string_view text) {
  auto is_ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!text.empty() && is_ws(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_ws(text.back())) text.remove_suffix(1);
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(EntailmentLabel label) noexcept {
  switch (label) {
    case EntailmentLabel::Entailment: return "Entailment";
    case EntailmentLabel::Contradiction: return "Contradiction";
    case EntailmentLabel::Neutral: return "Neutral";
  }
  return "Neutral";
}

EntailmentLabel parse_label(std::string_view text) {
  const std::string word = lower_trimmed(text);
  if (word == "entailment") return EntailmentLabel::Entailment;
  if (word == "contradiction") return EntailmentLabel::Contradiction;
  if (word == "neutral") return EntailmentLabel::Neutral;
  throw MalformedReply("expected one of Entailment/Contradiction/Neutral", std::string(text));
}

EmbeddingVector::EmbeddingVector(std::vector<double> components)
    : components_(std::move(components)) {
  double sum = 0.0;
  for (double v : components_) {
    if (!std::isfinite(v)) throw std::invalid_argument("embedding has a non-finite component");
    sum += v * v;
  }
  if (sum <= 0.0) throw std::invalid_argument("embedding is the zero vector");
  const double norm = std::sqrt(sum);
  for (double& v : components_) v /= norm;
}

double EmbeddingVector::dot(const EmbeddingVector& other) const {
  if (other.dimension() != dimension()) {
    throw DimensionMismatch("embedding dimensions differ: " + std::to_string(dimension()) +
                            " vs " + std::to_string(other.dimension()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) sum += components_[i] * other.components_[i];
  return sum;
}

std::string_view to_string(BackendKind kind) noexcept {
  return kind == BackendKind::Remote ? "remote" : "mock";
}

BackendKind parse_backend_kind(std::string_view text) {
  const std::string word = lower_trimmed(text);
  if (word == "remote") return BackendKind::Remote;
  if (word == "mock") return BackendKind::Mock;
  throw ConfigError("unknown backend kind: " + std::string(text));
}

void BackendConfig::validate() const {
  if (kind == BackendKind::Remote) {
    if (!base_url || base_url->empty()) throw ConfigError("remote backend requires base_url");
    if (api_key_env.empty()) throw ConfigError("remote backend requires api_key_env");
    if (model_names.empty()) throw ConfigError("remote backend requires at least one model name");
  }
  if (max_in_flight == 0) throw ConfigError("max_in_flight must be at least 1");
  if (kind == BackendKind::Mock && mock_dimension == 0) {
    throw ConfigError("mock embedding dimension must be positive");
  }
}

const std::string& BackendConfig::model_for(std::string_view role) const {
  if (auto it = model_names.find(std::string(role)); it != model_names.end()) return it->second;
  if (auto it = model_names.find("default"); it != model_names.end()) return it->second;
  throw ConfigError("no model configured for role '" + std::string(role) + "'");
}

Backends make_backends(const BackendConfig& config) {
  config.validate();
  if (config.kind == BackendKind::Mock) return make_mock_backends(config.mock_dimension);
  auto remote = std::make_shared<const RemoteBackend>(config);
  return {remote, remote, remote, remote};
}

}  // namespace claimtrace

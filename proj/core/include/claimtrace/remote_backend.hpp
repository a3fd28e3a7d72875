#pragma once

#include <memory>
#include <string>

#include "claimtrace/backends.hpp"

namespace claimtrace {

/// Client for a chat-completions/embeddings HTTP service.
///
/// Chat requests are POST {base_url}/chat/completions with body
/// {"model", "messages": [{"role": "user", "content": <prompt>}], "temperature": 0.0};
/// embedding requests are POST {base_url}/embeddings with {"model", "input": [...]}.
/// The bearer token is read from the environment variable named by
/// `api_key_env` on every request. Transport failures, 429 and 5xx responses
/// are retried with exponential backoff; at most `max_in_flight` requests are
/// outstanding at once across all threads.
class RemoteBackend final : public Decomposer,
                            public EntailmentJudge,
                            public Embedder,
                            public Negator {
public:
  explicit RemoteBackend(BackendConfig config);
  ~RemoteBackend() override;

  RemoteBackend(const RemoteBackend&) = delete;
  RemoteBackend& operator=(const RemoteBackend&) = delete;

  std::vector<std::string> decompose(std::string_view sentence,
                                     const DecompositionContext& context) const override;
  EntailmentLabel judge(std::string_view premise, std::string_view hypothesis) const override;
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;
  std::string negate(std::string_view claim) const override;

  /// Raw assistant text for a single-turn prompt.
  std::string complete(std::string_view role, const std::string& prompt) const;

  const BackendConfig& config() const noexcept;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace claimtrace

#include "claimtrace/remote_backend.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "claimtrace/errors.hpp"
#include "claimtrace/prompts.hpp"

namespace claimtrace {
namespace {

using json = nlohmann::json;

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix without trailing slash, e.g. "/v1"
};

Endpoint parse_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url needs a scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported scheme: " + scheme);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw ConfigError("built without TLS support; cannot use " + url);
#endif
  const auto host_begin = scheme_end + 3;
  const auto path_begin = url.find('/', host_begin);
  Endpoint ep;
  ep.origin = url.substr(0, path_begin);
  if (path_begin != std::string::npos) ep.path = url.substr(path_begin);
  while (!ep.path.empty() && ep.path.back() == '/') ep.path.pop_back();
  if (ep.origin.size() <= host_begin) throw ConfigError("base_url has no host: " + url);
  return ep;
}

class InFlightLimiter {
public:
  explicit InFlightLimiter(std::size_t limit) : available_(limit) {}

  void acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
  }
  void release() {
    {
      std::lock_guard lock(mutex_);
      ++available_;
    }
    cv_.notify_one();
  }

private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t available_;
};

class SlotGuard {
public:
  explicit SlotGuard(InFlightLimiter& limiter) : limiter_(limiter) { limiter_.acquire(); }
  ~SlotGuard() { limiter_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

private:
  InFlightLimiter& limiter_;
};

}  // namespace

struct RemoteBackend::Impl {
  BackendConfig config;
  Endpoint endpoint;
  mutable InFlightLimiter limiter;

  explicit Impl(BackendConfig cfg)
      : config(std::move(cfg)), endpoint(parse_base_url(*config.base_url)),
        limiter(config.max_in_flight) {}

  std::string api_key() const {
    const char* value = std::getenv(config.api_key_env.c_str());
    if (value == nullptr || *value == '\0') {
      throw ConfigError("environment variable " + config.api_key_env + " is not set");
    }
    return value;
  }

  std::string post(const std::string& route, const json& body) const {
    const std::string payload = body.dump();
    const std::string path = endpoint.path + route;
    const httplib::Headers headers = {{"Authorization", "Bearer " + api_key()}};
    const double timeout = config.timeout.count();
    const auto secs = static_cast<time_t>(timeout);
    const auto usecs = static_cast<time_t>((timeout - static_cast<double>(secs)) * 1e6);

    std::string last_error;
    for (std::size_t attempt = 0; attempt <= config.max_retries; ++attempt) {
      if (attempt > 0) {
        const auto delay = config.initial_backoff * static_cast<double>(1ull << (attempt - 1));
        std::this_thread::sleep_for(delay);
      }
      httplib::Client client(endpoint.origin);
      client.set_connection_timeout(secs, usecs);
      client.set_read_timeout(secs, usecs);
      client.set_write_timeout(secs, usecs);

      httplib::Result result;
      {
        SlotGuard slot(limiter);
        result = client.Post(path, headers, payload, "application/json");
      }
      if (!result) {
        last_error = "transport error: " + httplib::to_string(result.error());
        continue;
      }
      const int status = result->status;
      if (status >= 200 && status < 300) return result->body;
      last_error = "HTTP " + std::to_string(status) + " from " + path;
      if (status != 429 && status < 500) break;
    }
    throw RemoteUnavailable(last_error);
  }

  std::string chat(std::string_view role, const std::string& prompt) const {
    json body = {
        {"model", config.model_for(role)},
        {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", BackendConfig::kTemperature},
    };
    const std::string raw = post("/chat/completions", body);
    try {
      const json reply = json::parse(raw);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw MalformedReply(std::string("unexpected chat response shape: ") + e.what(), raw);
    }
  }
};

RemoteBackend::RemoteBackend(BackendConfig config) {
  config.kind = BackendKind::Remote;
  config.validate();
  impl_ = std::make_unique<Impl>(std::move(config));
}

RemoteBackend::~RemoteBackend() = default;

const BackendConfig& RemoteBackend::config() const noexcept { return impl_->config; }

std::string RemoteBackend::complete(std::string_view role, const std::string& prompt) const {
  return impl_->chat(role, prompt);
}

std::vector<std::string> RemoteBackend::decompose(std::string_view sentence,
                                                  const DecompositionContext& context) const {
  if (sentence.empty()) throw std::invalid_argument("cannot decompose an empty sentence");
  const std::string prompt = prompts::render_decomposition(
      sentence, context.question.value_or(""), context.full_response.value_or(std::string(sentence)));
  return prompts::parse_numbered_list(impl_->chat("decompose", prompt));
}

EntailmentLabel RemoteBackend::judge(std::string_view premise, std::string_view hypothesis) const {
  if (premise.empty() || hypothesis.empty()) {
    throw std::invalid_argument("premise and hypothesis must be non-empty");
  }
  return prompts::parse_entailment_reply(
      impl_->chat("entail", prompts::render_entailment(premise, hypothesis)));
}

std::string RemoteBackend::negate(std::string_view claim) const {
  if (claim.empty()) throw std::invalid_argument("cannot negate an empty claim");
  return prompts::parse_negation_reply(impl_->chat("negate", prompts::render_negation(claim)));
}

std::vector<EmbeddingVector> RemoteBackend::embed(std::span<const std::string> texts) const {
  if (texts.empty()) return {};
  for (const auto& t : texts) {
    if (t.empty()) throw std::invalid_argument("cannot embed empty text");
  }
  const json body = {{"model", impl_->config.model_for("embed")},
                     {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  const std::string raw = impl_->post("/embeddings", body);

  std::vector<std::pair<std::size_t, std::vector<double>>> rows;
  try {
    const json reply = json::parse(raw);
    const auto& data = reply.at("data");
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& item = data.at(i);
      const std::size_t index = item.contains("index") ? item.at("index").get<std::size_t>() : i;
      rows.emplace_back(index, item.at("embedding").get<std::vector<double>>());
    }
  } catch (const json::exception& e) {
    throw MalformedReply(std::string("unexpected embeddings response shape: ") + e.what(), raw);
  }
  if (rows.size() != texts.size()) {
    throw MalformedReply("embeddings response has " + std::to_string(rows.size()) +
                             " vectors for " + std::to_string(texts.size()) + " inputs",
                         raw);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<EmbeddingVector> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != i) throw MalformedReply("embeddings response indices are not 0..n-1", raw);
    if (!out.empty() && rows[i].second.size() != out.front().dimension()) {
      throw MalformedReply("embeddings response mixes dimensions", raw);
    }
    try {
      out.emplace_back(std::move(rows[i].second));
    } catch (const std::invalid_argument& e) {
      throw MalformedReply(e.what(), raw);
    }
  }
  return out;
}

}  // namespace claimtrace

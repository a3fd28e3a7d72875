#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace claimtrace {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Transport or HTTP failure that persisted through all retries.
class RemoteUnavailable : public Error {
public:
  using Error::Error;
};

/// A model reply did not follow the format its prompt demands.
class MalformedReply : public Error {
public:
  MalformedReply(const std::string& what, std::string reply)
      : Error(what), reply_(std::move(reply)) {}
  const std::string& reply() const noexcept { return reply_; }

private:
  std::string reply_;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class EmptyResponse : public Error {
public:
  EmptyResponse() : Error("response contains no sentences") {}
};

class EmptyMatrix : public Error {
public:
  EmptyMatrix() : Error("score matrix has no claim rows") {}
};

class NoEvidence : public Error {
public:
  NoEvidence() : Error("claim has no selected evidence") {}
};

class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ValidationError : public Error {
public:
  ValidationError(std::string instance_id, const std::string& reason)
      : Error("instance '" + instance_id + "': " + reason), instance_id_(std::move(instance_id)) {}
  const std::string& instance_id() const noexcept { return instance_id_; }

private:
  std::string instance_id_;
};

class AugmentationFailed : public Error {
public:
  explicit AugmentationFailed(std::string claim)
      : Error("no contradicting negation found for claim: " + claim), claim_(std::move(claim)) {}
  const std::string& claim() const noexcept { return claim_; }

private:
  std::string claim_;
};

}  // namespace claimtrace

#pragma once

#include <stdexcept>
#include <string>

namespace crew {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration supplied by the caller (flags, config file, profile).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Input that violates an operation precondition (empty text, bad map).
class InvalidInputError : public Error {
public:
  using Error::Error;
};

/// Reference tokenizer has no entry for the requested fixture text.
class MissingFixtureError : public Error {
public:
  using Error::Error;
};

/// Task description matches no expert, or matches several equally well.
class UnknownTaskError : public Error {
public:
  using Error::Error;
};

/// An agent message did not follow the JSON wire protocol. Carries the raw
/// text so callers can log what the model actually said.
class ProtocolError : public Error {
public:
  explicit ProtocolError(const std::string& what, std::string raw = {})
      : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

private:
  std::string raw_;
};

/// Chat-completions endpoint failed after all retries.
class EndpointError : public Error {
public:
  using Error::Error;
};

/// Haystack corpus missing, unreadable, or too small for the request.
class CorpusError : public Error {
public:
  using Error::Error;
};

}  // namespace crew

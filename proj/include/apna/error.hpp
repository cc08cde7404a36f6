#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace apna {

enum class Errc {
  AuthenticationFailure,
  InvalidPublicKey,
  TruncatedHeader,
  TruncatedFrame,
  UnknownProtocolType,
  MalformedMessage,
  DuplicateHid,
  UnknownHid,
  Expired,
  BadCertificate,
  ExpiredCertificate,
  ReplayDetected,
  NameNotFound,
  NoSession,
  NoEphId,
  ScriptError,
  ParseError,
  InvalidArgument,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}
  explicit Error(Errc code) : std::runtime_error(std::string(to_string(code))), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace apna

#pragma once

#include <stdexcept>
#include <string>

namespace credlab {

enum class ErrorCode {
    MalformedDid,
    InvalidKey,
    NotFound,
    InvalidBody,
    NonCanonicalValue,
    MalformedDocument,
    InsufficientQuorum,
    InvalidEntry,
    StaleVersion,
    MissingCredential,
    InvalidChallenge,
    DecryptionFailure,
    IoError,
    MalformedChain,
    ScriptParseError,
    ActionFailure,
};

constexpr const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedDid: return "MalformedDid";
    case ErrorCode::InvalidKey: return "InvalidKey";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::InvalidBody: return "InvalidBody";
    case ErrorCode::NonCanonicalValue: return "NonCanonicalValue";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::InsufficientQuorum: return "InsufficientQuorum";
    case ErrorCode::InvalidEntry: return "InvalidEntry";
    case ErrorCode::StaleVersion: return "StaleVersion";
    case ErrorCode::MissingCredential: return "MissingCredential";
    case ErrorCode::InvalidChallenge: return "InvalidChallenge";
    case ErrorCode::DecryptionFailure: return "DecryptionFailure";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MalformedChain: return "MalformedChain";
    case ErrorCode::ScriptParseError: return "ScriptParseError";
    case ErrorCode::ActionFailure: return "ActionFailure";
    }
    return "Unknown";
}

/// Exception carrying a stable error code plus a human-readable message.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) { throw Error(code, message); }

} // namespace credlab

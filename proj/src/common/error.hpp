#pragma once

#include <stdexcept>
#include <string>

namespace chronokg {

enum class ErrorKind {
  kDomain,     // precondition or value-range violation
  kNotFound,   // unknown disease, record or file
  kTransport,  // network failure after retries
  kTimeout,    // provider exceeded its deadline
  kParse,      // malformed input that cannot be repaired
  kConfig,     // bad or missing configuration
  kCacheMiss,  // replay provider has no recorded response
  kIo,         // filesystem failure
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Transport failures keep enough detail for a caller to decide whether to
// try again later.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, int attempts, int last_status)
      : Error(ErrorKind::kTransport, message),
        attempts_(attempts),
        last_status_(last_status) {}

  int attempts() const { return attempts_; }
  int last_status() const { return last_status_; }

 private:
  int attempts_;
  int last_status_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kNotFound: return "not-found";
    case ErrorKind::kTransport: return "transport";
    case ErrorKind::kTimeout: return "timeout";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kCacheMiss: return "cache-miss";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace chronokg

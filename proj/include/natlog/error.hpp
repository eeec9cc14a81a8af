#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace natlog {

/// Base of every error thrown by the library. The CLI maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: data files, dataset records, CLI arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A (source, target) label transition or relation set that the attack
/// constraints forbid.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// Transport-level failure talking to a victim or LM backend.
class AdapterError : public Error {
 public:
  using Error::Error;
};

/// Well-formed transport, malformed message body.
class ProtocolError : public AdapterError {
 public:
  using AdapterError::AdapterError;
};

/// An internal invariant was found broken at runtime.
class InvariantError : public Error {
 public:
  using Error::Error;
};

enum class ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kAdapter = 2,
  kInvariant = 3,
};

// Warnings go through a replaceable sink so tests can observe them.
using WarningSink = std::function<void(const std::string&)>;

namespace detail {
inline std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}
inline WarningSink& warning_sink() {
  static WarningSink sink = [](const std::string& msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return sink;
}
}  // namespace detail

inline WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(detail::warning_mutex());
  return std::exchange(detail::warning_sink(), std::move(sink));
}

inline void warn(const std::string& msg) {
  std::lock_guard lock(detail::warning_mutex());
  if (detail::warning_sink()) detail::warning_sink()(msg);
}

}  // namespace natlog

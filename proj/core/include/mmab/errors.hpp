#pragma once

#include <stdexcept>
#include <string>

namespace mmab {

/// Σ m_k < M: no assignment profile can place every player.
class InfeasibleProblem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A player asked for an arm outside [0, K).
class InvalidAction : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A policy was constructed for a feedback mode it cannot operate under.
class UnsupportedFeedback : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Players' shared state went out of sync, or a received signal is
/// inconsistent with the protocol schedule.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Bad scenario/config input, detected before any run starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mmab

#pragma once

#include <stdexcept>
#include <string>

namespace cth {

// Bad identifiers, illegal actions, impossible successors.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Wrong number of agents for an operator (e.g. BR on a multi-agent game).
struct ArityError : std::runtime_error {
  explicit ArityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Querying transitions of a terminal state.
struct TerminalError : std::runtime_error {
  explicit TerminalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Exact planner exceeded its expanded-state cap.
struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid planner / engine configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Scenario / trace failed schema or replay validation.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cth

#pragma once

#include <stdexcept>
#include <string>

namespace ptl {

// Error taxonomy shared by all modules. Every error carries a stable
// category so the CLI can map failures onto exit codes.

/// Invalid arguments: dimension mismatches, empty inputs, out-of-range indices.
class RejectedInput : public std::invalid_argument {
 public:
  explicit RejectedInput(const std::string& what) : std::invalid_argument(what) {}
};

/// A loss, gradient or parameter became non-finite during training.
class TrainingDiverged : public std::runtime_error {
 public:
  explicit TrainingDiverged(const std::string& what) : std::runtime_error(what) {}
};

/// A learned model produced a non-finite prediction.
class ModelDiverged : public std::runtime_error {
 public:
  explicit ModelDiverged(const std::string& what) : std::runtime_error(what) {}
};

/// The analytic environment produced a non-finite state.
class SimulationDiverged : public std::runtime_error {
 public:
  explicit SimulationDiverged(const std::string& what) : std::runtime_error(what) {}
};

/// No candidate action sequence had a finite predicted return.
class PlanningFailed : public std::runtime_error {
 public:
  explicit PlanningFailed(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration could not be parsed or failed validation. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Persisted artifacts (checkpoints, stores, metrics) are missing or malformed.
class ArtifactError : public std::runtime_error {
 public:
  explicit ArtifactError(const std::string& what) : std::runtime_error(what) {}
};

void require(bool condition, const std::string& message);

}  // namespace ptl

#pragma once

#include <cstdint>
#include <random>

namespace ptl::nn {

/// Stream labels. Each component owns an independent stream derived from the
/// run seed so that, e.g., changing the planner's draw count never perturbs
/// environment resets.
enum class StreamId : std::uint32_t {
  kEnv = 0,
  kPlanner = 1,
  kInit = 2,
  kSelection = 3,
  kTraining = 4,
  kLateralInit = 5,
};

/// Seeded, reproducible random stream. Identical (seed, stream_id, call
/// sequence) yields identical outputs.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);
  RngStream(std::uint64_t seed, StreamId stream)
      : RngStream(seed, static_cast<std::uint64_t>(stream)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  double uniform(double lo, double hi);
  double normal(double mean, double stddev);
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Derives an independent child stream, e.g. one per rollout or ensemble member.
  RngStream fork(std::uint64_t child_id);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace ptl::nn

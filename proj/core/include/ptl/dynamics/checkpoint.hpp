#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "ptl/dynamics/ensemble.hpp"
#include "ptl/dynamics/progressive.hpp"

namespace ptl::dynamics {

// Progressive model:
//   {"version":1, "wiring_mode":"PTL", "source_column":{...}, "target_column":{...},
//    "lateral_weights":[...], "lateral_scales":[...], "normalizer":{...}, "source_normalizer":{...},
//    "lateral_frozen":false}
// Ensembles wrap member documents:
//   {"version":1, "kind":"ensemble", "members":[<mlp>...], "normalizer":{...}}
//   {"version":1, "kind":"progressive_ensemble", "members":[<progressive>...]}

std::string progressive_to_json(const ProgressiveModel& pm);
ProgressiveModel progressive_from_json(std::string_view text);

std::string ensemble_to_json(const DynamicsEnsemble& e);
std::string ensemble_to_json(const ProgressiveEnsemble& e);

using AnyModel = std::variant<DynamicsEnsemble, ProgressiveEnsemble>;

void save_model(const DynamicsEnsemble& e, const std::filesystem::path& path);
void save_model(const ProgressiveEnsemble& e, const std::filesystem::path& path);
AnyModel load_model(const std::filesystem::path& path);
DynamicsEnsemble load_ensemble(const std::filesystem::path& path);

/// Borrow the planner-facing interface of whichever alternative is held.
const DynamicsModel& as_model(const AnyModel& m);

}  // namespace ptl::dynamics

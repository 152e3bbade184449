#pragma once

#include "hotspot/model.hpp"

#include <string>

namespace hotspot {

// Versioned JSON snapshot of counts, grid, hyperparameters and vocabulary.
// Per-observation labels are not persisted; a loaded model predicts but
// cannot resume training. Integer counts round-trip losslessly.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

} // namespace hotspot

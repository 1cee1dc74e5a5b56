#pragma once

#include <string>

#include "qae3d/training.hpp"

namespace qae3d {

/// Self-contained SVG line chart of the training loss (and, when eval
/// rows exist, metric-vs-step series). Byte-deterministic for identical
/// input.
std::string render_training_svg(const TrainLog& log);

void write_training_svg(const TrainLog& log, const std::string& path);

}  // namespace qae3d

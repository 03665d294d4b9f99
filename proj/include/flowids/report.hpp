#pragma once

#include <ostream>
#include <string>

#include "flowids/cascade.hpp"
#include "flowids/config.hpp"
#include "flowids/dataset.hpp"

namespace flowids {

/// Percent with two decimals, e.g. "84.29".
std::string percent(double fraction);

/// Per-layer table (accuracy, FAR) followed by the overall row with
/// accuracy, FAR, precision, recall and F1.
void render_text(std::ostream& out, const EvalReport& report, const KeyValues& config);
void render_json(std::ostream& out, const EvalReport& report, const KeyValues& config);
void render_csv(std::ostream& out, const EvalReport& report);

void render_census(std::ostream& out, const Census& c);

}  // namespace flowids

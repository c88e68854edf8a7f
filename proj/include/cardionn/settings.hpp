#pragma once

// Flat key/value view of the network and training configuration, shared by
// the config-file reader and every exported report.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cardionn/mlp.hpp"
#include "cardionn/optimizers.hpp"

namespace cardionn {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

using Settings = std::vector<std::pair<std::string, std::string>>;

/// Every tunable in a stable order, values formatted for round-tripping.
Settings describe(const Topology& t, const TrainConfig& c);

/// Applies one setting. Returns false for an unknown key; throws
/// std::invalid_argument for a value that does not parse.
bool apply_setting(Topology& t, TrainConfig& c, std::string_view key, std::string_view value);

} // namespace cardionn

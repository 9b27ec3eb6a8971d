#pragma once

#include <string>

#include "core/distribution.hpp"

namespace beeid {

/// Loads {"alphabet_in": int, "alphabet_out": int, "rows": [[...], ...]} with
/// row-stochastic validation. Throws std::runtime_error with a reason.
ConditionalDistribution load_channel_json(const std::string& path);
ConditionalDistribution parse_channel_json(const std::string& text);
std::string channel_to_json(const ConditionalDistribution& w);

}  // namespace beeid

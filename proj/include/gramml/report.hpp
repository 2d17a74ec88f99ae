#pragma once

#include "gramml/evolution.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace gramml::harness {

nlohmann::ordered_json generation_stats_json(const evo::GenerationStats& stats);

/// Flat per-generation statistics table (one row per generation).
std::string generations_csv(const std::vector<evo::GenerationStats>& generations);

nlohmann::ordered_json test_metrics_json(const std::vector<int>& truth,
                                         const std::vector<int>& predicted,
                                         std::size_t n_classes);

} // namespace gramml::harness

#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazeaffect/feature_types.hpp"

namespace gazeaffect::stats {

/// Correlation families (participant level) and LME families (trial level), each
/// Bonferroni-adjusted within its family. Tests that cannot be computed are kept
/// with an "error" field and count toward the family size.
nlohmann::json build_stats_report(std::span<const FeatureRow> rows);

}  // namespace gazeaffect::stats

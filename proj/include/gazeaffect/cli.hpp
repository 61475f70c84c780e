#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace gazeaffect::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";
/// Environment variable naming a config file loaded before any --config.
inline constexpr const char* kConfigEnv = "GAZEAFFECT_CONFIG";

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsageError = 2;

/// Runs one subcommand. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// "< 0.001" below one thousandth, otherwise three decimals.
std::string format_p(double p);

/// Text tables for whatever of stats-report.json, metrics.json,
/// baseline-metrics.json and agreement.json is present in `dir`.
/// Throws MissingInput when none is.
std::string render_report(const std::filesystem::path& dir);

}  // namespace gazeaffect::cli

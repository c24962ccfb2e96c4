#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kickjt/bifurcation.hpp"
#include "kickjt/config.hpp"
#include "kickjt/csv.hpp"

namespace kickjt {

enum class Subcommand {
  CriticalCouplings,
  FixedPoints,
  Portrait,
  TrackPgs,
  TrackPes,
  HusimiSection,
  EntanglementCurves,
  DetectionProb,
};

std::optional<Subcommand> parse_subcommand(std::string_view name);
const char* to_string(Subcommand s);
const std::vector<Subcommand>& all_subcommands();

struct OutputFile {
  std::string name;  ///< file name inside the output directory
  CsvTable table;
};

struct ScenarioResult {
  std::vector<OutputFile> files;
  std::string summary;  ///< human-readable text for stdout
};

/// Runs one analysis in memory. Results depend only on the config, never on
/// the thread count.
ScenarioResult run_scenario(Subcommand cmd, const ScenarioConfig& cfg);

/// The stable fixed point off the origin with the largest q_x + q_y, if any.
std::optional<FixedPoint> bifurcated_fixed_point(const FixedPointSearch& search);

/// Writes every table (atomically) under dir, creating dir if needed.
void write_outputs(const ScenarioResult& result, const std::filesystem::path& dir);

struct DeviationReport {
  struct Entry {
    std::string file;
    std::string column;
    double max_relative = 0.0;
    std::size_t compared = 0;  ///< cells matched between both runs
  };
  std::vector<Entry> entries;
  double max_relative() const;
  std::string render() const;
};

/// Max relative deviation of every numeric column between two results of the
/// same scenario. Rows pair up by their first-column value (and order among
/// equal values); unmatched rows are skipped.
DeviationReport compare_results(const ScenarioResult& base, const ScenarioResult& other);

}  // namespace kickjt

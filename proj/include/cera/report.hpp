#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cera/codebook.hpp"
#include "cera/markov.hpp"
#include "cera/planner.hpp"
#include "cera/simulator.hpp"

namespace cera {

/**
 * Reads a codebook spec either inline or from a JSON file.
 *
 * Inline: comma-separated key=value pairs; a bare number continues the list
 * of the preceding key, so "L=2,m=2,2,mode=expanded" gives m = (2, 2). A
 * single m value is repeated over all L sub-frames. Keys: L, m, mode, M.
 * JSON: {"L": 2, "m": [2, 2], "mode": "expanded", "M": 2}.
 *
 * Throws InvalidSpec for bad values and ParseError for unreadable JSON.
 */
CodebookSpec parse_spec(std::string_view text);
CodebookSpec spec_from_json(const nlohmann::json& doc);
nlohmann::json spec_to_json(const CodebookSpec& spec);

/// Monte Carlo scenario document: {spec, N | N: [..], trials, master_seed}.
struct Scenario {
  CodebookSpec spec;
  std::vector<std::uint64_t> users;
  std::uint64_t trials;
  std::uint64_t master_seed;
};

Scenario parse_scenario(std::string_view json_text);
nlohmann::json scenario_to_json(const Scenario& scenario);

/// "A:B:step", "A:B" or "A".
std::vector<std::uint64_t> parse_grid(std::string_view text);
std::string describe_grid(std::span<const std::uint64_t> grid);

std::string format_fixed(double value, int decimals = 6);

std::string curve_csv(std::span<const CurvePoint> curve);
std::string simulation_csv(std::span<const std::pair<std::uint64_t, AggregateStats>> rows);
std::string schedule_csv(const ThresholdSchedule& schedule);

/// state_id, C_1..C_L, cardinality, initial (p/q), transitions ("to:count" pairs,
/// counts over A_e). State ids are 1-based.
std::string chain_dump_csv(const TransitionModel& model);

struct SvgSeries {
  std::string label;
  std::vector<CurvePoint> points;
};

struct SvgOptions {
  std::string title;
  std::string x_label = "N";
  std::string y_label = "efficiency";
  bool log_x = false;
};

std::string svg_plot(std::span<const SvgSeries> series, const SvgOptions& options);

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

struct RunManifest {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  std::optional<std::uint64_t> master_seed;
  std::vector<std::string> outputs;
  std::chrono::duration<double> wall_clock{};

  nlohmann::json to_json() const;
};

inline constexpr std::string_view kToolVersion = "1.0.0";

}  // namespace cera

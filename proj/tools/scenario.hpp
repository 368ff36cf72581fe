#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "artifacts.hpp"
#include "params.hpp"

namespace sigmoids::cli {

struct Scenario {
  Document doc;
  std::string name;
  std::string description;
  std::string operation;
  std::string output;  // directory, may be empty
  std::optional<std::uint64_t> seed;
};

[[nodiscard]] const std::vector<std::string>& operation_tags();
[[nodiscard]] bool operation_needs_seed(const std::string& tag);

// Validates the top-level fields and the operation tag.
[[nodiscard]] Scenario load_scenario(const Document& doc);
[[nodiscard]] Scenario load_scenario_file(const std::string& path);

// Runs the operation and returns its artifacts (summary.json last). Nothing is
// written to disk.
[[nodiscard]] std::vector<Artifact> execute(const Scenario& scenario, std::uint64_t seed);

struct CatalogEntry {
  std::string name;
  std::string description;
  std::string path;
};

// Bundled scenarios, sorted by name.
[[nodiscard]] std::vector<CatalogEntry> bundled_catalog(const std::string& dir);
[[nodiscard]] std::string default_scenario_dir();

// A path to an existing file, or the name of a bundled scenario.
[[nodiscard]] std::string resolve_scenario(const std::string& arg, const std::string& dir);

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  std::string scenario_dir = default_scenario_dir();
};

// Loads, executes and writes artifacts. Returns the process exit status;
// diagnostics go to `err`, one line per artifact to `out` unless quiet.
int run_scenario(const std::string& arg, const RunOptions& options, std::ostream& out,
                 std::ostream& err);

int list_scenarios(const std::string& dir, std::ostream& out, std::ostream& err);

}  // namespace sigmoids::cli

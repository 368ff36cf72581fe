#include "scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#ifndef SIGMOIDS_SCENARIO_DIR
#define SIGMOIDS_SCENARIO_DIR "scenarios"
#endif

namespace fs = std::filesystem;

namespace sigmoids::cli {

const std::vector<std::string>& operation_tags() {
  static const std::vector<std::string> tags{
      "curve-eval", "ode-integrate", "contagion",        "fit",         "error-surface",
      "bayes",      "replicate-known-k", "rolling-forecast", "sensitivity", "remedies"};
  return tags;
}

bool operation_needs_seed(const std::string& tag) {
  return tag != "curve-eval" && tag != "ode-integrate" && tag != "sensitivity";
}

Scenario load_scenario(const Document& doc) {
  Scenario s;
  s.doc = doc;
  if (s.doc.root.is_null() || (s.doc.root.is_object() && !s.doc.root.contains("operation"))) {
    throw ScenarioError(doc.source + ": missing operation tag");
  }
  const Block top(s.doc, s.doc.root, "");
  top.only({"name", "description", "operation", "seed", "output", "params"});
  s.operation = top.text("operation");
  const auto& tags = operation_tags();
  if (std::find(tags.begin(), tags.end(), s.operation) == tags.end()) {
    std::string valid;
    for (const auto& t : tags) valid += (valid.empty() ? "" : ", ") + t;
    top.fail("operation", "unknown operation tag '" + s.operation + "' (valid: " + valid + ")");
  }
  s.name = top.text("name", fs::path(doc.source).stem().string());
  s.description = top.text("description", "");
  s.output = top.text("output", "");
  if (top.has("seed")) s.seed = top.unsigned_integer("seed");
  return s;
}

Scenario load_scenario_file(const std::string& path) { return load_scenario(load_document(path)); }

std::string default_scenario_dir() { return SIGMOIDS_SCENARIO_DIR; }

std::vector<CatalogEntry> bundled_catalog(const std::string& dir) {
  std::vector<CatalogEntry> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension().string();
    if (!entry.is_regular_file() || (ext != ".yaml" && ext != ".json")) continue;
    const Scenario s = load_scenario_file(entry.path().string());
    out.push_back({s.name, s.description, entry.path().string()});
  }
  std::sort(out.begin(), out.end(),
            [](const CatalogEntry& a, const CatalogEntry& b) { return a.name < b.name; });
  return out;
}

std::string resolve_scenario(const std::string& arg, const std::string& dir) {
  if (fs::is_regular_file(arg)) return arg;
  for (const char* ext : {".yaml", ".json"}) {
    const fs::path p = fs::path(dir) / (arg + ext);
    if (fs::is_regular_file(p)) return p.string();
  }
  throw ScenarioError(arg + ": no such scenario file or bundled scenario (see 'list')");
}

int run_scenario(const std::string& arg, const RunOptions& options, std::ostream& out,
                 std::ostream& err) {
  try {
    const Scenario s = load_scenario_file(resolve_scenario(arg, options.scenario_dir));
    const std::optional<std::uint64_t> seed = options.seed ? options.seed : s.seed;
    if (!seed && operation_needs_seed(s.operation)) {
      throw ScenarioError(s.doc.source + ": operation '" + s.operation +
                          "' is randomized and needs an explicit seed (set 'seed' or pass --seed)");
    }
    const auto artifacts = execute(s, seed.value_or(0));

    const fs::path dir = options.out_dir ? fs::path(*options.out_dir)
                         : !s.output.empty() ? fs::path(s.output)
                                             : fs::path("out") / s.name;
    fs::create_directories(dir);
    for (const auto& a : artifacts) {
      const fs::path p = dir / a.file;
      std::ofstream f(p, std::ios::binary | std::ios::trunc);
      f << a.content;
      if (!f) throw ScenarioError("cannot write " + p.string());
      if (!options.quiet) out << p.string() << ": " << a.summary << "\n";
    }
    return 0;
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int list_scenarios(const std::string& dir, std::ostream& out, std::ostream& err) {
  try {
    const auto catalog = bundled_catalog(dir);
    std::size_t width = 0;
    for (const auto& c : catalog) width = std::max(width, c.name.size());
    for (const auto& c : catalog) {
      out << c.name << std::string(width - c.name.size() + 2, ' ') << c.description << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sigmoids::cli

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace sigmoids::cli {

using nlohmann::json;

// Raised for anything wrong with a scenario file; the message names the file,
// line (when known) and field.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parsed scenario file: a JSON tree plus the source line of every field.
struct Document {
  std::string source;  // file name for messages
  json root;
  std::map<std::string, int> lines;  // dotted field path -> 1-based line
};

// YAML (the documented format) or JSON, chosen by content: a file whose first
// non-blank character is '{' is read as JSON.
[[nodiscard]] Document parse_document(const std::string& text, const std::string& source);
[[nodiscard]] Document load_document(const std::string& path);

/// Typed view onto one mapping of a Document. Every accessor reports the
/// dotted field path and line on failure.
class Block {
 public:
  Block(const Document& doc, const json& node, std::string path);

  [[nodiscard]] const std::string& path() const noexcept { return path_; }
  [[nodiscard]] bool has(const std::string& key) const;

  [[nodiscard]] double number(const std::string& key) const;
  [[nodiscard]] double number(const std::string& key, double fallback) const;
  [[nodiscard]] std::int64_t integer(const std::string& key) const;
  [[nodiscard]] std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  [[nodiscard]] std::uint64_t unsigned_integer(const std::string& key) const;
  [[nodiscard]] std::string text(const std::string& key) const;
  [[nodiscard]] std::string text(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] bool flag(const std::string& key, bool fallback) const;
  [[nodiscard]] std::optional<double> optional_number(const std::string& key) const;

  [[nodiscard]] std::vector<double> numbers(const std::string& key) const;
  [[nodiscard]] std::vector<std::string> texts(const std::string& key) const;

  [[nodiscard]] Block sub(const std::string& key) const;
  [[nodiscard]] std::vector<Block> list(const std::string& key) const;

  // Either an explicit list or {start, stop, step} / {start, stop, count}.
  [[nodiscard]] std::vector<double> grid(const std::string& key) const;

  // Rejects keys outside `allowed`, naming the first stray one.
  void only(std::initializer_list<const char*> allowed) const;

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  [[nodiscard]] const json& at(const std::string& key) const;
  [[nodiscard]] std::string where(const std::string& key) const;

  const Document* doc_;
  const json* node_;
  std::string path_;
};

}  // namespace sigmoids::cli

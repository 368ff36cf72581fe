#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

namespace sigmoids::cli {

using ojson = nlohmann::ordered_json;

// Shortest round-trip form; "nan", "inf", "-inf" for non-finite values.
[[nodiscard]] std::string format_number(double v);

// Comma-separated, header row, LF line endings.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);

  Csv& row(const std::vector<double>& values);
  // Cells already formatted (mixed text and numbers).
  Csv& cells(const std::vector<std::string>& values);

  [[nodiscard]] std::string str() const { return text_; }
  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

struct Artifact {
  std::string file;     // relative to the output directory
  std::string content;
  std::string summary;  // one line for the console
};

class Artifacts {
 public:
  void add_csv(const std::string& file, const Csv& csv, const std::string& what);
  void add_json(const std::string& file, const ojson& doc, const std::string& what);

  [[nodiscard]] const std::vector<Artifact>& items() const noexcept { return items_; }

 private:
  std::vector<Artifact> items_;
};

// Pretty JSON with a trailing newline.
[[nodiscard]] std::string dump_json(const ojson& doc);

// Non-finite numbers become null in JSON; keep that explicit.
[[nodiscard]] ojson number_or_null(double v);

// Independent stream for a sub-task of a seeded scenario.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace sigmoids::cli

#include "artifacts.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace sigmoids::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) {
  cells(header);
  rows_ = 0;
}

Csv& Csv::row(const std::vector<double>& values) {
  std::vector<std::string> c;
  c.reserve(values.size());
  for (const double v : values) c.push_back(format_number(v));
  return cells(c);
}

Csv& Csv::cells(const std::vector<std::string>& values) {
  if (values.size() != columns_) throw std::logic_error("Csv: row width does not match header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += values[i];
  }
  text_ += '\n';
  ++rows_;
  return *this;
}

std::string dump_json(const ojson& doc) { return doc.dump(2) + "\n"; }

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

void Artifacts::add_csv(const std::string& file, const Csv& csv, const std::string& what) {
  items_.push_back({file, csv.str(), what + " (" + std::to_string(csv.rows()) + " rows)"});
}

void Artifacts::add_json(const std::string& file, const ojson& doc, const std::string& what) {
  items_.push_back({file, dump_json(doc), what});
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 of the combined value.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace sigmoids::cli

#include "params.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace sigmoids::cli {

namespace {

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

json scalar_value(const YAML::Node& n) {
  const std::string& s = n.Scalar();
  if (n.Tag() == "!") return s;  // quoted
  if (s == "true" || s == "True") return true;
  if (s == "false" || s == "False") return false;
  if (s.empty() || s == "~" || s == "null") return nullptr;
  std::int64_t i = 0;
  const auto [pi, ei] = std::from_chars(s.data(), s.data() + s.size(), i);
  if (ei == std::errc() && pi == s.data() + s.size()) return i;
  double d = 0.0;
  const auto [pd, ed] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ed == std::errc() && pd == s.data() + s.size()) return d;
  return s;
}

json convert(const YAML::Node& n, const std::string& path, std::map<std::string, int>& lines) {
  if (!path.empty()) lines.emplace(path, n.Mark().line + 1);
  switch (n.Type()) {
    case YAML::NodeType::Map: {
      json obj = json::object();
      for (const auto& kv : n) {
        const std::string key = kv.first.Scalar();
        const std::string child = join_path(path, key);
        lines[child] = kv.first.Mark().line + 1;
        obj[key] = convert(kv.second, child, lines);
        lines[child] = kv.first.Mark().line + 1;
      }
      return obj;
    }
    case YAML::NodeType::Sequence: {
      json arr = json::array();
      std::size_t i = 0;
      for (const auto& item : n) {
        arr.push_back(convert(item, path + "[" + std::to_string(i) + "]", lines));
        ++i;
      }
      return arr;
    }
    case YAML::NodeType::Scalar:
      return scalar_value(n);
    default:
      return nullptr;
  }
}

std::string describe(const json& j) {
  if (j.is_null()) return "null";
  if (j.is_boolean()) return "a boolean";
  if (j.is_number()) return "a number";
  if (j.is_string()) return "text";
  if (j.is_array()) return "a list";
  return "a mapping";
}

}  // namespace

Document parse_document(const std::string& text, const std::string& source) {
  Document doc;
  doc.source = source;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      doc.root = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ScenarioError(source + ": JSON parse error: " + e.what());
    }
    return doc;
  }
  try {
    const YAML::Node node = YAML::Load(text);
    doc.root = convert(node, "", doc.lines);
  } catch (const YAML::Exception& e) {
    std::ostringstream os;
    os << source << ":" << e.mark.line + 1 << ": parse error: " << e.msg;
    throw ScenarioError(os.str());
  }
  return doc;
}

Document load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str(), path);
}

Block::Block(const Document& doc, const json& node, std::string path)
    : doc_(&doc), node_(&node), path_(std::move(path)) {
  if (!node.is_object()) {
    const auto it = doc.lines.find(path_);
    std::string loc = doc.source;
    if (it != doc.lines.end()) loc += ":" + std::to_string(it->second);
    throw ScenarioError(loc + ": field '" + (path_.empty() ? "<root>" : path_) +
                        "': expected a mapping, found " + describe(node));
  }
}

std::string Block::where(const std::string& key) const {
  const std::string full = key.empty() ? path_ : join_path(path_, key);
  std::string loc = doc_->source;
  auto it = doc_->lines.find(full);
  if (it == doc_->lines.end()) it = doc_->lines.find(path_);
  if (it != doc_->lines.end()) loc += ":" + std::to_string(it->second);
  return loc + ": field '" + full + "'";
}

void Block::fail(const std::string& key, const std::string& message) const {
  throw ScenarioError(where(key) + ": " + message);
}

bool Block::has(const std::string& key) const {
  return node_->contains(key) && !(*node_)[key].is_null();
}

const json& Block::at(const std::string& key) const {
  if (!has(key)) fail(key, "missing");
  return (*node_)[key];
}

double Block::number(const std::string& key) const {
  const json& j = at(key);
  if (!j.is_number()) fail(key, "expected a number, found " + describe(j));
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(key, "must be finite");
  return v;
}

double Block::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::optional<double> Block::optional_number(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

std::int64_t Block::integer(const std::string& key) const {
  const json& j = at(key);
  if (!j.is_number_integer()) fail(key, "expected an integer, found " + describe(j));
  return j.get<std::int64_t>();
}

std::int64_t Block::integer(const std::string& key, std::int64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::uint64_t Block::unsigned_integer(const std::string& key) const {
  const json& j = at(key);
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  // Large values that did not fit a signed integer arrive as text from YAML.
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size()) return v;
  }
  fail(key, "expected a non-negative integer, found " + describe(j));
}

std::string Block::text(const std::string& key) const {
  const json& j = at(key);
  if (!j.is_string()) fail(key, "expected text, found " + describe(j));
  return j.get<std::string>();
}

std::string Block::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

bool Block::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const json& j = at(key);
  if (!j.is_boolean()) fail(key, "expected true or false, found " + describe(j));
  return j.get<bool>();
}

std::vector<double> Block::numbers(const std::string& key) const {
  const json& j = at(key);
  if (!j.is_array()) fail(key, "expected a list of numbers, found " + describe(j));
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(key, "item " + std::to_string(i) + " is not a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

std::vector<std::string> Block::texts(const std::string& key) const {
  const json& j = at(key);
  if (!j.is_array()) fail(key, "expected a list of names, found " + describe(j));
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) fail(key, "item " + std::to_string(i) + " is not text");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

Block Block::sub(const std::string& key) const {
  const json& j = at(key);
  if (!j.is_object()) fail(key, "expected a mapping, found " + describe(j));
  return Block(*doc_, j, join_path(path_, key));
}

std::vector<Block> Block::list(const std::string& key) const {
  const json& j = at(key);
  if (!j.is_array()) fail(key, "expected a list, found " + describe(j));
  std::vector<Block> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = join_path(path_, key) + "[" + std::to_string(i) + "]";
    if (!j[i].is_object()) fail(key, "item " + std::to_string(i) + " is not a mapping");
    out.emplace_back(*doc_, j[i], p);
  }
  return out;
}

std::vector<double> Block::grid(const std::string& key) const {
  const json& j = at(key);
  if (j.is_array()) return numbers(key);
  if (!j.is_object()) fail(key, "expected a list or {start, stop, step|count}");
  const Block g = sub(key);
  g.only({"start", "stop", "step", "count"});
  const double a = g.number("start"), b = g.number("stop");
  if (!(b >= a)) g.fail("stop", "must not be below start");
  if (g.has("count") == g.has("step")) fail(key, "give exactly one of step or count");
  std::vector<double> out;
  if (g.has("count")) {
    const auto n = g.integer("count");
    if (n < 1) g.fail("count", "must be positive");
    if (n == 1) return {a};
    for (std::int64_t i = 0; i < n; ++i) out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.back() = b;
    return out;
  }
  const double h = g.number("step");
  if (!(h > 0.0)) g.fail("step", "must be positive");
  const auto n = static_cast<std::int64_t>(std::floor((b - a) / h + 1e-9));
  if (n > 10'000'000) g.fail("step", "grid too large");
  for (std::int64_t i = 0; i <= n; ++i) out.push_back(a + h * static_cast<double>(i));
  return out;
}

void Block::only(std::initializer_list<const char*> allowed) const {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : node_->items()) {
    if (!ok.count(key)) {
      std::string valid;
      for (const auto& a : ok) valid += (valid.empty() ? "" : ", ") + a;
      fail(key, "unknown field (valid here: " + valid + ")");
    }
  }
}

}  // namespace sigmoids::cli

#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "resultlab/errors.hpp"
#include "resultlab/params.hpp"

namespace resultlab {

using Value = std::variant<int64_t, double, bool, std::string>;

inline std::string value_to_string(const Value& v) {
  if (std::holds_alternative<int64_t>(v)) {
    char buf[24];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), std::get<int64_t>(v));
    return std::string(buf, p);
  }
  if (std::holds_alternative<double>(v)) {
    double d = std::get<double>(v);
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    if (std::isnan(d)) return "nan";
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    return std::string(buf, p);
  }
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "1" : "0";
  return std::get<std::string>(v);
}

struct Row {
  std::vector<std::pair<std::string, Value>> cols;

  void set(const std::string& name, Value v) { cols.emplace_back(name, std::move(v)); }
  void set(const std::string& name, int v) { set(name, Value(static_cast<int64_t>(v))); }
  void set(const std::string& name, int64_t v) { set(name, Value(v)); }
  void set(const std::string& name, uint64_t v) { set(name, Value(static_cast<int64_t>(v))); }
  void set(const std::string& name, double v) { set(name, Value(v)); }
  void set(const std::string& name, bool v) { set(name, Value(v)); }
  void set(const std::string& name, const char* v) { set(name, Value(std::string(v))); }
  void set(const std::string& name, const std::string& v) { set(name, Value(v)); }

  const Value* find(const std::string& name) const {
    for (const auto& [k, v] : cols)
      if (k == name) return &v;
    return nullptr;
  }
};

struct Report {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> config_echo;  // key -> value, ordered
  uint64_t seed = 0;
  int64_t trials = 1;
  std::vector<Row> rows;
  std::vector<std::pair<std::string, bool>> pass_flags;
  double wall_time_seconds = 0.0;  // informational; excluded from serialization

  void flag(const std::string& name, bool ok) { pass_flags.emplace_back(name, ok); }

  bool all_pass() const {
    for (const auto& [k, ok] : pass_flags)
      if (!ok) return false;
    return true;
  }

  // CSV dialect: comma separator, '.' decimal point, header row, LF endings.
  // Header is the union of row columns in first-appearance order. Serialized
  // bytes are a pure function of the run's config (wall time is excluded).
  std::string to_csv() const {
    std::vector<std::string> header;
    auto col_index = [&](const std::string& name) -> size_t {
      for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
      header.push_back(name);
      return header.size() - 1;
    };
    for (const auto& row : rows)
      for (const auto& [k, v] : row.cols) col_index(k);
    std::string out;
    for (size_t i = 0; i < header.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(header[i]);
    }
    out += '\n';
    for (const auto& row : rows) {
      std::vector<std::string> cells(header.size());
      for (const auto& [k, v] : row.cols) cells[col_index(k)] = csv_escape(value_to_string(v));
      for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    }
    return out;
  }

  std::string to_json() const {
    nlohmann::ordered_json j;
    j["experiment"] = experiment;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config_echo) cfg[k] = v;
    j["parameters"] = cfg;
    j["seed"] = seed;
    j["trials"] = trials;
    nlohmann::ordered_json jrows = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      nlohmann::ordered_json jr = nlohmann::ordered_json::object();
      for (const auto& [k, v] : row.cols) {
        if (std::holds_alternative<int64_t>(v))
          jr[k] = std::get<int64_t>(v);
        else if (std::holds_alternative<double>(v)) {
          double d = std::get<double>(v);
          if (std::isfinite(d))
            jr[k] = d;
          else
            jr[k] = value_to_string(v);
        } else if (std::holds_alternative<bool>(v))
          jr[k] = std::get<bool>(v);
        else
          jr[k] = std::get<std::string>(v);
      }
      jrows.push_back(std::move(jr));
    }
    j["rows"] = std::move(jrows);
    nlohmann::ordered_json flags = nlohmann::ordered_json::object();
    for (const auto& [k, ok] : pass_flags) flags[k] = ok;
    j["pass_flags"] = std::move(flags);
    return j.dump(2) + "\n";
  }

 private:
  static std::string csv_escape(const std::string& s) {
    bool needs = s.find_first_of(",\"\n") != std::string::npos;
    if (!needs) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
    return out;
  }
};

}  // namespace resultlab

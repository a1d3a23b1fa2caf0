#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "resultlab/errors.hpp"

namespace resultlab {

// Flat key -> scalar/string map. Keys are consumed by the experiment that
// reads them; leftovers are reported so typos fail loudly.
class Params {
 public:
  Params() = default;

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  int64_t get_int(const std::string& key, int64_t def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    consumed_.insert(key);
    const std::string& s = it->second;
    int64_t out = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || p != s.data() + s.size()) {
      // allow 1e6-style integers
      double d = parse_double(key, s);
      out = static_cast<int64_t>(d);
      if (static_cast<double>(out) != d) fail("bad parameter: " + key);
    }
    return out;
  }

  double get_double(const std::string& key, double def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    consumed_.insert(key);
    return parse_double(key, it->second);
  }

  bool get_bool(const std::string& key, bool def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    consumed_.insert(key);
    const std::string& s = it->second;
    if (s == "1" || s == "true" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "no") return false;
    fail("bad parameter: " + key);
  }

  std::string get_str(const std::string& key, const std::string& def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    consumed_.insert(key);
    return it->second;
  }

  std::vector<double> get_double_list(const std::string& key, std::vector<double> def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    consumed_.insert(key);
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_double(key, tok));
    if (out.empty()) fail("bad parameter: " + key);
    return out;
  }

  std::vector<int64_t> get_int_list(const std::string& key, std::vector<int64_t> def) const {
    std::vector<double> d;
    for (int64_t v : def) d.push_back(static_cast<double>(v));
    auto got = get_double_list(key, d);
    std::vector<int64_t> out;
    for (double v : got) {
      auto i = static_cast<int64_t>(v);
      if (static_cast<double>(i) != v) fail("bad parameter: " + key);
      out.push_back(i);
    }
    return out;
  }

  std::vector<std::string> unconsumed() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : kv_)
      if (!consumed_.count(k)) out.push_back(k);
    return out;
  }

  const std::map<std::string, std::string>& items() const { return kv_; }

 private:
  static double parse_double(const std::string& key, const std::string& s) {
    if (s.empty()) fail("bad parameter: " + key);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) fail("bad parameter: " + key);
    return v;
  }

  std::map<std::string, std::string> kv_;
  mutable std::set<std::string> consumed_;
};

}  // namespace resultlab

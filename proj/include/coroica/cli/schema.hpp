// Strict reading of JSON config documents: every key must be consumed,
// every value is type- and range-checked, and errors name the field path.
#pragma once

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace coroica::cli {

using Json = nlohmann::json;

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::invalid_argument("config error at '" + (field.empty() ? std::string("/") : field) + "': " + what),
        field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(source + ": " + e.what());
  }
}

/// View onto one JSON object. Tracks which keys were read; `finish()`
/// rejects anything left over.
class Node {
 public:
  Node(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return j_->contains(key); }
  std::string field(const std::string& key) const { return path_ + "/" + key; }

  Node object(const std::string& key) {
    used_.insert(key);
    if (!has(key)) throw ConfigError(field(key), "missing required object");
    return Node(j_->at(key), field(key));
  }

  std::optional<Node> optional_object(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return object(key);
  }

  const Json& raw(const std::string& key) {
    used_.insert(key);
    if (!has(key)) throw ConfigError(field(key), "missing required field");
    return j_->at(key);
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const Json& v = raw(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::string choice(const std::string& key, const std::vector<std::string>& allowed,
                     std::optional<std::string> fallback = std::nullopt) {
    const std::string v = string(key, fallback);
    for (const auto& a : allowed)
      if (a == v) return v;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ConfigError(field(key), "'" + v + "' is not one of {" + list + "}");
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt,
                std::optional<double> min = std::nullopt, std::optional<double> max = std::nullopt) {
    double v = 0.0;
    if (!has(key)) {
      v = require(key, fallback);
    } else {
      const Json& j = raw(key);
      if (!j.is_number()) throw ConfigError(field(key), "expected a number");
      v = j.get<double>();
    }
    check_range(key, v, min, max);
    return v;
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt,
                       std::optional<std::int64_t> min = std::nullopt,
                       std::optional<std::int64_t> max = std::nullopt) {
    std::int64_t v = 0;
    if (!has(key)) {
      v = require(key, fallback);
    } else {
      v = as_integer(raw(key), field(key));
    }
    if (min && v < *min) throw ConfigError(field(key), "must be >= " + std::to_string(*min));
    if (max && v > *max) throw ConfigError(field(key), "must be <= " + std::to_string(*max));
    return v;
  }

  std::uint64_t unsigned_integer(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const Json& j = raw(key);
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
      throw ConfigError(field(key), "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, std::optional<bool> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const Json& j = raw(key);
    if (!j.is_boolean()) throw ConfigError(field(key), "expected true or false");
    return j.get<bool>();
  }

  /// Accepts a scalar or a list; always returns a list.
  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt,
                              std::optional<double> min = std::nullopt, std::optional<double> max = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const Json& j = raw(key);
    std::vector<double> out;
    auto take = [&](const Json& e, const std::string& where) {
      if (!e.is_number()) throw ConfigError(where, "expected a number");
      const double v = e.get<double>();
      if (min && v < *min) throw ConfigError(where, "must be >= " + fmt(*min));
      if (max && v > *max) throw ConfigError(where, "must be <= " + fmt(*max));
      out.push_back(v);
    };
    if (j.is_array()) {
      if (j.empty()) throw ConfigError(field(key), "list must not be empty");
      for (std::size_t i = 0; i < j.size(); ++i) take(j[i], field(key) + "/" + std::to_string(i));
    } else {
      take(j, field(key));
    }
    return out;
  }

  std::vector<std::int64_t> integers(const std::string& key,
                                     std::optional<std::vector<std::int64_t>> fallback = std::nullopt,
                                     std::optional<std::int64_t> min = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const Json& j = raw(key);
    std::vector<std::int64_t> out;
    auto take = [&](const Json& e, const std::string& where) {
      const auto v = as_integer(e, where);
      if (min && v < *min) throw ConfigError(where, "must be >= " + std::to_string(*min));
      out.push_back(v);
    };
    if (j.is_array()) {
      if (j.empty()) throw ConfigError(field(key), "list must not be empty");
      for (std::size_t i = 0; i < j.size(); ++i) take(j[i], field(key) + "/" + std::to_string(i));
    } else {
      take(j, field(key));
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key,
                                   std::optional<std::vector<std::string>> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const Json& j = raw(key);
    std::vector<std::string> out;
    auto take = [&](const Json& e, const std::string& where) {
      if (!e.is_string()) throw ConfigError(where, "expected a string");
      out.push_back(e.get<std::string>());
    };
    if (j.is_array()) {
      if (j.empty()) throw ConfigError(field(key), "list must not be empty");
      for (std::size_t i = 0; i < j.size(); ++i) take(j[i], field(key) + "/" + std::to_string(i));
    } else {
      take(j, field(key));
    }
    return out;
  }

  /// List of objects; each element is handed to `fn(Node&)`.
  template <class Fn>
  void each_object(const std::string& key, Fn&& fn) {
    const Json& j = raw(key);
    if (!j.is_array()) throw ConfigError(field(key), "expected a list of objects");
    if (j.empty()) throw ConfigError(field(key), "list must not be empty");
    for (std::size_t i = 0; i < j.size(); ++i) {
      Node child(j[i], field(key) + "/" + std::to_string(i));
      fn(child);
      child.finish();
    }
  }

  void finish() const {
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }
  }

 private:
  template <class T>
  T require(const std::string& key, const std::optional<T>& fallback) {
    used_.insert(key);
    if (!fallback) throw ConfigError(field(key), "missing required field");
    return *fallback;
  }

  static std::string fmt(double v) {
    std::string s = std::to_string(v);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  void check_range(const std::string& key, double v, std::optional<double> min, std::optional<double> max) const {
    if (!std::isfinite(v)) throw ConfigError(field(key), "must be finite");
    if (min && v < *min) throw ConfigError(field(key), "must be >= " + fmt(*min));
    if (max && v > *max) throw ConfigError(field(key), "must be <= " + fmt(*max));
  }

  static std::int64_t as_integer(const Json& j, const std::string& where) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) {
      const double v = j.get<double>();
      if (std::floor(v) == v && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
    }
    throw ConfigError(where, "expected an integer");
  }

  const Json* j_;
  std::string path_;
  std::set<std::string> used_;
};

}  // namespace coroica::cli

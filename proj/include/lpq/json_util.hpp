#pragma once

// Strict JSON object reading: every key is optional unless required, values
// are type-checked, and keys never consumed are rejected by finish().

#include <set>
#include <string>

#include "json.hpp"
#include "lpq/error.hpp"

namespace lpq {

using Json = nlohmann::ordered_json;

class JsonObject {
 public:
  JsonObject(const Json& j, std::string path);

  bool has(const std::string& key) const { return j_->contains(key); }
  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  template <class T>
  bool get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_->contains(key)) return false;
    try {
      out = (*j_)[key].template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("invalid value for " + key_path(key));
    }
    return true;
  }

  template <class T>
  void require(const std::string& key, T& out) {
    if (!get(key, out)) throw ConfigError("missing key: " + key_path(key));
  }

  // Sub-object; an absent key yields an empty object.
  JsonObject child(const std::string& key);

  const Json& raw(const std::string& key) {
    seen_.insert(key);
    return (*j_)[key];
  }

  void finish() const;

 private:
  static const Json& empty();
  const Json* j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace lpq

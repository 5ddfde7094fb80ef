#include "lpq/json_util.hpp"

namespace lpq {

const Json& JsonObject::empty() {
  static const Json e = Json::object();
  return e;
}

JsonObject::JsonObject(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {
  if (!j.is_object()) throw ConfigError("expected an object at " + (path_.empty() ? "<root>" : path_));
}

JsonObject JsonObject::child(const std::string& key) {
  seen_.insert(key);
  if (!j_->contains(key)) return JsonObject(empty(), key_path(key));
  return JsonObject((*j_)[key], key_path(key));
}

void JsonObject::finish() const {
  for (const auto& [k, v] : j_->items())
    if (!seen_.contains(k)) throw ConfigError("unknown key: " + key_path(k));
}

}  // namespace lpq

#include "wyckoff/checkpoint.hpp"

#include <cmath>
#include <string>

#include "json.hpp"
#include "wyckoff/errors.hpp"
#include "wyckoff/text_io.hpp"

namespace wyckoff::nn {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_checkpoint(const LstmModel& m, Phase phase) {
  validate_shapes(m);
  ordered_json doc;
  doc["format_version"] = kCheckpointVersion;
  doc["phase"] = std::string(to_string(phase));
  doc["n_features"] = m.n_features;
  doc["hidden"] = m.hidden;
  doc["time_steps"] = m.time_steps;
  ordered_json tensor_obj = ordered_json::object();
  for (const auto& t : tensors(m)) {
    tensor_obj[std::string(t.name)] = std::vector<double>(t.data.begin(), t.data.end());
  }
  doc["tensors"] = std::move(tensor_obj);
  // nlohmann emits the shortest decimal form that round-trips (<= 17 digits).
  return doc.dump(1) + "\n";
}

namespace {

std::size_t positive_field(const json& doc, const char* key) {
  if (!doc.contains(key)) throw DataError(std::string("checkpoint: missing field '") + key + "'");
  const auto& v = doc.at(key);
  if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) {
    throw DataError(std::string("checkpoint: field '") + key + "' must be a positive integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

Checkpoint parse_checkpoint(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw NumeralError(std::string("checkpoint: malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("checkpoint: top level must be an object");

  if (!doc.contains("format_version") || !doc["format_version"].is_number_integer()) {
    throw VersionError("checkpoint: missing or non-integer format_version");
  }
  const auto version = doc["format_version"].get<long long>();
  if (version != kCheckpointVersion) {
    throw VersionError("checkpoint: unsupported format_version " + std::to_string(version) +
                       " (expected " + std::to_string(kCheckpointVersion) + ")");
  }

  Checkpoint out;
  if (!doc.contains("phase") || !doc["phase"].is_string()) {
    throw DataError("checkpoint: missing phase");
  }
  try {
    out.phase = parse_phase(doc["phase"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }

  const std::size_t n_features = positive_field(doc, "n_features");
  const std::size_t hidden = positive_field(doc, "hidden");
  const std::size_t time_steps = doc.contains("time_steps") ? positive_field(doc, "time_steps") : 1;

  if (!doc.contains("tensors") || !doc["tensors"].is_object()) {
    throw DataError("checkpoint: missing tensors object");
  }
  const auto& tensor_obj = doc["tensors"];

  LstmModel m = LstmModel::zeros(n_features, hidden, time_steps);
  for (auto& t : tensors(m)) {
    const std::string name(t.name);
    if (!tensor_obj.contains(name)) throw ShapeError("checkpoint: missing tensor " + name);
    const auto& arr = tensor_obj[name];
    if (!arr.is_array()) throw ShapeError("checkpoint: tensor " + name + " is not an array");
    if (arr.size() != t.data.size()) {
      throw ShapeError("checkpoint: tensor " + name + " has " + std::to_string(arr.size()) +
                       " entries, expected " + std::to_string(t.data.size()) + " (" +
                       std::to_string(t.rows) + "x" + std::to_string(t.cols) + ")");
    }
    for (std::size_t j = 0; j < arr.size(); ++j) {
      if (!arr[j].is_number()) {
        throw NumeralError("checkpoint: tensor " + name + " entry " + std::to_string(j) +
                           " is not a number");
      }
      const double v = arr[j].get<double>();
      if (!std::isfinite(v)) {
        throw NumeralError("checkpoint: tensor " + name + " entry " + std::to_string(j) +
                           " is not finite");
      }
      t.data[j] = v;
    }
  }
  for (const auto& [key, _] : tensor_obj.items()) {
    bool known = false;
    for (const auto& t : tensors(m)) known = known || t.name == key;
    if (!known) throw ShapeError("checkpoint: unknown tensor " + key);
  }
  out.model = std::move(m);
  return out;
}

void save_model(const LstmModel& m, Phase phase, const std::filesystem::path& path) {
  text::write_file(path, format_checkpoint(m, phase));
}

Checkpoint load_model(const std::filesystem::path& path) {
  return parse_checkpoint(text::read_file(path));
}

}  // namespace wyckoff::nn

#include "seg/nn/checkpoint.hpp"

#include <istream>
#include <ostream>

#include "seg/error.hpp"

namespace seg::nn {

using nlohmann::json;

json checkpoint_to_json(const ParamStore& params, const json& config) {
  json doc;
  doc["format"] = "seg-checkpoint";
  doc["version"] = kCheckpointVersion;
  doc["config"] = config;
  doc["step"] = params.step();
  json list = json::array();
  for (const auto& p : params) {
    list.push_back({{"name", p.name},
                    {"shape", {p.value.rows(), p.value.cols()}},
                    {"values", p.value.data()}});
  }
  doc["params"] = std::move(list);
  return doc;
}

Checkpoint checkpoint_from_json(const json& doc) {
  try {
    if (doc.value("format", "") != "seg-checkpoint") throw FormatError("not a seg checkpoint");
    if (doc.at("version").get<int>() != kCheckpointVersion) {
      throw FormatError("unsupported checkpoint version " + doc.at("version").dump());
    }
    Checkpoint ck;
    ck.config = doc.value("config", json::object());
    for (const auto& p : doc.at("params")) {
      const auto name = p.at("name").get<std::string>();
      const auto rows = p.at("shape").at(0).get<std::size_t>();
      const auto cols = p.at("shape").at(1).get<std::size_t>();
      auto values = p.at("values").get<std::vector<double>>();
      if (values.size() != rows * cols) {
        throw FormatError("parameter '" + name + "' has " + std::to_string(values.size()) +
                          " values for shape " + std::to_string(rows) + "x" + std::to_string(cols));
      }
      const auto idx = ck.params.add(name, rows, cols);
      ck.params[idx].value = Tensor(rows, cols, std::move(values));
    }
    ck.params.set_step(doc.value("step", std::uint64_t{0}));
    return ck;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(std::ostream& out, const ParamStore& params, const json& config) {
  out << checkpoint_to_json(params, config).dump(1) << '\n';
  if (!out) throw IoError("failed to write checkpoint");
}

Checkpoint load_checkpoint(std::istream& in) {
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  return checkpoint_from_json(doc);
}

}  // namespace seg::nn

#pragma once

#include <iosfwd>

#include "json.hpp"
#include "seg/nn/params.hpp"

namespace seg::nn {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ParamStore params;
  /// Config echo of the run that produced the parameters.
  nlohmann::json config;
};

/// {"format": "seg-checkpoint", "version": 1, "config": ..., "step": ...,
///  "params": [{"name", "shape": [r, c], "values": [...]}, ...]}.
/// Values are written in shortest round-trip form, so loading reproduces
/// every double bit for bit.
nlohmann::json checkpoint_to_json(const ParamStore& params, const nlohmann::json& config);
Checkpoint checkpoint_from_json(const nlohmann::json& doc);

void save_checkpoint(std::ostream& out, const ParamStore& params, const nlohmann::json& config);
/// Throws FormatError on a malformed or foreign document.
Checkpoint load_checkpoint(std::istream& in);

}  // namespace seg::nn

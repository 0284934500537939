// Copyright henn contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <json.hpp>

namespace henn {

// Accuracy and cost summary of one evaluation run.
struct EvalReport {
  double max_abs_error = 0.0;
  double mse = 0.0;
  long levels_consumed = 0;
  long ct_mults = 0;
  long scalar_mults = 0;
  long bootstraps = 0;
  double wall_time_seconds = 0.0;
  std::string method;           // "nn", "fourier", ...
  nlohmann::json config = nlohmann::json::object();

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["max_abs_error"] = max_abs_error;
    j["mse"] = mse;
    j["levels_consumed"] = levels_consumed;
    j["ct_mults"] = ct_mults;
    j["scalar_mults"] = scalar_mults;
    j["bootstraps"] = bootstraps;
    j["wall_time_seconds"] = wall_time_seconds;
    j["method"] = method;
    j["config"] = config;
    return j;
  }

  static EvalReport from_json(const nlohmann::json& j) {
    EvalReport r;
    r.max_abs_error = j.at("max_abs_error").get<double>();
    r.mse = j.at("mse").get<double>();
    r.levels_consumed = j.at("levels_consumed").get<long>();
    r.ct_mults = j.at("ct_mults").get<long>();
    r.scalar_mults = j.at("scalar_mults").get<long>();
    r.bootstraps = j.at("bootstraps").get<long>();
    r.wall_time_seconds = j.value("wall_time_seconds", 0.0);
    r.method = j.value("method", "");
    r.config = j.value("config", nlohmann::json::object());
    return r;
  }
};

}  // namespace henn

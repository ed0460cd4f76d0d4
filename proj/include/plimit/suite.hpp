#pragma once

// The acceptance suite: eight numbered criteria, each made of measured
// parts with thresholds.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "plimit/penergy.hpp"

namespace plimit {

struct SuiteConfig {
  std::uint64_t seed = 20240917;
  int property_cases = 100;

  double ex1_tau = 1e-3, ex1_T = 2.0;
  double ex2_u0_0 = 0.3, ex2_u0_1 = 0.0, ex2_tau = 1e-3, ex2_T = 3.0;
  double ex3_h = 0.05, ex3_tau = 1e-2, ex3_T = 3.0, ex3_uniform_tol = 1e-6;

  std::vector<double> sweep_p{4, 8, 16, 32};
  double sweep_tau = 1e-3, sweep_T = 2.0;
  int interval_n = 4;

  std::vector<double> resolvent_p{4, 16, 64};

  double dual_ex1_t = 1.5, dual_ex1_tau = 1e-3;
  double dual_ex3_t = 1.0, dual_ex3_tau = 1e-3, dual_ex3_h = 0.05;

  PEnergyConfig penergy;

  /// Overrides defaults from a non-empty JSON object; unknown keys and
  /// empty documents are rejected with InvalidArgument.
  static SuiteConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

struct CriterionPart {
  std::string id;
  std::string description;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct CriterionRecord {
  int id = 0;
  std::string name;
  std::vector<CriterionPart> parts;
  double runtime_s = 0.0;
  std::string error;  // set when the criterion aborted
  nlohmann::json details = nlohmann::json::object();
  bool pass() const;
  /// One summary line: "criterion N <name>: PASS|FAIL ...".
  std::string line() const;
};

nlohmann::json to_json(const CriterionRecord& r);

/// Runs one criterion (1..8). Module failures are caught and recorded.
CriterionRecord run_criterion(int id, const SuiteConfig& cfg);

struct SuiteReport {
  std::vector<CriterionRecord> records;
  bool all_pass() const;
  nlohmann::json to_json() const;
};

SuiteReport run_suite(const SuiteConfig& cfg,
                      const std::function<void(const CriterionRecord&)>& on_record = {});

}  // namespace plimit

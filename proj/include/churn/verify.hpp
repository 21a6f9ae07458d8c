#pragma once

#include <string>
#include <vector>

#include "churn/synth.hpp"

namespace churn {

struct VerifyTolerances {
  double classification_min_accuracy = 0.99;
  double percent_online_max_error = 0.02;
  double boundary_max_error_seconds = 900.0;  // half of a 30-min cadence
  double period_max_rel_error = 0.05;
  double period_min_pass_fraction = 0.95;
  double xi_nonperiodic_ceiling = 0.5;
  double xi_nonperiodic_min_fraction = 0.9;
};

struct MetricResult {
  std::string name;
  bool applicable = true;  // false when the scenario has no such cohort
  bool pass = true;
  double value = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<MetricResult> metrics;
  bool all_pass() const;
  std::string to_text() const;
};

// Compares an analyze report (JSON text) against the generator ground truth.
VerifyReport verify(const std::string &report_json, const GroundTruth &truth,
                    const VerifyTolerances &tol);

}  // namespace churn

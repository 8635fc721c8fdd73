#pragma once

// Agreement between model explanations and human annotations: mean absolute
// rank error and counterfactual-action agreement.

#include <cmath>
#include <cstddef>
#include <map>
#include <string>

#include "xgr/error.hpp"

namespace xgr {

/// (1/n) * sum |gt - model| over annotated observations; n is the full
/// observation count, not the number of annotated ones.
inline double eval_mae(const std::map<std::size_t, int>& model,
                       const std::map<std::size_t, int>& ground_truth, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kValidationError, "observation count must be positive");
  double sum = 0.0;
  for (const auto& [obs, rank] : ground_truth) {
    if (obs == 0 || obs > n) {
      throw Error(ErrorCode::kMissingAnnotation,
                  "annotated observation o" + std::to_string(obs) + " outside 1.." + std::to_string(n));
    }
    auto it = model.find(obs);
    if (it == model.end()) {
      throw Error(ErrorCode::kMissingAnnotation,
                  "model has no rank for annotated observation o" + std::to_string(obs));
    }
    sum += std::abs(rank - it->second);
  }
  return sum / static_cast<double>(n);
}

/// Percentage of counterfactual goals whose actions agree.
inline double eval_cf_agreement(const std::map<std::string, std::string>& model,
                                const std::map<std::string, std::string>& ground_truth) {
  if (model.size() != ground_truth.size()) {
    throw Error(ErrorCode::kKeyMismatch, "model and annotation cover different goals");
  }
  if (ground_truth.empty()) throw Error(ErrorCode::kKeyMismatch, "no counterfactual goals to compare");
  std::size_t agree = 0;
  for (const auto& [goal, action] : ground_truth) {
    auto it = model.find(goal);
    if (it == model.end()) {
      throw Error(ErrorCode::kKeyMismatch, "model has no counterfactual action for " + goal);
    }
    if (it->second == action) ++agree;
  }
  return 100.0 * static_cast<double>(agree) / static_cast<double>(ground_truth.size());
}

}  // namespace xgr

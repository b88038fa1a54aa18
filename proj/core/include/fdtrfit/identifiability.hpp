#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fdtrfit/objective.hpp"

namespace fdtrfit {

/// d(phase)/d(ln p) in degrees, concatenated over the problem's datasets.
struct SensitivityCurve {
  std::string parameter;
  std::vector<double> freqs;
  std::vector<std::size_t> dataset;
  std::vector<double> S;
};

/// Central log-difference with step `rel_step` around the nominal stack
/// (the problem's stack unless `at` is given). A name with no stack binding
/// gives S = 0; a name unknown to both binding and space is a ConfigError.
SensitivityCurve sensitivity(const FitProblem& problem, const std::string& param,
                             double rel_step = 0.01, const SampleStack* at = nullptr);

struct IdentifiabilityReport {
  std::vector<std::string> params;
  Eigen::MatrixXd jacobian;         // rows: frequencies over all datasets
  Eigen::VectorXd singular_values;  // non-increasing
  Eigen::MatrixXd directions;       // right singular vectors as columns
  double condition_number = 0.0;    // inf when the smallest value is 0
  bool degenerate = false;          // all singular values zero
};

/// Thin SVD of the sensitivity Jacobian. Repeated names give repeated columns.
IdentifiabilityReport identifiability_svd(const FitProblem& problem,
                                          const std::vector<std::string>& params,
                                          double rel_step = 0.01, const SampleStack* at = nullptr);

/// SVD of an explicit Jacobian; shared by identifiability_svd and tests.
IdentifiabilityReport svd_report(Eigen::MatrixXd jacobian, std::vector<std::string> params);

}  // namespace fdtrfit

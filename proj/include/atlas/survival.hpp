#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "atlas/grid.hpp"

namespace atlas {

/// Gamma density used as the baseline hazard of one regime.
struct GammaBaseline {
  int regime = 0;
  double shape = 1.0;
  double rate = 1.0;
  bool degenerate = false;

  double pdf(double x) const;
};

/// Method of moments: shape = mean^2 / var, rate = mean / var.
GammaBaseline gamma_from_moments(double mean, double variance);

/// Treats per-stamp counts as frequencies of the stamp index (1-based) and
/// fits the Gamma density to that distribution. Zero variance (or fewer
/// than two stamps with mass) gives the flagged Gamma(1, 1/mean).
GammaBaseline fit_baseline(std::span<const std::size_t> counts);

/// Feature vectors of one historical cell (one row per member).
using CoxStamp = Eigen::MatrixXd;

/// Partial log-likelihood over historical cells; empty cells contribute
/// nothing. Dot products are clipped to +-30, counted in *clipped.
double cox_loglik(std::span<const CoxStamp> history, const Eigen::VectorXd& gamma,
                  Eigen::VectorXd* grad = nullptr, Eigen::MatrixXd* hessian = nullptr,
                  std::size_t* clipped = nullptr);

struct CoxOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;
  double ridge = 1e-6;
};

struct CoxFit {
  Eigen::VectorXd gamma;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  bool ridged = false;
};

/// Newton-Raphson with step halving, started at `start`.
CoxFit fit_coefficients(std::span<const CoxStamp> history, const Eigen::VectorXd& start,
                        const CoxOptions& options = {});

/// Hazard of a cell: gamma(j)/n * sum exp(F . Gamma); 0 for an empty cell.
double hazard(const CoxStamp& cell, const Eigen::VectorXd& gamma, const GammaBaseline& baseline,
              double stamp_index, std::size_t* clipped = nullptr);

/// exp(-cumulative sum) of the given hazards.
std::vector<double> survival_from_hazards(std::span<const double> hazards);

/// Lifespan model of one regime over stamps 1..J.
struct RegimeSurvival {
  int regime = 0;
  GammaBaseline baseline;
  std::vector<CoxStamp> cells;            // history per stamp
  std::vector<Eigen::VectorXd> gamma;     // Gamma_j per stamp
  std::vector<bool> fitted;               // false when no history existed
  std::vector<double> hazards;
  std::vector<double> curve;              // Surv(j)
  std::vector<double> residual;           // events so far minus cumulative hazard
  std::size_t clipped = 0;
  int nonconverged = 0;

  /// Fits Gamma_j for a new stamp from all earlier cells, then appends its
  /// hazard and survival value.
  void push_stamp(CoxStamp cell, const CoxOptions& options = {});
  std::size_t stamps() const { return curve.size(); }
};

struct SurvivalModel {
  std::size_t dim = 8;
  std::vector<RegimeSurvival> regimes;  // index r-1
};

CoxStamp cell_features(const MappingGrid& grid, int regime, std::size_t stamp, std::size_t dim);

SurvivalModel fit_survival(const MappingGrid& grid, std::size_t dim = 8,
                           const CoxOptions& options = {});

nlohmann::json survival_to_json(const SurvivalModel& model);
void write_survival_csv(const SurvivalModel& model, const std::filesystem::path& path);
void write_cox_csv(const SurvivalModel& model, const std::filesystem::path& path);

}  // namespace atlas

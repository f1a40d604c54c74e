#include "atlas/survival.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "atlas/error.hpp"

namespace atlas {

namespace {

constexpr double kClip = 30.0;

double clip(double z, std::size_t* clipped) {
  if (z > kClip || z < -kClip) {
    if (clipped) ++*clipped;
    return std::clamp(z, -kClip, kClip);
  }
  return z;
}

}  // namespace

double GammaBaseline::pdf(double x) const {
  if (x <= 0.0) return 0.0;
  return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x -
                  std::lgamma(shape));
}

GammaBaseline gamma_from_moments(double mean, double variance) {
  GammaBaseline g;
  if (!(mean > 0.0)) {
    g.degenerate = true;
    return g;
  }
  if (!(variance > 0.0)) {
    g.shape = 1.0;
    g.rate = 1.0 / mean;
    g.degenerate = true;
    return g;
  }
  g.shape = mean * mean / variance;
  g.rate = mean / variance;
  return g;
}

GammaBaseline fit_baseline(std::span<const std::size_t> counts) {
  double total = 0.0;
  double mean = 0.0;
  std::size_t with_mass = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    total += static_cast<double>(counts[j]);
    mean += static_cast<double>(j + 1) * static_cast<double>(counts[j]);
    with_mass += counts[j] > 0;
  }
  if (total == 0.0) {
    GammaBaseline g;
    g.degenerate = true;
    return g;
  }
  mean /= total;
  double var = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const double d = static_cast<double>(j + 1) - mean;
    var += d * d * static_cast<double>(counts[j]);
  }
  var /= total;
  if (with_mass < 2) var = 0.0;
  return gamma_from_moments(mean, var);
}

double cox_loglik(std::span<const CoxStamp> history, const Eigen::VectorXd& gamma,
                  Eigen::VectorXd* grad, Eigen::MatrixXd* hessian, std::size_t* clipped) {
  const Eigen::Index d = gamma.size();
  if (grad) *grad = Eigen::VectorXd::Zero(d);
  if (hessian) *hessian = Eigen::MatrixXd::Zero(d, d);
  double ll = 0.0;
  for (const CoxStamp& f : history) {
    const Eigen::Index n = f.rows();
    if (n == 0) continue;
    Eigen::VectorXd z = f * gamma;
    for (Eigen::Index i = 0; i < n; ++i) z(i) = clip(z(i), clipped);
    const double zmax = z.maxCoeff();
    const Eigen::VectorXd e = (z.array() - zmax).exp().matrix();
    const double s = e.sum();
    const double lse = zmax + std::log(s);
    const double nd = static_cast<double>(n);
    ll += z.sum() - nd * lse;
    if (grad || hessian) {
      const Eigen::VectorXd w = e / s;
      const Eigen::VectorXd mu = f.transpose() * w;
      if (grad) *grad += f.colwise().sum().transpose() - nd * mu;
      if (hessian) {
        const Eigen::MatrixXd second = f.transpose() * w.asDiagonal() * f;
        *hessian -= nd * (second - mu * mu.transpose());
      }
    }
  }
  return ll;
}

CoxFit fit_coefficients(std::span<const CoxStamp> history, const Eigen::VectorXd& start,
                        const CoxOptions& options) {
  CoxFit fit;
  fit.gamma = start;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  fit.loglik = cox_loglik(history, fit.gamma, &grad, &hess);
  const Eigen::Index d = start.size();
  for (; fit.iterations < options.max_iterations; ++fit.iterations) {
    if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      fit.converged = true;
      break;
    }
    const Eigen::MatrixXd neg = -hess;
    Eigen::LLT<Eigen::MatrixXd> llt(neg);
    Eigen::VectorXd step;
    if (llt.info() == Eigen::Success) {
      step = llt.solve(grad);
    }
    if (llt.info() != Eigen::Success || !step.allFinite()) {
      fit.ridged = true;
      Eigen::LLT<Eigen::MatrixXd> ridge(neg + options.ridge * Eigen::MatrixXd::Identity(d, d));
      step = ridge.info() == Eigen::Success ? Eigen::VectorXd(ridge.solve(grad)) : grad;
    }
    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
      const Eigen::VectorXd trial = fit.gamma + scale * step;
      const double ll = cox_loglik(history, trial);
      if (ll >= fit.loglik) {
        fit.gamma = trial;
        fit.loglik = cox_loglik(history, fit.gamma, &grad, &hess);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!fit.converged && grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
    fit.converged = true;
  }
  return fit;
}

double hazard(const CoxStamp& cell, const Eigen::VectorXd& gamma, const GammaBaseline& baseline,
              double stamp_index, std::size_t* clipped) {
  const Eigen::Index n = cell.rows();
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) sum += std::exp(clip(cell.row(i).dot(gamma), clipped));
  return baseline.pdf(stamp_index) / static_cast<double>(n) * sum;
}

std::vector<double> survival_from_hazards(std::span<const double> hazards) {
  std::vector<double> out;
  out.reserve(hazards.size());
  double cumulative = 0.0;
  for (double h : hazards) {
    cumulative += h;
    out.push_back(std::max(std::exp(-cumulative), std::numeric_limits<double>::min()));
  }
  return out;
}

void RegimeSurvival::push_stamp(CoxStamp cell, const CoxOptions& options) {
  const Eigen::Index d = cell.cols();
  const bool has_history =
      std::any_of(cells.begin(), cells.end(), [](const CoxStamp& c) { return c.rows() > 0; });
  Eigen::VectorXd g = gamma.empty() ? Eigen::VectorXd::Zero(d) : gamma.back();
  if (has_history) {
    const CoxFit fit = fit_coefficients(cells, g, options);
    g = fit.gamma;
    if (!fit.converged) ++nonconverged;
  }
  const double h = hazard(cell, g, baseline, static_cast<double>(cells.size() + 1), &clipped);
  hazards.push_back(h);
  cells.push_back(std::move(cell));
  gamma.push_back(g);
  fitted.push_back(has_history);
  const auto cum = survival_from_hazards(hazards);
  curve.push_back(cum.back());
  double observed = 0.0;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    observed += cells[k].rows() > 0 ? 1.0 : 0.0;
    cumulative += hazards[k];
  }
  residual.push_back(observed - cumulative);
}

CoxStamp cell_features(const MappingGrid& grid, int regime, std::size_t stamp, std::size_t dim) {
  const auto& members = grid.cell(regime, stamp);
  CoxStamp f = CoxStamp::Zero(static_cast<Eigen::Index>(members.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < members.size(); ++k) {
    const auto& v = grid.feature(members[k], stamp);
    for (std::size_t c = 0; c < dim && c < v.size(); ++c) {
      f(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = v[c];
    }
  }
  return f;
}

SurvivalModel fit_survival(const MappingGrid& grid, std::size_t dim, const CoxOptions& options) {
  SurvivalModel model;
  model.dim = dim;
  for (std::size_t r = 1; r <= grid.K(); ++r) {
    const Lifespan life = lifespan(grid, static_cast<int>(r));
    RegimeSurvival rs;
    rs.regime = static_cast<int>(r);
    rs.baseline = fit_baseline(life.counts);
    rs.baseline.regime = rs.regime;
    for (std::size_t j = 0; j < grid.b(); ++j) {
      rs.push_stamp(cell_features(grid, static_cast<int>(r), j, dim), options);
    }
    model.regimes.push_back(std::move(rs));
  }
  return model;
}

nlohmann::json survival_to_json(const SurvivalModel& model) {
  nlohmann::json j;
  j["dim"] = model.dim;
  j["regimes"] = nlohmann::json::array();
  for (const auto& rs : model.regimes) {
    nlohmann::json r;
    r["regime"] = rs.regime;
    r["gamma_shape"] = rs.baseline.shape;
    r["gamma_rate"] = rs.baseline.rate;
    r["gamma_degenerate"] = rs.baseline.degenerate;
    auto coeffs = nlohmann::json::array();
    for (const auto& g : rs.gamma) coeffs.push_back(std::vector<double>(g.begin(), g.end()));
    r["coefficients"] = std::move(coeffs);
    r["fitted"] = rs.fitted;
    r["hazard"] = rs.hazards;
    r["survival"] = rs.curve;
    r["residual"] = rs.residual;
    r["clipped"] = rs.clipped;
    r["nonconverged"] = rs.nonconverged;
    j["regimes"].push_back(std::move(r));
  }
  return j;
}

void write_survival_csv(const SurvivalModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  out << "stamp";
  for (const auto& rs : model.regimes) out << ",R" << rs.regime;
  out << '\n';
  const std::size_t n = model.regimes.empty() ? 0 : model.regimes.front().stamps();
  for (std::size_t j = 0; j < n; ++j) {
    out << j + 1;
    for (const auto& rs : model.regimes) out << ',' << rs.curve[j];
    out << '\n';
  }
}

void write_cox_csv(const SurvivalModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  out << "regime,stamp";
  for (std::size_t c = 0; c < model.dim; ++c) out << ",g" << c + 1;
  out << '\n';
  for (const auto& rs : model.regimes) {
    for (std::size_t j = 0; j < rs.gamma.size(); ++j) {
      out << rs.regime << ',' << j + 1;
      for (Eigen::Index c = 0; c < rs.gamma[j].size(); ++c) out << ',' << rs.gamma[j](c);
      out << '\n';
    }
  }
}

}  // namespace atlas

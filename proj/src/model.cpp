// Copyright 2026 The Chronos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chronos/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace chronos::model {

namespace {

constexpr double kPi = std::numbers::pi;

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

// Acklam's rational approximation, relative error about 1e-9.
double std_normal_quantile_seed(double q) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double e[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (q < plow) {
    const double r = std::sqrt(-2.0 * std::log(q));
    return (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
           ((((e[0] * r + e[1]) * r + e[2]) * r + e[3]) * r + 1.0);
  }
  if (q > 1.0 - plow) return -std_normal_quantile_seed(1.0 - q);
  const double u = q - 0.5;
  const double r = u * u;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double std_normal_quantile(double q) {
  // Work in the lower tail where the erfc form of the cdf keeps full
  // relative precision.
  if (q > 0.5) return -std_normal_quantile(1.0 - q);
  double z = std_normal_quantile_seed(q);
  for (int it = 0; it < 50; ++it) {
    const double r = std_normal_cdf(z) - q;
    if (std::abs(r) <= 1e-12 * q) break;
    const double step = r / std_normal_pdf(z);
    z -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
  }
  return z;
}

}  // namespace

PriorSpec PriorSpec::gaussian(double mean, double stddev) {
  PriorSpec p;
  p.kind = PriorKind::Gaussian;
  p.mean = mean;
  p.stddev = stddev;
  p.validate();
  return p;
}

PriorSpec PriorSpec::uniform(double lo, double hi) {
  PriorSpec p;
  p.kind = PriorKind::Uniform;
  p.lo = lo;
  p.hi = hi;
  p.validate();
  return p;
}

PriorSpec PriorSpec::discrete(std::vector<double> points, std::vector<double> weights) {
  PriorSpec p;
  p.kind = PriorKind::Discrete;
  p.points = std::move(points);
  p.weights = std::move(weights);
  p.validate();
  return p;
}

void PriorSpec::validate() const {
  switch (kind) {
    case PriorKind::Gaussian:
      if (!(stddev > 0.0) || !std::isfinite(mean)) throw DomainError("gaussian prior needs stddev > 0");
      break;
    case PriorKind::Uniform:
      if (!(lo < hi)) throw DomainError("uniform prior needs lo < hi");
      break;
    case PriorKind::Discrete: {
      if (points.empty() || points.size() != weights.size())
        throw DomainError("discrete prior needs matching, nonempty points and weights");
      double total = 0.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (weights[i] < 0.0) throw DomainError("discrete prior weight is negative");
        if (i > 0 && !(points[i] > points[i - 1]))
          throw DomainError("discrete prior points must be strictly increasing");
        total += weights[i];
      }
      if (std::abs(total - 1.0) > 1e-12) throw DomainError("discrete prior weights must sum to 1");
      break;
    }
  }
}

std::string to_string(PriorKind k) {
  switch (k) {
    case PriorKind::Gaussian: return "gaussian";
    case PriorKind::Uniform: return "uniform";
    case PriorKind::Discrete: return "discrete";
  }
  return "?";
}

double prior_pdf(const PriorSpec& prior, double x) {
  switch (prior.kind) {
    case PriorKind::Gaussian:
      return std_normal_pdf((x - prior.mean) / prior.stddev) / prior.stddev;
    case PriorKind::Uniform:
      return (x >= prior.lo && x <= prior.hi) ? 1.0 / (prior.hi - prior.lo) : 0.0;
    case PriorKind::Discrete:
      break;
  }
  throw DomainError("discrete prior has no density");
}

double prior_cdf(const PriorSpec& prior, double x) {
  switch (prior.kind) {
    case PriorKind::Gaussian:
      return std_normal_cdf((x - prior.mean) / prior.stddev);
    case PriorKind::Uniform:
      return std::clamp((x - prior.lo) / (prior.hi - prior.lo), 0.0, 1.0);
    case PriorKind::Discrete: {
      double c = 0.0;
      for (std::size_t i = 0; i < prior.points.size() && prior.points[i] <= x; ++i) c += prior.weights[i];
      return std::min(c, 1.0);
    }
  }
  return 0.0;
}

double prior_invcdf(const PriorSpec& prior, double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("inverse cdf argument must lie in (0, 1)");
  switch (prior.kind) {
    case PriorKind::Gaussian:
      return prior.mean + prior.stddev * std_normal_quantile(q);
    case PriorKind::Uniform:
      return prior.lo + q * (prior.hi - prior.lo);
    case PriorKind::Discrete:
      break;
  }
  throw DomainError("discrete prior has no inverse cdf");
}

double CostModel::value(double x) const {
  switch (kind) {
    case CostKind::Quadratic: return x * x;
    case CostKind::Periodic: {
      const double s = std::sin(0.5 * x);
      return 4.0 * s * s;
    }
    case CostKind::Absolute: return std::abs(x);
  }
  return 0.0;
}

std::optional<double> CostModel::curvature_bound() const {
  if (kind == CostKind::Quadratic) return 2.0;
  return std::nullopt;
}

BayesStatistic CostModel::bayes_statistic() const {
  switch (kind) {
    case CostKind::Quadratic: return BayesStatistic::Mean;
    case CostKind::Absolute: return BayesStatistic::Median;
    case CostKind::Periodic: return BayesStatistic::NumericArgmin;
  }
  return BayesStatistic::Mean;
}

std::string to_string(CostKind k) {
  switch (k) {
    case CostKind::Quadratic: return "quadratic";
    case CostKind::Periodic: return "periodic";
    case CostKind::Absolute: return "absolute";
  }
  return "?";
}

CostKind cost_kind_from_string(const std::string& s) {
  if (s == "quadratic") return CostKind::Quadratic;
  if (s == "periodic") return CostKind::Periodic;
  if (s == "absolute") return CostKind::Absolute;
  throw ConfigError("unknown cost '" + s + "'");
}

double bayes_estimate(const CostModel& cost, const RealVector& omegas, const RealVector& weights) {
  if (omegas.size() != weights.size() || omegas.size() == 0)
    throw DimensionMismatch("bayes_estimate: omegas and weights differ in length");
  const double total = weights.sum();
  switch (cost.bayes_statistic()) {
    case BayesStatistic::Mean:
      return omegas.dot(weights) / total;
    case BayesStatistic::Median: {
      std::vector<int> order(static_cast<std::size_t>(omegas.size()));
      for (int i = 0; i < omegas.size(); ++i) order[static_cast<std::size_t>(i)] = i;
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return omegas(a) < omegas(b); });
      double c = 0.0;
      for (int i : order) {
        c += weights(i);
        if (c >= 0.5 * total * (1.0 - 1e-14)) return omegas(i);
      }
      return omegas(order.back());
    }
    case BayesStatistic::NumericArgmin:
      break;
  }
  auto objective = [&](double g) {
    double s = 0.0;
    for (int x = 0; x < omegas.size(); ++x) s += weights(x) * cost.value(omegas(x) - g);
    return s;
  };
  const double lo = omegas.minCoeff();
  const double hi = omegas.maxCoeff();
  if (hi <= lo) return lo;
  // Coarse scan brackets the global minimum, golden section polishes it.
  const int grid = 200;
  int best = 0;
  double best_val = objective(lo);
  for (int i = 1; i <= grid; ++i) {
    const double v = objective(lo + (hi - lo) * i / grid);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best - 1) / grid;
  double b = lo + (hi - lo) * std::min(grid, best + 1) / grid;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > 1e-10 * (1.0 + std::abs(a))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = objective(d);
    }
  }
  return 0.5 * (a + b);
}

void ClockScenario::validate() const {
  if (atoms < 1) throw DomainError("scenario needs at least one atom");
  if (queries < 1) throw DomainError("scenario needs at least one query");
  if (d < 2 && prior.continuous()) throw DomainError("discretization size d must be at least 2");
  if (estimates.empty()) throw DomainError("scenario needs at least one frequency estimate");
  for (std::size_t i = 1; i < estimates.size(); ++i)
    if (!(estimates[i] > estimates[i - 1])) throw DomainError("estimates must be strictly increasing");
  if (wrap_phase && cost.kind != CostKind::Periodic) throw DomainError("wrap_phase requires the periodic cost");
  prior.validate();
}

void DiscretizedPrior::validate() const {
  if (omegas.size() != weights.size() || omegas.size() == 0)
    throw DimensionMismatch("discretized prior: omegas and weights differ in length");
  for (int i = 0; i < weights.size(); ++i) {
    if (weights(i) < 0.0) throw DomainError("discretized prior has a negative weight");
    if (i > 0 && !(omegas(i) > omegas(i - 1)))
      throw DomainError("discretized prior points must be strictly increasing");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12) throw DomainError("discretized prior weights must sum to 1");
}

DiscretizedPrior as_discretized(const PriorSpec& prior) {
  if (prior.kind != PriorKind::Discrete) throw DomainError("prior is not discrete");
  DiscretizedPrior dp;
  dp.omegas = Eigen::Map<const RealVector>(prior.points.data(), static_cast<Eigen::Index>(prior.points.size()));
  dp.weights = Eigen::Map<const RealVector>(prior.weights.data(), static_cast<Eigen::Index>(prior.weights.size()));
  dp.validate();
  return dp;
}

ComplexMatrix oracle_phase_matrix(const RealVector& omegas, int k) {
  const auto d = omegas.size();
  ComplexMatrix phi(d, d);
  for (Eigen::Index x = 0; x < d; ++x)
    for (Eigen::Index y = 0; y < d; ++y) phi(x, y) = std::polar(1.0, k * (omegas(x) - omegas(y)));
  return phi;
}

ComplexMatrix cost_operator(const RealVector& omegas, double f, const CostModel& cost) {
  const auto d = omegas.size();
  ComplexMatrix a = ComplexMatrix::Zero(d, d);
  for (Eigen::Index x = 0; x < d; ++x) a(x, x) = cost.value(omegas(x) - f);
  return a;
}

ComplexMatrix initial_oracle_state(const RealVector& weights) {
  if ((weights.array() < 0.0).any()) throw DomainError("initial_oracle_state: negative weight");
  const RealVector s = weights.cwiseSqrt();
  return (s * s.transpose()).cast<Complex>();
}

nlohmann::json to_json(const PriorSpec& prior) {
  nlohmann::json params;
  switch (prior.kind) {
    case PriorKind::Gaussian: params = {{"mean", prior.mean}, {"stddev", prior.stddev}}; break;
    case PriorKind::Uniform: params = {{"lo", prior.lo}, {"hi", prior.hi}}; break;
    case PriorKind::Discrete: params = {{"points", prior.points}, {"weights", prior.weights}}; break;
  }
  return {{"kind", to_string(prior.kind)}, {"params", params}};
}

nlohmann::json to_json(const ClockScenario& scenario) {
  return {{"atoms", scenario.atoms},           {"queries", scenario.queries}, {"prior", to_json(scenario.prior)},
          {"cost", to_string(scenario.cost.kind)}, {"d", scenario.d},          {"estimates", scenario.estimates},
          {"wrap_phase", scenario.wrap_phase}};
}

}  // namespace chronos::model

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

#include "chronos/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace chronos::bounds {

using herm::RealVector;
using model::CostKind;
using model::PriorKind;
using model::PriorSpec;

namespace {

constexpr double kPi = std::numbers::pi;

// One Gauss-Legendre panel. The node counts are compile-time in Boost, so
// the supported choices are enumerated.
double panel(const std::function<double(double)>& f, double a, double b, int nodes) {
  using boost::math::quadrature::gauss;
  switch (nodes) {
    case 10: return gauss<double, 10>::integrate(f, a, b);
    case 15: return gauss<double, 15>::integrate(f, a, b);
    case 20: return gauss<double, 20>::integrate(f, a, b);
    case 25: return gauss<double, 25>::integrate(f, a, b);
    case 30: return gauss<double, 30>::integrate(f, a, b);
    default: break;
  }
  throw DomainError("quadrature supports 10, 15, 20, 25 or 30 nodes per panel");
}

double composite(const std::function<double(double)>& f, double a, double b, int panels, int nodes) {
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) sum += panel(f, a + i * h, i + 1 == panels ? b : a + (i + 1) * h, nodes);
  return sum;
}

double prior_scale(const PriorSpec& prior) {
  switch (prior.kind) {
    case PriorKind::Gaussian: return prior.stddev;
    case PriorKind::Uniform: return (prior.hi - prior.lo) / std::sqrt(12.0);
    case PriorKind::Discrete: break;
  }
  throw DomainError("discrete prior has no continuous scale");
}

double prior_center(const PriorSpec& prior) {
  return prior.kind == PriorKind::Uniform ? 0.5 * (prior.lo + prior.hi) : prior.mean;
}

// Expected cost of the prior mass outside [f_1, f_m], charged at the
// nearest endpoint.
double tail_cost(const PriorSpec& prior, double f1, double fm, const model::CostModel& cost) {
  if (prior.kind == PriorKind::Discrete) {
    double s = 0.0;
    for (std::size_t i = 0; i < prior.points.size(); ++i) {
      const double x = prior.points[i];
      if (x < f1) s += prior.weights[i] * cost.value(x - f1);
      if (x > fm) s += prior.weights[i] * cost.value(x - fm);
    }
    return s;
  }
  const auto [lo, hi] = integration_range(prior);
  QuadratureOptions q;
  q.max_panel_width = 0.25 * prior_scale(prior);
  q.tolerance = 1e-12;
  double s = 0.0;
  if (f1 > lo)
    s += integrate([&](double w) { return cost.value(w - f1) * model::prior_pdf(prior, w); }, lo, std::min(f1, hi), q);
  if (fm < hi)
    s += integrate([&](double w) { return cost.value(w - fm) * model::prior_pdf(prior, w); }, std::max(fm, lo), hi, q);
  return s;
}

double sample_stddev(const std::vector<double>& v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

double wrapped_cdf(const PriorSpec& prior, double x) {
  const double c = prior_center(prior);
  const auto [lo, hi] = integration_range(prior);
  const int reach = static_cast<int>(std::ceil(std::max(c - lo, hi - c) / (2.0 * kPi))) + 1;
  double total = 0.0;
  for (int n = -reach; n <= reach; ++n)
    total += model::prior_cdf(prior, x + 2.0 * kPi * n) - model::prior_cdf(prior, c - kPi + 2.0 * kPi * n);
  return std::clamp(total, 0.0, 1.0);
}

model::DiscretizedPrior discretize_prior(const PriorSpec& prior, int d, double o, bool wrap) {
  if (!prior.continuous()) throw DomainError("discretization requires a continuous prior");
  if (d < 1) throw DomainError("discretization needs d >= 1");
  if (!(o > 0.0 && o < 1.0 / d)) throw DomainError("offset must lie in (0, 1/d)");
  model::DiscretizedPrior dp;
  dp.omegas.resize(d);
  dp.weights = RealVector::Constant(d, 1.0 / d);
  const double c = prior_center(prior);
  for (int j = 0; j < d; ++j) {
    const double q = o + static_cast<double>(j) / d;
    if (!wrap) {
      dp.omegas(j) = model::prior_invcdf(prior, q);
      continue;
    }
    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve([&](double x) { return wrapped_cdf(prior, x) - q; },
                                                        c - kPi, c + kPi, -q, 1.0 - q,
                                                        boost::math::tools::eps_tolerance<double>(52), iters);
    dp.omegas(j) = 0.5 * (root.first + root.second);
  }
  return dp;
}

std::vector<double> draw_offsets(int d, int k, std::uint64_t seed) {
  if (d < 1 || k < 0) throw DomainError("draw_offsets needs d >= 1 and k >= 0");
  std::mt19937_64 rng(seed);
  std::vector<double> out(static_cast<std::size_t>(k));
  for (auto& o : out) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    o = std::clamp(u, 1e-12, 1.0 - 1e-12) / d;
  }
  return out;
}

double integrate(const std::function<double(double)>& f, double a, double b, const QuadratureOptions& opts) {
  if (!(b > a)) return 0.0;
  if (opts.nodes < 10) throw DomainError("quadrature needs at least 10 nodes per panel");
  const double width = opts.max_panel_width > 0.0 ? opts.max_panel_width : b - a;
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
  const double coarse = composite(f, a, b, panels, opts.nodes);
  const double fine = composite(f, a, b, 2 * panels, opts.nodes);
  if (std::abs(fine - coarse) > opts.tolerance) {
    std::ostringstream msg;
    msg << "panel halving changed the integral by " << std::abs(fine - coarse);
    throw QuadratureNotConverged(msg.str());
  }
  return fine;
}

std::pair<double, double> integration_range(const PriorSpec& prior) {
  switch (prior.kind) {
    case PriorKind::Gaussian:
      return {prior.mean - kTruncationSigmas * prior.stddev, prior.mean + kTruncationSigmas * prior.stddev};
    case PriorKind::Uniform: return {prior.lo, prior.hi};
    case PriorKind::Discrete: break;
  }
  throw DomainError("discrete prior has no integration range");
}

double continuous_cost(const reconstruct::ReconstructedProtocol& protocol, const PriorSpec& prior,
                       const model::CostModel& cost, QuadratureOptions opts) {
  if (protocol.estimates.size() != static_cast<std::size_t>(protocol.outcomes()))
    throw DimensionMismatch("protocol needs one estimate per outcome");
  if (opts.max_panel_width <= 0.0)
    opts.max_panel_width = kPi / (4.0 * std::max(1, protocol.atoms * protocol.queries));
  const auto [lo, hi] = integration_range(prior);
  const auto integrand = [&](double w) {
    const RealVector q = reconstruct::simulate(protocol, w);
    double s = 0.0;
    for (int a = 0; a < q.size(); ++a) s += cost.value(w - protocol.estimates[static_cast<std::size_t>(a)]) * q(a);
    return s * model::prior_pdf(prior, w);
  };
  // Costs may have a kink at each estimate, so those become panel edges.
  std::vector<double> edges{lo};
  for (double f : protocol.estimates)
    if (f > lo && f < hi) edges.push_back(f);
  edges.push_back(hi);
  std::sort(edges.begin(), edges.end());
  double total = 0.0;
  for (std::size_t i = 1; i < edges.size(); ++i) total += integrate(integrand, edges[i - 1], edges[i], opts);
  return total;
}

std::optional<double> querier_gap(const PriorSpec& prior, const std::vector<double>& estimates,
                                  const model::CostModel& cost) {
  if (estimates.size() < 2) throw DomainError("querier_gap needs at least two estimates");
  if (!std::is_sorted(estimates.begin(), estimates.end())) throw DomainError("estimates must be sorted");
  const auto b = cost.curvature_bound();
  if (!b) return std::nullopt;
  double spacing = 0.0;
  for (std::size_t j = 1; j < estimates.size(); ++j) spacing = std::max(spacing, estimates[j] - estimates[j - 1]);
  return *b / 8.0 * spacing * spacing + tail_cost(prior, estimates.front(), estimates.back(), cost);
}

std::vector<double> choose_estimates(const PriorSpec& prior, const model::CostModel& cost, int m) {
  if (m < 2) throw DomainError("choose_estimates needs m >= 2");
  if (!prior.continuous()) throw DomainError("choose_estimates requires a continuous prior");
  std::vector<double> f(static_cast<std::size_t>(m));
  const auto b = cost.curvature_bound();
  if (!b) {
    for (int j = 0; j < m; ++j) f[static_cast<std::size_t>(j)] = model::prior_invcdf(prior, (j + 0.5) / m);
    return f;
  }
  const double mu = prior_center(prior);
  const auto place = [&](double w) {
    for (int j = 0; j < m; ++j) f[static_cast<std::size_t>(j)] = mu - w + 2.0 * w * j / (m - 1);
  };
  const auto gap = [&](double w) {
    const double h = 2.0 * w / (m - 1);
    return *b / 8.0 * h * h + tail_cost(prior, mu - w, mu + w, cost);
  };
  const auto [lo, hi] = integration_range(prior);
  const double wmax = 0.5 * (hi - lo);
  const auto best = boost::math::tools::brent_find_minima(gap, 1e-9 * wmax, wmax, 40);
  place(best.first);
  return f;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(n, 0)));
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, std::max(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

LowerBound lower_bound(const model::ClockScenario& scenario, int k, std::uint64_t seed, const RunOptions& opts) {
  if (k < 2) throw DomainError("lower_bound needs k >= 2");
  scenario.validate();
  if (!scenario.prior.continuous()) throw DomainError("discretization requires a continuous prior");
  const auto offsets = draw_offsets(scenario.d, k, seed);
  LowerBound lb;
  lb.samples.resize(static_cast<std::size_t>(k));
  lb.solutions.resize(static_cast<std::size_t>(k));
  parallel_for(k, opts.jobs, [&](int j) {
    const auto i = static_cast<std::size_t>(j);
    Sample& s = lb.samples[i];
    s.offset = offsets[i];
    const auto dp = discretize_prior(scenario.prior, scenario.d, s.offset, scenario.wrap_phase);
    try {
      auto sol = program::solve_interrogation(dp, scenario, opts.solver);
      s.ok = true;
      s.discretized_cost = sol.cost;
      s.gap = sol.gap;
      s.feas = sol.feas;
      lb.solutions[i] = std::move(sol);
    } catch (const SolverError& e) {
      s.error = e.what();
    }
  });
  std::vector<double> costs;
  for (const auto& s : lb.samples) {
    if (s.ok)
      costs.push_back(s.discretized_cost);
    else
      ++lb.excluded;
  }
  if (costs.size() < 2) throw SolverError("fewer than two discretization offsets solved");
  double sum = 0.0;
  for (double c : costs) sum += c;
  lb.c_l = sum / static_cast<double>(costs.size());
  lb.s_l = sample_stddev(costs, lb.c_l) / std::sqrt(static_cast<double>(costs.size()));
  return lb;
}

double BoundsReport::max_verify_residual() const {
  double r = 0.0;
  for (const auto& s : samples)
    if (s.verify) r = std::max(r, reconstruct::worst_residual(*s.verify));
  return r;
}

bool BoundsReport::verified(double tol) const {
  for (const auto& s : samples)
    if (s.verify && !s.verify->passing(tol)) return false;
  return true;
}

BoundsReport bounds_report(const model::ClockScenario& scenario, int k, std::uint64_t seed, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  auto lb = lower_bound(scenario, k, seed, opts);
  parallel_for(k, opts.jobs, [&](int j) {
    const auto i = static_cast<std::size_t>(j);
    if (!lb.solutions[i]) return;
    const auto& sol = *lb.solutions[i];
    const auto protocol = reconstruct::reconstruct_protocol(sol);
    lb.samples[i].verify = reconstruct::verify_protocol(protocol, sol);
    lb.samples[i].continuous_cost = continuous_cost(protocol, scenario.prior, scenario.cost, opts.quadrature);
  });

  BoundsReport r;
  r.scenario = scenario;
  r.k = k;
  r.seed = seed;
  r.c_l = lb.c_l;
  r.s_l = lb.s_l;
  r.excluded = lb.excluded;
  r.c_u = std::numeric_limits<double>::infinity();
  for (const auto& s : lb.samples)
    if (s.continuous_cost) r.c_u = std::min(r.c_u, *s.continuous_cost);
  r.eps_q = querier_gap(scenario.prior, scenario.estimates, scenario.cost);
  r.samples = std::move(lb.samples);
  if (!r.eps_q) r.warnings.emplace_back("no querier gap for this cost; bounds apply to the discretized estimate set");
  if (r.c_l > r.c_u + 3.0 * r.s_l) r.warnings.emplace_back("c_l exceeds c_u + 3 s_l");
  if (r.excluded > 0) r.warnings.emplace_back(std::to_string(r.excluded) + " offsets failed to solve and were excluded");
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

nlohmann::json to_json(const BoundsReport& r) {
  nlohmann::json j;
  j["scenario"] = model::to_json(r.scenario);
  j["k"] = r.k;
  j["seed"] = r.seed;
  j["c_l"] = r.c_l;
  j["s_l"] = r.s_l;
  j["c_u"] = r.c_u;
  j["eps_q"] = r.eps_q ? nlohmann::json(*r.eps_q) : nlohmann::json(nullptr);
  j["lower_estimate"] = r.c_l - r.eps_q.value_or(0.0);
  j["excluded"] = r.excluded;
  j["max_verify_residual"] = r.max_verify_residual();
  j["warnings"] = r.warnings;
  j["wall_time_s"] = r.wall_time_s;
  auto& samples = j["samples"] = nlohmann::json::array();
  for (const auto& s : r.samples) {
    nlohmann::json e{{"offset", s.offset}, {"ok", s.ok}};
    if (s.ok) {
      e["discretized_cost"] = s.discretized_cost;
      e["gap"] = s.gap;
      e["feas"] = s.feas;
    } else {
      e["error"] = s.error;
    }
    if (s.continuous_cost) e["continuous_cost"] = *s.continuous_cost;
    if (s.verify) e["verify"] = reconstruct::to_json(*s.verify);
    samples.push_back(std::move(e));
  }
  return j;
}

std::string csv_header() { return "prior_sigma,N,t_f,d,m,k,c_l,s_l,c_u,eps_q,seed,wall_time_s"; }

std::string csv_row(const BoundsReport& r) {
  std::ostringstream os;
  os << std::setprecision(10) << prior_scale(r.scenario.prior) << ',' << r.scenario.atoms << ',' << r.scenario.queries
     << ',' << r.scenario.d << ',' << r.scenario.estimates.size() << ',' << r.k << ',' << r.c_l << ',' << r.s_l << ','
     << r.c_u << ',';
  if (r.eps_q) os << *r.eps_q;
  os << ',' << r.seed << ',' << std::setprecision(4) << r.wall_time_s;
  return os.str();
}

}  // namespace chronos::bounds

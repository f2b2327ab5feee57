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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"

#include "chronos/bounds.hpp"

using namespace chronos;
using namespace chronos::bounds;
using model::ClockScenario;
using model::CostKind;
using model::CostModel;
using model::PriorSpec;

namespace {

constexpr double kPi = std::numbers::pi;

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }
double upper_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// E[(X - a)^2; X > a] for a standard normal X.
double normal_tail_moment(double a) { return (1.0 + a * a) * upper_tail(a) - a * phi(a); }

std::vector<double> linspace(double lo, double hi, int m) {
  std::vector<double> f(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) f[static_cast<std::size_t>(j)] = lo + (hi - lo) * j / (m - 1);
  return f;
}

// Always answers f, whatever the query returns.
reconstruct::ReconstructedProtocol constant_protocol(double f) {
  reconstruct::ReconstructedProtocol p;
  p.atoms = 1;
  p.queries = 1;
  p.ancilla_dim = 1;
  p.psi0.systems = {{"Q", 2}, {"A", 1}};
  p.psi0.amplitudes = herm::ComplexVector::Zero(2);
  p.psi0.amplitudes(0) = 1.0;
  p.povm.elements = {herm::ComplexMatrix::Identity(2, 2)};
  p.povm.factors = {herm::ComplexMatrix::Identity(2, 2)};
  p.estimates = {f};
  return p;
}

ClockScenario small_scenario(int atoms, int queries, int d, int m) {
  ClockScenario sc;
  sc.atoms = atoms;
  sc.queries = queries;
  sc.prior = PriorSpec::gaussian(0.0, 1.0);
  sc.d = d;
  sc.estimates = linspace(-2.5, 2.5, m);
  return sc;
}

}  // namespace

TEST_CASE("discretize_prior places quantiles") {
  SUBCASE("uniform") {
    const auto dp = discretize_prior(PriorSpec::uniform(0.0, 1.0), 4, 0.125);
    const double expect[] = {0.125, 0.375, 0.625, 0.875};
    for (int j = 0; j < 4; ++j) {
      CHECK(dp.omegas(j) == doctest::Approx(expect[j]).epsilon(1e-14));
      CHECK(dp.weights(j) == doctest::Approx(0.25));
    }
  }
  SUBCASE("gaussian quartiles") {
    const auto dp = discretize_prior(PriorSpec::gaussian(0.0, 1.0), 2, 0.25);
    CHECK(std::abs(dp.omegas(0) + 0.6744897501960817) <= 1e-10);
    CHECK(std::abs(dp.omegas(1) - 0.6744897501960817) <= 1e-10);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(discretize_prior(PriorSpec::discrete({0.0, 1.0}, {0.5, 0.5}), 2, 0.1), DomainError);
    CHECK_THROWS_AS(discretize_prior(PriorSpec::gaussian(0.0, 1.0), 4, 0.0), DomainError);
    CHECK_THROWS_AS(discretize_prior(PriorSpec::gaussian(0.0, 1.0), 4, 0.25), DomainError);
  }
  SUBCASE("points increase") {
    const auto dp = discretize_prior(PriorSpec::gaussian(1.0, 3.0), 31, 0.001);
    for (int j = 1; j < 31; ++j) CHECK(dp.omegas(j) > dp.omegas(j - 1));
  }
}

TEST_CASE("wrapped discretization") {
  SUBCASE("narrow priors are unaffected") {
    const auto prior = PriorSpec::gaussian(0.3, 0.25);
    const auto plain = discretize_prior(prior, 15, 0.01);
    const auto wrapped = discretize_prior(prior, 15, 0.01, true);
    CHECK((plain.omegas - wrapped.omegas).cwiseAbs().maxCoeff() <= 1e-9);
  }
  SUBCASE("folded cdf matches the wrapped-normal Fourier series") {
    const double sigma = 2.25;
    const auto prior = PriorSpec::gaussian(0.0, sigma);
    for (double x = -kPi; x < kPi; x += 0.37) {
      double series = (x + kPi) / (2.0 * kPi);
      for (int n = 1; n <= 40; ++n) series += std::exp(-0.5 * n * n * sigma * sigma) * std::sin(n * x) / (kPi * n);
      CHECK(wrapped_cdf(prior, x) == doctest::Approx(series).epsilon(1e-12));
    }
  }
  SUBCASE("points are the folded quantiles") {
    const auto prior = PriorSpec::gaussian(1.0, 1.75);
    const int d = 15;
    const double o = 0.043;
    const auto dp = discretize_prior(prior, d, o, true);
    for (int j = 0; j < d; ++j) {
      CHECK(dp.omegas(j) >= 1.0 - kPi);
      CHECK(dp.omegas(j) < 1.0 + kPi);
      CHECK(wrapped_cdf(prior, dp.omegas(j)) == doctest::Approx(o + static_cast<double>(j) / d).epsilon(1e-12));
    }
  }
  SUBCASE("wrapping is refused for other costs") {
    auto sc = small_scenario(1, 1, 5, 3);
    sc.wrap_phase = true;
    CHECK_THROWS_AS(sc.validate(), DomainError);
    sc.cost = CostModel{CostKind::Periodic};
    CHECK_NOTHROW(sc.validate());
  }
}

TEST_CASE("random offsets reproduce the prior") {
  // Pooling the points of many uniformly offset discretizations is inverse
  // transform sampling, so the pooled empirical cdf tracks the prior.
  for (const auto& prior : {PriorSpec::gaussian(0.5, 2.0), PriorSpec::uniform(-1.0, 3.0)}) {
    const int d = 5;
    std::vector<double> pooled;
    for (double o : draw_offsets(d, 10000, 99)) {
      const auto dp = discretize_prior(prior, d, o);
      pooled.insert(pooled.end(), dp.omegas.data(), dp.omegas.data() + d);
    }
    std::sort(pooled.begin(), pooled.end());
    const double n = static_cast<double>(pooled.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < pooled.size(); ++i) {
      const double c = model::prior_cdf(prior, pooled[i]);
      ks = std::max({ks, std::abs(c - i / n), std::abs(c - (i + 1) / n)});
    }
    CHECK(ks <= 0.02);
  }
}

TEST_CASE("offsets are seeded and in range") {
  const auto a = draw_offsets(15, 200, 7);
  const auto b = draw_offsets(15, 200, 7);
  const auto c = draw_offsets(15, 200, 8);
  CHECK(a == b);
  CHECK(a != c);
  for (double o : a) {
    CHECK(o > 0.0);
    CHECK(o < 1.0 / 15);
  }
}

TEST_CASE("composite quadrature") {
  QuadratureOptions q;
  q.max_panel_width = 0.5;
  CHECK(integrate([](double x) { return x * x * x * x; }, -1.0, 2.0, q) == doctest::Approx(33.0 / 5.0).epsilon(1e-14));
  CHECK(integrate([](double x) { return std::cos(x); }, 0.0, 10.0, q) == doctest::Approx(std::sin(10.0)).epsilon(1e-13));
  CHECK(integrate([](double) { return 1.0; }, 1.0, 1.0, q) == 0.0);
  q.max_panel_width = 10.0;
  CHECK_THROWS_AS(integrate([](double x) { return std::sin(200.0 * x) * x; }, 0.0, 10.0, q), QuadratureNotConverged);
}

TEST_CASE("constant estimator costs the prior variance") {
  const auto prior = PriorSpec::gaussian(0.3, 0.7);
  const auto p = constant_protocol(0.3);
  CHECK(std::abs(continuous_cost(p, prior, CostModel{CostKind::Quadratic}) - 0.49) <= 1e-7);
  CHECK(std::abs(continuous_cost(p, prior, CostModel{CostKind::Absolute}) - 0.7 * std::sqrt(2.0 / kPi)) <= 1e-7);
  // E[4 sin^2(X/2)] = 2 (1 - exp(-s^2/2)).
  const double periodic = continuous_cost(p, prior, CostModel{CostKind::Periodic});
  CHECK(std::abs(periodic - 2.0 * (1.0 - std::exp(-0.49 / 2.0))) <= 1e-7);
  CHECK(periodic <= 4.0);
  const auto u = PriorSpec::uniform(-1.0, 2.0);
  CHECK(std::abs(continuous_cost(constant_protocol(0.5), u, CostModel{}) - 9.0 / 12.0) <= 1e-10);
}

TEST_CASE("continuous cost equals the offset average of discretized costs") {
  const auto sc = small_scenario(2, 1, 7, 9);
  const auto sol = program::solve_interrogation(discretize_prior(sc.prior, sc.d, 0.031), sc);
  const auto p = reconstruct::reconstruct_protocol(sol);
  const double exact = continuous_cost(p, sc.prior, sc.cost);
  // Midpoint rule over o in (0, 1/d); the inner sum uses simulate directly.
  const int n = 4000;
  double avg = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto dp = discretize_prior(sc.prior, sc.d, (i + 0.5) / n / sc.d);
    for (int x = 0; x < sc.d; ++x) {
      const auto q = reconstruct::simulate(p, dp.omegas(x));
      for (int a = 0; a < q.size(); ++a)
        avg += dp.weights(x) * sc.cost.value(dp.omegas(x) - p.estimates[static_cast<std::size_t>(a)]) * q(a);
    }
  }
  avg /= n;
  CHECK(std::abs(exact - avg) <= 2e-4);
}

TEST_CASE("querier gap") {
  const auto g = PriorSpec::gaussian(0.0, 1.0);
  SUBCASE("equispaced on [-4, 4]") {
    const auto eps = querier_gap(g, linspace(-4.0, 4.0, 25), CostModel{});
    REQUIRE(eps);
    const double expect = 0.25 / 9.0 + 2.0 * normal_tail_moment(4.0);
    CHECK(std::abs(*eps - expect) <= 1e-11);
    CHECK(std::abs(*eps - 0.02779) <= 1e-5);
  }
  SUBCASE("shifted and scaled gaussian") {
    const auto p = PriorSpec::gaussian(1.0, 2.0);
    const std::vector<double> f{-2.0, 0.5, 1.0, 3.5};
    const double expect = 0.25 * 2.5 * 2.5 + 4.0 * (normal_tail_moment(1.5) + normal_tail_moment(1.25));
    CHECK(std::abs(*querier_gap(p, f, CostModel{}) - expect) <= 1e-11);
  }
  SUBCASE("wide coverage leaves only the spacing term") {
    const auto f = linspace(-10.0, 10.0, 401);
    CHECK(std::abs(*querier_gap(g, f, CostModel{}) - 0.25 * 0.05 * 0.05) <= 1e-12);
  }
  SUBCASE("uniform tail") {
    // Mass on [0, 0.2] charged at 0.2: int_0^0.2 (x - 0.2)^2 dx = 0.008/3.
    const auto u = PriorSpec::uniform(0.0, 1.0);
    CHECK(std::abs(*querier_gap(u, {0.2, 0.6, 1.0}, CostModel{}) - (0.25 * 0.16 + 0.008 / 3.0)) <= 1e-12);
  }
  SUBCASE("discrete tail") {
    const auto dpr = PriorSpec::discrete({-3.0, 0.0, 2.0}, {0.2, 0.5, 0.3});
    CHECK(std::abs(*querier_gap(dpr, {-1.0, 1.0}, CostModel{}) - (0.25 * 4.0 + 0.2 * 4.0 + 0.3 * 1.0)) <= 1e-14);
  }
  SUBCASE("costs without a curvature bound") {
    CHECK_FALSE(querier_gap(g, {-1.0, 1.0}, CostModel{CostKind::Periodic}));
    CHECK_FALSE(querier_gap(g, {-1.0, 1.0}, CostModel{CostKind::Absolute}));
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(querier_gap(g, {1.0}, CostModel{}), DomainError);
    CHECK_THROWS_AS(querier_gap(g, {1.0, 0.0}, CostModel{}), DomainError);
  }
}

TEST_CASE("choose_estimates minimizes the gap over the width") {
  const auto g = PriorSpec::gaussian(0.0, 1.0);
  const auto gap_of_width = [](double w, int m) {
    const double h = 2.0 * w / (m - 1);
    return 0.25 * h * h + 2.0 * normal_tail_moment(w);
  };
  for (int m : {2, 5, 25}) {
    CAPTURE(m);
    const auto f = choose_estimates(g, CostModel{}, m);
    REQUIRE(static_cast<int>(f.size()) == m);
    CHECK(std::is_sorted(f.begin(), f.end()));
    for (int j = 0; j < m; ++j) CHECK(std::abs(f[static_cast<std::size_t>(j)] + f[static_cast<std::size_t>(m - 1 - j)]) <= 1e-12);
    double best = 1e9;
    for (int i = 1; i <= 200000; ++i) best = std::min(best, gap_of_width(8.0 * i / 200000, m));
    const double w = f.back();
    CHECK(gap_of_width(w, m) <= best + 1e-10);
    CHECK(std::abs(*querier_gap(g, f, CostModel{}) - gap_of_width(w, m)) <= 1e-11);
  }
  const auto f25 = choose_estimates(g, CostModel{}, 25);
  CHECK(std::abs(*querier_gap(g, f25, CostModel{}) - 0.0152) <= 0.003);
  CHECK(*querier_gap(g, choose_estimates(g, CostModel{}, 60), CostModel{}) < *querier_gap(g, f25, CostModel{}));
  CHECK(choose_estimates(g, CostModel{}, 60).back() > f25.back());

  const auto shifted = choose_estimates(PriorSpec::gaussian(2.0, 0.5), CostModel{}, 7);
  CHECK(0.5 * (shifted.front() + shifted.back()) == doctest::Approx(2.0));

  const auto q = choose_estimates(g, CostModel{CostKind::Periodic}, 4);
  CHECK(q[0] == doctest::Approx(model::prior_invcdf(g, 0.125)));
  CHECK(q[3] == doctest::Approx(model::prior_invcdf(g, 0.875)));
}

TEST_CASE("lower bound statistics") {
  const auto sc = small_scenario(1, 1, 7, 7);
  const auto lb = lower_bound(sc, 5, 3);
  REQUIRE(lb.samples.size() == 5);
  CHECK(lb.excluded == 0);
  double mean = 0.0;
  for (const auto& s : lb.samples) mean += s.discretized_cost / 5.0;
  double ss = 0.0;
  for (const auto& s : lb.samples) ss += (s.discretized_cost - mean) * (s.discretized_cost - mean);
  CHECK(lb.c_l == doctest::Approx(mean).epsilon(1e-14));
  CHECK(lb.s_l == doctest::Approx(std::sqrt(ss / 4.0 / 5.0)).epsilon(1e-12));
  const auto offsets = draw_offsets(7, 5, 3);
  for (int j = 0; j < 5; ++j) {
    CHECK(lb.samples[static_cast<std::size_t>(j)].offset == offsets[static_cast<std::size_t>(j)]);
    const auto direct = program::solve_interrogation(discretize_prior(sc.prior, 7, offsets[static_cast<std::size_t>(j)]), sc);
    CHECK(std::abs(direct.cost - lb.samples[static_cast<std::size_t>(j)].discretized_cost) <= 1e-12);
  }
  CHECK(lower_bound(sc, 2, 3).s_l >= 0.0);
  CHECK_THROWS_AS(lower_bound(sc, 1, 3), DomainError);
  auto disc = sc;
  disc.prior = PriorSpec::discrete({-kPi / 2, kPi / 2}, {0.5, 0.5});
  disc.d = 2;
  CHECK_THROWS_AS(bounds_report(disc, 4, 1), DomainError);
}

TEST_CASE("bounds report is consistent and reproducible") {
  const auto sc = small_scenario(2, 1, 9, 9);
  RunOptions serial;
  RunOptions threaded;
  threaded.jobs = 4;
  const auto r1 = bounds_report(sc, 6, 11, serial);
  const auto r2 = bounds_report(sc, 6, 11, threaded);
  CHECK(r1.c_l == r2.c_l);
  CHECK(r1.s_l == r2.s_l);
  CHECK(r1.c_u == r2.c_u);
  REQUIRE(r1.eps_q);
  CHECK(r1.c_u >= r1.c_l - 3.0 * r1.s_l - *r1.eps_q);
  CHECK(r1.verified());
  CHECK(r1.max_verify_residual() <= 1e-5);
  for (const auto& s : r1.samples) {
    REQUIRE(s.continuous_cost);
    CHECK(r1.c_u <= *s.continuous_cost);
  }
  const auto j = to_json(r1);
  CHECK(j["samples"].size() == 6);
  CHECK(j["scenario"]["atoms"] == 2);
  CHECK(j["lower_estimate"].get<double>() == doctest::Approx(r1.c_l - *r1.eps_q));
  const auto row = csv_row(r1);
  const auto header = csv_header();
  CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));
}

TEST_CASE("periodic reports carry the estimate-set caveat") {
  auto sc = small_scenario(1, 1, 7, 5);
  sc.cost = CostModel{CostKind::Periodic};
  const auto r = bounds_report(sc, 3, 5);
  CHECK_FALSE(r.eps_q);
  CHECK_FALSE(r.warnings.empty());
  CHECK(to_json(r)["eps_q"].is_null());
}

TEST_CASE("parallel_for rethrows the first failure") {
  std::vector<int> hit(50, 0);
  parallel_for(50, 4, [&](int i) { hit[static_cast<std::size_t>(i)] = 1; });
  CHECK(std::count(hit.begin(), hit.end(), 1) == 50);
  CHECK_THROWS_WITH(parallel_for(20, 3,
                                 [](int i) {
                                   if (i == 7 || i == 13) throw DomainError("fail " + std::to_string(i));
                                 }),
                    "fail 7");
}

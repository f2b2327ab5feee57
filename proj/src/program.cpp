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

#include "chronos/program.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace chronos::program {

namespace {

using herm::Complex;
using sdp::BlockSdpProblem;
using sdp::Constraint;
using sdp::Entry;
using sdp::Term;

constexpr Complex kI{0.0, 1.0};

/// Diagonal of D_k = diag(exp(i k omega_x)).
Eigen::VectorXcd phase_diagonal(const RealVector& omegas, int k) {
  Eigen::VectorXcd v(omegas.size());
  for (Eigen::Index x = 0; x < omegas.size(); ++x) v(x) = std::polar(1.0, k * omegas(x));
  return v;
}

/// One linear piece X_b -> s M X_b M^dagger of a Hermitian matrix equation.
struct MapPiece {
  int block;
  ComplexMatrix m;  // rows = equation dim, cols = block dim
  double sign;
};

/// Term whose trace pairing with X equals Re(sum_rc alpha_rc X_rc).
Term<Complex> functional_term(int block, const ComplexMatrix& alpha) {
  Term<Complex> t;
  t.block = block;
  const ComplexMatrix a = 0.5 * (alpha.transpose() + alpha.conjugate());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c)
      if (a(r, c) != Complex(0.0)) t.entries.push_back({r, c, a(r, c)});
  return t;
}

/// Real rows of sum_pieces s M X M^dagger = rhs: the diagonal, then the real
/// and imaginary parts of every strictly upper entry.
void add_matrix_equation(BlockSdpProblem& p, const std::vector<MapPiece>& pieces, const ComplexMatrix& rhs) {
  const int w = static_cast<int>(rhs.rows());
  for (int i = 0; i < w; ++i) {
    for (int j = i; j < w; ++j) {
      for (int part = 0; part < (i == j ? 1 : 2); ++part) {
        const Complex rot = part == 0 ? Complex(1.0) : -kI;  // Im z = Re(-i z)
        Constraint<Complex> con;
        for (const auto& pc : pieces) {
          // (M X M^dagger)_ij = sum_rc M_ir X_rc conj(M_jc)
          const ComplexMatrix alpha = (pc.sign * rot) * pc.m.row(i).transpose() * pc.m.row(j).conjugate();
          auto t = functional_term(pc.block, alpha);
          if (!t.entries.empty()) con.terms.push_back(std::move(t));
        }
        con.rhs = (rot * rhs(i, j)).real();
        p.constraints.push_back(std::move(con));
      }
    }
  }
}

Term<Complex> dense_term(int block, const ComplexMatrix& a) {
  Term<Complex> t;
  t.block = block;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c)
      if (a(r, c) != Complex(0.0)) t.entries.push_back({r, c, a(r, c)});
  return t;
}

/// Orthonormal basis of the column span of v, dropping singular values
/// below rank_tol relative to the largest.
ComplexMatrix orthonormal_span(const ComplexMatrix& v, double rank_tol) {
  Eigen::JacobiSVD<ComplexMatrix> svd(v, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int r = 0;
  while (r < s.size() && s(r) > rank_tol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

/// Common builder: blocks of each time step live in the column span of
/// bases[t] (identity for the full program).
BlockSdpProblem assemble(const model::DiscretizedPrior& dp, const model::ClockScenario& sc,
                         const std::vector<ComplexMatrix>& bases) {
  const int q = sc.atoms + 1;
  const int tf = sc.queries;
  const int m = static_cast<int>(sc.estimates.size());
  BlockSdpProblem p;
  for (int t = 0; t < tf; ++t)
    for (int k = 0; k < q; ++k) p.block_dims.push_back(static_cast<int>(bases[static_cast<std::size_t>(t)].cols()));
  for (int a = 0; a < m; ++a) p.block_dims.push_back(static_cast<int>(bases[static_cast<std::size_t>(tf)].cols()));

  const ComplexMatrix& yf = bases[static_cast<std::size_t>(tf)];
  for (int a = 0; a < m; ++a) {
    const ComplexMatrix c = yf.adjoint() * model::cost_operator(dp.omegas, sc.estimates[static_cast<std::size_t>(a)], sc.cost) * yf;
    p.objective.push_back(dense_term(tf * q + a, 0.5 * (c + c.adjoint())));
  }

  // (i) sum_k B_k^{(0)} = rho_0
  {
    const ComplexMatrix& y0 = bases[0];
    const auto w = y0.cols();
    std::vector<MapPiece> pieces;
    for (int k = 0; k < q; ++k) pieces.push_back({k, ComplexMatrix::Identity(w, w), 1.0});
    add_matrix_equation(p, pieces, y0.adjoint() * model::initial_oracle_state(dp.weights) * y0);
  }
  // (ii) sum_k B_k^{(t)} = sum_k Phi_k o B_k^{(t-1)}, and (iii) with sigma_a.
  for (int t = 1; t <= tf; ++t) {
    const ComplexMatrix& yt = bases[static_cast<std::size_t>(t)];
    const ComplexMatrix& yp = bases[static_cast<std::size_t>(t - 1)];
    const auto w = yt.cols();
    std::vector<MapPiece> pieces;
    if (t < tf) {
      for (int k = 0; k < q; ++k) pieces.push_back({t * q + k, ComplexMatrix::Identity(w, w), 1.0});
    } else {
      for (int a = 0; a < m; ++a) pieces.push_back({tf * q + a, ComplexMatrix::Identity(w, w), 1.0});
    }
    for (int k = 0; k < q; ++k) {
      const ComplexMatrix mk = yt.adjoint() * phase_diagonal(dp.omegas, k).asDiagonal() * yp;
      pieces.push_back({(t - 1) * q + k, mk, -1.0});
    }
    add_matrix_equation(p, pieces, ComplexMatrix::Zero(w, w));
  }
  return p;
}

void check_inputs(const model::DiscretizedPrior& dp, const model::ClockScenario& sc) {
  sc.validate();
  dp.validate();
  if (sc.prior.continuous() && dp.size() != sc.d)
    throw DimensionMismatch("discretized prior has " + std::to_string(dp.size()) + " points, scenario d = " +
                            std::to_string(sc.d));
}

ComplexMatrix hermitize(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

InterrogationSolution skeleton(const model::DiscretizedPrior& dp, const model::ClockScenario& sc) {
  InterrogationSolution s;
  s.atoms = sc.atoms;
  s.queries = sc.queries;
  s.prior = dp;
  s.cost_model = sc.cost;
  s.estimates = sc.estimates;
  return s;
}

void finish(InterrogationSolution& s) {
  double c = 0.0;
  for (int a = 0; a < s.outcomes(); ++a)
    c += (model::cost_operator(s.prior.omegas, s.estimates[static_cast<std::size_t>(a)], s.cost_model) *
          s.sigma[static_cast<std::size_t>(a)])
             .trace()
             .real();
  s.cost = c;
  const auto r = check_solution(s);
  s.feas = std::max({r.initial, r.propagation, r.final});
}

}  // namespace

ComplexMatrix InterrogationSolution::oracle_state(int t) const {
  if (t < queries) {
    ComplexMatrix r = ComplexMatrix::Zero(d(), d());
    for (const auto& b : B[static_cast<std::size_t>(t)]) r += b;
    return r;
  }
  ComplexMatrix r = ComplexMatrix::Zero(d(), d());
  for (const auto& s : sigma) r += s;
  return r;
}

ComplexMatrix apply_query(const RealVector& omegas, const std::vector<ComplexMatrix>& blocks) {
  const auto d = omegas.size();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (std::size_t k = 0; k < blocks.size(); ++k)
    out += model::oracle_phase_matrix(omegas, static_cast<int>(k)).cwiseProduct(blocks[k]);
  return out;
}

BlockSdpProblem build_clock_sdp(const model::DiscretizedPrior& dp, const model::ClockScenario& scenario) {
  check_inputs(dp, scenario);
  const auto d = dp.size();
  std::vector<ComplexMatrix> bases(static_cast<std::size_t>(scenario.queries + 1), ComplexMatrix::Identity(d, d));
  return assemble(dp, scenario, bases);
}

ReducedClockSdp build_reduced_clock_sdp(const model::DiscretizedPrior& dp, const model::ClockScenario& scenario,
                                        double rank_tol) {
  check_inputs(dp, scenario);
  const int q = scenario.atoms + 1;
  ReducedClockSdp r;
  const ComplexMatrix root = dp.weights.cwiseSqrt().cast<Complex>();
  r.bases.push_back(orthonormal_span(root, rank_tol));
  for (int t = 1; t <= scenario.queries; ++t) {
    const ComplexMatrix& prev = r.bases.back();
    ComplexMatrix gen(dp.size(), prev.cols() * q);
    for (int k = 0; k < q; ++k) gen.middleCols(k * prev.cols(), prev.cols()) = phase_diagonal(dp.omegas, k).asDiagonal() * prev;
    r.bases.push_back(orthonormal_span(gen, rank_tol));
  }
  r.problem = assemble(dp, scenario, r.bases);
  return r;
}

InterrogationSolution solve_interrogation(const model::DiscretizedPrior& dp, const model::ClockScenario& scenario,
                                          const sdp::SolverOptions& opts) {
  const auto reduced = build_reduced_clock_sdp(dp, scenario);
  const auto sol = sdp::solve(reduced.problem, opts);
  const int q = scenario.atoms + 1;
  const int tf = scenario.queries;

  auto s = skeleton(dp, scenario);
  s.B.resize(static_cast<std::size_t>(tf));
  for (int t = 0; t < tf; ++t) {
    const auto& y = reduced.bases[static_cast<std::size_t>(t)];
    for (int k = 0; k < q; ++k)
      s.B[static_cast<std::size_t>(t)].push_back(hermitize(y * sol.blocks[static_cast<std::size_t>(t * q + k)] * y.adjoint()));
  }
  const auto& yf = reduced.bases[static_cast<std::size_t>(tf)];
  for (std::size_t a = 0; a < scenario.estimates.size(); ++a)
    s.sigma.push_back(hermitize(yf * sol.blocks[static_cast<std::size_t>(tf * q) + a] * yf.adjoint()));
  s.gap = std::abs(sol.primal_objective - sol.dual_objective);
  s.iterations = sol.iterations;
  s.status = sol.status;
  finish(s);
  if (sol.status != sdp::Status::Optimal) {
    std::ostringstream os;
    os << "clock SDP solve ended with status " << sdp::to_string(sol.status) << " after " << sol.iterations
       << " iterations: primal " << sol.primal_objective << ", dual " << sol.dual_objective << ", primal infeasibility "
       << sol.primal_infeasibility << ", dual infeasibility " << sol.dual_infeasibility;
    throw SolverError(os.str());
  }
  return s;
}

InterrogationSolution from_full_solution(const model::DiscretizedPrior& dp, const model::ClockScenario& scenario,
                                         const sdp::BlockSdpSolution& sol) {
  const int q = scenario.atoms + 1;
  const int tf = scenario.queries;
  auto s = skeleton(dp, scenario);
  s.B.resize(static_cast<std::size_t>(tf));
  for (int t = 0; t < tf; ++t)
    for (int k = 0; k < q; ++k) s.B[static_cast<std::size_t>(t)].push_back(hermitize(sol.blocks[static_cast<std::size_t>(t * q + k)]));
  for (std::size_t a = 0; a < scenario.estimates.size(); ++a)
    s.sigma.push_back(hermitize(sol.blocks[static_cast<std::size_t>(tf * q) + a]));
  s.gap = std::abs(sol.primal_objective - sol.dual_objective);
  s.iterations = sol.iterations;
  s.status = sol.status;
  finish(s);
  return s;
}

ConstraintResiduals check_solution(const InterrogationSolution& sol) {
  ConstraintResiduals r;
  const auto& om = sol.prior.omegas;
  r.initial = herm::max_abs(sol.oracle_state(0) - model::initial_oracle_state(sol.prior.weights));
  for (int t = 1; t < sol.queries; ++t)
    r.propagation = std::max(r.propagation, herm::max_abs(sol.oracle_state(t) - apply_query(om, sol.B[static_cast<std::size_t>(t - 1)])));
  r.final = herm::max_abs(sol.oracle_state(sol.queries) - apply_query(om, sol.B.back()));
  double c = 0.0;
  for (int a = 0; a < sol.outcomes(); ++a)
    for (int x = 0; x < sol.d(); ++x)
      c += sol.cost_model.value(om(x) - sol.estimates[static_cast<std::size_t>(a)]) * sol.sigma[static_cast<std::size_t>(a)](x, x).real();
  r.cost = std::abs(c - sol.cost);
  double lmin = 0.0;
  for (const auto& bt : sol.B)
    for (const auto& b : bt) lmin = std::min(lmin, herm::herm_eig(b).values.minCoeff());
  for (const auto& s : sol.sigma) lmin = std::min(lmin, herm::herm_eig(s).values.minCoeff());
  r.min_eigenvalue = lmin;
  return r;
}

Posteriors posteriors(const InterrogationSolution& sol) {
  Posteriors p;
  const int m = sol.outcomes();
  const int d = sol.d();
  p.posterior = Eigen::MatrixXd::Zero(m, d);
  p.outcome_probs.resize(m);
  p.used.assign(static_cast<std::size_t>(m), false);
  for (int a = 0; a < m; ++a) {
    const auto& s = sol.sigma[static_cast<std::size_t>(a)];
    RealVector diag = s.diagonal().real().cwiseMax(0.0);
    const double tr = s.trace().real();
    p.outcome_probs(a) = tr;
    if (tr >= 1e-12) {
      p.used[static_cast<std::size_t>(a)] = true;
      p.posterior.row(a) = diag.transpose() / diag.sum();
    }
  }
  return p;
}

}  // namespace chronos::program

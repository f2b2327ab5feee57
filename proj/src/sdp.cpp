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

#include "chronos/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

namespace chronos::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal:
      return "Optimal";
    case Status::MaxIterations:
      return "MaxIterations";
    case Status::NumericalFailure:
      return "NumericalFailure";
  }
  return "Unknown";
}

SolverOptions SolverOptions::from_environment() {
  SolverOptions o;
  if (const char* env = std::getenv("CHRONOS_SDP_TOL")) {
    try {
      o.gap_tol = std::stod(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("CHRONOS_SDP_TOL is not a number: ") + env);
    }
  }
  return o;
}

namespace {

double conj_if(double v) { return v; }
Complex conj_if(Complex v) { return std::conj(v); }
double abs_of(double v) { return std::abs(v); }
double abs_of(Complex v) { return std::abs(v); }

template <typename Scalar>
void validate_term(const Term<Scalar>& t, const std::vector<int>& dims, const char* what) {
  if (t.block < 0 || t.block >= static_cast<int>(dims.size()))
    throw DimensionMismatch(std::string(what) + " references an undeclared block");
  const int n = dims[static_cast<std::size_t>(t.block)];
  std::map<std::pair<int, int>, Scalar> acc;
  for (const auto& e : t.entries) {
    if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n)
      throw DimensionMismatch(std::string(what) + " entry outside its block");
    acc[{e.row, e.col}] += e.value;
  }
  for (const auto& [rc, v] : acc) {
    auto it = acc.find({rc.second, rc.first});
    const Scalar mirror = it == acc.end() ? Scalar{} : it->second;
    if (abs_of(v - conj_if(mirror)) > 1e-12 * (1.0 + abs_of(v)))
      throw NotHermitian(std::string(what) + " coefficient is not Hermitian");
  }
}

}  // namespace

template <typename Scalar>
void validate(const Problem<Scalar>& problem) {
  for (int d : problem.block_dims)
    if (d < 1) throw DimensionMismatch("block dimension must be positive");
  for (const auto& t : problem.objective) validate_term(t, problem.block_dims, "objective");
  for (const auto& c : problem.constraints)
    for (const auto& t : c.terms) validate_term(t, problem.block_dims, "constraint");
}

template void validate<Complex>(const Problem<Complex>&);
template void validate<double>(const Problem<double>&);

// ---------------------------------------------------------------------------
// Real embedding

namespace {

Term<double> embed_term(const Term<Complex>& t, int d) {
  std::map<std::pair<int, int>, double> acc;
  for (const auto& e : t.entries) {
    const double re = 0.5 * e.value.real();
    const double im = 0.5 * e.value.imag();
    acc[{e.row, e.col}] += re;
    acc[{e.row + d, e.col + d}] += re;
    acc[{e.row + d, e.col}] += im;
    acc[{e.row, e.col + d}] -= im;
  }
  Term<double> out;
  out.block = t.block;
  for (const auto& [rc, v] : acc)
    if (v != 0.0) out.entries.push_back({rc.first, rc.second, v});
  return out;
}

}  // namespace

RealSdpProblem real_embed(const BlockSdpProblem& problem) {
  RealSdpProblem out;
  out.block_dims.reserve(problem.block_dims.size());
  for (int d : problem.block_dims) out.block_dims.push_back(2 * d);
  auto dim_of = [&](int b) { return problem.block_dims[static_cast<std::size_t>(b)]; };
  for (const auto& t : problem.objective) out.objective.push_back(embed_term(t, dim_of(t.block)));
  out.constraints.reserve(problem.constraints.size());
  for (const auto& c : problem.constraints) {
    Constraint<double> rc;
    rc.rhs = c.rhs;
    for (const auto& t : c.terms) rc.terms.push_back(embed_term(t, dim_of(t.block)));
    out.constraints.push_back(std::move(rc));
  }
  return out;
}

MatrixXd embed_matrix(const ComplexMatrix& h) {
  const auto d = h.rows();
  MatrixXd y(2 * d, 2 * d);
  y.topLeftCorner(d, d) = h.real();
  y.bottomRightCorner(d, d) = h.real();
  y.bottomLeftCorner(d, d) = h.imag();
  y.topRightCorner(d, d) = -h.imag();
  return y;
}

ComplexMatrix extract_matrix(const MatrixXd& y) {
  const auto d = y.rows() / 2;
  MatrixXd re = 0.5 * (y.topLeftCorner(d, d) + y.bottomRightCorner(d, d));
  MatrixXd im = 0.5 * (y.bottomLeftCorner(d, d) - y.topRightCorner(d, d));
  ComplexMatrix h(d, d);
  h.real() = re;
  h.imag() = im;
  return (h + h.adjoint()) * 0.5;
}

// ---------------------------------------------------------------------------
// Interior-point kernel

namespace {

struct BlockTerm {
  int constraint;
  const std::vector<Entry<double>>* entries;
  MatrixXd dense;  // filled when the term has at least n entries
  bool use_dense = false;
};

/// Problem data regrouped by block, after dropping dependent rows.
class Kernel {
 public:
  Kernel(const RealSdpProblem& p, std::vector<int> rows) : problem_(p), rows_(std::move(rows)) {
    const int nb = p.num_blocks();
    by_block_.resize(static_cast<std::size_t>(nb));
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const auto& c = p.constraints[static_cast<std::size_t>(rows_[k])];
      for (const auto& t : c.terms) {
        BlockTerm bt{static_cast<int>(k), &t.entries, {}, false};
        const int n = p.block_dims[static_cast<std::size_t>(t.block)];
        if (static_cast<int>(t.entries.size()) >= n) {
          bt.use_dense = true;
          bt.dense = MatrixXd::Zero(n, n);
          for (const auto& e : t.entries) bt.dense(e.row, e.col) += e.value;
        }
        by_block_[static_cast<std::size_t>(t.block)].push_back(std::move(bt));
      }
    }
    c_.resize(static_cast<std::size_t>(nb));
    for (int b = 0; b < nb; ++b) {
      const int n = p.block_dims[static_cast<std::size_t>(b)];
      c_[static_cast<std::size_t>(b)] = MatrixXd::Zero(n, n);
    }
    for (const auto& t : p.objective)
      for (const auto& e : t.entries) c_[static_cast<std::size_t>(t.block)](e.row, e.col) += e.value;
    b_.resize(static_cast<Eigen::Index>(rows_.size()));
    for (std::size_t k = 0; k < rows_.size(); ++k)
      b_(static_cast<Eigen::Index>(k)) = p.constraints[static_cast<std::size_t>(rows_[k])].rhs;
  }

  [[nodiscard]] int m() const { return static_cast<int>(rows_.size()); }
  [[nodiscard]] int nb() const { return problem_.num_blocks(); }
  [[nodiscard]] int dim(int b) const { return problem_.block_dims[static_cast<std::size_t>(b)]; }
  [[nodiscard]] const VectorXd& b() const { return b_; }
  [[nodiscard]] const MatrixXd& c(int b) const { return c_[static_cast<std::size_t>(b)]; }

  /// (A(Z))_i = sum_b tr(A_ib Z_b), valid for non-symmetric Z.
  [[nodiscard]] VectorXd apply(const std::vector<MatrixXd>& z) const {
    VectorXd out = VectorXd::Zero(m());
    for (int blk = 0; blk < nb(); ++blk) {
      const auto& zb = z[static_cast<std::size_t>(blk)];
      for (const auto& t : by_block_[static_cast<std::size_t>(blk)]) {
        double s = 0.0;
        for (const auto& e : *t.entries) s += e.value * zb(e.col, e.row);
        out(t.constraint) += s;
      }
    }
    return out;
  }

  /// sum_i y_i A_ib for each block.
  [[nodiscard]] std::vector<MatrixXd> adjoint(const VectorXd& y) const {
    std::vector<MatrixXd> out(static_cast<std::size_t>(nb()));
    for (int blk = 0; blk < nb(); ++blk) {
      out[static_cast<std::size_t>(blk)] = MatrixXd::Zero(dim(blk), dim(blk));
      auto& ob = out[static_cast<std::size_t>(blk)];
      for (const auto& t : by_block_[static_cast<std::size_t>(blk)]) {
        const double yi = y(t.constraint);
        for (const auto& e : *t.entries) ob(e.row, e.col) += yi * e.value;
      }
    }
    return out;
  }

  /// M_ij = sum_b tr(A_ib X_b A_jb Sinv_b).
  [[nodiscard]] MatrixXd schur(const std::vector<MatrixXd>& x,
                               const std::vector<MatrixXd>& sinv) const {
    MatrixXd mm = MatrixXd::Zero(m(), m());
    for (int blk = 0; blk < nb(); ++blk) {
      const auto& terms = by_block_[static_cast<std::size_t>(blk)];
      const auto& xb = x[static_cast<std::size_t>(blk)];
      const auto& sb = sinv[static_cast<std::size_t>(blk)];
      const int n = dim(blk);
      MatrixXd g(n, n);
      for (std::size_t jt = 0; jt < terms.size(); ++jt) {
        const auto& tj = terms[jt];
        if (tj.use_dense) {
          g.noalias() = xb * tj.dense * sb;
        } else {
          g.setZero();
          for (const auto& e : *tj.entries)
            g.noalias() += e.value * xb.col(e.row) * sb.row(e.col);
        }
        for (std::size_t it = 0; it <= jt; ++it) {
          const auto& ti = terms[it];
          double s = 0.0;
          for (const auto& e : *ti.entries) s += e.value * g(e.col, e.row);
          mm(ti.constraint, tj.constraint) += s;
          if (it != jt) mm(tj.constraint, ti.constraint) += s;
        }
      }
    }
    return mm;
  }

 private:
  const RealSdpProblem& problem_;
  std::vector<int> rows_;
  std::vector<std::vector<BlockTerm>> by_block_;
  std::vector<MatrixXd> c_;
  VectorXd b_;
};

/// Indices of a maximal numerically independent subset of constraint rows,
/// chosen by diagonally pivoted Cholesky of the Gram matrix tr(A_i A_j).
std::vector<int> independent_rows(const RealSdpProblem& p, double tol) {
  std::vector<int> all(p.constraints.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  if (all.empty()) return all;
  Kernel k(p, all);
  std::vector<MatrixXd> eye;
  for (int b = 0; b < p.num_blocks(); ++b) eye.push_back(MatrixXd::Identity(k.dim(b), k.dim(b)));
  MatrixXd g = k.schur(eye, eye);
  const Eigen::Index m = g.rows();
  const double max_diag = g.diagonal().maxCoeff();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::vector<int> keep;
  MatrixXd l = MatrixXd::Zero(m, m);
  VectorXd resid = g.diagonal();
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  for (Eigen::Index step = 0; step < m; ++step) {
    Eigen::Index piv = -1;
    double best = -1.0;
    for (Eigen::Index i = 0; i < m; ++i)
      if (!used[static_cast<std::size_t>(i)] && resid(i) > best) {
        best = resid(i);
        piv = i;
      }
    if (piv < 0 || best <= tol * max_diag) break;
    used[static_cast<std::size_t>(piv)] = true;
    const auto col = static_cast<Eigen::Index>(keep.size());
    keep.push_back(static_cast<int>(piv));
    const double root = std::sqrt(best);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (used[static_cast<std::size_t>(i)] && i != piv) continue;
      double v = g(i, piv);
      for (Eigen::Index c = 0; c < col; ++c) v -= l(i, c) * l(piv, c);
      l(i, col) = v / root;
      if (i != piv) resid(i) -= l(i, col) * l(i, col);
    }
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

double inner(const std::vector<MatrixXd>& a, const std::vector<MatrixXd>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].cwiseProduct(b[i]).sum();
  return s;
}

/// Largest alpha with x + alpha * dx PSD; infinity when unbounded.
/// Returns a negative value if x itself is not positive definite.
double max_step(const MatrixXd& x, const MatrixXd& dx) {
  Eigen::LLT<MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return -1.0;
  MatrixXd w = llt.matrixL().solve(dx);
  w = llt.matrixL().solve(w.transpose()).transpose();
  w = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(w, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

bool invert_spd(const MatrixXd& s, MatrixXd& out) {
  Eigen::LLT<MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) return false;
  out = llt.solve(MatrixXd::Identity(s.rows(), s.cols()));
  out = 0.5 * (out + out.transpose());
  return true;
}

}  // namespace

RealSdpSolution solve_real(const RealSdpProblem& problem, const SolverOptions& opts) {
  validate(problem);
  const auto rows = independent_rows(problem, opts.dependent_row_tol);
  Kernel k(problem, rows);
  const int nb = k.nb();
  const int m = k.m();

  RealSdpSolution sol;
  sol.dropped_rows = static_cast<int>(problem.constraints.size()) - m;

  double n_total = 0.0;
  for (int b = 0; b < nb; ++b) n_total += k.dim(b);
  double cmax = 0.0;
  for (int b = 0; b < nb; ++b) cmax = std::max(cmax, k.c(b).cwiseAbs().maxCoeff());
  const double tau = 1.0 + (m > 0 ? k.b().cwiseAbs().maxCoeff() : 0.0);

  std::vector<MatrixXd> x(static_cast<std::size_t>(nb)), s(static_cast<std::size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    x[static_cast<std::size_t>(b)] = tau * MatrixXd::Identity(k.dim(b), k.dim(b));
    s[static_cast<std::size_t>(b)] = tau * MatrixXd::Identity(k.dim(b), k.dim(b));
  }
  VectorXd y = VectorXd::Zero(m);

  auto finish = [&](Status st, int iters) {
    sol.status = st;
    sol.iterations = iters;
    sol.blocks = x;
    sol.slacks = s;
    sol.y = VectorXd::Zero(static_cast<Eigen::Index>(problem.constraints.size()));
    for (int i = 0; i < m; ++i) sol.y(rows[static_cast<std::size_t>(i)]) = y(i);
    double pobj = 0.0;
    for (int b = 0; b < nb; ++b) pobj += k.c(b).cwiseProduct(x[static_cast<std::size_t>(b)]).sum();
    sol.primal_objective = pobj;
    sol.dual_objective = m > 0 ? k.b().dot(y) : 0.0;
    return sol;
  };

  std::vector<MatrixXd> sinv(static_cast<std::size_t>(nb)), rd(static_cast<std::size_t>(nb));
  std::vector<MatrixXd> dx(static_cast<std::size_t>(nb)), ds(static_cast<std::size_t>(nb));
  std::vector<MatrixXd> tmp(static_cast<std::size_t>(nb));

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    const VectorXd ax = k.apply(x);
    const VectorXd rp = k.b() - ax;
    const auto aty = k.adjoint(y);
    double dinf = 0.0;
    for (int b = 0; b < nb; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      rd[bi] = k.c(b) - aty[bi] - s[bi];
      dinf = std::max(dinf, rd[bi].cwiseAbs().maxCoeff());
    }
    const double pinf = m > 0 ? rp.cwiseAbs().maxCoeff() : 0.0;
    double pobj = 0.0;
    for (int b = 0; b < nb; ++b) pobj += k.c(b).cwiseProduct(x[static_cast<std::size_t>(b)]).sum();
    const double dobj = m > 0 ? k.b().dot(y) : 0.0;
    sol.primal_infeasibility = pinf;
    sol.dual_infeasibility = dinf;

    if (std::abs(pobj - dobj) <= opts.gap_tol * (1.0 + std::abs(pobj)) && pinf <= opts.feas_tol &&
        dinf <= opts.feas_tol * (1.0 + cmax))
      return finish(Status::Optimal, iter);
    if (iter == opts.max_iter) break;

    const double mu = inner(x, s) / n_total;
    for (int b = 0; b < nb; ++b)
      if (!invert_spd(s[static_cast<std::size_t>(b)], sinv[static_cast<std::size_t>(b)]))
        return finish(Status::NumericalFailure, iter);

    MatrixXd schur = k.schur(x, sinv);
    Eigen::LLT<MatrixXd> chol(schur);
    if (chol.info() != Eigen::Success) {
      const double jitter = 1e-13 * std::max(1.0, schur.diagonal().maxCoeff());
      schur.diagonal().array() += jitter;
      chol.compute(schur);
      if (chol.info() != Eigen::Success) return finish(Status::NumericalFailure, iter);
    }

    // A(X Rd Sinv)
    for (int b = 0; b < nb; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      tmp[bi] = x[bi] * rd[bi] * sinv[bi];
    }
    const VectorXd a_xrs = k.apply(tmp);
    const VectorXd a_sinv = k.apply(sinv);

    auto direction = [&](double sigma_mu, const std::vector<MatrixXd>* corr, VectorXd& dy) {
      VectorXd rhs = k.b() - sigma_mu * a_sinv + a_xrs;
      if (corr) rhs += k.apply(*corr);
      dy = chol.solve(rhs);
      const auto atdy = k.adjoint(dy);
      for (int b = 0; b < nb; ++b) {
        const auto bi = static_cast<std::size_t>(b);
        ds[bi] = rd[bi] - atdy[bi];
        MatrixXd d = sigma_mu * sinv[bi] - x[bi] - x[bi] * ds[bi] * sinv[bi];
        if (corr) d -= (*corr)[bi];
        dx[bi] = 0.5 * (d + d.transpose());
      }
    };
    auto step_lengths = [&](double& ap, double& ad) {
      ap = 1.0;
      ad = 1.0;
      for (int b = 0; b < nb; ++b) {
        const auto bi = static_cast<std::size_t>(b);
        const double sp = max_step(x[bi], dx[bi]);
        const double sd = max_step(s[bi], ds[bi]);
        if (sp < 0.0 || sd < 0.0) return false;
        ap = std::min(ap, opts.step_fraction * sp);
        ad = std::min(ad, opts.step_fraction * sd);
      }
      return true;
    };

    // Predictor
    VectorXd dy;
    direction(0.0, nullptr, dy);
    double ap = 0.0, ad = 0.0;
    if (!step_lengths(ap, ad)) return finish(Status::NumericalFailure, iter);
    double mu_aff = 0.0;
    for (int b = 0; b < nb; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      mu_aff += (x[bi] + ap * dx[bi]).cwiseProduct(s[bi] + ad * ds[bi]).sum();
    }
    mu_aff /= n_total;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector: second-order term dXa dSa Sinv
    std::vector<MatrixXd> corr(static_cast<std::size_t>(nb));
    for (int b = 0; b < nb; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      corr[bi] = dx[bi] * ds[bi] * sinv[bi];
    }
    direction(sigma * mu, &corr, dy);
    if (!step_lengths(ap, ad)) return finish(Status::NumericalFailure, iter);

    for (int b = 0; b < nb; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      x[bi] += ap * dx[bi];
      s[bi] += ad * ds[bi];
      x[bi] = 0.5 * (x[bi] + x[bi].transpose());
      s[bi] = 0.5 * (s[bi] + s[bi].transpose());
    }
    y += ad * dy;
    if (!y.allFinite()) return finish(Status::NumericalFailure, iter);
  }
  return finish(Status::MaxIterations, opts.max_iter);
}

BlockSdpSolution solve(const BlockSdpProblem& problem, const SolverOptions& opts) {
  validate(problem);
  const auto real = solve_real(real_embed(problem), opts);
  BlockSdpSolution out;
  out.blocks.reserve(real.blocks.size());
  for (const auto& b : real.blocks) out.blocks.push_back(extract_matrix(b));
  out.y = real.y;
  out.primal_objective = real.primal_objective;
  out.dual_objective = real.dual_objective;
  out.primal_infeasibility = real.primal_infeasibility;
  out.dual_infeasibility = real.dual_infeasibility;
  out.iterations = real.iterations;
  out.dropped_rows = real.dropped_rows;
  out.status = real.status;
  return out;
}

// ---------------------------------------------------------------------------
// Residuals and I/O

namespace {

Complex term_value(const Term<Complex>& t, const ComplexMatrix& x) {
  Complex s = 0.0;
  for (const auto& e : t.entries) s += e.value * x(e.col, e.row);
  return s;
}

void check_shapes(const BlockSdpProblem& p, const std::vector<ComplexMatrix>& blocks) {
  if (blocks.size() != p.block_dims.size())
    throw DimensionMismatch("solution has the wrong number of blocks");
  for (std::size_t b = 0; b < blocks.size(); ++b)
    if (blocks[b].rows() != p.block_dims[b] || blocks[b].cols() != p.block_dims[b])
      throw DimensionMismatch("solution block has the wrong dimension");
}

}  // namespace

double objective_value(const BlockSdpProblem& problem, const std::vector<ComplexMatrix>& blocks) {
  check_shapes(problem, blocks);
  Complex s = 0.0;
  for (const auto& t : problem.objective) s += term_value(t, blocks[static_cast<std::size_t>(t.block)]);
  return s.real();
}

VectorXd constraint_values(const BlockSdpProblem& problem,
                           const std::vector<ComplexMatrix>& blocks) {
  check_shapes(problem, blocks);
  VectorXd v(static_cast<Eigen::Index>(problem.constraints.size()));
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    Complex s = 0.0;
    for (const auto& t : problem.constraints[i].terms)
      s += term_value(t, blocks[static_cast<std::size_t>(t.block)]);
    v(static_cast<Eigen::Index>(i)) = s.real();
  }
  return v;
}

Residuals residuals(const BlockSdpProblem& problem, const BlockSdpSolution& solution) {
  check_shapes(problem, solution.blocks);
  if (solution.y.size() != static_cast<Eigen::Index>(problem.constraints.size()))
    throw DimensionMismatch("dual vector has the wrong length");
  Residuals r;
  const VectorXd vals = constraint_values(problem, solution.blocks);
  for (std::size_t i = 0; i < problem.constraints.size(); ++i)
    r.max_constraint_violation =
        std::max(r.max_constraint_violation,
                 std::abs(vals(static_cast<Eigen::Index>(i)) - problem.constraints[i].rhs));
  r.min_block_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& b : solution.blocks) {
    const auto e = herm::herm_eig(b, 1e-6);
    r.min_block_eigenvalue = std::min(r.min_block_eigenvalue, e.values(e.values.size() - 1));
  }
  double dual = 0.0;
  for (std::size_t i = 0; i < problem.constraints.size(); ++i)
    dual += problem.constraints[i].rhs * solution.y(static_cast<Eigen::Index>(i));
  r.duality_gap = objective_value(problem, solution.blocks) - dual;
  return r;
}

void write_sparse(std::ostream& os, const BlockSdpProblem& problem) {
  os.precision(17);
  os << "# chronos-sdp v1\n";
  os << "blocks " << problem.block_dims.size();
  for (int d : problem.block_dims) os << ' ' << d;
  os << "\nconstraints " << problem.constraints.size() << '\n';
  for (std::size_t i = 0; i < problem.constraints.size(); ++i)
    os << "rhs " << (i + 1) << ' ' << problem.constraints[i].rhs << '\n';
  auto dump = [&](std::size_t idx, const Term<Complex>& t) {
    for (const auto& e : t.entries)
      os << idx << ' ' << t.block << ' ' << e.row << ' ' << e.col << ' ' << e.value.real() << ' '
         << e.value.imag() << '\n';
  };
  for (const auto& t : problem.objective) dump(0, t);
  for (std::size_t i = 0; i < problem.constraints.size(); ++i)
    for (const auto& t : problem.constraints[i].terms) dump(i + 1, t);
}

}  // namespace chronos::sdp

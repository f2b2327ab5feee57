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

#include "chronos/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace chronos::herm {

int PureState::total_dim() const {
  int n = 1;
  for (const auto& s : systems) n *= s.dim;
  return n;
}

int PureState::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < systems.size(); ++i)
    if (systems[i].label == label) return static_cast<int>(i);
  return -1;
}

double max_abs(const ComplexMatrix& m) {
  double r = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) r = std::max(r, std::abs(m(i, j)));
  return r;
}

double hermiticity_residual(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) throw DimensionMismatch("matrix is not square");
  double r = 0.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = i; j < h.cols(); ++j)
      r = std::max(r, std::abs(h(i, j) - std::conj(h(j, i))));
  return r;
}

EigenDecomposition herm_eig(const ComplexMatrix& h, double tol) {
  const double resid = hermiticity_residual(h);
  if (resid > tol) {
    std::ostringstream os;
    os << "matrix is not Hermitian (residual " << resid << ")";
    throw NotHermitian(os.str());
  }
  const Eigen::Index n = h.rows();
  if (n == 0) throw DimensionMismatch("empty matrix");

  ComplexMatrix a = (h + h.adjoint()) * 0.5;
  ComplexMatrix v = ComplexMatrix::Identity(n, n);

  auto off_norm = [&]() {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) s += std::norm(a(i, j));
    return std::sqrt(2.0 * s);
  };
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
  constexpr int kMaxSweeps = 100;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_norm() <= 1e-15 * scale) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Zero (p,q) with R = diag(1, e^{-i phi}) * [[c, s], [-s, c]].
        const Complex phase = apq / mag;  // e^{i phi}
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex r_qp = -s * std::conj(phase);
        const Complex r_qq = c * std::conj(phase);

        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = akp * c + akq * r_qp;
          a(k, q) = akp * s + akq * r_qq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk + std::conj(r_qp) * aqk;
          a(q, k) = s * apk + std::conj(r_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = vkp * c + vkq * r_qp;
          v(k, q) = vkp * s + vkq * r_qq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return a(x, x).real() > a(y, y).real();
  });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    out.values(i) = a(src, src).real();
    out.vectors.col(i) = v.col(src);
  }
  return out;
}

PureState purify(const ComplexMatrix& rho, const std::string& primary_label,
                 const std::string& ancilla_label, double rank_tol) {
  const auto eig = herm_eig(rho, std::max(rank_tol, 1e-10));
  const Eigen::Index n = rho.rows();
  if (eig.values(n - 1) < -rank_tol) {
    std::ostringstream os;
    os << "matrix is not PSD (min eigenvalue " << eig.values(n - 1) << ")";
    throw NotPSD(os.str());
  }
  int rank = 0;
  while (rank < n && eig.values(rank) > rank_tol) ++rank;
  rank = std::max(rank, 1);

  PureState st;
  st.systems = {{primary_label, static_cast<int>(n)}, {ancilla_label, rank}};
  st.amplitudes = ComplexVector::Zero(n * rank);
  for (int i = 0; i < rank; ++i) {
    const double w = std::sqrt(std::max(eig.values(i), 0.0));
    for (Eigen::Index x = 0; x < n; ++x) st.amplitudes(x * rank + i) = w * eig.vectors(x, i);
  }
  return st;
}

namespace {

// Splits each flat index of the product space into (selected, rest) indices,
// each in row-major order of the subsystems it covers.
void split_indices(const std::vector<Subsystem>& systems, const std::vector<bool>& selected,
                   std::vector<int>& sel_idx, std::vector<int>& rest_idx, int& sel_dim,
                   int& rest_dim) {
  int total = 1;
  sel_dim = 1;
  rest_dim = 1;
  for (std::size_t s = 0; s < systems.size(); ++s) {
    total *= systems[s].dim;
    (selected[s] ? sel_dim : rest_dim) *= systems[s].dim;
  }
  sel_idx.assign(static_cast<std::size_t>(total), 0);
  rest_idx.assign(static_cast<std::size_t>(total), 0);
  std::vector<int> digits(systems.size());
  for (int flat = 0; flat < total; ++flat) {
    int rem = flat;
    for (std::size_t s = systems.size(); s-- > 0;) {
      digits[s] = rem % systems[s].dim;
      rem /= systems[s].dim;
    }
    int a = 0;
    int b = 0;
    for (std::size_t s = 0; s < systems.size(); ++s) {
      if (selected[s])
        a = a * systems[s].dim + digits[s];
      else
        b = b * systems[s].dim + digits[s];
    }
    sel_idx[static_cast<std::size_t>(flat)] = a;
    rest_idx[static_cast<std::size_t>(flat)] = b;
  }
}

std::vector<bool> select_labels(const std::vector<Subsystem>& systems,
                                const std::vector<std::string>& labels) {
  std::vector<bool> sel(systems.size(), false);
  for (const auto& l : labels) {
    bool found = false;
    for (std::size_t s = 0; s < systems.size(); ++s) {
      if (systems[s].label == l) {
        sel[s] = true;
        found = true;
      }
    }
    if (!found) throw DimensionMismatch("unknown subsystem label '" + l + "'");
  }
  return sel;
}

}  // namespace

SchmidtDecomposition schmidt(const PureState& state, const std::vector<std::string>& left_systems,
                             double cutoff) {
  if (state.amplitudes.size() != state.total_dim())
    throw DimensionMismatch("amplitude vector does not match subsystem dimensions");
  const auto sel = select_labels(state.systems, left_systems);
  const auto n_sel = std::count(sel.begin(), sel.end(), true);
  if (n_sel == 0 || n_sel == static_cast<long>(sel.size()))
    throw DimensionMismatch("left systems must be a nonempty proper subset");

  std::vector<int> li, ri;
  int ld = 0, rd = 0;
  split_indices(state.systems, sel, li, ri, ld, rd);
  ComplexMatrix m = ComplexMatrix::Zero(ld, rd);
  for (Eigen::Index f = 0; f < state.amplitudes.size(); ++f)
    m(li[static_cast<std::size_t>(f)], ri[static_cast<std::size_t>(f)]) = state.amplitudes(f);

  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Eigen::Index keep = 0;
  while (keep < sv.size() && sv(keep) * sv(keep) > cutoff) ++keep;

  SchmidtDecomposition out;
  out.coefficients = sv.head(keep).array().square().matrix();
  out.left = svd.matrixU().leftCols(keep);
  // m = U S V^dagger, so the right factor of component j is conj(V(:, j)).
  out.right = svd.matrixV().leftCols(keep).conjugate();
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<Subsystem>& systems,
                            const std::vector<std::string>& traced) {
  int total = 1;
  for (const auto& s : systems) total *= s.dim;
  if (m.rows() != total || m.cols() != total)
    throw DimensionMismatch("operator dimension does not factor over the given subsystems");
  auto sel = select_labels(systems, traced);
  for (auto&& b : sel) b = !b;  // select kept systems

  std::vector<int> keep_idx, tr_idx;
  int kd = 0, td = 0;
  split_indices(systems, sel, keep_idx, tr_idx, kd, td);
  ComplexMatrix out = ComplexMatrix::Zero(kd, kd);
  for (int c = 0; c < total; ++c) {
    const int tc = tr_idx[static_cast<std::size_t>(c)];
    const int kc = keep_idx[static_cast<std::size_t>(c)];
    for (int r = 0; r < total; ++r) {
      if (tr_idx[static_cast<std::size_t>(r)] != tc) continue;
      out(keep_idx[static_cast<std::size_t>(r)], kc) += m(r, c);
    }
  }
  return out;
}

ComplexMatrix density(const PureState& state) {
  return state.amplitudes * state.amplitudes.adjoint();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& h) {
  const auto eig = herm_eig(h, 1e-8);
  RealVector root = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * root.asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix polar_unitary(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("polar_unitary needs a square matrix");
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

ComplexMatrix polar_isometry(const ComplexMatrix& m) {
  if (m.rows() < m.cols()) throw DimensionMismatch("polar_isometry needs rows >= cols");
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

ComplexMatrix orthogonal_complement(const ComplexMatrix& basis) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index r = basis.cols();
  if (r >= n) return ComplexMatrix(n, 0);
  if (r == 0) return ComplexMatrix::Identity(n, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(basis);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  return q.rightCols(n - r);
}

}  // namespace chronos::herm

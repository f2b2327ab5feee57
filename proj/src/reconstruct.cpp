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

#include "chronos/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chronos::reconstruct {

namespace {

using herm::Complex;

constexpr double kPurifyRankTol = 1e-9;
constexpr double kSchmidtCutoff = 1e-12;
constexpr double kSigmaEigenCutoff = 1e-11;

/// rho^{OQ}(t) = sum_k B_k (x) |k><k| with O the most significant index.
ComplexMatrix joint_state(const std::vector<ComplexMatrix>& blocks) {
  const auto d = blocks.front().rows();
  const auto q = static_cast<Eigen::Index>(blocks.size());
  ComplexMatrix rho = ComplexMatrix::Zero(d * q, d * q);
  for (Eigen::Index k = 0; k < q; ++k)
    for (Eigen::Index x = 0; x < d; ++x)
      for (Eigen::Index y = 0; y < d; ++y) rho(x * q + k, y * q + k) = blocks[static_cast<std::size_t>(k)](x, y);
  return rho;
}

/// Purification as a d x (Q A) matrix, row x holding the querier vector
/// paired with oracle basis state |x>, padded with zeros up to `ancilla`.
ComplexMatrix as_matrix(const herm::PureState& p, int d, int q, int ancilla) {
  const int r = p.systems[1].dim;
  ComplexMatrix m = ComplexMatrix::Zero(d, q * ancilla);
  for (int x = 0; x < d; ++x)
    for (int k = 0; k < q; ++k)
      for (int i = 0; i < r; ++i) m(x, k * ancilla + i) = p.amplitudes((x * q + k) * r + i);
  return m;
}

/// Applies the query to every row of a purification matrix.
ComplexMatrix query_rows(const ComplexMatrix& m, const RealVector& omegas, int q, int ancilla) {
  ComplexMatrix out = m;
  for (Eigen::Index x = 0; x < m.rows(); ++x)
    for (int k = 1; k < q; ++k) out.row(x).segment(k * ancilla, ancilla) *= std::polar(1.0, k * omegas(x));
  return out;
}

ComplexMatrix inverse_sqrt_on_support(const ComplexMatrix& g, double floor, ComplexMatrix& uncovered) {
  const auto e = herm::herm_eig(g);
  ComplexMatrix t = ComplexMatrix::Zero(g.rows(), g.cols());
  std::vector<Eigen::Index> missing;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (e.values(i) > floor) {
      t += (1.0 / std::sqrt(e.values(i))) * e.vectors.col(i) * e.vectors.col(i).adjoint();
    } else {
      missing.push_back(i);
    }
  }
  uncovered.resize(g.rows(), static_cast<Eigen::Index>(missing.size()));
  for (std::size_t j = 0; j < missing.size(); ++j) uncovered.col(static_cast<Eigen::Index>(j)) = e.vectors.col(missing[j]);
  return t;
}

nlohmann::json matrix_json(const ComplexMatrix& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r, c;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return {{"re", re}, {"im", im}};
}

}  // namespace

ComplexVector apply_query(const ComplexVector& psi, int atoms, int ancilla_dim, double omega) {
  ComplexVector out = psi;
  for (int k = 1; k <= atoms; ++k) out.segment(k * ancilla_dim, ancilla_dim) *= std::polar(1.0, k * omega);
  return out;
}

ReconstructedProtocol reconstruct_unitaries(const program::InterrogationSolution& solution) {
  const int q = solution.atoms + 1;
  const int d = solution.d();
  const int tf = solution.queries;
  std::vector<herm::PureState> purifications;
  int ancilla = 1;
  for (int t = 0; t < tf; ++t) {
    purifications.push_back(herm::purify(joint_state(solution.B[static_cast<std::size_t>(t)]), "OQ", "A", kPurifyRankTol));
    ancilla = std::max(ancilla, purifications.back().systems[1].dim);
  }
  std::vector<ComplexMatrix> mats;
  for (const auto& p : purifications) mats.push_back(as_matrix(p, d, q, ancilla));

  ReconstructedProtocol proto;
  proto.atoms = solution.atoms;
  proto.queries = tf;
  proto.ancilla_dim = ancilla;
  proto.estimates = solution.estimates;
  // rho^O(0) is the pure state sqrt(p), so the purification factors as
  // sqrt(p) (x) psi0 and psi0 is its contraction with sqrt(p).
  const ComplexVector root = solution.prior.weights.cwiseSqrt().cast<Complex>();
  ComplexVector psi0 = mats[0].transpose() * root;
  psi0 /= psi0.norm();
  proto.psi0.systems = {{"Q", q}, {"A", ancilla}};
  proto.psi0.amplitudes = psi0;

  for (int t = 0; t + 1 < tf; ++t) {
    const ComplexMatrix queried = query_rows(mats[static_cast<std::size_t>(t)], solution.prior.omegas, q, ancilla);
    const ComplexMatrix& next = mats[static_cast<std::size_t>(t + 1)];
    const double mismatch = herm::max_abs(queried * queried.adjoint() - next * next.adjoint());
    if (mismatch > 1e-6) {
      std::ostringstream os;
      os << "oracle marginals before and after step " << t + 1 << " differ by " << mismatch;
      throw EigenbasisMismatch(os.str());
    }
    // Both purify the same oracle marginal. The Procrustes unitary maps one
    // onto the other exactly on the support, without choosing eigenbases.
    proto.unitaries.push_back(herm::polar_unitary(next.transpose() * queried.conjugate()));
  }
  return proto;
}

herm::PureState final_state(const ReconstructedProtocol& protocol, const model::DiscretizedPrior& dp) {
  const int dim = protocol.querier_dim();
  herm::PureState s;
  s.systems = {{"O", dp.size()}, {"Q", protocol.atoms + 1}, {"A", protocol.ancilla_dim}};
  s.amplitudes.resize(static_cast<Eigen::Index>(dp.size()) * dim);
  for (int x = 0; x < dp.size(); ++x) {
    ComplexVector psi = apply_query(protocol.psi0.amplitudes, protocol.atoms, protocol.ancilla_dim, dp.omegas(x));
    for (const auto& v : protocol.unitaries)
      psi = apply_query(v * psi, protocol.atoms, protocol.ancilla_dim, dp.omegas(x));
    s.amplitudes.segment(static_cast<Eigen::Index>(x) * dim, dim) = std::sqrt(dp.weights(x)) * psi;
  }
  return s;
}

Povm build_povm(const herm::PureState& final_state, const std::vector<ComplexMatrix>& sigma) {
  const int d = final_state.systems.front().dim;
  const int dim = final_state.total_dim() / d;
  const ComplexMatrix m = Eigen::Map<const ComplexMatrix>(final_state.amplitudes.data(), dim, d).transpose();
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (const auto& s : sigma) total += s;
  const double mismatch = herm::max_abs(m * m.adjoint() - total);
  if (mismatch > 1e-7) {
    std::ostringstream os;
    os << "sum of conditional oracle states differs from the oracle marginal by " << mismatch;
    throw RemotePrepMismatch(os.str());
  }

  std::vector<std::string> left{final_state.systems.front().label};
  const auto sd = herm::schmidt(final_state, left, kSchmidtCutoff);
  const auto r = sd.coefficients.size();
  const RealVector inv_root = sd.coefficients.cwiseSqrt().cwiseInverse();

  // K_a K_a^dagger = S^{-1} Phi^dagger sigma_a Phi S^{-1} from the spectral
  // decomposition of sigma_a.
  std::vector<ComplexMatrix> k(sigma.size());
  ComplexMatrix g = ComplexMatrix::Zero(r, r);
  for (std::size_t a = 0; a < sigma.size(); ++a) {
    const auto e = herm::herm_eig(0.5 * (sigma[a] + sigma[a].adjoint()));
    Eigen::Index keep = 0;
    while (keep < e.values.size() && e.values(keep) > kSigmaEigenCutoff) ++keep;
    ComplexMatrix v = e.vectors.leftCols(keep) * e.values.head(keep).cwiseSqrt().asDiagonal();
    k[a] = inv_root.asDiagonal() * (sd.left.adjoint() * v);
    g += k[a] * k[a].adjoint();
  }
  // g equals the identity up to solver tolerance; renormalizing makes the
  // measurement exactly complete on the covered part of the support.
  ComplexMatrix uncovered;
  const ComplexMatrix t = inverse_sqrt_on_support(g, 1e-8, uncovered);

  ComplexMatrix completion = herm::orthogonal_complement(sd.right);
  if (uncovered.cols() > 0) {
    ComplexMatrix extra = sd.right * uncovered.conjugate();
    ComplexMatrix both(dim, completion.cols() + extra.cols());
    both << completion, extra;
    completion = both;
  }

  Povm p;
  for (std::size_t a = 0; a < sigma.size(); ++a) {
    ComplexMatrix l = sd.right * (t * k[a]).conjugate();
    if (a == 0 && completion.cols() > 0) {
      ComplexMatrix both(dim, l.cols() + completion.cols());
      both << l, completion;
      l = both;
    }
    p.elements.push_back(l * l.adjoint());
    p.factors.push_back(std::move(l));
  }
  return p;
}

ReconstructedProtocol reconstruct_protocol(const program::InterrogationSolution& solution) {
  auto proto = reconstruct_unitaries(solution);
  proto.povm = build_povm(final_state(proto, solution.prior), solution.sigma);
  return proto;
}

RealVector simulate(const ReconstructedProtocol& protocol, double omega) {
  ComplexVector psi = apply_query(protocol.psi0.amplitudes, protocol.atoms, protocol.ancilla_dim, omega);
  for (const auto& v : protocol.unitaries) psi = apply_query(v * psi, protocol.atoms, protocol.ancilla_dim, omega);
  RealVector q(protocol.outcomes());
  for (int a = 0; a < protocol.outcomes(); ++a)
    q(a) = (protocol.povm.factors[static_cast<std::size_t>(a)].adjoint() * psi).squaredNorm();
  return q;
}

RealVector dicke_amplitudes(const ReconstructedProtocol& protocol) {
  RealVector amp(protocol.atoms + 1);
  for (int k = 0; k <= protocol.atoms; ++k)
    amp(k) = protocol.psi0.amplitudes.segment(k * protocol.ancilla_dim, protocol.ancilla_dim).norm();
  return amp;
}

bool VerifyReport::passing(double tol) const {
  return marginal_residual <= tol && completeness_residual <= tol && positivity_residual <= tol &&
         unitarity_residual <= tol && norm_residual <= tol && expected_cost_residual <= tol;
}

VerifyReport verify_protocol(const ReconstructedProtocol& protocol, const program::InterrogationSolution& solution) {
  VerifyReport r;
  const auto& dp = solution.prior;
  double cost = 0.0;
  const bool shapes_ok = protocol.outcomes() == solution.outcomes();
  for (int x = 0; x < dp.size(); ++x) {
    const RealVector q = simulate(protocol, dp.omegas(x));
    for (int a = 0; a < std::min(protocol.outcomes(), solution.outcomes()); ++a) {
      const double target = solution.sigma[static_cast<std::size_t>(a)](x, x).real();
      r.marginal_residual = std::max(r.marginal_residual, std::abs(q(a) * dp.weights(x) - target));
      cost += solution.cost_model.value(dp.omegas(x) - solution.estimates[static_cast<std::size_t>(a)]) * q(a) * dp.weights(x);
    }
  }
  if (!shapes_ok) r.marginal_residual = std::max(r.marginal_residual, 1.0);
  r.expected_cost_residual = std::abs(cost - solution.cost);
  const int dim = protocol.querier_dim();
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const auto& p : protocol.povm.elements) {
    sum += p;
    r.positivity_residual = std::max(r.positivity_residual, -herm::herm_eig(0.5 * (p + p.adjoint())).values.minCoeff());
  }
  r.completeness_residual = herm::max_abs(sum - ComplexMatrix::Identity(dim, dim));
  for (const auto& v : protocol.unitaries)
    r.unitarity_residual = std::max(r.unitarity_residual, herm::max_abs(v.adjoint() * v - ComplexMatrix::Identity(dim, dim)));
  r.norm_residual = std::abs(protocol.psi0.amplitudes.norm() - 1.0);
  return r;
}

double worst_residual(const VerifyReport& r) {
  return std::max({r.marginal_residual, r.completeness_residual, r.positivity_residual, r.unitarity_residual,
                   r.norm_residual, r.expected_cost_residual});
}

nlohmann::json to_json(const VerifyReport& r) {
  return {{"marginal", r.marginal_residual},     {"completeness", r.completeness_residual},
          {"positivity", r.positivity_residual}, {"unitarity", r.unitarity_residual},
          {"norm", r.norm_residual},             {"expected_cost", r.expected_cost_residual}};
}

nlohmann::json to_json(const ReconstructedProtocol& protocol) {
  nlohmann::json j;
  j["atoms"] = protocol.atoms;
  j["queries"] = protocol.queries;
  j["ancilla_dim"] = protocol.ancilla_dim;
  j["psi0"] = matrix_json(protocol.psi0.amplitudes);
  const RealVector amp = dicke_amplitudes(protocol);
  j["dicke_amplitudes"] = std::vector<double>(amp.data(), amp.data() + amp.size());
  j["unitaries"] = nlohmann::json::array();
  for (const auto& v : protocol.unitaries) j["unitaries"].push_back(matrix_json(v));
  j["povm"] = nlohmann::json::array();
  for (const auto& p : protocol.povm.elements) j["povm"].push_back(matrix_json(p));
  j["estimates"] = protocol.estimates;
  return j;
}

}  // namespace chronos::reconstruct

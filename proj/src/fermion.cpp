#include "ascqa/fermion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ascqa/errors.hpp"

namespace ascqa {

namespace {

// Singular values closer than this (relative to the largest) are one cluster.
constexpr double kDegenerateTol = 1e-11;
// Singular values below this (relative to the largest) form the zero-mode cluster.
constexpr double kZeroTol = 1e-12;

// Index of the largest-magnitude entry; among near-ties the lowest index wins.
Eigen::Index pivot_index(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (std::abs(v(j)) >= peak * (1.0 - 1e-9)) return j;
  return 0;
}

// Orthogonal m x m rotation R such that the rows of R * basis are obtained by
// Gram-Schmidt on the projections of the unit vectors e_0, e_1, ... onto the row
// space of `basis` (m x N, orthonormal rows), taken in site order.
Eigen::MatrixXd canonical_rotation(const Eigen::MatrixXd& basis) {
  const Eigen::Index m = basis.rows(), n = basis.cols();
  // Residual norms of the projections sum to the remaining dimension, so some unit
  // vector always clears this threshold.
  const double tau = 0.25 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd R(m, m);
  Eigen::Index got = 0;
  for (Eigen::Index j = 0; j < n && got < m; ++j) {
    Eigen::VectorXd c = basis.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index r = 0; r < got; ++r) c -= R.row(r).dot(c) * R.row(r).transpose();
    const double norm = c.norm();
    if (norm > tau) R.row(got++) = c.transpose() / norm;
  }
  if (got < m) throw NumericalError("degenerate-subspace canonicalization failed");
  return R;
}

std::string condition_report(const Eigen::MatrixXd& C) {
  std::ostringstream os;
  os << "singular value decomposition of A+B (" << C.rows() << "x" << C.cols()
     << ", max |entry| " << C.cwiseAbs().maxCoeff() << ") produced non-finite output";
  return os.str();
}

}  // namespace

CouplingMatrices build_matrices(double gamma, std::span<const double> couplings) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw ConstraintError("transverse field must be finite and >= 0");
  const auto n = static_cast<Eigen::Index>(couplings.size()) + 1;
  CouplingMatrices m;
  m.gamma = gamma;
  m.couplings.assign(couplings.begin(), couplings.end());
  m.mat_a = Eigen::MatrixXd::Zero(n, n);
  m.mat_b = Eigen::MatrixXd::Zero(n, n);
  m.mat_a.diagonal().setConstant(2.0 * gamma);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double J = couplings[static_cast<std::size_t>(i)];
    if (!std::isfinite(J)) throw ConstraintError("couplings must be finite");
    m.mat_a(i, i + 1) = m.mat_a(i + 1, i) = -J;
    m.mat_b(i, i + 1) = -J;
    m.mat_b(i + 1, i) = J;
  }
  return m;
}

FermionSpectrum diagonalize(const CouplingMatrices& m) {
  const Eigen::Index n = m.size();
  const Eigen::MatrixXd C = m.mat_a + m.mat_b;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const Eigen::MatrixXd& U = svd.matrixU();
  const Eigen::MatrixXd& V = svd.matrixV();
  if (!sv.allFinite() || !U.allFinite() || !V.allFinite())
    throw NumericalError(condition_report(C));

  FermionSpectrum out;
  out.lambdas.resize(n);
  out.phi.resize(n, n);
  out.psi.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = n - 1 - k;  // singular values come out descending
    out.lambdas(k) = sv(src);
    out.phi.row(k) = V.col(src).transpose();
    out.psi.row(k) = U.col(src).transpose();
  }

  const double lmax = out.lambdas(n - 1);
  const double zero_cut = kZeroTol * lmax;
  auto fix_sign = [&](Eigen::Index k, bool pair) {
    if (out.phi(k, pivot_index(out.phi.row(k))) < 0.0) {
      out.phi.row(k) *= -1.0;
      if (pair) out.psi.row(k) *= -1.0;
    }
    if (!pair && out.psi(k, pivot_index(out.psi.row(k))) < 0.0) out.psi.row(k) *= -1.0;
  };

  for (Eigen::Index k = 0; k < n;) {
    Eigen::Index e = k + 1;
    const bool zero = out.lambdas(k) <= zero_cut;
    if (zero) {
      while (e < n && out.lambdas(e) <= zero_cut) ++e;
    } else {
      while (e < n && out.lambdas(e) - out.lambdas(e - 1) <= kDegenerateTol * lmax) ++e;
    }
    const Eigen::Index size = e - k;
    if (zero) {
      // Psi is not fixed by the pairing relation here; complete both bases canonically.
      if (size > 1) {
        const Eigen::MatrixXd phi_block = out.phi.middleRows(k, size);
        const Eigen::MatrixXd psi_block = out.psi.middleRows(k, size);
        out.phi.middleRows(k, size) = canonical_rotation(phi_block) * phi_block;
        out.psi.middleRows(k, size) = canonical_rotation(psi_block) * psi_block;
      }
      for (Eigen::Index r = k; r < e; ++r) fix_sign(r, false);
      out.lambdas.segment(k, size).setZero();
    } else {
      if (size > 1) {
        const Eigen::MatrixXd phi_block = out.phi.middleRows(k, size);
        const Eigen::MatrixXd R = canonical_rotation(phi_block);
        out.phi.middleRows(k, size) = R * phi_block;
        out.psi.middleRows(k, size) = R * out.psi.middleRows(k, size);
      }
      for (Eigen::Index r = k; r < e; ++r) fix_sign(r, true);
    }
    k = e;
  }
  out.ground_energy = -0.5 * out.lambdas.sum();
  return out;
}

FermionSpectrum diagonalize(double gamma, std::span<const double> couplings) {
  return diagonalize(build_matrices(gamma, couplings));
}

FermionSpectrum spectrum_at(const AnnealSchedule& schedule, std::span<const double> couplings,
                            double s) {
  const auto [a, b] = schedule(s);
  std::vector<double> scaled(couplings.begin(), couplings.end());
  for (double& J : scaled) J *= b;
  return diagonalize(a, scaled);
}

Eigen::VectorXd eigen_lambdas(const CouplingMatrices& m) {
  const Eigen::MatrixXd apb = m.mat_a + m.mat_b;
  const Eigen::MatrixXd product = (m.mat_a - m.mat_b) * apb;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(product);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolve of (A-B)(A+B) failed");
  // lambda_k = |(A+B) phi_k| rather than sqrt(lambda_k^2): the square root of an
  // eigenvalue of the squared matrix loses half the digits for small lambda.
  Eigen::VectorXd lambdas = (apb * es.eigenvectors()).colwise().norm().transpose();
  std::sort(lambdas.begin(), lambdas.end());
  return lambdas;
}

double ground_energy_trace(const CouplingMatrices& m, const Eigen::VectorXd& lambdas) {
  return -m.size() * m.gamma + 0.5 * (m.mat_a.trace() - lambdas.sum());
}

OccupationState::OccupationState(std::vector<int> modes) : modes_(std::move(modes)) {
  std::sort(modes_.begin(), modes_.end());
  if (!modes_.empty() && modes_.front() < 1)
    throw ConstraintError("occupation labels start at 1");
  if (std::adjacent_find(modes_.begin(), modes_.end()) != modes_.end())
    throw ConstraintError("occupation labels must be distinct");
}

bool OccupationState::contains(int mode) const {
  return std::binary_search(modes_.begin(), modes_.end(), mode);
}

double state_energy(const FermionSpectrum& spectrum, const OccupationState& occ) {
  if (occ.max_mode() > spectrum.size()) throw ConstraintError("occupation label exceeds N");
  double e = spectrum.ground_energy;
  for (int k : occ.modes()) e += spectrum.lambdas(k - 1);
  return e;
}

std::vector<int> domain_wall_decode(const OccupationState& occ, std::span<const double> couplings) {
  const int n = static_cast<int>(couplings.size()) + 1;
  if (occ.max_mode() > n) throw ConstraintError("occupation label exceeds N");
  std::vector<int> order(couplings.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return couplings[a] < couplings[b]; });
  std::vector<int> walls;
  for (int k : occ.modes())
    if (k >= 2) walls.push_back(order[k - 2] + 1);
  std::sort(walls.begin(), walls.end());
  return walls;
}

}  // namespace ascqa

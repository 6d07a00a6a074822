#include "ascqa/wick.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "ascqa/errors.hpp"

namespace ascqa {

namespace {

// Pfaffian of a real antisymmetric matrix by skew-symmetric Gaussian elimination
// with pivoting (Parlett-Reid). The matrix is consumed.
double pfaffian(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  if (n % 2 == 1) return 0.0;
  double pf = 1.0;
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index kp;
    a.row(k).tail(n - k - 1).cwiseAbs().maxCoeff(&kp);
    kp += k + 1;
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    const double pivot = a(k, k + 1);
    if (pivot == 0.0) return 0.0;
    pf *= pivot;
    const Eigen::Index rest = n - k - 2;
    if (rest > 0) {
      const Eigen::VectorXd tau = a.row(k).tail(rest).transpose() / pivot;
      const Eigen::VectorXd col = a.col(k + 1).tail(rest);
      a.bottomRightCorner(rest, rest).noalias() += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

}  // namespace

ContractionTables build_tables(const FermionSpectrum& spectrum) {
  const Eigen::Index n = spectrum.size();
  ContractionTables t;
  t.g = spectrum.phi.transpose() * spectrum.psi;
  t.g_tilde = Eigen::MatrixXd::Zero(n, n);
  t.g_tilde.row(0) = t.g.row(0);

  // For row i the determinant over rows 0..i and columns (0..i-1, j) is linear in
  // column j: det = l . g(0..i, j). The covector l comes from a row-pivoted LU of the
  // fixed (i+1) x i block, whose pivot choices do not depend on column j.
  Eigen::MatrixXd w;
  std::vector<Eigen::Index> perm;
  Eigen::Matrix<long double, Eigen::Dynamic, 1> y;
  for (Eigen::Index i = 1; i < n; ++i) {
    const Eigen::Index rows = i + 1;
    w = t.g.topLeftCorner(rows, i);
    perm.resize(static_cast<std::size_t>(rows));
    for (Eigen::Index r = 0; r < rows; ++r) perm[static_cast<std::size_t>(r)] = r;
    long double scale = 1.0L;
    bool singular = false;
    for (Eigen::Index k = 0; k < i; ++k) {
      Eigen::Index p;
      w.col(k).tail(rows - k).cwiseAbs().maxCoeff(&p);
      p += k;
      if (p != k) {
        w.row(k).swap(w.row(p));
        std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(p)]);
        scale = -scale;
      }
      const double pivot = w(k, k);
      if (pivot == 0.0) {
        singular = true;
        break;
      }
      scale *= pivot;
      const Eigen::Index below = rows - k - 1;
      w.col(k).tail(below) /= pivot;
      const Eigen::Index right = i - k - 1;
      if (right > 0)
        w.bottomRightCorner(below, right).noalias() -=
            w.col(k).tail(below) * w.row(k).segment(k + 1, right);
    }
    if (singular) continue;  // leading block rank-deficient: the whole row vanishes

    // Last row of L^{-1} for the unit lower-triangular L completed by e_i.
    y.resize(rows);
    y(i) = 1.0L;
    for (Eigen::Index k = i - 1; k >= 0; --k) {
      long double acc = 0.0L;
      for (Eigen::Index r = k + 1; r < rows; ++r) acc += static_cast<long double>(w(r, k)) * y(r);
      y(k) = -acc;
    }
    Eigen::VectorXd ell(rows);
    for (Eigen::Index r = 0; r < rows; ++r)
      ell(perm[static_cast<std::size_t>(r)]) = static_cast<double>(scale * y(r));
    t.g_tilde.row(i).tail(n - i) = ell.transpose() * t.g.block(0, i, rows, n - i);
  }
  if (!t.g_tilde.allFinite()) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j)
        if (!std::isfinite(t.g_tilde(i, j)))
          throw NumericalError("contraction determinant not finite at (i, j) = (" +
                               std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")");
  }
  t.theta = t.g_tilde * spectrum.psi.transpose();
  return t;
}

double three_fermion_element(const FermionSpectrum& spectrum, int site,
                             const OccupationState& abc) {
  const int n = spectrum.size();
  if (site < 1 || site > n) throw ConstraintError("site label outside 1..N");
  if (abc.count() != 3) throw ConstraintError("three-fermion element needs exactly three modes");
  if (abc.max_mode() > n) throw ConstraintError("occupation label exceeds N");

  // Operator string  eta_c eta_b eta_a A_1 B_1 ... A_{site-1} B_{site-1} A_site.
  enum Kind { kEta, kA, kB };
  struct Op {
    Kind kind;
    int index;  // 0-based mode or site
  };
  std::vector<Op> ops;
  const auto modes = abc.modes();
  for (int m = 2; m >= 0; --m) ops.push_back({kEta, modes[static_cast<std::size_t>(m)] - 1});
  for (int j = 0; j + 1 < site; ++j) {
    ops.push_back({kA, j});
    ops.push_back({kB, j});
  }
  ops.push_back({kA, site - 1});

  // Pairwise vacuum contractions <x y> for x before y in the string. The eta
  // operators all precede the chain operators, and two annihilators never contract.
  const Eigen::MatrixXd g = spectrum.phi.transpose() * spectrum.psi;
  auto contract = [&](const Op& x, const Op& y) -> double {
    if (x.kind == kEta) {
      if (y.kind == kEta) return 0.0;
      return y.kind == kA ? spectrum.phi(x.index, y.index) : spectrum.psi(x.index, y.index);
    }
    if (x.kind == kA && y.kind == kA) return x.index == y.index ? 1.0 : 0.0;
    if (x.kind == kB && y.kind == kB) return x.index == y.index ? -1.0 : 0.0;
    if (x.kind == kA) return g(x.index, y.index);
    return -g(y.index, x.index);
  };
  const auto size = static_cast<Eigen::Index>(ops.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index p = 0; p < size; ++p)
    for (Eigen::Index q = p + 1; q < size; ++q) {
      m(p, q) = contract(ops[static_cast<std::size_t>(p)], ops[static_cast<std::size_t>(q)]);
      m(q, p) = -m(p, q);
    }
  return pfaffian(std::move(m));
}

double transition_weight(const ContractionTables& tables, int mode) {
  if (mode < 1 || mode > tables.theta.cols()) throw ConstraintError("mode label outside 1..N");
  return tables.theta.col(mode - 1).squaredNorm();
}

Eigen::VectorXd transition_weights(const ContractionTables& tables) {
  return tables.theta.colwise().squaredNorm().transpose();
}

double reduced_element(const OccupationState& gamma1, const OccupationState& gamma2, int site,
                       const FermionSpectrum& spectrum, const ContractionTables& tables) {
  if (site < 1 || site > spectrum.size()) throw ConstraintError("site label outside 1..N");
  std::vector<int> diff;
  for (int k : gamma1.modes())
    if (!gamma2.contains(k)) diff.push_back(k);
  if (static_cast<int>(diff.size()) + gamma2.count() != gamma1.count()) return 0.0;
  const double phase = gamma2.count() % 2 == 0 ? 1.0 : -1.0;
  if (diff.size() == 1) return phase * tables.theta(site - 1, diff[0] - 1);
  if (diff.size() == 3)
    return phase * three_fermion_element(spectrum, site, OccupationState(std::move(diff)));
  return 0.0;
}

}  // namespace ascqa

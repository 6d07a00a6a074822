#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ascqa/chain.hpp"

namespace ascqa {

/// Quadratic-form matrices of the Jordan-Wigner fermionized chain Hamiltonian
/// H = -Gamma sum sigma^x - sum J_i sigma^z_i sigma^z_{i+1}.
///
/// mat_a: symmetric tridiagonal, diagonal 2*Gamma, off-diagonals -J_i.
/// mat_b: antisymmetric tridiagonal, upper off-diagonal -J_i, lower +J_i.
struct CouplingMatrices {
  Eigen::MatrixXd mat_a;
  Eigen::MatrixXd mat_b;
  double gamma = 0.0;
  std::vector<double> couplings;

  int size() const { return static_cast<int>(mat_a.rows()); }
};

/// Requires gamma >= 0 and N-1 couplings (N >= 1). Throws ConstraintError otherwise.
CouplingMatrices build_matrices(double gamma, std::span<const double> couplings);

/// Single-fermion spectrum and Bogoliubov matrices at one anneal point.
///
/// Row k of `phi` / `psi` (0-based) is the mode with the (k+1)-th smallest energy.
/// They satisfy  psi_k (A+B) = lambda_k phi_k  and  phi_k (A-B)(A+B) = lambda_k^2 phi_k,
/// with phi, psi orthogonal. Sign convention: the largest-magnitude entry of each
/// phi row is positive (for the zero mode the psi row is sign-fixed the same way).
struct FermionSpectrum {
  Eigen::VectorXd lambdas;  ///< ascending, >= 0 [GHz]
  Eigen::MatrixXd phi;      ///< mode x site
  Eigen::MatrixXd psi;      ///< mode x site
  double ground_energy = 0.0;

  int size() const { return static_cast<int>(lambdas.size()); }
  /// Inverse transforms (site x mode): phi_bar(i,k) = phi(k,i).
  Eigen::MatrixXd phi_bar() const { return phi.transpose(); }
  Eigen::MatrixXd psi_bar() const { return psi.transpose(); }
};

/// Singular-value route: lambda are the singular values of A+B.
/// Throws NumericalError if the decomposition produces non-finite output.
FermionSpectrum diagonalize(const CouplingMatrices& m);

/// Shorthand for diagonalize(build_matrices(gamma, couplings)).
FermionSpectrum diagonalize(double gamma, std::span<const double> couplings);

/// Spectrum of H(s) = -A(s) sum sigma^x - B(s) sum J_i sigma^z sigma^z.
FermionSpectrum spectrum_at(const AnnealSchedule& schedule, std::span<const double> couplings,
                            double s);

/// Independent route for the single-fermion energies from the symmetric eigensolve
/// of (A-B)(A+B): lambda_k = |(A+B) phi_k| for each eigenvector phi_k, ascending.
Eigen::VectorXd eigen_lambdas(const CouplingMatrices& m);

/// Ground energy from the trace identity  -N*Gamma + (tr A - sum lambda)/2.
double ground_energy_trace(const CouplingMatrices& m, const Eigen::VectorXd& lambdas);

/// Set of occupied single-fermion modes, labelled 1..N. Empty set is the vacuum.
class OccupationState {
 public:
  OccupationState() = default;
  /// Sorts the labels; throws ConstraintError on duplicates or labels < 1.
  explicit OccupationState(std::vector<int> modes);
  OccupationState(std::initializer_list<int> modes)
      : OccupationState(std::vector<int>(modes)) {}

  std::span<const int> modes() const { return modes_; }
  int count() const { return static_cast<int>(modes_.size()); }
  bool empty() const { return modes_.empty(); }
  bool contains(int mode) const;
  int max_mode() const { return modes_.empty() ? 0 : modes_.back(); }

  friend bool operator==(const OccupationState&, const OccupationState&) = default;

 private:
  std::vector<int> modes_;
};

/// E_g + sum of the occupied lambda. Throws ConstraintError for labels > N.
double state_energy(const FermionSpectrum& spectrum, const OccupationState& occ);

/// Zero-field reading of an occupation: mode k+1 (k >= 1) is a domain wall on the
/// k-th weakest coupling (ties in coupling order); mode 1 is the zero mode and
/// breaks nothing. Returns the broken coupling labels i (J_i joins spins i, i+1),
/// ascending.
std::vector<int> domain_wall_decode(const OccupationState& occ, std::span<const double> couplings);

}  // namespace ascqa

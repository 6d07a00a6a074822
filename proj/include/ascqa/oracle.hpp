#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ascqa/bath.hpp"
#include "ascqa/chain.hpp"
#include "ascqa/fermion.hpp"

namespace ascqa {

/// Brute-force reference implementation in the full 2^N spin space, for validation.

inline constexpr int kOracleMaxSpins = 12;
inline constexpr int kOracleMaxDynamicsSpins = 8;

/// Eigen-decomposition of H = -Gamma sum sigma^x - sum J_i sigma^z_i sigma^z_{i+1}
/// in the sigma^z product basis (bit i of the basis index set <=> spin i+1 down).
/// The Hamiltonian commutes with P = prod sigma^x; each eigenvector is taken inside one
/// P sector so that the global spin-flip degeneracy never mixes sectors.
struct DenseSpectrum {
  int num_spins = 0;
  Eigen::VectorXd energies;  ///< ascending
  Eigen::MatrixXd vectors;   ///< columns are eigenvectors, same order as energies
  std::vector<int> parity;   ///< +1 / -1 eigenvalue of prod sigma^x per eigenvector
};

/// Dense 2^N x 2^N Hamiltonian. Throws SizeError for N > kOracleMaxSpins.
Eigen::MatrixXd hamiltonian_matrix(double gamma, std::span<const double> couplings);

/// Throws SizeError for N > kOracleMaxSpins.
DenseSpectrum exact_spectrum(double gamma, std::span<const double> couplings);
/// Spectrum of H(s) = -A(s) sum sigma^x - B(s) sum J_i sigma^z sigma^z.
DenseSpectrum exact_spectrum_at(const AnnealSchedule& schedule, std::span<const double> couplings,
                                double s);

/// All 2^N many-body energies E_g + sum_{k in S} lambda_k, ascending. N <= 20.
std::vector<double> fermionic_many_body_energies(const FermionSpectrum& spectrum);

/// Signed <a|sigma^z_site|b> between eigenvectors (site is 1-based).
Eigen::MatrixXd sigma_z_eigenbasis(const DenseSpectrum& spectrum, int site);

/// Groups of eigenvector indices with equal parity and energies within `tol`
/// (chained), ordered by energy.
std::vector<std::vector<int>> degenerate_groups(const DenseSpectrum& spectrum, double tol = 1e-9);

/// Basis-independent |<a|sigma^z_site|b>|: for every pair of degenerate groups the
/// Frobenius norm of the projected block sqrt(sum_{a in A, b in B} |<a|sigma^z|b>|^2).
/// For non-degenerate levels this is the plain absolute matrix element.
struct SigmaZElements {
  std::vector<std::vector<int>> groups;
  Eigen::MatrixXd norms;  ///< group x group
};
SigmaZElements exact_sigma_z_elements(const DenseSpectrum& spectrum, int site, double tol = 1e-9);

/// Pauli-master-equation rate matrix W(a, b) = gamma(E_b - E_a) M_ab for b -> a,
/// M_ab = sum_alpha |<a|sigma^z_alpha|b>|^2, zero diagonal.
Eigen::MatrixXd exact_rate_matrix(const DenseSpectrum& spectrum, const BathSpec& bath);

struct ExactMasterEquationOptions {
  int grid_points = 501;  ///< uniform s grid for spectra and matrix elements
  IntegratorOptions integrator;
};

struct ExactMasterEquationResult {
  /// Final populations per tracked eigenstate label. Label l is the l-th level of the
  /// first grid point; labels are followed along s by maximal eigenvector overlap.
  std::vector<double> populations;
  std::vector<double> final_energies;  ///< per label, at s = 1
  std::vector<int> parity;             ///< per label
  double vacuum = 0.0;                 ///< ground state (label 0)
  double ground_pair = 0.0;            ///< vacuum plus lowest level of opposite parity
  double total = 0.0;
  IntegrationStats stats;
};

/// Full Pauli master equation over all 2^N instantaneous eigenstates, starting in the
/// ground state at s = 0, with t = s * tf. Energies and matrix elements are linearly
/// interpolated between grid points. The end points are evaluated 1e-6 inside [0, 1]
/// so that exactly degenerate levels of the end Hamiltonians receive a well-defined
/// basis. Throws SizeError for N > kOracleMaxDynamicsSpins.
ExactMasterEquationResult exact_master_equation(std::span<const double> couplings,
                                                const AnnealSchedule& schedule,
                                                const BathSpec& bath, double tf_us,
                                                const ExactMasterEquationOptions& options = {});

}  // namespace ascqa

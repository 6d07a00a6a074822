#pragma once

#include <Eigen/Dense>

#include "ascqa/fermion.hpp"

namespace ascqa {

/// Vacuum contraction tables for the Majorana-like operators A_i = a_i^+ + a_i and
/// B_i = a_i^+ - a_i of the Jordan-Wigner fermions (0-based site/mode indices).
///
/// g(i, j)      = <0|A_i B_j|0> = sum_k phi(k, i) psi(k, j)
/// g_tilde(i,j) = <0|A_0 B_0 ... A_{i-1} B_{i-1} A_i B_j|0>, i.e. the determinant of g
///                restricted to rows 0..i and columns 0..i-1, j; zero for i > j
/// theta(i, b)  = <0|sigma^z_{i+1}|b+1>, the vacuum-to-single-fermion amplitude of
///                sigma^z on site i+1 for mode b+1
struct ContractionTables {
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_tilde;
  Eigen::MatrixXd theta;
};

/// Builds all three tables. The determinants share one row-pivoted elimination per
/// row i, so the cost is O(N^4 / 12). Throws NumericalError with the offending
/// (i, j) if a determinant is not finite.
ContractionTables build_tables(const FermionSpectrum& spectrum);

/// <a b c| sigma^z_site |0> with |a b c> = eta_a^+ eta_b^+ eta_c^+ |0> for sorted labels
/// a < b < c (1-based), evaluated exactly by Wick's theorem over the full operator
/// string. Requires 1 <= site <= N (site 1 gives zero) and exactly three modes.
double three_fermion_element(const FermionSpectrum& spectrum, int site,
                             const OccupationState& abc);

/// M_b = sum over sites of theta(site, b)^2 for mode label b in 1..N.
double transition_weight(const ContractionTables& tables, int mode);

/// All M_b, indexed by 0-based mode.
Eigen::VectorXd transition_weights(const ContractionTables& tables);

/// Leading-order <gamma1|sigma^z_site|gamma2> for gamma2 a subset of gamma1:
/// (-1)^{|gamma2|} times <gamma1 \ gamma2|sigma^z_site|0>. Differences of one mode use
/// theta, differences of three modes use three_fermion_element, anything else is 0
/// at this order (as is any pair with gamma2 not contained in gamma1).
double reduced_element(const OccupationState& gamma1, const OccupationState& gamma2, int site,
                       const FermionSpectrum& spectrum, const ContractionTables& tables);

}  // namespace ascqa

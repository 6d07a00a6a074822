#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ascqa {

/// Outcome of one randomized equivalence check between the fermionic solution and an
/// independent reference.
struct ValidationCheck {
  std::string name;
  double worst = 0.0;      ///< largest deviation found
  double tolerance = 0.0;  ///< pass threshold on `worst`
  int chains = 0;          ///< random instances examined
  long compared = 0;       ///< individual quantities compared
  double seconds = 0.0;
  bool passed() const { return compared > 0 && worst <= tolerance; }
};

/// Zero field: single-fermion energies of random chains (N <= max_spins) equal the
/// sorted set {0, 2 J_i}. Deviation relative to max(lambda, max_i 2 J_i).
ValidationCheck check_zero_field(std::uint64_t seed, int chains = 50, int max_spins = 200,
                                 double tolerance = 1e-10);

/// The 2^N many-body energies assembled from single-fermion energies equal the dense
/// spectrum (absolute deviation).
ValidationCheck check_spectrum_equivalence(std::uint64_t seed, int chains = 20, int max_spins = 10,
                                           double tolerance = 1e-8);

/// |<0|sigma^z_i|k>| from the contraction tables equals the dense matrix element for
/// every site and every non-degenerate single-fermion level.
ValidationCheck check_single_fermion_elements(std::uint64_t seed, int chains = 20,
                                              int max_spins = 10, double tolerance = 1e-8);

/// Same for the three-fermion elements |<0|sigma^z_i|a b c>|.
ValidationCheck check_three_fermion_elements(std::uint64_t seed, int chains = 12,
                                             int max_spins = 10, double tolerance = 1e-6);

/// All four checks with their default sizes.
std::vector<ValidationCheck> oracle_validation(std::uint64_t seed);

}  // namespace ascqa

#include "ascqa/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "ascqa/errors.hpp"

namespace ascqa {

namespace {

int checked_size(std::span<const double> couplings, int cap) {
  const int n = static_cast<int>(couplings.size()) + 1;
  if (n > cap)
    throw SizeError("brute-force space limited to N <= " + std::to_string(cap) + ", got N = " +
                    std::to_string(n));
  return n;
}

double zz_energy(std::uint32_t x, std::span<const double> couplings) {
  double e = 0.0;
  for (std::size_t i = 0; i < couplings.size(); ++i) {
    const bool anti = ((x >> i) ^ (x >> (i + 1))) & 1U;
    e += anti ? couplings[i] : -couplings[i];
  }
  return e;
}

double sigma_z(std::uint32_t x, int site0) { return (x >> site0) & 1U ? -1.0 : 1.0; }

}  // namespace

Eigen::MatrixXd hamiltonian_matrix(double gamma, std::span<const double> couplings) {
  const int n = checked_size(couplings, kOracleMaxSpins);
  const std::uint32_t dim = 1U << n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (std::uint32_t x = 0; x < dim; ++x) {
    h(x, x) = zz_energy(x, couplings);
    for (int i = 0; i < n; ++i) h(x ^ (1U << i), x) -= gamma;
  }
  return h;
}

DenseSpectrum exact_spectrum(double gamma, std::span<const double> couplings) {
  const int n = checked_size(couplings, kOracleMaxSpins);
  const std::uint32_t dim = 1U << n, half = dim / 2, mask = dim - 1, top = 1U << (n - 1);

  struct Level {
    double energy;
    int parity;
    Eigen::Index block_col;
  };
  std::vector<Level> levels;
  Eigen::MatrixXd block_vectors[2];
  for (int b = 0; b < 2; ++b) {
    const int p = b == 0 ? 1 : -1;
    // Basis (|x> + p|~x>)/sqrt(2) over representatives x with the top bit clear.
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(half, half);
    for (std::uint32_t x = 0; x < half; ++x) {
      h(x, x) += zz_energy(x, couplings);
      for (int i = 0; i + 1 < n; ++i) h(x ^ (1U << i), x) -= gamma;
      h(x ^ top ^ mask, x) -= gamma * p;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolve failed");
    block_vectors[b] = es.eigenvectors();
    for (Eigen::Index c = 0; c < es.eigenvalues().size(); ++c)
      levels.push_back({es.eigenvalues()(c), p, c});
  }
  std::stable_sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) {
    return a.energy < b.energy || (a.energy == b.energy && a.parity > b.parity);
  });

  DenseSpectrum out;
  out.num_spins = n;
  out.energies.resize(dim);
  out.vectors = Eigen::MatrixXd::Zero(dim, dim);
  out.parity.resize(dim);
  const double r = std::sqrt(0.5);
  for (std::uint32_t k = 0; k < dim; ++k) {
    const Level& lv = levels[k];
    out.energies(k) = lv.energy;
    out.parity[k] = lv.parity;
    const auto& v = block_vectors[lv.parity > 0 ? 0 : 1];
    for (std::uint32_t x = 0; x < half; ++x) {
      const double c = v(x, lv.block_col) * r;
      out.vectors(x, k) = c;
      out.vectors(x ^ mask, k) = lv.parity * c;
    }
  }
  return out;
}

DenseSpectrum exact_spectrum_at(const AnnealSchedule& schedule, std::span<const double> couplings,
                                double s) {
  const auto [a, b] = schedule(s);
  std::vector<double> scaled(couplings.begin(), couplings.end());
  for (double& J : scaled) J *= b;
  return exact_spectrum(a, scaled);
}

std::vector<double> fermionic_many_body_energies(const FermionSpectrum& spectrum) {
  const int n = spectrum.size();
  if (n > 20) throw SizeError("many-body enumeration limited to N <= 20");
  std::vector<double> sums{0.0};
  sums.reserve(std::size_t{1} << n);
  for (int k = 0; k < n; ++k) {
    const std::size_t count = sums.size();
    for (std::size_t j = 0; j < count; ++j) sums.push_back(sums[j] + spectrum.lambdas(k));
  }
  for (double& e : sums) e += spectrum.ground_energy;
  std::sort(sums.begin(), sums.end());
  return sums;
}

Eigen::MatrixXd sigma_z_eigenbasis(const DenseSpectrum& spectrum, int site) {
  if (site < 1 || site > spectrum.num_spins) throw ConstraintError("site label outside 1..N");
  const Eigen::Index dim = spectrum.vectors.rows();
  Eigen::VectorXd z(dim);
  for (Eigen::Index x = 0; x < dim; ++x) z(x) = sigma_z(static_cast<std::uint32_t>(x), site - 1);
  return spectrum.vectors.transpose() * z.asDiagonal() * spectrum.vectors;
}

std::vector<std::vector<int>> degenerate_groups(const DenseSpectrum& spectrum, double tol) {
  std::vector<std::vector<int>> groups;
  for (int parity : {1, -1}) {
    std::vector<int>* current = nullptr;
    double last = 0.0;
    for (int k = 0; k < static_cast<int>(spectrum.parity.size()); ++k) {
      if (spectrum.parity[static_cast<std::size_t>(k)] != parity) continue;
      const double e = spectrum.energies(k);
      if (current == nullptr || e - last > tol) {
        groups.emplace_back();
        current = &groups.back();
      }
      current->push_back(k);
      last = e;
    }
    // Pointer is invalidated by emplace_back on the next pass; reset it.
    current = nullptr;
  }
  std::stable_sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
    return spectrum.energies(a.front()) < spectrum.energies(b.front());
  });
  return groups;
}

SigmaZElements exact_sigma_z_elements(const DenseSpectrum& spectrum, int site, double tol) {
  const Eigen::MatrixXd z = sigma_z_eigenbasis(spectrum, site);
  SigmaZElements out;
  out.groups = degenerate_groups(spectrum, tol);
  const auto g = static_cast<Eigen::Index>(out.groups.size());
  out.norms = Eigen::MatrixXd::Zero(g, g);
  for (Eigen::Index a = 0; a < g; ++a)
    for (Eigen::Index b = 0; b < g; ++b) {
      double sum = 0.0;
      for (int i : out.groups[static_cast<std::size_t>(a)])
        for (int j : out.groups[static_cast<std::size_t>(b)]) sum += z(i, j) * z(i, j);
      out.norms(a, b) = std::sqrt(sum);
    }
  return out;
}

Eigen::MatrixXd exact_rate_matrix(const DenseSpectrum& spectrum, const BathSpec& bath) {
  bath.validate();
  const Eigen::Index dim = spectrum.vectors.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (int site = 1; site <= spectrum.num_spins; ++site)
    m += sigma_z_eigenbasis(spectrum, site).cwiseAbs2();
  Eigen::MatrixXd w(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b)
      w(a, b) = a == b ? 0.0
                       : ohmic_rate(spectrum.energies(b) - spectrum.energies(a), bath) * m(a, b);
  return w;
}

ExactMasterEquationResult exact_master_equation(std::span<const double> couplings,
                                                const AnnealSchedule& schedule,
                                                const BathSpec& bath, double tf_us,
                                                const ExactMasterEquationOptions& options) {
  const int n = checked_size(couplings, kOracleMaxDynamicsSpins);
  bath.validate();
  if (!(tf_us > 0.0)) throw ConstraintError("anneal time must be > 0");
  if (options.grid_points < 2) throw ConstraintError("oracle grid needs >= 2 points");
  const int grid = options.grid_points;
  const Eigen::Index dim = Eigen::Index{1} << n;
  constexpr double kEndInset = 1e-6;

  // Label bookkeeping: labels are the level indices at the first grid point. Parity is
  // conserved, and sigma^z only connects opposite parities, so store the even x odd block.
  std::vector<int> label_parity(static_cast<std::size_t>(dim));
  std::vector<Eigen::Index> even, odd;
  std::vector<Eigen::VectorXd> energies(static_cast<std::size_t>(grid));
  std::vector<Eigen::MatrixXd> weights(static_cast<std::size_t>(grid));
  Eigen::MatrixXd prev_vectors;  // columns in label order
  for (int k = 0; k < grid; ++k) {
    const double s = std::clamp(static_cast<double>(k) / (grid - 1), kEndInset, 1.0 - kEndInset);
    const auto sp = exact_spectrum_at(schedule, couplings, s);
    std::vector<Eigen::Index> where(static_cast<std::size_t>(dim));  // label -> level index
    if (k == 0) {
      std::iota(where.begin(), where.end(), Eigen::Index{0});
      for (Eigen::Index l = 0; l < dim; ++l) {
        label_parity[static_cast<std::size_t>(l)] = sp.parity[static_cast<std::size_t>(l)];
        (sp.parity[static_cast<std::size_t>(l)] > 0 ? even : odd).push_back(l);
      }
    } else {
      // Greedy maximal-overlap assignment within each parity sector.
      const Eigen::MatrixXd overlap = (prev_vectors.transpose() * sp.vectors).cwiseAbs();
      std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> candidates;
      candidates.reserve(static_cast<std::size_t>(dim * dim / 2));
      for (Eigen::Index l = 0; l < dim; ++l)
        for (Eigen::Index j = 0; j < dim; ++j)
          if (label_parity[static_cast<std::size_t>(l)] == sp.parity[static_cast<std::size_t>(j)])
            candidates.emplace_back(overlap(l, j), l, j);
      std::sort(candidates.begin(), candidates.end(),
                [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
      std::vector<char> used_label(static_cast<std::size_t>(dim), 0),
          used_level(static_cast<std::size_t>(dim), 0);
      for (const auto& [ov, l, j] : candidates) {
        if (used_label[static_cast<std::size_t>(l)] || used_level[static_cast<std::size_t>(j)])
          continue;
        used_label[static_cast<std::size_t>(l)] = used_level[static_cast<std::size_t>(j)] = 1;
        where[static_cast<std::size_t>(l)] = j;
      }
    }
    Eigen::MatrixXd ordered(dim, dim);
    Eigen::VectorXd e(dim);
    for (Eigen::Index l = 0; l < dim; ++l) {
      ordered.col(l) = sp.vectors.col(where[static_cast<std::size_t>(l)]);
      e(l) = sp.energies(where[static_cast<std::size_t>(l)]);
    }
    prev_vectors = std::move(ordered);
    energies[static_cast<std::size_t>(k)] = e;

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(even.size()),
                                              static_cast<Eigen::Index>(odd.size()));
    const Eigen::MatrixXd ve = prev_vectors(Eigen::all, even);
    const Eigen::MatrixXd vo = prev_vectors(Eigen::all, odd);
    for (int site = 0; site < n; ++site) {
      Eigen::VectorXd z(dim);
      for (Eigen::Index x = 0; x < dim; ++x) z(x) = sigma_z(static_cast<std::uint32_t>(x), site);
      m += (ve.transpose() * z.asDiagonal() * vo).cwiseAbs2();
    }
    weights[static_cast<std::size_t>(k)] = std::move(m);
  }

  const double scale = tf_us * 1e3;  // rates are per ns
  const auto ne = static_cast<Eigen::Index>(even.size());
  const auto no = static_cast<Eigen::Index>(odd.size());
  auto rhs = [&](const std::vector<double>& p, std::vector<double>& dp, double s) {
    const double pos = std::clamp(s, 0.0, 1.0) * (grid - 1);
    const int k = std::min(static_cast<int>(pos), grid - 2);
    const double w = pos - k;
    const auto& e0 = energies[static_cast<std::size_t>(k)];
    const auto& e1 = energies[static_cast<std::size_t>(k) + 1];
    const auto& m0 = weights[static_cast<std::size_t>(k)];
    const auto& m1 = weights[static_cast<std::size_t>(k) + 1];
    std::fill(dp.begin(), dp.end(), 0.0);
    for (Eigen::Index jo = 0; jo < no; ++jo) {
      const Eigen::Index lo = odd[static_cast<std::size_t>(jo)];
      const double eo = (1 - w) * e0(lo) + w * e1(lo);
      for (Eigen::Index je = 0; je < ne; ++je) {
        const Eigen::Index le = even[static_cast<std::size_t>(je)];
        const double mij = (1 - w) * m0(je, jo) + w * m1(je, jo);
        if (mij == 0.0) continue;
        const double omega = eo - ((1 - w) * e0(le) + w * e1(le));  // E_odd - E_even
        const double down = ohmic_rate(omega, bath) * mij;          // odd -> even
        const double up = ohmic_rate(-omega, bath) * mij;           // even -> odd
        const double flow = scale * (down * p[static_cast<std::size_t>(lo)] -
                                     up * p[static_cast<std::size_t>(le)]);
        dp[static_cast<std::size_t>(le)] += flow;
        dp[static_cast<std::size_t>(lo)] -= flow;
      }
    }
  };

  std::vector<double> p(static_cast<std::size_t>(dim), 0.0);
  p[0] = 1.0;
  const double end[] = {1.0};
  ExactMasterEquationResult out;
  out.stats = integrate_populations(rhs, p, 0.0, end, nullptr, options.integrator);
  out.populations = p;
  out.parity = label_parity;
  const auto& last = energies.back();
  out.final_energies.assign(last.data(), last.data() + last.size());
  out.vacuum = p[0];
  const int vacuum_parity = label_parity[0];
  for (Eigen::Index l = 1; l < dim; ++l)
    if (label_parity[static_cast<std::size_t>(l)] != vacuum_parity) {
      out.ground_pair = p[0] + p[static_cast<std::size_t>(l)];
      break;
    }
  out.total = std::accumulate(p.begin(), p.end(), 0.0);
  return out;
}

}  // namespace ascqa

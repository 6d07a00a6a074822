#include "ascqa/svmc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#include <immintrin.h>
#define ASCQA_HAVE_AVX512_KERNEL 1
#else
#define ASCQA_HAVE_AVX512_KERNEL 0
#endif

#include "ascqa/errors.hpp"
#include "detail/parallel.hpp"

// This file is compiled with floating-point contraction disabled: the scalar and
// AVX-512 kernels spell out every fused multiply-add so both produce identical bits.

namespace ascqa {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
  for (auto& word : state) word = splitmix64(seed);
}

Xoshiro256pp Xoshiro256pp::for_run(std::uint64_t seed, std::uint64_t run) {
  std::uint64_t x = seed + (run + 1) * kGolden;
  return Xoshiro256pp(splitmix64(x));
}

Xoshiro256pp::result_type Xoshiro256pp::operator()() {
  const std::uint64_t result = std::rotl(state[0] + state[3], 23) + state[0];
  const std::uint64_t t = state[1] << 17;
  state[2] ^= state[0];
  state[3] ^= state[1];
  state[1] ^= state[2];
  state[0] ^= state[3];
  state[2] ^= t;
  state[3] = std::rotl(state[3], 45);
  return result;
}

double Xoshiro256pp::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

void SvmcParams::validate() const {
  if (sweeps < 1) throw ConstraintError("SVMC needs at least one sweep");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConstraintError("SVMC beta must be > 0");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConstraintError("SVMC sigma must be >= 0");
  if (runs < 1) throw ConstraintError("SVMC needs at least one run");
}

RotorState initial_rotor_state(std::span<const double> couplings) {
  RotorState st;
  st.theta.assign(couplings.size() + 1, std::numbers::pi / 2);
  st.noisy_couplings.assign(couplings.begin(), couplings.end());
  return st;
}

namespace {

void check_state(const RotorState& state) {
  if (state.theta.empty() || state.noisy_couplings.size() + 1 != state.theta.size())
    throw ConstraintError("rotor state needs N angles and N-1 couplings");
}

}  // namespace

double rotor_energy(const RotorState& state, ScheduleValue v) {
  check_state(state);
  double field = 0.0, bonds = 0.0;
  for (double t : state.theta) field += std::sin(t);
  for (std::size_t i = 0; i + 1 < state.theta.size(); ++i)
    bonds += state.noisy_couplings[i] * std::cos(state.theta[i]) * std::cos(state.theta[i + 1]);
  return -v.driver * field - v.problem * bonds;
}

double rotor_energy(const RotorState& state, double s, const AnnealSchedule& schedule) {
  return rotor_energy(state, schedule(s));
}

double rotor_energy_change(const RotorState& state, int site, double new_theta, ScheduleValue v) {
  check_state(state);
  const int n = static_cast<int>(state.theta.size());
  if (site < 0 || site >= n) throw ConstraintError("rotor site outside 0..N-1");
  double h = 0.0;
  if (site > 0) h += state.noisy_couplings[site - 1] * std::cos(state.theta[site - 1]);
  if (site + 1 < n) h += state.noisy_couplings[site] * std::cos(state.theta[site + 1]);
  const double old_theta = state.theta[site];
  return -v.driver * (std::sin(new_theta) - std::sin(old_theta)) -
         v.problem * (std::cos(new_theta) - std::cos(old_theta)) * h;
}

double metropolis_acceptance(double delta_e, double beta) {
  return delta_e <= 0.0 ? 1.0 : std::exp(-beta * delta_e);
}

SweepStats metropolis_sweep(RotorState& state, ScheduleValue v, double beta, Xoshiro256pp& rng) {
  check_state(state);
  const int n = static_cast<int>(state.theta.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(((rng() >> 32) * static_cast<std::uint64_t>(i + 1)) >> 32);
    std::swap(order[i], order[j]);
  }
  SweepStats stats;
  for (int site : order) {
    const double proposal = std::numbers::pi * rng.uniform();
    const double u = rng.uniform();
    ++stats.proposals;
    if (u < metropolis_acceptance(rotor_energy_change(state, site, proposal, v), beta)) {
      state.theta[site] = proposal;
      ++stats.accepted;
    }
  }
  return stats;
}

SweepStats metropolis_sweep(RotorState& state, double s, const AnnealSchedule& schedule,
                            double beta, Xoshiro256pp& rng) {
  return metropolis_sweep(state, schedule(s), beta, rng);
}

std::vector<int> project_spins(const RotorState& state) {
  std::vector<int> spins(state.theta.size());
  for (std::size_t i = 0; i < spins.size(); ++i) spins[i] = std::cos(state.theta[i]) >= 0.0 ? 1 : -1;
  return spins;
}

double boundary_correlation(std::span<const int> spins, const ChainSpec& spec) {
  if (static_cast<int>(spins.size()) != spec.num_spins)
    throw ConstraintError("spin count does not match the chain");
  if (spec.sector_size < 1) throw ConstraintError("sector size must be >= 1");
  double sum = 0.0;
  int junctions = 0;
  for (int q = 1; q < spec.num_sectors(); q += 2) {
    const int i = q * spec.sector_size;  // first coupling of the light sector
    sum += spins[i] * spins[i + 1];
    ++junctions;
  }
  return junctions == 0 ? 1.0 : sum / junctions;
}

std::pair<double, double> wilson_interval(int successes, int trials, double z) {
  if (trials < 1 || successes < 0 || successes > trials)
    throw ConstraintError("Wilson interval needs 0 <= successes <= trials, trials >= 1");
  const double n = trials, p = successes / n, z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace {

// Runs advance in blocks of kBlock lanes (one AVX-512 register); the vector kernel
// interleaves kBlocks independent blocks to hide instruction latency.
constexpr int kBlock = 8;
constexpr int kBlocks = 2;
constexpr int kLanes = kBlock * kBlocks;

// cos(pi u) for u in [0, 1] as -sin(y), y = pi (u - 1/2): y P(y^2) with the Taylor
// coefficients of sin up to y^21. Ascending powers of y^2.
constexpr double kSin[] = {1.0,
                           -1.0 / 6.0,
                           1.0 / 120.0,
                           -1.0 / 5040.0,
                           1.0 / 362880.0,
                           -1.0 / 39916800.0,
                           1.0 / 6227020800.0,
                           -1.0 / 1307674368000.0,
                           1.0 / 355687428096000.0,
                           -1.0 / 121645100408832000.0,
                           1.0 / 51090942171709440000.0};
// ln(m) = 2 atanh(f), f = (m - 1) / (m + 1), for m in [sqrt(1/2), sqrt(2)): odd series
// to f^21 (|f| <= 0.172). Ascending powers of f^2.
constexpr double kAtanh[] = {1.0,        1.0 / 3.0,  1.0 / 5.0,  1.0 / 7.0,
                             1.0 / 9.0,  1.0 / 11.0, 1.0 / 13.0, 1.0 / 15.0,
                             1.0 / 17.0, 1.0 / 19.0, 1.0 / 21.0};
constexpr double kLn2Hi = 0.6931471803691238;
constexpr double kLn2Lo = 1.9082149292705877e-10;
constexpr std::uint64_t kMantissa = 0x000FFFFFFFFFFFFFULL;
constexpr std::uint64_t kOneBits = 0x3FF0000000000000ULL;
constexpr double kSqrt2 = std::numbers::sqrt2;

// Both polynomials use Estrin's scheme (short dependency chains); the vector kernel
// evaluates the identical sequence of operations.
double sin_poly(double z) {
  const double z2 = z * z, z4 = z2 * z2, z8 = z4 * z4;
  const double p01 = std::fma(kSin[1], z, kSin[0]), p23 = std::fma(kSin[3], z, kSin[2]);
  const double p45 = std::fma(kSin[5], z, kSin[4]), p67 = std::fma(kSin[7], z, kSin[6]);
  const double p89 = std::fma(kSin[9], z, kSin[8]);
  const double q0 = std::fma(p23, z2, p01), q1 = std::fma(p67, z2, p45);
  const double q2 = std::fma(kSin[10], z2, p89);
  return std::fma(q2, z8, std::fma(q1, z4, q0));
}

double atanh_poly(double z) {
  const double z2 = z * z, z4 = z2 * z2, z8 = z4 * z4;
  const double p01 = std::fma(kAtanh[1], z, kAtanh[0]), p23 = std::fma(kAtanh[3], z, kAtanh[2]);
  const double p45 = std::fma(kAtanh[5], z, kAtanh[4]), p67 = std::fma(kAtanh[7], z, kAtanh[6]);
  const double p89 = std::fma(kAtanh[9], z, kAtanh[8]);
  const double q0 = std::fma(p23, z2, p01), q1 = std::fma(p67, z2, p45);
  const double q2 = std::fma(kAtanh[10], z2, p89);
  return std::fma(q2, z8, std::fma(q1, z4, q0));
}

double cospi_unit(double u) {
  const double y = (u - 0.5) * std::numbers::pi;
  return -(sin_poly(y * y) * y);
}

// ln(u) for a positive normal u.
double log_positive(double u) {
  std::uint64_t bits;
  std::memcpy(&bits, &u, sizeof bits);
  double e = static_cast<double>(static_cast<std::int64_t>(bits >> 52) - 1023);
  bits = (bits & kMantissa) | kOneBits;
  double m;
  std::memcpy(&m, &bits, sizeof m);
  if (m > kSqrt2) {
    m *= 0.5;
    e += 1.0;
  }
  const double f = (m - 1.0) / (m + 1.0);
  const double lnm = (f + f) * atanh_poly(f * f);
  return std::fma(e, kLn2Hi, std::fma(e, kLn2Lo, lnm));
}

// Metropolis test u < min(1, exp(-beta dE)) written as ln(u) < -beta dE: the logarithm
// depends only on the random stream, so it stays off the state-dependent path. u = 0
// always accepts.
bool metropolis_accepts(double u, double beta_de) {
  return u == 0.0 || log_positive(u) < -beta_de;
}

// Lane-interleaved state of kLanes runs: entry (site, lane) at site * kLanes + lane.
// cos of the angles with zero padding sites at both ends, couplings with zero padding,
// the sweep order, and the generator states. The sines are not stored: every angle is
// in [0, pi], so sin = sqrt(1 - cos^2) recomputed from the stored cosine reproduces the
// value computed at acceptance bit for bit (and 1 for the initial cos = 0).
struct Batch {
  int n = 0;
  std::vector<double> c;              // (n + 2) * kLanes, padded
  std::vector<double> j;              // (n + 1) * kLanes; j[i] joins padded sites i, i+1
  std::vector<std::int64_t> order;    // n * kLanes
  std::vector<std::uint32_t> draws;   // n * kLanes: Fisher-Yates targets of one sweep
  alignas(64) std::uint64_t s[4][kLanes];
};

struct Tables {
  std::vector<double> drive;    // A(s_k), k = 1..N_s
  std::vector<double> problem;  // B(s_k)
  double beta;
};

void scalar_anneal_lane(Batch& b, int lane, const Tables& t) {
  const int n = b.n;
  Xoshiro256pp rng;
  for (int w = 0; w < 4; ++w) rng.state[w] = b.s[w][lane];
  double* c = b.c.data() + lane;
  const double* jn = b.j.data() + lane;
  std::int64_t* order = b.order.data() + lane;
  const auto steps = t.drive.size();
  for (std::size_t k = 0; k < steps; ++k) {
    const double A = t.drive[k], B = t.problem[k];
    for (int i = 0; i < n; ++i) order[i * kLanes] = i;
    for (int i = n - 1; i > 0; --i) {
      const auto jdx = static_cast<std::int64_t>(((rng() >> 32) * static_cast<std::uint64_t>(i + 1)) >> 32);
      std::swap(order[i * kLanes], order[jdx * kLanes]);
    }
    for (int q = 0; q < n; ++q) {
      const std::uint64_t r1 = rng(), r2 = rng();
      const double u1 = static_cast<double>(r1 >> 11) * 0x1.0p-53;
      const double u2 = static_cast<double>(r2 >> 11) * 0x1.0p-53;
      const std::int64_t i = order[q * kLanes];
      const double ct = cospi_unit(u1);
      const double st = std::sqrt(std::fma(-ct, ct, 1.0));
      const double cl = c[i * kLanes], ci = c[(i + 1) * kLanes], cr = c[(i + 2) * kLanes];
      const double si = std::sqrt(std::fma(-ci, ci, 1.0));
      const double h = std::fma(jn[i * kLanes], cl, jn[(i + 1) * kLanes] * cr);
      const double de = std::fma(-A, st - si, -((B * (ct - ci)) * h));
      if (metropolis_accepts(u2, t.beta * de)) c[(i + 1) * kLanes] = ct;
    }
  }
  for (int w = 0; w < 4; ++w) b.s[w][lane] = rng.state[w];
}

#if ASCQA_HAVE_AVX512_KERNEL

#define ASCQA_AVX512 __attribute__((target("avx512f,avx512dq")))

ASCQA_AVX512 inline __m512i next_u64(__m512i s[4]) {
  const __m512i result = _mm512_add_epi64(_mm512_rol_epi64(_mm512_add_epi64(s[0], s[3]), 23), s[0]);
  const __m512i t = _mm512_slli_epi64(s[1], 17);
  s[2] = _mm512_xor_si512(s[2], s[0]);
  s[3] = _mm512_xor_si512(s[3], s[1]);
  s[1] = _mm512_xor_si512(s[1], s[2]);
  s[0] = _mm512_xor_si512(s[0], s[3]);
  s[2] = _mm512_xor_si512(s[2], t);
  s[3] = _mm512_rol_epi64(s[3], 45);
  return result;
}

ASCQA_AVX512 inline __m512d to_unit(__m512i r) {
  return _mm512_mul_pd(_mm512_cvtepu64_pd(_mm512_srli_epi64(r, 11)), _mm512_set1_pd(0x1.0p-53));
}

ASCQA_AVX512 inline __m512d fma_c(__m512d a, __m512d x, double c) {
  return _mm512_fmadd_pd(a, x, _mm512_set1_pd(c));
}

ASCQA_AVX512 inline __m512d sin_poly_v(__m512d z) {
  const __m512d z2 = _mm512_mul_pd(z, z), z4 = _mm512_mul_pd(z2, z2), z8 = _mm512_mul_pd(z4, z4);
  const __m512d p01 = fma_c(_mm512_set1_pd(kSin[1]), z, kSin[0]);
  const __m512d p23 = fma_c(_mm512_set1_pd(kSin[3]), z, kSin[2]);
  const __m512d p45 = fma_c(_mm512_set1_pd(kSin[5]), z, kSin[4]);
  const __m512d p67 = fma_c(_mm512_set1_pd(kSin[7]), z, kSin[6]);
  const __m512d p89 = fma_c(_mm512_set1_pd(kSin[9]), z, kSin[8]);
  const __m512d q0 = _mm512_fmadd_pd(p23, z2, p01), q1 = _mm512_fmadd_pd(p67, z2, p45);
  const __m512d q2 = _mm512_fmadd_pd(_mm512_set1_pd(kSin[10]), z2, p89);
  return _mm512_fmadd_pd(q2, z8, _mm512_fmadd_pd(q1, z4, q0));
}

ASCQA_AVX512 inline __m512d atanh_poly_v(__m512d z) {
  const __m512d z2 = _mm512_mul_pd(z, z), z4 = _mm512_mul_pd(z2, z2), z8 = _mm512_mul_pd(z4, z4);
  const __m512d p01 = fma_c(_mm512_set1_pd(kAtanh[1]), z, kAtanh[0]);
  const __m512d p23 = fma_c(_mm512_set1_pd(kAtanh[3]), z, kAtanh[2]);
  const __m512d p45 = fma_c(_mm512_set1_pd(kAtanh[5]), z, kAtanh[4]);
  const __m512d p67 = fma_c(_mm512_set1_pd(kAtanh[7]), z, kAtanh[6]);
  const __m512d p89 = fma_c(_mm512_set1_pd(kAtanh[9]), z, kAtanh[8]);
  const __m512d q0 = _mm512_fmadd_pd(p23, z2, p01), q1 = _mm512_fmadd_pd(p67, z2, p45);
  const __m512d q2 = _mm512_fmadd_pd(_mm512_set1_pd(kAtanh[10]), z2, p89);
  return _mm512_fmadd_pd(q2, z8, _mm512_fmadd_pd(q1, z4, q0));
}

ASCQA_AVX512 inline __m512d cospi_unit_v(__m512d u) {
  const __m512d y = _mm512_mul_pd(_mm512_sub_pd(u, _mm512_set1_pd(0.5)),
                                  _mm512_set1_pd(std::numbers::pi));
  return _mm512_xor_pd(_mm512_mul_pd(sin_poly_v(_mm512_mul_pd(y, y)), y), _mm512_set1_pd(-0.0));
}

// log_positive on eight lanes; zero lanes give -inf (always accept).
ASCQA_AVX512 inline __m512d log_unit_v(__m512d u) {
  const __m512i bits = _mm512_castpd_si512(u);
  __m512d e = _mm512_cvtepi64_pd(
      _mm512_sub_epi64(_mm512_srli_epi64(bits, 52), _mm512_set1_epi64(1023)));
  __m512d m = _mm512_castsi512_pd(
      _mm512_or_si512(_mm512_and_si512(bits, _mm512_set1_epi64(static_cast<long long>(kMantissa))),
                      _mm512_set1_epi64(static_cast<long long>(kOneBits))));
  const __mmask8 high = _mm512_cmp_pd_mask(m, _mm512_set1_pd(kSqrt2), _CMP_GT_OQ);
  m = _mm512_mask_mul_pd(m, high, m, _mm512_set1_pd(0.5));
  e = _mm512_mask_add_pd(e, high, e, _mm512_set1_pd(1.0));
  const __m512d one = _mm512_set1_pd(1.0);
  const __m512d f = _mm512_div_pd(_mm512_sub_pd(m, one), _mm512_add_pd(m, one));
  const __m512d lnm = _mm512_mul_pd(_mm512_add_pd(f, f), atanh_poly_v(_mm512_mul_pd(f, f)));
  const __m512d ln = _mm512_fmadd_pd(e, _mm512_set1_pd(kLn2Hi),
                                     _mm512_fmadd_pd(e, _mm512_set1_pd(kLn2Lo), lnm));
  const __mmask8 zero = _mm512_cmp_pd_mask(u, _mm512_setzero_pd(), _CMP_EQ_OQ);
  return _mm512_mask_mov_pd(ln, zero, _mm512_set1_pd(-std::numeric_limits<double>::infinity()));
}

ASCQA_AVX512 void avx512_anneal(Batch& b, const Tables& t) {
  const int n = b.n;
  // Block g holds lanes 8g..8g+7; its state words are loaded from b.s[w] + 8g.
  __m512i s[kBlocks][4];
  __m512i lane[kBlocks];
  for (int g = 0; g < kBlocks; ++g) {
    for (int w = 0; w < 4; ++w) s[g][w] = _mm512_load_si512(b.s[w] + g * kBlock);
    lane[g] = _mm512_add_epi64(_mm512_set_epi64(7, 6, 5, 4, 3, 2, 1, 0),
                               _mm512_set1_epi64(g * kBlock));
  }
  constexpr int kShift = std::countr_zero(static_cast<unsigned>(kLanes));
  static_assert((1 << kShift) == kLanes);
  const __m512d beta = _mm512_set1_pd(t.beta);
  const __m512d one = _mm512_set1_pd(1.0);
  const __m512d sign = _mm512_set1_pd(-0.0);
  const __m512i stride1 = _mm512_set1_epi64(kLanes);
  const __m512i stride2 = _mm512_set1_epi64(2 * kLanes);
  double* c = b.c.data();
  const double* jn = b.j.data();
  long long* order = reinterpret_cast<long long*>(b.order.data());
  std::uint32_t* draws = b.draws.data();
  const auto steps = t.drive.size();
  for (std::size_t k = 0; k < steps; ++k) {
    const __m512d B = _mm512_set1_pd(t.problem[k]);
    const __m512d negA = _mm512_xor_pd(_mm512_set1_pd(t.drive[k]), sign);
    // The targets are drawn in the vector unit; the swaps of all lanes for one step are
    // independent and run as scalar code, which keeps them clear of gather/scatter.
    for (int i = n - 1; i > 0; --i) {
      const __m512i bound = _mm512_set1_epi64(i + 1);
      for (int g = 0; g < kBlocks; ++g) {
        const __m512i r = next_u64(s[g]);
        const __m512i jdx = _mm512_srli_epi64(_mm512_mul_epu32(_mm512_srli_epi64(r, 32), bound), 32);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(draws + i * kLanes + g * kBlock),
                            _mm512_cvtepi64_epi32(jdx));
      }
    }
    for (int i = 0; i < n; ++i)
      for (int g = 0; g < kBlocks; ++g)
        _mm512_storeu_si512(order + i * kLanes + g * kBlock, _mm512_set1_epi64(i));
    for (int i = n - 1; i > 0; --i) {
      const std::uint32_t* d = draws + i * kLanes;
      long long* oi = order + i * kLanes;
      for (int l = 0; l < kLanes; ++l) std::swap(oi[l], order[d[l] * kLanes + l]);
    }
    for (int q = 0; q < n; ++q) {
      for (int g = 0; g < kBlocks; ++g) {
        const __m512i r1 = next_u64(s[g]);
        const __m512i r2 = next_u64(s[g]);
        const __m512d u1 = to_unit(r1), u2 = to_unit(r2);
        const __m512i i = _mm512_loadu_si512(order + q * kLanes + g * kBlock);
        const __m512i at = _mm512_add_epi64(_mm512_slli_epi64(i, kShift), lane[g]);
        const __m512i at1 = _mm512_add_epi64(at, stride1);
        const __m512i at2 = _mm512_add_epi64(at, stride2);
        const __m512d ct = cospi_unit_v(u1);
        const __m512d st = _mm512_sqrt_pd(_mm512_fnmadd_pd(ct, ct, one));
        const __m512d cl = _mm512_i64gather_pd(at, c, 8);
        const __m512d ci = _mm512_i64gather_pd(at1, c, 8);
        const __m512d cr = _mm512_i64gather_pd(at2, c, 8);
        const __m512d si = _mm512_sqrt_pd(_mm512_fnmadd_pd(ci, ci, one));
        const __m512d jl = _mm512_i64gather_pd(at, jn, 8);
        const __m512d jr = _mm512_i64gather_pd(at1, jn, 8);
        const __m512d h = _mm512_fmadd_pd(jl, cl, _mm512_mul_pd(jr, cr));
        const __m512d coupling = _mm512_mul_pd(_mm512_mul_pd(B, _mm512_sub_pd(ct, ci)), h);
        const __m512d de = _mm512_fmadd_pd(negA, _mm512_sub_pd(st, si),
                                           _mm512_xor_pd(coupling, sign));
        const __m512d x = _mm512_xor_pd(_mm512_mul_pd(beta, de), sign);
        const __mmask8 accept = _mm512_cmp_pd_mask(log_unit_v(u2), x, _CMP_LT_OQ);
        _mm512_mask_i64scatter_pd(c, accept, at1, ct, 8);
      }
    }
  }
  for (int g = 0; g < kBlocks; ++g)
    for (int w = 0; w < 4; ++w) _mm512_store_si512(b.s[w] + g * kBlock, s[g][w]);
}

#endif

struct RunOutcome {
  bool success = false;
  double boundary = 0.0;
};

void anneal_batch(const ChainSpec& spec, std::span<const double> couplings,
                  const SvmcParams& params, const Tables& tables, int first_run, bool vector,
                  std::span<RunOutcome> outcomes) {
  const int n = spec.num_spins;
  Batch b;
  b.n = n;
  b.c.assign(static_cast<std::size_t>((n + 2) * kLanes), 0.0);
  b.j.assign(static_cast<std::size_t>((n + 1) * kLanes), 0.0);
  b.order.assign(static_cast<std::size_t>(n * kLanes), 0);
  b.draws.assign(static_cast<std::size_t>(n * kLanes), 0);
  for (int lane = 0; lane < kLanes; ++lane) {
    auto rng = Xoshiro256pp::for_run(params.seed, static_cast<std::uint64_t>(first_run + lane));
    std::normal_distribution<double> noise(0.0, params.sigma);
    for (int i = 0; i + 1 < n; ++i)
      b.j[(i + 1) * kLanes + lane] = couplings[i] + (params.sigma > 0.0 ? noise(rng) : 0.0);
    for (int w = 0; w < 4; ++w) b.s[w][lane] = rng.state[w];
  }
#if ASCQA_HAVE_AVX512_KERNEL
  if (vector)
    avx512_anneal(b, tables);
  else
#endif
    for (int lane = 0; lane < kLanes; ++lane) scalar_anneal_lane(b, lane, tables);
  (void)vector;

  std::vector<int> spins(static_cast<std::size_t>(n));
  for (int lane = 0; lane < kLanes && lane < static_cast<int>(outcomes.size()); ++lane) {
    for (int i = 0; i < n; ++i) spins[i] = b.c[(i + 1) * kLanes + lane] >= 0.0 ? 1 : -1;
    outcomes[lane].success = std::all_of(spins.begin(), spins.end(), [&](int x) { return x == spins[0]; });
    outcomes[lane].boundary = boundary_correlation(spins, spec);
  }
}

}  // namespace

bool avx512_available() {
#if ASCQA_HAVE_AVX512_KERNEL
  return __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512dq");
#else
  return false;
#endif
}

SvmcResult run_svmc(const ChainSpec& spec, const AnnealSchedule& schedule,
                    const SvmcParams& params, int workers, SvmcKernel kernel) {
  validate(spec);
  params.validate();
  if (kernel == SvmcKernel::avx512 && !avx512_available())
    throw ConstraintError("AVX-512 kernel requested but not supported by this CPU");
  const bool vector = kernel == SvmcKernel::avx512 ||
                      (kernel == SvmcKernel::automatic && avx512_available());
  const auto couplings = build_couplings(spec);

  Tables tables;
  tables.beta = params.beta;
  tables.drive.resize(static_cast<std::size_t>(params.sweeps));
  tables.problem.resize(tables.drive.size());
  for (std::int64_t k = 1; k <= params.sweeps; ++k) {
    const auto v = schedule(static_cast<double>(k) / static_cast<double>(params.sweeps));
    tables.drive[k - 1] = v.driver;
    tables.problem[k - 1] = v.problem;
  }

  std::vector<RunOutcome> outcomes(static_cast<std::size_t>(params.runs));
  const int batches = (params.runs + kLanes - 1) / kLanes;
  detail::parallel_for(batches, workers, [&](int batch) {
    const int first = batch * kLanes;
    const int count = std::min(kLanes, params.runs - first);
    anneal_batch(spec, couplings, params, tables, first, vector,
                 std::span<RunOutcome>(outcomes).subspan(first, count));
  });

  SvmcResult out;
  out.chain = spec;
  out.params = params;
  out.kernel = vector ? SvmcKernel::avx512 : SvmcKernel::scalar;
  double boundary = 0.0;
  for (const auto& o : outcomes) {
    out.successes += o.success ? 1 : 0;
    boundary += o.boundary;
  }
  out.success_probability = static_cast<double>(out.successes) / params.runs;
  std::tie(out.ci_low, out.ci_high) = wilson_interval(out.successes, params.runs);
  out.boundary_correlation = boundary / params.runs;
  return out;
}

void write_svmc_header(std::ostream& os) {
  os << "n,N,runs,successes,success_probability,ci_low,ci_high,boundary_correlation\n";
}

void write_svmc_row(std::ostream& os, const SvmcResult& r) {
  const auto old = os.precision(10);
  os << r.chain.sector_size << ',' << r.chain.num_spins << ',' << r.params.runs << ','
     << r.successes << ',' << r.success_probability << ',' << r.ci_low << ',' << r.ci_high << ','
     << r.boundary_correlation << '\n';
  os.precision(old);
}

}  // namespace ascqa

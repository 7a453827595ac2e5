#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "normality/numerics.hpp"
#include "normality/operators.hpp"

namespace normality {

/// SplitMix64 (Steele, Lea & Flood). Chosen because its output sequence is
/// fully specified by a few lines of integer arithmetic, so seeded families
/// can be reproduced bit-for-bit in any language:
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// uniform() takes the top 53 bits; normal() is Box–Muller on two uniforms
/// using the cosine branch only.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Standard complex Gaussian, E|z|² = 1.
  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * n); }

 private:
  std::uint64_t state_;
};

/// Seed of trial `index` under base seed `base`: one SplitMix64 output of
/// base ^ (index · golden ratio constant).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  SplitMix64 mix(base ^ (index * 0x9E3779B97F4A7C15ULL));
  return mix.next();
}

enum class FamilyKind {
  cyclic_weighted_shift,
  arc_unitary_times_pd,
  random_normal,
  random_invertible,
  random_psd,
  nilpotent_jordan,
};

inline std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::cyclic_weighted_shift: return "cyclic_weighted_shift";
    case FamilyKind::arc_unitary_times_pd: return "arc_unitary_times_pd";
    case FamilyKind::random_normal: return "random_normal";
    case FamilyKind::random_invertible: return "random_invertible";
    case FamilyKind::random_psd: return "random_psd";
    case FamilyKind::nilpotent_jordan: return "nilpotent_jordan";
  }
  return "unknown";
}

inline std::optional<FamilyKind> parse_family_kind(std::string_view name) {
  for (auto kind : {FamilyKind::cyclic_weighted_shift, FamilyKind::arc_unitary_times_pd,
                    FamilyKind::random_normal, FamilyKind::random_invertible,
                    FamilyKind::random_psd, FamilyKind::nilpotent_jordan}) {
    if (to_string(kind) == name) return kind;
  }
  if (name == "cyclic") return FamilyKind::cyclic_weighted_shift;
  if (name == "arc") return FamilyKind::arc_unitary_times_pd;
  return std::nullopt;
}

inline constexpr double kDefaultConditionBound = 100.0;

/// How the positive factor of an arc-family sample relates to its unitary.
enum class ModulusMode {
  random,     // independent random PD factor: generically non-normal T
  commuting,  // diagonal in the unitary's eigenbasis: T normal
  identity,   // P = I: T unitary
};

struct FamilySpec {
  FamilyKind kind = FamilyKind::random_normal;
  std::size_t dim = 2;
  std::uint64_t seed = 0;
  std::vector<Complex> weights;  // cyclic_weighted_shift; random when empty
  Arc arc{};                     // arc_unitary_times_pd
  double cond_bound = kDefaultConditionBound;
  ModulusMode modulus = ModulusMode::random;
};

/// Complex Gaussian matrix with unit-variance entries.
inline Matrix gaussian_matrix(std::size_t dim, SplitMix64& rng) {
  Matrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) m(i, j) = rng.complex_normal();
  return m;
}

inline Matrix random_gaussian(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  SplitMix64 rng(seed);
  return gaussian_matrix(dim, rng);
}

/// Orthonormalizes the columns of a Gaussian matrix (Gram–Schmidt, two passes).
inline Matrix random_unitary(std::size_t dim, SplitMix64& rng) {
  Matrix q = gaussian_matrix(dim, rng);
  for (std::size_t j = 0; j < dim; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        Complex dot = 0.0;
        for (std::size_t i = 0; i < dim; ++i) dot += std::conj(q(i, k)) * q(i, j);
        for (std::size_t i = 0; i < dim; ++i) q(i, j) -= dot * q(i, k);
      }
    }
    const double norm = q.column(j).norm();
    for (std::size_t i = 0; i < dim; ++i) q(i, j) /= norm;
  }
  return q;
}

/// Values cond^u for uniform u, with both endpoints 1 and cond pinned when
/// dim ≥ 2 so the condition number is attained.
inline std::vector<double> spread_values(std::size_t dim, double cond_bound, SplitMix64& rng) {
  std::vector<double> d(dim);
  for (auto& x : d) x = std::pow(cond_bound, rng.uniform());
  if (dim >= 2) {
    d[0] = 1.0;
    d[1] = cond_bound;
  }
  return d;
}

/// T e_k = w_k e_{(k+1) mod n}.
inline Matrix cyclic_weighted_shift(const std::vector<Complex>& weights) {
  const std::size_t n = weights.size();
  if (n < 2) throw std::invalid_argument("cyclic_weighted_shift: need at least two weights");
  Matrix t(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(weights[k]) == 0.0) {
      throw std::invalid_argument("cyclic_weighted_shift: zero weight");
    }
    t((k + 1) % n, k) = weights[k];
  }
  return t;
}

/// Weight vectors for the shift family: one third constant modulus with
/// phases multiplying to one, one third constant modulus with free phases,
/// the rest random positive moduli in [0.5, 2].
inline std::vector<Complex> random_shift_weights(std::size_t dim, SplitMix64& rng) {
  std::vector<Complex> w(dim);
  const std::size_t mode = rng.index(3);
  if (mode == 2) {
    for (auto& x : w) x = rng.uniform(0.5, 2.0);
    return w;
  }
  const double radius = rng.uniform(0.5, 2.0);
  double total = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    if (mode == 0 && k + 1 == dim) angle = -total;
    total += angle;
    w[k] = std::polar(radius, angle);
  }
  return w;
}

inline Matrix random_normal(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  SplitMix64 rng(seed);
  const Matrix v = random_unitary(dim, rng);
  std::vector<Complex> d(dim);
  for (auto& x : d) x = rng.complex_normal();
  return v * Matrix::diagonal(d) * v.adjoint();
}

inline Matrix random_psd(std::size_t dim, std::uint64_t seed,
                         double cond_bound = kDefaultConditionBound) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  if (!(cond_bound >= 1.0)) throw std::invalid_argument("cond_bound must be >= 1");
  SplitMix64 rng(seed);
  const Matrix v = random_unitary(dim, rng);
  const auto d = spread_values(dim, cond_bound, rng);
  return hermitian_part(v * Matrix::diagonal(std::span<const double>(d)) * v.adjoint());
}

inline Matrix random_invertible(std::size_t dim, std::uint64_t seed,
                                double cond_bound = kDefaultConditionBound) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  if (!(cond_bound >= 1.0)) throw std::invalid_argument("cond_bound must be >= 1");
  SplitMix64 rng(seed);
  const Matrix w = random_unitary(dim, rng);
  const Matrix v = random_unitary(dim, rng);
  const auto d = spread_values(dim, cond_bound, rng);
  return w * Matrix::diagonal(std::span<const double>(d)) * v.adjoint();
}

/// Single Jordan block with eigenvalue zero.
inline Matrix nilpotent_jordan(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  Matrix j(dim, dim);
  for (std::size_t i = 0; i + 1 < dim; ++i) j(i, i + 1) = 1.0;
  return j;
}

/// One sample T = U·P of the arc family together with its factors.
struct ArcSample {
  Matrix t;
  Matrix unitary;
  Matrix modulus;
  std::vector<double> angles;
};

inline void require_sampling_arc(const Arc& arc) {
  if (!(arc.length > 0.0) || arc.length > std::numbers::pi + 1e-15 ||
      !(arc.margin >= 0.0) || !(2.0 * arc.margin < arc.length)) {
    throw std::invalid_argument("degenerate arc: need 0 < length <= pi and 2*margin < length");
  }
}

/// Unitary V·diag(e^{iθ_k})·V* with θ_k uniform in (start + margin,
/// start + length − margin); also returns V and the angles.
inline std::pair<Matrix, Matrix> arc_unitary(const Arc& arc, std::size_t dim, SplitMix64& rng,
                                             std::vector<double>* angles_out = nullptr) {
  require_sampling_arc(arc);
  const Matrix v = random_unitary(dim, rng);
  std::vector<Complex> d(dim);
  std::vector<double> angles(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    double theta;
    do {
      theta = rng.uniform(arc.start_angle + arc.margin,
                          arc.start_angle + arc.length - arc.margin);
    } while (theta == arc.start_angle + arc.margin);
    angles[k] = theta;
    d[k] = std::polar(1.0, theta);
  }
  if (angles_out) *angles_out = std::move(angles);
  return {v * Matrix::diagonal(d) * v.adjoint(), v};
}

inline ArcSample arc_unitary_times_pd_sample(const Arc& arc, std::size_t dim,
                                             std::uint64_t seed,
                                             double cond_bound = kDefaultConditionBound,
                                             ModulusMode mode = ModulusMode::random) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  if (!(cond_bound >= 1.0)) throw std::invalid_argument("cond_bound must be >= 1");
  SplitMix64 rng(seed);
  ArcSample out;
  auto [u, v] = arc_unitary(arc, dim, rng, &out.angles);
  switch (mode) {
    case ModulusMode::identity:
      out.modulus = Matrix::identity(dim);
      break;
    case ModulusMode::commuting: {
      const auto d = spread_values(dim, cond_bound, rng);
      out.modulus =
          hermitian_part(v * Matrix::diagonal(std::span<const double>(d)) * v.adjoint());
      break;
    }
    case ModulusMode::random:
      out.modulus = random_psd(dim, rng.next(), cond_bound);
      break;
  }
  out.unitary = std::move(u);
  out.t = out.unitary * out.modulus;
  return out;
}

inline Matrix arc_unitary_times_pd(const Arc& arc, std::size_t dim, std::uint64_t seed,
                                   double cond_bound = kDefaultConditionBound) {
  return arc_unitary_times_pd_sample(arc, dim, seed, cond_bound).t;
}

/// Positive-definite pair with log T ⪰ log S by construction:
/// S = exp(log T − D) for a random positive-definite defect D.
inline std::pair<Matrix, Matrix> log_ordered_pair(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  SplitMix64 rng(seed);
  const Matrix t = random_psd(dim, rng.next(), 20.0);
  const Matrix defect = random_psd(dim, rng.next(), 10.0) * rng.uniform(0.05, 0.5);
  const Matrix log_s = pd_log(t) - defect;
  Matrix s = hermitian_part(hermitian_function(log_s, [](double x) { return std::exp(x); }));
  return {t, std::move(s)};
}

/// Group labels for a block-structured spectrum: index i belongs to group
/// i mod m for a random number m of distinct eigenvalues.
inline std::vector<std::size_t> random_groups(std::size_t dim, SplitMix64& rng,
                                              std::size_t* group_count) {
  const std::size_t m = 1 + rng.index(dim);
  std::vector<std::size_t> groups(dim);
  for (std::size_t i = 0; i < dim; ++i) groups[i] = i % m;
  *group_count = m;
  return groups;
}

/// V·B·V* with B random on the diagonal blocks given by `groups`, zero elsewhere.
inline Matrix block_commutant(const Matrix& v, const std::vector<std::size_t>& groups,
                              SplitMix64& rng) {
  const std::size_t dim = groups.size();
  Matrix b(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      if (groups[i] == groups[j]) b(i, j) = rng.complex_normal();
  return v * b * v.adjoint();
}

/// Normal N with repeated eigenvalues and a generally non-normal X in its
/// commutant.
inline std::pair<Matrix, Matrix> commuting_normal_pair(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  SplitMix64 rng(seed);
  const Matrix v = random_unitary(dim, rng);
  std::size_t m = 0;
  const auto groups = random_groups(dim, rng, &m);
  std::vector<Complex> values(m);
  for (auto& z : values) z = rng.complex_normal();
  std::vector<Complex> d(dim);
  for (std::size_t i = 0; i < dim; ++i) d[i] = values[groups[i]];
  Matrix n_mat = v * Matrix::diagonal(d) * v.adjoint();
  return {std::move(n_mat), block_commutant(v, groups, rng)};
}

/// Arc unitary U with repeated eigenvalues and a matrix X commuting with U².
inline std::pair<Matrix, Matrix> arc_unitary_commutant_pair(const Arc& arc, std::size_t dim,
                                                            std::uint64_t seed) {
  require_sampling_arc(arc);
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  SplitMix64 rng(seed);
  const Matrix v = random_unitary(dim, rng);
  std::size_t m = 0;
  const auto groups = random_groups(dim, rng, &m);
  std::vector<Complex> values(m);
  for (auto& z : values) {
    const double theta = rng.uniform(arc.start_angle + arc.margin,
                                     arc.start_angle + arc.length - arc.margin);
    z = std::polar(1.0, theta);
  }
  std::vector<Complex> d(dim);
  for (std::size_t i = 0; i < dim; ++i) d[i] = values[groups[i]];
  Matrix u = v * Matrix::diagonal(d) * v.adjoint();
  return {std::move(u), block_commutant(v, groups, rng)};
}

inline Matrix generate(const FamilySpec& spec) {
  switch (spec.kind) {
    case FamilyKind::cyclic_weighted_shift: {
      if (!spec.weights.empty()) return cyclic_weighted_shift(spec.weights);
      SplitMix64 rng(spec.seed);
      return cyclic_weighted_shift(random_shift_weights(spec.dim, rng));
    }
    case FamilyKind::arc_unitary_times_pd:
      return arc_unitary_times_pd_sample(spec.arc, spec.dim, spec.seed, spec.cond_bound,
                                         spec.modulus)
          .t;
    case FamilyKind::random_normal: return random_normal(spec.dim, spec.seed);
    case FamilyKind::random_invertible:
      return random_invertible(spec.dim, spec.seed, spec.cond_bound);
    case FamilyKind::random_psd: return random_psd(spec.dim, spec.seed, spec.cond_bound);
    case FamilyKind::nilpotent_jordan: return nilpotent_jordan(spec.dim);
  }
  throw std::invalid_argument("unknown family kind");
}

/// A non-normal T whose Aluthge transform is normal and whose unitary factor
/// has no open semicircle containing its spectrum.
struct AluthgeCounterexample {
  Matrix t;
  Matrix transform;
  ClassReport t_class;
  ClassReport transform_class;
  std::optional<Arc> semicircle;  // absent for every genuine witness
  std::size_t candidate = 0;      // index within the search budget
};

/// Budgeted search. Candidate 0 is [[0, b], [a, 0]] ⊕ I (U swaps the first two
/// basis vectors, P = diag(a, b, 1, …), a ≠ b); later candidates conjugate a
/// fresh member of that family by a random unitary, which preserves every
/// property checked. Each candidate is checked with the predicates, not assumed.
inline std::optional<AluthgeCounterexample> search_aluthge_counterexample(
    std::size_t dim, std::uint64_t seed, std::size_t budget, const Tolerances& tol = {}) {
  if (dim < 2) return std::nullopt;  // every 1×1 operator is normal
  SplitMix64 rng(seed);
  for (std::size_t candidate = 0; candidate < budget; ++candidate) {
    const double a = rng.uniform(1.0, 4.0);
    const double b = a + rng.uniform(0.5, 2.0);
    Matrix t = Matrix::identity(dim);
    t(0, 0) = 0.0;
    t(1, 1) = 0.0;
    t(1, 0) = a;
    t(0, 1) = b;
    if (candidate > 0) {
      const Matrix v = random_unitary(dim, rng);
      t = v * t * v.adjoint();
    }
    const Matrix transform = aluthge(t, tol);
    if (is_normal(t, tol) || !is_normal(transform, tol)) continue;
    const Matrix u = polar(t, tol).isometry_part;
    if (!is_unitary(u, tol)) continue;
    auto arc = semicircle_spectrum(u, tol);
    if (arc) continue;
    return AluthgeCounterexample{t,
                                 transform,
                                 classify(t, default_p_values(), tol),
                                 classify(transform, default_p_values(), tol),
                                 arc,
                                 candidate};
  }
  return std::nullopt;
}

}  // namespace normality

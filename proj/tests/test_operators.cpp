#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "normality/families.hpp"
#include "normality/operators.hpp"
#include "oracles.hpp"

using namespace normality;

namespace {

constexpr double kTight = 1e-12;
const Matrix kShiftPair = Matrix::from_rows({{0, 2}, {3, 0}});
const Matrix kJordan = Matrix::from_rows({{0, 1}, {0, 0}});
const Matrix kSwap = Matrix::from_rows({{0, 1}, {1, 0}});

struct PolarDefects {
  double reconstruction;
  double psd;
  double partial_isometry;
  double kernels;
  double range;
};

PolarDefects polar_defects(const Matrix& t, const Tolerances& tol = {}) {
  const auto parts = polar(t, tol);
  const Matrix& u = parts.isometry_part;
  const Matrix& p = parts.modulus;
  const std::size_t n = t.rows();
  PolarDefects d{};
  d.reconstruction = distance(t, u * p) / std::max(operator_norm(t), 1.0);
  d.psd = std::max(0.0, -min_eigenvalue(p)) / std::max(operator_norm(p), 1.0);
  d.partial_isometry = distance(u * u.adjoint() * u, u);
  // ker U from the spectrum of U*U (eigenvalues near 0 versus near 1);
  // ker P from P's own spectrum with the rank cutoff.
  const auto gram = herm_eig(hermitian_part(u.adjoint() * u));
  Matrix ker_u(n, n);
  for (std::size_t k = 0; k < gram.size(); ++k)
    if (gram.eigenvalues[k].real() < 0.5) ker_u += gram.projections[k];
  const Matrix ker_p = Matrix::identity(n) - psd_power(p, 0.0, tol);
  d.kernels = distance(ker_u, ker_p);
  d.range = distance(u.adjoint() * u, psd_power(p, 0.0, tol));
  return d;
}

void expect_polar_contract(const Matrix& t, double bound = 1e-9) {
  const auto d = polar_defects(t);
  EXPECT_LE(d.reconstruction, bound);
  EXPECT_LE(d.psd, bound);
  EXPECT_LE(d.partial_isometry, bound);
  EXPECT_LE(d.kernels, bound);
  EXPECT_LE(d.range, bound);
}

}  // namespace

TEST(Polar, ShiftPairByHand) {
  const auto parts = polar(kShiftPair);
  EXPECT_LT(distance(parts.isometry_part, kSwap), kTight);
  EXPECT_LT(distance(parts.modulus, Matrix::diagonal({3.0, 2.0})), kTight);
}

TEST(Polar, ZeroOperator) {
  const auto parts = polar(Matrix(3, 3));
  EXPECT_EQ(parts.isometry_part, Matrix(3, 3));
  EXPECT_EQ(parts.modulus, Matrix(3, 3));
}

TEST(Polar, JordanBlockUsesPartialIsometry) {
  const auto parts = polar(kJordan);
  EXPECT_LT(distance(parts.modulus, Matrix::diagonal({0.0, 1.0})), kTight);
  EXPECT_LT(distance(parts.isometry_part, kJordan), kTight);
  EXPECT_LT(distance(parts.isometry_part.adjoint() * parts.isometry_part,
                     Matrix::diagonal({0.0, 1.0})),
            kTight);
  expect_polar_contract(kJordan);
}

TEST(Polar, RejectsNonSquare) { EXPECT_THROW(polar(Matrix(2, 3)), std::invalid_argument); }

TEST(Polar, ContractOnRandomOperators) {
  for (std::size_t n = 2; n <= 16; ++n) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      expect_polar_contract(random_gaussian(n, seed * 31 + n));
      if (HasFailure()) return;
    }
  }
}

TEST(Polar, ContractOnSingularOperators) {
  for (std::size_t n = 1; n <= 8; ++n) {
    expect_polar_contract(nilpotent_jordan(n));
    // Rank-deficient random product.
    SplitMix64 rng(n);
    Matrix a = gaussian_matrix(n, rng);
    Matrix b = gaussian_matrix(n, rng);
    for (std::size_t i = 0; i < n; ++i) b(i, 0) = 0.0;
    expect_polar_contract(a * b.adjoint());
  }
}

TEST(Polar, ModulusAgreesWithSquareRootOfGram) {
  // Two routes to |T|: Jacobi SVD versus psd_power(T*T, 1/2).
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Matrix t = random_invertible(2 + seed % 6, seed, 50.0);
    const Matrix via_gram = psd_power(t.adjoint() * t, 0.5);
    EXPECT_LE(distance(polar(t).modulus, via_gram), 1e-10 * operator_norm(t));
  }
}

TEST(ModulusConjugation, ConjugationOfModulusPowers) {
  const double exps[] = {0.0, 0.5, 1.0, 2.0};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix t = random_gaussian(2 + seed % 8, seed + 4000);
    const auto parts = polar(t);
    const Matrix& u = parts.isometry_part;
    for (double s : exps) {
      const Matrix lhs = psd_power(t * t.adjoint(), s / 2.0);
      const Matrix rhs = u * psd_power(t.adjoint() * t, s / 2.0) * u.adjoint();
      EXPECT_LE(distance(lhs, rhs), 1e-8 * std::max(std::pow(operator_norm(t), 2 * s), 1.0));
    }
  }
}

TEST(Aluthge, NormalIsFixed) {
  const Matrix d = Matrix::diagonal({Complex(1, 0), Complex(0, 2)});
  EXPECT_LT(distance(aluthge(d), d), kTight);
}

TEST(Aluthge, ShiftPairByHand) {
  const double r6 = std::sqrt(6.0);
  const Matrix expected = Matrix::from_rows({{0, r6}, {r6, 0}});
  EXPECT_LT(distance(aluthge(kShiftPair), expected), kTight);
  EXPECT_LT(distance(aluthge_iterate(kShiftPair, 2), expected), kTight);
  EXPECT_EQ(aluthge_iterate(kShiftPair, 0), kShiftPair);
}

TEST(Aluthge, JordanBlockVanishes) { EXPECT_LT(frobenius_norm(aluthge(kJordan)), kTight); }

TEST(Aluthge, SpectrumPreservedProperty) {
  // T = (UP^{1/2})P^{1/2} and its transform P^{1/2}(UP^{1/2}) share power traces.
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Matrix t = random_gaussian(2 + seed % 7, seed + 77);
    const auto lhs = oracle::power_traces(t);
    const auto rhs = oracle::power_traces(aluthge(t));
    const double scale = operator_norm(t);
    for (std::size_t k = 0; k < lhs.size(); ++k) {
      EXPECT_LE(std::abs(lhs[k] - rhs[k]),
                1e-9 * std::pow(scale, static_cast<double>(k + 1)) * t.rows());
    }
  }
}

TEST(Aluthge, NormalFixedPointProperty) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Matrix t = random_normal(1 + seed % 8, seed);
    ASSERT_TRUE(is_normal(t));
    EXPECT_LE(distance(aluthge(t), t), 1e-8 * operator_norm(t));
  }
}

TEST(Classes, UnitaryIsEverything) {
  SplitMix64 rng(3);
  const Matrix u = random_unitary(4, rng);
  EXPECT_TRUE(is_normal(u));
  for (double p : {0.1, 0.25, 0.5, 1.0, 2.0}) EXPECT_TRUE(is_p_hyponormal(u, p));
  EXPECT_EQ(is_log_hyponormal(u), std::optional<bool>(true));
}

TEST(Classes, ShiftPairIsNotHyponormal) {
  EXPECT_FALSE(is_normal(kShiftPair));
  EXPECT_FALSE(is_hyponormal(kShiftPair));
  const auto report = classify(kShiftPair, default_p_values());
  EXPECT_FALSE(report.normal);
  EXPECT_FALSE(report.hyponormal);
  EXPECT_NEAR(report.defects.at("self_commutator"), std::sqrt(50.0), kTight);
  EXPECT_TRUE(report.consistent);
}

TEST(Classes, JordanBlock) {
  EXPECT_FALSE(is_normal(kJordan));
  EXPECT_EQ(is_log_hyponormal(kJordan), std::nullopt);
  EXPECT_THROW(is_p_hyponormal(kJordan, 0.0), std::invalid_argument);
}

TEST(Classes, ClassReportChainIsConsistentProperty) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Matrix t = seed % 2 ? random_normal(2 + seed % 5, seed) : random_gaussian(2 + seed % 5, seed);
    const auto r = classify(t, default_p_values());
    EXPECT_TRUE(r.consistent);
    if (r.normal) EXPECT_TRUE(r.hyponormal);
  }
}

TEST(Classes, FiniteDimensionalCollapse) {
  // trace(T*T − TT*) = 0, so a hyponormal defect bounds the full self-commutator.
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Matrix t = random_gaussian(2 + seed % 8, seed + 900);
    const double norm = operator_norm(t);
    const Matrix c = t.adjoint() * t - t * t.adjoint();
    EXPECT_LE(std::abs(c.trace()), 1e-8 * norm * norm);
    const double delta = std::max(0.0, -min_eigenvalue(c)) / (norm * norm);
    EXPECT_LE(operator_norm(c), t.rows() * delta * norm * norm + 1e-12 * norm * norm);
  }
}

TEST(PowerEqualsAdjoint, Examples) {
  const Matrix cyclic = Matrix::from_rows({{0, 0, 1}, {1, 0, 0}, {0, 1, 0}});
  EXPECT_TRUE(power_equals_adjoint(cyclic, 2));
  EXPECT_TRUE(power_equals_adjoint(Matrix::identity(3), 5));
  EXPECT_FALSE(power_equals_adjoint(Matrix::diagonal({Complex(0, 1)}), 1));
  EXPECT_THROW(power_equals_adjoint(cyclic, 0), std::invalid_argument);
}

TEST(Semicircle, ArcFound) {
  const double pi = std::numbers::pi;
  const Matrix u = Matrix::diagonal({std::polar(1.0, pi / 4), std::polar(1.0, pi / 3)});
  const auto arc = semicircle_spectrum(u);
  ASSERT_TRUE(arc.has_value());
  EXPECT_NEAR(arc->length, pi, kTight);
  // Spread π/12, so the centred arc leaves (π − π/12)/2 on each side.
  EXPECT_NEAR(arc->margin, (pi - pi / 12) / 2, 1e-12);
  EXPECT_TRUE(arc->contains(std::polar(1.0, pi / 4), arc->margin * 0.99));
  EXPECT_TRUE(arc->contains(std::polar(1.0, pi / 3), arc->margin * 0.99));
  // The example arc (0, π) is also valid with margin min(π/4, 2π/3).
  const Arc upper{0.0, pi, 0.0};
  EXPECT_TRUE(upper.contains(std::polar(1.0, pi / 4), std::min(pi / 4, 2 * pi / 3) - 1e-12));
}

TEST(Semicircle, AntipodalPairHasNoArc) {
  EXPECT_FALSE(semicircle_spectrum(Matrix::diagonal({1.0, -1.0})).has_value());
}

TEST(Semicircle, IdentityHasArc) {
  const auto arc = semicircle_spectrum(Matrix::identity(3));
  ASSERT_TRUE(arc.has_value());
  EXPECT_NEAR(arc->margin, std::numbers::pi / 2, 1e-12);
}

TEST(Semicircle, WrapAroundZero) {
  const Matrix u = Matrix::diagonal({std::polar(1.0, -0.4), std::polar(1.0, 0.5)});
  const auto arc = semicircle_spectrum(u);
  ASSERT_TRUE(arc.has_value());
  EXPECT_TRUE(arc->contains(std::polar(1.0, -0.4)));
  EXPECT_TRUE(arc->contains(std::polar(1.0, 0.5)));
}

TEST(Semicircle, RejectsNonUnitary) {
  EXPECT_THROW(semicircle_spectrum(kShiftPair), std::domain_error);
}

TEST(Semicircle, AgreesWithBruteForceArcScan) {
  // Oracle: scan 20000 candidate start angles for an arc of length π that
  // strictly contains every angle with clearance.
  constexpr double pi = std::numbers::pi;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    SplitMix64 rng(seed);
    const std::size_t n = 2 + seed % 4;
    std::vector<Complex> d(n);
    std::vector<double> angles(n);
    const double spread = rng.uniform(0.5, 1.5) * pi;
    const double start = rng.uniform(0.0, 2 * pi);
    for (std::size_t k = 0; k < n; ++k) {
      angles[k] = start + rng.uniform(0.0, spread);
      d[k] = std::polar(1.0, angles[k]);
    }
    const auto found = semicircle_spectrum(Matrix::diagonal(d));
    bool brute = false;
    for (int step = 0; step < 20000 && !brute; ++step) {
      const Arc candidate{2 * pi * step / 20000.0, pi, 0.0};
      bool all = true;
      for (double a : angles) all = all && candidate.contains(std::polar(1.0, a), 1e-3);
      brute = all;
    }
    if (brute) EXPECT_TRUE(found.has_value()) << "seed " << seed;
    if (found) {
      for (double a : angles) EXPECT_TRUE(found->contains(std::polar(1.0, a)));
    }
  }
}

TEST(Subspaces, RangeProjection) {
  EXPECT_LT(distance(range_projection(random_invertible(3, 1, 10.0)), Matrix::identity(3)), 1e-12);
  EXPECT_EQ(range_projection(Matrix(2, 2)), Matrix(2, 2));
  EXPECT_LT(distance(range_projection(kJordan), Matrix::diagonal({1.0, 0.0})), kTight);
  EXPECT_LT(distance(kernel_orth_projection(kJordan), Matrix::diagonal({0.0, 1.0})), kTight);
}

TEST(Subspaces, ReductionAndCompression) {
  const Matrix t = Matrix::diagonal({1.0, 2.0});
  const Matrix q = Matrix::diagonal({1.0, 0.0});
  EXPECT_TRUE(reduces(t, q));
  const auto c = compress(t, q);
  ASSERT_TRUE(c.has_value());
  ASSERT_EQ(c->rows(), 1u);
  EXPECT_NEAR(std::abs((*c)(0, 0) - 1.0), 0.0, kTight);
  EXPECT_FALSE(reduces(kJordan, q));
  EXPECT_FALSE(compress(t, Matrix(2, 2)).has_value());
  EXPECT_THROW(reduces(t, Matrix::from_rows({{1, 1}, {0, 0}})), std::invalid_argument);
}

TEST(Subspaces, SpectralProjectionsReduceNormalOperators) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Matrix n = random_normal(2 + seed % 6, seed);
    for (const auto& q : normal_eig(n).projections) {
      EXPECT_TRUE(reduces(n, q));
      EXPECT_TRUE(is_normal(*compress(n, q)));
    }
  }
}

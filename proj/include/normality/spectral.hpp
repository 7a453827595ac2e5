#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "normality/matrix.hpp"

namespace normality {

namespace detail {

/// Eigenpairs of a Hermitian matrix: values descending, vectors as columns.
struct HermitianEigen {
  std::vector<double> values;
  Matrix vectors;
};

/// Singular triplets of a square matrix: A = left · diag(sigma) · right*.
/// Columns of `left` for zero singular values are left as zero vectors.
struct SingularTriplets {
  Matrix left;
  std::vector<double> sigma;
  Matrix right;
};

inline constexpr int kMaxSweeps = 100;

/// Column rotation on (p, q) by the unitary
///   [ c                 s           ]
///   [ -s·e^{-iφ}        c·e^{-iφ}   ]
/// which diagonalizes the 2×2 Hermitian block [[a, r e^{iφ}], [r e^{-iφ}, b]].
struct Rotation {
  double c = 1.0;
  double s = 0.0;
  Complex phase = 1.0;  // e^{-iφ}

  static Rotation annihilating(double a, double b, Complex off) {
    const double r = std::abs(off);
    Rotation rot;
    if (r == 0.0) return rot;
    rot.phase = std::conj(off) / r;
    const double theta = (b - a) / (2.0 * r);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                     (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    rot.c = 1.0 / std::sqrt(t * t + 1.0);
    rot.s = t * rot.c;
    return rot;
  }

  void apply_columns(Matrix& m, std::size_t p, std::size_t q) const {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const Complex mp = m(i, p);
      const Complex mq = m(i, q);
      m(i, p) = c * mp - s * phase * mq;
      m(i, q) = s * mp + c * phase * mq;
    }
  }

  void apply_rows_adjoint(Matrix& m, std::size_t p, std::size_t q) const {
    const Complex cphase = std::conj(phase);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Complex mp = m(p, j);
      const Complex mq = m(q, j);
      m(p, j) = c * mp - s * cphase * mq;
      m(q, j) = s * mp + c * cphase * mq;
    }
  }
};

inline double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

inline std::size_t first_support(const Matrix& v, std::size_t col) {
  double peak = 0.0;
  for (std::size_t i = 0; i < v.rows(); ++i) peak = std::max(peak, std::abs(v(i, col)));
  for (std::size_t i = 0; i < v.rows(); ++i)
    if (std::abs(v(i, col)) > 1e-8 * peak) return i;
  return v.rows();
}

/// Cyclic Jacobi on a Hermitian matrix (only the Hermitian part is used).
/// Sweeps continue to working precision rather than stopping at rank_tol.
inline HermitianEigen jacobi_eigh(const Matrix& input) {
  input.require_square("jacobi_eigh");
  const std::size_t n = input.rows();
  Matrix a = hermitian_part(input);
  Matrix v = Matrix::identity(n);
  const double scale = frobenius_norm(a);
  const double stop = 4.0 * DBL_EPSILON * scale;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= stop) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        if (std::abs(apq) <= DBL_MIN) continue;
        const auto rot =
            Rotation::annihilating(a(p, p).real(), a(q, q).real(), apq);
        rot.apply_columns(a, p, q);
        rot.apply_rows_adjoint(a, p, q);
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        rot.apply_columns(v, p, q);
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> support(n);
  for (std::size_t k = 0; k < n; ++k) support[k] = first_support(v, k);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const double ax = a(x, x).real();
    const double ay = a(y, y).real();
    if (ax != ay) return ax > ay;
    return support[x] < support[y];
  });

  HermitianEigen out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

/// One-sided (Hestenes) Jacobi SVD of a square complex matrix.
inline SingularTriplets jacobi_svd(const Matrix& input) {
  input.require_square("jacobi_svd");
  const std::size_t n = input.rows();
  Matrix g = input;
  Matrix v = Matrix::identity(n);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0;
        double beta = 0.0;
        Complex gamma = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          alpha += std::norm(g(i, p));
          beta += std::norm(g(i, q));
          gamma += std::conj(g(i, p)) * g(i, q);
        }
        if (std::abs(gamma) <= DBL_EPSILON * std::sqrt(alpha * beta) ||
            std::abs(gamma) <= DBL_MIN) {
          continue;
        }
        rotated = true;
        const auto rot = Rotation::annihilating(alpha, beta, gamma);
        rot.apply_columns(g, p, q);
        rot.apply_columns(v, p, q);
      }
    }
    if (!rotated) break;
  }

  std::vector<double> norms(n);
  for (std::size_t k = 0; k < n; ++k) norms[k] = g.column(k).norm();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  SingularTriplets out{Matrix(n, n), std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    const double sigma = norms[src];
    out.sigma[k] = sigma;
    for (std::size_t i = 0; i < n; ++i) {
      out.right(i, k) = v(i, src);
      out.left(i, k) = sigma > 0.0 ? g(i, src) / sigma : Complex{};
    }
  }
  return out;
}

/// V · diag(d) · V*
inline Matrix synthesize(const Matrix& vectors, std::span<const Complex> d) {
  const std::size_t n = vectors.rows();
  Matrix out(n, n);
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k] == Complex{}) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vik = vectors(i, k) * d[k];
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(vectors(j, k));
    }
  }
  return out;
}

inline double hermitian_defect(const Matrix& a) { return distance(a, a.adjoint()); }

}  // namespace detail

/// Largest singular value, sqrt(λ_max(A*A)).
inline double operator_norm(const Matrix& a) {
  if (a.empty()) return 0.0;
  const auto eig = detail::jacobi_eigh(a.adjoint() * a);
  return std::sqrt(std::max(eig.values.front(), 0.0));
}

/// Orthogonal eigenprojections of a Hermitian or normal matrix.
/// `bases[k]` holds orthonormal columns spanning the range of `projections[k]`.
struct SpectralDecomposition {
  std::vector<Complex> eigenvalues;
  std::vector<Matrix> projections;
  std::vector<Matrix> bases;

  [[nodiscard]] std::size_t size() const noexcept { return eigenvalues.size(); }

  [[nodiscard]] Matrix reconstruct() const {
    if (projections.empty()) return {};
    const std::size_t n = projections.front().rows();
    Matrix out(n, n);
    for (std::size_t k = 0; k < size(); ++k) out += projections[k] * eigenvalues[k];
    return out;
  }

  /// Σ f(λ_k) Q_k
  [[nodiscard]] Matrix apply(const std::function<Complex(Complex)>& f) const {
    if (projections.empty()) return {};
    const std::size_t n = projections.front().rows();
    Matrix out(n, n);
    for (std::size_t k = 0; k < size(); ++k) out += projections[k] * f(eigenvalues[k]);
    return out;
  }
};

namespace detail {

inline void require_hermitian(const Matrix& a, const Tolerances& tol, const char* what) {
  a.require_square(what);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(a.rows());
  if (hermitian_defect(a) > std::max(tol.eq_tol, floor) * frobenius_norm(a)) {
    throw std::domain_error(std::string(what) + ": matrix is not Hermitian");
  }
}

/// Groups consecutive entries of a descending sequence whose gaps are ≤ gap.
inline std::vector<std::pair<std::size_t, std::size_t>> cluster_runs(
    std::span<const double> sorted_desc, double gap) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t start = 0;
  for (std::size_t k = 1; k <= sorted_desc.size(); ++k) {
    if (k == sorted_desc.size() || sorted_desc[k - 1] - sorted_desc[k] > gap) {
      runs.emplace_back(start, k - start);
      start = k;
    }
  }
  return runs;
}

inline Matrix projector(const Matrix& basis) { return basis * basis.adjoint(); }

/// Splits an orthonormal basis of an invariant subspace of `h` (Hermitian)
/// into sub-bases on which the compression of `h` is scalar within `gap`.
inline std::vector<Matrix> refine(const Matrix& basis, const Matrix& h, double gap) {
  if (basis.cols() == 1) return {basis};
  const Matrix compressed = basis.adjoint() * h * basis;
  const auto eig = jacobi_eigh(compressed);
  std::vector<Matrix> out;
  for (auto [first, count] : cluster_runs(eig.values, gap)) {
    out.push_back(basis * eig.vectors.columns(first, count));
  }
  return out;
}

}  // namespace detail

/// Eigenprojections of a Hermitian matrix, eigenvalues descending; eigenvalues
/// closer than rank_tol·‖A‖ share one projection.
inline SpectralDecomposition herm_eig(const Matrix& a, const Tolerances& tol = {}) {
  detail::require_hermitian(a, tol, "herm_eig");
  const auto eig = detail::jacobi_eigh(a);
  double scale = 0.0;
  for (double v : eig.values) scale = std::max(scale, std::abs(v));

  SpectralDecomposition out;
  for (auto [first, count] : detail::cluster_runs(eig.values, tol.rank_tol * scale)) {
    double mean = 0.0;
    for (std::size_t k = first; k < first + count; ++k) mean += eig.values[k];
    Matrix basis = eig.vectors.columns(first, count);
    out.eigenvalues.emplace_back(mean / static_cast<double>(count), 0.0);
    out.projections.push_back(detail::projector(basis));
    out.bases.push_back(std::move(basis));
  }
  return out;
}

/// Eigenprojections of a normal matrix obtained by simultaneously
/// diagonalizing its commuting Hermitian parts: eigenspaces of the real part
/// are refined against the imaginary part, then once more against the real
/// part. Eigenvalues are ordered by descending real, then imaginary part.
inline SpectralDecomposition normal_eig(const Matrix& n_mat, const Tolerances& tol = {}) {
  n_mat.require_square("normal_eig");
  const double norm = operator_norm(n_mat);
  const double comm = distance(n_mat.adjoint() * n_mat, n_mat * n_mat.adjoint());
  if (comm > tol.eq_tol * norm * norm) {
    throw std::domain_error("normal_eig: matrix is not normal");
  }
  const std::size_t n = n_mat.rows();
  if (n == 0) return {};

  const Matrix re = hermitian_part(n_mat);
  const Matrix im = skew_hermitian_part(n_mat);
  const double tight = tol.rank_tol * norm;
  // Coarse first pass keeps near-degenerate real parts together so that the
  // imaginary part, not rounding noise, decides how they split.
  const double coarse = std::max(tight, 1e-6 * norm);

  std::vector<Matrix> blocks;
  for (const Matrix& b0 : detail::refine(Matrix::identity(n), re, coarse))
    for (const Matrix& b1 : detail::refine(b0, im, tight))
      for (Matrix& b2 : detail::refine(b1, re, tight)) blocks.push_back(std::move(b2));

  struct Entry {
    Complex value;
    Matrix basis;
    std::size_t support;
  };
  std::vector<Entry> entries;
  entries.reserve(blocks.size());
  for (auto& basis : blocks) {
    const Complex value = (basis.adjoint() * n_mat * basis).trace() /
                          static_cast<double>(basis.cols());
    std::size_t support = n;
    for (std::size_t c = 0; c < basis.cols(); ++c)
      support = std::min(support, detail::first_support(basis, c));
    entries.push_back({value, std::move(basis), support});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.value.real() != y.value.real()) return x.value.real() > y.value.real();
    if (x.value.imag() != y.value.imag()) return x.value.imag() > y.value.imag();
    return x.support < y.support;
  });

  SpectralDecomposition out;
  for (auto& e : entries) {
    out.eigenvalues.push_back(e.value);
    out.projections.push_back(detail::projector(e.basis));
    out.bases.push_back(std::move(e.basis));
  }
  return out;
}

/// f(A) for Hermitian A through the eigenvalue map, without clustering.
inline Matrix hermitian_function(const Matrix& a, const std::function<double(double)>& f,
                                 const Tolerances& tol = {}) {
  detail::require_hermitian(a, tol, "hermitian_function");
  const auto eig = detail::jacobi_eigh(a);
  std::vector<Complex> mapped(eig.values.size());
  for (std::size_t k = 0; k < mapped.size(); ++k) mapped[k] = f(eig.values[k]);
  return detail::synthesize(eig.vectors, mapped);
}

/// Smallest eigenvalue of a Hermitian matrix.
inline double min_eigenvalue(const Matrix& a) {
  if (a.empty()) return 0.0;
  return detail::jacobi_eigh(a).values.back();
}

/// P^s for PSD P. Eigenvalues at or below rank_tol·λ_max count as zero and
/// 0^0 := 0, so P^0 is the projection onto ran(P).
inline Matrix psd_power(const Matrix& p, double s, const Tolerances& tol = {}) {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("psd_power: exponent must be nonnegative");
  }
  detail::require_hermitian(p, tol, "psd_power");
  const auto eig = detail::jacobi_eigh(p);
  const double top = eig.values.empty() ? 0.0 : std::max(eig.values.front(), 0.0);
  const double low = eig.values.empty() ? 0.0 : eig.values.back();
  if (low < -tol.psd_tol * top) {
    throw std::domain_error("psd_power: matrix is not positive semidefinite");
  }
  const double cutoff = tol.rank_tol * top;
  std::vector<Complex> mapped(eig.values.size());
  for (std::size_t k = 0; k < mapped.size(); ++k) {
    const double lambda = eig.values[k];
    mapped[k] = lambda <= cutoff ? 0.0 : std::pow(lambda, s);
  }
  return detail::synthesize(eig.vectors, mapped);
}

/// Principal logarithm of a positive-definite matrix.
inline Matrix pd_log(const Matrix& p, const Tolerances& tol = {}) {
  detail::require_hermitian(p, tol, "pd_log");
  const auto eig = detail::jacobi_eigh(p);
  const double top = eig.values.empty() ? 0.0 : eig.values.front();
  if (eig.values.empty() || !(eig.values.back() > tol.rank_tol * top)) {
    throw std::domain_error(
        "pd_log: matrix is singular or not positive definite; "
        "log-hyponormality undefined");
  }
  std::vector<Complex> mapped(eig.values.size());
  for (std::size_t k = 0; k < mapped.size(); ++k) mapped[k] = std::log(eig.values[k]);
  return detail::synthesize(eig.vectors, mapped);
}

/// Σ f(λ_k) Q_k over the spectral decomposition of a normal matrix.
inline Matrix function_of_normal(const Matrix& n_mat,
                                 const std::function<Complex(Complex)>& f,
                                 const Tolerances& tol = {}) {
  return normal_eig(n_mat, tol).apply(f);
}

/// λ_min(A − B) / max(‖A‖, ‖B‖, 1): nonnegative iff A ⪰ B exactly.
inline double loewner_margin(const Matrix& a, const Matrix& b, const Tolerances& tol = {}) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("loewner_geq: shape mismatch");
  }
  detail::require_hermitian(a, tol, "loewner_geq");
  detail::require_hermitian(b, tol, "loewner_geq");
  const double scale = std::max({operator_norm(a), operator_norm(b), 1.0});
  return min_eigenvalue(a - b) / scale;
}

/// A ⪰ B in the Loewner order, up to psd_tol.
inline bool loewner_geq(const Matrix& a, const Matrix& b, const Tolerances& tol = {}) {
  return loewner_margin(a, b, tol) >= -tol.psd_tol;
}

/// Frobenius norm, operator norm and relative distance in one call.
struct NormSummary {
  double frobenius = 0.0;
  double op = 0.0;
  double relative_distance = 0.0;
};

inline NormSummary norms_and_distance(const Matrix& a, const Matrix& b) {
  return {frobenius_norm(a), operator_norm(a), relative_distance(a, b)};
}

}  // namespace normality

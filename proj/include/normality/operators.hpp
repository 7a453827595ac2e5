#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "normality/numerics.hpp"

namespace normality {

namespace detail {
inline std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}
}  // namespace detail

/// T = U·P with U a partial isometry and P = |T| positive semidefinite.
///
/// U vanishes on ker(P) and U*U is the projection onto ran(P); for invertible
/// T this makes U unitary.
struct PolarParts {
  Matrix isometry_part;
  Matrix modulus;
};

/// Open arc {e^{iθ} : start < θ < start + length} on the unit circle.
/// `margin` is the distance from the arc ends to the nearest point of the set
/// it was fitted to (zero when the arc is a sampling domain only).
struct Arc {
  double start_angle = 0.0;
  double length = std::numbers::pi;
  double margin = 0.0;

  /// Angle of z measured counterclockwise from start_angle, in [0, 2π).
  [[nodiscard]] double offset(Complex z) const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double d = std::fmod(std::arg(z) - start_angle, two_pi);
    if (d < 0.0) d += two_pi;
    return d;
  }

  [[nodiscard]] bool contains(Complex z, double eps = 0.0) const {
    const double d = offset(z);
    return d > eps && d < length - eps;
  }
};

/// Class membership of one operator plus the residuals behind each verdict.
struct ClassReport {
  bool normal = false;
  bool hyponormal = false;
  std::map<double, bool> p_hyponormal;
  std::optional<bool> log_hyponormal;  // absent when T is singular
  std::map<std::string, double> defects;
  bool consistent = true;  // normal ⇒ hyponormal ⇒ p-hyponormal for p ≤ 1
};

inline const std::vector<double>& default_p_values() {
  static const std::vector<double> ps{0.25, 0.5, 1.0};
  return ps;
}

/// Polar decomposition through a one-sided Jacobi SVD T = W Σ V*:
/// P = V Σ V*, U = W_r V_r* over the singular values above rank_tol·σ_max.
inline PolarParts polar(const Matrix& t, const Tolerances& tol = {}) {
  t.require_square("polar");
  const std::size_t n = t.rows();
  const auto svd = detail::jacobi_svd(t);
  const double cutoff = n == 0 ? 0.0 : tol.rank_tol * svd.sigma.front();

  PolarParts parts{Matrix(n, n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const double sigma = svd.sigma[k];
    if (sigma <= cutoff || sigma == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex wi = svd.left(i, k);
      const Complex vi = svd.right(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        const Complex vj = std::conj(svd.right(j, k));
        parts.isometry_part(i, j) += wi * vj;
        parts.modulus(i, j) += sigma * vi * vj;
      }
    }
  }
  return parts;
}

/// Singular values of T, descending.
inline std::vector<double> singular_values(const Matrix& t) {
  return detail::jacobi_svd(t).sigma;
}

/// Smallest singular value above rank_tol·‖T‖.
inline bool is_invertible(const Matrix& t, const Tolerances& tol = {}) {
  t.require_square("is_invertible");
  if (t.empty()) return false;
  const auto sigma = singular_values(t);
  return sigma.back() > tol.rank_tol * sigma.front();
}

/// |T|^{1/2} U |T|^{1/2}
inline Matrix aluthge(const Matrix& t, const Tolerances& tol = {}) {
  const auto parts = polar(t, tol);
  const Matrix root = psd_power(parts.modulus, 0.5, tol);
  return root * parts.isometry_part * root;
}

inline Matrix aluthge_iterate(const Matrix& t, unsigned k, const Tolerances& tol = {}) {
  Matrix out = t;
  for (unsigned i = 0; i < k; ++i) out = aluthge(out, tol);
  return out;
}

/// ‖T*T − TT*‖_F
inline double self_commutator_norm(const Matrix& t) {
  return distance(t.adjoint() * t, t * t.adjoint());
}

inline bool is_normal(const Matrix& t, const Tolerances& tol = {}) {
  t.require_square("is_normal");
  const double norm = operator_norm(t);
  return self_commutator_norm(t) <= tol.psd_tol * norm * norm;
}

/// |T|^{2p} and |T*|^{2p}, i.e. (T*T)^p and (TT*)^p.
struct ModulusPowers {
  Matrix of_t;
  Matrix of_adjoint;
};

inline ModulusPowers modulus_powers(const Matrix& t, double p, const Tolerances& tol = {}) {
  return {psd_power(polar(t, tol).modulus, 2.0 * p, tol),
          psd_power(polar(t.adjoint(), tol).modulus, 2.0 * p, tol)};
}

inline bool is_p_hyponormal(const Matrix& t, double p, const Tolerances& tol = {}) {
  if (!(p > 0.0)) throw std::invalid_argument("is_p_hyponormal: p must be positive");
  t.require_square("is_p_hyponormal");
  const auto powers = modulus_powers(t, p, tol);
  return loewner_geq(powers.of_t, powers.of_adjoint, tol);
}

inline bool is_hyponormal(const Matrix& t, const Tolerances& tol = {}) {
  return is_p_hyponormal(t, 1.0, tol);
}

/// log(T*T) ⪰ log(TT*); absent when T is singular (the class is undefined there).
inline std::optional<bool> is_log_hyponormal(const Matrix& t, const Tolerances& tol = {}) {
  t.require_square("is_log_hyponormal");
  if (!is_invertible(t, tol)) return std::nullopt;
  const Matrix log_t = pd_log(polar(t, tol).modulus, tol) * 2.0;
  const Matrix log_t_star = pd_log(polar(t.adjoint(), tol).modulus, tol) * 2.0;
  return loewner_geq(log_t, log_t_star, tol);
}

inline ClassReport classify(const Matrix& t, const std::vector<double>& ps,
                            const Tolerances& tol = {}) {
  t.require_square("classify");
  ClassReport report;
  report.defects["self_commutator"] = self_commutator_norm(t);
  report.defects["trace_self_commutator"] =
      std::abs((t.adjoint() * t - t * t.adjoint()).trace());
  report.normal = is_normal(t, tol);

  const auto ordered = loewner_margin(t.adjoint() * t, t * t.adjoint(), tol);
  report.defects["hyponormal_loewner"] = std::max(0.0, -ordered);
  report.hyponormal = ordered >= -tol.psd_tol;

  for (double p : ps) {
    const auto powers = modulus_powers(t, p, tol);
    const double margin = loewner_margin(powers.of_t, powers.of_adjoint, tol);
    report.p_hyponormal[p] = margin >= -tol.psd_tol;
    report.defects["p_hyponormal_loewner(p=" + detail::format_number(p) + ")"] =
        std::max(0.0, -margin);
  }
  report.log_hyponormal = is_log_hyponormal(t, tol);

  if (report.normal && !report.hyponormal) report.consistent = false;
  if (report.hyponormal) {
    for (const auto& [p, holds] : report.p_hyponormal)
      if (p <= 1.0 && !holds) report.consistent = false;
  }
  return report;
}

/// ‖U^{n0} − U*‖_F ≤ eq_tol·max(‖U‖^{n0}, 1)
inline bool power_equals_adjoint(const Matrix& u, unsigned n0, const Tolerances& tol = {}) {
  u.require_square("power_equals_adjoint");
  if (n0 == 0) throw std::invalid_argument("power_equals_adjoint: n0 must be positive");
  const double scale = std::max(std::pow(operator_norm(u), n0), 1.0);
  return distance(matrix_power(u, n0), u.adjoint()) <= tol.eq_tol * scale;
}

/// ‖U*U − I‖_F ≤ eq_tol·max(√n, 1)
inline bool is_unitary(const Matrix& u, const Tolerances& tol = {}) {
  if (!u.is_square()) return false;
  const Matrix eye = Matrix::identity(u.rows());
  return distance(u.adjoint() * u, eye) <= tol.eq_tol * std::max(frobenius_norm(eye), 1.0);
}

/// Open arc of length π containing the spectrum of a unitary U, centred on
/// the spectrum, or absent when the largest angular gap does not exceed π.
inline std::optional<Arc> semicircle_spectrum(const Matrix& u, const Tolerances& tol = {}) {
  if (!is_unitary(u, tol)) {
    throw std::domain_error("semicircle_spectrum: matrix is not unitary");
  }
  constexpr double pi = std::numbers::pi;
  constexpr double two_pi = 2.0 * pi;
  const auto spectrum = normal_eig(u, tol);
  std::vector<double> angles;
  for (const Complex& z : spectrum.eigenvalues) {
    double a = std::arg(z);
    if (a < 0.0) a += two_pi;
    angles.push_back(a);
  }
  std::sort(angles.begin(), angles.end());

  // Largest gap between consecutive angles, wrapping around.
  double best_gap = two_pi - (angles.back() - angles.front());
  double gap_end = angles.front();  // the spectrum starts here going ccw
  for (std::size_t k = 1; k < angles.size(); ++k) {
    const double gap = angles[k] - angles[k - 1];
    if (gap > best_gap) {
      best_gap = gap;
      gap_end = angles[k];
    }
  }
  const double spread = two_pi - best_gap;
  const double margin = 0.5 * (pi - spread);
  if (!(margin > tol.eq_tol)) return std::nullopt;

  double start = std::fmod(gap_end - margin, two_pi);
  if (start < 0.0) start += two_pi;
  return Arc{start, pi, margin};
}

/// Projection onto ran(X), UU* from the polar decomposition of X.
inline Matrix range_projection(const Matrix& x, const Tolerances& tol = {}) {
  const Matrix u = polar(x, tol).isometry_part;
  return u * u.adjoint();
}

/// Projection onto (ker X)^⊥, U*U from the polar decomposition of X.
inline Matrix kernel_orth_projection(const Matrix& x, const Tolerances& tol = {}) {
  const Matrix u = polar(x, tol).isometry_part;
  return u.adjoint() * u;
}

inline bool is_projection(const Matrix& q, const Tolerances& tol = {}) {
  if (!q.is_square()) return false;
  const double scale = std::max(frobenius_norm(q), 1.0);
  return detail::hermitian_defect(q) <= tol.eq_tol * scale &&
         distance(q * q, q) <= tol.eq_tol * scale;
}

namespace detail {
inline void require_projection(const Matrix& q, const Tolerances& tol, const char* what) {
  if (!is_projection(q, tol)) {
    throw std::invalid_argument(std::string(what) + ": Q is not an orthogonal projection");
  }
}
}  // namespace detail

/// ran(Q) reduces T iff QT = TQ.
inline bool reduces(const Matrix& t, const Matrix& q, const Tolerances& tol = {}) {
  detail::require_projection(q, tol, "reduces");
  if (t.rows() != q.rows() || !t.is_square()) {
    throw std::invalid_argument("reduces: shape mismatch");
  }
  return distance(q * t, t * q) <= tol.eq_tol * operator_norm(t);
}

/// B*TB for an orthonormal basis B of ran(Q); absent when Q = 0.
inline std::optional<Matrix> compress(const Matrix& t, const Matrix& q,
                                      const Tolerances& tol = {}) {
  detail::require_projection(q, tol, "compress");
  if (t.rows() != q.rows() || !t.is_square()) {
    throw std::invalid_argument("compress: shape mismatch");
  }
  const auto eig = detail::jacobi_eigh(q);
  std::size_t rank = 0;
  while (rank < eig.values.size() && eig.values[rank] > 0.5) ++rank;
  if (rank == 0) return std::nullopt;
  const Matrix basis = eig.vectors.columns(0, rank);
  return basis.adjoint() * t * basis;
}

}  // namespace normality

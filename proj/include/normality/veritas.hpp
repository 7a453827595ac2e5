#pragma once

// One checkable operation per normality claim. Every check returns a
// VerificationReport; the conclusion is left absent whenever a hypothesis
// fails, so a vacuous run can never be mistaken for a pass.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "normality/numerics.hpp"
#include "normality/operators.hpp"

namespace normality {

struct Hypothesis {
  std::string name;
  bool met = false;

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

struct VerificationReport {
  std::string claim_id;
  std::vector<Hypothesis> hypotheses;
  std::optional<bool> conclusion_holds;
  /// The conclusion evaluated regardless of the hypotheses, for necessity
  /// probes (e.g. a biconditional that fails when the arc condition does).
  std::optional<bool> raw_conclusion;
  std::map<std::string, double> defects;
  std::optional<Matrix> witness;
  int trials = 1;
  std::vector<std::string> notes;

  [[nodiscard]] bool hypotheses_met() const {
    return std::all_of(hypotheses.begin(), hypotheses.end(),
                       [](const Hypothesis& h) { return h.met; });
  }

  /// Hypotheses met and conclusion false.
  [[nodiscard]] bool failed() const { return conclusion_holds.has_value() && !*conclusion_holds; }
  [[nodiscard]] bool vacuous() const { return !conclusion_holds.has_value(); }

  [[nodiscard]] double max_defect() const {
    double m = 0.0;
    for (const auto& [name, value] : defects) m = std::max(m, value);
    return m;
  }

  void require(std::string name, bool met) { hypotheses.push_back({std::move(name), met}); }

  void defect(const std::string& name, double value) {
    defects[name] = std::isfinite(value) ? std::abs(value) : value;
  }

  /// Records the conclusion, honoring the vacuity rule, and keeps `input` as
  /// the witness whenever it evaluates to false.
  void conclude(bool holds, const Matrix& input) {
    raw_conclusion = holds;
    if (hypotheses_met()) conclusion_holds = holds;
    if (!holds) witness = input;
  }

  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

/// Class hypothesis of the normality theorems.
struct ClassMode {
  enum class Kind { p_hyponormal, log_hyponormal };
  Kind kind = Kind::p_hyponormal;
  double p = 1.0;

  static ClassMode p_hypo(double p) { return {Kind::p_hyponormal, p}; }
  static ClassMode log_hypo() { return {Kind::log_hyponormal, 0.0}; }

  [[nodiscard]] std::string label() const;
};

namespace detail {

inline bool class_member(const Matrix& t, const ClassMode& mode, const Tolerances& tol) {
  if (mode.kind == ClassMode::Kind::log_hyponormal) {
    const auto verdict = is_log_hyponormal(t, tol);
    return verdict.value_or(false);
  }
  return is_p_hyponormal(t, mode.p, tol);
}

/// The positive operator the chain inequalities conjugate: |T|^{2p}, or log|T|.
inline Matrix chain_base(const PolarParts& parts, const ClassMode& mode, const Tolerances& tol) {
  if (mode.kind == ClassMode::Kind::log_hyponormal) return pd_log(parts.modulus, tol);
  return psd_power(parts.modulus, 2.0 * mode.p, tol);
}

/// Square root of a unitary's square taken on the branch inside `arc`.
inline Complex root_in_arc(Complex z, const Arc& arc) {
  const Complex r = std::polar(1.0, 0.5 * std::arg(z));
  return arc.offset(r) < arc.length ? r : -r;
}

}  // namespace detail

inline std::string ClassMode::label() const {
  if (kind == Kind::log_hyponormal) return "log-hyponormal";
  return "p-hyponormal(p=" + detail::format_number(p) + ")";
}

/// |T*|^s = U |T|^s U* for each s.
inline VerificationReport verify_eq_h1(const Matrix& t, const std::vector<double>& s_list,
                                       const Tolerances& tol = {}) {
  VerificationReport report;
  report.claim_id = "Eq(H1)";
  report.require("square", t.is_square());
  if (!t.is_square()) return report;

  const auto parts = polar(t, tol);
  const Matrix adjoint_modulus = polar(t.adjoint(), tol).modulus;
  const double norm = operator_norm(t);
  const Matrix& u = parts.isometry_part;
  bool holds = true;
  for (double s : s_list) {
    const Matrix lhs = psd_power(adjoint_modulus, s, tol);
    const Matrix rhs = u * psd_power(parts.modulus, s, tol) * u.adjoint();
    const double d = distance(lhs, rhs);
    report.defect("s=" + detail::format_number(s), d);
    const double bound = tol.derived().eq_tol * std::max(std::pow(norm, 2.0 * s), 1.0);
    if (!(d <= bound)) holds = false;
  }
  report.conclude(holds, t);
  return report;
}

/// log|T*| = U (log|T|) U* for invertible T.
inline VerificationReport verify_eq_h2(const Matrix& t, const Tolerances& tol = {}) {
  VerificationReport report;
  report.claim_id = "Eq(H2)";
  const bool invertible = t.is_square() && is_invertible(t, tol);
  report.require("invertible", invertible);
  if (!invertible) return report;

  const auto parts = polar(t, tol);
  const Matrix log_modulus = pd_log(parts.modulus, tol);
  const Matrix lhs = pd_log(polar(t.adjoint(), tol).modulus, tol);
  const Matrix rhs = parts.isometry_part * log_modulus * parts.isometry_part.adjoint();
  const double d = distance(lhs, rhs);
  report.defect("log_conjugation", d);
  const double bound = tol.derived().eq_tol * std::max(operator_norm(log_modulus), 1.0);
  report.conclude(d <= bound, t);
  return report;
}

/// |T|^{2p} ⪰ |T*|^{2p} = U|T|^{2p}U* ⪰ U²|T|^{2p}U*² ⪰ … to the given depth.
inline VerificationReport verify_chain2(const Matrix& t, double p, unsigned depth,
                                        const Tolerances& tol = {}) {
  VerificationReport report;
  report.claim_id = "Chain(2)";
  report.require("p-hyponormal(p=" + detail::format_number(p) + ")", is_p_hyponormal(t, p, tol));

  const auto parts = polar(t, tol);
  const Matrix& u = parts.isometry_part;
  const Matrix base = psd_power(parts.modulus, 2.0 * p, tol);
  const Matrix adjoint_power = psd_power(polar(t.adjoint(), tol).modulus, 2.0 * p, tol);
  const Tolerances derived = tol.derived();

  bool holds = true;
  const double anchor = loewner_margin(base, adjoint_power, tol);
  report.defect("anchor", std::max(0.0, -anchor));
  holds = holds && anchor >= -derived.psd_tol;

  const double h1 = distance(adjoint_power, u * base * u.adjoint());
  report.defect("adjoint_identity", h1);
  holds = holds && h1 <= derived.eq_tol * std::max(operator_norm(base), 1.0);

  double worst = 0.0;
  Matrix current = base;
  for (unsigned k = 0; k < depth; ++k) {
    Matrix next = hermitian_part(u * current * u.adjoint());
    const double margin = loewner_margin(current, next, tol);
    report.defect("link[" + std::to_string(k) + "]", std::max(0.0, -margin));
    worst = std::max(worst, -margin);
    holds = holds && margin >= -derived.psd_tol;
    current = std::move(next);
  }
  report.defect("max_link", std::max(0.0, worst));
  report.conclude(holds, t);
  return report;
}

/// Class membership and U^{n0} = U* imply normality. Also checks the
/// pivot U^{n0+1} B U^{*(n0+1)} = B for B = |T|^{2p} (or log|T|).
inline VerificationReport verify_thm21(const Matrix& t, const ClassMode& mode, unsigned n0,
                                       const Tolerances& tol = {}) {
  VerificationReport report;
  report.claim_id = "Thm2.1";
  report.require(mode.label(), detail::class_member(t, mode, tol));
  const auto parts = polar(t, tol);
  const Matrix& u = parts.isometry_part;
  report.require("U^" + std::to_string(n0) + "=U*", power_equals_adjoint(u, n0, tol));
  if (!report.hypotheses_met()) return report;

  const Tolerances derived = tol.derived();
  const Matrix lifted = matrix_power(u, n0 + 1);
  const double projection_defect = distance(lifted, u.adjoint() * u);
  report.defect("U^(n0+1)=U*U", projection_defect);

  const Matrix base = detail::chain_base(parts, mode, tol);
  const double pivot = distance(lifted * base * lifted.adjoint(), base);
  report.defect("pivot", pivot);
  report.defect("self_commutator", self_commutator_norm(t));

  const bool pivot_ok = pivot <= derived.eq_tol * std::max(operator_norm(base), 1.0) &&
                        projection_defect <= derived.eq_tol * std::max(frobenius_norm(u), 1.0);
  report.conclude(pivot_ok && is_normal(t, derived), t);
  return report;
}

/// ‖|T|^p ξ‖ ≥ ‖|T|^p U* ξ‖ ≥ ‖|T|^p U*² ξ‖ ≥ … to the given depth.
inline VerificationReport verify_chain3(const Matrix& t, double p, const Vector& xi,
                                        unsigned depth, const Tolerances& tol = {}) {
  VerificationReport report;
  report.claim_id = "Chain(3)";
  report.require("p-hyponormal(p=" + detail::format_number(p) + ")", is_p_hyponormal(t, p, tol));
  if (xi.dim() != t.rows()) throw std::invalid_argument("verify_chain3: vector dimension mismatch");

  const auto parts = polar(t, tol);
  const Matrix root = psd_power(parts.modulus, p, tol);
  const Matrix u_star = parts.isometry_part.adjoint();
  const double slack = tol.derived().eq_tol * std::max(operator_norm(root), 1.0) *
                       std::max(xi.norm(), 1.0);

  std::vector<double> norms;
  Vector v = xi;
  for (unsigned k = 0; k <= depth; ++k) {
    norms.push_back((root * v).norm());
    v = u_star * v;
  }
  const double adjoint_norm =
      (psd_power(polar(t.adjoint(), tol).modulus, p, tol) * xi).norm();
  bool holds = true;
  if (norms.size() > 1) {
    const double d = std::abs(adjoint_norm - norms[1]);
    report.defect("adjoint_norm_identity", d);
    holds = holds && d <= slack;
  }
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < norms.size(); ++k) {
    const double excess = norms[k + 1] - norms[k];
    report.defect("link[" + std::to_string(k) + "]", std::max(0.0, excess));
    worst = std::max(worst, excess);
    holds = holds && excess <= slack;
  }
  report.defect("max_link", std::max(0.0, worst));
  report.conclude(holds, t);
  return report;
}

/// Which powers must converge to I in the strong-limit hypothesis.
enum class PowerDirection { adjoint_powers, powers };

/// Strong-limit normality theorem at desk scale. The hypothesis U^{*n} → I
/// (or U^n → I) is rendered as ‖U^{*N} − I‖ and ‖U^{*(N+1)} − I‖ both below
/// eq_tol: two consecutive powers near I force U near I, which is what the
/// limit means in finite dimensions.
inline VerificationReport verify_thm22(const Matrix& t, const ClassMode& mode, unsigned horizon,
                                       const Tolerances& tol = {},
                                       PowerDirection direction = PowerDirection::adjoint_powers) {
  if (horizon == 0) throw std::invalid_argument("verify_thm22: horizon must be positive");
  VerificationReport report;
  report.claim_id = "Thm2.2";
  report.require(mode.label(), detail::class_member(t, mode, tol));

  const Matrix u = polar(t, tol).isometry_part;
  const Matrix step = direction == PowerDirection::adjoint_powers ? u.adjoint() : u;
  const Matrix eye = Matrix::identity(t.rows());
  const double bound = tol.eq_tol * std::max(frobenius_norm(eye), 1.0);

  double closest = std::numeric_limits<double>::infinity();
  Matrix power = eye;
  double at_horizon = 0.0;
  double after_horizon = 0.0;
  for (unsigned n = 1; n <= horizon + 1; ++n) {
    power = power * step;
    const double d = distance(power, eye);
    if (n <= horizon) closest = std::min(closest, d);
    if (n == horizon) at_horizon = d;
    if (n == horizon + 1) after_horizon = d;
  }
  report.defect("min_power_distance", closest);
  report.defect("power_distance(N)", at_horizon);
  report.defect("power_distance(N+1)", after_horizon);
  report.require(std::string(direction == PowerDirection::adjoint_powers ? "U*^n" : "U^n") +
                     "->I (tail surrogate)",
                 at_horizon <= bound && after_horizon <= bound);
  report.notes.push_back(
      "finite-dimensional surrogate: the limit hypothesis holds only when U = I "
      "within tolerance, so T is then positive semidefinite");
  if (!is_unitary(u, tol)) {
    report.notes.push_back("U is a proper partial isometry; the surrogate cannot hold");
  }
  report.defect("self_commutator", self_commutator_norm(t));
  report.conclude(is_normal(t, tol.derived()), t);
  return report;
}

namespace detail {
inline bool is_positive_definite(const Matrix& p, const Tolerances& tol) {
  if (!p.is_square() || p.empty()) return false;
  if (hermitian_defect(p) > tol.eq_tol * frobenius_norm(p)) return false;
  const auto eig = jacobi_eigh(p);
  return eig.values.back() > tol.rank_tol * eig.values.front();
}
}  // namespace detail

/// log T ⪰ log S implies log(cT) ⪰ log(cS), via log(cT) = (log c)I + log T.
inline VerificationReport verify_lemma23(const Matrix& t, const Matrix& s, double c,
                                         const Tolerances& tol = {}) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("verify_lemma23: c must be positive");
  }
  VerificationReport report;
  report.claim_id = "Lemma2.3";
  const bool t_pd = detail::is_positive_definite(t, tol);
  const bool s_pd = detail::is_positive_definite(s, tol);
  report.require("T positive definite", t_pd);
  report.require("S positive definite", s_pd);
  if (!t_pd || !s_pd) return report;

  const Matrix log_t = pd_log(t, tol);
  const Matrix log_s = pd_log(s, tol);
  const double hypothesis_margin = loewner_margin(log_t, log_s, tol);
  report.defect("hypothesis_loewner", std::max(0.0, -hypothesis_margin));
  report.require("log T >= log S", hypothesis_margin >= -tol.psd_tol);

  const Tolerances derived = tol.derived();
  const Matrix log_ct = pd_log(t * c, tol);
  const Matrix log_cs = pd_log(s * c, tol);
  const Matrix shift = Matrix::identity(t.rows()) * std::log(c);
  const double id_t = distance(log_ct, shift + log_t);
  const double id_s = distance(log_cs, shift + log_s);
  report.defect("identity_T", id_t);
  report.defect("identity_S", id_s);
  const double margin = loewner_margin(log_ct, log_cs, tol);
  report.defect("conclusion_loewner", std::max(0.0, -margin));

  const double id_bound =
      derived.eq_tol * std::max({operator_norm(log_t), operator_norm(log_s), std::abs(std::log(c)), 1.0});
  Matrix witness = t;
  report.conclude(margin >= -derived.psd_tol && id_t <= id_bound && id_s <= id_bound, witness);
  return report;
}

/// Normal N with NX = XN satisfies N*X = XN*.
inline VerificationReport fuglede_putnam_check(const Matrix& n_mat, const Matrix& x,
                                               const Tolerances& tol = {}) {
  VerificationReport report;
  report.claim_id = "FugledePutnam";
  const double scale = operator_norm(n_mat) * operator_norm(x);
  report.require("N normal", is_normal(n_mat, tol));
  const double hyp = distance(n_mat * x, x * n_mat);
  report.defect("NX-XN", hyp);
  report.require("NX = XN", hyp <= tol.eq_tol * scale);

  const double d = distance(n_mat.adjoint() * x, x * n_mat.adjoint());
  report.defect("N*X-XN*", d);
  report.conclude(d <= tol.derived().eq_tol * scale, n_mat);
  return report;
}

/// TX = XS implies ran(X) reduces T, (ker X)^⊥ reduces S, and both
/// compressions are normal. Whether the intertwining premise carries over to
/// adjoints (T, S normal, say) is for the caller to arrange.
inline VerificationReport verify_intertwining_reduction(const Matrix& t, const Matrix& s,
                                                        const Matrix& x,
                                                        const Tolerances& tol = {}) {
  VerificationReport report;
  report.claim_id = "Lemma2.4";
  const double scale = std::max(operator_norm(t), operator_norm(s)) * operator_norm(x);
  const double hyp = distance(t * x, x * s);
  report.defect("TX-XS", hyp);
  report.require("TX = XS", hyp <= tol.eq_tol * scale);

  const Tolerances derived = tol.derived();
  const Matrix range = range_projection(x, tol);
  const Matrix coker = kernel_orth_projection(x, tol);
  report.defect("range_commutator", distance(range * t, t * range));
  report.defect("kernel_commutator", distance(coker * s, s * coker));

  const bool t_reduced = reduces(t, range, derived);
  const bool s_reduced = reduces(s, coker, derived);
  bool compressions_normal = true;
  if (auto c = compress(t, range, derived)) {
    report.defect("T_compression_self_commutator", self_commutator_norm(*c));
    compressions_normal = compressions_normal && is_normal(*c, derived);
  }
  if (auto c = compress(s, coker, derived)) {
    report.defect("S_compression_self_commutator", self_commutator_norm(*c));
    compressions_normal = compressions_normal && is_normal(*c, derived);
  }
  report.conclude(t_reduced && s_reduced && compressions_normal, t);
  return report;
}

/// U²X = XU² implies UX = XU when the spectrum of U lies in an open
/// semicircle. Checked directly and by rebuilding U from U² through the
/// square-root branch inside the arc.
inline VerificationReport beck_putnam_check(const Matrix& u, const Matrix& x,
                                            const Tolerances& tol = {}) {
  if (!is_unitary(u, tol)) throw std::domain_error("beck_putnam_check: U is not unitary");
  VerificationReport report;
  report.claim_id = "BeckPutnam";
  const auto arc = semicircle_spectrum(u, tol);
  report.require("sp(U) in open semicircle", arc.has_value());

  const double x_norm = operator_norm(x);
  const Matrix u2 = u * u;
  const double hyp = distance(u2 * x, x * u2);
  report.defect("U2X-XU2", hyp);
  report.require("U^2 X = X U^2", hyp <= tol.eq_tol * x_norm);

  const double direct = distance(u * x, x * u);
  report.defect("UX-XU", direct);
  const Tolerances derived = tol.derived();
  bool holds = direct <= derived.eq_tol * x_norm;

  if (arc) {
    report.defect("arc_margin", arc->margin);
    const Matrix rebuilt =
        function_of_normal(u2, [&](Complex z) { return detail::root_in_arc(z, *arc); }, tol);
    const double rebuild = distance(rebuilt, u);
    const double rebuilt_comm = distance(rebuilt * x, x * rebuilt);
    report.defect("reconstruction", rebuild);
    report.defect("reconstructed_commutator", rebuilt_comm);
    holds = holds && rebuild <= derived.eq_tol && rebuilt_comm <= derived.eq_tol * x_norm;
  } else {
    report.notes.push_back(
        "no open semicircle contains sp(U): commuting with U^2 need not force commuting with U");
  }
  report.conclude(holds, u);
  return report;
}

/// For invertible T whose unitary factor has spectrum in an open semicircle,
/// the Aluthge transform is normal iff T is. When both hypotheses hold and
/// the transform is normal, the commutation pipeline is replayed for X = I and
/// X = T (both commute with T).
inline VerificationReport verify_thm25(const Matrix& t, const Tolerances& tol = {}) {
  VerificationReport report;
  report.claim_id = "Thm2.5";
  const bool invertible = t.is_square() && is_invertible(t, tol);
  report.require("invertible", invertible);

  const auto parts = polar(t, tol);
  const Matrix& u = parts.isometry_part;
  std::optional<Arc> arc;
  if (invertible && is_unitary(u, tol)) arc = semicircle_spectrum(u, tol);
  report.require("sp(U) in open semicircle", arc.has_value());
  if (arc) report.defect("arc_margin", arc->margin);

  const Matrix transform = aluthge(t, tol);
  const bool transform_normal = is_normal(transform, tol);
  const bool t_normal = is_normal(t, tol);
  report.defect("transform_self_commutator", self_commutator_norm(transform));
  report.defect("self_commutator", self_commutator_norm(t));
  bool holds = transform_normal == t_normal;

  if (report.hypotheses_met() && transform_normal) {
    const Tolerances derived = tol.derived();
    const Matrix& modulus = parts.modulus;
    const Matrix root = psd_power(modulus, 0.5, tol);
    const Matrix inv_root =
        hermitian_function(modulus, [](double x) { return 1.0 / std::sqrt(x); }, tol);
    const Matrix u_star = u.adjoint();
    const Matrix u2 = u * u;
    const double t_norm = std::max(operator_norm(t), 1.0);

    const std::pair<const char*, Matrix> probes[] = {{"X=I", Matrix::identity(t.rows())},
                                                     {"X=T", t}};
    for (const auto& [label, x] : probes) {
      const std::string tag = std::string("[") + label + "]";
      const double scale = derived.eq_tol * t_norm * std::max(operator_norm(x), 1.0);
      const Matrix y = root * x * inv_root;
      const double y_scale = derived.eq_tol * std::max(operator_norm(transform), 1.0) *
                             std::max(operator_norm(y), 1.0);
      const double steps[] = {
          distance(t * x, x * t),
          distance(transform * y, y * transform),
          distance(u_star * modulus * x, x * u_star * modulus),
          distance(u2 * x, x * u2),
          distance(u_star * x, x * u_star),
          distance(modulus * x, x * modulus),
          distance(t.adjoint() * x, x * t.adjoint()),
      };
      const char* names[] = {"TX=XT",     "transform_similarity", "U*|T|X=XU*|T|", "U2X=XU2",
                             "U*X=XU*", "|T|X=X|T|",            "T*X=XT*"};
      for (std::size_t k = 0; k < std::size(steps); ++k) {
        report.defect(names[k] + tag, steps[k]);
        const double bound = k == 1 ? y_scale : scale;
        holds = holds && steps[k] <= bound;
      }
    }
  }
  if (!arc) {
    report.notes.push_back("semicircle hypothesis fails; biconditional recorded as raw_conclusion");
  }
  report.conclude(holds, t);
  return report;
}

}  // namespace normality

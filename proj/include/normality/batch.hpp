#pragma once

// Batch verification: maps a claim id to its trial generator and verifier,
// derives one seed per trial, and aggregates reports.

#include <array>
#include <cstdint>
#include <exception>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "normality/families.hpp"
#include "normality/io.hpp"
#include "normality/veritas.hpp"

namespace normality {

enum class ClaimId {
  eqh1,
  eqh2,
  chain2,
  chain3,
  thm21,
  thm22,
  lemma23,
  lemma24,
  fuglede,
  beckputnam,
  thm25,
};

inline constexpr std::array<std::pair<ClaimId, std::string_view>, 11> kClaimNames{{
    {ClaimId::eqh1, "eqh1"},
    {ClaimId::eqh2, "eqh2"},
    {ClaimId::chain2, "chain2"},
    {ClaimId::chain3, "chain3"},
    {ClaimId::thm21, "thm21"},
    {ClaimId::thm22, "thm22"},
    {ClaimId::lemma23, "lemma23"},
    {ClaimId::lemma24, "lemma24"},
    {ClaimId::fuglede, "fuglede"},
    {ClaimId::beckputnam, "beckputnam"},
    {ClaimId::thm25, "thm25"},
}};

inline std::optional<ClaimId> parse_claim(std::string_view name) {
  for (const auto& [id, label] : kClaimNames)
    if (label == name) return id;
  return std::nullopt;
}

inline std::string_view to_string(ClaimId id) {
  for (const auto& [claim, label] : kClaimNames)
    if (claim == id) return label;
  return "unknown";
}

struct RunConfig {
  Tolerances tol{};
  std::uint64_t seed = 1;
  std::size_t trials = 100;
  std::vector<std::size_t> dims{2, 3, 4, 5, 6};
  std::optional<FamilyKind> family;
  double cond_bound = kDefaultConditionBound;
  unsigned depth = 8;

  void validate() const {
    tol.validate();
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (dims.empty()) throw std::invalid_argument("dims must not be empty");
    for (auto d : dims)
      if (d < 1) throw std::invalid_argument("dims must all be at least 1");
    if (!(cond_bound >= 1.0)) throw std::invalid_argument("cond_bound must be >= 1");
  }
};

/// Parses "a..b" or a single integer.
inline std::vector<std::size_t> parse_dims(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const long v = std::stol(text);
      if (v < 1) throw std::invalid_argument("dims must be positive");
      return {static_cast<std::size_t>(v)};
    }
    const long lo = std::stol(text.substr(0, dots));
    const long hi = std::stol(text.substr(dots + 2));
    if (lo < 1 || hi < lo) throw std::invalid_argument("dims range must satisfy 1 <= a <= b");
    std::vector<std::size_t> out;
    for (long d = lo; d <= hi; ++d) out.push_back(static_cast<std::size_t>(d));
    return out;
  } catch (const std::logic_error&) {
    throw std::invalid_argument("dims must look like 'a..b' or 'n', got '" + text + "'");
  }
}

inline json config_to_json(const RunConfig& c) {
  return {{"tolerances", tolerances_to_json(c.tol)},
          {"seed", c.seed},
          {"trials", c.trials},
          {"dims", c.dims},
          {"family", c.family ? json(std::string(to_string(*c.family))) : json(nullptr)},
          {"cond_bound", c.cond_bound},
          {"depth", c.depth}};
}

inline RunConfig config_from_json(const json& j) {
  RunConfig c;
  if (j.contains("tolerances")) c.tol = tolerances_from_json(j.at("tolerances"));
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("trials")) c.trials = j.at("trials").get<std::size_t>();
  if (j.contains("dims")) {
    const json& d = j.at("dims");
    c.dims = d.is_string() ? parse_dims(d.get<std::string>()) : d.get<std::vector<std::size_t>>();
  }
  if (j.contains("family") && !j.at("family").is_null()) {
    const auto name = j.at("family").get<std::string>();
    c.family = parse_family_kind(name);
    if (!c.family) throw FormatError("config: unknown family '" + name + "'");
  }
  if (j.contains("cond_bound")) c.cond_bound = j.at("cond_bound").get<double>();
  if (j.contains("depth")) c.depth = j.at("depth").get<unsigned>();
  c.validate();
  return c;
}

namespace detail {

inline const std::array<ClassMode, 4>& class_modes() {
  static const std::array<ClassMode, 4> modes{ClassMode::p_hypo(0.25), ClassMode::p_hypo(0.5),
                                              ClassMode::p_hypo(1.0), ClassMode::log_hypo()};
  return modes;
}

/// Random arc of length π with margin 0.1 or 0.5.
inline Arc random_arc(SplitMix64& rng) {
  const double margin = rng.index(2) == 0 ? 0.1 : 0.5;
  return Arc{rng.uniform(0.0, 2.0 * std::numbers::pi), std::numbers::pi, margin};
}

/// Default operator for a single-operator claim, overridden by config.family.
inline Matrix trial_operator(const RunConfig& c, FamilyKind fallback, std::size_t dim,
                             SplitMix64& rng) {
  FamilySpec spec;
  spec.kind = c.family.value_or(fallback);
  spec.dim = spec.kind == FamilyKind::cyclic_weighted_shift ? std::max<std::size_t>(dim, 2) : dim;
  spec.seed = rng.next();
  spec.cond_bound = c.cond_bound;
  spec.arc = random_arc(rng);
  const std::size_t mode = rng.index(4);
  spec.modulus = mode == 0 ? ModulusMode::commuting
                 : mode == 1 ? ModulusMode::identity
                             : ModulusMode::random;
  return generate(spec);
}

inline Vector random_vector(std::size_t dim, SplitMix64& rng) {
  Vector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = rng.complex_normal();
  return v;
}

}  // namespace detail

/// Runs trial `index` of a claim. The trial is a pure function of
/// (claim, config, index), so any reported trial can be replayed.
inline VerificationReport run_trial(ClaimId claim, const RunConfig& c, std::size_t index) {
  const std::uint64_t seed = derive_seed(c.seed, index);
  const std::size_t dim = c.dims[index % c.dims.size()];
  SplitMix64 rng(seed);
  const Tolerances& tol = c.tol;

  switch (claim) {
    case ClaimId::eqh1: {
      const Matrix t = c.family ? detail::trial_operator(c, *c.family, dim, rng)
                                : random_gaussian(dim, rng.next());
      return verify_eq_h1(t, {0.0, 0.5, 1.0, 2.0}, tol);
    }
    case ClaimId::eqh2:
      return verify_eq_h2(detail::trial_operator(c, FamilyKind::random_invertible, dim, rng), tol);
    case ClaimId::chain2: {
      const Matrix t = detail::trial_operator(c, FamilyKind::cyclic_weighted_shift, dim, rng);
      const double p = detail::class_modes()[index % 3].p;
      return verify_chain2(t, p, c.depth, tol);
    }
    case ClaimId::chain3: {
      const Matrix t = detail::trial_operator(c, FamilyKind::cyclic_weighted_shift, dim, rng);
      const double p = detail::class_modes()[index % 3].p;
      return verify_chain3(t, p, detail::random_vector(t.rows(), rng), c.depth, tol);
    }
    case ClaimId::thm21: {
      const Matrix t = detail::trial_operator(c, FamilyKind::cyclic_weighted_shift, dim, rng);
      const auto n0 = static_cast<unsigned>(std::max<std::size_t>(t.rows() - 1, 1));
      return verify_thm21(t, detail::class_modes()[index % 4], n0, tol);
    }
    case ClaimId::thm22: {
      const FamilyKind fallback =
          index % 2 == 0 ? FamilyKind::random_psd : FamilyKind::cyclic_weighted_shift;
      const Matrix t = detail::trial_operator(c, fallback, dim, rng);
      return verify_thm22(t, detail::class_modes()[index % 4], c.depth, tol);
    }
    case ClaimId::lemma23: {
      const auto [t, s] = log_ordered_pair(dim, rng.next());
      constexpr double cs[] = {0.1, 1.0, 10.0};
      return verify_lemma23(t, s, cs[index % 3], tol);
    }
    case ClaimId::lemma24: {
      const Matrix t = random_normal(dim, rng.next());
      Matrix x = Matrix::identity(dim);
      if (index % 2 == 1) x = t * t + t * rng.complex_normal() + x * rng.complex_normal();
      return verify_intertwining_reduction(t, t, x, tol);
    }
    case ClaimId::fuglede: {
      const auto [n_mat, x] = commuting_normal_pair(dim, rng.next());
      return fuglede_putnam_check(n_mat, x, tol);
    }
    case ClaimId::beckputnam: {
      const Arc arc = detail::random_arc(rng);
      const auto [u, x] = arc_unitary_commutant_pair(arc, dim, rng.next());
      return beck_putnam_check(u, x, tol);
    }
    case ClaimId::thm25:
      return verify_thm25(detail::trial_operator(c, FamilyKind::arc_unitary_times_pd, dim, rng),
                          tol);
  }
  throw std::invalid_argument("unknown claim");
}

struct BatchOutcome {
  json report;
  std::size_t failures = 0;

  [[nodiscard]] int exit_code() const { return failures == 0 ? 0 : 1; }
};

/// Runs every trial. A trial that throws counts as a failure carrying the
/// error message. Exit 0 iff there are no non-vacuous failures.
inline BatchOutcome run_batch(ClaimId claim, const RunConfig& c, bool include_trials = false) {
  c.validate();
  json failures = json::array();
  json trials = json::array();
  std::size_t vacuous = 0;
  std::size_t passed = 0;
  double max_defect = 0.0;

  for (std::size_t index = 0; index < c.trials; ++index) {
    const std::uint64_t seed = derive_seed(c.seed, index);
    try {
      const VerificationReport r = run_trial(claim, c, index);
      if (include_trials) trials.push_back(report_to_json(r));
      if (r.vacuous()) {
        ++vacuous;
        continue;
      }
      max_defect = std::max(max_defect, r.max_defect());
      if (r.failed()) {
        failures.push_back({{"trial", index},
                            {"seed", seed},
                            {"defects", r.defects},
                            {"witness", r.witness ? matrix_to_json(*r.witness) : json(nullptr)}});
      } else {
        ++passed;
      }
    } catch (const std::exception& e) {
      failures.push_back({{"trial", index},
                          {"seed", seed},
                          {"defects", json::object()},
                          {"witness", nullptr},
                          {"error", e.what()}});
    }
  }

  BatchOutcome out;
  out.failures = failures.size();
  out.report = {{"claim_id", std::string(to_string(claim))},
                {"config", config_to_json(c)},
                {"trials", c.trials},
                {"passed", passed},
                {"vacuous", vacuous},
                {"failures", std::move(failures)},
                {"max_defect", max_defect}};
  if (include_trials) out.report["trial_reports"] = std::move(trials);
  return out;
}

}  // namespace normality

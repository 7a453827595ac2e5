// Acceptance run: one PASS/FAIL line per criterion, exit 0 iff all pass.
//
// usage: acceptance [path/to/normality] [fixtures dir]
// Without the CLI path the command-line criterion is reported as FAIL.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "normality/batch.hpp"
#include "normality/io.hpp"

using namespace normality;
namespace fs = std::filesystem;

namespace {

// Pinned acceptance tolerances.
constexpr double kPowerConjugationTol = 1e-8;
constexpr double kLogConjugationTol = 1e-8;
constexpr double kPolarTol = 1e-8;
constexpr double kShiftLawTol = 1e-9;
constexpr double kChainTol = 1e-8;
constexpr double kLogOrderTol = 1e-8;
constexpr double kLogIdentityTol = 1e-9;
constexpr double kCommutantTol = 1e-8;
constexpr double kRootTol = 1e-8;
constexpr double kControlTol = 1e-9;
constexpr double kWitnessTol = 1e-9;
constexpr double kTraceTol = 1e-8;

constexpr std::uint64_t kBaseSeed = 20240917;

// Every square matrix built below passes through here. The bound uses
// ‖T‖_F²/n ≤ ‖T‖², so meeting it implies the operator-norm form. Both sides
// scale as |t|², so entries are normalised first to keep huge fixtures finite.
struct TraceAudit {
  std::size_t seen = 0;
  std::size_t violations = 0;
  double worst = 0.0;

  void operator()(const Matrix& raw) {
    if (!raw.is_square() || raw.empty()) return;
    ++seen;
    double peak = 0.0;
    for (const Complex& z : raw.entries()) peak = std::max({peak, std::abs(z.real()), std::abs(z.imag())});
    const Matrix m = peak > 0.0 ? raw * (1.0 / peak) : raw;
    const double f = frobenius_norm(m);
    const double scale = f * f / static_cast<double>(m.rows());
    const double tr = std::abs((m.adjoint() * m - m * m.adjoint()).trace());
    const double ratio = scale > 0.0 ? tr / scale : tr;
    worst = std::max(worst, ratio);
    if (!(tr <= kTraceTol * scale)) ++violations;
  }
};

TraceAudit audit;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

int report_line(int id, const std::string& name, Outcome& o, double seconds, double budget) {
  if (budget > 0.0) {
    o.check(seconds < budget, "runtime " + std::to_string(seconds) + " s over budget");
    o.detail << "runtime " << std::fixed << std::setprecision(2) << seconds << " s (< "
             << budget << " s)";
  } else {
    o.detail << "runtime " << std::fixed << std::setprecision(2) << seconds << " s";
  }
  std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": " << name << " -- "
            << o.detail.str() << std::endl;
  return o.pass ? 0 : 1;
}

int run(int id, const std::string& name, double budget, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report_line(id, name, o, seconds, budget);
}

// ---- polar contract ----------------------------------------------------

double polar_worst_defect(const Matrix& t) {
  const Tolerances tol;
  const auto parts = polar(t, tol);
  const Matrix& u = parts.isometry_part;
  const Matrix& p = parts.modulus;
  audit(t);
  audit(u);
  audit(p);
  const std::size_t n = t.rows();
  const double reconstruction = distance(t, u * p);
  const double psd = std::max(0.0, -min_eigenvalue(p));
  const double hermitian = distance(p, p.adjoint());
  const double partial_isometry = distance(u * u.adjoint() * u, u);
  // ker U and ker P compared through the projections onto them.
  const Matrix ker_u = Matrix::identity(n) - u.adjoint() * u;
  const Matrix ker_p = Matrix::identity(n) - psd_power(p, 0.0, tol);
  const double kernels = distance(ker_u, ker_p);
  return std::max({reconstruction, psd, hermitian, partial_isometry, kernels});
}

// ---- CLI helpers ---------------------------------------------------------

int shell(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.entries().data(), b.entries().data(),
                     a.entries().size() * sizeof(Complex)) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const fs::path fixtures = argc > 2 ? fs::path(argv[2]) : fs::path("tests/fixtures");
  int failed = 0;

  const std::size_t sweep_dims[] = {2, 4, 8, 16};
  const double powers[] = {0.0, 0.5, 1.0, 2.0};

  failed += run(1, "adjoint modulus powers conjugate through U", 30.0, [&](Outcome& o) {
    double worst = 0.0;
    std::size_t count = 0;
    for (std::size_t n : sweep_dims) {
      for (std::uint64_t i = 0; i < 200; ++i) {
        const Matrix t = random_gaussian(n, derive_seed(kBaseSeed + n, i));
        audit(t);
        const auto r = verify_eq_h1(t, {std::begin(powers), std::end(powers)});
        const double norm = operator_norm(t);
        for (double s : powers) {
          const double d = r.defects.at("s=" + detail::format_number(s));
          const double bound = kPowerConjugationTol * std::max(std::pow(norm, 2 * s), 1.0);
          worst = std::max(worst, d / bound);
          o.check(d <= bound, "n=" + std::to_string(n) + " trial " + std::to_string(i));
        }
        ++count;
      }
    }
    o.detail << count << " operators x 4 exponents, worst defect/bound " << std::scientific
             << std::setprecision(2) << worst << "; ";
  });

  failed += run(2, "adjoint modulus logarithms conjugate through U", 15.0, [&](Outcome& o) {
    double worst = 0.0;
    for (std::size_t n : sweep_dims) {
      for (std::uint64_t i = 0; i < 200; ++i) {
        const Matrix t = random_invertible(n, derive_seed(kBaseSeed + 100 + n, i), 100.0);
        audit(t);
        const auto r = verify_eq_h2(t);
        o.check(r.hypotheses_met(), "invertibility not detected");
        const double d = r.defects.at("log_conjugation");
        worst = std::max(worst, d);
        o.check(d <= kLogConjugationTol, "n=" + std::to_string(n) + " trial " + std::to_string(i));
      }
    }
    o.detail << "800 invertible operators (cond <= 100), worst defect " << std::scientific
             << std::setprecision(2) << worst << "; ";
  });

  failed += run(3, "polar decomposition contract", 0.0, [&](Outcome& o) {
    double worst = 0.0;
    std::size_t count = 0;
    auto check = [&](const Matrix& t, const std::string& label) {
      const double d = polar_worst_defect(t);
      worst = std::max(worst, d);
      o.check(d <= kPolarTol, label);
      ++count;
    };
    for (std::size_t n : sweep_dims) {
      for (std::uint64_t i = 0; i < 200; ++i) {
        check(random_gaussian(n, derive_seed(kBaseSeed + n, i)), "gaussian n=" + std::to_string(n));
        check(random_invertible(n, derive_seed(kBaseSeed + 100 + n, i), 100.0),
              "invertible n=" + std::to_string(n));
      }
      check(nilpotent_jordan(n), "jordan n=" + std::to_string(n));
      check(Matrix(n, n), "zero n=" + std::to_string(n));
    }
    o.detail << count << " operators incl. Jordan and zero, worst invariant defect "
             << std::scientific << std::setprecision(2) << worst << "; ";
  });

  // Criterion 4 instances are kept for the chain criterion.
  struct ShiftInstance {
    Matrix t;
    ClassMode mode;
    std::uint64_t seed;
  };
  std::vector<ShiftInstance> satisfying;

  failed += run(4, "power-adjoint unitary factor forces normality (cyclic shifts)", 60.0,
                [&](Outcome& o) {
                  std::size_t met = 0;
                  std::size_t normal_count = 0;
                  for (std::uint64_t i = 0; i < 10000; ++i) {
                    const std::uint64_t seed = derive_seed(kBaseSeed + 400, i);
                    SplitMix64 rng(seed);
                    const std::size_t n = 2 + i % 7;
                    const auto w = random_shift_weights(n, rng);
                    const Matrix t = cyclic_weighted_shift(w);
                    audit(t);
                    const ClassMode mode = detail::class_modes()[i % 4];
                    const auto r = verify_thm21(t, mode, static_cast<unsigned>(n - 1));
                    const bool normal = is_normal(t);
                    double lo = std::abs(w[0]);
                    double hi = lo;
                    for (const auto& x : w) {
                      lo = std::min(lo, std::abs(x));
                      hi = std::max(hi, std::abs(x));
                    }
                    o.check(normal == (hi - lo <= kShiftLawTol),
                            "shift law, seed " + std::to_string(seed));
                    if (normal) ++normal_count;
                    if (r.hypotheses_met()) {
                      ++met;
                      o.check(!r.failed() && normal, "hypotheses met but not normal, seed " +
                                                         std::to_string(seed));
                      satisfying.push_back({t, mode, seed});
                    }
                  }
                  o.detail << "10000 shifts (dims 2-8), " << met << " with hypotheses met, "
                           << normal_count << " normal, 0 counterexamples required; ";
                });

  failed += run(5, "conjugation and norm chains are monotone at depth 8", 0.0, [&](Outcome& o) {
    double worst = 0.0;
    for (const auto& inst : satisfying) {
      const double p = inst.mode.kind == ClassMode::Kind::p_hyponormal ? inst.mode.p : 1.0;
      const auto c2 = verify_chain2(inst.t, p, 8);
      SplitMix64 rng(inst.seed ^ 0xC4A1);
      Vector xi(inst.t.rows());
      for (std::size_t k = 0; k < xi.dim(); ++k) xi[k] = rng.complex_normal();
      const auto c3 = verify_chain3(inst.t, p, xi, 8);
      o.check(c2.hypotheses_met() && c3.hypotheses_met(),
              "chain hypothesis lost, seed " + std::to_string(inst.seed));
      for (const auto* r : {&c2, &c3}) {
        for (const auto& [name, value] : r->defects) {
          if (name.rfind("link[", 0) != 0 && name != "anchor") continue;
          worst = std::max(worst, value);
          o.check(value <= kChainTol, name + ", seed " + std::to_string(inst.seed));
        }
      }
    }
    o.detail << satisfying.size() << " hypothesis-satisfying shifts, worst link defect "
             << std::scientific << std::setprecision(2) << worst << "; ";
    o.check(!satisfying.empty(), "no hypothesis-satisfying instances");
  });

  failed += run(6, "log order survives positive scaling", 0.0, [&](Outcome& o) {
    double worst_order = 0.0;
    double worst_identity = 0.0;
    constexpr double cs[] = {0.1, 1.0, 10.0};
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const auto [t, s] = log_ordered_pair(2 + i % 7, derive_seed(kBaseSeed + 600, i));
      audit(t);
      audit(s);
      const auto r = verify_lemma23(t, s, cs[i % 3]);
      o.check(r.hypotheses_met() && r.conclusion_holds == true, "trial " + std::to_string(i));
      const double order = r.defects.at("conclusion_loewner");
      const double ident = std::max(r.defects.at("identity_T"), r.defects.at("identity_S"));
      worst_order = std::max(worst_order, order);
      worst_identity = std::max(worst_identity, ident);
      o.check(order <= kLogOrderTol, "Loewner defect, trial " + std::to_string(i));
      o.check(ident <= kLogIdentityTol, "log(cT) identity, trial " + std::to_string(i));
    }
    o.detail << "1000 pairs, worst Loewner defect " << std::scientific << std::setprecision(2)
             << worst_order << ", worst identity defect " << worst_identity << "; ";
  });

  failed += run(7, "Fuglede-Putnam on commuting pairs", 0.0, [&](Outcome& o) {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const auto [n, x] = commuting_normal_pair(2 + i % 7, derive_seed(kBaseSeed + 700, i));
      audit(n);
      audit(x);
      const auto r = fuglede_putnam_check(n, x);
      o.check(r.hypotheses_met(), "pair not commuting, trial " + std::to_string(i));
      const double scale = operator_norm(n) * operator_norm(x);
      const double d = distance(n.adjoint() * x, x * n.adjoint());
      worst = std::max(worst, d / scale);
      o.check(d <= kCommutantTol * scale, "trial " + std::to_string(i));
    }
    o.detail << "1000 pairs, worst relative defect " << std::scientific << std::setprecision(2)
             << worst << "; ";
  });

  failed += run(8, "intertwining reduction with X = I, T = S normal", 0.0, [&](Outcome& o) {
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const std::size_t n = 2 + i % 7;
      const Matrix t = random_normal(n, derive_seed(kBaseSeed + 800, i));
      audit(t);
      const auto r = verify_intertwining_reduction(t, t, Matrix::identity(n));
      o.check(r.hypotheses_met() && r.conclusion_holds == true, "trial " + std::to_string(i));
    }
    o.detail << "1000 normal operators; ";
  });

  failed += run(9, "Beck-Putnam square roots on arc unitaries", 0.0, [&](Outcome& o) {
    double worst_comm = 0.0;
    double worst_root = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const std::uint64_t seed = derive_seed(kBaseSeed + 900, i);
      SplitMix64 rng(seed);
      const Arc arc{rng.uniform(0.0, 2 * std::numbers::pi), std::numbers::pi,
                    i % 2 ? 0.1 : 0.5};
      const auto [u, x] = arc_unitary_commutant_pair(arc, 2 + i % 7, rng.next());
      audit(u);
      audit(x);
      audit(u * u);
      const auto r = beck_putnam_check(u, x);
      o.check(r.hypotheses_met() && r.conclusion_holds == true, "trial " + std::to_string(i));
      const double xn = operator_norm(x);
      const double comm = distance(u * x, x * u);
      const double root = r.defects.at("reconstruction");
      worst_comm = std::max(worst_comm, comm / xn);
      worst_root = std::max(worst_root, root);
      o.check(comm <= kCommutantTol * xn, "commutator, trial " + std::to_string(i));
      o.check(root <= kRootTol, "reconstruction, trial " + std::to_string(i));
    }
    const Matrix u = Matrix::diagonal({1.0, -1.0});
    const Matrix x = Matrix::from_rows({{0, 1}, {1, 0}});
    audit(u);
    audit(x);
    const auto control = beck_putnam_check(u, x);
    const double raw = control.defects.at("UX-XU");
    o.check(!control.hypotheses_met() && !control.conclusion_holds.has_value(),
            "negative control not flagged as hypothesis-violating");
    o.check(std::abs(raw - 2.0 * std::sqrt(2.0)) <= kControlTol, "negative control defect");
    o.detail << "1000 arc unitaries, worst relative commutator " << std::scientific
             << std::setprecision(2) << worst_comm << ", worst root defect " << worst_root
             << "; control raw defect " << std::setprecision(12) << raw << "; ";
  });

  failed += run(10, "Aluthge normality equivalence under the semicircle condition", 120.0,
                [&](Outcome& o) {
                  std::size_t transform_normal = 0;
                  std::size_t violations = 0;
                  for (std::uint64_t i = 0; i < 10000; ++i) {
                    const std::uint64_t seed = derive_seed(kBaseSeed + 1000, i);
                    SplitMix64 rng(seed);
                    const Arc arc{rng.uniform(0.0, 2 * std::numbers::pi), std::numbers::pi,
                                  i % 2 ? 0.1 : 0.5};
                    const auto mode = static_cast<ModulusMode>(i % 3);
                    const auto s =
                        arc_unitary_times_pd_sample(arc, 2 + i % 7, rng.next(), 100.0, mode);
                    audit(s.t);
                    const Matrix transform = aluthge(s.t);
                    audit(transform);
                    const auto r = verify_thm25(s.t);
                    o.check(r.hypotheses_met(), "arc hypothesis lost, seed " + std::to_string(seed));
                    const bool tn = is_normal(transform);
                    if (tn) ++transform_normal;
                    if (tn && !is_normal(s.t)) ++violations;
                    o.check(!r.failed(), "report failed, seed " + std::to_string(seed));
                  }
                  o.check(violations == 0, "normal transform of non-normal T");
                  o.detail << "10000 arc samples, " << transform_normal
                           << " with normal transform, " << violations << " violations; ";

                  const auto w = search_aluthge_counterexample(2, kBaseSeed, 1);
                  o.check(w.has_value(), "search at dim 2 found no witness");
                  if (w) {
                    audit(w->t);
                    audit(w->transform);
                    const double a = std::abs(w->t(1, 0));
                    const double b = std::abs(w->t(0, 1));
                    const double expected = std::abs(a * a - b * b) * std::sqrt(2.0);
                    const double got = self_commutator_norm(w->t);
                    const double transform_defect = self_commutator_norm(w->transform);
                    o.check(a != b, "witness has a = b");
                    o.check(transform_defect <= kWitnessTol, "witness transform not normal");
                    o.check(std::abs(got - expected) <= kWitnessTol * std::max(1.0, expected),
                            "witness self-commutator");
                    o.check(!w->semicircle.has_value() &&
                                !semicircle_spectrum(polar(w->t).isometry_part).has_value(),
                            "witness has a semicircle");
                    o.detail << "witness a=" << std::setprecision(6) << a << " b=" << b
                             << ", |T*T-TT*|=" << got << " vs |a^2-b^2|*sqrt2=" << expected
                             << ", transform defect " << std::scientific << std::setprecision(2)
                             << transform_defect << "; ";
                  }
                });

  // Criterion 12 before 11 in execution order so its matrices are audited too.
  Outcome cli_outcome;
  const auto cli_start = Clock::now();
  try {
    Outcome& o = cli_outcome;
    const fs::path work = fs::temp_directory_path() / "normality_acceptance";
    fs::create_directories(work);

    const Matrix awkward = read_matrix_file((fixtures / "awkward.json").string());
    audit(awkward);
    write_matrix_file((work / "awkward_copy.json").string(), awkward);
    o.check(bit_equal(read_matrix_file((work / "awkward_copy.json").string()), awkward),
            "library round trip");

    o.check(!cli.empty(), "no CLI path given");
    if (!cli.empty()) {
      const std::string exe = quote(cli);
      o.check(shell(exe + " generate --family random_normal --dim 4 --seed 9 --out " +
                    quote(work / "gen.json")) == 0,
              "generate failed");
      const Matrix generated = read_matrix_file((work / "gen.json").string());
      audit(generated);
      o.check(bit_equal(generated, random_normal(4, 9)), "CLI round trip");

      const std::string batch = exe + " verify thm25 --trials 6 --seed 5 --dims 2..4";
      o.check(shell(batch + " --trial-reports --out " + quote(work / "all.json")) == 0,
              "thm25 batch exit");
      o.check(shell(batch + " --trial-reports --out " + quote(work / "all2.json")) == 0,
              "thm25 batch rerun exit");
      const json all = read_json_file((work / "all.json").string());
      o.check(all == read_json_file((work / "all2.json").string()), "batch rerun differs");
      for (int k = 0; k < 6; ++k) {
        const fs::path one = work / ("replay" + std::to_string(k) + ".json");
        shell(batch + " --replay " + std::to_string(k) + " --out " + quote(one));
        const json r = read_json_file(one.string());
        o.check(r.at("report") == all.at("trial_reports").at(k),
                "replay of trial " + std::to_string(k) + " differs");
      }

      const fs::path config = fixtures / "zero_tolerance.json";
      const int fail_code =
          shell(exe + " verify eqh1 --config " + quote(config) + " --out " + quote(work / "fail.json"));
      const json failing = read_json_file((work / "fail.json").string());
      o.check(fail_code == 1, "zero-tolerance fixture exit " + std::to_string(fail_code));
      o.check(!failing.at("failures").empty(), "zero-tolerance fixture reported no failures");
      const json& first = failing.at("failures").at(0);
      const auto trial = first.at("trial").get<std::size_t>();
      shell(exe + " verify eqh1 --config " + quote(config) + " --replay " +
            std::to_string(trial) + " --out " + quote(work / "fail_replay.json"));
      const json again = read_json_file((work / "fail_replay.json").string());
      o.check(again.at("seed") == first.at("seed"), "replayed seed differs");
      o.check(again.at("report").at("defects") == first.at("defects"), "replayed defects differ");

      const int pass_code = shell(exe + " verify fuglede --trials 20 --out " + quote(work / "pass.json"));
      o.check(pass_code == 0 && read_json_file((work / "pass.json").string()).at("failures").empty(),
              "passing run exit " + std::to_string(pass_code));
      const int usage_code = shell(exe + " verify bogus");
      o.check(usage_code == 2, "unknown claim exit " + std::to_string(usage_code));
      o.detail << "round trip bit-exact, 6 replays identical, exit codes 1/0/2 as contracted; ";
    }
    fs::remove_all(work);
  } catch (const std::exception& e) {
    cli_outcome.check(false, std::string("exception: ") + e.what());
  }
  const double cli_seconds = std::chrono::duration<double>(Clock::now() - cli_start).count();

  failed += run(11, "trace of the self-commutator vanishes", 0.0, [&](Outcome& o) {
    o.check(audit.violations == 0, std::to_string(audit.violations) + " matrices over bound");
    o.check(audit.seen > 0, "no matrices audited");
    o.detail << audit.seen << " matrices audited, worst |trace|/(|T|_F^2/n) " << std::scientific
             << std::setprecision(2) << audit.worst << "; ";
  });
  failed += report_line(12, "command-line contract", cli_outcome, cli_seconds, 0.0);

  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}

// normality: inspect matrices, generate family members, verify claims in batch.
//
// Exit codes: 0 pass, 1 failures (or no witness found), 2 usage or I/O error.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "normality/batch.hpp"
#include "normality/io.hpp"

namespace {

using namespace normality;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const json& doc, const std::string& out_path) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

Matrix load_square(const std::string& path) {
  Matrix m = read_matrix_file(path);
  if (!m.is_square()) {
    throw FormatError("'" + path + "': matrix must be square, got " + std::to_string(m.rows()) +
                      "x" + std::to_string(m.cols()));
  }
  return m;
}

struct ToleranceFlags {
  std::optional<double> eq;
  std::optional<double> psd;
  std::optional<double> rank;

  void add_to(CLI::App& app) {
    app.add_option("--tol", eq, "equality tolerance (eq_tol)");
    app.add_option("--psd-tol", psd, "Loewner-order tolerance (psd_tol)");
    app.add_option("--rank-tol", rank, "relative rank cutoff (rank_tol)");
  }

  [[nodiscard]] Tolerances apply(Tolerances tol) const {
    if (eq) tol.eq_tol = *eq;
    if (psd) tol.psd_tol = *psd;
    if (rank) tol.rank_tol = *rank;
    tol.validate();
    return tol;
  }
};

json polar_json(const Matrix& t, const Tolerances& tol) {
  const auto parts = polar(t, tol);
  return {{"isometry_part", matrix_to_json(parts.isometry_part)},
          {"modulus", matrix_to_json(parts.modulus)},
          {"unitary", is_unitary(parts.isometry_part, tol)},
          {"singular_values", singular_values(t)}};
}

json spectrum_json(const Matrix& t, const Tolerances& tol) {
  const bool normal = is_normal(t, tol);
  json out = {{"normal", normal}, {"singular_values", singular_values(t)}};
  if (normal) {
    out["spectrum"] = spectrum_to_json(normal_eig(t, tol));
  } else {
    out["spectrum"] = nullptr;
    out["note"] = "spectral decomposition is computed for normal matrices only";
  }
  const Matrix u = polar(t, tol).isometry_part;
  out["polar_unitary"] = is_unitary(u, tol);
  if (is_unitary(u, tol)) out["semicircle"] = arc_to_json(semicircle_spectrum(u, tol));
  return out;
}

RunConfig build_config(const std::string& config_path, const ToleranceFlags& tflags,
                       const std::optional<std::uint64_t>& seed,
                       const std::optional<std::size_t>& trials,
                       const std::optional<std::string>& dims,
                       const std::optional<std::string>& family,
                       const std::optional<double>& cond_bound,
                       const std::optional<unsigned>& depth) {
  RunConfig c = config_path.empty() ? RunConfig{} : config_from_json(read_json_file(config_path));
  c.tol = tflags.apply(c.tol);
  if (seed) c.seed = *seed;
  if (trials) c.trials = *trials;
  if (dims) c.dims = parse_dims(*dims);
  if (family) {
    c.family = parse_family_kind(*family);
    if (!c.family) throw UsageError("unknown family '" + *family + "'");
  }
  if (cond_bound) c.cond_bound = *cond_bound;
  if (depth) c.depth = *depth;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of normality criteria for matrices"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand all help");

  std::string out_path;
  std::string matrix_path;
  ToleranceFlags tflags;

  auto* polar_cmd = app.add_subcommand("polar", "polar decomposition T = U|T|");
  polar_cmd->add_option("matrix", matrix_path, "matrix JSON file")->required();

  unsigned iterate = 1;
  auto* aluthge_cmd = app.add_subcommand("aluthge", "Aluthge transform |T|^1/2 U |T|^1/2");
  aluthge_cmd->add_option("matrix", matrix_path, "matrix JSON file")->required();
  aluthge_cmd->add_option("--iterate", iterate, "number of iterations")->capture_default_str();

  auto* spectrum_cmd = app.add_subcommand("spectrum", "spectrum and semicircle verdict");
  spectrum_cmd->add_option("matrix", matrix_path, "matrix JSON file")->required();

  std::vector<double> p_values;
  auto* classify_cmd = app.add_subcommand("classify", "normal / hyponormal / p- / log-hyponormal");
  classify_cmd->add_option("matrix", matrix_path, "matrix JSON file")->required();
  classify_cmd->add_option("--p", p_values, "exponents for p-hyponormality (default 0.25 0.5 1)");

  std::string claim_name;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> dims;
  std::optional<std::string> family;
  std::optional<double> cond_bound;
  std::optional<unsigned> depth;
  std::optional<std::size_t> replay;
  bool with_trials = false;
  auto* verify_cmd = app.add_subcommand("verify", "batch verification of a claim");
  verify_cmd->add_option("claim", claim_name,
                         "eqh1 eqh2 chain2 chain3 thm21 thm22 lemma23 lemma24 fuglede "
                         "beckputnam thm25")
      ->required();
  verify_cmd->add_option("--seed", seed, "base seed");
  verify_cmd->add_option("--trials", trials, "number of trials");
  verify_cmd->add_option("--dims", dims, "dimensions, 'a..b' or 'n'");
  verify_cmd->add_option("--family", family, "operator family override");
  verify_cmd->add_option("--cond-bound", cond_bound, "condition-number bound");
  verify_cmd->add_option("--depth", depth, "chain depth / power horizon");
  verify_cmd->add_option("--config", config_path, "RunConfig JSON file");
  verify_cmd->add_option("--replay", replay, "rerun one trial index and print its report");
  verify_cmd->add_flag("--trial-reports", with_trials, "include every per-trial report");

  std::string search_kind;
  std::size_t search_dim = 2;
  std::uint64_t search_seed = 1;
  std::size_t budget = 16;
  auto* search_cmd = app.add_subcommand("search", "counterexample search");
  search_cmd->add_option("kind", search_kind, "aluthge-counterexample")->required();
  search_cmd->add_option("--dim", search_dim)->capture_default_str();
  search_cmd->add_option("--seed", search_seed)->capture_default_str();
  search_cmd->add_option("--budget", budget)->capture_default_str();

  std::string gen_family;
  std::string spec_path;
  std::size_t gen_dim = 2;
  std::uint64_t gen_seed = 0;
  double gen_cond = kDefaultConditionBound;
  auto* generate_cmd = app.add_subcommand("generate", "write a family member as a matrix file");
  generate_cmd->add_option("--family", gen_family, "family kind");
  generate_cmd->add_option("--spec", spec_path, "FamilySpec JSON file");
  generate_cmd->add_option("--dim", gen_dim)->capture_default_str();
  generate_cmd->add_option("--seed", gen_seed)->capture_default_str();
  generate_cmd->add_option("--cond-bound", gen_cond)->capture_default_str();

  for (auto* cmd : {polar_cmd, aluthge_cmd, spectrum_cmd, classify_cmd, verify_cmd, search_cmd,
                    generate_cmd}) {
    cmd->add_option("--out", out_path, "write JSON here instead of stdout");
    if (cmd != generate_cmd) tflags.add_to(*cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    const Tolerances tol = tflags.apply(Tolerances{});

    if (*polar_cmd) {
      emit(polar_json(load_square(matrix_path), tol), out_path);
      return kExitPass;
    }
    if (*aluthge_cmd) {
      const Matrix t = load_square(matrix_path);
      const Matrix transform = aluthge_iterate(t, iterate, tol);
      emit({{"iterations", iterate},
            {"transform", matrix_to_json(transform)},
            {"normal", is_normal(transform, tol)}},
           out_path);
      return kExitPass;
    }
    if (*spectrum_cmd) {
      emit(spectrum_json(load_square(matrix_path), tol), out_path);
      return kExitPass;
    }
    if (*classify_cmd) {
      const Matrix t = load_square(matrix_path);
      for (double p : p_values)
        if (!(p > 0.0)) throw UsageError("--p values must be positive");
      const auto ps = p_values.empty() ? default_p_values() : p_values;
      emit(class_report_to_json(classify(t, ps, tol)), out_path);
      return kExitPass;
    }
    if (*verify_cmd) {
      const auto claim = parse_claim(claim_name);
      if (!claim) throw UsageError("unknown claim '" + claim_name + "'");
      const RunConfig config =
          build_config(config_path, tflags, seed, trials, dims, family, cond_bound, depth);
      if (replay) {
        const VerificationReport r = run_trial(*claim, config, *replay);
        emit({{"claim_id", std::string(to_string(*claim))},
              {"trial", *replay},
              {"seed", derive_seed(config.seed, *replay)},
              {"report", report_to_json(r)}},
             out_path);
        return r.failed() ? kExitFail : kExitPass;
      }
      const BatchOutcome outcome = run_batch(*claim, config, with_trials);
      emit(outcome.report, out_path);
      return outcome.exit_code();
    }
    if (*search_cmd) {
      if (search_kind != "aluthge-counterexample") {
        throw UsageError("unknown search kind '" + search_kind + "'");
      }
      const auto w = search_aluthge_counterexample(search_dim, search_seed, budget, tol);
      if (!w) {
        std::cout << "none\n";
        return kExitFail;
      }
      emit({{"t", matrix_to_json(w->t)},
            {"transform", matrix_to_json(w->transform)},
            {"t_class", class_report_to_json(w->t_class)},
            {"transform_class", class_report_to_json(w->transform_class)},
            {"semicircle", arc_to_json(w->semicircle)},
            {"candidate", w->candidate}},
           out_path);
      return kExitPass;
    }
    if (*generate_cmd) {
      FamilySpec spec;
      if (!spec_path.empty()) {
        spec = family_spec_from_json(read_json_file(spec_path));
      } else {
        const auto kind = parse_family_kind(gen_family);
        if (!kind) throw UsageError("generate needs --family or --spec");
        spec.kind = *kind;
        spec.dim = gen_dim;
        spec.seed = gen_seed;
        spec.cond_bound = gen_cond;
      }
      const json doc = matrix_to_json(generate(spec));
      emit(doc, out_path);
      return kExitPass;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}

#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "idecode/io.hpp"
#include "idecode/metrics.hpp"

namespace {

using namespace idecode;

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<double> epsilons;
  int n = 0;
  bool smoothed = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool need_out = true) {
  cmd->add_option("--config", args.config_path, "run configuration file")
      ->required();
  auto* seed_opt = cmd->add_option("--seed", args.seed, "root seed (required for randomized commands)");
  cmd->callback([&args, seed_opt] { args.seed_set = seed_opt->count() > 0; });
  auto* out = cmd->add_option("--out", args.out_path, "output path");
  if (need_out) out->required();
  cmd->add_option("--epsilon", args.epsilons, "detection threshold, repeatable");
  cmd->add_option("--n", args.n, "transforms per point");
  cmd->add_flag("--smoothed", args.smoothed, "use smoothed p-values");
}

// Flags win over the config file; randomized commands must carry a seed.
io::RunConfig resolve_config(const CommonArgs& args, bool randomized) {
  io::RunConfig cfg = io::load_config(args.config_path);
  if (args.seed_set)
    cfg.seed = args.seed;
  else if (randomized && !args.config_path.empty() && cfg.seed == 0)
    throw Error(ErrorCode::ConfigError,
                "randomized command needs --seed or a nonzero config seed");
  if (!args.epsilons.empty()) cfg.epsilons = args.epsilons;
  if (args.n > 0) cfg.n = args.n;
  if (args.smoothed) cfg.smoothed = true;
  for (double e : cfg.epsilons)
    if (!(e > 0.0 && e < 1.0))
      throw Error(ErrorCode::InvalidEpsilon, "epsilon must lie in (0, 1)");
  return cfg;
}

std::uint64_t data_seed(std::uint64_t seed, std::uint64_t domain) {
  return mix64(seed ^ mix64(domain));
}

std::vector<Tensor> synth_points(const io::RunConfig& cfg, bool ood,
                                 std::size_t count, std::uint64_t domain) {
  synthetic::SyntheticSpec spec = ood ? cfg.ood_spec : cfg.id_spec;
  spec.count = count;
  spec.seed = data_seed(cfg.seed, domain);
  return synthetic::generate(spec);
}

double pipeline_score(const io::RunConfig& cfg, const Tensor& x,
                      const RngStream& stream) {
  const auto v = conformal::score_vector(cfg.ncm, cfg.model, cfg.family, x,
                                         cfg.n, stream);
  return conformal::aggregate(cfg.f_kind, v);
}

std::vector<double> pipeline_scores(const io::RunConfig& cfg,
                                    const std::vector<Tensor>& points,
                                    const RngStream& root) {
  std::vector<double> scores;
  scores.reserve(points.size());
  for (std::size_t j = 0; j < points.size(); ++j)
    scores.push_back(pipeline_score(cfg, points[j], root.derive(j)));
  return scores;
}

int cmd_synth(const CommonArgs& args) {
  const io::RunConfig cfg = resolve_config(args, true);
  std::vector<models::ScoreRecord> records;
  auto emit = [&](const std::vector<Tensor>& pts, const std::string& split,
                  const std::string& prefix) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      records.push_back({prefix + std::to_string(i), split, pts[i].data});
  };
  emit(synth_points(cfg, false, cfg.cal_count, 1), "cal", "cal_");
  emit(synth_points(cfg, false, cfg.id_spec.count, 2), "test_id", "id_");
  emit(synth_points(cfg, true, cfg.ood_spec.count, 3), "test_ood", "ood_");
  io::write_score_file(args.out_path, {1, 2}, records);
  std::cout << "wrote " << records.size() << " records to " << args.out_path
            << "\n";
  return 0;
}

int cmd_calibrate(const CommonArgs& args) {
  const io::RunConfig cfg = resolve_config(args, true);
  conformal::CalibrationArtifact art;
  if (!cfg.scores_path.empty()) {
    const auto [header, records] = io::read_score_file(cfg.scores_path);
    std::vector<models::ScoreRecord> cal;
    for (const auto& r : records)
      if (r.split == "cal") cal.push_back(r);
    const auto table = models::ingest_external(cal, header.n);
    std::vector<double> aggregated;
    for (const auto& [id, scores] : table) {
      double sum = 0.0;
      for (double s : scores) sum += s;
      aggregated.push_back(sum);
    }
    art = conformal::artifact_from_scores(std::move(aggregated),
                                          static_cast<int>(header.n),
                                          io::fingerprint(cfg), cfg.seed);
  } else {
    const auto points = synth_points(cfg, false, cfg.cal_count, 1);
    art = conformal::calibrate(points, cfg.ncm, cfg.model, cfg.family, cfg.n,
                               cfg.seed, RngStream(cfg.seed, {0}),
                               io::fingerprint(cfg));
  }
  io::write_artifact(args.out_path, art);
  std::cout << "k=" << art.k() << " fingerprint=" << art.config_fingerprint
            << "\n";
  return 0;
}

int cmd_detect(const CommonArgs& args, const std::string& artifact_path,
               const std::string& input_path, bool force) {
  const io::RunConfig cfg = resolve_config(args, true);
  const auto art = io::read_artifact(artifact_path);
  if (art.config_fingerprint != io::fingerprint(cfg)) {
    if (!force)
      throw Error(ErrorCode::FingerprintMismatch,
                  "artifact fingerprint does not match the configuration "
                  "(use --force to override)");
    std::cerr << "warning: fingerprint mismatch overridden\n";
  }
  const auto [header, records] = io::read_score_file(input_path);
  const bool external = cfg.model.model_id == models::ModelId::ExternalScores;

  std::ostringstream out;
  out << "id,score,p_value";
  for (double e : cfg.epsilons) out << ",ood@" << io::format_double(e);
  out << "\n";
  const RngStream test_root(cfg.seed, {1});
  std::size_t row = 0;
  for (const auto& rec : records) {
    if (rec.split == "cal") continue;
    double score;
    if (external) {
      if (rec.scores.size() != static_cast<std::size_t>(art.n))
        throw Error(ErrorCode::SchemaViolation,
                    "record '" + rec.id + "' score length differs from artifact n");
      score = 0.0;
      for (double s : rec.scores) score += s;
    } else {
      const Tensor x = make_vector(rec.scores);
      score = pipeline_score(cfg, x, test_root.derive(row));
    }
    conformal::PValue p;
    if (cfg.smoothed) {
      RngStream u_stream = test_root.derive(row).derive(0xfeed);
      p = conformal::p_value_smoothed(art, score, u_stream.next_f64());
    } else {
      p = conformal::p_value(art, score);
    }
    out << rec.id << "," << io::format_double(score) << ","
        << io::format_double(p.value);
    for (double e : cfg.epsilons)
      out << "," << (conformal::detect(art, score, e).is_ood ? 1 : 0);
    out << "\n";
    ++row;
  }
  io::atomic_write(args.out_path, out.str());
  std::cout << "wrote " << row << " decisions to " << args.out_path << "\n";
  return 0;
}

int cmd_evaluate(const CommonArgs& args) {
  io::RunConfig cfg = resolve_config(args, true);
  std::ostringstream out;
  out << "n,auroc,tnr_at_tpr,tpr_level\n";
  for (int n : cfg.n_sweep) {
    cfg.n = n;
    const auto cal_points = synth_points(cfg, false, cfg.cal_count, 1);
    const auto id_points = synth_points(cfg, false, cfg.id_spec.count, 2);
    const auto ood_points = synth_points(cfg, true, cfg.ood_spec.count, 3);
    const auto art = conformal::calibrate(
        cal_points, cfg.ncm, cfg.model, cfg.family, cfg.n, cfg.seed,
        RngStream(cfg.seed, {0}), io::fingerprint(cfg));
    auto pvals = [&](const std::vector<Tensor>& pts, std::uint64_t branch) {
      const RngStream root(cfg.seed, {branch});
      std::vector<double> out_p;
      for (std::size_t j = 0; j < pts.size(); ++j)
        out_p.push_back(
            conformal::p_value(art, pipeline_score(cfg, pts[j], root.derive(j)))
                .value);
      return out_p;
    };
    const auto rep = metrics::evaluate(pvals(id_points, 1), pvals(ood_points, 2),
                                       cfg.tpr_level);
    out << n << "," << io::format_double(rep.auroc) << ","
        << io::format_double(rep.tnr_at_level) << ","
        << io::format_double(rep.tpr_level) << "\n";
  }
  io::atomic_write(args.out_path, out.str());
  return 0;
}

int cmd_fdr_sweep(const CommonArgs& args) {
  const io::RunConfig cfg = resolve_config(args, true);
  std::vector<double> epsilons = cfg.epsilons;
  if (epsilons.empty())
    for (int k = 1; k <= 10; ++k) epsilons.push_back(0.05 * k);

  const auto pool_points = synth_points(cfg, false, cfg.heldout_count, 4);
  const auto pool =
      pipeline_scores(cfg, pool_points, RngStream(cfg.seed, {2}));
  const auto test_points = synth_points(cfg, false, cfg.id_spec.count, 5);
  const auto held_out =
      pipeline_scores(cfg, test_points, RngStream(cfg.seed, {3}));

  const auto rows = metrics::fdr_sweep(held_out, pool, cfg.cal_count,
                                       cfg.replicates, epsilons, cfg.seed);
  std::ostringstream out;
  out << "epsilon,replicate_id,fdr\n";
  for (const auto& row : rows) {
    for (std::size_t r = 0; r < row.replicate_fdrs.size(); ++r)
      out << io::format_double(row.epsilon) << "," << r << ","
          << io::format_double(row.replicate_fdrs[r]) << "\n";
    out << io::format_double(row.epsilon) << ",mean,"
        << io::format_double(row.mean_fdr) << "\n";
  }
  io::atomic_write(args.out_path, out.str());
  return 0;
}

int cmd_pvalue_hist(const CommonArgs& args) {
  const io::RunConfig cfg = resolve_config(args, true);
  // Theorem-level uniformity is over the joint draw of calibration and
  // test scores, so every p-value gets a fresh calibration set of hist_k
  // scores from the same pipeline.
  const std::size_t per_draw = static_cast<std::size_t>(cfg.hist_k) + 1;
  const auto points = synth_points(cfg, false, cfg.hist_draws * per_draw, 6);
  const auto scores = pipeline_scores(cfg, points, RngStream(cfg.seed, {4}));

  std::vector<double> pvals;
  pvals.reserve(cfg.hist_draws);
  for (std::size_t d = 0; d < cfg.hist_draws; ++d) {
    const auto begin = scores.begin() + d * per_draw;
    std::vector<double> cal(begin, begin + cfg.hist_k);
    const auto art = conformal::artifact_from_scores(
        std::move(cal), cfg.n, io::fingerprint(cfg), cfg.seed);
    pvals.push_back(conformal::p_value(art, *(begin + cfg.hist_k)).value);
  }

  const auto counts = metrics::grid_counts(pvals, cfg.hist_k);
  const double chi2 = metrics::uniformity_stat(pvals, cfg.hist_k);
  std::ostringstream out;
  out << "atom,count\n";
  for (std::size_t i = 0; i < counts.size(); ++i)
    out << io::format_double(static_cast<double>(i + 1) / (cfg.hist_k + 1))
        << "," << counts[i] << "\n";
  out << "chi_square," << io::format_double(chi2) << "\n";
  io::atomic_write(args.out_path, out.str());
  std::cout << "chi_square=" << chi2 << " over " << counts.size()
            << " atoms\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal OOD detection via transformation-equivariance scores"};
  app.require_subcommand(1);

  CommonArgs synth_args, cal_args, det_args, eval_args, fdr_args, hist_args;
  std::string artifact_path, input_path;
  bool force = false;

  add_common(app.add_subcommand("synth", "generate synthetic datasets"),
             synth_args);
  add_common(app.add_subcommand("calibrate", "build a calibration artifact"),
             cal_args);
  auto* det = app.add_subcommand("detect", "score inputs against an artifact");
  add_common(det, det_args);
  det->add_option("--artifact", artifact_path, "calibration artifact")->required();
  det->add_option("--in", input_path, "input feature or score file")->required();
  det->add_flag("--force", force, "proceed on fingerprint mismatch");
  add_common(app.add_subcommand("evaluate", "AUROC / TNR across the n sweep"),
             eval_args);
  add_common(app.add_subcommand("fdr-sweep", "false-detection-rate sweep"),
             fdr_args);
  add_common(app.add_subcommand("pvalue-hist", "p-value grid histogram"),
             hist_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("synth")) return cmd_synth(synth_args);
    if (app.got_subcommand("calibrate")) return cmd_calibrate(cal_args);
    if (app.got_subcommand("detect"))
      return cmd_detect(det_args, artifact_path, input_path, force);
    if (app.got_subcommand("evaluate")) return cmd_evaluate(eval_args);
    if (app.got_subcommand("fdr-sweep")) return cmd_fdr_sweep(fdr_args);
    if (app.got_subcommand("pvalue-hist")) return cmd_pvalue_hist(hist_args);
  } catch (const idecode::Error& e) {
    std::cerr << idecode::error_code_name(e.code()) << ": " << e.what() << "\n";
    return e.code() == idecode::ErrorCode::IoError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

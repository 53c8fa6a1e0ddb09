#include "idecode/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "idecode/conformal.hpp"
#include "idecode/errors.hpp"
#include "idecode/rng.hpp"

namespace idecode::metrics {

namespace {

void require_nonempty(const std::vector<double>& id_p,
                      const std::vector<double>& ood_p) {
  if (id_p.empty() || ood_p.empty())
    throw Error(ErrorCode::EmptyInput, "both p-value lists must be nonempty");
}

}  // namespace

double auroc(const std::vector<double>& id_pvalues,
             const std::vector<double>& ood_pvalues) {
  require_nonempty(id_pvalues, ood_pvalues);
  // Sorted-merge rank counting; the all-pairs oracle lives in synthetic.
  std::vector<double> ood = ood_pvalues;
  std::sort(ood.begin(), ood.end());
  double wins = 0.0;
  for (double p : id_pvalues) {
    const auto below = std::lower_bound(ood.begin(), ood.end(), p) - ood.begin();
    const auto ties = std::upper_bound(ood.begin(), ood.end(), p) -
                      std::lower_bound(ood.begin(), ood.end(), p);
    wins += static_cast<double>(below) + 0.5 * static_cast<double>(ties);
  }
  return wins / (static_cast<double>(id_pvalues.size()) *
                 static_cast<double>(ood_pvalues.size()));
}

double tnr_at_tpr(const std::vector<double>& id_pvalues,
                  const std::vector<double>& ood_pvalues, double level) {
  require_nonempty(id_pvalues, ood_pvalues);
  if (!(level > 0.0 && level <= 1.0))
    throw Error(ErrorCode::InvalidEpsilon, "level must lie in (0, 1]");
  std::vector<double> candidates = id_pvalues;
  candidates.insert(candidates.end(), ood_pvalues.begin(), ood_pvalues.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  const double n_id = static_cast<double>(id_pvalues.size());
  double best = -1.0;
  for (double t : candidates) {
    std::size_t kept = 0;
    for (double p : id_pvalues)
      if (p >= t) ++kept;
    if (static_cast<double>(kept) / n_id >= level) best = std::max(best, t);
  }
  if (best < 0.0) return 0.0;  // no threshold reaches the level
  std::size_t flagged = 0;
  for (double p : ood_pvalues)
    if (p < best) ++flagged;
  return static_cast<double>(flagged) / static_cast<double>(ood_pvalues.size());
}

EvaluationReport evaluate(const std::vector<double>& id_pvalues,
                          const std::vector<double>& ood_pvalues,
                          double tpr_level) {
  EvaluationReport rep;
  rep.auroc = auroc(id_pvalues, ood_pvalues);
  rep.tnr_at_level = tnr_at_tpr(id_pvalues, ood_pvalues, tpr_level);
  rep.tpr_level = tpr_level;
  rep.n_id = id_pvalues.size();
  rep.n_ood = ood_pvalues.size();
  return rep;
}

std::vector<FdrSweepRow> fdr_sweep(const std::vector<double>& held_out_id_scores,
                                   const std::vector<double>& cal_pool,
                                   std::size_t cal_size, int replicates,
                                   const std::vector<double>& epsilons,
                                   std::uint64_t seed) {
  if (cal_pool.empty()) throw Error(ErrorCode::EmptyPool, "calibration pool is empty");
  if (held_out_id_scores.empty())
    throw Error(ErrorCode::EmptyInput, "no held-out scores");
  if (replicates < 1)
    throw Error(ErrorCode::ConfigError, "replicates must be >= 1");

  std::vector<FdrSweepRow> rows(epsilons.size());
  for (std::size_t e = 0; e < epsilons.size(); ++e) rows[e].epsilon = epsilons[e];

  const RngStream root(seed);
  for (int r = 0; r < replicates; ++r) {
    RngStream stream = root.derive(static_cast<std::uint64_t>(r));
    std::vector<double> cal(cal_size);
    for (auto& s : cal) s = cal_pool[stream.next_below(cal_pool.size())];
    const auto art = conformal::artifact_from_scores(std::move(cal), 1, 0, seed);
    std::vector<double> pvals;
    pvals.reserve(held_out_id_scores.size());
    for (double s : held_out_id_scores)
      pvals.push_back(conformal::p_value(art, s).value);
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
      std::size_t flagged = 0;
      for (double p : pvals)
        if (p < epsilons[e]) ++flagged;
      rows[e].replicate_fdrs.push_back(static_cast<double>(flagged) /
                                       static_cast<double>(pvals.size()));
    }
  }
  for (auto& row : rows) {
    double sum = 0.0;
    for (double f : row.replicate_fdrs) sum += f;
    row.mean_fdr = sum / static_cast<double>(row.replicate_fdrs.size());
  }
  return rows;
}

std::vector<std::size_t> grid_counts(const std::vector<double>& pvalues, int k) {
  if (k < 1) throw Error(ErrorCode::ConfigError, "k must be >= 1");
  std::vector<std::size_t> counts(k + 1, 0);
  const double denom = static_cast<double>(k + 1);
  for (double p : pvalues) {
    const auto idx = static_cast<long>(std::llround(p * denom)) - 1;
    // Exact grid membership: the atom value must reproduce p bit-for-bit.
    if (idx < 0 || idx > k || static_cast<double>(idx + 1) / denom != p)
      throw Error(ErrorCode::OffGridValue, "p-value off the (k+1) grid");
    ++counts[idx];
  }
  return counts;
}

double uniformity_stat(const std::vector<double>& pvalues, int k) {
  const auto counts = grid_counts(pvalues, k);
  const double expected =
      static_cast<double>(pvalues.size()) / static_cast<double>(k + 1);
  double chi2 = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  return chi2;
}

}  // namespace idecode::metrics

#pragma once

#include <cstdint>
#include <vector>

namespace idecode::metrics {

struct EvaluationReport {
  double auroc = 0.0;
  double tnr_at_level = 0.0;
  double tpr_level = 0.90;
  std::size_t n_id = 0;
  std::size_t n_ood = 0;
};

struct FdrSweepRow {
  double epsilon = 0.0;
  std::vector<double> replicate_fdrs;
  double mean_fdr = 0.0;
};

// Rank-sum AUROC: probability a random OOD p-value is below a random iD
// p-value, tied pairs half credit. Throws EmptyInput.
double auroc(const std::vector<double>& id_pvalues,
             const std::vector<double>& ood_pvalues);

// Detection rule "OOD iff p < t"; t is the largest observed p-value keeping
// at least `level` of the iD points at p >= t. Returns the OOD fraction
// below t.
double tnr_at_tpr(const std::vector<double>& id_pvalues,
                  const std::vector<double>& ood_pvalues, double level);

EvaluationReport evaluate(const std::vector<double>& id_pvalues,
                          const std::vector<double>& ood_pvalues,
                          double tpr_level);

// Per replicate: resample a calibration set of cal_size with replacement
// from the pool, build the reference distribution, and record the fraction
// of held-out iD scores flagged at each epsilon.
std::vector<FdrSweepRow> fdr_sweep(const std::vector<double>& held_out_id_scores,
                                   const std::vector<double>& cal_pool,
                                   std::size_t cal_size, int replicates,
                                   const std::vector<double>& epsilons,
                                   std::uint64_t seed);

// Pearson chi-square of the p-values against the uniform distribution on
// the grid {1/(k+1), ..., 1}. Throws OffGridValue for any p off the grid.
double uniformity_stat(const std::vector<double>& pvalues, int k);

// Atom counts behind uniformity_stat, index i holds |{p == (i+1)/(k+1)}|.
std::vector<std::size_t> grid_counts(const std::vector<double>& pvalues, int k);

}  // namespace idecode::metrics

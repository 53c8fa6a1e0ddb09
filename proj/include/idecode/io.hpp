#pragma once

#include <string>
#include <vector>

#include "idecode/conformal.hpp"
#include "idecode/synthetic.hpp"

namespace idecode::io {

// Line-delimited score file: one JSON header line carrying
// {format_version, n}, then one JSON object per record
// {id, split, scores}. The same layout carries feature vectors for the
// synthetic datasets (n is then the feature dimension).
struct ScoreFileHeader {
  int format_version = 1;
  std::size_t n = 0;
};

std::pair<ScoreFileHeader, std::vector<models::ScoreRecord>> read_score_file(
    const std::string& path);

void write_score_file(const std::string& path, const ScoreFileHeader& header,
                      const std::vector<models::ScoreRecord>& records);

// Versioned text artifact; scores serialized as shortest round-trip
// decimals so read(write(a)) == a bit-for-bit.
void write_artifact(const std::string& path,
                    const conformal::CalibrationArtifact& art);
conformal::CalibrationArtifact read_artifact(const std::string& path);

// Run configuration: JSON file, flag overrides applied by the CLI. Angles
// are degrees at this boundary and radians inside.
struct RunConfig {
  transforms::TransformFamily family;
  models::Model model;
  ncm::NcmConfig ncm;
  int n = 5;
  conformal::AggregateKind f_kind = conformal::AggregateKind::Sum;
  std::vector<double> epsilons;
  std::uint64_t seed = 0;
  bool smoothed = false;

  std::string scores_path;  // externally computed score vectors; optional

  synthetic::SyntheticSpec id_spec{synthetic::SyntheticKind::AnnulusId, 1000,
                                   1.0, 0.1, 0};
  synthetic::SyntheticSpec ood_spec{synthetic::SyntheticKind::RingOod, 1000,
                                    3.0, 0.1, 0};
  std::size_t cal_count = 1000;
  std::size_t heldout_count = 5000;
  int replicates = 5;
  std::vector<int> n_sweep = {1, 5, 20};
  double tpr_level = 0.90;
  std::size_t hist_draws = 5000;
  int hist_k = 99;
};

RunConfig load_config(const std::string& path);

std::uint64_t fingerprint(const RunConfig& cfg);

// Write-temp-then-rename; partially written outputs never become visible.
void atomic_write(const std::string& path, const std::string& contents);

// Shortest decimal that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace idecode::io

#include "idecode/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace idecode::io {

using nlohmann::json;

namespace {

json parse_line(const std::string& line, int lineno) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation,
                "line " + std::to_string(lineno) + ": " + e.what());
  }
}

template <typename T>
T get_field(const json& obj, const char* key, int lineno) {
  if (!obj.contains(key))
    throw Error(ErrorCode::SchemaViolation,
                "line " + std::to_string(lineno) + ": missing field '" + key +
                    "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::SchemaViolation,
                "line " + std::to_string(lineno) + ": bad type for '" +
                    std::string(key) + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  // Shortest representation that round-trips.
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

void atomic_write(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp);
    out << contents;
    if (!out) throw Error(ErrorCode::IoError, "write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error(ErrorCode::IoError, "rename failed: " + path);
}

std::pair<ScoreFileHeader, std::vector<models::ScoreRecord>> read_score_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::string line;
  int lineno = 0;

  ScoreFileHeader header;
  if (!std::getline(in, line))
    throw Error(ErrorCode::SchemaViolation, "empty score file " + path);
  ++lineno;
  const json h = parse_line(line, lineno);
  header.format_version = get_field<int>(h, "format_version", lineno);
  header.n = get_field<std::size_t>(h, "n", lineno);
  if (header.n == 0)
    throw Error(ErrorCode::SchemaViolation, "header n must be positive");

  std::vector<models::ScoreRecord> records;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json obj = parse_line(line, lineno);
    models::ScoreRecord rec;
    rec.id = get_field<std::string>(obj, "id", lineno);
    rec.split = get_field<std::string>(obj, "split", lineno);
    rec.scores = get_field<std::vector<double>>(obj, "scores", lineno);
    if (rec.split != "cal" && rec.split != "test_id" && rec.split != "test_ood")
      throw Error(ErrorCode::SchemaViolation,
                  "line " + std::to_string(lineno) + ": unknown split '" +
                      rec.split + "'");
    if (rec.scores.size() != header.n)
      throw Error(ErrorCode::SchemaViolation,
                  "line " + std::to_string(lineno) + ": expected " +
                      std::to_string(header.n) + " scores, got " +
                      std::to_string(rec.scores.size()));
    for (double s : rec.scores)
      if (!std::isfinite(s))
        throw Error(ErrorCode::NonFiniteScore,
                    "line " + std::to_string(lineno) + ": non-finite score");
    if (!seen.insert(rec.id).second)
      throw Error(ErrorCode::DuplicateId, "duplicate id '" + rec.id + "'");
    records.push_back(std::move(rec));
  }
  return {header, std::move(records)};
}

void write_score_file(const std::string& path, const ScoreFileHeader& header,
                      const std::vector<models::ScoreRecord>& records) {
  std::ostringstream out;
  out << json{{"format_version", header.format_version}, {"n", header.n}}.dump()
      << "\n";
  for (const auto& rec : records) {
    json scores = json::array();
    for (double s : rec.scores) scores.push_back(s);
    out << json{{"id", rec.id}, {"split", rec.split}, {"scores", scores}}.dump()
        << "\n";
  }
  atomic_write(path, out.str());
}

void write_artifact(const std::string& path,
                    const conformal::CalibrationArtifact& art) {
  std::ostringstream out;
  out << "IDECODE_ARTIFACT\n";
  out << "format_version " << art.format_version << "\n";
  out << "n " << art.n << "\n";
  out << "seed " << art.seed << "\n";
  out << "fingerprint " << art.config_fingerprint << "\n";
  out << "k " << art.k() << "\n";
  for (double s : art.sorted_scores) out << format_double(s) << "\n";
  atomic_write(path, out.str());
}

conformal::CalibrationArtifact read_artifact(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::string magic;
  if (!std::getline(in, magic) || magic != "IDECODE_ARTIFACT")
    throw Error(ErrorCode::SchemaViolation, "not an artifact file: " + path);
  conformal::CalibrationArtifact art;
  std::size_t k = 0;
  std::string key;
  for (int i = 0; i < 5; ++i) {
    if (!(in >> key)) throw Error(ErrorCode::SchemaViolation, "truncated artifact header");
    if (key == "format_version")
      in >> art.format_version;
    else if (key == "n")
      in >> art.n;
    else if (key == "seed")
      in >> art.seed;
    else if (key == "fingerprint")
      in >> art.config_fingerprint;
    else if (key == "k")
      in >> k;
    else
      throw Error(ErrorCode::SchemaViolation, "unknown artifact key " + key);
    if (!in) throw Error(ErrorCode::SchemaViolation, "bad artifact header value");
  }
  art.sorted_scores.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(in >> art.sorted_scores[i]))
      throw Error(ErrorCode::SchemaViolation, "truncated artifact scores");
  }
  for (std::size_t i = 1; i < k; ++i)
    if (art.sorted_scores[i - 1] > art.sorted_scores[i])
      throw Error(ErrorCode::SchemaViolation, "artifact scores not sorted");
  return art;
}

namespace {

transforms::FamilyId parse_family(const std::string& s) {
  if (s == "Identity") return transforms::FamilyId::Identity;
  if (s == "Rotation2D") return transforms::FamilyId::Rotation2D;
  if (s == "RotationGrid90") return transforms::FamilyId::RotationGrid90;
  if (s == "RotationRangeClass") return transforms::FamilyId::RotationRangeClass;
  if (s == "Projective") return transforms::FamilyId::Projective;
  if (s == "TimeFreqMask") return transforms::FamilyId::TimeFreqMask;
  throw Error(ErrorCode::ConfigError, "unknown family '" + s + "'");
}

models::ModelId parse_model(const std::string& s) {
  if (s == "AnnulusInvariant") return models::ModelId::AnnulusInvariant;
  if (s == "AnglePredictor") return models::ModelId::AnglePredictor;
  if (s == "RotationClassSoftmax") return models::ModelId::RotationClassSoftmax;
  if (s == "ExternalScores") return models::ModelId::ExternalScores;
  throw Error(ErrorCode::ConfigError, "unknown model '" + s + "'");
}

ncm::NcmKind parse_ncm(const std::string& s) {
  if (s == "EquivarianceError") return ncm::NcmKind::EquivarianceError;
  if (s == "AuxiliaryTask") return ncm::NcmKind::AuxiliaryTask;
  if (s == "KnnDistance") return ncm::NcmKind::KnnDistance;
  throw Error(ErrorCode::ConfigError, "unknown ncm kind '" + s + "'");
}

ncm::LossKind parse_loss(const std::string& s) {
  if (s == "SquaredError") return ncm::LossKind::SquaredError;
  if (s == "CrossEntropy") return ncm::LossKind::CrossEntropy;
  if (s == "KlDivergence") return ncm::LossKind::KlDivergence;
  throw Error(ErrorCode::ConfigError, "unknown loss '" + s + "'");
}

constexpr double kDegToRad = 0.017453292519943295;

void load_synth_block(const json& j, synthetic::SyntheticSpec& spec) {
  if (j.contains("count")) spec.count = j.at("count").get<std::size_t>();
  if (j.contains("radius_mean")) spec.radius_mean = j.at("radius_mean").get<double>();
  if (j.contains("radius_sd")) spec.radius_sd = j.at("radius_sd").get<double>();
}

}  // namespace

RunConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("config parse: ") + e.what());
  }
  RunConfig cfg;
  try {
    if (j.contains("family")) {
      const auto& f = j.at("family");
      cfg.family.family_id = parse_family(f.value("id", "Identity"));
      if (f.contains("output_rule"))
        cfg.family.output_rule =
            f.at("output_rule").get<std::string>() == "ParamsTarget"
                ? transforms::OutputRule::ParamsTarget
                : transforms::OutputRule::IdentityOutput;
      if (f.contains("angle_min_deg"))
        cfg.family.angle_min = f.at("angle_min_deg").get<double>() * kDegToRad;
      if (f.contains("angle_max_deg"))
        cfg.family.angle_max = f.at("angle_max_deg").get<double>() * kDegToRad;
      if (f.contains("scale_min")) cfg.family.scale_min = f.at("scale_min").get<double>();
      if (f.contains("scale_max")) cfg.family.scale_max = f.at("scale_max").get<double>();
      if (f.contains("corner_jitter"))
        cfg.family.corner_jitter = f.at("corner_jitter").get<double>();
      if (f.contains("mask_fraction"))
        cfg.family.mask_fraction = f.at("mask_fraction").get<double>();
    }
    if (j.contains("model")) {
      const auto& m = j.at("model");
      cfg.model.model_id = parse_model(m.value("id", "AnnulusInvariant"));
      if (m.contains("r_lo")) cfg.model.r_lo = m.at("r_lo").get<double>();
      if (m.contains("r_hi")) cfg.model.r_hi = m.at("r_hi").get<double>();
      if (m.contains("beta")) cfg.model.beta = m.at("beta").get<double>();
      if (m.contains("noise_sigma"))
        cfg.model.noise_sigma = m.at("noise_sigma").get<double>();
      if (m.contains("noise_seed"))
        cfg.model.noise_seed = m.at("noise_seed").get<std::uint64_t>();
    }
    if (j.contains("ncm")) {
      const auto& n = j.at("ncm");
      cfg.ncm.ncm_kind = parse_ncm(n.value("kind", "EquivarianceError"));
      cfg.ncm.loss_kind = parse_loss(n.value("loss", "SquaredError"));
      if (n.contains("k")) cfg.ncm.k = n.at("k").get<int>();
    }
    if (j.contains("n")) cfg.n = j.at("n").get<int>();
    if (j.contains("epsilons"))
      cfg.epsilons = j.at("epsilons").get<std::vector<double>>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("smoothed")) cfg.smoothed = j.at("smoothed").get<bool>();
    if (j.contains("scores_path"))
      cfg.scores_path = j.at("scores_path").get<std::string>();
    if (j.contains("synthetic_id")) load_synth_block(j.at("synthetic_id"), cfg.id_spec);
    if (j.contains("synthetic_ood")) load_synth_block(j.at("synthetic_ood"), cfg.ood_spec);
    if (j.contains("cal_count")) cfg.cal_count = j.at("cal_count").get<std::size_t>();
    if (j.contains("heldout_count"))
      cfg.heldout_count = j.at("heldout_count").get<std::size_t>();
    if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<int>();
    if (j.contains("n_sweep")) cfg.n_sweep = j.at("n_sweep").get<std::vector<int>>();
    if (j.contains("tpr_level")) cfg.tpr_level = j.at("tpr_level").get<double>();
    if (j.contains("hist_draws")) cfg.hist_draws = j.at("hist_draws").get<std::size_t>();
    if (j.contains("hist_k")) cfg.hist_k = j.at("hist_k").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config field: ") + e.what());
  }
  if (cfg.n < 1) throw Error(ErrorCode::ConfigError, "n must be >= 1");
  for (double e : cfg.epsilons)
    if (!(e > 0.0 && e < 1.0))
      throw Error(ErrorCode::ConfigError, "epsilon must lie in (0, 1)");
  return cfg;
}

std::uint64_t fingerprint(const RunConfig& cfg) {
  return conformal::config_fingerprint(cfg.family, cfg.ncm, cfg.model,
                                       cfg.f_kind);
}

}  // namespace idecode::io

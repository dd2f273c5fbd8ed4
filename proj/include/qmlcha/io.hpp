#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmlcha/cha.hpp"
#include "qmlcha/ensemble.hpp"
#include "qmlcha/sampling.hpp"

namespace qmlcha::io {

namespace fs = std::filesystem;

// QSDS: "QSDS", u32 version, u16 d_A, u16 d_B, u8 flags, u64 count, records.
// flags: bit0 has_alpha, bit1 has_label, bit2 hull-oracle labels.
inline constexpr std::uint32_t kQsdsVersion = 1;
inline constexpr std::uint8_t kQsdsHasAlpha = 1u << 0;
inline constexpr std::uint8_t kQsdsHasLabel = 1u << 1;
inline constexpr std::uint8_t kQsdsHullLabels = 1u << 2;

void write_qsds(std::ostream& os, const LabeledDataset& ds);
LabeledDataset read_qsds(std::istream& is);
void write_qsds(const fs::path& path, const LabeledDataset& ds);
LabeledDataset read_qsds(const fs::path& path);

// QHUL: "QHUL", u32 version, u16 d_A, u16 d_B, u64 m, u8 include_origin,
// then m·feature_dim doubles, one extreme point per row.
inline constexpr std::uint32_t kQhulVersion = 1;

void write_qhul(std::ostream& os, const ConvexHull& hull);
ConvexHull read_qhul(std::istream& is);
void write_qhul(const fs::path& path, const ConvexHull& hull);
ConvexHull read_qhul(const fs::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

nlohmann::json tree_to_json(const DecisionTree& tree);
DecisionTree tree_from_json(const nlohmann::json& j, int input_dim);

nlohmann::json params_to_json(const TreeParams& p);
TreeParams params_from_json(const nlohmann::json& j);

/// Saved committee: raw-feature or hull-extended.
struct SavedModel {
  Dims dims{2, 2};
  FeatureMode mode = FeatureMode::kWithAlpha;
  TreeParams params;
  BaggedCommittee committee;
  std::string hull_hash;
};

nlohmann::json model_to_json(const SavedModel& m);
SavedModel model_from_json(const nlohmann::json& j);
void write_model(const fs::path& path, const SavedModel& m);
SavedModel read_model(const fs::path& path);

/// Attaches `hull` after checking it hashes to what the model recorded.
BchaModel bind_model(const SavedModel& m, std::shared_ptr<const ConvexHull> hull,
                     const std::string& hull_hash);

/// %.9g
std::string fmt(double v);

/// Minimal CSV writer; values go through fmt().
class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header);
  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long long v);
  CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(const std::string& v);
  void end_row();

 private:
  void sep();
  std::unique_ptr<std::ofstream> out_;
  bool row_started_ = false;
};

void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

}  // namespace qmlcha::io

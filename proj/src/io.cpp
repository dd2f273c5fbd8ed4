#include "qmlcha/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace qmlcha::io {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw FormatError("unexpected end of file");
  return v;
}

void expect_magic(std::istream& is, const char* magic) {
  char buf[4];
  if (!is.read(buf, 4) || std::memcmp(buf, magic, 4) != 0)
    throw FormatError(std::string("bad magic, expected ") + magic);
}

Dims read_dims(std::istream& is) {
  const auto da = get<std::uint16_t>(is);
  const auto db = get<std::uint16_t>(is);
  return Dims(da, db);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot open for writing: " + path.string());
  return os;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open for reading: " + path.string());
  return is;
}

}  // namespace

void write_qsds(std::ostream& os, const LabeledDataset& ds) {
  const bool has_alpha = !ds.empty() && ds.has_alpha();
  for (const auto& r : ds.records)
    if (r.alpha.has_value() != has_alpha) throw InvalidArgument("QSDS: alpha must be present on all records or none");
  std::uint8_t flags = kQsdsHasLabel;
  if (has_alpha) flags |= kQsdsHasAlpha;
  if (ds.label_source == LabelSource::kHullOracle) flags |= kQsdsHullLabels;
  os.write("QSDS", 4);
  put<std::uint32_t>(os, kQsdsVersion);
  put<std::uint16_t>(os, static_cast<std::uint16_t>(ds.dims.d_a()));
  put<std::uint16_t>(os, static_cast<std::uint16_t>(ds.dims.d_b()));
  put<std::uint8_t>(os, flags);
  put<std::uint64_t>(os, ds.size());
  const auto fd = ds.dims.feature_dim();
  for (const auto& r : ds.records) {
    if (r.coords.size() != fd) throw InvalidDimension("QSDS: record length mismatch");
    os.write(reinterpret_cast<const char*>(r.coords.data()), static_cast<std::streamsize>(fd * sizeof(double)));
    if (has_alpha) put<double>(os, *r.alpha);
    put<std::int8_t>(os, static_cast<std::int8_t>(r.label));
  }
  if (!os) throw InvalidArgument("QSDS: write failed");
}

LabeledDataset read_qsds(std::istream& is) {
  expect_magic(is, "QSDS");
  const auto version = get<std::uint32_t>(is);
  if (version != kQsdsVersion) throw FormatError("QSDS: unsupported version " + std::to_string(version));
  LabeledDataset ds;
  ds.dims = read_dims(is);
  const auto flags = get<std::uint8_t>(is);
  const auto count = get<std::uint64_t>(is);
  ds.label_source = (flags & kQsdsHullLabels) ? LabelSource::kHullOracle : LabelSource::kPpt;
  const auto fd = ds.dims.feature_dim();
  ds.records.resize(count);
  for (auto& r : ds.records) {
    r.coords.resize(fd);
    if (!is.read(reinterpret_cast<char*>(r.coords.data()), static_cast<std::streamsize>(fd * sizeof(double))))
      throw FormatError("QSDS: truncated record");
    if (flags & kQsdsHasAlpha) r.alpha = get<double>(is);
    if (flags & kQsdsHasLabel) {
      r.label = get<std::int8_t>(is);
      if (r.label != kSeparable && r.label != kEntangled) throw FormatError("QSDS: label outside {-1,+1}");
    }
  }
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("QSDS: trailing bytes");
  return ds;
}

void write_qsds(const fs::path& path, const LabeledDataset& ds) {
  auto os = open_out(path);
  write_qsds(os, ds);
}

LabeledDataset read_qsds(const fs::path& path) {
  auto is = open_in(path);
  return read_qsds(is);
}

void write_qhul(std::ostream& os, const ConvexHull& hull) {
  os.write("QHUL", 4);
  put<std::uint32_t>(os, kQhulVersion);
  put<std::uint16_t>(os, static_cast<std::uint16_t>(hull.dims().d_a()));
  put<std::uint16_t>(os, static_cast<std::uint16_t>(hull.dims().d_b()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(hull.size()));
  put<std::uint8_t>(os, hull.include_origin() ? 1 : 0);
  // Column-major feature_dim × m is row-major m × feature_dim.
  os.write(reinterpret_cast<const char*>(hull.points().data()),
           static_cast<std::streamsize>(hull.points().size() * sizeof(double)));
  if (!os) throw InvalidArgument("QHUL: write failed");
}

ConvexHull read_qhul(std::istream& is) {
  expect_magic(is, "QHUL");
  const auto version = get<std::uint32_t>(is);
  if (version != kQhulVersion) throw FormatError("QHUL: unsupported version " + std::to_string(version));
  const Dims dims = read_dims(is);
  const auto m = get<std::uint64_t>(is);
  const auto origin = get<std::uint8_t>(is);
  RMatrix pts(dims.feature_dim(), static_cast<Eigen::Index>(m));
  if (!is.read(reinterpret_cast<char*>(pts.data()), static_cast<std::streamsize>(pts.size() * sizeof(double))))
    throw FormatError("QHUL: truncated point data");
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("QHUL: trailing bytes");
  return ConvexHull(dims, std::move(pts), origin != 0);
}

void write_qhul(const fs::path& path, const ConvexHull& hull) {
  auto os = open_out(path);
  write_qhul(os, hull);
}

ConvexHull read_qhul(const fs::path& path) {
  auto is = open_in(path);
  return read_qhul(is);
}

std::string sha256_file(const fs::path& path) {
  auto is = open_in(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw NumericalFailure("sha256 init failed");
  std::array<char, 1 << 16> buf;
  while (is) {
    is.read(buf.data(), buf.size());
    if (is.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(is.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  char b[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(b, sizeof b, "%02x", digest[i]);
    hex += b;
  }
  return hex;
}

namespace {

nlohmann::json node_to_json(const std::vector<DecisionTree::Node>& nodes, int i) {
  const auto& n = nodes[static_cast<std::size_t>(i)];
  if (n.feature < 0) return {{"leaf", n.label}};
  return {{"feature", n.feature},
          {"threshold", n.threshold},
          {"left", node_to_json(nodes, n.left)},
          {"right", node_to_json(nodes, n.right)}};
}

int node_from_json(const nlohmann::json& j, std::vector<DecisionTree::Node>& nodes) {
  const int id = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (j.contains("leaf")) {
    nodes[static_cast<std::size_t>(id)].label = j.at("leaf").get<int>();
    return id;
  }
  DecisionTree::Node n;
  n.feature = j.at("feature").get<int>();
  n.threshold = j.at("threshold").get<double>();
  n.left = node_from_json(j.at("left"), nodes);
  n.right = node_from_json(j.at("right"), nodes);
  nodes[static_cast<std::size_t>(id)] = n;
  return id;
}

}  // namespace

nlohmann::json tree_to_json(const DecisionTree& tree) {
  if (tree.nodes().empty()) throw InvalidArgument("cannot serialize an empty tree");
  return node_to_json(tree.nodes(), 0);
}

DecisionTree tree_from_json(const nlohmann::json& j, int input_dim) {
  std::vector<DecisionTree::Node> nodes;
  node_from_json(j, nodes);
  return DecisionTree(input_dim, std::move(nodes));
}

nlohmann::json params_to_json(const TreeParams& p) {
  return {{"max_depth", p.max_depth}, {"min_leaf", p.min_leaf}, {"split_criterion", "gini"}};
}

TreeParams params_from_json(const nlohmann::json& j) {
  TreeParams p;
  p.max_depth = j.value("max_depth", p.max_depth);
  p.min_leaf = j.value("min_leaf", p.min_leaf);
  if (j.value("split_criterion", std::string("gini")) != "gini") throw InvalidArgument("unknown split criterion");
  p.validate();
  return p;
}

nlohmann::json model_to_json(const SavedModel& m) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : m.committee.trees()) trees.push_back(tree_to_json(t));
  return {{"format", "qmlcha-model"},
          {"version", 1},
          {"dims", {m.dims.d_a(), m.dims.d_b()}},
          {"features", m.mode == FeatureMode::kWithAlpha ? "coords+alpha" : "coords"},
          {"L", m.committee.size()},
          {"tie_label", m.committee.tie_label()},
          {"params", params_to_json(m.params)},
          {"hull_sha256", m.hull_hash},
          {"trees", std::move(trees)}};
}

SavedModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "qmlcha-model") throw FormatError("not a model file");
    SavedModel m;
    m.dims = Dims(j.at("dims").at(0).get<int>(), j.at("dims").at(1).get<int>());
    m.mode = j.at("features") == "coords+alpha" ? FeatureMode::kWithAlpha : FeatureMode::kRaw;
    m.params = params_from_json(j.at("params"));
    m.hull_hash = j.value("hull_sha256", std::string());
    const int dim = m.dims.feature_dim() + (m.mode == FeatureMode::kWithAlpha ? 1 : 0);
    std::vector<DecisionTree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(tree_from_json(t, dim));
    if (static_cast<int>(trees.size()) != j.at("L").get<int>()) throw FormatError("model: L does not match tree count");
    m.committee = BaggedCommittee(std::move(trees), j.value("tie_label", kEntangled));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model: ") + e.what());
  }
}

void write_model(const fs::path& path, const SavedModel& m) { write_json(path, model_to_json(m)); }

SavedModel read_model(const fs::path& path) { return model_from_json(read_json(path)); }

BchaModel bind_model(const SavedModel& m, std::shared_ptr<const ConvexHull> hull,
                     const std::string& hull_hash) {
  if (m.mode != FeatureMode::kWithAlpha) throw InvalidArgument("model was trained without alpha features");
  if (!(hull->dims() == m.dims)) throw InvalidDimension("model and hull dims differ");
  if (!m.hull_hash.empty() && m.hull_hash != hull_hash)
    throw InvalidArgument("hull file does not match the one the model was trained with");
  return BchaModel{m.committee, std::move(hull), m.params, hull_hash};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header)
    : out_(std::make_unique<std::ofstream>(path)) {
  if (!*out_) throw InvalidArgument("cannot open for writing: " + path.string());
  for (const auto& h : header) *this << h;
  end_row();
}

void CsvWriter::sep() {
  if (row_started_) *out_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::operator<<(double v) {
  sep();
  *out_ << fmt(v);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
  sep();
  *out_ << v;
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v) {
  sep();
  *out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  *out_ << '\n';
  row_started_ = false;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot open for writing: " + path.string());
  os << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  auto is = open_in(path);
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace qmlcha::io

#include "evsel/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "binio.hpp"
#include "evsel/log.hpp"
#include "evsel/rng.hpp"

namespace evsel::dataio {

namespace {
constexpr std::uint32_t kBankVersion = 1;
constexpr std::uint32_t kLabelsVersion = 1;

std::string file_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}
}  // namespace

void write_bank(const FeatureBank& bank, const std::string& path) {
  binio::Writer w(path);
  w.magic("FBNK");
  w.u32(kBankVersion);
  w.u64(static_cast<std::uint64_t>(bank.dim()));
  w.u64(static_cast<std::uint64_t>(bank.count()));
  for (Index r = 0; r < bank.dim(); ++r)
    for (Index c = 0; c < bank.count(); ++c) w.f64(bank.data(r, c));
  w.close();
}

FeatureBank read_bank(const std::string& path) {
  binio::Reader r(path);
  r.magic("FBNK");
  const std::uint32_t version = r.u32();
  if (version != kBankVersion)
    raise(ErrorCode::format, "'" + path + "': unsupported FBNK version " + std::to_string(version));
  const auto d = static_cast<Index>(r.u64());
  const auto n = static_cast<Index>(r.u64());
  if (d < 1 || n < 1) raise(ErrorCode::format, "'" + path + "': empty bank");
  Eigen::MatrixXd data(d, n);
  for (Index row = 0; row < d; ++row)
    for (Index col = 0; col < n; ++col) {
      const std::size_t offset = r.offset();
      const double v = r.f64();
      if (!std::isfinite(v))
        raise(ErrorCode::format, "'" + path + "': non-finite value at offset " +
                                     std::to_string(offset) + " (row " + std::to_string(row) +
                                     ", col " + std::to_string(col) + ")");
      data(row, col) = v;
    }
  r.expect_end();
  return FeatureBank{file_stem(path), std::move(data)};
}

void write_labels(const LabelMatrix& labels, const std::string& path) {
  binio::Writer w(path);
  w.magic("LBLS");
  w.u32(kLabelsVersion);
  w.u64(static_cast<std::uint64_t>(labels.count()));
  w.u64(static_cast<std::uint64_t>(labels.classes()));
  for (Index n = 0; n < labels.count(); ++n)
    for (Index k = 0; k < labels.classes(); ++k) w.byte(labels.data(n, k));
  w.close();
}

LabelMatrix read_labels(const std::string& path) {
  binio::Reader r(path);
  r.magic("LBLS");
  const std::uint32_t version = r.u32();
  if (version != kLabelsVersion)
    raise(ErrorCode::format, "'" + path + "': unsupported LBLS version " + std::to_string(version));
  const auto n = static_cast<Index>(r.u64());
  const auto k = static_cast<Index>(r.u64());
  if (n < 1 || k < 1) raise(ErrorCode::format, "'" + path + "': empty label matrix");
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> data(n, k);
  for (Index row = 0; row < n; ++row)
    for (Index col = 0; col < k; ++col) {
      const std::uint8_t b = r.byte();
      if (b > 1)
        raise(ErrorCode::format, "'" + path + "': label byte " + std::to_string(int(b)) +
                                     " at (row " + std::to_string(row) + ", col " +
                                     std::to_string(col) + ") is not 0 or 1");
      data(row, col) = b;
    }
  r.expect_end();
  return LabelMatrix{std::move(data)};
}

namespace {

// RFC-4180 field splitting; quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line, const std::string& path,
                                        std::size_t lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted)
    raise(ErrorCode::format,
          "'" + path + "' line " + std::to_string(lineno) + ": unterminated quote");
  fields.push_back(cur);
  return fields;
}

bool parse_f64(const std::string& field, double& out) {
  std::size_t begin = 0, end = field.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(field[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(field[end - 1]))) --end;
  if (begin == end) return false;
  const char* first = field.data() + begin;
  const char* last = field.data() + end;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::vector<double>> read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io, "cannot open '" + path + "' for reading");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first_data_line = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line, path, lineno);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (!parse_f64(fields[i], row[i])) {
        numeric = false;
        break;
      }
    if (!numeric) {
      if (first_data_line) {  // header row
        first_data_line = false;
        continue;
      }
      raise(ErrorCode::format,
            "'" + path + "' line " + std::to_string(lineno) + ": non-numeric cell");
    }
    first_data_line = false;
    if (!rows.empty() && row.size() != rows.front().size())
      raise(ErrorCode::format, "'" + path + "' line " + std::to_string(lineno) +
                                   ": expected " + std::to_string(rows.front().size()) +
                                   " cells, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) raise(ErrorCode::format, "'" + path + "': no data rows");
  return rows;
}

}  // namespace

FeatureBank read_bank_csv(const std::string& path) {
  const auto rows = read_csv_matrix(path);
  Eigen::MatrixXd data(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      data(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return FeatureBank::create(file_stem(path), std::move(data));
}

void write_scores_csv(const Eigen::MatrixXd& scores, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io, "cannot open '" + path + "' for writing");
  for (Index c = 0; c < scores.cols(); ++c) out << (c ? "," : "") << "class_" << c;
  out << "\n";
  char buf[40];
  for (Index r = 0; r < scores.rows(); ++r) {
    for (Index c = 0; c < scores.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", scores(r, c));
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) raise(ErrorCode::io, "write failed on '" + path + "'");
}

Eigen::MatrixXd read_scores_csv(const std::string& path) {
  const auto rows = read_csv_matrix(path);
  Eigen::MatrixXd data(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      data(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return data;
}

NormalizeOutcome l2_normalize_columns(const FeatureBank& bank) {
  NormalizeOutcome out;
  out.negative_entries = static_cast<std::size_t>((bank.data.array() < 0.0).count());
  if (out.negative_entries > 0)
    log::warn("bank '" + bank.name + "': " + std::to_string(out.negative_entries) +
              " negative entries survive L2 normalization");
  Eigen::MatrixXd data = bank.data;
  for (Index c = 0; c < data.cols(); ++c) {
    const double norm = data.col(c).norm();
    if (norm == 0.0)
      raise(ErrorCode::argument,
            "bank '" + bank.name + "': column " + std::to_string(c) + " is all zero");
    data.col(c) /= norm;
  }
  out.bank = FeatureBank{bank.name, std::move(data)};
  return out;
}

namespace {

void check_synth_spec(const SynthSpec& spec) {
  if (spec.n < 1 || spec.d < 1 || spec.k < 1)
    raise(ErrorCode::argument, "synthetic sizes must be positive");
  if (spec.noise_level < 0.0) raise(ErrorCode::argument, "noise_level must be >= 0");
  if (!(spec.informative_fraction > 0.0) || spec.informative_fraction > 1.0)
    raise(ErrorCode::argument, "informative_fraction must be in (0, 1]");
}

}  // namespace

FeatureBank generate_synthetic_bank(const SynthSpec& spec, const LabelMatrix& labels,
                                    const std::vector<int>& class_groups) {
  check_synth_spec(spec);
  if (labels.count() != spec.n || labels.classes() != spec.k)
    raise(ErrorCode::dimension, "labels shape does not match synthetic spec");
  if (!class_groups.empty() && static_cast<Index>(class_groups.size()) != spec.k)
    raise(ErrorCode::argument, "class_groups must have one entry per class");

  int n_groups = static_cast<int>(spec.k);
  if (!class_groups.empty()) {
    n_groups = 0;
    for (int g : class_groups) {
      if (g < 0) raise(ErrorCode::argument, "class group indices must be >= 0");
      n_groups = std::max(n_groups, g + 1);
    }
  }

  const Index informative =
      std::clamp<Index>(static_cast<Index>(std::lround(spec.informative_fraction *
                                                       static_cast<double>(spec.d))),
                        1, spec.d);
  // Noise std is 1.5x the nominal level so the {0, 0.3, 0.6, 0.9} ladder spans
  // clean through badly degraded accuracy at desk-scale sample counts. A small
  // fixed within-class spread keeps zero-noise data full rank: without it the
  // columns collapse onto the class means and the targets become exactly
  // interpolable, where the evidence is undefined.
  const double noise_std = 1.5 * spec.noise_level;
  const double spread_std = 0.05;

  rng::Generator gen(spec.seed);
  Eigen::MatrixXd means(informative, n_groups);
  for (Index d = 0; d < informative; ++d)
    for (int g = 0; g < n_groups; ++g)
      means(d, g) = spec.nonneg_l2 ? 0.2 + gen.uniform() : gen.normal();
  if (!spec.nonneg_l2)
    for (int g = 0; g < n_groups; ++g) means.col(g).normalize();

  Eigen::MatrixXd data = Eigen::MatrixXd::Zero(spec.d, spec.n);
  for (Index n = 0; n < spec.n; ++n) {
    Index cls = 0;
    for (Index c = 0; c < spec.k; ++c)
      if (labels.data(n, c) == 1) cls = c;
    const int group = class_groups.empty() ? static_cast<int>(cls)
                                           : class_groups[static_cast<std::size_t>(cls)];
    for (Index d = 0; d < spec.d; ++d) {
      double v = d < informative ? means(d, group) + spread_std * gen.normal() : 0.0;
      if (noise_std > 0.0) v += noise_std * gen.normal();
      data(d, n) = v;
    }
  }

  if (spec.nonneg_l2) {
    data = data.cwiseAbs();
    for (Index c = 0; c < spec.n; ++c) {
      const double norm = data.col(c).norm();
      if (norm == 0.0)
        data(0, c) = 1.0;  // unreachable for sane specs; keeps columns unit-norm
      else
        data.col(c) /= norm;
    }
  }
  return FeatureBank::create("synth_" + std::to_string(spec.seed), std::move(data));
}

SynthData generate_synthetic(const SynthSpec& spec) {
  check_synth_spec(spec);
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> y =
      Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(spec.n, spec.k);
  for (Index n = 0; n < spec.n; ++n) y(n, n % spec.k) = 1;

  SynthData out;
  out.labels = LabelMatrix{std::move(y)};
  out.bank = generate_synthetic_bank(spec, out.labels);

  // 20% holdout from an independently seeded shuffle.
  std::vector<Index> order(static_cast<std::size_t>(spec.n));
  for (Index i = 0; i < spec.n; ++i) order[static_cast<std::size_t>(i)] = i;
  rng::Generator split_gen(rng::derive(spec.seed, 0x5117));
  split_gen.shuffle(order);
  const std::size_t test_count = static_cast<std::size_t>(spec.n) / 5;
  out.test_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_count));
  std::sort(out.test_indices.begin(), out.test_indices.end());
  return out;
}

FeatureBank select_columns(const FeatureBank& bank, const std::vector<Index>& indices) {
  if (indices.empty()) raise(ErrorCode::argument, "empty column selection");
  Eigen::MatrixXd data(bank.dim(), static_cast<Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= bank.count())
      raise(ErrorCode::argument, "column index " + std::to_string(indices[i]) + " out of range");
    data.col(static_cast<Index>(i)) = bank.data.col(indices[i]);
  }
  return FeatureBank{bank.name, std::move(data)};
}

LabelMatrix select_rows(const LabelMatrix& labels, const std::vector<Index>& indices) {
  if (indices.empty()) raise(ErrorCode::argument, "empty row selection");
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> data(
      static_cast<Index>(indices.size()), labels.classes());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= labels.count())
      raise(ErrorCode::argument, "row index " + std::to_string(indices[i]) + " out of range");
    data.row(static_cast<Index>(i)) = labels.data.row(indices[i]);
  }
  return LabelMatrix{std::move(data)};
}

namespace {

std::string mode_name(TaskMode mode) {
  return mode == TaskMode::single_label ? "single_label" : "multi_label";
}

TaskMode mode_from_name(const std::string& name) {
  if (name == "single_label") return TaskMode::single_label;
  if (name == "multi_label") return TaskMode::multi_label;
  raise(ErrorCode::format, "unknown task mode '" + name + "'");
}

Index peek_labels_count(const std::string& path) {
  binio::Reader r(path);
  r.magic("LBLS");
  r.u32();
  return static_cast<Index>(r.u64());
}

std::vector<Index> read_index_array(const nlohmann::json& arr, const std::string& what) {
  std::vector<Index> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
      raise(ErrorCode::format, what + " indices must be nonnegative integers");
    out.push_back(static_cast<Index>(v.get<std::int64_t>()));
  }
  return out;
}

}  // namespace

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io, "cannot open manifest '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::format, "manifest '" + path + "': " + e.what());
  }

  const auto base = std::filesystem::path(path).parent_path();
  const auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return (fp.is_absolute() ? fp : base / fp).string();
  };

  DatasetManifest m;
  try {
    m.task = doc.at("task").get<std::string>();
    m.mode = mode_from_name(doc.at("mode").get<std::string>());
    m.measure = metrics::measure_from_name(doc.at("measure").get<std::string>());
    m.labels_path = resolve(doc.at("labels").get<std::string>());
    for (const auto& b : doc.at("banks"))
      m.banks.emplace_back(b.at("name").get<std::string>(), resolve(b.at("path").get<std::string>()));
    if (doc.contains("split")) {
      m.has_split = true;
      m.train_indices = read_index_array(doc["split"].at("train"), "train");
      m.test_indices = read_index_array(doc["split"].at("test"), "test");
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::format, "manifest '" + path + "': " + e.what());
  }

  if (m.banks.empty()) raise(ErrorCode::format, "manifest '" + path + "': no banks listed");
  std::set<std::string> names;
  for (const auto& [name, bank_path] : m.banks) {
    if (!names.insert(name).second)
      raise(ErrorCode::format, "manifest '" + path + "': duplicate bank name '" + name + "'");
    if (!std::filesystem::exists(bank_path))
      raise(ErrorCode::io, "manifest '" + path + "': bank file '" + bank_path + "' does not exist");
  }
  if (!std::filesystem::exists(m.labels_path))
    raise(ErrorCode::io, "manifest '" + path + "': labels file '" + m.labels_path + "' does not exist");

  if (m.has_split) {
    const Index n = peek_labels_count(m.labels_path);
    std::set<Index> seen;
    for (const auto* part : {&m.train_indices, &m.test_indices})
      for (Index idx : *part) {
        if (idx >= n)
          raise(ErrorCode::format, "manifest '" + path + "': split index " + std::to_string(idx) +
                                       " out of range (N=" + std::to_string(n) + ")");
        if (!seen.insert(idx).second)
          raise(ErrorCode::format,
                "manifest '" + path + "': split index " + std::to_string(idx) + " repeated");
      }
  }
  return m;
}

void write_manifest(const DatasetManifest& manifest, const std::string& path) {
  nlohmann::ordered_json doc;
  doc["task"] = manifest.task;
  doc["mode"] = mode_name(manifest.mode);
  doc["measure"] = metrics::measure_name(manifest.measure);
  doc["labels"] = manifest.labels_path;
  doc["banks"] = nlohmann::ordered_json::array();
  for (const auto& [name, bank_path] : manifest.banks)
    doc["banks"].push_back({{"name", name}, {"path", bank_path}});
  if (manifest.has_split) {
    doc["split"]["train"] = manifest.train_indices;
    doc["split"]["test"] = manifest.test_indices;
  }
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io, "cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
  if (!out) raise(ErrorCode::io, "write failed on '" + path + "'");
}

Dataset load_dataset(const DatasetManifest& manifest) {
  Dataset ds;
  ds.manifest = manifest;
  ds.labels = read_labels(manifest.labels_path);
  for (const auto& [name, path] : manifest.banks) {
    FeatureBank bank = read_bank(path);
    bank.name = name;
    if (bank.count() != ds.labels.count())
      raise(ErrorCode::dimension, "bank '" + name + "' has " + std::to_string(bank.count()) +
                                      " samples but labels have " +
                                      std::to_string(ds.labels.count()));
    ds.banks.push_back(std::move(bank));
  }
  return ds;
}

}  // namespace evsel::dataio

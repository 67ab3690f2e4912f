#include "eegpipe/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace eegpipe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_sample(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) fields.push_back(cur);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// One trial CSV: header of labels, then rows of samples (one per time point).
Eigen::MatrixXd load_trial_csv(const fs::path& path,
                               const std::vector<std::string>& expected_labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trial file " + path.string());

  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("trial file " + path.string() + " is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() != expected_labels.size()) {
    throw DataError("trial file " + path.string() + " has " +
                    std::to_string(header.size()) + " channels, expected " +
                    std::to_string(expected_labels.size()));
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != expected_labels[i]) {
      throw DataError("trial file " + path.string() + " column " +
                      std::to_string(i) + " is '" + header[i] +
                      "' but the manifest lists '" + expected_labels[i] + "'");
    }
  }

  std::vector<std::vector<double>> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != expected_labels.size()) {
      throw DataError("trial file " + path.string() + " line " +
                      std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " values, expected " +
                      std::to_string(expected_labels.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      char* end = nullptr;
      const double v = std::strtod(fields[i].c_str(), &end);
      if (end == fields[i].c_str() || *end != '\0') {
        throw DataError("trial file " + path.string() + " line " +
                        std::to_string(line_no) + " column " +
                        std::to_string(i) + ": cannot parse '" + fields[i] +
                        "'");
      }
      if (!std::isfinite(v)) {
        throw DataError("trial file " + path.string() + " line " +
                        std::to_string(line_no) + " column " +
                        std::to_string(i) + ": non-finite sample");
      }
      row[i] = v;
    }
    rows.push_back(std::move(row));
  }

  Eigen::MatrixXd samples(expected_labels.size(), rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t ch = 0; ch < rows[t].size(); ++ch) {
      samples(static_cast<long>(ch), static_cast<long>(t)) = rows[t][ch];
    }
  }
  return samples;
}

}  // namespace

long ValidationReport::total_artifacts() const {
  long total = 0;
  for (long c : artifact_counts) total += c;
  return total;
}

SessionManifest read_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open manifest " + manifest_path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("manifest " + manifest_path.string() + ": " + e.what());
  }

  try {
    SessionManifest m;
    m.subject_id = doc.at("subject_id").get<std::string>();
    m.condition = condition_from_string(doc.at("condition").get<std::string>());
    m.sample_rate = doc.at("sample_rate").get<int>();
    const json& p = doc.at("paradigm");
    m.paradigm.relax_s = p.at("relax_s").get<double>();
    m.paradigm.watch_s = p.at("watch_s").get<double>();
    m.paradigm.rest_s = p.at("rest_s").get<double>();
    m.paradigm.trials_per_condition = p.at("trials_per_condition").get<int>();
    m.channel_order = doc.at("channel_order").get<std::vector<std::string>>();
    m.trial_files = doc.at("trial_files").get<std::vector<std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw DataError("manifest " + manifest_path.string() + ": " + e.what());
  }
}

Recording load_recording(const fs::path& manifest_path) {
  const SessionManifest m = read_manifest(manifest_path);
  const fs::path dir = manifest_path.parent_path();

  const Montage standard = standard_montage();
  if (m.channel_order.size() != standard.channels.size()) {
    throw DataError("manifest " + manifest_path.string() + " lists " +
                    std::to_string(m.channel_order.size()) +
                    " channels, expected " +
                    std::to_string(standard.channels.size()));
  }
  // channel_order must be a permutation of the standard montage.
  std::vector<int> to_standard(m.channel_order.size());
  for (std::size_t i = 0; i < m.channel_order.size(); ++i) {
    const int idx = standard.index_of(m.channel_order[i]);
    if (idx < 0) {
      throw DataError("manifest channel '" + m.channel_order[i] +
                      "' is not a standard montage channel");
    }
    to_standard[i] = idx;
  }
  std::set<int> unique(to_standard.begin(), to_standard.end());
  if (unique.size() != to_standard.size()) {
    throw DataError("manifest channel_order contains duplicate labels");
  }

  if (m.sample_rate <= 0) {
    throw DataError("manifest sample_rate must be positive");
  }

  Recording rec;
  rec.subject_id = m.subject_id;
  rec.condition = m.condition;
  rec.sample_rate = m.sample_rate;
  rec.montage = standard;

  const long expected_cols =
      std::lround(m.paradigm.total_s() * m.sample_rate);
  for (const std::string& rel : m.trial_files) {
    const fs::path trial_path = dir / rel;
    if (!fs::exists(trial_path)) {
      throw DataError("trial file not found: " + trial_path.string());
    }
    Eigen::MatrixXd raw = load_trial_csv(trial_path, m.channel_order);
    if (raw.cols() != expected_cols) {
      throw DataError("trial file " + trial_path.string() + " has " +
                      std::to_string(raw.cols()) + " samples, expected " +
                      std::to_string(expected_cols));
    }
    Trial trial;
    trial.paradigm = m.paradigm;
    trial.samples.resize(raw.rows(), raw.cols());
    for (std::size_t i = 0; i < to_standard.size(); ++i) {
      trial.samples.row(to_standard[i]) = raw.row(static_cast<long>(i));
    }
    rec.trials.push_back(std::move(trial));
  }
  return rec;
}

SessionManifest save_recording(const Recording& rec, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir)) {
    throw DataError("cannot create directory " + dir.string() + ": " +
                    ec.message());
  }

  SessionManifest m;
  m.subject_id = rec.subject_id;
  m.condition = rec.condition;
  m.sample_rate = rec.sample_rate;
  m.paradigm = rec.trials.empty() ? ParadigmSpec{} : rec.trials.front().paradigm;
  m.channel_order = rec.montage.channels;

  for (std::size_t t = 0; t < rec.trials.size(); ++t) {
    char name[32];
    std::snprintf(name, sizeof(name), "trial_%02zu.csv", t);
    m.trial_files.emplace_back(name);

    const fs::path path = dir / name;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write trial file " + path.string());
    for (std::size_t ch = 0; ch < m.channel_order.size(); ++ch) {
      out << (ch ? "," : "") << m.channel_order[ch];
    }
    out << '\n';
    const Eigen::MatrixXd& s = rec.trials[t].samples;
    for (long col = 0; col < s.cols(); ++col) {
      for (long ch = 0; ch < s.rows(); ++ch) {
        if (ch) out << ',';
        out << format_sample(s(ch, col));
      }
      out << '\n';
    }
    if (!out.good()) throw DataError("write failed for " + path.string());
  }

  json doc;
  doc["subject_id"] = m.subject_id;
  doc["condition"] = to_string(m.condition);
  doc["sample_rate"] = m.sample_rate;
  doc["paradigm"] = {{"relax_s", m.paradigm.relax_s},
                     {"watch_s", m.paradigm.watch_s},
                     {"rest_s", m.paradigm.rest_s},
                     {"trials_per_condition", m.paradigm.trials_per_condition}};
  doc["channel_order"] = m.channel_order;
  doc["trial_files"] = m.trial_files;

  const fs::path manifest_path = dir / "manifest.json";
  std::ofstream out(manifest_path);
  if (!out) throw DataError("cannot write manifest " + manifest_path.string());
  out << doc.dump(2) << '\n';
  if (!out.good()) throw DataError("write failed for " + manifest_path.string());
  return m;
}

ValidationReport validate(const Recording& rec, double artifact_threshold_uv) {
  ValidationReport report;

  const Montage standard = standard_montage();
  if (rec.montage.channels.size() != standard.channels.size()) {
    report.errors.push_back("montage has " +
                            std::to_string(rec.montage.channels.size()) +
                            " channels, expected " +
                            std::to_string(standard.channels.size()));
  }
  std::set<std::string> unique(rec.montage.channels.begin(),
                               rec.montage.channels.end());
  if (unique.size() != rec.montage.channels.size()) {
    report.errors.push_back("montage contains duplicate channel labels");
  }
  if (rec.sample_rate <= 0) {
    report.errors.push_back("sample_rate must be positive");
  }
  if (rec.trials.empty()) {
    report.warnings.push_back("recording has no trials");
  }

  for (std::size_t t = 0; t < rec.trials.size(); ++t) {
    const Trial& trial = rec.trials[t];
    const long expected_rows = static_cast<long>(rec.montage.channels.size());
    if (trial.samples.rows() != expected_rows) {
      report.errors.push_back("trial " + std::to_string(t) + " has " +
                              std::to_string(trial.samples.rows()) +
                              " channel rows, expected " +
                              std::to_string(expected_rows));
    }
    if (rec.sample_rate > 0) {
      const long expected_cols =
          std::lround(trial.paradigm.total_s() * rec.sample_rate);
      if (trial.samples.cols() != expected_cols) {
        report.errors.push_back("trial " + std::to_string(t) + " has " +
                                std::to_string(trial.samples.cols()) +
                                " samples, expected " +
                                std::to_string(expected_cols));
      }
    }
    long artifacts = 0;
    bool finite = true;
    for (long ch = 0; ch < trial.samples.rows(); ++ch) {
      for (long i = 0; i < trial.samples.cols(); ++i) {
        const double v = trial.samples(ch, i);
        if (!std::isfinite(v)) finite = false;
        if (std::abs(v) > artifact_threshold_uv) ++artifacts;
      }
    }
    if (!finite) {
      report.errors.push_back("trial " + std::to_string(t) +
                              " contains non-finite samples");
    }
    report.artifact_counts.push_back(artifacts);
  }
  return report;
}

}  // namespace eegpipe

#include "eegpipe/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "eegpipe/rng.hpp"

namespace eegpipe {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<SubjectPaths> discover_subjects(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw DataError("data directory not found: " + root.string());
  }
  std::vector<SubjectPaths> subjects;
  std::vector<fs::path> entries;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) entries.push_back(entry.path());
  }
  std::sort(entries.begin(), entries.end());
  for (const fs::path& dir : entries) {
    const fs::path two_d = dir / "2d" / "manifest.json";
    const fs::path three_d = dir / "3d" / "manifest.json";
    if (fs::exists(two_d) && fs::exists(three_d)) {
      subjects.push_back({dir.filename().string(), two_d, three_d});
    }
  }
  if (subjects.empty()) {
    throw DataError("no subject directories with 2d/ and 3d/ manifests under " +
                    root.string());
  }
  return subjects;
}

SubjectData load_subject(const SubjectPaths& paths) {
  SubjectData data;
  data.subject_id = paths.subject_id;
  data.two_d = load_recording(paths.two_d_manifest);
  data.three_d = load_recording(paths.three_d_manifest);
  if (data.two_d.condition != Condition::TwoD) {
    throw DataError("manifest " + paths.two_d_manifest.string() +
                    " is not a 2D session");
  }
  if (data.three_d.condition != Condition::ThreeD) {
    throw DataError("manifest " + paths.three_d_manifest.string() +
                    " is not a 3D session");
  }
  return data;
}

BandSelectResult run_band_selection(const std::vector<SubjectData>& subjects,
                                    const BandSelectConfig& cfg) {
  if (subjects.empty()) throw ParameterError("no subjects to analyze");

  BandSelectResult result;
  result.stage = cfg.stage;

  for (const SubjectData& subject : subjects) {
    BandPowerMatrix before, after;
    const auto matrix_of = [&](const Recording& rec, Stage stage,
                               const std::string& label) {
      const Trial avg = preprocess_for_band_selection(rec, cfg.preprocess);
      const StageSegment seg = stage_slice(avg, stage, rec.sample_rate);
      return band_power_matrix(seg, rec.montage.channels, label,
                               cfg.window_len, cfg.decimation);
    };
    switch (cfg.stage) {
      case ComparisonStage::I:
        before = matrix_of(subject.two_d, Stage::Relax, "R2b");
        after = matrix_of(subject.two_d, Stage::Rest, "R2a");
        break;
      case ComparisonStage::II:
        before = matrix_of(subject.three_d, Stage::Relax, "R3b");
        after = matrix_of(subject.three_d, Stage::Rest, "R3a");
        break;
      case ComparisonStage::III:
        before = matrix_of(subject.two_d, Stage::Rest, "R2a");
        after = matrix_of(subject.three_d, Stage::Rest, "R3a");
        break;
    }
    result.per_subject.push_back(band_difference_matrix(before, after));
    result.subject_ids.push_back(subject.subject_id);
  }

  result.report = select_dominant_bands(result.per_subject, cfg.threshold,
                                        cfg.min_channels, cfg.rule);

  result.average = result.per_subject.front();
  for (std::size_t i = 1; i < result.per_subject.size(); ++i) {
    result.average.values += result.per_subject[i].values;
  }
  result.average.values /= static_cast<double>(result.per_subject.size());
  return result;
}

FeatureDataset assemble_subject_dataset(const SubjectData& subject,
                                        const ClassifyConfig& cfg) {
  AssembleOptions opts;
  opts.kind = cfg.feature;
  opts.dominant_bands = cfg.dominant_bands;
  opts.seed = cfg.seed;
  opts.chronological = cfg.chronological_split;
  opts.stft.window_len = cfg.stft_window;
  opts.stft.hop = cfg.decimation;
  return assemble_dataset(subject.two_d, subject.three_d, opts);
}

ClassifyRunResult run_classification(const std::vector<SubjectData>& subjects,
                                     const ClassifyConfig& cfg) {
  if (subjects.empty()) throw ParameterError("no subjects to classify");

  ClassifyRunResult result;
  result.feature = cfg.feature;
  result.classifier = cfg.classifier;

  double best_sum = 0.0;
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    SearchOptions search;
    search.strategy = cfg.strategy;
    search.exhaustive_k = cfg.exhaustive_k;
    search.k_fold = cfg.k_fold;
    search.grid = cfg.grid;
    search.seed = mix_seed(cfg.seed, s);
    search.max_prefix = cfg.max_prefix;

    const FeatureDataset ds = assemble_subject_dataset(subjects[s], cfg);
    if (result.channels.empty()) result.channels = ds.channels;

    SubjectClassifyOutcome outcome;
    outcome.subject_id = subjects[s].subject_id;
    outcome.search = channel_combination_search(ds, cfg.classifier, search);
    best_sum += outcome.search.best().test.accuracy.value_or(0.0);
    result.subjects.push_back(std::move(outcome));
  }

  const std::size_t n_channels = result.channels.size();
  result.mean_channel_accuracy.assign(n_channels, 0.0);
  for (const SubjectClassifyOutcome& outcome : result.subjects) {
    for (std::size_t ch = 0; ch < n_channels; ++ch) {
      result.mean_channel_accuracy[ch] +=
          outcome.search.per_channel[ch].test.accuracy.value_or(0.0);
    }
  }
  for (double& v : result.mean_channel_accuracy) {
    v /= static_cast<double>(result.subjects.size());
  }
  result.mean_best_accuracy =
      best_sum / static_cast<double>(result.subjects.size());
  return result;
}

namespace {

json report_to_json(const EvalReport& r) {
  json out;
  out["tp"] = r.tp;
  out["fp"] = r.fp;
  out["fn"] = r.fn;
  out["tn"] = r.tn;
  out["accuracy"] = r.accuracy ? json(*r.accuracy) : json(nullptr);
  out["sensitivity"] = r.sensitivity ? json(*r.sensitivity) : json(nullptr);
  out["specificity"] = r.specificity ? json(*r.specificity) : json(nullptr);
  return out;
}

json params_to_json(const Hyperparams& p) {
  json out;
  out["kind"] = to_string(p.kind);
  if (p.kind == ClassifierKind::Plsr) {
    out["n_components"] = p.n_components;
  } else {
    out["sigma"] = p.sigma;
    out["c"] = p.c;
  }
  return out;
}

}  // namespace

std::string band_select_to_json(const BandSelectResult& result) {
  json doc;
  doc["stage"] = to_string(result.stage);
  doc["threshold"] = result.report.threshold;
  doc["min_channels"] = result.report.min_channels;
  doc["subjects"] = result.subject_ids;

  json selected = json::array();
  for (Band b : result.report.selected()) selected.push_back(to_string(b));
  doc["selected"] = selected;

  json bands = json::object();
  for (const BandReportEntry& entry : result.report.bands) {
    json channels = json::array();
    for (const MeaningfulChannel& mc : entry.meaningful) {
      channels.push_back({{"channel", mc.channel},
                          {"difference", mc.difference}});
    }
    bands[to_string(entry.band)] = {{"dominant", entry.dominant},
                                    {"meaningful", channels}};
  }
  doc["bands"] = bands;
  return doc.dump(2) + "\n";
}

std::string classify_to_json(const ClassifyRunResult& result) {
  json doc;
  doc["feature"] = to_string(result.feature);
  doc["classifier"] = to_string(result.classifier);

  json subjects = json::array();
  for (const SubjectClassifyOutcome& outcome : result.subjects) {
    json per_channel = json::array();
    for (const ChannelScore& score : outcome.search.per_channel) {
      json entry;
      entry["channel"] = score.name;
      entry["cv_accuracy"] = score.cv_accuracy;
      entry["params"] = params_to_json(score.params);
      entry["test"] = report_to_json(score.test);
      per_channel.push_back(entry);
    }
    json ranking = json::array();
    for (int ch : outcome.search.ranking) {
      ranking.push_back(result.channels[static_cast<std::size_t>(ch)]);
    }
    json combos = json::array();
    for (const ComboResult& combo : outcome.search.combos) {
      json entry;
      entry["channels"] = combo.names;
      entry["cv_accuracy"] = combo.cv_accuracy;
      entry["params"] = params_to_json(combo.params);
      entry["test"] = report_to_json(combo.test);
      combos.push_back(entry);
    }
    const ComboResult& best = outcome.search.best();
    subjects.push_back({{"subject_id", outcome.subject_id},
                        {"per_channel", per_channel},
                        {"ranking", ranking},
                        {"combos", combos},
                        {"best", {{"channels", best.names},
                                  {"test", report_to_json(best.test)},
                                  {"params", params_to_json(best.params)}}}});
  }
  doc["subjects"] = subjects;

  json mean_acc = json::object();
  for (std::size_t ch = 0; ch < result.channels.size(); ++ch) {
    mean_acc[result.channels[ch]] = result.mean_channel_accuracy[ch];
  }
  doc["mean_channel_accuracy"] = mean_acc;
  doc["mean_best_accuracy"] = result.mean_best_accuracy;
  return doc.dump(2) + "\n";
}

void write_diff_matrix_csv(const BandDiffMatrix& m, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "channel";
  for (const BandDef& b : canonical_bands()) out << ',' << to_string(b.name);
  out << '\n';
  char buf[32];
  for (long ch = 0; ch < m.values.rows(); ++ch) {
    out << m.channels[static_cast<std::size_t>(ch)];
    for (long b = 0; b < m.values.cols(); ++b) {
      std::snprintf(buf, sizeof(buf), "%.10g", m.values(ch, b));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out.good()) throw DataError("write failed for " + path.string());
}

}  // namespace eegpipe

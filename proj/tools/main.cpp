#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "eegpipe/pipeline.hpp"
#include "eegpipe/rng.hpp"
#include "eegpipe/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace eegpipe;

namespace {

// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
constexpr int kUsageError = 2;
constexpr int kDataError = 3;
constexpr int kNumericalError = 4;

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("config " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw DataError("config " + path + " must be a JSON object");
  return doc;
}

// Config-file value wins only when the flag was not given on the command line.
template <typename T>
void cfg_override(const CLI::App& cmd, const std::string& flag, const json& cfg,
                  const std::string& key, T& target) {
  if (cmd.count(flag) > 0 || !cfg.contains(key)) return;
  try {
    target = cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError("config key '" + key + "': " + e.what());
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<BandDef> parse_bands(const std::string& csv) {
  std::vector<BandDef> out;
  for (const std::string& name : split_list(csv)) {
    out.push_back(band_def(band_from_string(name)));
  }
  return out;
}

std::vector<SubjectData> load_all_subjects(const std::string& data_dir) {
  std::vector<SubjectData> subjects;
  for (const SubjectPaths& p : discover_subjects(data_dir)) {
    subjects.push_back(load_subject(p));
  }
  return subjects;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out.good()) throw DataError("write failed for " + path.string());
}

HyperGrid grid_from_config(const json& cfg) {
  HyperGrid grid;
  if (cfg.contains("plsr_components")) {
    grid.plsr_components = cfg["plsr_components"].get<std::vector<int>>();
  }
  if (cfg.contains("svm_sigma_mult")) {
    grid.svm_sigma_mult = cfg["svm_sigma_mult"].get<std::vector<double>>();
  }
  if (cfg.contains("svm_c")) {
    grid.svm_c = cfg["svm_c"].get<std::vector<double>>();
  }
  return grid;
}

// ---------------------------------------------------------------- synth ---

int cmd_synth(const std::string& config_path, const std::string& preset,
              const std::string& spec_path, std::uint64_t seed, int subjects,
              const std::string& out_dir, const CLI::App& cmd) {
  const json cfg = load_config(config_path);
  std::string use_preset = preset;
  std::string use_spec = spec_path;
  std::uint64_t use_seed = seed;
  int use_subjects = subjects;
  std::string out = out_dir;
  cfg_override(cmd, "--preset", cfg, "preset", use_preset);
  cfg_override(cmd, "--spec", cfg, "spec", use_spec);
  cfg_override(cmd, "--seed", cfg, "seed", use_seed);
  cfg_override(cmd, "--subjects", cfg, "subjects", use_subjects);
  cfg_override(cmd, "--out", cfg, "out", out);

  if (out.empty()) throw ParameterError("synth needs an output directory (-o)");
  if (use_preset.empty() == use_spec.empty()) {
    throw ParameterError("synth needs exactly one of --preset or --spec");
  }
  fs::create_directories(out);

  const Montage montage = standard_montage();
  const ParadigmSpec paradigm;

  if (!use_spec.empty()) {
    std::ifstream in(use_spec);
    if (!in) throw DataError("cannot open spec " + use_spec);
    std::stringstream buf;
    buf << in.rdbuf();
    SynthSpec spec = synth_spec_from_json(buf.str(), montage);
    if (cmd.count("--seed") > 0) spec.seed = use_seed;
    const Recording rec = generate_recording(spec, paradigm, montage);
    save_recording(rec, out);
    std::cout << "wrote 1 recording (" << to_string(rec.condition) << ", "
              << rec.trials.size() << " trials) to " << out << "\n";
    return 0;
  }

  if (use_subjects < 1) throw ParameterError("--subjects must be >= 1");
  for (int s = 0; s < use_subjects; ++s) {
    char name[16];
    std::snprintf(name, sizeof(name), "s%02d", s + 1);
    const SessionPair pair = generate_preset_pair(
        use_preset, mix_seed(use_seed, static_cast<std::uint64_t>(s)), name,
        paradigm, montage);
    save_recording(pair.two_d, fs::path(out) / name / "2d");
    save_recording(pair.three_d, fs::path(out) / name / "3d");
    std::cout << "wrote subject " << name << " (2d + 3d, "
              << pair.two_d.trials.size() << " trials each)\n";
  }
  std::cout << "preset " << use_preset << ", seed " << use_seed << ", "
            << use_subjects << " subject(s) under " << out << "\n";
  return 0;
}

// ---------------------------------------------------------- ingest-check ---

int cmd_ingest_check(const std::vector<std::string>& manifests) {
  if (manifests.empty()) throw ParameterError("ingest-check needs manifest paths");
  bool all_ok = true;
  for (const std::string& path : manifests) {
    try {
      const Recording rec = load_recording(path);
      const ValidationReport report = validate(rec);
      std::cout << path << ": " << (report.ok() ? "OK" : "FAIL") << ", "
                << rec.trials.size() << " trials, "
                << report.total_artifacts() << " artifact sample(s)\n";
      for (const std::string& e : report.errors) {
        std::cout << "  error: " << e << "\n";
        all_ok = false;
      }
      for (const std::string& w : report.warnings) {
        std::cout << "  warning: " << w << "\n";
      }
    } catch (const Error& e) {
      std::cout << path << ": FAIL, " << e.what() << "\n";
      all_ok = false;
    }
  }
  if (!all_ok) throw DataError("one or more sessions failed validation");
  return 0;
}

// ----------------------------------------------------------- bandselect ---

int cmd_bandselect(const std::string& config_path, const std::string& data_dir,
                   const std::string& stage, double threshold, int min_channels,
                   const std::string& rule, int window, int decimation,
                   const std::string& out_dir, const CLI::App& cmd) {
  const json cfg = load_config(config_path);
  std::string use_data = data_dir, use_stage = stage, use_rule = rule,
              out = out_dir;
  double use_threshold = threshold;
  int use_min = min_channels, use_window = window, use_dec = decimation;
  cfg_override(cmd, "--data", cfg, "data", use_data);
  cfg_override(cmd, "--stage", cfg, "stage", use_stage);
  cfg_override(cmd, "--threshold", cfg, "threshold", use_threshold);
  cfg_override(cmd, "--min-channels", cfg, "min_channels", use_min);
  cfg_override(cmd, "--rule", cfg, "rule", use_rule);
  cfg_override(cmd, "--window", cfg, "window", use_window);
  cfg_override(cmd, "--decimation", cfg, "decimation", use_dec);
  cfg_override(cmd, "--out", cfg, "out", out);

  if (use_data.empty()) throw ParameterError("bandselect needs --data");
  if (out.empty()) throw ParameterError("bandselect needs an output directory (-o)");
  fs::create_directories(out);

  std::vector<ComparisonStage> stages;
  if (use_stage == "all") {
    stages = {ComparisonStage::I, ComparisonStage::II, ComparisonStage::III};
  } else {
    stages = {comparison_stage_from_string(use_stage)};
  }

  const std::vector<SubjectData> subjects = load_all_subjects(use_data);

  for (ComparisonStage st : stages) {
    BandSelectConfig bc;
    bc.stage = st;
    bc.threshold = use_threshold;
    bc.min_channels = use_min;
    bc.window_len = use_window;
    bc.decimation = use_dec;
    if (use_rule == "majority") {
      bc.rule = AggregationRule::PerParticipantMajority;
    } else if (use_rule != "mean") {
      throw ParameterError("--rule must be mean or majority");
    }

    const BandSelectResult result = run_band_selection(subjects, bc);
    const std::string tag = to_string(st);
    write_text(fs::path(out) / ("bandselect_" + tag + ".json"),
               band_select_to_json(result));
    write_diff_matrix_csv(result.average,
                          fs::path(out) / ("diff_" + tag + "_avg.csv"));
    for (std::size_t i = 0; i < result.per_subject.size(); ++i) {
      write_diff_matrix_csv(result.per_subject[i],
                            fs::path(out) / ("diff_" + tag + "_" +
                                             result.subject_ids[i] + ".csv"));
    }

    std::cout << "stage " << tag << " dominant bands:";
    const auto selected = result.report.selected();
    if (selected.empty()) std::cout << " (none)";
    for (Band b : selected) std::cout << " " << to_string(b);
    std::cout << "\n";
  }
  return 0;
}

// ------------------------------------------------------------ featurize ---

int cmd_featurize(const std::string& config_path, const std::string& data_dir,
                  const std::string& features, const std::string& bands,
                  std::uint64_t seed, int decimation, const std::string& out_dir,
                  const CLI::App& cmd) {
  const json cfg = load_config(config_path);
  std::string use_data = data_dir, use_features = features, use_bands = bands,
              out = out_dir;
  std::uint64_t use_seed = seed;
  int use_dec = decimation;
  cfg_override(cmd, "--data", cfg, "data", use_data);
  cfg_override(cmd, "--features", cfg, "features", use_features);
  cfg_override(cmd, "--bands", cfg, "bands", use_bands);
  cfg_override(cmd, "--seed", cfg, "seed", use_seed);
  cfg_override(cmd, "--decimation", cfg, "decimation", use_dec);
  cfg_override(cmd, "--out", cfg, "out", out);

  if (use_data.empty()) throw ParameterError("featurize needs --data");
  if (out.empty()) throw ParameterError("featurize needs an output directory (-o)");
  fs::create_directories(out);

  const std::vector<SubjectData> subjects = load_all_subjects(use_data);
  for (const std::string& kind_name : split_list(use_features)) {
    const FeatureKind kind = feature_kind_from_string(kind_name);
    for (const SubjectData& subject : subjects) {
      ClassifyConfig cc;
      cc.feature = kind;
      cc.dominant_bands = parse_bands(use_bands);
      cc.seed = use_seed;
      cc.decimation = use_dec;
      const FeatureDataset ds = assemble_subject_dataset(subject, cc);
      const fs::path path =
          fs::path(out) /
          ("features_" + to_string(kind) + "_" + subject.subject_id + ".csv");
      write_dataset_csv(ds, path);
      std::cout << path.string() << ": " << ds.epoch_count() << " epochs x "
                << ds.channels.size() << " channels x " << ds.feature_dim()
                << " features\n";
    }
  }
  return 0;
}

// ------------------------------------------------------------- classify ---

int cmd_classify(const std::string& config_path, const std::string& data_dir,
                 const std::string& features, const std::string& classifiers,
                 const std::string& bands, std::uint64_t seed, int k_fold,
                 int decimation, const std::string& strategy, int exhaustive_k,
                 int max_prefix, const std::string& out_dir,
                 const CLI::App& cmd) {
  const json cfg = load_config(config_path);
  std::string use_data = data_dir, use_features = features,
              use_classifiers = classifiers, use_bands = bands,
              use_strategy = strategy, out = out_dir;
  std::uint64_t use_seed = seed;
  int use_k = k_fold, use_dec = decimation, use_ek = exhaustive_k,
      use_prefix = max_prefix;
  cfg_override(cmd, "--data", cfg, "data", use_data);
  cfg_override(cmd, "--features", cfg, "features", use_features);
  cfg_override(cmd, "--classifiers", cfg, "classifiers", use_classifiers);
  cfg_override(cmd, "--bands", cfg, "bands", use_bands);
  cfg_override(cmd, "--seed", cfg, "seed", use_seed);
  cfg_override(cmd, "--k-fold", cfg, "k_fold", use_k);
  cfg_override(cmd, "--decimation", cfg, "decimation", use_dec);
  cfg_override(cmd, "--strategy", cfg, "strategy", use_strategy);
  cfg_override(cmd, "--exhaustive-k", cfg, "exhaustive_k", use_ek);
  cfg_override(cmd, "--max-prefix", cfg, "max_prefix", use_prefix);
  cfg_override(cmd, "--out", cfg, "out", out);

  if (use_data.empty()) throw ParameterError("classify needs --data");
  if (out.empty()) throw ParameterError("classify needs an output directory (-o)");
  fs::create_directories(out);

  const std::vector<SubjectData> subjects = load_all_subjects(use_data);
  for (const std::string& kind_name : split_list(use_features)) {
    for (const std::string& clf_name : split_list(use_classifiers)) {
      ClassifyConfig cc;
      cc.feature = feature_kind_from_string(kind_name);
      cc.classifier = classifier_kind_from_string(clf_name);
      cc.dominant_bands = parse_bands(use_bands);
      cc.seed = use_seed;
      cc.k_fold = use_k;
      cc.decimation = use_dec;
      cc.grid = grid_from_config(cfg);
      cc.exhaustive_k = use_ek;
      cc.max_prefix = use_prefix;
      if (use_strategy == "exhaustive-k") {
        cc.strategy = SearchStrategy::ExhaustiveK;
      } else if (use_strategy != "ranked-prefix") {
        throw ParameterError("--strategy must be ranked-prefix or exhaustive-k");
      }

      const ClassifyRunResult result = run_classification(subjects, cc);
      const fs::path path =
          fs::path(out) / ("classify_" + to_string(cc.feature) + "_" +
                           to_string(cc.classifier) + ".json");
      write_text(path, classify_to_json(result));
      std::cout << path.string() << ": mean best-combination accuracy "
                << result.mean_best_accuracy << "\n";
    }
  }
  return 0;
}

// --------------------------------------------------------------- report ---

struct FigSpec {
  const char* fig;
  const char* feature;
  const char* classifier;
};

int cmd_report(const std::string& results_dir, const std::string& out_dir) {
  if (results_dir.empty()) throw ParameterError("report needs --results");
  const fs::path results(results_dir);
  if (!fs::is_directory(results)) {
    throw DataError("results directory not found: " + results_dir);
  }
  const fs::path out = out_dir.empty() ? results : fs::path(out_dir);
  fs::create_directories(out);

  std::ostringstream summary;
  summary << "eegpipe report\n==============\n";
  bool found_any = false;

  // Figs. 5-7: averaged band-power difference matrices per stage.
  const struct {
    const char* fig;
    const char* stage;
  } diff_figs[] = {{"fig05", "I"}, {"fig06", "II"}, {"fig07", "III"}};
  for (const auto& df : diff_figs) {
    const fs::path src = results / ("diff_" + std::string(df.stage) + "_avg.csv");
    if (!fs::exists(src)) continue;
    found_any = true;
    std::ifstream in(src);
    std::stringstream buf;
    buf << in.rdbuf();
    write_text(out / (std::string(df.fig) + "_avg_psd_diff_stage" + df.stage +
                      ".csv"),
               buf.str());
  }

  for (const auto& df : diff_figs) {
    const fs::path src =
        results / ("bandselect_" + std::string(df.stage) + ".json");
    if (!fs::exists(src)) continue;
    found_any = true;
    std::ifstream in(src);
    json doc;
    in >> doc;
    summary << "\nStage " << df.stage << " dominant bands:";
    if (doc["selected"].empty()) summary << " (none)";
    for (const auto& band : doc["selected"]) {
      summary << " " << band.get<std::string>();
    }
    summary << "\n";
    for (const auto& [band, entry] : doc["bands"].items()) {
      if (entry["meaningful"].empty()) continue;
      summary << "  " << band << ":";
      for (const auto& mc : entry["meaningful"]) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), " %s(%+.2f)",
                      mc["channel"].get<std::string>().c_str(),
                      mc["difference"].get<double>());
        summary << buf;
      }
      summary << "\n";
    }
  }

  // Figs. 8-9: per-channel accuracies; figs. 10-13: combination curves.
  const FigSpec combo_figs[] = {{"fig10", "stft", "plsr"},
                                {"fig11", "dwt", "plsr"},
                                {"fig12", "stft", "svm"},
                                {"fig13", "dwt", "svm"}};
  std::map<std::string, json> classify_docs;
  for (const auto& cf : combo_figs) {
    const fs::path src = results / ("classify_" + std::string(cf.feature) +
                                    "_" + cf.classifier + ".json");
    if (!fs::exists(src)) continue;
    found_any = true;
    std::ifstream in(src);
    json doc;
    in >> doc;
    classify_docs[std::string(cf.feature) + "_" + cf.classifier] = doc;
  }

  for (const char* feature : {"stft", "dwt"}) {
    const std::string fig = feature == std::string("stft") ? "fig08" : "fig09";
    const bool has_plsr = classify_docs.count(std::string(feature) + "_plsr");
    const bool has_svm = classify_docs.count(std::string(feature) + "_svm");
    if (!has_plsr && !has_svm) continue;
    std::ostringstream csv;
    csv << "channel";
    if (has_plsr) csv << ",plsr_accuracy";
    if (has_svm) csv << ",svm_accuracy";
    csv << "\n";
    const json& ref = classify_docs[std::string(feature) +
                                    (has_plsr ? "_plsr" : "_svm")];
    for (const auto& [ch, acc] : ref["mean_channel_accuracy"].items()) {
      csv << ch;
      if (has_plsr) {
        csv << ',' << classify_docs[std::string(feature) + "_plsr"]
                          ["mean_channel_accuracy"][ch].get<double>();
      }
      if (has_svm) {
        csv << ',' << classify_docs[std::string(feature) + "_svm"]
                          ["mean_channel_accuracy"][ch].get<double>();
      }
      csv << "\n";
    }
    write_text(out / (fig + "_channel_accuracy_" + feature + ".csv"),
               csv.str());
  }

  for (const auto& cf : combo_figs) {
    const std::string key = std::string(cf.feature) + "_" + cf.classifier;
    if (!classify_docs.count(key)) continue;
    const json& doc = classify_docs[key];

    // Mean accuracy (and sensitivity/specificity) per combination size.
    std::map<int, std::array<double, 4>> by_size;  // acc, sens, spec, count
    for (const auto& subject : doc["subjects"]) {
      for (const auto& combo : subject["combos"]) {
        const int size = static_cast<int>(combo["channels"].size());
        auto& acc = by_size[size];
        acc[0] += combo["test"]["accuracy"].is_null()
                      ? 0.0
                      : combo["test"]["accuracy"].get<double>();
        acc[1] += combo["test"]["sensitivity"].is_null()
                      ? 0.0
                      : combo["test"]["sensitivity"].get<double>();
        acc[2] += combo["test"]["specificity"].is_null()
                      ? 0.0
                      : combo["test"]["specificity"].get<double>();
        acc[3] += 1.0;
      }
    }
    std::ostringstream csv;
    csv << "combo_size,accuracy,sensitivity,specificity\n";
    char buf[128];
    for (const auto& [size, acc] : by_size) {
      std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f\n", size,
                    acc[0] / acc[3], acc[1] / acc[3], acc[2] / acc[3]);
      csv << buf;
    }
    write_text(out / (std::string(cf.fig) + "_combo_" + key + ".csv"),
               csv.str());

    summary << "\n" << cf.classifier << " + " << cf.feature
            << ": mean best-combination accuracy "
            << doc["mean_best_accuracy"].get<double>() << "\n";
    for (const auto& subject : doc["subjects"]) {
      summary << "  " << subject["subject_id"].get<std::string>() << " best [";
      bool first = true;
      for (const auto& ch : subject["best"]["channels"]) {
        summary << (first ? "" : " ") << ch.get<std::string>();
        first = false;
      }
      const auto& acc = subject["best"]["test"]["accuracy"];
      summary << "] accuracy "
              << (acc.is_null() ? std::string("n/a")
                                : std::to_string(acc.get<double>()))
              << "\n";
    }
  }

  if (!found_any) {
    throw DataError("no bandselect/classify outputs found in " + results_dir);
  }
  write_text(out / "summary.txt", summary.str());
  std::cout << "report written to " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG band-power analysis pipeline: synthesis, ingest, band "
               "selection, feature extraction, classification"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate synthetic EEG sessions");
  std::string sy_config, sy_preset, sy_spec, sy_out;
  std::uint64_t sy_seed = 0;
  int sy_subjects = 5;
  synth->add_option("--config", sy_config, "JSON config file");
  synth->add_option("--preset", sy_preset,
                    "Preset: null, stage1-delta, stage3-paper-like");
  synth->add_option("--spec", sy_spec, "SynthSpec JSON file");
  synth->add_option("--seed", sy_seed, "Random seed")->capture_default_str();
  synth->add_option("--subjects", sy_subjects, "Subjects per preset")
      ->capture_default_str();
  synth->add_option("-o,--out", sy_out, "Output directory");

  // ingest-check
  auto* ingest = app.add_subcommand("ingest-check", "Validate session manifests");
  std::vector<std::string> ic_manifests;
  ingest->add_option("manifests", ic_manifests, "Manifest paths");

  // bandselect
  auto* bandsel = app.add_subcommand(
      "bandselect", "Dominant-band selection from PSD differences");
  bandsel->footer(
      "Preprocessing defaults: 15-trial average, 50 Hz notch (Q 35), 1-55 Hz "
      "order-3 zero-phase Butterworth; PSD uses a 512-sample Hanning window "
      "with hop 1 (decimation 1).");
  std::string bs_config, bs_data, bs_stage = "all", bs_rule = "mean", bs_out;
  double bs_threshold = 2.0;
  int bs_min = 3, bs_window = 512, bs_dec = 1;
  bandsel->add_option("--config", bs_config, "JSON config file");
  bandsel->add_option("--data", bs_data, "Data directory (subject pairs)");
  bandsel->add_option("--stage", bs_stage, "Comparison stage: I, II, III or all")
      ->capture_default_str();
  bandsel->add_option("--threshold", bs_threshold,
                      "Meaningful |difference| threshold, percentage points")
      ->capture_default_str();
  bandsel->add_option("--min-channels", bs_min,
                      "Channels required for a dominant band")
      ->capture_default_str();
  bandsel->add_option("--rule", bs_rule, "Aggregation: mean or majority")
      ->capture_default_str();
  bandsel->add_option("--window", bs_window, "STFT window length, samples")
      ->capture_default_str();
  bandsel->add_option("--decimation", bs_dec,
                      "Spectrogram frame decimation (1 = every sample)")
      ->capture_default_str();
  bandsel->add_option("-o,--out", bs_out, "Output directory");

  // featurize
  auto* feat = app.add_subcommand("featurize", "Export feature datasets as CSV");
  feat->footer(
      "Epoching defaults: Rest stage only, 4 s windows advanced in 0.5 s "
      "steps (3.5 s overlap), 50 Hz notch + 1-35 Hz order-3 zero-phase "
      "Butterworth, 83/82 train/test per class; DWT features use db1 at 7 "
      "levels (delta -> A7, alpha -> D6).");
  std::string ft_config, ft_data, ft_features = "dwt", ft_bands = "delta,alpha",
              ft_out;
  std::uint64_t ft_seed = 0;
  int ft_dec = 1;
  feat->add_option("--config", ft_config, "JSON config file");
  feat->add_option("--data", ft_data, "Data directory (subject pairs)");
  feat->add_option("--features", ft_features, "Feature kinds: stft,dwt")
      ->capture_default_str();
  feat->add_option("--bands", ft_bands, "Dominant bands")->capture_default_str();
  feat->add_option("--seed", ft_seed, "Split seed")->capture_default_str();
  feat->add_option("--decimation", ft_dec, "STFT feature frame decimation")
      ->capture_default_str();
  feat->add_option("-o,--out", ft_out, "Output directory");

  // classify
  auto* classify = app.add_subcommand(
      "classify", "Per-channel classification and channel-combination search");
  classify->footer(
      "Epoching as in featurize (4 s / 0.5 s step, 1-35 Hz order-3 "
      "zero-phase Butterworth); K=10 stratified folds; SVM grid sigma in "
      "{0.1,0.5,1,2,5,10} x feature SD, C in {0.1,1,10,100}; PLSR components "
      "1..min(10, dim); STFT features use a 512-sample Hanning window, hop "
      "1.");
  std::string cl_config, cl_data, cl_features = "dwt", cl_classifiers = "svm",
              cl_bands = "delta,alpha", cl_strategy = "ranked-prefix", cl_out;
  std::uint64_t cl_seed = 0;
  int cl_k = 10, cl_dec = 1, cl_ek = 2, cl_prefix = 0;
  classify->add_option("--config", cl_config, "JSON config file");
  classify->add_option("--data", cl_data, "Data directory (subject pairs)");
  classify->add_option("--features", cl_features, "Feature kinds: stft,dwt")
      ->capture_default_str();
  classify->add_option("--classifiers", cl_classifiers,
                       "Classifiers: plsr,svm")
      ->capture_default_str();
  classify->add_option("--bands", cl_bands, "Dominant bands")
      ->capture_default_str();
  classify->add_option("--seed", cl_seed, "Split/CV seed")
      ->capture_default_str();
  classify->add_option("--k-fold", cl_k, "Cross-validation folds")
      ->capture_default_str();
  classify->add_option("--decimation", cl_dec, "STFT feature frame decimation")
      ->capture_default_str();
  classify->add_option("--strategy", cl_strategy,
                       "Search: ranked-prefix or exhaustive-k")
      ->capture_default_str();
  classify->add_option("--exhaustive-k", cl_ek,
                       "Max subset size for exhaustive search (<= 4)")
      ->capture_default_str();
  classify->add_option("--max-prefix", cl_prefix,
                       "Limit ranked prefixes (0 = all channels)")
      ->capture_default_str();
  classify->add_option("-o,--out", cl_out, "Output directory");

  // report
  auto* report = app.add_subcommand(
      "report", "Consolidate bandselect/classify outputs into summary + CSVs");
  std::string rp_results, rp_out;
  report->add_option("--results", rp_results, "Directory with pipeline outputs");
  report->add_option("-o,--out", rp_out, "Output directory (default: results)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(sy_config, sy_preset, sy_spec, sy_seed, sy_subjects,
                       sy_out, *synth);
    }
    if (ingest->parsed()) return cmd_ingest_check(ic_manifests);
    if (bandsel->parsed()) {
      return cmd_bandselect(bs_config, bs_data, bs_stage, bs_threshold, bs_min,
                            bs_rule, bs_window, bs_dec, bs_out, *bandsel);
    }
    if (feat->parsed()) {
      return cmd_featurize(ft_config, ft_data, ft_features, ft_bands, ft_seed,
                           ft_dec, ft_out, *feat);
    }
    if (classify->parsed()) {
      return cmd_classify(cl_config, cl_data, cl_features, cl_classifiers,
                          cl_bands, cl_seed, cl_k, cl_dec, cl_strategy, cl_ek,
                          cl_prefix, cl_out, *classify);
    }
    if (report->parsed()) return cmd_report(rp_results, rp_out);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

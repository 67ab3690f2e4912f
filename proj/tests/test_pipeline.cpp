#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "eegpipe/pipeline.hpp"
#include "eegpipe/synth.hpp"

using namespace eegpipe;
namespace fs = std::filesystem;

namespace {

fs::path make_data_dir(const std::string& name, const std::string& preset,
                       int subjects) {
  const fs::path root = fs::temp_directory_path() / ("eegpipe_pipe_" + name);
  fs::remove_all(root);
  for (int s = 0; s < subjects; ++s) {
    const std::string id = "s0" + std::to_string(s + 1);
    const SessionPair pair = generate_preset_pair(preset, 50 + s, id);
    save_recording(pair.two_d, root / id / "2d");
    save_recording(pair.three_d, root / id / "3d");
  }
  return root;
}

}  // namespace

TEST_CASE("discover_subjects finds sorted subject pairs") {
  const fs::path root = make_data_dir("discover", "null", 2);
  fs::create_directories(root / "notes");  // ignored: no manifests

  const std::vector<SubjectPaths> subjects = discover_subjects(root);
  REQUIRE(subjects.size() == 2);
  CHECK(subjects[0].subject_id == "s01");
  CHECK(subjects[1].subject_id == "s02");

  const SubjectData data = load_subject(subjects[0]);
  CHECK(data.two_d.condition == Condition::TwoD);
  CHECK(data.three_d.condition == Condition::ThreeD);

  CHECK_THROWS_AS(discover_subjects(root / "missing"), DataError);
  fs::remove_all(root / "s01");
  fs::remove_all(root / "s02");
  CHECK_THROWS_AS(discover_subjects(root), DataError);
}

TEST_CASE("band selection pipeline recovers the injected stage III shifts") {
  const fs::path root = make_data_dir("bandsel", "stage3-paper-like", 2);
  std::vector<SubjectData> subjects;
  for (const SubjectPaths& p : discover_subjects(root)) {
    subjects.push_back(load_subject(p));
  }

  BandSelectConfig cfg;
  cfg.stage = ComparisonStage::III;
  cfg.decimation = 8;
  const BandSelectResult result = run_band_selection(subjects, cfg);

  CHECK(result.report.selected() ==
        std::vector<Band>{Band::Delta, Band::Alpha});
  CHECK(result.per_subject.size() == 2);
  CHECK(result.average.values.rows() == 20);
  CHECK(result.average.values.cols() == 5);

  // The average matrix is the mean of the per-subject matrices.
  Eigen::MatrixXd mean = (result.per_subject[0].values +
                          result.per_subject[1].values) /
                         2.0;
  CHECK((mean - result.average.values).cwiseAbs().maxCoeff() < 1e-12);

  // JSON report carries stage, selection and per-band channels.
  const nlohmann::json doc =
      nlohmann::json::parse(band_select_to_json(result));
  CHECK(doc["stage"] == "III");
  CHECK(doc["selected"].size() == 2);
  CHECK(doc["bands"]["delta"]["dominant"].get<bool>());
  CHECK(doc["bands"]["delta"]["meaningful"].size() == 6);

  // CSV export: header + 20 channel rows.
  const fs::path csv = root / "diff.csv";
  write_diff_matrix_csv(result.average, csv);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "channel,delta,theta,alpha,beta,gamma");
  long rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 20);
}

TEST_CASE("classification pipeline summarizes per-subject searches") {
  const fs::path root = make_data_dir("classify", "stage3-paper-like", 1);
  std::vector<SubjectData> subjects;
  for (const SubjectPaths& p : discover_subjects(root)) {
    subjects.push_back(load_subject(p));
  }

  ClassifyConfig cfg;
  cfg.feature = FeatureKind::Dwt;
  cfg.classifier = ClassifierKind::Svm;
  cfg.seed = 6;
  cfg.max_prefix = 6;  // keep the test quick
  const ClassifyRunResult result = run_classification(subjects, cfg);

  CHECK(result.subjects.size() == 1);
  CHECK(result.channels.size() == 20);
  CHECK(result.mean_channel_accuracy.size() == 20);
  CHECK(result.subjects[0].search.combos.size() == 6);
  CHECK(result.mean_best_accuracy > 0.8);

  const nlohmann::json doc = nlohmann::json::parse(classify_to_json(result));
  CHECK(doc["feature"] == "dwt");
  CHECK(doc["classifier"] == "svm");
  CHECK(doc["subjects"].size() == 1);
  CHECK(doc["subjects"][0]["per_channel"].size() == 20);
  CHECK(doc["subjects"][0]["ranking"].size() == 20);
  CHECK(doc["mean_channel_accuracy"].size() == 20);
}

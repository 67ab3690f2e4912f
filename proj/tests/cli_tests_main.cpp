// Integration checks for the eegpipe command-line tool. The binary path
// arrives as argv[1] from ctest.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::string g_cli;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const fs::path out_file =
      fs::temp_directory_path() / "eegpipe_cli_test_output.txt";
  const std::string cmd =
      g_cli + " " + args + " > " + out_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_file);
  std::stringstream buf;
  buf << in.rdbuf();
  result.output = buf.str();
  return result;
}

void check(bool ok, const std::string& what) {
  if (ok) {
    std::printf("ok   - %s\n", what.c_str());
  } else {
    std::printf("FAIL - %s\n", what.c_str());
    ++g_failures;
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_tests <path-to-eegpipe>\n");
    return 2;
  }
  g_cli = argv[1];

  const fs::path work = fs::temp_directory_path() / "eegpipe_cli_tests";
  fs::remove_all(work);
  fs::create_directories(work);

  {
    const RunResult r = run("--help");
    check(r.exit_code == 0, "--help exits 0");
    check(r.output.find("bandselect") != std::string::npos,
          "--help lists subcommands");
  }
  {
    const RunResult r = run("bandselect --help");
    check(r.exit_code == 0, "bandselect --help exits 0");
    check(r.output.find("512") != std::string::npos &&
              r.output.find("order-3") != std::string::npos,
          "bandselect help documents the 512-sample window and filter order");
  }
  {
    const RunResult r = run("classify --help");
    check(r.output.find("K=10") != std::string::npos ||
              r.output.find("k-fold") != std::string::npos,
          "classify help documents the CV folds");
    check(r.output.find("4 s") != std::string::npos,
          "classify help documents the epoch length");
  }
  {
    const RunResult r = run("synth --preset does-not-exist -o " +
                            (work / "x").string());
    check(r.exit_code == 2, "unknown preset exits 2");
    check(r.output.find("stage3-paper-like") != std::string::npos,
          "unknown preset lists available presets");
  }
  {
    const RunResult r = run("bandselect --data " + (work / "nope").string() +
                            " -o " + (work / "o").string());
    check(r.exit_code == 3, "missing data directory exits 3");
    check(r.output.find((work / "nope").string()) != std::string::npos,
          "missing data error names the path");
  }
  {
    const RunResult r = run("report --results " + (work / "empty").string());
    check(r.exit_code == 3, "report on a missing directory exits 3");
    fs::create_directories(work / "empty");
    const RunResult r2 = run("report --results " + (work / "empty").string());
    check(r2.exit_code == 3, "report on an empty directory exits 3");
  }

  // A small end-to-end run: synth -> ingest-check -> bandselect -> classify.
  const fs::path data = work / "data";
  {
    const RunResult r = run("synth --preset null --seed 5 --subjects 1 -o " +
                            data.string());
    check(r.exit_code == 0, "synth null preset exits 0");
    check(fs::exists(data / "s01" / "2d" / "manifest.json"),
          "synth writes the 2d manifest");
    check(fs::exists(data / "s01" / "3d" / "trial_14.csv"),
          "synth writes 15 trial files");
  }
  {
    const RunResult r =
        run("ingest-check " + (data / "s01" / "2d" / "manifest.json").string());
    check(r.exit_code == 0, "ingest-check accepts a generated session");
    check(r.output.find("OK") != std::string::npos, "ingest-check reports OK");
  }
  {
    const RunResult r =
        run("bandselect --data " + data.string() + " --stage III " +
            "--decimation 8 -o " + (work / "bs").string());
    check(r.exit_code == 0, "bandselect exits 0");
    check(fs::exists(work / "bs" / "bandselect_III.json"),
          "bandselect writes the stage III report");
    check(r.output.find("(none)") != std::string::npos,
          "null data selects no dominant bands");
  }
  {
    const RunResult r = run(
        "classify --data " + data.string() +
        " --features dwt --classifiers plsr --seed 2 --max-prefix 3 -o " +
        (work / "cl").string());
    check(r.exit_code == 0, "classify exits 0");
    check(fs::exists(work / "cl" / "classify_dwt_plsr.json"),
          "classify writes its JSON report");
  }
  {
    fs::copy(work / "bs" / "bandselect_III.json",
             work / "cl" / "bandselect_III.json");
    fs::copy(work / "bs" / "diff_III_avg.csv", work / "cl" / "diff_III_avg.csv");
    const RunResult r = run("report --results " + (work / "cl").string() +
                            " -o " + (work / "rep").string());
    check(r.exit_code == 0, "report exits 0");
    check(fs::exists(work / "rep" / "summary.txt"), "report writes summary.txt");
    check(fs::exists(work / "rep" / "fig07_avg_psd_diff_stageIII.csv"),
          "report writes the stage III figure CSV");
  }

  // Determinism: a config-file driven rerun reproduces bandselect output.
  {
    const fs::path cfg = work / "config.json";
    std::ofstream out(cfg);
    out << "{\"data\": \"" << data.string() << "\", \"stage\": \"III\", "
        << "\"decimation\": 8, \"out\": \"" << (work / "bs2").string()
        << "\"}\n";
    out.close();
    const RunResult r = run("bandselect --config " + cfg.string());
    check(r.exit_code == 0, "bandselect runs from a JSON config");
    check(slurp(work / "bs2" / "bandselect_III.json") ==
              slurp(work / "bs" / "bandselect_III.json"),
          "config-driven rerun is byte-identical");
  }

  if (g_failures > 0) {
    std::printf("%d CLI check(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all CLI checks passed\n");
  return 0;
}

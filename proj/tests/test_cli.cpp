#include <doctest.h>

#include <json.hpp>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "gam.hpp"
#include "temp_dir.hpp"

using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

CliResult run_cli(const testutil::TempDir& dir, const std::string& args) {
  std::string out_path = dir.file("cli_stdout.txt");
  std::string err_path = dir.file("cli_stderr.txt");
  std::string cmd = std::string("'") + CITEQUAL_CLI_PATH + "' " + args + " > '" + out_path +
                    "' 2> '" + err_path + "'";
  int raw = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  f << content;
}

// stdout of a successful command is exactly one JSON status line
json status_line(const CliResult& r) {
  REQUIRE(r.exit_code == 0);
  REQUIRE(count_lines(r.out) == 1);
  return json::parse(r.out);
}

const char* kArnetminerFixture =
    "#index p1\n"
    "#t 2001\n"
    "#c VLDB\n"
    "\n"
    "#index p2\n"
    "#t 2003\n"
    "#c SIGMOD\n"
    "#%p1\n"
    "\n";

}  // namespace

TEST_CASE("ingest converts arnetminer blocks to canonical lines") {
  testutil::TempDir dir;
  write_file(dir.file("raw.txt"), kArnetminerFixture);
  std::string out = dir.file("corpus.jsonl");
  CliResult r = run_cli(dir, "ingest '" + dir.file("raw.txt") + "' --format arnetminer --out '" +
                                 out + "'");
  json status = status_line(r);
  CHECK(status.at("command") == "ingest");
  CHECK(status.at("papers") == 2);
  CHECK(status.at("dangling_references") == 0);

  std::string text = slurp(out);
  CHECK(count_lines(text) == 2);
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  json p1 = json::parse(line);
  CHECK(p1.at("id") == "p1");
  CHECK(p1.at("year") == 2001);
  CHECK(p1.at("venue") == "VLDB");
  std::getline(lines, line);
  CHECK(json::parse(line).at("references") == json::array({"p1"}));
}

TEST_CASE("ingest of canonical output is idempotent") {
  testutil::TempDir dir;
  write_file(dir.file("raw.txt"), kArnetminerFixture);
  CliResult first = run_cli(dir, "ingest '" + dir.file("raw.txt") +
                                     "' --format arnetminer --out '" + dir.file("a.jsonl") + "'");
  REQUIRE(first.exit_code == 0);
  CliResult second = run_cli(dir, "ingest '" + dir.file("a.jsonl") + "' --format jsonl --out '" +
                                      dir.file("b.jsonl") + "'");
  REQUIRE(second.exit_code == 0);
  CHECK(slurp(dir.file("a.jsonl")) == slurp(dir.file("b.jsonl")));

  // "canonical" is an accepted alias for the jsonl format
  CliResult aliased = run_cli(dir, "ingest '" + dir.file("a.jsonl") +
                                       "' --format canonical --out '" + dir.file("c.jsonl") + "'");
  REQUIRE(aliased.exit_code == 0);
  CHECK(slurp(dir.file("a.jsonl")) == slurp(dir.file("c.jsonl")));
}

TEST_CASE("usage errors exit 2 before any work happens") {
  testutil::TempDir dir;
  write_file(dir.file("raw.txt"), kArnetminerFixture);

  CliResult bad_format =
      run_cli(dir, "ingest '" + dir.file("raw.txt") + "' --format parquet");
  CHECK(bad_format.exit_code == 2);

  CliResult missing_input = run_cli(dir, "ingest '" + dir.file("nope.txt") + "'");
  CHECK(missing_input.exit_code == 2);

  CliResult no_subcommand = run_cli(dir, "");
  CHECK(no_subcommand.exit_code == 2);

  CliResult missing_seed = run_cli(dir, "synth --n 10");
  CHECK(missing_seed.exit_code == 2);
  CHECK(missing_seed.err.find("seed") != std::string::npos);

  CliResult help = run_cli(dir, "--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("ingest") != std::string::npos);
}

TEST_CASE("synth is seed deterministic") {
  testutil::TempDir dir;
  CliResult a = run_cli(dir, "synth --n 500 --seed 1 --out '" + dir.file("a.jsonl") + "'");
  json status = status_line(a);
  CHECK(status.at("papers") == 500);
  CliResult b = run_cli(dir, "synth --n 500 --seed 1 --out '" + dir.file("b.jsonl") + "'");
  REQUIRE(b.exit_code == 0);
  CHECK(slurp(dir.file("a.jsonl")) == slurp(dir.file("b.jsonl")));
  CHECK(count_lines(slurp(dir.file("a.jsonl"))) == 500);

  CliResult c = run_cli(dir, "synth --n 500 --seed 2 --out '" + dir.file("c.jsonl") + "'");
  REQUIRE(c.exit_code == 0);
  CHECK(slurp(dir.file("a.jsonl")) != slurp(dir.file("c.jsonl")));

  CliResult with_latents = run_cli(dir, "synth --n 50 --seed 9 --out '" + dir.file("d.jsonl") +
                                            "' --latents '" + dir.file("latents.csv") + "'");
  REQUIRE(with_latents.exit_code == 0);
  std::string latents = slurp(dir.file("latents.csv"));
  CHECK(latents.rfind("paper_id,quality\n", 0) == 0);
  CHECK(count_lines(latents) == 51);
}

TEST_CASE("features command writes the cutoff table") {
  testutil::TempDir dir;
  REQUIRE(run_cli(dir, "synth --n 300 --seed 4 --year-min 1990 --year-max 2012 --out '" +
                           dir.file("corpus.jsonl") + "'")
              .exit_code == 0);
  CliResult r = run_cli(dir, "features --in '" + dir.file("corpus.jsonl") +
                                 "' --as-of 2005 --out '" + dir.file("features.csv") + "'");
  json status = status_line(r);
  CHECK(status.at("command") == "features");
  std::string csv = slurp(dir.file("features.csv"));
  CHECK(csv.rfind("paper_id,as_of_year,diversity,timeliness,saliency,flags\n", 0) == 0);
  CHECK(count_lines(csv) == status.at("rows").get<std::size_t>() + 1);

  CliResult narrow = run_cli(dir, "features --in '" + dir.file("corpus.jsonl") +
                                      "' --as-of 2005 --ids S000001,S000002 --out '" +
                                      dir.file("two.csv") + "'");
  REQUIRE(narrow.exit_code == 0);
  CHECK(count_lines(slurp(dir.file("two.csv"))) == 3);
}

TEST_CASE("train and pdp agree with an in-process replay") {
  testutil::TempDir dir;
  REQUIRE(run_cli(dir, "synth --n 400 --seed 12 --out '" + dir.file("corpus.jsonl") + "'")
              .exit_code == 0);
  std::string model_path = dir.file("model.json");
  CliResult trained =
      run_cli(dir, "train --in '" + dir.file("corpus.jsonl") + "' --window 5 --seed 3 " +
                       "--no-interactions --lambda-grid 0.01,1,100 --out-model '" + model_path +
                       "' --out-report '" + dir.file("report.json") + "'");
  json status = status_line(trained);
  CHECK(status.at("window") == 5);
  CHECK(status.at("pearson_r").is_number());

  json report = json::parse(slurp(dir.file("report.json")));
  CHECK(report.at("windows").at(0).at("lambda").get<double>() ==
        status.at("lambda").get<double>());

  CliResult pdp = run_cli(dir, "pdp --model '" + model_path +
                                   "' --feature timeliness --grid 40 --out '" +
                                   dir.file("pdp.csv") + "'");
  REQUIRE(pdp.exit_code == 0);
  std::string csv = slurp(dir.file("pdp.csv"));
  REQUIRE(count_lines(csv) == 41);

  // replay the same grid directly against the saved model
  citequal::GamModel model = citequal::load_model(model_path);
  Eigen::Index col = model.training_features.column("timeliness");
  double lo = model.training_features.values.col(col).minCoeff();
  double hi = model.training_features.values.col(col).maxCoeff();
  std::vector<double> grid;
  for (int i = 0; i < 40; ++i) grid.push_back(lo + (hi - lo) * i / 39.0);
  std::vector<citequal::PdpPoint> expect =
      citequal::partial_dependence(model, model.training_features, "timeliness", grid);

  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "feature,grid_value,pd_value");
  for (std::size_t i = 0; i < expect.size(); ++i) {
    REQUIRE(std::getline(lines, line));
    std::istringstream fields(line);
    std::string feature, x_text, pd_text;
    std::getline(fields, feature, ',');
    std::getline(fields, x_text, ',');
    std::getline(fields, pd_text, ',');
    CHECK(feature == "timeliness");
    CHECK(std::stod(x_text) == expect[i].x);  // shortest round-trip format
    CHECK(std::stod(pd_text) == expect[i].pd);
  }
}

TEST_CASE("evaluate covers multiple windows and exports predictions") {
  testutil::TempDir dir;
  REQUIRE(run_cli(dir, "synth --n 400 --seed 6 --out '" + dir.file("corpus.jsonl") + "'")
              .exit_code == 0);
  CliResult r = run_cli(dir, "evaluate --in '" + dir.file("corpus.jsonl") +
                                 "' --windows 5,10 --seed 2 --subset TS --no-interactions " +
                                 "--lambda-grid 1 --out-report '" + dir.file("eval.json") +
                                 "' --out-predictions '" + dir.file("pred.csv") + "'");
  json status = status_line(r);
  CHECK(status.at("command") == "evaluate");

  json report = json::parse(slurp(dir.file("eval.json")));
  CHECK(report.at("subset") == "T+S");
  REQUIRE(report.at("windows").size() == 2);
  std::string csv = slurp(dir.file("pred.csv"));
  CHECK(csv.rfind("paper_id,window,y_true,y_pred\n", 0) == 0);
  std::size_t n_val = report.at("windows").at(0).at("n_val").get<std::size_t>() +
                      report.at("windows").at(1).at("n_val").get<std::size_t>();
  CHECK(count_lines(csv) == 1 + n_val);

  // a window no paper is old enough for is a runtime failure, not usage
  CliResult domain = run_cli(dir, "evaluate --in '" + dir.file("corpus.jsonl") +
                                      "' --windows 80 --seed 2");
  CHECK(domain.exit_code == 1);
  CHECK(domain.err.find("window 80") != std::string::npos);
}

TEST_CASE("ablate writes the three study tables") {
  testutil::TempDir dir;
  REQUIRE(run_cli(dir, "synth --n 300 --seed 8 --out '" + dir.file("corpus.jsonl") + "'")
              .exit_code == 0);
  CliResult r = run_cli(dir, "ablate --in '" + dir.file("corpus.jsonl") +
                                 "' --subsets TS,DTS --windows 5 --runs 3 --seed 7 " +
                                 "--no-interactions --lambda-grid 1 --out-dir '" +
                                 dir.path().string() + "'");
  json status = status_line(r);
  CHECK(status.at("command") == "ablate");
  CHECK(status.at("runs") == 3);
  CHECK(status.at("seed") == 7);

  std::string cells = slurp(dir.file("cells.csv"));
  CHECK(cells.rfind("subset,window,metric,mean,sd,n_runs\n", 0) == 0);
  CHECK(count_lines(cells) == 1 + 4);  // 2 subsets x 1 window x 2 metrics

  std::string samples = slurp(dir.file("samples.csv"));
  CHECK(samples.rfind("subset,window,metric,run,seed,value\n", 0) == 0);
  CHECK(count_lines(samples) == 1 + 12);  // cells x 3 runs
  CHECK(samples.find("T+S,5,pearson,0,7,") != std::string::npos);
  CHECK(samples.find("T+S,5,pearson,2,9,") != std::string::npos);

  std::string pairwise = slurp(dir.file("pairwise.csv"));
  CHECK(pairwise.rfind("subset_a,subset_b,window,metric,", 0) == 0);
  CHECK(count_lines(pairwise) == 1 + 2);  // 1 pair x 1 window x 2 metrics
}

TEST_CASE("config files supply defaults that flags override") {
  testutil::TempDir dir;
  REQUIRE(run_cli(dir, "synth --n 300 --seed 5 --out '" + dir.file("corpus.jsonl") + "'")
              .exit_code == 0);
  json config = {{"corpus", dir.file("corpus.jsonl")},
                 {"format", "jsonl"},
                 {"seed", 11},
                 {"windows", {5}},
                 {"gam", {{"include_interactions", false}, {"lambda_grid", {1.0}}}}};
  write_file(dir.file("config.json"), config.dump());

  CliResult from_config = run_cli(dir, "evaluate --config '" + dir.file("config.json") +
                                           "' --out-report '" + dir.file("a.json") + "'");
  REQUIRE(from_config.exit_code == 0);
  json a = json::parse(slurp(dir.file("a.json")));
  CHECK(a.at("split").at("seed") == 11);
  REQUIRE(a.at("windows").size() == 1);
  CHECK(a.at("windows").at(0).at("window_years") == 5);

  // flags win over config values
  CliResult overridden = run_cli(dir, "evaluate --config '" + dir.file("config.json") +
                                          "' --seed 12 --windows 10 --out-report '" +
                                          dir.file("b.json") + "'");
  REQUIRE(overridden.exit_code == 0);
  json b = json::parse(slurp(dir.file("b.json")));
  CHECK(b.at("split").at("seed") == 12);
  CHECK(b.at("windows").at(0).at("window_years") == 10);

  // config alone must still provide everything required
  json incomplete = {{"corpus", dir.file("corpus.jsonl")}, {"windows", {5}}};
  write_file(dir.file("noseed.json"), incomplete.dump());
  CliResult missing = run_cli(dir, "evaluate --config '" + dir.file("noseed.json") + "'");
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("seed") != std::string::npos);
}

TEST_CASE("failures keep stdout machine readable") {
  testutil::TempDir dir;
  REQUIRE(run_cli(dir, "synth --n 50 --seed 5 --year-min 2000 --year-max 2004 --out '" +
                           dir.file("tiny.jsonl") + "'")
              .exit_code == 0);
  CliResult r = run_cli(dir, "train --in '" + dir.file("tiny.jsonl") + "' --window 20 --seed 1");
  CHECK(r.exit_code == 1);
  REQUIRE(count_lines(r.out) == 1);
  json status = json::parse(r.out);
  CHECK(status.at("command") == "train");
  CHECK(status.at("status") == "error");
  CHECK(status.at("kind") == "domain");
  CHECK(status.at("message").get<std::string>().find("window 20") != std::string::npos);
  CHECK(r.err.find("error:") != std::string::npos);
}

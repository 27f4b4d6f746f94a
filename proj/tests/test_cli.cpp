#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "idsforge/csv.hpp"
#include "idsforge/featsel.hpp"
#include "support.hpp"

using namespace idsforge;
using doctest::Approx;
using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("idsforge_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "idsforge");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::string& path) { return Json::parse(read_file(path)); }

// Writes a dataset as a raw labelled CSV suitable for `preprocess`.
void write_raw(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  for (std::size_t j = 0; j < ds.n_features(); ++j) out << "f" << j << ",";
  out << "label\n";
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (double v : ds.row(r)) out << csv::format_double(v) << ",";
    out << ds.class_names()[ds.label(r)] << "\n";
  }
}

std::string prepared(const TempDir& tmp, const Dataset& ds) {
  write_raw(ds, tmp / "raw.csv");
  const auto r = run({"preprocess", "-i", tmp / "raw.csv", "-o", tmp / "prep"});
  REQUIRE(r.code == 0);
  return tmp / "prep/dataset.csv";
}

}  // namespace

TEST_CASE("help and version exit cleanly") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"evaluate", "--help"}).code == 0);
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
}

TEST_CASE("preprocess writes dataset, sidecar and report") {
  TempDir tmp;
  write_file(tmp / "toy.csv",
             "proto,bytes,flag,const,label\n"
             "tcp,10,SF,7,normal\n"
             "udp,20,REJ,7,attack\n"
             "tcp,30,SF,7,normal\n"
             "icmp,,S0,7,attack\n"
             "udp,Infinity,SF,7,normal\n");
  const auto r = run({"preprocess", "-i", tmp / "toy.csv", "-o", tmp / "out", "--normal-class", "normal"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("constant") != std::string::npos);

  const Json meta = read_json(tmp / "out/dataset.json");
  REQUIRE(meta["features"].size() == 3);
  CHECK(meta["features"][0]["name"] == "proto");
  CHECK(meta["features"][0]["kind"] == "symbolic");
  CHECK(meta["features"][0]["symbols"] == Json::array({"tcp", "udp", "icmp"}));
  CHECK(meta["features"][1]["name"] == "bytes");
  CHECK(meta["features"][1]["kind"] == "numeric");
  CHECK(meta["features"][1]["observed_min"].get<double>() == 0.0);
  CHECK(meta["features"][1]["observed_max"].get<double>() == 30.0);
  CHECK(meta["normal_class"] == "normal");

  const Json report = read_json(tmp / "out/preprocess_report.json");
  CHECK(report["dropped_constant_features"] == Json::array({"const"}));
  CHECK(report["features"] == 3);
  CHECK(report["normal_class"] == "normal");

  const Dataset ds = read_dataset(tmp / "out/dataset.csv", tmp / "out/dataset.json");
  CHECK(report["missing_replaced"] == 1);
  CHECK(report["nonfinite_replaced"] == 1);
  CHECK(report["rows_out"] == 5);
  CHECK(ds.rows() == 5);
  for (std::size_t r2 = 0; r2 < ds.rows(); ++r2) {
    for (double v : ds.row(r2)) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("preprocess label column by name or index") {
  TempDir tmp;
  write_file(tmp / "t.csv", "cls,a,b\nx,1,2\ny,2,1\nx,3,5\ny,4,0\n");
  REQUIRE(run({"preprocess", "-i", tmp / "t.csv", "-o", tmp / "a", "--label-column", "cls"}).code == 0);
  REQUIRE(run({"preprocess", "-i", tmp / "t.csv", "-o", tmp / "b", "--label-column", "0"}).code == 0);
  CHECK(read_file(tmp / "a/dataset.csv") == read_file(tmp / "b/dataset.csv"));
  CHECK(read_json(tmp / "a/dataset.json")["features"].size() == 2);
  CHECK(run({"preprocess", "-i", tmp / "t.csv", "-o", tmp / "c", "--label-column", "nope"}).code == 2);
  CHECK(run({"preprocess", "-i", tmp / "t.csv", "-o", tmp / "c", "--label-column", "9"}).code == 2);
}

TEST_CASE("select by information gain keeps the top features in rank order") {
  TempDir tmp;
  const auto input = prepared(tmp, testing::mixed_relevance(400, 14, 2));
  const auto r = run({"select", "-i", input, "-o", tmp / "sel", "--selector", "ig", "--top", "10"});
  REQUIRE(r.code == 0);
  const Json j = read_json(tmp / "sel/subset.json");
  REQUIRE(j["selected"].size() == 10);

  const Dataset ds = read_dataset(input, tmp / "prep/dataset.json");
  const auto ranked = ig_rank(ds);
  std::string expected;
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(j["selected"][i].get<std::size_t>() == ranked[i].index);
    expected += (i ? "," : "") + std::to_string(ranked[i].index);
  }
  CHECK(read_file(tmp / "sel/subset.txt") == expected + "\n");
  CHECK(run({"select", "-i", input, "-o", tmp / "bad", "--selector", "ig", "--top", "99"}).code == 2);
}

TEST_CASE("bat selection is reproducible for a fixed seed") {
  TempDir tmp;
  const auto input = prepared(tmp, testing::mixed_relevance(300, 10, 4));
  const std::vector<std::string> args = {"select", "-i", input, "--seed", "17", "--iterations", "30"};
  auto a = args, b = args;
  a.insert(a.end(), {"-o", tmp / "s1"});
  b.insert(b.end(), {"-o", tmp / "s2", "--threads", "3"});
  REQUIRE(run(a).code == 0);
  REQUIRE(run(b).code == 0);
  Json j1 = read_json(tmp / "s1/subset.json");
  Json j2 = read_json(tmp / "s2/subset.json");
  j1.erase("seconds");
  j2.erase("seconds");
  CHECK(j1.dump() == j2.dump());
  CHECK(j1["selector"] == "cfs-ba");
  CHECK(read_file(tmp / "s1/subset.txt") == read_file(tmp / "s2/subset.txt"));
}

TEST_CASE("list selector reads a subset file") {
  TempDir tmp;
  const auto input = prepared(tmp, testing::mixed_relevance(200, 6, 8));
  write_file(tmp / "subset.txt", "4,1\n");
  REQUIRE(run({"select", "-i", input, "-o", tmp / "s", "--selector", "list", "--subset", tmp / "subset.txt"}).code == 0);
  CHECK(read_json(tmp / "s/subset.json")["selected"] == Json::array({4, 1}));
  REQUIRE(run({"select", "-i", input, "-o", tmp / "n", "--selector", "list", "--features", "f2,f5"}).code == 0);
  CHECK(read_json(tmp / "n/subset.json")["names"] == Json::array({"f2", "f5"}));
  CHECK(run({"select", "-i", input, "-o", tmp / "x", "--selector", "list"}).code == 2);
  CHECK(run({"select", "-i", input, "-o", tmp / "x", "--selector", "list", "--features", "f99"}).code == 2);
}

TEST_CASE("evaluate on a label leak reaches perfect ensemble accuracy") {
  TempDir tmp;
  const auto input = prepared(tmp, testing::label_leak(300, 6, 3, 5));
  const auto r = run({"evaluate", "-i", input, "-o", tmp / "ev", "--k", "5", "--trees", "10"});
  REQUIRE(r.code == 0);
  const Json rep = read_json(tmp / "ev/report.json");
  REQUIRE(rep["classifiers"].size() == 3);
  CHECK(rep["classifiers"][0]["name"] == "c45");
  CHECK(rep["classifiers"][1]["name"] == "rf");
  CHECK(rep["classifiers"][2]["name"] == "forest-pa");
  REQUIRE(rep["ensembles"].size() == 1);
  CHECK(rep["ensembles"][0]["rule"] == "average-of-probabilities");
  CHECK(rep["ensembles"][0]["metrics"]["accuracy"].get<double>() == 1.0);
  CHECK(rep["tool"] == "idsforge");
  CHECK(rep["dataset"]["rows"] == 300);
  CHECK(rep["config"]["k"] == 5);
  CHECK(fs::exists(tmp / "ev/confusion_c45.csv"));
  CHECK(fs::exists(tmp / "ev/confusion_ensemble_average-of-probabilities.csv"));
  CHECK(read_file(tmp / "ev/confusion_c45.csv").rfind("true\\predicted,", 0) == 0);
}

TEST_CASE("evaluate with every rule and a selection step") {
  TempDir tmp;
  const auto input = prepared(tmp, testing::separable(200, 5, 6));
  const auto r = run({"evaluate", "-i", input, "-o", tmp / "ev", "--k", "4", "--trees", "5", "--rule", "all",
                      "--classifiers", "c45,rf", "--selector", "igr", "--top", "3", "--adr-mode", "binary"});
  REQUIRE(r.code == 0);
  const Json rep = read_json(tmp / "ev/report.json");
  CHECK(rep["classifiers"].size() == 2);
  REQUIRE(rep["ensembles"].size() == 5);
  for (const auto& e : rep["ensembles"]) CHECK(fs::exists(tmp / ("ev/confusion_ensemble_" + e["rule"].get<std::string>() + ".csv")));
  CHECK(rep["selection"]["selected"].size() == 3);

  CHECK(run({"evaluate", "-i", input, "-o", tmp / "x", "--rule", "median"}).code == 2);
  CHECK(run({"evaluate", "-i", input, "-o", tmp / "x", "--classifiers", "svm"}).code == 2);
  CHECK(run({"evaluate", "-i", input, "-o", tmp / "x", "--k", "1"}).code == 2);
  CHECK(run({"evaluate", "-i", input, "-o", tmp / "x", "--adr-mode", "fuzzy"}).code == 2);
}

TEST_CASE("evaluate requires a prepared dataset") {
  TempDir tmp;
  write_file(tmp / "raw.csv", "a,label\n1,x\n2,y\n");
  CHECK(run({"evaluate", "-i", tmp / "raw.csv", "-o", tmp / "ev"}).code == 2);
  CHECK(run({"evaluate", "-i", tmp / "missing.csv", "-o", tmp / "ev"}).code == 2);
  CHECK(run({"evaluate", "-i", tmp / "raw.csv"}).code == 2);
}

TEST_CASE("stats on identical columns gives a zero statistic") {
  TempDir tmp;
  write_file(tmp / "t.csv", "dataset,A,B,C\nd1,0.9,0.9,0.9\nd2,0.8,0.8,0.8\nd3,0.7,0.7,0.7\n");
  REQUIRE(run({"stats", "-i", tmp / "t.csv", "-o", tmp / "st"}).code == 0);
  const Json j = read_json(tmp / "st/stats.json");
  CHECK(j["friedman"]["chi2_f"].get<double>() == Approx(0.0));
  CHECK(j["friedman"]["mean_ranks"] == Json::array({2.0, 2.0, 2.0}));
}

TEST_CASE("stats on two algorithms with a consistent winner") {
  TempDir tmp;
  write_file(tmp / "t.csv", "dataset,A,B\nd1,0.9,0.8\nd2,0.95,0.7\nd3,0.6,0.5\n");
  REQUIRE(run({"stats", "-i", tmp / "t.csv", "-o", tmp / "st"}).code == 0);
  const Json j = read_json(tmp / "st/stats.json");
  CHECK(j["friedman"]["chi2_f"].get<double>() == Approx(3.0).epsilon(1e-12));
  CHECK(j["friedman"]["f_statistic"].is_null());
  CHECK(j["friedman"]["f_statistic_infinite"] == true);
  CHECK(j["ranks"][0] == Json::array({1.0, 2.0}));

  REQUIRE(run({"stats", "-i", tmp / "t.csv", "-o", tmp / "lo", "--lower-is-better"}).code == 0);
  CHECK(read_json(tmp / "lo/stats.json")["ranks"][0] == Json::array({2.0, 1.0}));
}

TEST_CASE("stats from published mean ranks") {
  TempDir tmp;
  write_file(tmp / "m.csv",
             "Voting,Stacking,AdaBoost,GBM,kNN,CART,MLP\n"
             "1.667,3.133,3.867,2.067,5.467,4.867,6.933\n");
  const auto r = run({"stats", "-i", tmp / "m.csv", "-o", tmp / "st", "--mean-ranks", "--datasets", "3", "--alpha",
                      "0.05,0.1"});
  REQUIRE(r.code == 0);
  const Json j = read_json(tmp / "st/stats.json");
  CHECK(j["friedman"]["f_statistic"].get<double>() == Approx(6.5665).epsilon(0.005 / 6.5665));
  CHECK(j["friedman"]["p_value"].get<double>() == Approx(0.0029).epsilon(0.002 / 0.0029));
  REQUIRE(j["nemenyi"].size() == 2);
  CHECK(j["nemenyi"][0]["cd"].get<double>() == Approx(5.201547).epsilon(1e-6));
  CHECK(fs::exists(tmp / "st/cd.txt"));
  CHECK(run({"stats", "-i", tmp / "m.csv", "-o", tmp / "x", "--mean-ranks"}).code == 2);
}

TEST_CASE("stats input errors") {
  TempDir tmp;
  write_file(tmp / "one.csv", "dataset,A\nd1,0.9\nd2,0.8\n");
  CHECK(run({"stats", "-i", tmp / "one.csv", "-o", tmp / "x"}).code == 2);
  write_file(tmp / "bad.csv", "dataset,A,B\nd1,0.9,zz\nd2,0.8,0.1\n");
  CHECK(run({"stats", "-i", tmp / "bad.csv", "-o", tmp / "x"}).code == 2);
  write_file(tmp / "ok.csv", "dataset,A,B\nd1,0.9,0.1\nd2,0.8,0.1\n");
  CHECK(run({"stats", "-i", tmp / "ok.csv", "-o", tmp / "x", "--alpha", "1.5"}).code == 2);
}

TEST_CASE("config file supplies defaults that flags override") {
  TempDir tmp;
  const auto input = prepared(tmp, testing::mixed_relevance(200, 8, 3));
  write_file(tmp / "run.cfg", "# selection\nselector = ig\ntop = 4\n\nbins = 8\n");
  REQUIRE(run({"select", "-i", input, "-o", tmp / "a", "--config", tmp / "run.cfg"}).code == 0);
  CHECK(read_json(tmp / "a/subset.json")["selected"].size() == 4);
  REQUIRE(run({"select", "-i", input, "-o", tmp / "b", "--config", tmp / "run.cfg", "--top", "2"}).code == 0);
  CHECK(read_json(tmp / "b/subset.json")["selected"].size() == 2);

  const auto pairs = cli::read_config(tmp / "run.cfg");
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0] == std::pair<std::string, std::string>{"selector", "ig"});

  write_file(tmp / "bad.cfg", "colour = blue\n");
  CHECK(run({"select", "-i", input, "-o", tmp / "c", "--config", tmp / "bad.cfg"}).code == 2);
  write_file(tmp / "worse.cfg", "no equals sign\n");
  CHECK(run({"select", "-i", input, "-o", tmp / "c", "--config", tmp / "worse.cfg"}).code == 2);
  CHECK(run({"select", "-i", input, "-o", tmp / "c", "--config", tmp / "absent.cfg"}).code == 2);
}

TEST_CASE("error messages go to the error stream") {
  TempDir tmp;
  const auto r = run({"stats", "-i", tmp / "missing.csv", "-o", tmp / "x"});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  CHECK(r.err.find("missing.csv") != std::string::npos);
}

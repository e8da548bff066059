#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "profilernet/io.hpp"

namespace fs = std::filesystem;
using profilernet::io::read_file;
using profilernet::io::write_file;

namespace {

const fs::path kCli = PROFILERNET_CLI;
const fs::path kDataDir = PROFILERNET_DATA_DIR;

struct RunResult {
  int status = 0;
  std::string out;
  std::string err;
};

class Workdir {
 public:
  Workdir() {
    path_ = fs::temp_directory_path() /
            ("profilernet_cli_" + std::to_string(counter_++) + "_" +
             std::to_string(::getpid()));
    fs::create_directories(path_);
  }
  ~Workdir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

RunResult run(const Workdir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = "\"" + kCli.string() + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::string without_line(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) continue;
    out += line + "\n";
  }
  return out;
}

const std::string kThreeNode = (kDataDir / "three_node.net").string();
const std::string kProfiling = (kDataDir / "profiling.net").string();

}  // namespace

TEST_CASE("simulate is byte-for-byte reproducible") {
  Workdir dir;
  const auto a = run(dir, "simulate --network " + q(kProfiling) +
                              " -n 500 --seed 7 --out " + q(dir / "a.csv"));
  REQUIRE(a.status == 0);
  const auto b = run(dir, "simulate --network " + q(kProfiling) +
                              " -n 500 --seed 7 --threads 3 --out " +
                              q(dir / "b.csv"));
  REQUIRE(b.status == 0);
  CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
  CHECK(a.out.find("seed = 7") != std::string::npos);

  const auto c = run(dir, "simulate --network " + q(kProfiling) +
                              " -n 500 --seed 8 --out " + q(dir / "c.csv"));
  REQUIRE(c.status == 0);
  CHECK(read_file(dir / "a.csv") != read_file(dir / "c.csv"));
}

TEST_CASE("simulate with zero cases writes only the header") {
  Workdir dir;
  const auto r = run(dir, "simulate --network " + q(kThreeNode) +
                              " -n 0 --out " + q(dir / "empty.csv"));
  REQUIRE(r.status == 0);
  CHECK(read_file(dir / "empty.csv") == "X1,X2,X3\n");
}

TEST_CASE("a malformed CPT is reported with variable and row") {
  Workdir dir;
  std::string text = read_file(kThreeNode);
  const auto pos = text.find("0.9 0.1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 7, "0.9 0.2");
  write_file(dir / "bad.net", text);
  const auto r = run(dir, "simulate --network " + q(dir / "bad.net") +
                              " -n 5 --out " + q(dir / "x.csv"));
  CHECK(r.status != 0);
  CHECK(r.err.find("'X2'") != std::string::npos);
  CHECK(r.err.find("row 1") != std::string::npos);
  CHECK(r.err.find("bad.net:") != std::string::npos);
}

TEST_CASE("train") {
  Workdir dir;
  REQUIRE(run(dir, "simulate --network " + q(kThreeNode) + " -n 2000 --out " +
                       q(dir / "cases.csv"))
              .status == 0);

  SUBCASE("empty case file is an error") {
    write_file(dir / "empty.csv", "X1,X2,X3\n");
    const auto r = run(dir, "train --cases " + q(dir / "empty.csv") +
                                " --network " + q(kThreeNode) + " --out " +
                                q(dir / "t.net"));
    CHECK(r.status != 0);
    CHECK(r.err.find("profilernet: error:") != std::string::npos);
  }
  SUBCASE("output is deterministic apart from the timestamp") {
    const std::string args = "train --cases " + q(dir / "cases.csv") +
                             " --network " + q(kThreeNode) + " --out ";
    REQUIRE(run(dir, args + q(dir / "a.net")).status == 0);
    REQUIRE(run(dir, args + q(dir / "b.net")).status == 0);
    const auto a = read_file(dir / "a.net");
    CHECK(a.find("meta created ") != std::string::npos);
    CHECK(a.find("meta provenance trained") != std::string::npos);
    CHECK(a.find("meta source_hash fnv1a64:") != std::string::npos);
    CHECK(without_line(a, "meta created") ==
          without_line(read_file(dir / "b.net"), "meta created"));

    REQUIRE(run(dir, args + q(dir / "c.net") + " --no-timestamp").status == 0);
    REQUIRE(run(dir, args + q(dir / "d.net") + " --no-timestamp").status == 0);
    CHECK(read_file(dir / "c.net") == read_file(dir / "d.net"));
    CHECK(read_file(dir / "c.net").find("meta created") == std::string::npos);
  }
  SUBCASE("incremental training through a counts file") {
    REQUIRE(run(dir, "simulate --network " + q(kThreeNode) +
                         " -n 1000 --seed 1 --out " + q(dir / "part1.csv"))
                .status == 0);
    REQUIRE(run(dir, "simulate --network " + q(kThreeNode) +
                         " -n 1000 --seed 2 --out " + q(dir / "part2.csv"))
                .status == 0);
    const std::string both = read_file(dir / "part1.csv") +
                             without_line(read_file(dir / "part2.csv"), "X1,");
    write_file(dir / "both.csv", both);

    const std::string base = " --network " + q(kThreeNode) + " --no-timestamp";
    REQUIRE(run(dir, "train --cases " + q(dir / "part1.csv") + base +
                         " --out " + q(dir / "p1.net") + " --counts-out " +
                         q(dir / "c1.json"))
                .status == 0);
    REQUIRE(run(dir, "train --cases " + q(dir / "part2.csv") + base +
                         " --counts-in " + q(dir / "c1.json") + " --out " +
                         q(dir / "inc.net"))
                .status == 0);
    REQUIRE(run(dir, "train --cases " + q(dir / "both.csv") + base + " --out " +
                         q(dir / "batch.net"))
                .status == 0);
    const auto inc = profilernet::io::load_network(dir / "inc.net");
    const auto batch = profilernet::io::load_network(dir / "batch.net");
    CHECK(inc.cpts == batch.cpts);
  }
}

TEST_CASE("infer") {
  Workdir dir;
  const auto r = run(dir, "infer --network " + q(kThreeNode) + " -e X1=x1_1");
  REQUIRE(r.status == 0);
  CHECK(r.out.find("X2: x2_1=0.2 x2_2=0.8 | predicted x2_2 confidence 0.8") !=
        std::string::npos);

  const auto by_index = run(dir, "infer --network " + q(kThreeNode) +
                                     " -e X1=1 -q X2");
  REQUIRE(by_index.status == 0);
  CHECK(by_index.out ==
        "X2: x2_1=0.2 x2_2=0.8 | predicted x2_2 confidence 0.8\n");

  const auto contradictory = run(dir, "infer --network " + q(kThreeNode) +
                                          " -e X1=x1_1 -e X1=x1_2");
  CHECK(contradictory.status != 0);
  CHECK(contradictory.err.find("contradictory") != std::string::npos);

  const auto unknown = run(dir, "infer --network " + q(kThreeNode) + " -e Q=1");
  CHECK(unknown.status != 0);

  const auto json = run(dir, "infer --network " + q(kThreeNode) +
                                 " -e X1=x1_1 --json");
  REQUIRE(json.status == 0);
  CHECK(json.out.find("\"posteriors\"") != std::string::npos);
}

TEST_CASE("evaluate") {
  Workdir dir;
  REQUIRE(run(dir, "simulate --network " + q(kProfiling) + " -n 1000 --out " +
                       q(dir / "cases.csv"))
              .status == 0);
  const std::string args = "evaluate --network " + q(kProfiling) + " --cases " +
                           q(dir / "cases.csv");
  const auto a = run(dir, args + " --report " + q(dir / "r.txt") + " --json " +
                              q(dir / "r.json"));
  REQUIRE(a.status == 0);
  CHECK(a.out == read_file(dir / "r.txt"));
  CHECK(a.out.find("macro_accuracy") != std::string::npos);
  CHECK(run(dir, args).out == a.out);

  const auto pretrained = run(dir, args + " --pretrained");
  CHECK(pretrained.status == 0);

  const auto bad_split = run(dir, args + " --split 1.5");
  CHECK(bad_split.status != 0);
}

TEST_CASE("usage errors") {
  Workdir dir;
  CHECK(run(dir, "").status != 0);
  CHECK(run(dir, "simulate").status != 0);
  CHECK(run(dir, "infer --network " + q(dir / "absent.net")).status != 0);
}

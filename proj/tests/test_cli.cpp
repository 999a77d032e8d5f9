#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "backtrace_tools/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = backtrace::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Workdir {
 public:
  Workdir() : path_(fs::temp_directory_path() / ("backtrace_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~Workdir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& contents) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << contents;
    return p.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* kShock = R"({"pieces":[],"ext_left":1,"ext_right":0})";
const char* kShockPieces = R"({"pieces":[{"x0":-1,"x1":0,"a":1}],"ext_left":1,"ext_right":0})";
const char* kRise = R"({"pieces":[{"x0":-1,"x1":0,"a":0}],"ext_left":0,"ext_right":1})";

}  // namespace

TEST_CASE("partition of the Riemann shock") {
  Workdir dir;
  const Result r = run({"partition", "--profile", dir.file("w.json", kShockPieces), "--T", "1"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc.at("verdict") == true);
  REQUIRE(doc.at("xii").size() == 1);
  CHECK(doc["xii"][0]["lo"] == -1.0);
  CHECK(doc["xii"][0]["hi"] == 0.0);
  CHECK(doc["xi"][0][0] == "-inf");
  CHECK(doc["xi"].back()[1] == "inf");
}

TEST_CASE("construct then member round trip") {
  Workdir dir;
  const std::string target = dir.file("w.json", kShockPieces);
  const std::string sharp = dir.path("sharp.json");
  REQUIRE(run({"construct", "--kind", "sharp", "--target", target, "--T", "1", "-o", sharp}).code == 0);
  const Result m = run({"member", "--candidate", sharp, "--target", target, "--T", "1", "--mode", "both",
                        "--expect-member"});
  CHECK(m.code == 0);
  CHECK(json::parse(m.out).at("verdict") == true);

  const std::string extremal = dir.path("extremal.json");
  REQUIRE(run({"construct", "--kind", "extremal", "--target", target, "--T", "1", "-o", extremal}).code == 0);
  const json e = json::parse(slurp(extremal));
  CHECK(e.at("schema") == "backtrace/1");
  CHECK(run({"member", "--candidate", extremal, "--target", target, "--T", "1"}).code == 0);
}

TEST_CASE("refuted candidates exit 3 only when membership is expected") {
  Workdir dir;
  const std::string target = dir.file("w.json", kShockPieces);
  const std::string bad = dir.file("u.json", kRise);
  const Result plain = run({"member", "--candidate", bad, "--target", target, "--T", "1"});
  CHECK(plain.code == 0);
  CHECK(json::parse(plain.out).at("verdict") == false);
  CHECK(run({"member", "--candidate", bad, "--target", target, "--T", "1", "--expect-member"}).code == 3);
}

TEST_CASE("inadmissible targets exit 2 with a witness") {
  Workdir dir;
  const Result r = run({"partition", "--profile", dir.file("w.json", kRise), "--T", "1"});
  CHECK(r.code == 2);
  const json doc = json::parse(r.out);
  CHECK(doc.at("verdict") == false);
  CHECK(doc.at("witness").at("margin").get<double>() > 0.0);
}

TEST_CASE("malformed input exits 1 with a location") {
  Workdir dir;
  const Result r = run({"partition", "--profile", dir.file("w.json", "{\"pieces\": [\n"), "--T", "1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK(run({"partition", "--profile", dir.file("e.json", kShock), "--T", "1"}).code == 1);
  CHECK(run({"partition", "--profile", dir.path("missing.json"), "--T", "1"}).code == 1);
  CHECK(run({"nonsense"}).code == 1);
  CHECK(run({"member", "--candidate", dir.file("c.json", kShockPieces)}).code == 1);
}

TEST_CASE("face through the extremal datum exits 4") {
  Workdir dir;
  const std::string target = dir.file("w.json", kShockPieces);
  const std::string extremal = dir.path("extremal.json");
  REQUIRE(run({"construct", "--kind", "extremal", "--target", target, "--T", "1", "-o", extremal}).code == 0);
  CHECK(run({"face", "--candidate", extremal, "--target", target, "--T", "1", "--N", "2", "--out-dir",
             dir.path("face")})
            .code == 4);
}

TEST_CASE("outputs are byte-identical across runs") {
  Workdir dir;
  const std::string target = dir.file("w.json", kShockPieces);
  const std::string sharp = dir.path("sharp.json");
  REQUIRE(run({"construct", "--kind", "sharp", "--target", target, "--T", "1", "-o", sharp}).code == 0);
  for (const char* sub : {"a", "b"}) {
    REQUIRE(run({"face", "--candidate", sharp, "--target", target, "--T", "1", "--N", "3", "--out-dir",
                 dir.path(std::string("face_") + sub)})
                .code == 0);
  }
  for (int k = 0; k <= 3; ++k) {
    const std::string name = "member_" + std::to_string(k) + ".json";
    CHECK(slurp(dir.path("face_a/" + name)) == slurp(dir.path("face_b/" + name)));
  }
  const auto member = [&] {
    return run({"member", "--candidate", sharp, "--target", target, "--T", "1", "--mode", "both"}).out;
  };
  CHECK(member() == member());
}

TEST_CASE("forward evolution and the oracle agree in CSV") {
  Workdir dir;
  const std::string u0 = dir.file("u0.json", kShockPieces);
  const Result cl = run({"evolve", "--profile", u0, "--t", "1", "--grid", "-1:1:0.5", "--out", "csv"});
  REQUIRE(cl.code == 0);
  CHECK(cl.out.rfind("x,value_left,value_right\n", 0) == 0);
  const Result hj = run({"evolve", "--profile", u0, "--t", "1", "--mode", "hj", "--grid", "-1:1:0.5", "--out", "csv"});
  REQUIRE(hj.code == 0);
  CHECK(hj.out.rfind("x,U\n", 0) == 0);
  CHECK(run({"oracle", "--profile", u0, "--T", "0.5", "--dx", "0.01"}).code == 0);
}

TEST_CASE("the installed executable reports the acceptance suite") {
  const std::string cmd = std::string("\"") + BACKTRACE_CLI_PATH + "\" corpus --seed 7 > /dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
}

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

const fs::path& tmp() {
  static const fs::path p = [] {
    const fs::path d = fs::temp_directory_path() / "hitchlab_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Result run(const std::string& args) {
  const auto out = tmp() / "stdout", err = tmp() / "stderr";
  const std::string cmd = std::string(HITCHLAB_BIN) + " " + args + " > " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string path(const std::string& name) { return (tmp() / name).string(); }

}  // namespace

TEST_CASE("construct, validate and enumerate") {
  REQUIRE(run("fuchsian --d 3 --out " + path("f3.json")).code == 0);
  const auto v = run("validate --rep " + path("f3.json"));
  CHECK(v.code == 0);
  CHECK(nlohmann::json::parse(v.out)["ok"] == true);
  REQUIRE(run("bulge --rep " + path("f3.json") + " --t 0.2 --out " + path("b3.json")).code == 0);
  CHECK(run("validate --rep " + path("b3.json")).code == 0);

  REQUIRE(run("enumerate --rep " + path("f3.json") + " --seed-cutoff 8 --out " + path("c.csv")).code == 0);
  CHECK(slurp(path("c.csv")).rfind("# genus=2,d=3", 0) == 0);
  const auto e = run("entropy --classes " + path("c.csv") + " --form sigma:1");
  REQUIRE(e.code == 0);
  const auto j = nlohmann::json::parse(e.out);
  CHECK(j["c_phi"] == 1.0);
  CHECK(j["entropy"]["estimate"]["h_hat"].get<double>() > 0.0);
}

TEST_CASE("errors map to exit codes with a JSON message") {
  const auto missing = run("validate --rep " + path("absent.json"));
  CHECK(missing.code == 1);
  const auto err = nlohmann::json::parse(missing.err);
  CHECK(err["error"]["kind"] == "IoError");
  CHECK(err["error"]["exit_code"] == 1);

  run("fuchsian --d 3 --out " + path("f3.json"));
  run("enumerate --rep " + path("f3.json") + " --max-len 2 --out " + path("short.csv"));
  CHECK(run("entropy --classes " + path("short.csv") + " --form nonsense").code == 2);
  CHECK(run("fuchsian --d 12").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("enumerate --rep " + path("f3.json") + " --max-len notanumber").code == 2);

  std::ofstream(path("broken.json")) << R"({"d": 2, "genus": 2, "generators": [[[2, 0], [0, 2]]]})";
  CHECK(run("validate --rep " + path("broken.json")).code == 2);
  std::ofstream(path("garbage.json")) << "{";
  CHECK(run("validate --rep " + path("garbage.json")).code == 2);
  // Too few classes for a fit.
  CHECK(run("entropy --classes " + path("short.csv") + " --form sigma:1").code == 3);
}

TEST_CASE("thermo presets") {
  const auto p = run("thermo --shift full:2 --pressure 0");
  REQUIRE(p.code == 0);
  CHECK(nlohmann::json::parse(p.out)["pressure"]["spectral"].get<double>() == doctest::Approx(std::log(2.0)));
  const auto s = run("thermo --shift doubling --srb");
  REQUIRE(s.code == 0);
  CHECK(nlohmann::json::parse(s.out)["srb"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
  const auto h = run("thermo --shift golden-mean --solve-entropy --spectral");
  REQUIRE(h.code == 0);
  CHECK(nlohmann::json::parse(h.out)["entropy"]["h"].get<double>() == doctest::Approx(0.38224508584).epsilon(1e-9));
  CHECK(run("thermo --shift nowhere --solve-entropy").code != 0);
}

TEST_CASE("run, report and config files") {
  run("fuchsian --d 3 --out " + path("f3.json"));
  const auto r = run("run --rep " + path("f3.json") + " --seed-cutoff 9 --out " + path("run1"));
  REQUIRE(r.code == 0);
  CHECK(fs::exists(path("run1") + "/hx.json"));
  const auto rep = run("report --dir " + path("run1"));
  CHECK(rep.code == 0);
  CHECK(rep.out == r.out);

  // Config supplies the cutoff; the command line wins for --out.
  std::ofstream(path("cfg.json")) << R"({"workers": 2, "run": {"seed-cutoff": 9, "out": ")" << path("ignored")
                                  << R"("}})";
  const auto c = run("--config " + path("cfg.json") + " run --rep " + path("f3.json") + " --out " + path("run2"));
  REQUIRE(c.code == 0);
  CHECK_FALSE(fs::exists(path("ignored")));
  CHECK(slurp(path("run2") + "/classes.csv") == slurp(path("run1") + "/classes.csv"));

  CHECK(run("run --rep " + path("absent.json") + " --out " + path("run3")).code == 1);
  CHECK_FALSE(fs::exists(path("run3")));
}

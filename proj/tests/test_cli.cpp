#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

fs::path scratch_dir() {
  static fs::path base = [] {
    auto d = fs::temp_directory_path() /
             ("spcli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  static int counter = 0;
  auto d = base / std::to_string(counter++);
  fs::create_directories(d);
  return d;
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
  fs::path so = dir / "stdout.txt";
  fs::path se = dir / "stderr.txt";
  std::string cmd = std::string(SPCLI_PATH) + " " + args + " > " + so.string() +
                    " 2> " + se.string();
  int st = std::system(cmd.c_str());
  int code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return RunResult{code, slurp(so), slurp(se)};
}

long long line_count(const fs::path& p) {
  std::ifstream in(p);
  long long n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

const char* kCanonicalModel = R"({
  "model": {
    "alpha": 1.5,
    "components": [ { "kind": "ar1", "rho": 0.5, "pi": 1.0, "beta": 0.0 } ]
  },
  "seminorm": { "m": 1, "h": 2, "p": 2.0 },
)";

}  // namespace

TEST_CASE("usage errors map to the validation exit code") {
  auto dir = scratch_dir();
  CHECK(run_cli("", dir).code == 2);
  CHECK(run_cli("frobnicate --config x.json --out " + dir.string(), dir).code == 2);
  // missing config file
  CHECK(run_cli("simulate --config " + (dir / "nope.json").string() + " --out " +
                    dir.string(),
                dir)
            .code == 2);
}

TEST_CASE("simulate writes a deterministic series") {
  auto dir = scratch_dir();
  auto cfg = dir / "cfg.json";
  spit(cfg, std::string(kCanonicalModel) +
                R"( "run": { "length": 2000, "seed": 5 } })");

  auto out1 = dir / "out1";
  auto out2 = dir / "out2";
  auto r1 = run_cli("simulate --config " + cfg.string() + " --out " + out1.string(),
                    dir);
  REQUIRE(r1.code == 0);
  REQUIRE(fs::exists(out1 / "series.csv"));
  CHECK(line_count(out1 / "series.csv") == 2001);  // header + rows

  auto meta = json::parse(slurp(out1 / "meta.json"));
  CHECK(meta.contains("command"));

  auto r2 = run_cli("simulate --config " + cfg.string() + " --out " + out2.string(),
                    dir);
  REQUIRE(r2.code == 0);
  CHECK(slurp(out1 / "series.csv") == slurp(out2 / "series.csv"));

  auto out3 = dir / "out3";
  auto r3 = run_cli("simulate --config " + cfg.string() + " --out " +
                        out3.string() + " --seed 99",
                    dir);
  REQUIRE(r3.code == 0);
  CHECK(slurp(out1 / "series.csv") != slurp(out3 / "series.csv"));
}

TEST_CASE("spectral outputs round-trip as documented") {
  auto dir = scratch_dir();
  auto cfg = dir / "cfg.json";
  spit(cfg, std::string(kCanonicalModel) +
                R"( "run": { "representation": "cylinder" } })");

  auto out = dir / "out";
  auto r = run_cli("spectral --config " + cfg.string() + " --out " + out.string(),
                   dir);
  REQUIRE(r.code == 0);

  auto doc = json::parse(slurp(out / "spectral.json"));
  CHECK(doc.at("support") == "cylinder");
  CHECK(doc.at("dimension") == 4);
  REQUIRE(doc.at("atoms").is_array());
  REQUIRE(!doc.at("atoms").empty());

  double mass = 0.0;
  bool found_peak_now = false;
  for (const auto& a : doc.at("atoms")) {
    double w = a.at("weight").get<double>();
    CHECK(w > 0.0);
    mass += w;
    auto pt = a.at("point").get<std::vector<double>>();
    REQUIRE(pt.size() == 4);
    double sn = std::sqrt(pt[0] * pt[0] + pt[1] * pt[1]);
    CHECK(sn == Catch::Approx(1.0).margin(1e-9));
    double c = std::sqrt(1.25);
    if (std::abs(pt[0] - 0.5 / c) < 1e-9 && std::abs(pt[1] - 1.0 / c) < 1e-9 &&
        std::abs(pt[2]) < 1e-9 && std::abs(pt[3]) < 1e-9)
      found_peak_now = true;
  }
  CHECK(mass == Catch::Approx(doc.at("total_mass").get<double>()).margin(1e-9));
  CHECK(found_peak_now);

  // euclidean representation: unit vectors in the full norm
  auto cfg2 = dir / "cfg2.json";
  spit(cfg2, std::string(kCanonicalModel) +
                 R"( "run": { "representation": "euclidean" } })");
  auto out2 = dir / "out2";
  REQUIRE(run_cli("spectral --config " + cfg2.string() + " --out " +
                      out2.string(),
                  dir)
              .code == 0);
  auto doc2 = json::parse(slurp(out2 / "spectral.json"));
  for (const auto& a : doc2.at("atoms")) {
    auto pt = a.at("point").get<std::vector<double>>();
    double e = 0.0;
    for (double v : pt) e += v * v;
    CHECK(std::sqrt(e) == Catch::Approx(1.0).margin(1e-9));
  }

  // byte-identical rerun
  auto out3 = dir / "out3";
  REQUIRE(run_cli("spectral --config " + cfg.string() + " --out " + out3.string(),
                  dir)
              .code == 0);
  CHECK(slurp(out / "spectral.json") == slurp(out3 / "spectral.json"));
}

TEST_CASE("predict reports the closed-form distribution") {
  auto dir = scratch_dir();
  auto cfg = dir / "cfg.json";
  spit(cfg, std::string(kCanonicalModel) +
                R"( "run": { "observed": [1.0, 2.0] } })");

  auto out = dir / "out";
  auto r = run_cli("predict --config " + cfg.string() + " --out " + out.string(),
                   dir);
  REQUIRE(r.code == 0);

  auto doc = json::parse(slurp(out / "prediction.json"));
  REQUIRE(doc.at("classes").size() == 1);
  const auto& entries = doc.at("classes")[0].at("entries");
  REQUIRE(entries.size() == 3);
  double sum = 0.0;
  const double q = std::pow(2.0, -1.5);
  for (const auto& e : entries) {
    double p = e.at("probability").get<double>();
    sum += p;
    long long k = e.at("k").get<long long>();
    double want = (k == 2) ? q * q : std::pow(q, double(k)) * (1.0 - q);
    CHECK(p == Catch::Approx(want).margin(1e-9));
  }
  CHECK(sum == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("config validation failures name the offending field") {
  auto dir = scratch_dir();
  auto out = dir / "out";

  auto bad_alpha = dir / "bad_alpha.json";
  spit(bad_alpha, R"({
    "model": { "alpha": 2.5,
      "components": [ { "kind": "ar1", "rho": 0.5, "pi": 1.0, "beta": 0.0 } ] },
    "seminorm": { "m": 1, "h": 2, "p": 2.0 },
    "run": { "length": 100, "seed": 1 } })");
  auto r1 = run_cli("simulate --config " + bad_alpha.string() + " --out " +
                        out.string(),
                    dir);
  CHECK(r1.code == 2);
  CHECK(r1.err.find("alpha") != std::string::npos);

  auto unknown = dir / "unknown.json";
  spit(unknown, R"({
    "model": { "alpha": 1.5, "bogus": 1,
      "components": [ { "kind": "ar1", "rho": 0.5, "pi": 1.0, "beta": 0.0 } ] },
    "seminorm": { "m": 1, "h": 2, "p": 2.0 },
    "run": { "length": 100, "seed": 1 } })");
  auto r2 = run_cli("simulate --config " + unknown.string() + " --out " +
                        out.string(),
                    dir);
  CHECK(r2.code == 2);
  CHECK(r2.err.find("bogus") != std::string::npos);

  auto bad_m = dir / "bad_m.json";
  spit(bad_m, R"({
    "model": { "alpha": 1.5,
      "components": [ { "kind": "ar1", "rho": 0.5, "pi": 1.0, "beta": 0.0 } ] },
    "seminorm": { "m": -1, "h": 2, "p": 2.0 },
    "run": { "length": 100, "seed": 1 } })");
  CHECK(run_cli("simulate --config " + bad_m.string() + " --out " + out.string(),
                dir)
            .code == 2);

  auto truncated = dir / "trunc.json";
  spit(truncated, R"({ "model": { "alpha": 1.5 )");
  CHECK(run_cli("simulate --config " + truncated.string() + " --out " +
                    out.string(),
                dir)
            .code == 2);
}

TEST_CASE("representation failures use their own exit code") {
  auto dir = scratch_dir();
  auto cfg = dir / "cfg.json";
  spit(cfg, R"({
    "model": { "alpha": 1.5,
      "components": [ { "kind": "explicit", "pi": 1.0, "beta": 0.0,
                        "coeffs": { "0": 1.0 } } ] },
    "seminorm": { "m": 0, "h": 1, "p": 2.0 },
    "run": { "representation": "cylinder" } })");
  auto out = dir / "out";
  auto r = run_cli("spectral --config " + cfg.string() + " --out " + out.string(),
                   dir);
  CHECK(r.code == 3);
  CHECK(r.err.find("represent") != std::string::npos);

  auto cfg2 = dir / "cfg2.json";
  spit(cfg2, R"({
    "model": { "alpha": 1.5,
      "components": [ { "kind": "explicit", "pi": 1.0, "beta": 0.0,
                        "coeffs": { "0": 1.0 } } ] },
    "seminorm": { "m": 0, "h": 1, "p": 2.0 },
    "run": { "observed": [1.0] } })");
  CHECK(run_cli("predict --config " + cfg2.string() + " --out " + out.string(),
                dir)
            .code == 3);
}

TEST_CASE("verify runs the conditional experiment") {
  auto dir = scratch_dir();
  auto cfg = dir / "cfg.json";
  spit(cfg, R"({
    "model": { "alpha": 1.5,
      "components": [ { "kind": "ar1", "rho": 0.5, "pi": 1.0, "beta": 0.0 } ] },
    "seminorm": { "m": 1, "h": 1, "p": 2.0 },
    "run": { "experiment": "conditional", "N": 400000, "seed": 3,
             "quantile": 0.99, "tube_radius": 0.05,
             "conditioning": [ { "theta": 1, "j": 1, "k": 0 },
                               { "theta": 1, "j": 1, "k": 1 } ],
             "target": [ { "theta": 1, "j": 1, "k": 0 } ] } })");
  auto out = dir / "out";
  auto r = run_cli("verify --config " + cfg.string() + " --out " + out.string(),
                   dir);
  REQUIRE(r.code == 0);
  auto doc = json::parse(slurp(out / "verify.json"));
  double est = doc.at("estimate").get<double>();
  CHECK(est >= 0.0);
  CHECK(est <= 1.0);
  CHECK(doc.at("std_error").get<double>() > 0.0);
  CHECK(doc.at("n_exceedances").get<long long>() >= 200);

  // byte-identical rerun with the same seed
  auto out2 = dir / "out2";
  REQUIRE(run_cli("verify --config " + cfg.string() + " --out " + out2.string(),
                  dir)
              .code == 0);
  CHECK(slurp(out / "verify.json") == slurp(out2 / "verify.json"));

  // starving the experiment of exceedances
  auto lean = dir / "lean.json";
  spit(lean, R"({
    "model": { "alpha": 1.5,
      "components": [ { "kind": "ar1", "rho": 0.5, "pi": 1.0, "beta": 0.0 } ] },
    "seminorm": { "m": 1, "h": 1, "p": 2.0 },
    "run": { "experiment": "conditional", "N": 10000, "seed": 3,
             "quantile": 0.99999, "tube_radius": 0.05,
             "conditioning": [ { "theta": 1, "j": 1, "k": 0 } ],
             "target": [ { "theta": 1, "j": 1, "k": 0 } ] } })");
  CHECK(run_cli("verify --config " + lean.string() + " --out " + out.string(),
                dir)
            .code == 4);
}

TEST_CASE("verify runs the scaling experiment") {
  auto dir = scratch_dir();
  auto cfg = dir / "cfg.json";
  spit(cfg, R"({
    "model": { "alpha": 1.5,
      "components": [ { "kind": "ar1", "rho": 0.5, "pi": 1.0, "beta": 0.0 } ] },
    "seminorm": { "m": 1, "h": 1, "p": 2.0 },
    "run": { "experiment": "scaling", "N": 100000, "seed": 3,
             "quantiles": [0.99, 0.999], "tube_radius": 0.05,
             "target": "all" } })");
  auto out = dir / "out";
  auto r = run_cli("verify --config " + cfg.string() + " --out " + out.string(),
                   dir);
  REQUIRE(r.code == 0);
  auto doc = json::parse(slurp(out / "scaling.json"));
  REQUIRE(doc.at("points").size() == 2);
  for (const auto& p : doc.at("points")) {
    CHECK(p.at("x").get<double>() > 0.0);
    CHECK(p.at("estimate").get<double>() > 0.0);
  }
}

TEST_CASE("bivariate command evaluates the closed forms") {
  auto dir = scratch_dir();
  auto cfg = dir / "cfg.json";
  spit(cfg, R"({
    "bivariate": {
      "alpha": 1.5, "rho1": 0.6, "rho2": 0.4,
      "gamma2": [ { "angle": 0.7853981633974483, "weight": 0.3 } ],
      "v0": { "center": 0.0, "half_width": 0.1 },
      "regions": [
        { "name": "survive",
          "v": { "center": 0.0, "half_width": 0.1 },
          "rects": [ { "x": [1.5666666666666667, 1.7666666666666666],
                       "y": [null, null] } ] },
        { "name": "no_jump",
          "v": { "center": 0.0, "half_width": 0.1 },
          "rects": [ { "x": [1.5666666666666667, 1.7666666666666666],
                       "y": [-0.5, 0.5] } ] }
      ] } })");
  auto out = dir / "out";
  auto r = run_cli("bivariate --config " + cfg.string() + " --out " + out.string(),
                   dir);
  REQUIRE(r.code == 0);
  auto doc = json::parse(slurp(out / "bivariate.json"));
  const double r1 = std::pow(0.6, 1.5);
  REQUIRE(doc.at("cases").size() == 2);
  for (const auto& c : doc.at("cases")) {
    std::string name = c.at("name").get<std::string>();
    double v = c.at("value").get<double>();
    if (name == "survive") CHECK(v == Catch::Approx(1.0).margin(1e-9));
    if (name == "no_jump") CHECK(v == Catch::Approx(r1).margin(1e-9));
  }
  CHECK(doc.at("gamma4").at("atoms").size() >= 8);

  // noise on the vertical axis: representability exit code
  auto bad = dir / "bad.json";
  spit(bad, R"({
    "bivariate": {
      "alpha": 1.5, "rho1": 0.6, "rho2": 0.4,
      "gamma2": [ { "angle": 1.5707963267948966, "weight": 0.3 } ],
      "v0": { "center": 0.0, "half_width": 0.1 },
      "regions": [] } })");
  CHECK(run_cli("bivariate --config " + bad.string() + " --out " + out.string(),
                dir)
            .code == 3);
}

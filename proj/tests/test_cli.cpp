#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "contact_opt/export.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr folded into stdout.
Result cli(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" CONTACT_OPT_CLI "\" " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "contact_opt_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("run writes a trace with one row per iterate") {
  const auto out = scratch("t.csv");
  const auto r = cli("run --objective quartic --dim 50 --optimizer crgd --epsilon 1e-3 --mu 0.9 --delta 10 "
                     "--iters 500 --init const:2 --out " + out.string());
  CHECK(r.code == 0);
  CHECK(lines(slurp(out)) == 502);
}

TEST_CASE("run is deterministic") {
  const auto a = scratch("qa.csv"), b = scratch("qb.csv");
  const std::string args = "run --objective quadratic --dim 500 --seed 1 --optimizer nag --tau 0.5 --mu 0.9 --iters 50 --out ";
  REQUIRE(cli(args + a.string()).code == 0);
  REQUIRE(cli(args + b.string()).code == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("run exit codes") {
  const auto bogus = cli("run --optimizer bogus");
  CHECK(bogus.code == 1);
  CHECK(bogus.out.find("crgd") != std::string::npos);
  const auto obj = cli("run --objective sphere");
  CHECK(obj.code == 1);
  CHECK(obj.out.find("rosenbrock") != std::string::npos);
  CHECK(cli("run --objective quadratic --dim 3 --optimizer gd --tau 100 --iters 2000").code == 2);
  CHECK(cli("run --objective quartic --dim 4 --init box:1,0").code == 1);
  CHECK(cli("run --objective quartic --dim 4 --init vec:1,2").code == 1);
  CHECK(cli("run --objective quartic --dim 4 --optimizer cm --integrator jump4").code == 1);
  CHECK(cli("run --objective quartic --dim 4 --optimizer crgd --delta 1 --integrator nope").code == 1);
  CHECK(cli("run --iters x").code == 1);
  CHECK(cli("").code == 1);
}

TEST_CASE("run accepts every init form and integrator") {
  for (const char* init : {"const:0.5", "vec:1,2,3,4", "alt:-1.2,1", "box:-2,2", "1,2,3,4"})
    CHECK(cli(std::string("run --objective rosenbrock --dim 4 --optimizer rgd --epsilon 1e-3 --delta 1 --iters 20 --init ") + init).code == 0);
  for (const char* integ : {"strang", "jump4", "suzuki4", "jump6"})
    CHECK(cli(std::string("run --objective quartic --dim 4 --optimizer crgd --epsilon 1e-3 --delta 1 --iters 20 --integrator ") + integ).code == 0);
}

TEST_CASE("bench and search flags") {
  CHECK(cli("bench --preset quartic --config x.json").code == 1);
  CHECK(cli("bench --preset nosuch").code == 1);
  CHECK(cli("bench --preset quartic --scale huge").code == 1);

  const fs::path cfg = scratch("broken.json");
  std::ofstream(cfg) << R"({"objective": {"name": "quartic", "dim": 3, "seed": 0, "extra": 1}})";
  const auto bad = cli("bench --config " + cfg.string());
  CHECK(bad.code == 1);
  CHECK(bad.out.find("$.objective.extra") != std::string::npos);

  const auto bands = scratch("b.csv"), svg = scratch("b.svg"), traces = scratch("tr.csv");
  const auto r = cli("bench --preset camelback --optimizers rgd,cm --seed 3 --out " + bands.string() + " --svg " +
                     svg.string() + " --traces " + traces.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("rgd epsilon=") != std::string::npos);
  CHECK(contact::read_band_csv(bands).size() == 2);
  CHECK(slurp(svg).find("</svg>") != std::string::npos);
  CHECK(contact::read_trace_csv(traces).size() == 2);

  const auto s = cli("search --preset camelback --optimizers crgd --seed 3 --out " + traces.string());
  CHECK(s.code == 0);
  CHECK(s.out.find("crgd epsilon=") != std::string::npos);
  CHECK(contact::read_trace_csv(traces).size() == 1);
}

TEST_CASE("seed falls back to the environment") {
  const auto a = scratch("env_a.csv"), b = scratch("env_b.csv"), c = scratch("env_c.csv");
  const std::string args = "bench --preset camelback --optimizers cm --init box:-5,5 ";
  REQUIRE(cli(args + "--out " + a.string(), "CONTACT_OPT_SEED=5").code == 0);
  REQUIRE(cli(args + "--seed 5 --out " + b.string()).code == 0);
  REQUIRE(cli(args + "--seed 6 --out " + c.string()).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) != slurp(c));
  CHECK(cli(args + "--out " + a.string(), "CONTACT_OPT_SEED=abc").code == 1);
}

TEST_CASE("rates") {
  const fs::path p = scratch("cubic.csv");
  {
    std::ofstream out(p);
    out << "optimizer,trial,iter,f_gap,diverged\n";
    for (int k = 0; k <= 300; ++k)
      out << "rgd,0," << k << "," << contact::format_double(k == 0 ? 1.0 : std::pow(k, -3.0)) << ",0\n";
    for (int k = 0; k <= 300; ++k) out << "cm,1," << k << "," << (k < 100 ? "1" : "0") << ",0\n";
  }
  const auto r = cli("rates --trace " + p.string() + " --windows 0-50,50-150,150-300");
  CHECK(r.code == 0);
  CHECK(r.out.find("rgd,0,0-50,3.00") != std::string::npos);
  CHECK(r.out.find("rgd,0,150-300,3.00") != std::string::npos);
  CHECK(r.out.find("cm,1,0-50,0.00") != std::string::npos);
  CHECK(r.out.find("cm,1,50-150,n/a") != std::string::npos);
  CHECK(cli("rates --trace " + scratch("absent.csv").string()).code == 1);
  CHECK(cli("rates --trace " + p.string() + " --windows 5").code == 1);
}

TEST_CASE("check and list") {
  const auto all = cli("check");
  CHECK(all.code == 0);
  CHECK(all.out.find("FAIL") == std::string::npos);
  const auto conf = cli("check --only conformal");
  CHECK(conf.code == 0);
  CHECK(conf.out.find("orders:") == std::string::npos);
  CHECK(conf.out.find("conformal:") != std::string::npos);
  CHECK(cli("check --seed 7").out == cli("check --seed 7").out);
  CHECK(cli("check --only nothing").code == 1);
  const auto l = cli("list");
  CHECK(l.code == 0);
  CHECK(l.out.find("jump6") != std::string::npos);
  CHECK(l.out.find("\"search_trials\"") != std::string::npos);
}

#include <doctest.h>

#include <filesystem>

#include "dgmm/error.hpp"
#include "dgmm/io.hpp"
#include "dgmm/sweep.hpp"

using namespace dgmm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dgmm_sweep_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("regression helpers") {
  CHECK(loglog_slope({1, 2, 4}, {3, 12, 48}) == doctest::Approx(2.0));
  const std::vector<double> c = least_squares({{1, 0}, {1, 1}, {1, 2}}, {1, 3, 5});
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(2.0));
  CHECK_THROWS_AS(least_squares({{1, 1}, {2, 2}}, {1, 2}), Error);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 8, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("empty matrix gives a header-only CSV and a valid manifest") {
  const fs::path dir = scratch("empty");
  const json cfg{{"sweeps", {{{"name", "b"}, {"kind", "translation_beta"}, {"beta", json::array()}}}}};
  const SweepRun run = run_sweep(cfg, dir, 1, 2);
  CHECK(run.failed == 0);
  CHECK(read_file(dir / "b.csv") == "beta,eps,energy,baseline,excess\n");
  const json m = json::parse(read_file(run.manifest));
  CHECK(m.at("sweeps").size() == 1);
  CHECK(m.at("sweeps")[0].at("rows") == 0);
  CHECK(m.at("failed").empty());
  CHECK(m.contains("config_hash"));
  CHECK(m.at("version") == kVersion);
  fs::remove_all(dir);
}

TEST_CASE("beta sweep columns and summary") {
  const SweepTable t = run_named_sweep({{"kind", "translation_beta"}}, 0, 3);
  CHECK(t.columns == std::vector<std::string>{"beta", "eps", "energy", "baseline", "excess"});
  CHECK(t.rows.size() == 3);
  CHECK(t.summary.at("loglog_slope").get<double>() == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("band constant only reported for moderate tau") {
  const json base = {{"kind", "horizontal_delta"}, {"n1", 201}, {"n2", 101}, {"delta", {0.2, 0.1}}};
  json mid = base, low = base;
  mid["tau"] = 1.5;
  low["tau"] = 1.1;
  const SweepTable a = run_named_sweep(mid, 0, 2), b = run_named_sweep(low, 0, 2);
  REQUIRE(a.rows.size() == 2);
  CHECK(a.summary.at("C_tau").get<double>() > 0.0);
  CHECK(b.summary.at("C_tau").is_null());
}

TEST_CASE("failed cells are listed with their error names") {
  const fs::path dir = scratch("fail");
  const json cfg{{"sweeps",
                  {{{"name", "m"}, {"kind", "midpoint_eps"}, {"eps", {0.01, 0.3}}},
                   {{"name", "x"}, {"kind", "no_such_kind"}}}}};
  const SweepRun run = run_sweep(cfg, dir, 0, 2);
  const json m = json::parse(read_file(run.manifest));
  CHECK(run.failed == 2);
  CHECK(m.at("failed")[0].at("error") == "InvalidInput");
  CHECK(m.at("failed")[0].at("sweep") == "m");
  CHECK(m.at("failed")[1].at("sweep") == "x");
  CHECK(m.at("sweeps")[0].at("rows") == 1);
  fs::remove_all(dir);
}

TEST_CASE("identical config and seed give identical files") {
  const json cfg{{"sweeps",
                  {{{"name", "c"}, {"kind", "combined_random"}, {"count", 6}},
                   {{"name", "t"}, {"kind", "translation_beta"}}}}};
  const fs::path d1 = scratch("det1"), d2 = scratch("det2");
  run_sweep(cfg, d1, 17, 1);
  run_sweep(cfg, d2, 17, 4);
  for (const char* f : {"c.csv", "t.csv", "manifest.json"}) CHECK(read_file(d1 / f) == read_file(d2 / f));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "symindex/errors.hpp"
#include "symindex/model_json.hpp"
#include "symindex/reports_io.hpp"
#include "symindex/rng.hpp"
#include "symindex/version.hpp"

using namespace symindex;
using nlohmann::json;

TEST_CASE("doubles are printed with the shortest round-tripping form") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_double(1e300) == "1e+300");
  CHECK(format_double(5e-324) == "5e-324");

  PathRng rng(RngSpec{1}, 0);
  for (int i = 0; i < 500; ++i) {
    double v;
    const std::uint64_t bits = rng.raw();
    static_assert(sizeof(v) == sizeof(bits));
    std::memcpy(&v, &bits, sizeof(v));
    if (!std::isfinite(v)) continue;
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("csv fields are quoted exactly when needed") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("with space") == "with space");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv_field("") == "");
}

TEST_CASE("symbol table csv has a stable shape") {
  SymbolRow row;
  row.x = {0.0};
  row.xi = {1.0};
  row.value = {1.0, -0.5};
  row.abs_err = 1e-12;
  RunStamp st{"deadbeef00000000", kVersion};
  const std::string csv = symbol_table_csv({row}, st);
  CHECK(csv ==
        "x,xi,re,im,abs_err,config_hash,version\n"
        "0,1,1,-0.5,1e-12,deadbeef00000000,0.1.0\n");

  SymbolRow wide;
  wide.x = {0.5, -1.0};
  wide.xi = {2.0, 3.0};
  wide.value = {4.0, 0.0};
  const std::string csv2 = symbol_table_csv({wide}, st);
  CHECK(csv2.find("\"0.5 -1\",\"2 3\",4,0,0,") != std::string::npos);
}

TEST_CASE("fnv1a matches its published test vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
  CHECK(fnv1a_hex("x").size() == 16);
  CHECK(fnv1a_hex("x") != fnv1a_hex("y"));
}

TEST_CASE("config hash ignores key order and explicit defaults") {
  const char* terse = R"({"model": {"family": "levy", "jumps":
      {"kind": "symmetric_stable", "alpha": 1.5}}, "seed": 9})";
  const char* shuffled = R"({"seed": 9, "model": {"jumps":
      {"alpha": 1.5, "kind": "symmetric_stable", "scale": 1.0},
      "family": "levy", "dim": 1, "cutoff_radius": 1.0}})";
  ExperimentConfig a = parse_experiment(terse);
  ExperimentConfig b = parse_experiment(shuffled);
  CHECK(a.config_hash == b.config_hash);
  CHECK(a.resolved == b.resolved);
  CHECK(json::parse(a.resolved)["seed"] == 9);

  const char* changed = R"({"model": {"family": "levy", "jumps":
      {"kind": "symmetric_stable", "alpha": 1.4}}, "seed": 9})";
  CHECK(parse_experiment(changed).config_hash != a.config_hash);
}

TEST_CASE("config errors carry the offending path") {
  auto message_of = [](const char* text) {
    try {
      parse_experiment(text);
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message_of(R"({"model": {"family": "levy"}, "sneaky": 1})")
            .find("'sneaky'") != std::string::npos);
  CHECK(message_of(R"({"model": {"family": "stable_like"}})")
            .find("model.alpha_base") != std::string::npos);
  CHECK(message_of(R"({"model": {"family": "levy", "jumps":
      {"kind": "sum", "parts": [{"kind": "symmetric_stable"}]}}})")
            .find("parts[0].alpha") != std::string::npos);
}

TEST_CASE("report json writers round-trip through a parser") {
  RunStamp st{"0123456789abcdef", kVersion};

  SUBCASE("bound report") {
    BoundCheckReport rep;
    rep.constants = bound_constants(1);
    rep.z = 2.5758293035489004;
    rep.paths = 100;
    rep.cells.push_back({0.01, 1.0, 0.05, 0.04, 0.06, 0.5, true});
    rep.cells.push_back({0.01, 2.0, 0.01, 0.005, 0.02, 0.25, true});
    const json j = json::parse(bound_report_json(rep, st));
    CHECK(j["config_hash"] == "0123456789abcdef");
    CHECK(j["version"] == kVersion);
    CHECK(j["all_pass"] == true);
    CHECK(j["paths"] == 100);
    REQUIRE(j["cells"].size() == 2);
    CHECK(j["cells"][0]["t"] == 0.01);
    CHECK(j["cells"][1]["r"] == 2.0);
    CHECK(j["cells"][1]["pass"] == true);
    CHECK(j["constants"]["c_d"] == doctest::Approx(166.65562128235507));
  }

  SUBCASE("scaling report") {
    ScalingReport rep;
    rep.lambda = 2.5;
    rep.direction = ScalingDirection::ToZero;
    rep.levels.push_back({0.25, 1.5, 3.0});
    rep.levels.push_back({0.125, 1.2, 2.5});
    rep.verdict = "tends-to-0";
    rep.paths_per_level = 50;
    const json j = json::parse(scaling_report_json(rep, st));
    CHECK(j["lambda"] == 2.5);
    CHECK(j["direction"] == "to-zero");
    CHECK(j["verdict"] == "tends-to-0");
    REQUIRE(j["levels"].size() == 2);
    CHECK(j["levels"][1]["median"] == 1.2);
  }

  SUBCASE("index report") {
    IndexReport rep;
    rep.beta0 = 1.5;
    rep.beta0_lower = 1.5;
    rep.delta0 = 1.45;
    rep.delta0_upper = 1.4;
    rep.r_grid = {2.0, 4.0};
    rep.H_of_r = {0.35, 0.125};
    rep.g_H = {1.51, 1.5};
    rep.window = 2;
    rep.sector = SectorEstimate{};
    const json j = json::parse(index_report_json(rep, st));
    CHECK(j["indices"]["beta0"] == 1.5);
    CHECK(j["indices"].contains("delta0"));
    CHECK(!j["indices"].contains("beta_inf"));
    CHECK(j["domain_restricted"] == false);
    CHECK(j["sector"]["satisfied"] == true);
    REQUIRE(j["grid"].size() == 2);
    CHECK(j["grid"][0]["r"] == 2.0);
    CHECK(j["grid"][0]["H"] == 0.35);
    CHECK(!j["grid"][0].contains("h"));
  }

  SUBCASE("lower bound report") {
    LowerBoundReport rep;
    rep.cells.push_back({0.25, 0.5, 0.9, 2.0, 0.45});
    rep.c_kappa_hat = 0.45;
    rep.trend_slope = -0.05;
    rep.flat = true;
    rep.paths = 10;
    const json j = json::parse(lower_report_json(rep, st));
    CHECK(j["flat"] == true);
    CHECK(j["inconclusive"] == false);
    CHECK(j["c_kappa_hat"] == 0.45);
    CHECK(j["cells"][0]["product"] == 0.45);
    CHECK(j["sector"]["c0"] == 0.0);
  }
}

TEST_CASE("csv writers stamp every row") {
  RunStamp st{"feedfacefeedface", kVersion};

  std::vector<SymbolEstimate> est(2);
  est[0] = {0.1, {2.0, 0.0}, 0.01, 0.01, 500, ""};
  est[1] = {0.01, {1.9, -0.1}, 0.02, 0.02, 500, "noisy, widen"};
  const std::string csv = empirical_symbol_csv(est, st);
  CHECK(csv.find("t,re,im,se_re,se_im,used_paths,warning,config_hash,version\n") == 0);
  CHECK(csv.find("\"noisy, widen\",feedfacefeedface,0.1.0") != std::string::npos);

  PathEnsemble e;
  e.dim = 1;
  e.horizon = 1.0;
  e.x0 = {0.0};
  e.times = {0.0, 1.0};
  e.path_states = {{0.0, 0.4}, {0.0, std::nan("")}};
  e.path_max = {{0.0, 0.4}, {0.0, std::nan("")}};
  e.exploded = {1};
  const std::string ens = ensemble_csv(e, st);
  CHECK(ens.find("path,time,state,max_dist,exploded,config_hash,version\n") == 0);
  CHECK(ens.find("0,1,0.4,0.4,0,") != std::string::npos);
  CHECK(ens.find("1,0,0,0,1,") != std::string::npos);  // exploded path flagged
}

TEST_CASE("text files land where asked and failures name the path") {
  const std::string path = "/tmp/symindex_report_test.csv";
  write_text_file(path, "a,b\n");
  FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f != nullptr);
  char buf[16] = {};
  const std::size_t got = std::fread(buf, 1, sizeof(buf), f);
  std::fclose(f);
  std::remove(path.c_str());
  CHECK(std::string(buf, got) == "a,b\n");

  try {
    write_text_file("/nonexistent-dir/x.csv", "y");
    CHECK(false);
  } catch (const ValidationError& err) {
    CHECK(std::string(err.what()).find("/nonexistent-dir/x.csv") != std::string::npos);
  }
}

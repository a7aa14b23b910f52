#include "ep3/config.hpp"
#include "ep3/csv.hpp"
#include "ep3/linalg.hpp"
#include "ep3/optimize.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ep3 {
namespace {

std::string error_of(const std::string& text) {
  try {
    ParamConfig::parse(text, "run.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, DefaultsAndTypedAccess) {
  const ParamConfig cfg;
  EXPECT_EQ(cfg.text("mode"), "noiseless");
  EXPECT_FALSE(cfg.seed().has_value());
  EXPECT_NEAR(cfg.frequency("gamma_mhz"), kTwoPi * 0.040, 1e-15);
  EXPECT_NEAR(cfg.real("gamma_mhz"), 0.040, 1e-15);
  EXPECT_EQ(cfg.integer("grid_points"), 41);
  const auto ratios = cfg.real_list("omega_over_gamma");
  ASSERT_EQ(ratios.size(), 13u);
  EXPECT_NEAR(ratios.front(), 0.4, 1e-15);
  EXPECT_NEAR(ratios.back(), 1.6, 1e-15);
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_THROW((void)cfg.frequency("shots"), ConfigError);
}

TEST(Config, ParsesCommentsAndWhitespace) {
  const ParamConfig cfg = ParamConfig::parse("# header\n  seed = 12   # trailing\n\nmode=shot_noise\n");
  EXPECT_EQ(cfg.seed().value(), 12u);
  EXPECT_TRUE(cfg.shot_noise());
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, ErrorsCarrySourceAndLine) {
  EXPECT_NE(error_of("seed = 1\nbogus = 3\n").find("run.cfg:2"), std::string::npos);
  EXPECT_NE(error_of("seed = 1\n\nshots = many\n").find("run.cfg:3"), std::string::npos);
  const std::string dup = error_of("shots = 10\nshots = 20\n");
  EXPECT_NE(dup.find("run.cfg:2"), std::string::npos);
  EXPECT_NE(dup.find("duplicate"), std::string::npos);
  EXPECT_NE(error_of("just words\n").find("run.cfg:1"), std::string::npos);
}

TEST(Config, ValidationRules) {
  EXPECT_THROW(ParamConfig::parse("mode = shot_noise\n").validate(), ConfigError);
  EXPECT_THROW(ParamConfig::parse("mode = loud\n").validate(), ConfigError);
  EXPECT_THROW(ParamConfig::parse("flip_prob = 0.7\n").validate(), ConfigError);
  EXPECT_THROW(ParamConfig::parse("omega_over_gamma = 1,-2\n").validate(), ConfigError);
  EXPECT_THROW(ParamConfig::parse("shots = 0\n").validate(), ConfigError);
  ParamConfig cfg;
  EXPECT_THROW(cfg.set("nope", "1"), ConfigError);
  cfg.set("shots", "7");
  EXPECT_EQ(cfg.integer("shots"), 7);
}

TEST(Config, RealLists) {
  EXPECT_EQ(parse_real_list("1,2.5,3"), (std::vector<double>{1.0, 2.5, 3.0}));
  const auto r = parse_real_list("0:1:5");
  ASSERT_EQ(r.size(), 5u);
  EXPECT_DOUBLE_EQ(r[2], 0.5);
  EXPECT_EQ(parse_real_list("2:9:1"), (std::vector<double>{2.0}));
  EXPECT_THROW(parse_real_list("0:1:0"), ConfigError);
  EXPECT_THROW(parse_real_list("1,x"), ConfigError);
}

TEST(Config, CanonicalFormIsOrderIndependent) {
  const ParamConfig a = ParamConfig::parse("seed = 3\nshots = 10\n");
  const ParamConfig b = ParamConfig::parse("shots = 10\nseed = 3\n");
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_NE(a.canonical(), ParamConfig::parse("shots = 11\nseed = 3\n").canonical());
}

TEST(Manifest, Fnv1aReferenceValuesAndFormat) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
  RunManifest m{"spectrum", 0xabcULL, 5u, {{"spectrum.csv", 1ULL}}, kToolVersion};
  EXPECT_EQ(m.str(),
            "command = spectrum\nconfig_hash = 0000000000000abc\nseed = 5\ntool_version = ep3 0.1.0\n"
            "output = spectrum.csv 0000000000000001\n");
}

TEST(Csv, RoundTripsDoublesExactly) {
  CsvWriter w({"a", "b"});
  const double x = 0.1 + 0.2;
  const double y = -1.2345678901234567e-300;
  w.row({fmt(x), fmt(y)});
  EXPECT_THROW(w.row({"1"}), std::invalid_argument);
  const CsvTable t = parse_csv(w.str());
  EXPECT_EQ(t.number(0, t.column("a")), x);
  EXPECT_EQ(t.number(0, t.column("b")), y);
  EXPECT_THROW((void)t.column("c"), std::invalid_argument);
  EXPECT_THROW(parse_csv("a,b\n1\n"), std::invalid_argument);
}

TEST(NelderMead, MinimizesRosenbrock) {
  auto rosen = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  NelderMeadOptions opts;
  opts.max_evals = 20000;
  opts.xtol = 1e-12;
  opts.ftol = 1e-20;
  const auto r = nelder_mead(rosen, {-1.2, 1.0}, {0.1, 0.1}, {}, opts);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
  EXPECT_NEAR(r.x[1], 1.0, 1e-6);
}

TEST(NelderMead, ProjectionKeepsIteratesFeasible) {
  bool violated = false;
  auto f = [&](std::span<const double> x) {
    if (x[0] < 2.0) violated = true;
    return (x[0] - 0.0) * (x[0] - 0.0) + (x[1] - 1.0) * (x[1] - 1.0);
  };
  auto proj = [](std::span<double> x) { x[0] = std::max(x[0], 2.0); };
  const auto r = nelder_mead(f, {3.0, 0.0}, {0.5, 0.5}, proj);
  EXPECT_FALSE(violated);
  EXPECT_NEAR(r.x[0], 2.0, 1e-6);
  EXPECT_NEAR(r.x[1], 1.0, 1e-6);
}

}  // namespace
}  // namespace ep3

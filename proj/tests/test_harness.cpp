#include <gtest/gtest.h>

#include "gerbe/harness.hpp"

namespace gerbe::harness {
namespace {

SuiteConfig small() {
  SuiteConfig c;
  c.kmax = 2;
  c.samples = 2;
  return c;
}

TEST(Config, JsonRoundTrip) {
  SuiteConfig c = small();
  c.p = 3;
  c.mu = {1, 1, 0};
  c.h = 3;
  c.wmax = "3/2";
  c.sabotage_sigma = true;
  EXPECT_EQ(SuiteConfig::from_json(c.to_json()), c);
  EXPECT_EQ(SuiteConfig::from_json(json::parse(c.to_json().dump())), c);
}

TEST(Config, FileValuesLayerOverBase) {
  SuiteConfig base = small();
  auto c = SuiteConfig::from_json(json{{"n", 2}}, base);
  EXPECT_EQ(c.n, 2);
  EXPECT_EQ(c.kmax, base.kmax);
}

TEST(Config, Rejections) {
  EXPECT_THROW(SuiteConfig::from_json(json{{"bogus", 1}}), config_error);
  EXPECT_THROW(SuiteConfig::from_json(json{{"p", "two"}}), config_error);
  EXPECT_THROW(SuiteConfig::from_json(json::array()), config_error);
  SuiteConfig c = small();
  c.p = 4;
  EXPECT_THROW(run("frames", c), config_error);
  c = small();
  c.mu = {2, 0};
  EXPECT_THROW(run("gerbe", c), config_error);
  EXPECT_NO_THROW(run("witt-oracle", c));  // mu only matters for group suites
  c = small();
  c.wmax = "1/5";
  EXPECT_THROW(run("frames", c), config_error);
  EXPECT_THROW(run("nope", small()), config_error);
}

TEST(Explain, CitationTable) {
  EXPECT_EQ(explain("thmC").quote, "{}^sW^{(n)}(R)\\cong B_n(R)/N_n(R)^{\\nil}");
  EXPECT_EQ(explain("inertia").quote, "surjective on objects and full");
  EXPECT_THROW(explain("nope"), std::out_of_range);
}

TEST(Run, ReportSchema) {
  auto r = run("witt-oracle", small());
  ASSERT_TRUE(r.pass());
  json j = r.to_json();
  EXPECT_EQ(j.at("version"), 1);
  EXPECT_EQ(j.at("suite"), "witt-oracle");
  EXPECT_TRUE(j.contains("elapsed_ms"));
  EXPECT_EQ(SuiteConfig::from_json(j.at("config")), small());
  for (auto& c : j.at("checks")) {
    EXPECT_TRUE(c.contains("id"));
    EXPECT_TRUE(c.contains("pass"));
    EXPECT_TRUE(c.contains("witness"));
    EXPECT_TRUE(c.at("paper").contains("loc"));
    EXPECT_TRUE(c.at("paper").contains("quote"));
  }
  EXPECT_EQ(j.at("tables").at("witt.p2L3").at("matched"), 500);
  EXPECT_EQ(exit_code(r), kPass);
}

TEST(Run, DeterministicModuloTiming) {
  for (const char* s : {"frames", "zink", "crys-exact"}) {
    auto a = run(s, small()), b = run(s, small());
    EXPECT_EQ(a.to_json(false).dump(), b.to_json(false).dump()) << s;
  }
}

TEST(Run, SabotagedSigmaFailsWithWitness) {
  SuiteConfig c = small();
  c.sabotage_sigma = true;
  auto r = run("frames", c);
  EXPECT_FALSE(r.pass());
  EXPECT_EQ(exit_code(r), kFail);
  bool found = false;
  for (auto& ch : r.checks)
    if (ch.id == "frames.sabotaged.frobenius_lift") {
      found = true;
      EXPECT_FALSE(ch.pass);
      EXPECT_FALSE(ch.witness.is_null());
    }
  EXPECT_TRUE(found);
}

TEST(Run, ResourceCapGivesPartialReport) {
  SuiteConfig c = small();
  c.samples = 1;
  c.enum_cap = 2;
  auto r = run("gerbe", c);
  EXPECT_TRUE(r.partial);
  EXPECT_EQ(exit_code(r), kResource);
  EXPECT_TRUE(r.to_json().at("partial").get<bool>());
}

TEST(Run, GerbeSuiteContainsOrderTable) {
  auto r = run("gerbe", small());
  EXPECT_TRUE(r.pass()) << r.to_json().dump();
  auto& rows = r.tables.at("E_vs_D");
  ASSERT_EQ(rows.size(), 2u);
  for (auto& row : rows) EXPECT_EQ(row.at("E").at("order"), row.at("D").at("order"));
}

}  // namespace
}  // namespace gerbe::harness

// One PASS/FAIL line per acceptance criterion; runtime limits are part of each criterion.
#include <iostream>

#include "gerbe/harness.hpp"

using namespace gerbe;
using namespace gerbe::harness;

namespace {

struct Run {
  std::string suite;
  SuiteConfig cfg;
  SuiteReport report;
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::vector<Run> runs{};
  double seconds = 0;
  bool pass = true;
  std::string detail{};
};

SuiteConfig with(uint32_t p, int n, int kmax = 4) {
  SuiteConfig c;
  c.p = p;
  c.n = n;
  c.kmax = kmax;
  return c;
}

void execute(Criterion& C, const std::vector<std::pair<std::string, SuiteConfig>>& plan) {
  for (auto& [suite, cfg] : plan) {
    SuiteReport r = run(suite, cfg);
    C.seconds += r.elapsed_ms / 1000.0;
    size_t failed = 0;
    for (auto& ch : r.checks)
      if (!ch.pass) {
        if (failed++ == 0) C.detail += " first failure " + ch.id + ";";
      }
    if (r.partial) C.detail += " partial: " + r.error + ";";
    if (!r.pass()) C.pass = false;
    std::string level = suite == "witt-oracle" ? "L" + std::to_string(cfg.lmax) : "n" + std::to_string(cfg.n);
    C.detail += " " + suite + "[p" + std::to_string(cfg.p) + level + "] " +
                std::to_string(r.checks.size() - failed) + "/" + std::to_string(r.checks.size()) + ";";
    C.runs.push_back({suite, cfg, std::move(r)});
  }
  if (C.seconds > C.limit_s) {
    C.pass = false;
    C.detail += " runtime over limit;";
  }
}

bool has_check(const Criterion& C, const std::string& prefix, size_t min_count) {
  size_t n = 0;
  for (auto& r : C.runs)
    for (auto& ch : r.report.checks) n += ch.id.rfind(prefix, 0) == 0;
  return n >= min_count;
}

}  // namespace

int main() {
  std::vector<Criterion> cs;

  Criterion c1{1, "Witt oracle equivalence", 10};
  {
    std::vector<std::pair<std::string, SuiteConfig>> plan;
    for (uint32_t p : {2u, 3u})
      for (int L : {2, 3}) {
        SuiteConfig c = with(p, 1);
        c.lmax = L;
        plan.push_back({"witt-oracle", c});
      }
    execute(c1, plan);
    for (auto& r : c1.runs) {
      auto t = r.report.tables.at("witt.p" + std::to_string(r.cfg.p) + "L" + std::to_string(r.cfg.lmax));
      if (t.at("matched") != 500) c1.pass = false;
    }
  }
  cs.push_back(c1);

  Criterion c2{2, "Frame-axiom suite with sabotage control", 60};
  execute(c2, {{"frames", with(2, 1)}, {"frames", with(2, 2)}, {"frames", with(3, 1)}, {"frames", with(3, 2)}});
  if (!has_check(c2, "frames.sabotage_detected", 4)) c2.pass = false;
  cs.push_back(c2);

  Criterion c3{3, "Exactness, square-zero, leveled and sigma-dot nilpotent", 120};
  execute(c3, {{"crys-exact", with(2, 1)}, {"crys-exact", with(2, 2)}});
  cs.push_back(c3);

  Criterion c4{4, "Sheared Witt vectors as B_n / N_n^nil per weight", 300};
  execute(c4, {{"sheared", with(2, 1)}, {"sheared", with(3, 1)}, {"sheared", with(2, 2)}});
  cs.push_back(c4);

  Criterion c5{5, "Inertia gerbe at GL_2, mu = (1,0), p = 2, n = 1", 900};
  execute(c5, {{"gerbe", with(2, 1)}});
  if (!has_check(c5, "gerbe.objects_lift", 1) || !has_check(c5, "gerbe.morphisms_lift", 1) ||
      !has_check(c5, "gerbe.compare.elementary_divisors_equal", 1) || !has_check(c5, "gerbe.compare.stable_at_cap_plus_1", 1))
    c5.pass = false;
  cs.push_back(c5);

  Criterion c6{6, "Zink complexes: H^-1 = 0, pair ranks, GL_1 band", 120};
  execute(c6, {{"zink", with(2, 1)}, {"zink", with(2, 2)}, {"zink", with(3, 1)}});
  cs.push_back(c6);

  Criterion c7{7, "Unique lifting: gamma-dot round trips and gamma_g bijective", 60};
  execute(c7, {{"lifting", with(2, 1, 2)}, {"lifting", with(2, 2, 2)}, {"lifting", with(3, 1, 2)}});
  cs.push_back(c7);

  Criterion c8{8, "Determinism of reports modulo timing", 1e9};
  {
    size_t compared = 0, differ = 0;
    for (auto* c : {&c1, &c2, &c3, &c4, &c5, &c6, &c7})
      for (auto& r : c->runs) {
        SuiteReport again = run(r.suite, r.cfg);
        ++compared;
        if (again.to_json(false).dump() != r.report.to_json(false).dump()) {
          ++differ;
          c8.detail += " differs: " + r.suite + ";";
        }
        c8.seconds += again.elapsed_ms / 1000.0;
      }
    c8.pass = differ == 0 && compared > 0;
    c8.detail += " " + std::to_string(compared - differ) + "/" + std::to_string(compared) + " reruns identical;";
  }
  cs.push_back(c8);

  bool all = true;
  for (auto& c : cs) {
    all = all && c.pass;
    std::string limit = c.limit_s < 1e8 ? ", limit " + std::to_string((int)c.limit_s) + "s" : "";
    std::printf("criterion %d: %s  %s (%.1fs%s)%s\n", c.id, c.pass ? "PASS" : "FAIL", c.name.c_str(), c.seconds,
                limit.c_str(), c.detail.c_str());
  }
  return all ? 0 : 1;
}

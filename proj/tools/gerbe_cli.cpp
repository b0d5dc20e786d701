#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "gerbe/harness.hpp"

using namespace gerbe;
using namespace gerbe::harness;

namespace {

std::vector<int> parse_mu(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw config_error("mu: not an integer list: " + s);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gerbe-cli: verification suites for truncated displays and their gerbes"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run a suite and write a JSON report");
  run_cmd->set_help_flag("--help", "print this help");
  SuiteConfig flags;
  std::string suite = "all", out, config_path, mu_str = "1,0";
  run_cmd->add_option("--suite", suite, "witt-oracle | frames | sheared | crys-exact | zink | lifting | gerbe | all");
  run_cmd->add_option("--config", config_path, "JSON config file; explicit flags take precedence over its values");
  run_cmd->add_option("--out", out, "report path (stdout when absent)");
  auto* o_p = run_cmd->add_option("--p", flags.p, "prime");
  auto* o_n = run_cmd->add_option("--n", flags.n, "truncation level");
  auto* o_h = run_cmd->add_option("--h", flags.h, "GL_h");
  auto* o_mu = run_cmd->add_option("--mu", mu_str, "cocharacter weights, comma separated");
  auto* o_cut = run_cmd->add_option("--cut", flags.cut, "ring cut c in R = F_p[x^{1/p^inf}]/(x^c)");
  auto* o_kmax = run_cmd->add_option("--kmax", flags.kmax, "largest p-power denominator of weights");
  auto* o_wmax = run_cmd->add_option("--wmax", flags.wmax, "weight cap of the window");
  auto* o_lmax = run_cmd->add_option("--lmax", flags.lmax, "Witt length for the oracle suite");
  auto* o_res = run_cmd->add_option("--reserve", flags.reserve, "p-adic precision reserve");
  auto* o_seed = run_cmd->add_option("--seed", flags.seed, "rng seed");
  auto* o_samples = run_cmd->add_option("--samples", flags.samples, "sampled objects and morphisms");
  auto* o_cap = run_cmd->add_option("--enum-cap", flags.enum_cap, "enumeration cap");
  auto* o_sab = run_cmd->add_flag("--sabotage-sigma", flags.sabotage_sigma, "also report the sabotaged frame itself");
  bool no_timing = false;
  run_cmd->add_flag("--no-timing", no_timing, "omit elapsed_ms from the report");

  auto* explain_cmd = app.add_subcommand("explain", "print the paper statement behind a check id");
  std::string explain_id;
  explain_cmd->add_option("id", explain_id, "check id")->required();
  auto* list_cmd = app.add_subcommand("list", "list suites and check ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kConfig;
  }

  if (*list_cmd) {
    json j{{"suites", suite_names()}, {"ids", json::array()}};
    for (auto& [id, c] : citations()) j["ids"].push_back(id);
    std::cout << j.dump(2) << "\n";
    return kPass;
  }
  if (*explain_cmd) {
    try {
      Citation c = explain(explain_id);
      std::cout << json{{"id", explain_id}, {"loc", c.loc}, {"quote", c.quote}}.dump(2) << "\n";
      return kPass;
    } catch (const std::out_of_range& e) {
      std::cerr << e.what() << "\n";
      return kConfig;
    }
  }

  // defaults < config file < explicit flags
  SuiteConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw config_error("cannot read config file " + config_path);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw config_error(std::string("config file is not JSON: ") + e.what());
      }
      cfg = SuiteConfig::from_json(j, cfg);
    }
    if (o_p->count()) cfg.p = flags.p;
    if (o_n->count()) cfg.n = flags.n;
    if (o_h->count()) cfg.h = flags.h;
    if (o_mu->count()) cfg.mu = parse_mu(mu_str);
    if (o_h->count() && !o_mu->count() && cfg.mu.size() != cfg.h) {
      cfg.mu.assign(cfg.h, 0);
      cfg.mu[0] = 1;
    }
    if (o_cut->count()) cfg.cut = flags.cut;
    if (o_kmax->count()) cfg.kmax = flags.kmax;
    if (o_wmax->count()) cfg.wmax = flags.wmax;
    if (o_lmax->count()) cfg.lmax = flags.lmax;
    if (o_res->count()) cfg.reserve = flags.reserve;
    if (o_seed->count()) cfg.seed = flags.seed;
    if (o_samples->count()) cfg.samples = flags.samples;
    if (o_cap->count()) cfg.enum_cap = flags.enum_cap;
    if (o_sab->count()) cfg.sabotage_sigma = flags.sabotage_sigma;

    SuiteReport rep = run(suite, cfg);
    std::string text = rep.to_json(!no_timing).dump(2) + "\n";
    if (out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out);
      if (!f) throw config_error("cannot write report to " + out);
      f << text;
    }
    size_t failed = std::count_if(rep.checks.begin(), rep.checks.end(), [](const CheckRecord& c) { return !c.pass; });
    std::cerr << suite << ": " << rep.checks.size() - failed << "/" << rep.checks.size() << " checks pass"
              << (rep.partial ? " (partial: " + rep.error + ")" : "") << "\n";
    return exit_code(rep);
  } catch (const config_error& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kConfig;
  }
}

#ifndef GERBE_HARNESS_HPP
#define GERBE_HARNESS_HPP

#include <chrono>
#include <fstream>

#include "zink.hpp"

namespace gerbe::harness {

struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SuiteConfig {
  uint32_t p = 2;
  int n = 1;
  size_t h = 2;
  std::vector<int> mu{1, 0};
  std::string cut = "1";
  int kmax = 4;
  std::string wmax = "2";
  int lmax = 3;
  int reserve = 2;
  uint64_t seed = 1;
  int samples = 10;
  size_t enum_cap = 1u << 16;
  bool sabotage_sigma = false;

  bool operator==(const SuiteConfig&) const = default;

  json to_json() const {
    return json{{"p", p},           {"n", n},         {"h", h},       {"mu", mu},
                {"cut", cut},       {"kmax", kmax},   {"wmax", wmax}, {"lmax", lmax},
                {"reserve", reserve}, {"seed", seed}, {"samples", samples}, {"enum_cap", enum_cap},
                {"sabotage_sigma", sabotage_sigma}};
  }

  // Keys present in j replace the values of base.
  static SuiteConfig from_json(const json& j, SuiteConfig base) {
    static const std::set<std::string> known{"p",    "n",       "h",    "mu",      "cut",      "kmax",          "wmax",
                                             "lmax", "reserve", "seed", "samples", "enum_cap", "sabotage_sigma"};
    if (!j.is_object()) throw config_error("config must be a JSON object");
    for (auto& [k, v] : j.items())
      if (!known.count(k)) throw config_error("unknown config key: " + k);
    try {
      auto get = [&](const char* k, auto& dst) {
        if (j.contains(k)) j.at(k).get_to(dst);
      };
      get("p", base.p);
      get("n", base.n);
      get("h", base.h);
      get("mu", base.mu);
      get("cut", base.cut);
      get("kmax", base.kmax);
      get("wmax", base.wmax);
      get("lmax", base.lmax);
      get("reserve", base.reserve);
      get("seed", base.seed);
      get("samples", base.samples);
      get("enum_cap", base.enum_cap);
      get("sabotage_sigma", base.sabotage_sigma);
    } catch (const json::exception& e) {
      throw config_error(std::string("bad config value: ") + e.what());
    }
    return base;
  }

  static SuiteConfig from_json(const json& j) { return from_json(j, SuiteConfig{}); }

  Weight cut_weight() const { return parse_weight(cut, "cut"); }
  Weight wmax_weight() const { return parse_weight(wmax, "wmax"); }

  void validate(bool needs_group) const {
    if (!padic::is_prime(p) || p > 7) throw config_error("p must be a prime <= 7");
    if (n < 1 || n > 3) throw config_error("n must be in 1..3");
    if (kmax < 1 || lmax < 1 || reserve < 1 || samples < 1 || enum_cap < 1) throw config_error("caps must be positive");
    if (h < 1 || mu.size() != h) throw config_error("mu must have h entries");
    if (needs_group && !Cochar{mu}.one_bounded()) throw config_error("mu must be 1-bounded");
    try {
      CrysSetup::make(p, n, cut_weight(), kmax, wmax_weight(), reserve);
    } catch (const config_error&) {
      throw;
    } catch (const std::exception& e) {
      throw config_error(e.what());
    }
  }

  CrysSetup setup() const { return CrysSetup::make(p, n, cut_weight(), kmax, wmax_weight(), reserve); }
  CrysSetup setup_next() const {
    return CrysSetup::make(p, n, cut_weight(), kmax, wmax_weight() + Weight::integer(p, 1), reserve);
  }

 private:
  Weight parse_weight(const std::string& s, const char* what) const {
    try {
      return Weight::parse(p, s);
    } catch (const std::exception& e) {
      throw config_error(std::string(what) + ": " + e.what());
    }
  }
};

// ---- report-to-paper map ----

struct Citation {
  std::string loc;
  std::string quote;
};

inline const std::map<std::string, Citation>& citations() {
  static const std::map<std::string, Citation> table{
      {"witt", {"none: arithmetic substrate", ""}},
      {"frame", {"frames, definition", "consists of a ${\\mathbb{Z}}$-graded ring"}},
      {"sabotage", {"none: negative control", ""}},
      {"exact", {"crystalline frames, truncation sequences", "induced by multiplication by $p^n$"}},
      {"square-zero", {"fundamental diagram, square-zero kernel", "has square zero"}},
      {"leveled", {"leveled ideals, definition", "is locally nilpotent"}},
      {"thmC", {"sheared Witt vectors as a quotient of B_n", "{}^sW^{(n)}(R)\\cong B_n(R)/N_n(R)^{\\nil}"}},
      {"zink", {"Zink complex, vanishing of H^{-1}", "H^{-1}(Z_R(\\u M)(N))=0"}},
      {"zink-unit", {"Zink complex, pointwise nilpotence", "is pointwise nilpotent since"}},
      {"pair-rank", {"n-smooth groups from pairs", "a pair $(M,\\phi)$ where"}},
      {"inertia", {"inertia of the truncation functor", "surjective on objects and full"}},
      {"inertia-abelian", {"inertia group", "is abelian"}},
      {"psi-hom", {"fundamental diagram, psi_g", "is a group homomorphism"}},
      {"psi-exact", {"fundamental diagram, psi_g", "exact sequence of pointed sets"}},
      {"compare", {"inertia versus Drinfeld sections", "E_n^{G,\\mu}(R,g)\\cong D_n^{G,\\mu}(R,\\bar g)"}},
      {"gamma-bijective", {"unique lifting", "and $\\gamma_{g}$ is bijective"}},
      {"functorial", {"inertia versus Drinfeld sections", "which is functorial in $R$ and $g$"}},
  };
  return table;
}

inline Citation explain(const std::string& id) {
  auto it = citations().find(id);
  if (it == citations().end()) throw std::out_of_range("unknown check id: " + id);
  return it->second;
}

// ---- reports ----

struct CheckRecord {
  std::string id;
  bool pass = true;
  json witness;
  std::string cite;
  json to_json() const {
    const Citation& c = citations().at(cite);
    json j{{"id", id}, {"pass", pass}, {"paper", {{"loc", c.loc}, {"quote", c.quote}}}};
    j["witness"] = pass ? json() : witness;
    return j;
  }
};

struct SuiteReport {
  std::string suite;
  SuiteConfig config;
  std::vector<CheckRecord> checks;
  json tables = json::object();
  bool partial = false;
  std::string error;
  double elapsed_ms = 0;

  bool pass() const {
    if (partial) return false;
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
  }
  json to_json(bool timing = true) const {
    json cs = json::array();
    for (auto& c : checks) cs.push_back(c.to_json());
    json j{{"version", 1}, {"suite", suite}, {"config", config.to_json()}, {"checks", cs}, {"tables", tables},
           {"pass", pass()}};
    if (partial) {
      j["partial"] = true;
      j["error"] = error;
    }
    if (timing) j["elapsed_ms"] = elapsed_ms;
    return j;
  }
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> s{"witt-oracle", "frames", "sheared", "crys-exact", "zink", "lifting", "gerbe"};
  return s;
}

namespace detail {

inline std::string tag(const SuiteConfig& c) { return "p" + std::to_string(c.p) + "n" + std::to_string(c.n); }

inline void add_report(SuiteReport& out, const std::string& prefix, const Report& r, const std::string& cite) {
  for (auto& c : r.checks) out.checks.push_back({prefix + "." + c.name, c.pass, c.witness, cite});
}

inline void add(SuiteReport& out, const std::string& id, bool pass, json witness, const std::string& cite) {
  out.checks.push_back({id, pass, std::move(witness), cite});
}

inline void suite_witt(SuiteReport& out, const SuiteConfig& cfg) {
  const uint32_t p = cfg.p;
  const int L = cfg.lmax;
  const std::string t = "witt.p" + std::to_string(p) + "L" + std::to_string(L);
  const auto& T = build_tables(p, L);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> d(-20, 20);
  int matched = 0;
  json witness;
  const int cases = 500;
  for (int it = 0; it < cases; ++it) {
    std::vector<bigint> a(L + 1), b(L);
    for (auto& x : a) x = d(rng);
    for (auto& x : b) x = d(rng);
    std::vector<bigint> aL(a.begin(), a.begin() + L);
    bool ok = true;
    for (auto op : {WittOp::add, WittOp::mul, WittOp::ver})
      if (table_eval(op, aL, b, T) != ghost_oracle(op, aL, b, p, L)) ok = false;
    if (table_eval(WittOp::frob, a, b, T) != ghost_oracle(WittOp::frob, a, b, p, L)) ok = false;
    if (ok) ++matched;
    else if (witness.is_null()) {
      json ja = json::array(), jb = json::array();
      for (auto& x : a) ja.push_back(x.str());
      for (auto& x : b) jb.push_back(x.str());
      witness = json{{"case", it}, {"a", ja}, {"b", jb}};
    }
  }
  add(out, t + ".ghost_oracle", matched == cases, witness, "witt");
  out.tables[t] = json{{"cases", cases}, {"matched", matched}};
  // (1,0) + (1,0) = (0,1) in W_2(F_2); [1] + [2] = 0 in W_2(F_3)
  auto F2 = make_prime_field(2);
  WittVector s = witt_add(witt_one(F2, 2), witt_one(F2, 2));
  add(out, "witt.fixed.W2F2_one_plus_one", s[0].is_zero() && s[1] == GradedElement::constant(F2, 1), s.to_json(),
      "witt");
  auto F3 = make_prime_field(3);
  WittVector u = witt_add(teichmuller(GradedElement::constant(F3, 1), 2), teichmuller(GradedElement::constant(F3, 2), 2));
  add(out, "witt.fixed.W2F3_teich1_plus_teich2", u.is_zero(), u.to_json(), "witt");
}

inline void suite_frames(SuiteReport& out, const SuiteConfig& cfg) {
  auto S = cfg.setup();
  auto C = build_crys(S);
  auto W = S.window();
  W.seed = cfg.seed;
  for (auto F : {C.Wn, C.sW, C.An, C.Bn})
    add_report(out, "frames." + tag(cfg) + "." + F->name(), validate_frame(*F, W), "frame");
  // negative control: killing the Frobenius lift must be caught with a witness
  auto bad = std::make_shared<SabotagedSigmaFrame>(witt_perfect_frame(cfg.p, S.cap()));
  auto rep = validate_frame(*bad, make_window(cfg.p, 1, Weight::integer(cfg.p, 1), -1, 1));
  const Check* c = rep.find("frobenius_lift");
  bool caught = c && !c->pass && !c->witness.is_null();
  add(out, "frames.sabotage_detected", caught, rep.to_json(), "sabotage");
  out.tables["sabotage_witness"] = c ? c->witness : json();
  if (cfg.sabotage_sigma) add_report(out, "frames.sabotaged", rep, "sabotage");
}

inline void suite_sheared(SuiteReport& out, const SuiteConfig& cfg) {
  auto S = cfg.setup();
  auto C = build_crys(S);
  auto R = theoremC_compare(C, S.window());
  add(out, "sheared." + tag(cfg) + ".kappa_bijective_per_weight", R.pass, R.witness, "thmC");
  out.tables["thmC." + tag(cfg)] = R.to_json().at("rows");
}

inline void suite_crys(SuiteReport& out, const SuiteConfig& cfg) {
  auto S = cfg.setup();
  auto C = build_crys(S);
  auto W = S.window();
  auto R = exact_sequence_reports(C, W);
  for (auto& c : R.report.checks)
    out.checks.push_back({"crys." + tag(cfg) + "." + c.name, c.pass, c.witness,
                          c.name.find("square_zero") != std::string::npos ? "square-zero" : "exact"});
  out.tables["exact." + tag(cfg)] = R.table;
  for (auto* K : {&C.Nn, &C.sNn}) {
    auto L = leveled_data(*K, W);
    add(out, "crys." + tag(cfg) + "." + K->name + ".leveled", L.leveled, L.to_json(), "leveled");
    if (K == &C.sNn) add(out, "crys." + tag(cfg) + "." + K->name + ".sigma_dot_nilpotent", L.nilpotent_mod_p, L.to_json(), "leveled");
  }
}

inline void suite_zink(SuiteReport& out, const SuiteConfig& cfg) {
  auto S = cfg.setup();
  auto C = build_crys(S);
  const uint32_t p = cfg.p;
  auto ws = window_weights(p, S.kmax, S.wmax);
  auto wn = window_weights(p, S.kmax, S.wmax + Weight::integer(p, 1));
  auto low = window_weights(p, S.kmax, S.c);
  std::mt19937_64 rng(cfg.seed);
  auto one = gm::identity(*C.W, Cochar::trivial(1));
  std::vector<FrameIdeal> ideals{FrameIdeal{"0", C.W, [](int, const Weight&) { return 1 << 20; }}};
  for (int m = 1; m <= cfg.n; ++m) ideals.push_back(witt_ideal(C.W, S.c.times_ppow(-m), "W(R[F^" + std::to_string(m) + "])"));
  std::vector<FrameModule> displays{{C.W, {1}, one, "unit"}, {C.W, {0}, one, "etale"},
                                    {C.W, {0, 1}, gm::random_unit0(*C.W, 2, low, rng), "M01"},
                                    {C.W, {0, 1, 1}, gm::random_unit0(*C.W, 3, low, rng), "M011"}};
  auto mu_d = [](size_t h, size_t d) {
    std::vector<int> m(h, 0);
    for (size_t i = 0; i < d; ++i) m[i] = 1;
    return Cochar{m};
  };
  json ranks = json::object();
  for (auto [h, d] : {std::pair<size_t, size_t>{2, 1}, {3, 1}, {3, 2}}) {
    auto M = shift(lie_realization(C.W, mu_d(h, d), gm::random_unit0(*C.W, h, low, rng)), -1);
    M.name = "Lie(GL" + std::to_string(h) + ",mu" + std::to_string(d) + ")(-1)";
    displays.push_back(M);
    int r = smooth_pair_of(M).rank;
    ranks[M.name] = r;
    add(out, "zink.pair_rank.h" + std::to_string(h) + "d" + std::to_string(d), r == (int)(d * (h - d)),
        json{{"rank", r}, {"expected", d * (h - d)}}, "pair-rank");
  }
  displays.push_back(tensor(displays[2], displays[0]));
  json table = json::object();
  bool hm1 = true, stable = true;
  json w1, w2;
  for (auto& M : displays)
    for (auto& N : ideals) {
      auto z = zink_complex(M, N, ws, wn);
      table[M.name + "|" + N.name] = json{{"H-1", z.h_minus1}, {"H0", z.h0}};
      if (z.h_minus1 != 0 && hm1) hm1 = false, w1 = json{{"display", M.to_json()}, {"ideal", N.name}};
      if (!z.stable && stable) stable = false, w2 = json{{"display", M.name}, {"ideal", N.name}};
      if (M.name == "unit")
        add(out, "zink.unit_display_H0_zero." + N.name, z.h0.empty(), z.to_json(), "zink-unit");
    }
  add(out, "zink.H-1_vanishes", hm1, w1, "zink");
  add(out, "zink.stable_at_cap_plus_1", stable, w2, "zink");
  // additivity on consecutive pairs
  bool additive = true;
  json w3;
  for (size_t i = 0; i + 1 < displays.size(); ++i) {
    auto& N = ideals.back();
    auto a = zink_complex(displays[i], N, ws, wn), b = zink_complex(displays[i + 1], N, ws, wn);
    auto s = zink_complex(direct_sum(displays[i], displays[i + 1]), N, ws, wn);
    std::vector<int> both = a.h0;
    both.insert(both.end(), b.h0.begin(), b.h0.end());
    std::sort(both.begin(), both.end());
    if (s.h0 != both && additive) additive = false, w3 = json{{"pair", i}};
  }
  add(out, "zink.additivity", additive, w3, "zink");
  // GL_1 band
  bool gl1 = true;
  for (auto mu : {Cochar{{0}}, Cochar{{1}}}) {
    auto G = GerbeContext{C, mu, ws};
    for (int t = 0; t < 3; ++t) {
      auto D = drinfeld_sections(G, random_object_bar(G, rng));
      if (!D.divisors.empty() || D.h_minus1 != 0) gl1 = false;
    }
  }
  add(out, "zink.GL1_band_trivial", gl1, json(), "zink-unit");
  out.tables["zink." + tag(cfg)] = table;
  out.tables["pair_rank"] = ranks;
}

inline void suite_gerbe(SuiteReport& out, const SuiteConfig& cfg) {
  auto S = cfg.setup();
  Cochar mu{cfg.mu};
  auto G = GerbeContext::make(S, mu, cfg.enum_cap);
  auto G2 = GerbeContext::make(cfg.setup_next(), mu, cfg.enum_cap);
  std::mt19937_64 rng(cfg.seed);
  json rows = json::array();
  // (c) E vs D per object
  std::map<std::string, std::pair<bool, json>> agg;
  static const std::map<std::string, std::string> cite{
      {"H-1_vanishes", "compare"},         {"orders_equal", "compare"},       {"elementary_divisors_equal", "compare"},
      {"inertia_verified", "inertia"},     {"inertia_abelian", "inertia-abelian"}, {"psi_lands_in_E", "psi-exact"},
      {"psi_homomorphism", "psi-hom"},     {"psi_kills_gamma_image", "psi-exact"}, {"psi_surjective", "psi-exact"},
      {"stable_at_cap_plus_1", "compare"}};
  std::vector<std::string> order;
  for (int s = 0; s < cfg.samples; ++s) {
    GMat gb = random_object_bar(G, rng);
    auto r = compare_inertia_drinfeld(G, gb, &G2);
    json row = r.table;
    row["object"] = s;
    rows.push_back(row);
    for (auto& c : r.report.checks) {
      if (!agg.count(c.name)) {
        agg[c.name] = {true, json()};
        order.push_back(c.name);
      }
      if (!c.pass && agg[c.name].first) agg[c.name] = {false, json{{"object", s}, {"gbar", gb.to_json()}, {"detail", c.witness}}};
    }
  }
  for (auto& name : order) add(out, "gerbe.compare." + name, agg[name].first, agg[name].second, cite.at(name));
  out.tables["E_vs_D"] = rows;
  // (a), (b)
  add_report(out, "gerbe", surjective_full_check(G, cfg.samples, cfg.seed + 1), "inertia");
  // functoriality in g
  for (int s = 0; s < std::min(cfg.samples, 3); ++s) {
    GMat gb = random_object_bar(G, rng), hb = random_morphism_bar(G, rng);
    add_report(out, "gerbe.functoriality." + std::to_string(s), conjugation_functoriality(G, gb, hb), "functorial");
  }
}

// Unique lifting: product-formula inverse of gamma-dot over sN_n, and gamma_g bijective per window.
inline void suite_lifting(SuiteReport& out, const SuiteConfig& cfg) {
  auto S = cfg.setup();
  Cochar mu{cfg.mu};
  auto G = GerbeContext::make(S, mu);
  std::mt19937_64 rng(cfg.seed);
  const CrysFrames& C = G.C;
  const Frame& B = *C.Bn;
  const size_t h = mu.h();
  int ok = 0, maxsteps = 0;
  json w;
  for (int t = 0; t < 100; ++t) {
    GMat g = gm::random_unit0(B, h, G.below_cut(), rng);
    GMat Y = gm::zero(Cochar::trivial(h));
    for (auto& e : Y.e)
      for (auto& a : G.weights) {
        int sz = C.sNn.size(0, a);
        if (sz <= 0 || rng() % 3) continue;
        int64_t q = rng() % padic::pw(cfg.p, sz);
        fe::add_term(B, e, a, padic::mulmod(q, ppow_res(cfg.p, C.sNn.depth(0, a), B.cap()), B.modulus()));
      }
    GMat y = gm::reduce(B, gm::add(B, gm::identity(B, Cochar::trivial(h)), Y));
    auto inv = dot_gamma_inverse(C.sNn, mu, g, y);
    maxsteps = std::max(maxsteps, inv.steps);
    if (dot_gamma_g(C.sNn, mu, g, inv.x) == y && gamma_g(B, g, tau_inv_ideal(C.sNn, inv.x, mu)) == y) ++ok;
    else if (w.is_null()) w = json{{"g", g.to_json()}, {"y", y.to_json()}};
  }
  add(out, "lifting." + tag(cfg) + ".round_trip", ok == 100, w, "gamma-bijective");
  out.tables["lifting." + tag(cfg)] = json{{"cases", 100}, {"ok", ok}, {"max_nilpotence_steps", maxsteps}};
  // bijectivity on the coarsest nontrivial window: denominators p, weights up to c / p
  auto wsmall = window_weights(cfg.p, 1, S.c.times_ppow(-1));
  for (int t = 0; t < 2; ++t) {
    GMat g = gm::random_unit0(B, h, wsmall, rng);
    auto c = gamma_bijectivity_check(C.sNn, mu, g, wsmall, cfg.enum_cap);
    add(out, "lifting." + tag(cfg) + ".gamma_bijective." + std::to_string(t), c.pass, c.witness, "gamma-bijective");
  }
}

}  // namespace detail

// Runs one suite (or "all").  Config errors propagate as config_error; resource caps yield a partial report.
inline SuiteReport run(const std::string& suite, const SuiteConfig& cfg) {
  static const std::map<std::string, void (*)(SuiteReport&, const SuiteConfig&)> fns{
      {"witt-oracle", detail::suite_witt}, {"frames", detail::suite_frames}, {"sheared", detail::suite_sheared},
      {"crys-exact", detail::suite_crys},  {"zink", detail::suite_zink},     {"lifting", detail::suite_lifting},
      {"gerbe", detail::suite_gerbe}};
  if (suite != "all" && !fns.count(suite)) throw config_error("unknown suite: " + suite);
  cfg.validate(suite == "gerbe" || suite == "lifting" || suite == "all");
  SuiteReport out;
  out.suite = suite;
  out.config = cfg;
  auto t0 = std::chrono::steady_clock::now();
  try {
    if (suite == "all")
      for (auto& s : suite_names()) fns.at(s)(out, cfg);
    else
      fns.at(suite)(out, cfg);
  } catch (const precision_error& e) {
    out.partial = true;
    out.error = e.what();
  } catch (const std::length_error& e) {
    out.partial = true;
    out.error = e.what();
  }
  out.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

enum ExitCode { kPass = 0, kFail = 1, kConfig = 2, kResource = 3 };

inline int exit_code(const SuiteReport& r) { return r.partial ? kResource : r.pass() ? kPass : kFail; }

}  // namespace gerbe::harness

#endif

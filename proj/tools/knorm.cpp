// knorm: Galois-module structure of mod-p Milnor K-groups of local fields.

#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "knorm/euler.hpp"
#include "knorm/io.hpp"
#include "knorm/milnor.hpp"
#include "knorm/structure.hpp"

using namespace knorm;
using io::json;

namespace {

enum Exit { kPass = 0, kCheck = 1, kInput = 2, kPrecision = 3 };

struct Config {
  std::string spec = "Q2";
  std::vector<std::string> a;
  std::string n;
  std::optional<int> precision;
  bool json_out = false;
  std::string suite = "all";
  std::string manual;
  bool inject_fault = false;
};

std::vector<int> parse_degrees(const std::string& text, std::vector<int> fallback) {
  if (text.empty()) return fallback;
  std::set<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    int lo = 0, hi = 0;
    try {
      if (auto dash = part.find('-'); dash != std::string::npos && dash > 0) {
        lo = std::stoi(part.substr(0, dash));
        hi = std::stoi(part.substr(dash + 1));
      } else {
        lo = hi = std::stoi(part);
      }
    } catch (const std::exception&) {
      throw InputError("bad degree list '" + text + "'");
    }
    if (lo < 0 || hi > 4 || lo > hi) throw InputError("degrees must lie in 0..4, got '" + part + "'");
    for (int d = lo; d <= hi; ++d) out.insert(d);
  }
  return {out.begin(), out.end()};
}

std::string class_label(const milnor::KGroup& g, const fplin::Vec& c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!c[i]) continue;
    if (!out.empty()) out += "*";
    out += g.labels[i];
    if (c[i] != 1) out += "^" + std::to_string(c[i]);
  }
  return out.empty() ? "1" : out;
}

struct Extension {
  std::string text;
  fplin::Vec cls;
};

/// Requested Kummer lines, sorted by class coordinates; every line when no
/// --a is given.
std::vector<Extension> extensions(const milnor::LocalK& K, const Config& cfg) {
  std::vector<Extension> out;
  const auto& g = *K.group(1);
  if (cfg.a.empty()) {
    for (auto& v : euler::all_lines(K)) out.push_back({class_label(g, v), v});
  } else {
    for (const auto& t : cfg.a) {
      auto v = K.class_of(io::parse_element(K.field(), t));
      if (fplin::is_zero(v)) throw InputError("a = " + t + ": a is a p-th power; extension degenerate");
      out.push_back({t, v});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Extension& x, const Extension& y) { return x.cls < y.cls; });
  return out;
}

class Run {
 public:
  Run(const Config& cfg) : cfg_(cfg) {}

  json report = json::object();
  std::size_t checks = 0, failures = 0;

  void record(json& block, const std::vector<milnor::CheckItem>& items) {
    if (!block.contains("checks")) block["checks"] = json::array();
    for (const auto& c : items) {
      ++checks;
      if (!c.pass) {
        ++failures;
        block["pass"] = false;
        human("  FAIL " + c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));
      }
    }
    for (auto& j : io::to_json(items)) block["checks"].push_back(std::move(j));
    if (!block.contains("pass")) block["pass"] = true;
  }

  void human(const std::string& line) const {
    if (!cfg_.json_out) std::cout << line << "\n";
  }

  const milnor::KummerK& kummer(const milnor::LocalK& K, const fplin::Vec& a) {
    const auto& k = K.kummer(a);
    if (cfg_.inject_fault && !injected_) {
      injected_ = true;
      auto m = k.sigma_matrix();
      m.set(0, 0, (m.at(0, 0) + 1) % m.p());
      k.override_sigma(m);
    }
    return k;
  }

  /// Runs fn on one result block; mathematical failures inside it fail
  /// the block instead of aborting the run.
  template <class Fn>
  void block(json base, Fn&& fn) {
    try {
      fn(base);
    } catch (const CheckFailure& e) {
      ++checks;
      ++failures;
      base["pass"] = false;
      base["error"] = e.what();
      human("  FAIL " + std::string(e.what()));
    }
    if (!base.contains("pass")) base["pass"] = true;
    report["results"].push_back(std::move(base));
  }

 private:
  const Config& cfg_;
  bool injected_ = false;
};

json header(const milnor::LocalK& K) {
  return json{{"version", io::kVersion},
              {"field", io::field_summary(K)},
              {"complement_rule", structure::kComplementRule},
              {"results", json::array()}};
}

std::string inv_line(const structure::Invariants& i) {
  std::ostringstream os;
  os << "d=" << i.d << " e=" << i.e << " U1=" << i.upsilon1 << " U2=" << i.upsilon2 << " y=" << i.y << " z=" << i.z;
  return os.str();
}

int finish(Run& run, const Config& cfg) {
  run.report["status"] = run.failures ? "fail" : "pass";
  run.report["checks"] = run.checks;
  run.report["failures"] = run.failures;
  if (cfg.json_out)
    std::cout << run.report.dump(2) << "\n";
  else
    std::cout << "status: " << (run.failures ? "fail" : "pass") << " (" << run.checks << " checks, " << run.failures
              << " failed)\n";
  return run.failures ? kCheck : kPass;
}

int cmd_field(const Config& cfg) {
  auto F = io::load_field(cfg.spec, cfg.precision);
  if (!F->has_mu_p()) throw InputError("primitive p-th root of unity required");
  milnor::LocalK K(F);
  auto summary = io::field_summary(K);
  if (cfg.json_out) {
    json r{{"version", io::kVersion}, {"field", summary}, {"results", json::array()}, {"status", "pass"}};
    std::cout << r.dump(2) << "\n";
  } else {
    std::cout << F->describe() << "\n";
    std::cout << (F->ramification() > 1 ? "ramified" : "unramified") << ", mu_p present\n";
    std::cout << "dim k1 = " << K.group(1)->dim() << ", basis [";
    const auto& labels = K.group(1)->labels;
    for (std::size_t i = 0; i < labels.size(); ++i) std::cout << (i ? ", " : "") << labels[i];
    std::cout << "]\n";
  }
  return kPass;
}

int cmd_kgroup(const Config& cfg) {
  milnor::LocalK K(io::load_field(cfg.spec, cfg.precision));
  Run run(cfg);
  run.report = header(K);
  const auto degrees = parse_degrees(cfg.n, {0, 1, 2, 3});
  if (cfg.a.empty()) {
    for (int n : degrees) {
      run.block(json{{"n", n}}, [&](json& b) {
        const auto g = K.group(n);
        b["dim"] = g->dim();
        b["basis"] = g->labels;
        run.human("k" + std::to_string(n) + "F: dim " + std::to_string(g->dim()));
      });
    }
    return finish(run, cfg);
  }
  for (const auto& ext : extensions(K, cfg)) {
    const auto& k = run.kummer(K, ext.cls);
    for (int n : degrees) {
      run.block(json{{"a", ext.text}, {"a_class", io::to_json(ext.cls)}, {"n", n}}, [&](json& b) {
        b["dim_F"] = K.group(n)->dim();
        b["dim_E"] = k.top().group(n)->dim();
        b["norm"] = io::to_json(k.norm(n).matrix);
        b["restriction"] = io::to_json(k.restriction(n).matrix);
        b["sigma"] = io::to_json(k.sigma(n).sigma());
        run.human("a=" + ext.text + " n=" + std::to_string(n) + ": dim k_nF " + std::to_string(K.group(n)->dim()) +
                  ", dim k_nE " + std::to_string(k.top().group(n)->dim()));
        run.record(b, milnor::verify_hilbert90(k, n).items);
      });
    }
  }
  return finish(run, cfg);
}

void structure_block(Run& run, const milnor::KummerK& k, const Extension& ext, int n, bool full) {
  run.block(json{{"a", ext.text}, {"a_class", io::to_json(ext.cls)}, {"n", n}}, [&](json& b) {
    const auto r = full ? structure::analyze(k, n) : structure::decompose_knE(k, n);
    b["invariants"] = io::to_json(r.invariants);
    b["profile"] = io::to_json(r.profile);
    b["X1"] = io::to_json(r.X1);
    if (k.p() > 2) b["X2"] = io::to_json(r.X2);
    b["Y"] = io::to_json(r.Y);
    b["Z"] = io::to_json(r.Z);
    b["W"] = io::to_json(r.W);
    std::string parts;
    if (full) {
      // summand counts: X2 has blocks of length 2, Y of length p
      parts = "  X1:" + std::to_string(r.X1.dim());
      if (k.p() > 2) parts += " X2:" + std::to_string(r.X2.dim() / 2);
      parts += " Y:" + std::to_string(r.Y.dim() / k.p()) + " Z:" + std::to_string(r.Z.dim());
    }
    run.human("a=" + ext.text + " n=" + std::to_string(n) + ": " + inv_line(r.invariants) + "  profile " +
              gmod::to_string(r.profile) + parts + (r.pass() ? "" : "  FAIL"));
    run.record(b, r.checks);
  });
}

int cmd_structure(const Config& cfg, bool full) {
  milnor::LocalK K(io::load_field(cfg.spec, cfg.precision));
  Run run(cfg);
  run.report = header(K);
  const auto degrees = parse_degrees(cfg.n, {1, 2, 3});
  for (const auto& ext : extensions(K, cfg)) {
    const auto& k = run.kummer(K, ext.cls);
    for (int n : degrees) structure_block(run, k, ext, n, full);
  }
  return finish(run, cfg);
}

int manual_euler(const Config& cfg) {
  auto pr = io::profile_from_json(io::load_json_arg(cfg.manual, "manual profile"));
  Run run(cfg);
  run.report = json{{"version", io::kVersion}, {"field", nullptr}, {"results", json::array()}};
  run.block(json{{"profile", io::profile_json(pr)}}, [&](json& b) {
    auto r = euler::theorem3_check(pr);
    b["euler"] = io::euler_json(r);
    run.human("manual profile n=" + std::to_string(pr.n) + ": chi_T=" + std::to_string(r.chi_T) +
              " chi_N=" + std::to_string(r.chi_N));
    run.record(b, r.checks);
  });
  return finish(run, cfg);
}

void euler_suite(Run& run, const milnor::LocalK& K, const std::vector<Extension>& exts,
                 const std::vector<int>& degrees, bool complete) {
  std::map<int, std::vector<euler::CohomologyProfile>> by_degree;
  for (const auto& ext : exts) {
    const auto& k = run.kummer(K, ext.cls);
    for (int n : degrees) {
      run.block(json{{"a", ext.text}, {"a_class", io::to_json(ext.cls)}, {"n", n}, {"suite", "euler"}}, [&](json& b) {
        auto pr = euler::profile_from_field(k, n);
        auto r = euler::theorem3_check(pr);
        b["profile"] = io::profile_json(pr);
        b["euler"] = io::euler_json(r);
        run.human("a=" + ext.text + " n=" + std::to_string(n) + ": chi_T=" + std::to_string(r.chi_T) +
                  " chi_N=" + std::to_string(r.chi_N) + (r.doubles ? " (doubles)" : ""));
        run.record(b, r.checks);
        by_degree[n].push_back(std::move(pr));
      });
    }
  }
  if (!complete) return;
  const auto expected = euler::line_count(K.p(), K.group(1)->dim());
  for (int n : degrees) {
    run.block(json{{"n", n}, {"suite", "cd-probe"}}, [&](json& b) {
      auto r = euler::corollary_checks(by_degree[n], expected, 2);
      b["extensions"] = r.extensions;
      b["doubling"] = r.doubling;
      b["summary"] = r.summary;
      run.human(r.summary);
      run.record(b, r.checks);
    });
  }
}

int cmd_euler(const Config& cfg) {
  if (!cfg.manual.empty()) return manual_euler(cfg);
  milnor::LocalK K(io::load_field(cfg.spec, cfg.precision));
  Run run(cfg);
  run.report = header(K);
  euler_suite(run, K, extensions(K, cfg), parse_degrees(cfg.n, {1, 2, 3}), cfg.a.empty());
  return finish(run, cfg);
}

int cmd_verify(const Config& cfg) {
  static const std::set<std::string> suites{"canonical", "sequences", "euler", "symbols", "all"};
  if (!suites.count(cfg.suite)) throw InputError("unknown suite '" + cfg.suite + "'");
  if (!cfg.manual.empty()) {
    if (cfg.suite != "euler") throw InputError("--manual only applies to --suite euler");
    return manual_euler(cfg);
  }
  milnor::LocalK K(io::load_field(cfg.spec, cfg.precision));
  Run run(cfg);
  run.report = header(K);
  run.report["suite"] = cfg.suite;
  const auto degrees = parse_degrees(cfg.n, {1, 2, 3});
  const auto exts = extensions(K, cfg);
  const bool all = cfg.suite == "all";
  if (all || cfg.suite == "canonical")
    for (const auto& ext : exts) {
      const auto& k = run.kummer(K, ext.cls);
      for (int n : degrees) structure_block(run, k, ext, n, true);
    }
  if (all || cfg.suite == "sequences")
    for (const auto& ext : exts) {
      const auto& k = run.kummer(K, ext.cls);
      for (int n : degrees)
        run.block(json{{"a", ext.text}, {"n", n}, {"suite", "sequences"}}, [&](json& b) {
          auto seq = milnor::verify_voevodsky_seq(k, n);
          auto h90 = milnor::verify_hilbert90(k, n);
          b["dims"] = {seq.dim_image_norm, seq.dim_ker_cup, seq.dim_image_cup, seq.dim_ker_res};
          run.human("a=" + ext.text + " n=" + std::to_string(n) + ": sequence " + (seq.pass() ? "exact" : "NOT exact") +
                    ", trace identities " + (h90.pass() ? "hold" : "FAIL"));
          run.record(b, seq.items);
          run.record(b, h90.items);
        });
      run.block(json{{"a", ext.text}, {"suite", "projection"}}, [&](json& b) {
        run.record(b, milnor::verify_projection_formula(k));
        run.record(b, {milnor::verify_norm_symmetry(K, ext.cls)});
      });
    }
  if (all || cfg.suite == "euler") euler_suite(run, K, exts, degrees, cfg.a.empty());
  if ((all && K.p() == 2) || cfg.suite == "symbols") {
    run.block(json{{"suite", "symbols"}}, [&](json& b) {
      auto items = milnor::verify_symbol_laws(K);
      run.human(std::string("symbol laws ") + (std::all_of(items.begin(), items.end(), [](auto& c) { return c.pass; })
                                                  ? "hold"
                                                  : "FAIL"));
      run.record(b, items);
    });
  }
  return finish(run, cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knorm: Galois-module structure of mod-p Milnor K-groups of local fields"};
  app.require_subcommand(1);
  Config cfg;
  auto common = [&](CLI::App* sub, bool with_a) {
    sub->add_option("--spec", cfg.spec, "field preset (Q2, Q3zeta3, Q5zeta5), inline JSON or JSON file")
        ->capture_default_str();
    if (with_a) sub->add_option("--a", cfg.a, "Kummer radicand, e.g. 2, -1, pi, xi*pi^2 or a digit list; repeatable");
    sub->add_option("--n", cfg.n, "degrees, e.g. 2 or 1,2 or 0-3");
    sub->add_option("--precision", cfg.precision, "working precision in uniformizer digits");
    sub->add_flag("--json", cfg.json_out, "emit a JSON report");
  };
  auto* field = app.add_subcommand("field", "field summary and k1 basis");
  common(field, false);
  auto* kgroup = app.add_subcommand("kgroup", "K-group dimensions and the maps N, i_E, sigma");
  common(kgroup, true);
  auto* invariants = app.add_subcommand("invariants", "invariants d, e, U1, U2, y, z");
  common(invariants, true);
  auto* decompose = app.add_subcommand("decompose", "decomposition of k_nE into X1, X2, Y, Z");
  common(decompose, true);
  auto* eul = app.add_subcommand("euler", "partial Euler-Poincare characteristics");
  common(eul, true);
  eul->add_option("--manual", cfg.manual, "manual cohomology profile (inline JSON or file)");
  auto* verify = app.add_subcommand("verify", "run verification suites");
  common(verify, true);
  verify->add_option("--suite", cfg.suite, "canonical|sequences|euler|symbols|all")->capture_default_str();
  verify->add_option("--manual", cfg.manual, "manual cohomology profile for --suite euler");
  verify->add_flag("--inject-fault", cfg.inject_fault, "corrupt one sigma entry (self-test of the checks)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInput;
  }

  try {
    if (*field) return cmd_field(cfg);
    if (*kgroup) return cmd_kgroup(cfg);
    if (*invariants) return cmd_structure(cfg, false);
    if (*decompose) return cmd_structure(cfg, true);
    if (*eul) return cmd_euler(cfg);
    if (*verify) return cmd_verify(cfg);
  } catch (const PrecisionError& e) {
    std::cerr << "precision error: " << e.what() << "\n";
    return kPrecision;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const Unsupported& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kInput;
  } catch (const Error& e) {
    std::cerr << "check failure: " << e.what() << "\n";
    return kCheck;
  }
  return kInput;
}

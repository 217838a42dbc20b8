#pragma once

// Field specs, presets, element parsing and JSON serialization of reports.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "knorm/euler.hpp"
#include "knorm/structure.hpp"

namespace knorm::io {

using json = nlohmann::ordered_json;
using padic::Elem;
using padic::FieldPtr;
using padic::LocalField;
using padic::StepKind;

inline constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Field specs

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

/// {"p": 3, "steps": [{"kind": "eisenstein", "coeffs": [3, 3]}]}
inline json preset_spec(const std::string& name) {
  const auto key = lower(name);
  if (key == "q2") return json{{"p", 2}, {"steps", json::array()}};
  if (key == "q3zeta3")
    return json{{"p", 3}, {"steps", json::array({json{{"kind", "eisenstein"}, {"coeffs", {3, 3}}}})}, {"name", "Q3(zeta3)"}};
  if (key == "q5zeta5")
    return json{{"p", 5}, {"steps", json::array({json{{"kind", "eisenstein"}, {"coeffs", {5, 10, 10, 5}}}})},
                {"name", "Q5(zeta5)"}};
  throw InputError("unknown preset '" + name + "' (known: Q2, Q3zeta3, Q5zeta5)");
}

inline bool is_preset(const std::string& name) {
  const auto key = lower(name);
  return key == "q2" || key == "q3zeta3" || key == "q5zeta5";
}

namespace detail {

inline padic::Coeffs coefficient(const FieldPtr& parent, const json& c, std::size_t index) {
  const std::string where = "coefficient " + std::to_string(index);
  if (c.is_number_integer()) return parent->from_int(c.get<padic::i64>());
  if (!c.is_array()) throw InputError(where + " must be an integer or a digit list");
  if (c.size() != static_cast<std::size_t>(parent->degree()))
    throw InputError(where + " needs " + std::to_string(parent->degree()) + " digits, got " + std::to_string(c.size()));
  padic::Coeffs out;
  for (const auto& x : c) {
    if (!x.is_number_integer()) throw InputError(where + " has a non-integer digit");
    out.push_back(parent->reduce_signed(x.get<padic::i64>()));
  }
  return out;
}

}  // namespace detail

inline FieldPtr field_from_json(const json& spec, std::optional<int> precision = std::nullopt) {
  if (!spec.is_object()) throw InputError("field spec must be a JSON object");
  if (spec.contains("preset")) {
    if (!spec["preset"].is_string()) throw InputError("\"preset\" must be a string");
    return field_from_json(preset_spec(spec["preset"].get<std::string>()), precision);
  }
  if (!spec.contains("p") || !spec["p"].is_number_integer() || spec["p"].get<long long>() < 2) throw InputError("field spec needs a positive integer \"p\"");
  const auto p = spec["p"].get<padic::u64>();
  if (!fplin::is_prime(p)) throw InputError("p = " + std::to_string(p) + " is not prime");
  std::optional<int> prec = precision;
  if (!prec && spec.contains("precision")) {
    if (!spec["precision"].is_number_integer()) throw InputError("\"precision\" must be an integer");
    prec = spec["precision"].get<int>();
  }
  std::string name;
  if (spec.contains("name")) {
    if (!spec["name"].is_string()) throw InputError("\"name\" must be a string");
    name = spec["name"].get<std::string>();
  }
  json steps = spec.value("steps", json::array());
  if (!steps.is_array()) throw InputError("\"steps\" must be an array");
  FieldPtr F = LocalField::qp(p, steps.empty() ? prec : std::nullopt);
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const auto& st = steps[s];
    const std::string where = "step " + std::to_string(s);
    std::optional<int> last;
    if (s + 1 == steps.size()) last = prec;
    if (!st.is_object() || !st.contains("kind") || !st["kind"].is_string())
      throw InputError(where + " needs a string \"kind\"");
    const auto kind = lower(st["kind"].get<std::string>());
    if (kind == "unramified") {
      if (!st.contains("degree") || !st["degree"].is_number_integer() || st["degree"].get<int>() < 1)
        throw InputError(where + " needs a positive integer \"degree\"");
      F = LocalField::unramified(F, st["degree"].get<int>(), last);
    } else if (kind == "eisenstein") {
      if (!st.contains("coeffs") || !st["coeffs"].is_array() || st["coeffs"].empty())
        throw InputError(where + " needs a nonempty \"coeffs\" array");
      std::vector<padic::Coeffs> poly;
      for (std::size_t i = 0; i < st["coeffs"].size(); ++i) poly.push_back(detail::coefficient(F, st["coeffs"][i], i));
      F = LocalField::with_polynomial(F, StepKind::Eisenstein, std::move(poly), last, s + 1 == steps.size() ? name : "");
    } else {
      throw InputError(where + ": unknown kind '" + kind + "' (unramified or eisenstein)");
    }
  }
  return F;
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(what + ": " + e.what());
  }
}

/// A preset name, inline JSON, or a path to a JSON file.
inline json load_json_arg(const std::string& arg, const std::string& what) {
  auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) return parse_json(arg, what);
  std::ifstream in(arg);
  if (!in) throw InputError("cannot open " + what + " '" + arg + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), what + " '" + arg + "'");
}

inline FieldPtr load_field(const std::string& arg, std::optional<int> precision = std::nullopt) {
  if (is_preset(arg)) return field_from_json(preset_spec(arg), precision);
  return field_from_json(load_json_arg(arg, "field spec"), precision);
}

// ---------------------------------------------------------------------------
// Elements: a product of factors n, pi, xi (each with an optional ^k), or
// a JSON digit list of integral coordinates.

inline padic::i64 parse_int(const std::string& s, const std::string& whole) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw InputError("bad number '" + s + "' in element '" + whole + "'");
  }
  if (used != s.size()) throw InputError("bad number '" + s + "' in element '" + whole + "'");
  return v;
}

inline Elem parse_element(const FieldPtr& F, const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw InputError("empty element");
  if (s.front() == '[') {
    const auto j = parse_json(s, "element digit list");
    if (!j.is_array() || j.size() != static_cast<std::size_t>(F->degree()))
      throw InputError("element digit list needs " + std::to_string(F->degree()) + " integers");
    padic::Coeffs c;
    for (const auto& x : j) {
      if (!x.is_number_integer()) throw InputError("element digit list has a non-integer entry");
      c.push_back(F->reduce_signed(x.get<padic::i64>()));
    }
    auto e = Elem::from_integral(F, c, F->precision());
    if (e.is_zero_marker()) throw InputError("element is zero");
    return e;
  }
  Elem out = Elem::one(F);
  std::stringstream ss(s);
  std::string factor;
  while (std::getline(ss, factor, '*')) {
    if (factor.empty()) throw InputError("empty factor in element '" + text + "'");
    padic::i64 k = 1;
    std::string base = factor;
    if (auto caret = factor.find('^'); caret != std::string::npos) {
      base = factor.substr(0, caret);
      k = parse_int(factor.substr(caret + 1), text);
    }
    const auto key = lower(base);
    Elem b;
    if (key == "pi" || key == "uniformizer")
      b = Elem::uniformizer(F);
    else if (key == "-pi" || key == "-uniformizer")
      b = -Elem::uniformizer(F);
    else if (key == "xi")
      b = Elem::root_of_unity(F);
    else {
      const auto v = parse_int(base, text);
      if (v == 0) throw InputError("element is zero");
      b = Elem::integer(F, v);
    }
    out = out * b.pow(k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline json to_json(const fplin::Vec& v) { return json(std::vector<std::uint64_t>(v.begin(), v.end())); }

inline json to_json(const fplin::Subspace& s) {
  json rows = json::array();
  for (const auto& b : s.basis()) rows.push_back(to_json(b));
  return rows;
}

inline json to_json(const fplin::FpMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(to_json(m.row(i)));
  return rows;
}

inline json to_json(const gmod::SummandProfile& s) { return json(std::vector<std::uint64_t>(s.m.begin(), s.m.end())); }

inline json to_json(const std::vector<milnor::CheckItem>& items) {
  json out = json::array();
  for (const auto& c : items) {
    json j{{"name", c.name}, {"pass", c.pass}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    out.push_back(std::move(j));
  }
  return out;
}

inline json to_json(const structure::Invariants& inv) {
  return json{{"d", inv.d},       {"e", inv.e}, {"upsilon1", inv.upsilon1}, {"upsilon2", inv.upsilon2},
              {"y", inv.y},       {"z", inv.z}};
}

inline json field_summary(const milnor::LocalK& K) {
  const auto& F = K.field();
  return json{{"name", F->name()},
              {"p", F->p()},
              {"degree", F->degree()},
              {"ramification", F->ramification()},
              {"residue_degree", F->residue_degree()},
              {"precision", F->precision()},
              {"mu_p", F->has_mu_p()},
              {"dim_k1", K.group(1)->dim()},
              {"basis", K.group(1)->labels}};
}

/// The manual-profile block {p, n, h, a (a_1..a_n), minus_one_norm}.
inline json profile_json(const euler::CohomologyProfile& pr) {
  json j{{"p", pr.p}, {"n", pr.n}, {"h", pr.h}, {"a", std::vector<long>(pr.a.begin() + 1, pr.a.end())}};
  if (pr.minus_one_norm) j["minus_one_norm"] = *pr.minus_one_norm;
  return j;
}

inline euler::CohomologyProfile profile_from_json(const json& doc) {
  const json& j = doc.contains("profile") ? doc["profile"] : doc;
  try {
    std::optional<bool> flag;
    if (j.contains("minus_one_norm")) flag = j.at("minus_one_norm").get<bool>();
    return euler::manual_profile(j.at("p").get<fplin::Residue>(), j.at("n").get<int>(), j.at("h").get<std::vector<long>>(),
                                 j.at("a").get<std::vector<long>>(), flag);
  } catch (const json::exception& e) {
    throw InputError(std::string("manual profile: ") + e.what());
  }
}

inline json euler_json(const euler::EPReport& r) {
  json j{{"chi_T", r.chi_T},
         {"chi_N", r.chi_N},
         {"chi_free_N", r.chi_free_N ? json(*r.chi_free_N) : json(nullptr)},
         {"dim_HN", r.dim_HN},
         {"theorem3a_lhs", r.theorem3a_lhs},
         {"theorem3a_rhs", r.theorem3a_rhs},
         {"theorem3b_lhs", r.theorem3b_lhs ? json(*r.theorem3b_lhs) : json(nullptr)},
         {"theorem3b_rhs", r.theorem3b_rhs ? json(*r.theorem3b_rhs) : json(nullptr)},
         {"doubles", r.doubles}};
  j["checks"] = to_json(r.checks);
  return j;
}

}  // namespace knorm::io

#include <gtest/gtest.h>

#include "knorm/io.hpp"

using namespace knorm;
using io::json;

TEST(Presets, Fields) {
  auto q2 = io::load_field("Q2");
  EXPECT_EQ(q2->p(), 2u);
  EXPECT_EQ(q2->degree(), 1);
  auto q3 = io::load_field("q3zeta3");
  EXPECT_EQ(q3->degree(), 2);
  EXPECT_EQ(q3->ramification(), 2);
  EXPECT_TRUE(q3->has_mu_p());
  auto q5 = io::load_field("Q5zeta5");
  EXPECT_EQ(q5->degree(), 4);
  EXPECT_THROW(io::preset_spec("Q7"), InputError);
}

TEST(Specs, InlineAndErrors) {
  auto F = io::load_field(R"({"p": 3, "steps": [{"kind": "eisenstein", "coeffs": [3, 3]}]})");
  EXPECT_EQ(F->degree(), 2);
  auto U = io::load_field(R"({"p": 2, "steps": [{"kind": "unramified", "degree": 2}]})");
  EXPECT_EQ(U->residue_degree(), 2);
  auto P = io::load_field(R"({"p": 2, "precision": 30})");
  EXPECT_EQ(P->precision(), 30);
  EXPECT_EQ(io::load_field("Q2", 25)->precision(), 25);
  for (const char* bad : {R"({"p": 4})", R"({"p": "2"})", R"({"steps": []})", R"({"p": 2, "steps": [{"kind": "x"}]})",
                          R"({"p": 2, "steps": [{"kind": "unramified"}]})", R"({"p": 2, "steps": [{"kind": "eisenstein"}]})",
                          R"({"p": 2, "steps": [{"kind": "eisenstein", "coeffs": [[1, 2], 2]}]})", "{ not json",
                          "/nonexistent/spec.json", R"({"p": 2, "precision": 1})"})
    EXPECT_THROW(io::load_field(bad), InputError) << bad;
}

TEST(Elements, Grammar) {
  milnor::LocalK K(io::load_field("Q2"));
  const auto& F = K.field();
  auto c = [&](const std::string& s) { return K.class_of(io::parse_element(F, s)); };
  EXPECT_EQ(c("2"), (fplin::Vec{0, 0, 1}));
  EXPECT_EQ(c("uniformizer"), c("2"));
  EXPECT_EQ(c("-1"), (fplin::Vec{1, 0, 0}));
  EXPECT_EQ(c("-1*5"), (fplin::Vec{1, 1, 0}));
  EXPECT_EQ(c("2^3 * 5"), (fplin::Vec{0, 1, 1}));
  EXPECT_EQ(c("[3]"), c("3"));
  EXPECT_EQ(c("17"), (fplin::Vec{0, 0, 0}));
  for (const char* bad : {"", "0", "abc", "2^x", "2**5", "[1, 2]"}) EXPECT_THROW(io::parse_element(F, bad), InputError) << bad;

  milnor::LocalK L(io::load_field("Q3zeta3"));
  EXPECT_EQ(L.class_of(io::parse_element(L.field(), "xi")), L.xi_class());
  EXPECT_EQ(L.class_of(io::parse_element(L.field(), "-pi")), L.class_of(-padic::Elem::uniformizer(L.field())));
}

TEST(Serialize, ProfileRoundTrip) {
  milnor::LocalK K(io::load_field("Q2"));
  const auto& k = K.kummer(K.class_of(padic::Elem::integer(K.field(), 2)));
  auto pr = euler::profile_from_field(k, 2);
  auto j = io::profile_json(pr);
  EXPECT_EQ(j.dump(), R"({"p":2,"n":2,"h":[1,3,1],"a":[2,1],"minus_one_norm":true})");
  auto back = io::profile_from_json(json{{"profile", j}});
  auto r1 = euler::theorem3_check(pr), r2 = euler::theorem3_check(back);
  EXPECT_EQ(r1.chi_T, r2.chi_T);
  EXPECT_EQ(r1.chi_N, r2.chi_N);
  EXPECT_EQ(r1.chi_free_N, r2.chi_free_N);
  EXPECT_THROW(io::profile_from_json(json{{"p", 2}}), InputError);
}

TEST(Serialize, Shapes) {
  auto m = fplin::FpMatrix::from_rows(3, 2, {{1, 2}, {0, 1}});
  EXPECT_EQ(io::to_json(m).dump(), "[[1,2],[0,1]]");
  EXPECT_EQ(io::to_json(fplin::Subspace::span(2, 2, {{1, 1}})).dump(), "[[1,1]]");
  structure::Invariants inv{2, 1, 1, 2, 1, 0, 1, 1};
  EXPECT_EQ(io::to_json(inv).dump(), R"({"d":1,"e":2,"upsilon1":1,"upsilon2":0,"y":1,"z":1})");
}

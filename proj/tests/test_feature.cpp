#include <catch2/catch_amalgamated.hpp>

#include <latchart/feature.hpp>

using namespace latchart;

TEST_CASE("atoms unify only with equal atoms") {
  REQUIRE(unify(make_atom("sg"), make_atom("sg")).has_value());
  REQUIRE_FALSE(unify(make_atom("sg"), make_atom("pl")).has_value());
}

TEST_CASE("variables bind to atoms and nodes") {
  auto r = unify(make_var(0), make_atom("sg"));
  REQUIRE(r);
  REQUIRE(r->is_atom());
  REQUIRE(r->atom_name() == "sg");

  auto n = make_node({{"num", make_atom("sg")}});
  auto r2 = unify(make_var(1), n);
  REQUIRE(r2);
  REQUIRE(r2->is_node());
}

TEST_CASE("nodes merge attribute-wise") {
  auto a = make_node({{"num", make_atom("sg")}});
  auto b = make_node({{"per", make_atom("3")}});
  auto r = unify(a, b);
  REQUIRE(r);
  REQUIRE(r->is_node());
  const auto& attrs = r->node_ref().attrs;
  REQUIRE(attrs.size() == 2);
  REQUIRE(attrs.at("num").atom_name() == "sg");
  REQUIRE(attrs.at("per").atom_name() == "3");
}

TEST_CASE("conflicting leaves make node unification fail") {
  auto a = make_node({{"num", make_atom("sg")}});
  auto b = make_node({{"num", make_atom("pl")}});
  REQUIRE_FALSE(unify(a, b).has_value());
}

TEST_CASE("shared variables propagate bindings across attributes") {
  // [agr=#0, subj=[agr=#0]] with [agr=sg] forces subj.agr=sg.
  auto a = make_node(
      {{"agr", make_var(0)}, {"subj", make_node({{"agr", make_var(0)}})}});
  auto b = make_node({{"agr", make_atom("sg")}});
  auto r = unify(a, b);
  REQUIRE(r);
  const auto& attrs = r->node_ref().attrs;
  REQUIRE(attrs.at("agr").atom_name() == "sg");
  REQUIRE(attrs.at("subj").node_ref().attrs.at("agr").atom_name() == "sg");
}

TEST_CASE("variable-variable chains resolve to the common binding") {
  Subst s;
  auto m1 = merge_values(make_var(0), make_var(1), s);
  REQUIRE(m1);
  auto m2 = merge_values(make_var(1), make_atom("acc"), s);
  REQUIRE(m2);
  REQUIRE(resolve(make_var(0), s).atom_name() == "acc");
}

TEST_CASE("occurs check rejects cyclic bindings") {
  // X with [f=X] must fail.
  Subst s;
  auto cyc = make_node({{"f", make_var(0)}});
  REQUIRE_FALSE(merge_values(make_var(0), cyc, s).has_value());
}

TEST_CASE("chain-tail variables observe node merges") {
  // X bound to [a=1-ish], then X unified with [b=2-ish]: a later reader of
  // X must see both attributes.
  Subst s;
  REQUIRE(merge_values(make_var(0), make_node({{"a", make_atom("1")}}), s));
  REQUIRE(merge_values(make_var(0), make_node({{"b", make_atom("2")}}), s));
  auto r = resolve(make_var(0), s);
  REQUIRE(r.is_node());
  REQUIRE(r.node_ref().attrs.size() == 2);
}

TEST_CASE("rename_vars shifts every variable id") {
  auto v = make_node({{"x", make_var(0)}, {"y", make_var(3)}});
  auto r = rename_vars(v, 10);
  REQUIRE(r.node_ref().attrs.at("x").var_id() == 10);
  REQUIRE(r.node_ref().attrs.at("y").var_id() == 13);
}

TEST_CASE("canonical text is stable under variable renaming") {
  auto a = make_node({{"agr", make_var(4)}, {"obj", make_var(4)}});
  auto b = make_node({{"agr", make_var(9)}, {"obj", make_var(9)}});
  REQUIRE(canonical_text(a) == canonical_text(b));

  auto c = make_node({{"agr", make_var(1)}, {"obj", make_var(2)}});
  REQUIRE(canonical_text(a) != canonical_text(c));  // reentrancy differs
}

TEST_CASE("canonical text of slot vectors shares the renaming") {
  std::vector<FeatureValue> s1{make_var(5), make_var(5)};
  std::vector<FeatureValue> s2{make_var(7), make_var(7)};
  std::vector<FeatureValue> s3{make_var(7), make_var(8)};
  REQUIRE(canonical_text(s1) == canonical_text(s2));
  REQUIRE(canonical_text(s1) != canonical_text(s3));
}

TEST_CASE("find_path walks nodes and stops elsewhere") {
  auto v = make_node(
      {{"agr", make_node({{"num", make_atom("sg")}})}, {"c", make_atom("x")}});
  const FeatureValue* hit = find_path(v, {"agr", "num"});
  REQUIRE(hit != nullptr);
  REQUIRE(hit->atom_name() == "sg");
  REQUIRE(find_path(v, {"agr", "missing"}) == nullptr);
  REQUIRE(find_path(v, {"c", "deeper"}) == nullptr);
}

TEST_CASE("quick check rejects only provable clashes") {
  std::vector<std::vector<std::string>> paths{{"num"}};
  auto sg = make_quick_sig("NP", make_node({{"num", make_atom("sg")}}), paths);
  auto pl = make_quick_sig("NP", make_node({{"num", make_atom("pl")}}), paths);
  auto free = make_quick_sig("NP", make_node({{"num", make_var(0)}}), paths);
  auto none = make_quick_sig("NP", empty_node(), paths);

  REQUIRE_FALSE(quick_check(sg, pl));       // atom clash
  REQUIRE(quick_check(sg, sg));
  REQUIRE(quick_check(sg, free));           // variable is unconstrained
  REQUIRE(quick_check(sg, none));           // missing attribute is open
  auto other = make_quick_sig("VP", empty_node(), paths);
  REQUIRE_FALSE(quick_check(sg, other));    // category mismatch
}

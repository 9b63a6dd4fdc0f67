#include <catch2/catch_amalgamated.hpp>

#include <latchart/grammar.hpp>

using namespace latchart;

namespace {

const char* kToy = R"(
# toy
START S
RULE S -> NP VP : 0.0
RULE NP -> n : -0.51
RULE VP -> v : -0.69
LEX we n : 0.0
LEX meet v : 0.0
)";

double acc_of(const Grammar& g, const std::string& cat, int rule) {
  for (const auto& pe : g.predictions(cat)) {
    if (pe.rule == rule) return pe.accumulated;
  }
  FAIL("rule " << rule << " not predicted for " << cat);
  return 0.0;
}

bool predicts(const Grammar& g, const std::string& cat, int rule) {
  for (const auto& pe : g.predictions(cat)) {
    if (pe.rule == rule) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("toy grammar parses with rules, lexicon and start") {
  Grammar g = parse_grammar(kToy);
  REQUIRE(g.start == "S");
  REQUIRE(g.rules.size() == 3);
  REQUIRE(g.rules[0].lhs == "S");
  REQUIRE(g.rules[0].rhs == std::vector<std::string>{"NP", "VP"});
  REQUIRE(g.rules[1].log_prob == Catch::Approx(-0.51));
  REQUIRE(g.lex("we") != nullptr);
  REQUIRE(g.lex("we")->cat == "n");
  REQUIRE(g.lex("nope") == nullptr);
  REQUIRE(g.defined("NP"));
  REQUIRE(g.defined("n"));
  REQUIRE_FALSE(g.defined("XX"));
}

TEST_CASE("left-corner closure carries best accumulated chain scores") {
  Grammar g = parse_grammar(kToy);

  // closure(S): the S rule itself plus the chained NP rule.
  REQUIRE(g.predictions("S").size() == 2);
  REQUIRE(acc_of(g, "S", 0) == Catch::Approx(0.0));
  REQUIRE(acc_of(g, "S", 1) == Catch::Approx(-0.51));

  REQUIRE(g.predictions("NP").size() == 1);
  REQUIRE(acc_of(g, "NP", 1) == Catch::Approx(-0.51));
  REQUIRE(acc_of(g, "VP", 2) == Catch::Approx(-0.69));

  // Lexical categories expand to nothing.
  REQUIRE(g.predictions("n").empty());
}

TEST_CASE("closure accumulates through multi-step chains") {
  Grammar g = parse_grammar(R"(
START S
RULE S -> A B : -0.1
RULE A -> C D : -0.2
RULE C -> x : -0.3
RULE B -> x : 0.0
RULE D -> x : 0.0
LEX ex x : 0.0
)");
  REQUIRE(acc_of(g, "S", 0) == Catch::Approx(-0.1));
  REQUIRE(acc_of(g, "S", 1) == Catch::Approx(-0.3));   // S chain + A rule
  REQUIRE(acc_of(g, "S", 2) == Catch::Approx(-0.6));   // ... + C rule
  REQUIRE_FALSE(predicts(g, "S", 3));  // B is not a left corner of S
}

TEST_CASE("closure keeps the best chain when several reach a rule") {
  Grammar g = parse_grammar(R"(
START S
RULE S -> A y : -1.0
RULE S -> B y : -0.2
RULE A -> C y : 0.0
RULE B -> C y : 0.0
RULE C -> x : -0.1
LEX ex x : 0.0
LEX why y : 0.0
)");
  // C is reachable via A (-1.0) and via B (-0.2); the closure keeps the
  // better chain.
  REQUIRE(acc_of(g, "S", 4) == Catch::Approx(-0.2 + 0.0 + -0.1));
}

TEST_CASE("left recursion and unary cycles terminate") {
  Grammar g = parse_grammar(R"(
START NP
RULE NP -> NP PP : -0.9
RULE NP -> n : -0.2
RULE PP -> p NP : -0.1
LEX noun n : 0.0
LEX prep p : 0.0
)");
  REQUIRE(predicts(g, "NP", 0));
  REQUIRE(predicts(g, "NP", 1));
  REQUIRE(acc_of(g, "NP", 0) == Catch::Approx(-0.9));
  REQUIRE(acc_of(g, "NP", 1) == Catch::Approx(-0.2));

  Grammar cyc = parse_grammar(R"(
START A
RULE A -> B : 0.0
RULE B -> A : 0.0
RULE A -> x : -0.5
LEX ex x : 0.0
)");
  REQUIRE(predicts(cyc, "A", 0));
  REQUIRE(predicts(cyc, "A", 1));
  REQUIRE(predicts(cyc, "A", 2));
}

TEST_CASE("word prediction unions left-corner lexical keys") {
  Grammar g = parse_grammar(kToy);
  REQUIRE(g.predictable_words("S") == std::vector<std::string>{"we"});
  REQUIRE(g.predictable_words("NP") == std::vector<std::string>{"we"});
  REQUIRE(g.predictable_words("VP") == std::vector<std::string>{"meet"});
  REQUIRE(g.predictable_words("n") == std::vector<std::string>{"we"});

  auto ws = predict_words(g, {"NP", "VP"});
  REQUIRE(ws == std::vector<std::string>{"meet", "we"});
  REQUIRE_THROWS_AS(predict_words(g, {"XX"}), InputError);
}

TEST_CASE("rule constraints become feature slots with shared variables") {
  Grammar g = parse_grammar(R"(
START S
RULE S -> NP VP : 0.0 { LHS.agr = C1.agr, C1.agr = C2.agr }
LEX np0 NP : 0.0
LEX vp0 VP : 0.0
)");
  const Rule& r = g.rules[0];
  REQUIRE(r.has_constraints());
  REQUIRE(r.slots.size() == 3);
  // All three slots point at one shared variable under "agr".
  const FeatureValue* lhs = find_path(r.slots[0], {"agr"});
  const FeatureValue* c1 = find_path(r.slots[1], {"agr"});
  const FeatureValue* c2 = find_path(r.slots[2], {"agr"});
  REQUIRE(lhs != nullptr);
  REQUIRE(c1 != nullptr);
  REQUIRE(c2 != nullptr);
  REQUIRE(lhs->is_var());
  REQUIRE(c1->is_var());
  REQUIRE(c2->is_var());
  REQUIRE(lhs->var_id() == c1->var_id());
  REQUIRE(c1->var_id() == c2->var_id());
}

TEST_CASE("atom constraints and lexical features parse") {
  Grammar g = parse_grammar(R"(
START S
RULE S -> NP : 0.0 { C1.case = nom }
LEX he NP : 0.0 { case = nom, num = sg }
LEX him NP : 0.0 { case = acc }
)");
  const FeatureValue* v = find_path(g.rules[0].slots[1], {"case"});
  REQUIRE(v != nullptr);
  REQUIRE(v->is_atom());
  REQUIRE(v->atom_name() == "nom");

  const LexEntry* he = g.lex("he");
  REQUIRE(he != nullptr);
  REQUIRE(find_path(he->features, {"num"})->atom_name() == "sg");

  // Default fast-check paths: sorted top-level atom attributes.
  REQUIRE(g.fast_check_paths ==
          std::vector<std::vector<std::string>>{{"case"}, {"num"}});
}

TEST_CASE("inconsistent rule constraints are rejected") {
  REQUIRE_THROWS_AS(parse_grammar(R"(
START S
RULE S -> NP : 0.0 { C1.case = nom, C1.case = acc }
LEX he NP : 0.0
)"),
                    FileFormatError);
}

TEST_CASE("grammar file errors are reported with module and line") {
  // Missing START.
  REQUIRE_THROWS_AS(parse_grammar("RULE S -> x : 0.0\nLEX ex x : 0.0\n"),
                    InputError);
  // Duplicate lexical key.
  REQUIRE_THROWS_AS(
      parse_grammar("START x\nLEX a x : 0.0\nLEX a x : -1.0\n"),
      FileFormatError);
  // Positive log-probability.
  REQUIRE_THROWS_AS(parse_grammar("START x\nLEX a x : 0.5\n"),
                    FileFormatError);
  // Undefined rhs category.
  REQUIRE_THROWS_AS(
      parse_grammar("START S\nRULE S -> Q : 0.0\nLEX a x : 0.0\n"),
      InputError);
  // Constraint position out of range.
  REQUIRE_THROWS_AS(parse_grammar(R"(
START S
RULE S -> NP : 0.0 { C2.case = nom }
LEX he NP : 0.0
)"),
                    FileFormatError);
  // Unknown directive.
  REQUIRE_THROWS_AS(parse_grammar("START S\nBOGUS\nLEX a S : 0.0\n"),
                    FileFormatError);
  try {
    parse_grammar("START x\nLEX a x : 0.5\n");
    FAIL("expected an error");
  } catch (const FileFormatError& e) {
    REQUIRE(e.line() == 2);
    REQUIRE(std::string(e.what()).find("grammar") == 0);
  }
}

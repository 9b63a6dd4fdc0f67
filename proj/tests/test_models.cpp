#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <latchart/models.hpp>

using namespace latchart;

TEST_CASE("bigram model scores known pairs and falls back otherwise") {
  BigramModel m = load_bigram("# c\nBIGRAM <s> we -0.7\nBIGRAM we meet -1.6\n");
  REQUIRE(m.score("<s>", "we") == Catch::Approx(-0.7));
  REQUIRE(m.score("we", "meet") == Catch::Approx(-1.6));
  REQUIRE(m.score("meet", "we") == Catch::Approx(0.0));  // neutral default

  BigramModel d = load_bigram("DEFAULT -3.0\nBIGRAM a b -0.5\n");
  REQUIRE(d.score("a", "b") == Catch::Approx(-0.5));
  REQUIRE(d.score("b", "a") == Catch::Approx(-3.0));
}

TEST_CASE("bigram file errors carry module and line") {
  REQUIRE_THROWS_AS(load_bigram("we -0.7\n"), FileFormatError);
  REQUIRE_THROWS_AS(load_bigram("BIGRAM we meet 0.5\n"), FileFormatError);
  REQUIRE_THROWS_AS(load_bigram("BIGRAM we meet -0.5 extra\n"),
                    FileFormatError);
  REQUIRE_THROWS_AS(
      load_bigram("BIGRAM a b -0.1\nBIGRAM a b -0.2\n"), FileFormatError);
  try {
    load_bigram("BIGRAM ok pair -0.1\nbad\n");
    FAIL("expected an error");
  } catch (const FileFormatError& e) {
    REQUIRE(e.line() == 2);
    REQUIRE(std::string(e.what()).find("bigram: line 2:") == 0);
  }
}

TEST_CASE("prosody hypotheses turn into log-domain boundary attributes") {
  ProsodyHypothesis h{10, 20, 0.7, 0.1, 0.15, 0.05};
  ProsodyAttribute a = ProsodyAttribute::from_hypothesis(h);
  REQUIRE(a.log_prob(Boundary::B0) == Catch::Approx(std::log(0.7)));
  REQUIRE(a.log_prob(Boundary::B2) == Catch::Approx(std::log(0.1)));
  REQUIRE(a.log_prob(Boundary::B3) == Catch::Approx(std::log(0.15)));
  REQUIRE(a.log_prob(Boundary::B9) == Catch::Approx(std::log(0.05)));

  // Zero probabilities floor at the log-zero sentinel.
  ProsodyHypothesis z{0, 1, 1.0, 0.0, 0.0, 0.0};
  ProsodyAttribute az = ProsodyAttribute::from_hypothesis(z);
  REQUIRE(az.log_prob(Boundary::B0) == Catch::Approx(0.0));
  REQUIRE(az.log_prob(Boundary::B2) == kLogZero);
}

TEST_CASE("neutral prosody attribute is certain of no boundary") {
  ProsodyAttribute n = ProsodyAttribute::neutral();
  REQUIRE(n.log_prob(Boundary::B0) == Catch::Approx(0.0));
  REQUIRE(n.log_prob(Boundary::B2) == kLogZero);
  REQUIRE(n.log_prob(Boundary::B3) == kLogZero);
  REQUIRE(n.log_prob(Boundary::B9) == kLogZero);
}

TEST_CASE("frames pick the enclosing prosody hypothesis or neutral") {
  std::vector<ProsodyHypothesis> hs = {{0, 10, 0.9, 0.05, 0.03, 0.02},
                                       {10, 20, 0.1, 0.2, 0.6, 0.1}};
  check_prosody_disjoint(hs, "test");
  ProsodyAttribute a5 = attach_prosody(5, hs);
  REQUIRE(a5.log_prob(Boundary::B0) == Catch::Approx(std::log(0.9)));
  // Half-open spans: frame 10 belongs to the second hypothesis.
  ProsodyAttribute a10 = attach_prosody(10, hs);
  REQUIRE(a10.log_prob(Boundary::B3) == Catch::Approx(std::log(0.6)));
  // No hypothesis covers frame 25.
  ProsodyAttribute a25 = attach_prosody(25, hs);
  REQUIRE(a25 == ProsodyAttribute::neutral());

  std::vector<ProsodyHypothesis> overlap = {{0, 10, 1, 0, 0, 0},
                                            {5, 15, 1, 0, 0, 0}};
  REQUIRE_THROWS_AS(check_prosody_disjoint(overlap, "test"), InputError);
}

TEST_CASE("category trigram maps words and scores triples") {
  CategoryTrigram t = load_trigram(R"(
CAT we PRON
CAT meet V
TRI PRON B3 V -4.0
TRI PRON B0 V -0.1
TRI * B9 * -9.0
DEFAULT -0.5
)");
  REQUIRE(t.category("we") == "PRON");
  REQUIRE(t.category("unknown") == "*");
  REQUIRE(t.score("PRON", Boundary::B3, "V") == Catch::Approx(-4.0));
  REQUIRE(t.score("PRON", Boundary::B0, "V") == Catch::Approx(-0.1));
  // Unmapped words carry the catch-all category, which can have rows of
  // its own.
  REQUIRE(t.score(t.category("x"), Boundary::B9, t.category("y")) ==
          Catch::Approx(-9.0));
  // Unlisted triples fall to the default.
  REQUIRE(t.score("V", Boundary::B2, "PRON") == Catch::Approx(-0.5));

  CategoryTrigram neutral;
  REQUIRE(neutral.score("a", Boundary::B0, "b") == Catch::Approx(0.0));
}

TEST_CASE("trigram file errors carry module and line") {
  REQUIRE_THROWS_AS(load_trigram("TRI A B5 C -1.0\n"), FileFormatError);
  REQUIRE_THROWS_AS(load_trigram("CAT we\n"), FileFormatError);
  REQUIRE_THROWS_AS(load_trigram("CAT we A\nCAT we B\n"), FileFormatError);
  REQUIRE_THROWS_AS(load_trigram("TRI A B0 C 1.0\n"), FileFormatError);
  try {
    load_trigram("CAT we A\nTRI A B0 A -1\nTRI A B0 A -2\n");
    FAIL("expected an error");
  } catch (const FileFormatError& e) {
    REQUIRE(e.line() == 3);
  }
}

TEST_CASE("prosody transition maximises over boundary classes") {
  CategoryTrigram t = load_trigram(R"(
CAT we PRON
CAT meet V
TRI PRON B3 V -4.0
TRI PRON B0 V -0.1
)");
  // Sharp boundary evidence: B3 almost certain.
  ProsodyAttribute sharp =
      ProsodyAttribute::from_hypothesis({0, 1, 0.005, 0.0025, 0.99, 0.0025});
  double tr = prosody_trans(sharp, t, "we", "meet");
  double b3 = std::log(0.99) - 4.0;
  double b0 = std::log(0.005) - 0.1;
  REQUIRE(tr == Catch::Approx(std::max(b3, b0)));

  // The neutral attribute is certain of B0, so the B0 trigram row decides.
  REQUIRE(prosody_trans(ProsodyAttribute::neutral(), t, "we", "meet") ==
          Catch::Approx(-0.1));

  // Words without trigram rows score the neutral default.
  REQUIRE(prosody_trans(ProsodyAttribute::neutral(), t, "x", "y") ==
          Catch::Approx(0.0));
}

TEST_CASE("bigram transition helper uses the left context word") {
  BigramModel m = load_bigram("BIGRAM <s> we -0.7\nBIGRAM we meet -1.6\n");
  REQUIRE(bigram_trans(m, kBeginMarker, "we") == Catch::Approx(-0.7));
  REQUIRE(bigram_trans(m, "we", "meet") == Catch::Approx(-1.6));
}

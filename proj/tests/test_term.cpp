#include <doctest.h>

#include "helpers.hpp"

using namespace tylr;
using namespace tylr::testing;

namespace {

TermPtr atom(const std::string& text) {
  const Grammar& g = hazel_grammar();
  return make_term(hazel().elab, {token_child(tok(g, tile_of(g, "$num", "E"), text))});
}

TermPtr sum(const std::string& a, const std::string& b) {
  const Grammar& g = hazel_grammar();
  return make_term(hazel().elab,
                   {term_child(atom(a)), token_child(tok(g, tile_of(g, "+", "E"))), term_child(atom(b))});
}

int ntc(const std::string& sort) {
  return hazel().elab.nt_code({hazel_grammar().sort_index(sort), kBot, kBot});
}

}  // namespace

TEST_CASE("fill") {
  const Relations& r = hazel();
  Parser p(r);
  auto empty = p.fill({}, {ntc("E")});
  REQUIRE(empty);
  REQUIRE(empty->size() == 1);
  CHECK(term_text((*empty)[0]) == "⬚");
  CHECK(obligations((*empty)[0]) == Obligations{0, 0, 0, 1});

  auto two = p.fill({atom("2"), atom("3")}, {ntc("E")});
  REQUIRE(two);
  CHECK(term_text((*two)[0]) == "2 ⟐ 3");
  CHECK(obligations((*two)[0]) == Obligations{1, 0, 0, 0});

  const Grammar& g = hazel_grammar();
  TermPtr pat = make_term(r.elab, {token_child(tok(g, tile_of(g, "$id", "P"), "x"))});
  auto tr = p.fill({pat}, {ntc("T")});
  REQUIRE(tr);
  CHECK(term_text((*tr)[0]) == "⦊ x");
  CHECK((*tr)[0]->sort == g.sort_index("T"));
  CHECK(obligations((*tr)[0]).sort == 1);

  auto none = p.fill({}, {});
  REQUIRE(none);
  CHECK(none->empty());
}

TEST_CASE("obligation counts") {
  const Relations& r = hazel();
  CHECK(obligations(hole_term(r.elab, hazel_grammar().sort_index("E"))) == Obligations{0, 0, 0, 1});
  Molder m(r);
  CHECK(obligations(m.parse_text("let x")) == Obligations{0, 0, 2, 2});
  CHECK(obligations(m.parse_text("2 3")) == Obligations{1, 0, 0, 0});
}

TEST_CASE("obligations compare heaviest class first") {
  Obligations infix{1, 0, 0, 0}, lots{0, 5, 5, 5};
  CHECK(lots < infix);
  CHECK(Obligations{0, 0, 9, 9} < Obligations{0, 1, 0, 0});
  CHECK(Obligations{0, 0, 0, 9} < Obligations{0, 0, 1, 0});
}

TEST_CASE("well-formed terms") {
  const Relations& r = hazel();
  const Grammar& g = hazel_grammar();
  int E = g.sort_index("E");
  NT top{E, kBot, kBot}, tight{E, 2, 3};
  TermPtr s = sum("2", "3");
  CHECK(well_formed_term(r.elab, &top, s));
  CHECK_FALSE(well_formed_term(r.elab, &tight, s));
  CHECK(s->produced_by(r.elab, top));
  CHECK_FALSE(s->produced_by(r.elab, tight));
  CHECK(well_formed_term(r.elab, nullptr, hole_term(r.elab, g.sort_index("P"))));

  // A right-nested sum under a left-associative operator is malformed.
  TermPtr bad = make_term(r.elab, {term_child(atom("1")), token_child(tok(g, tile_of(g, "+", "E"))),
                                   term_child(sum("2", "3"))});
  CHECK_FALSE(well_formed_term(r.elab, nullptr, bad));
}

TEST_CASE("cached producer matrices agree with recursive matching") {
  const Relations& r = hazel();
  Molder m(r);
  for (const char* src : {"2 + 3 * 4", "let x = 1 in x", "( 1 , 2 )", "f ( x ) + - y", "x ->",
                          "fun ( a , b ) => a", "if x then y", ") ("}) {
    TermPtr t = m.parse_text(src);
    for (const NT& n : r.reachable_list())
      CHECK(t->produced_by(r.elab, n) == well_formed_term(r.elab, &n, t));
  }
}

TEST_CASE("term json") {
  const Relations& r = hazel();
  std::string j = term_json(r.elab, sum("2", "3")).dump();
  CHECK(j == R"({"children":[{"children":[{"ghost":false,"kind":"token","sort":"E","text":"2"}],"kind":"term"},{"ghost":false,"kind":"token","sort":"E","text":"+"},{"children":[{"ghost":false,"kind":"token","sort":"E","text":"3"}],"kind":"term"}],"kind":"term"})");
  Molder m(r);
  std::string h = term_json(r.elab, m.parse_text("")).dump();
  CHECK(h == R"({"children":[{"kind":"grout","shape":"operand","sort":"E"}],"kind":"term"})");
}

TEST_CASE("text projection") {
  Molder m(hazel());
  TermPtr t = m.parse_text("let x = 4");
  CHECK(term_text(t) == "let x = 4 [in] ⬚");
  CHECK(term_text(t, true) == "let x = 4 [in] _");
}

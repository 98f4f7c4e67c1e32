#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "support.hpp"
#include "tylr/gen.hpp"

using namespace tylr;
using namespace tylr::testing;

namespace {

struct Fixture {
  const Relations& r = hazel();
  const Grammar& g = hazel_grammar();
  Parser p{hazel()};

  Token t(const std::string& label, const std::string& sort, int level = -1, const std::string& text = "",
          bool ghost = false) {
    return tok(g, tile_of(g, label, sort, level), text, ghost);
  }
  Token num(const std::string& text) { return t("$num", "E", -1, text); }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "empty input repairs to one hole") {
  Stack k;
  CHECK(well_formed_stack(r, k));
  CHECK(term_text(p.finish(k)) == "⬚");
  CHECK(term_text(p.parse({})) == "⬚");
}

TEST_CASE_FIXTURE(Fixture, "a dangling operator gets an operand hole") {
  Stack k = p.push(Stack{}, num("2"));
  CHECK(stack_to_string(r, k) == "⧏ ⋖ 2");
  k = p.push(k, t("+", "E"));
  CHECK(stack_to_string(r, k) == "⧏ ⋖[2] +");
  TermPtr done = p.finish(k);
  CHECK(term_text(done) == "2 + ⬚");
  CHECK(obligations(done) == Obligations{0, 0, 0, 1});
}

TEST_CASE_FIXTURE(Fixture, "parenthesized sum has no obligations") {
  TermPtr s = p.parse({t("(", "E", 5), num("2"), t("+", "E"), num("3"), t(")", "E", 5)});
  CHECK(term_debug(r.elab, s) == "(( ((2) + (3)) ))");
  CHECK(obligations(s).zero());
}

TEST_CASE_FIXTURE(Fixture, "pattern paren after let shifts directly") {
  Stack k = p.push(Stack{}, t("let", "E"));
  k = p.push(k, t("(", "P"));
  CHECK(stack_to_string(r, k) == "⧏ ⋖ let ⋖ (");
  CHECK(k.obligations().zero());
  CHECK(well_formed_stack(r, k));
}

TEST_CASE_FIXTURE(Fixture, "let without in") {
  TermPtr s = p.parse({t("let", "E"), t("$id", "P", -1, "x"), t("=", "E"), num("4")});
  CHECK(term_text(s) == "let x = 4 [in] ⬚");
}

TEST_CASE_FIXTURE(Fixture, "prefix ghost removed by a solid push") {
  Stack k = p.push(Stack{}, t("let", "E"));
  k = p.push(k, t("=", "E"));
  k = p.push(k, t("in", "E", -1, "", true));
  k = p.push(k, num("4"));
  CHECK(stack_to_string(r, k) == "⧏ ⋖ let ≐[⬚] = ≐[⬚] [in] ⋖ 4");
  k = p.push(k, t("in", "E"), true);
  CHECK(stack_to_string(r, k) == "⧏ ⋖ let ≐[⬚] = ≐[4] in");
  CHECK(well_formed_stack(r, k));
}

TEST_CASE_FIXTURE(Fixture, "suffix ghost consumed by a solid close") {
  Stack k = p.push(Stack{}, t("(", "E", 5));
  k = p.push(k, num("2"));
  CHECK(stack_to_string(r, k) == "⧏ ⋖ ( ⋖ 2");
  k = p.push(k, t(")", "E", 5));
  CHECK(stack_to_string(r, k) == "⧏ ⋖ ( ≐[2] )");
  k = p.push(k, t("+", "E"));
  k = p.push(k, num("3"));
  Stack before = k;
  k = p.push(k, t(")", "E", 5, "", true));
  CHECK(k.top == before.top);
  CHECK(term_text(p.finish(k)) == "( 2 ) + 3");
}

TEST_CASE_FIXTURE(Fixture, "a fresh tile without a matching ghost pushes normally") {
  Stack k = p.push(Stack{}, num("1"));
  Stack a = p.push(k, t("+", "E"), true), b = p.push(k, t("+", "E"), false);
  CHECK(stack_to_string(r, a) == stack_to_string(r, b));
}

TEST_CASE_FIXTURE(Fixture, "ill-formed stacks are detected") {
  Stack k = p.push(Stack{}, t("let", "E"));
  k = p.push(k, t("=", "E"));
  REQUIRE(well_formed_stack(r, k));
  // Put an expression cell where the pattern slot is.
  const Link* eq = k.top.get();
  TermPtr e = make_term(r.elab, {token_child(t("+", "E"))});
  Stack bad = Stack{eq->prev}.push(eq->op, eq->slot,
                                   make_term(r.elab, {token_child(num("7"))}), eq->tok);
  CHECK_FALSE(well_formed_stack(r, bad));
  CHECK_FALSE(well_formed_stack(r, bad, true));
  (void)e;
}

TEST_CASE_FIXTURE(Fixture, "option deltas are obligation differences") {
  Generator gen(r, 99);
  for (int i = 0; i < 200; ++i) {
    auto toks = gen.random_tokens(12);
    Stack k;
    for (const auto& tk : toks) {
      for (const auto& o : p.options(k, {}, tk, false)) {
        Stack after = p.apply(o, tk);
        CHECK(after.obligations() - k.obligations() == o.delta);
      }
      k = p.push(k, tk);
    }
  }
}

TEST_CASE_FIXTURE(Fixture, "pruned options lead with the unpruned best") {
  Generator gen(r, 5);
  for (int i = 0; i < 200; ++i) {
    auto toks = gen.random_tokens(12);
    Stack k;
    for (const auto& tk : toks) {
      auto all = p.options(k, {}, tk, false);
      auto some = p.options(k, {}, tk, true);
      REQUIRE(all.empty() == some.empty());
      if (!all.empty()) CHECK(all.front().delta == some.front().delta);
      k = p.push(k, tk);
    }
  }
}

TEST_CASE("soundness on derived programs") {
  auto res = soundness(hazel(), 300, 6, 1000, false);
  INFO(res.first_failure);
  CHECK(res.mismatches == 0);
  CHECK(res.nonzero == 0);
}

TEST_CASE("totality on random token sequences") {
  auto res = fuzz(hazel(), 1000, 50, 7, false);
  INFO(res.first_failure);
  CHECK(res.exceptions == 0);
  CHECK(res.bad_term == 0);
  CHECK(res.bad_stack == 0);
  CHECK(res.not_completion == 0);
}

TEST_CASE("totality and soundness on mini-grammars") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 15; ++i) {
    std::string js = random_grammar_json(rng);
    Grammar g = load_grammar(js);
    Relations r(g);
    INFO(js);
    auto f = fuzz(r, 150, 25, 100, false);
    INFO(f.first_failure);
    CHECK(f.exceptions + f.bad_term + f.bad_stack + f.not_completion == 0);
    Generator gen(r, 3);
    Parser p(r);
    for (int k = 0; k < 100; ++k) {
      auto d = gen.derive(5);
      TermPtr t = p.parse(d.tokens);
      INFO(term_debug(r.elab, d.term));
      CHECK(same_structure(t, d.term));
    }
  }
}

TEST_CASE("serial and parallel fuzz agree") {
  auto a = fuzz(hazel(), 200, 30, 42, false);
  auto b = fuzz(hazel(), 200, 30, 42, true);
  CHECK(a.exceptions == b.exceptions);
  CHECK(a.bad_term == b.bad_term);
  CHECK(a.not_completion == b.not_completion);
}

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tylr/elaboration.hpp"

namespace tylr {

struct Token {
  Terminal t;
  std::string text;
  bool ghost = false;
  int uid = -1;
};

// Counts of obligations, compared lexicographically from the heaviest weight
// class (infix grout) to the lightest (operand grout).
struct Obligations {
  int infix = 0;
  int sort = 0;
  int ghost = 0;
  int operand = 0;

  Obligations& operator+=(const Obligations& o) {
    infix += o.infix;
    sort += o.sort;
    ghost += o.ghost;
    operand += o.operand;
    return *this;
  }
  Obligations& operator-=(const Obligations& o) {
    infix -= o.infix;
    sort -= o.sort;
    ghost -= o.ghost;
    operand -= o.operand;
    return *this;
  }
  friend Obligations operator+(Obligations a, const Obligations& b) { return a += b; }
  friend Obligations operator-(Obligations a, const Obligations& b) { return a -= b; }
  bool operator==(const Obligations& o) const {
    return infix == o.infix && sort == o.sort && ghost == o.ghost && operand == o.operand;
  }
  bool operator!=(const Obligations& o) const { return !(*this == o); }
  bool operator<(const Obligations& o) const {
    if (infix != o.infix) return infix < o.infix;
    if (sort != o.sort) return sort < o.sort;
    if (ghost != o.ghost) return ghost < o.ghost;
    return operand < o.operand;
  }
  bool operator<=(const Obligations& o) const { return !(o < *this); }
  bool zero() const { return infix == 0 && sort == 0 && ghost == 0 && operand == 0; }
  bool nonneg() const { return infix >= 0 && sort >= 0 && ghost >= 0 && operand >= 0; }
  std::string str() const;
};

Obligations token_obligations(const Token& t);

struct TermNode;
using TermPtr = std::shared_ptr<const TermNode>;

struct Child {
  TermPtr term;  // null for a token child
  Token tok;
  bool is_term() const { return term != nullptr; }
};

// Bit matrix over (left bound, right bound) index pairs.
using OkMatrix = std::vector<std::uint64_t>;

struct TermNode {
  std::vector<Child> children;
  int sort = -1;
  int rule = -1;  // -1 for grout terms
  int level = -1;
  Obligations obl;
  int tokens = 0;
  OkMatrix ok;

  bool produced_by(const Elaboration& e, const NT& n) const;
  bool produced_by(int li, int ri) const { return (ok[li] >> ri) & 1; }
};

// Builds a term over the given children, computing its sort and the set of
// bounded sorts that produce it.
TermPtr make_term(const Elaboration& e, std::vector<Child> children);
TermPtr hole_term(const Elaboration& e, int sort);

Child token_child(Token t);
Child term_child(TermPtr t);

// Whether t is natural, i.e. produced by ⟨0 s 0⟩.
bool natural(const Elaboration& e, const TermPtr& t);

// Recursive production matching, independent of the cached matrices. With
// n null, checks ⟨⊥ s ⊥⟩ for the term's sort.
bool well_formed_term(const Elaboration& e, const NT* n, const TermPtr& t);

Obligations obligations(const TermPtr& t);

// All tokens of the term, left to right.
void flatten(const TermPtr& t, std::vector<Token>& out);

bool same_structure(const TermPtr& a, const TermPtr& b);

}  // namespace tylr

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tylr/parser.hpp"

namespace tylr {

// A token of the buffer before molding. A ghost keeps its tile; a solid token
// with a sort is only remolded within that sort.
struct InputToken {
  std::string text;
  bool ghost = false;
  int tile = -1;
  int sort = -1;
  int uid = -1;
  bool fresh = false;
};

// Tiles whose label is text; token classes only when no label matches.
std::vector<int> candidates(const Grammar& g, const std::string& text);

struct CandidatePlan {
  int tile = -1;
  Option plan;
};

struct MoldChoice {
  int tile = -1;  // -1 when unmolded
  Option plan;
  Obligations delta;
  std::vector<CandidatePlan> considered;  // best plan per candidate
};

// Plan ordering: delta, then pop depth, then walk order, then candidate
// order.
bool plan_less(const Relations& r, const Option& a, int ia, const Option& b, int ib);

struct ParseRun {
  TermPtr term;
  std::vector<int> tiles;  // chosen tile per input token, -1 if unmolded or dropped
  std::vector<Stack> stacks;
  std::vector<MoldChoice> choices;
};

class Molder {
 public:
  explicit Molder(const Relations& r) : rel(r), parser(r) {}

  const Relations& rel;
  Parser parser;

  std::vector<int> restricted(const InputToken& t) const;
  MoldChoice choose(const Stack& k, const InputToken& t);
  Token token_for(const InputToken& t, int tile) const;

  // Molds and pushes one token. Returns the stack unchanged for unmolded
  // text.
  Stack step(const Stack& k, const InputToken& t, MoldChoice* choice = nullptr, int* tile = nullptr);

  ParseRun run(const std::vector<InputToken>& toks, bool keep_stacks = false);
  TermPtr parse_text(const std::string& src);
};

// Splits source text into tokens by maximal munch over labels and token
// classes; whitespace separates.
std::vector<std::string> lex(const Grammar& g, const std::string& src);

std::string choice_json(const Relations& r, const InputToken& t, const MoldChoice& c);

}  // namespace tylr

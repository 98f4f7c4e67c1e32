#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tylr/relations.hpp"
#include "tylr/term.hpp"

namespace tylr {

struct Link;
using LinkPtr = std::shared_ptr<const Link>;

// One stack entry: `op[slot] cell tok` on top of prev. Totals are cumulative
// from the base.
struct Link {
  LinkPtr prev;
  Op op = Op::kLT;
  int slot = -1;
  TermPtr cell;
  Token tok;
  Obligations obl;
  int height = 0;
  int size = 0;
};

// Persistent stack over the start delimiter ⧏.
struct Stack {
  LinkPtr top;

  bool empty() const { return top == nullptr; }
  int head(const Elaboration& e) const;
  Obligations obligations() const { return top ? top->obl : Obligations{}; }
  int height() const { return top ? top->height : 0; }
  int size() const { return top ? top->size : 0; }
  // Links from the base up.
  std::vector<const Link*> links() const;
  Stack push(Op op, int slot, TermPtr cell, Token tok) const;
  Stack below() const { return {top->prev}; }
};

// A way to push one token: pop `depth` segments, then shift along `walk`.
struct Option {
  int depth = 0;
  Stack base;
  std::vector<TermPtr> rs;
  Walk walk;
  Obligations delta;
};

class Parser {
 public:
  explicit Parser(const Relations& r);

  const Relations& rel;
  const Elaboration& e;

  // Every option for pushing tok onto (k, rs), best first. With prune, the
  // search stops once no deeper pop can beat the best option found.
  std::vector<Option> options(const Stack& k, const std::vector<TermPtr>& rs, const Token& tok,
                              bool prune = true);
  Stack apply(const Option& o, const Token& tok);

  // One input token. Ghost tokens are kept only where they match by a single
  // ≐ step. A fresh tile first tries to replace a ghost of the same tile
  // already on the stack.
  Stack push(const Stack& k, const Token& tok, bool fresh = false);

  // Pushes ⧐ and returns the completed term.
  TermPtr finish(const Stack& k);

  TermPtr parse(const std::vector<Token>& toks, std::vector<Stack>* trace = nullptr);

  // Distributes rs over the slots, left to right. Returns nullopt when rs
  // cannot be placed.
  std::optional<std::vector<TermPtr>> fill(const std::vector<TermPtr>& rs,
                                           const std::vector<int>& slots) const;

  // Pops the top segment: reduces a tile segment into a term or dissolves a
  // grout segment. Returns the new stack and reduction sequence.
  std::pair<Stack, std::vector<TermPtr>> pop(const Stack& k, std::vector<TermPtr> rs) const;

  // Whether the walk's step slots can absorb rs, and what it costs.
  std::optional<Obligations> walk_cost(const Walk& w, const std::vector<TermPtr>& rs) const;

  const std::vector<Walk>& walks_for(int src, int dst, const std::vector<TermPtr>& rs);

 private:
  // Cheapest ways to finish a form after each tile: positions to append.
  std::vector<std::vector<int>> completion_;
  std::unordered_map<std::string, std::vector<Walk>> memo_;

  int absorb(int slot, int j, const std::vector<TermPtr>& rs) const;
  TermPtr fill_slot(int slot, const std::vector<TermPtr>& terms) const;
  TermPtr wrap(const TermPtr& t, int sort) const;
  std::vector<Option> ghost_options(const Stack& k, const Token& tok);
};

Obligations total_obligations(const std::vector<TermPtr>& rs);

// Every link is backed by a relation whose slot produces its cell. With
// reference set, cells are checked by recursive production matching.
bool well_formed_stack(const Relations& r, const Stack& k, bool reference = false);

std::string stack_to_string(const Relations& r, const Stack& k, bool ascii = false);

// Tokens that are neither ghosts nor grout.
std::vector<Token> solid_tokens(const TermPtr& t);

}  // namespace tylr

#pragma once

#include <map>
#include <random>
#include <vector>

#include "tylr/relations.hpp"
#include "tylr/term.hpp"

namespace tylr {

struct Generated {
  TermPtr term;
  std::vector<Token> tokens;
};

// Random programs derived from ⟨⊥ ŝ ⊥⟩ over tile productions only.
class Generator {
 public:
  Generator(const Relations& r, std::uint64_t seed);

  // A derivation at most max_depth productions deep.
  Generated derive(int max_depth);
  Generated derive_from(const NT& n, int max_depth);
  // A root-sort program of at least n tokens, built from parenthesized
  // derivations joined by a left-associative operator.
  Generated sized(int n, int chunk_depth = 4);
  // Uniformly random tiles, any order.
  std::vector<Token> random_tokens(int max_len);

  std::string text_for(int tile);
  std::mt19937_64& rng() { return rng_; }

 private:
  const Relations& rel_;
  std::mt19937_64 rng_;
  std::map<int, std::vector<Production>> prods_;

  const std::vector<Production>& prods(const NT& n);
  TermPtr gen(const NT& n, int depth, int max_depth, std::vector<Token>& out);
  int pick(int n);
};

}  // namespace tylr

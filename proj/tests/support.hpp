#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tylr/molder.hpp"
#include "tylr/relations.hpp"

namespace tylr::testing {

// Grammar JSON with 1 to 3 sorts and 1 to 4 levels per sort. Every tile
// label is distinct and every form is in operator form.
std::string random_grammar_json(std::mt19937_64& rng);

// Relation steps seen along derivations of at most `depth` productions from
// ⟨⊥ ŝ ⊥⟩, over explicitly enumerated productions (grout included).
std::set<RelStep> brute_relations(const Elaboration& e, int depth);

struct FuzzResult {
  int runs = 0;
  int exceptions = 0;
  int bad_term = 0;
  int bad_stack = 0;
  int not_completion = 0;
  std::string first_failure;
};

// Random tile sequences pushed one by one with every intermediate stack
// checked. Seeds are base_seed + i for run i.
FuzzResult fuzz(const Relations& r, int runs, int max_len, std::uint64_t base_seed, bool parallel);

struct SoundResult {
  int runs = 0;
  int mismatches = 0;
  int nonzero = 0;
  std::string first_failure;
};

// Derived programs lexed back to text, remolded from scratch and compared
// with their generating trees.
SoundResult soundness(const Relations& r, int runs, int depth, std::uint64_t base_seed,
                      bool parallel);

struct ArgminResult {
  int steps = 0;
  int violations = 0;
  std::string first_failure;
};

// For each step of random molded parses, recomputes every candidate's
// unpruned options and checks the chosen delta is minimal.
ArgminResult argmin_check(const Relations& r, int steps, std::uint64_t base_seed, bool parallel);

}  // namespace tylr::testing

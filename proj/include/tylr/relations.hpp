#pragma once

#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include "tylr/elaboration.hpp"

namespace tylr {

enum class Op { kLT = 0, kEQ = 1, kGT = 2 };

const char* op_name(Op op);

// One precedence comparison τL op_σ τR. Terminals and the slot are codes of
// the owning Elaboration; slot -1 means none.
struct RelStep {
  int left = 0;
  Op op = Op::kLT;
  int slot = -1;
  int right = 0;
  bool operator==(const RelStep& o) const {
    return left == o.left && op == o.op && slot == o.slot && right == o.right;
  }
  bool operator<(const RelStep& o) const;
};

class Relations {
 public:
  explicit Relations(const Grammar& g);
  Relations(const Relations&) = delete;
  Relations& operator=(const Relations&) = delete;

  const Grammar& g;
  Elaboration elab;

  const std::vector<RelStep>& steps() const { return steps_; }
  bool has(const RelStep& s) const;
  bool any(int left, Op op, int right) const;
  // LT and EQ steps leaving a terminal, and those entering one.
  const std::vector<RelStep>& out(int left) const { return out_[left]; }
  const std::vector<RelStep>& in(int right) const { return in_[right]; }
  bool reachable(int nt) const { return reachable_[nt] != 0; }
  const std::vector<NT>& reachable_list() const { return reach_list_; }

  // Test hooks for corrupting a table.
  void insert(const RelStep& s);
  void erase(const RelStep& s);

 private:
  std::vector<RelStep> steps_;
  std::unordered_set<long long> set_;
  std::unordered_set<long long> any_;
  std::vector<std::vector<RelStep>> out_, in_;
  std::vector<char> reachable_;
  std::vector<NT> reach_list_;

  long long key(const RelStep& s) const;
  long long any_key(int l, Op op, int r) const;
  void index();
};

std::string relations_tsv(const Relations& r);
std::string relations_dot(const Relations& r);

struct CoherenceFailure {
  int left_tile = -1;
  int right_tile = -1;
  std::string what;
};

std::vector<CoherenceFailure> check_coherence(const Relations& r);

// Homogeneity, Grout Precedence, Start-Matches-End, No Escaping, No
// Trespassing and Reachability scans.
std::vector<Violation> lemma_scan(const Relations& r);

struct Walk {
  int src = 0;
  std::vector<RelStep> steps;
  int height() const;
  int length() const { return static_cast<int>(steps.size()); }
  int dst() const { return steps.back().right; }
};

// Order key used after (height, length): intermediate terminals by (sort
// name, level, position); grout sorts after tiles of the same sort.
std::vector<std::tuple<std::string, int, int>> walk_key(const Relations& r, const Walk& w);
bool walk_less(const Relations& r, const Walk& a, const Walk& b);
bool strictly_lt_intermediate(const Relations& r, const Walk& w);

// How a slot absorbs pending terms: given the slot and the number j of terms
// absorbed so far, returns the new count, or -1 if the step is blocked.
using Absorb = std::function<int(int slot, int j)>;

// Shortest walks src -> dst over LT/EQ steps that absorb all k terms. Walks
// with strictly ⋖-intermediate tile segments are dropped; if none survive,
// longer walks are tried. Sorted by (height, length, key).
std::vector<Walk> search_walks(const Relations& r, int src, int dst, int k, const Absorb& absorb,
                               int cap = 200);

// search_walks with nothing to absorb.
std::vector<Walk> walks(const Relations& r, int src, int dst);

std::string walk_to_string(const Relations& r, const Walk& w);

}  // namespace tylr

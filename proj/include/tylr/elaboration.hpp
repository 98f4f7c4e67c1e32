#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "tylr/grammar.hpp"

namespace tylr {

enum class GroutShape { kOperand = 0, kInfix = 1, kPrefix = 2, kPostfix = 3 };

const char* shape_name(GroutShape s);

struct Terminal {
  enum class Kind { kStart, kEnd, kTile, kGrout };
  Kind kind = Kind::kStart;
  int tile = -1;
  GroutShape shape = GroutShape::kOperand;
  int sort = -1;

  static Terminal start() { return {Kind::kStart}; }
  static Terminal end() { return {Kind::kEnd}; }
  static Terminal of_tile(int t) { return {Kind::kTile, t}; }
  static Terminal grout(GroutShape s, int sort) { return {Kind::kGrout, -1, s, sort}; }

  bool is_tile() const { return kind == Kind::kTile; }
  bool is_grout() const { return kind == Kind::kGrout; }
  bool operator==(const Terminal& o) const {
    return kind == o.kind && tile == o.tile && shape == o.shape && sort == o.sort;
  }
};

// Bounded sort ⟨p s q⟩.
struct NT {
  int sort = -1;
  Prec left = kBot;
  Prec right = kBot;
  bool operator==(const NT& o) const {
    return sort == o.sort && left == o.left && right == o.right;
  }
  bool operator<(const NT& o) const {
    return std::tie(sort, left, right) < std::tie(o.sort, o.left, o.right);
  }
};

// A production symbol: a terminal or a bounded sort.
struct PSym {
  bool is_nt = false;
  Terminal t;
  NT n;
};

struct Production {
  NT lhs;
  std::vector<PSym> rhs;
  int rule = -1;  // -1 for grout productions
};

// The role a sort occurrence plays inside one form string.
enum class Role { kLeading, kInterior, kTrailing };

// Precomputed elaboration data for one grammar. Terminals and bounded sorts
// are given dense integer codes.
class Elaboration {
 public:
  explicit Elaboration(const Grammar& g);

  const Grammar& g;

  int num_bounds() const { return nb_; }
  int nt_count() const { return static_cast<int>(g.sorts.size()) * nb_ * nb_; }
  int nt_code(const NT& n) const;
  NT nt_of(int code) const;
  NT unbounded(int sort) const { return {sort, kBot, kBot}; }
  NT zero(int sort) const { return {sort, kZero, kZero}; }

  int terminal_count() const { return 2 + static_cast<int>(g.tiles.size()) + 4 * nsorts_; }
  int term_code(const Terminal& t) const;
  Terminal terminal_of(int code) const;
  static constexpr int kStartCode = 0;
  static constexpr int kEndCode = 1;
  int tile_code(int tile) const { return 2 + tile; }
  int grout_code(GroutShape s, int sort) const {
    return 2 + static_cast<int>(g.tiles.size()) + 4 * sort + static_cast<int>(s);
  }

  // Child bounded sort at a sort position of `rule` in the given role, for
  // the producer n.
  NT child(int rule, int pos, Role role, const NT& n) const;

  // Whether a production of n over `rule` can start/end so that position pos
  // is reachable from its beginning/reaches its end.
  bool start_ok(int rule, int pos, const NT& n) const;
  bool end_ok(int rule, int pos, const NT& n) const;

  std::string nt_name(const NT& n) const;
  std::string nt_name(int code) const { return nt_name(nt_of(code)); }
  std::string terminal_name(const Terminal& t, bool cfg_style = false) const;
  std::string terminal_name(int code, bool cfg_style = false) const {
    return terminal_name(terminal_of(code), cfg_style);
  }

 private:
  int nb_;
  int nsorts_;
  std::vector<std::vector<char>> start_free_, start_self_, end_free_, end_self_;
};

// Everything a bounded sort contributes to the relations: for each
// production, its leading and trailing terminals (with the optional slot
// before/after them), consecutive terminal pairs, and terminal/sort
// adjacencies. Terminals and slots are codes; a slot of -1 means none.
struct NTInfo {
  std::vector<std::pair<int, int>> lead;   // (slot, terminal)
  std::vector<std::pair<int, int>> trail;  // (terminal, slot)
  std::vector<std::tuple<int, int, int>> eq;
  std::vector<std::pair<int, int>> term_nt;  // terminal followed by sort
  std::vector<std::pair<int, int>> nt_term;  // sort followed by terminal
  std::vector<int> left_kids, right_kids, kids;
};

// With grout false, only tile productions are scanned.
NTInfo scan_nt(const Elaboration& e, const NT& n, bool grout = true);

// A form string of some rule with its leading/trailing self-sort flags.
struct FormTemplate {
  int sort = -1;
  int level = 0;
  std::vector<int> form;  // rule positions
  bool lead_self = false;
  bool trail_self = false;
};

// Throws GrammarError if the form is not in the rule's language.
FormTemplate reduce_form(const Grammar& g, int sort, int level, const std::vector<int>& form);
bool admits(const Grammar& g, const FormTemplate& f, const NT& n);
Production instantiate(const Grammar& g, const FormTemplate& f, const NT& n);

// Tile productions of n over form strings of at most max_len symbols.
std::vector<Production> produces(const Grammar& g, const NT& n, int max_len);
// Tile productions plus grout productions; infix chains up to max_chain
// operators.
std::vector<Production> inject_grout(const Grammar& g, const NT& n, int max_len, int max_chain);

bool derives_leftmost(const Elaboration& e, const NT& a, const NT& b);

// Every bounded sort reachable from ⟨⊥ ŝ ⊥⟩.
std::vector<NT> reachable_nts(const Elaboration& e);

std::string production_to_string(const Elaboration& e, const Production& p);
std::string dump_cfg(const Elaboration& e, int max_len);

}  // namespace tylr

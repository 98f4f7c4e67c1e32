#pragma once

#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

namespace tylr {

// Precedence values. Declared levels are naturals; the rest are sentinels
// ordered Bot < Zero < every declared level < Top. Zero is the level taken
// by grout operators.
using Prec = int;
inline constexpr Prec kBot = -2;
inline constexpr Prec kZero = -1;
inline constexpr Prec kTop = 1 << 20;

std::string prec_name(Prec p);

enum class Assoc { kNone, kLeft, kRight };

struct Symbol {
  enum class Kind { kTile, kSort, kClass };
  Kind kind = Kind::kTile;
  std::string name;  // literal text, sort name or class name
  int sort = -1;     // resolved sort index (kSort)
  int klass = -1;    // resolved class index (kClass)
  int tile = -1;     // resolved tile id (kTile / kClass)
};

struct Regex;
using RegexPtr = std::shared_ptr<const Regex>;

struct Regex {
  enum class Kind { kEmpty, kSym, kAlt, kSeq, kStar };
  Kind kind = Kind::kEmpty;
  Symbol sym;
  RegexPtr lhs, rhs;
  int pos = -1;  // occurrence index of a kSym node within its rule

  static RegexPtr empty();
  static RegexPtr sym_of(Symbol s, int pos = -1);
  static RegexPtr alt(RegexPtr a, RegexPtr b);
  static RegexPtr seq(RegexPtr a, RegexPtr b);
  static RegexPtr star(RegexPtr a);
  static RegexPtr opt(RegexPtr a) { return alt(a, empty()); }
};

std::string regex_to_string(const RegexPtr& r);

// A terminal of the grammar paired with its mold.
struct TileDef {
  int id = -1;
  std::string label;  // literal text, or "$name" for token classes
  int klass = -1;     // token class index or -1 for literals
  int sort = -1;
  int level = 0;
  int position = 0;
  bool is_class() const { return klass >= 0; }
};

struct TokenClass {
  std::string name;
  std::string pattern;
  std::regex re;
};

// One (sort, level) entry, with its Glushkov automaton over symbol
// occurrences. Positions index `positions`, which is ordered by occurrence.
struct Rule {
  int sort = -1;
  int level = 0;
  Assoc assoc = Assoc::kNone;
  RegexPtr regex;
  std::vector<std::string> sources;

  std::vector<Symbol> positions;
  std::vector<char> first, last;
  std::vector<std::vector<int>> follow;
  std::vector<std::vector<char>> reach;  // reflexive-transitive follow
  bool nullable = false;

  bool is_sort(int pos) const { return positions[pos].kind == Symbol::Kind::kSort; }
  bool is_self(int pos) const { return is_sort(pos) && positions[pos].sort == sort; }
};

struct Violation {
  std::string rule;
  std::string witness;
};

class GrammarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Grammar {
 public:
  std::vector<std::string> sorts;
  int root = -1;
  std::vector<TokenClass> classes;
  std::vector<Rule> rules;
  std::vector<TileDef> tiles;

  int sort_index(const std::string& name) const;
  const Rule* rule(int sort, int level) const;
  int rule_index(int sort, int level) const;
  const Rule& rule_of_tile(int tile) const;
  std::vector<int> levels(int sort) const;
  Assoc assoc(int sort, int level) const;

  // p ≺_s m and m ≻_s q for a bound p/q against a declared level m.
  bool lt(int sort, Prec p, int m) const;
  bool gt(int sort, int m, Prec q) const;

  // Every precedence value that can appear as a bound: Bot, Zero, declared
  // levels of any sort, Top. Sorted ascending.
  const std::vector<Prec>& bounds() const { return bounds_; }
  int bound_index(Prec p) const;

  // Position of a tile inside its rule automaton.
  int tile_pos(int tile) const { return tile_pos_[tile]; }

  void finalize();  // builds automata and lookup tables

 private:
  std::vector<Prec> bounds_;
  std::vector<int> tile_pos_;
  std::map<std::pair<int, int>, int> rule_ix_;
};

// Textual grammar before molds are assigned: forms carry bare terminals.
struct TextGrammar {
  struct Level {
    std::string sort;
    int prec = 0;
    Assoc assoc = Assoc::kNone;
    std::vector<std::string> forms;
  };
  std::string root;
  std::vector<std::pair<std::string, std::string>> classes;
  std::vector<std::string> sorts;
  std::vector<Level> levels;
};

TextGrammar parse_grammar_json(const std::string& text);
Grammar infer_molds(const TextGrammar& f);
Grammar load_grammar(const std::string& text);
Grammar load_grammar_file(const std::string& path);
std::vector<Violation> validate(const Grammar& g);
Grammar builtin_hazel();
const std::string& builtin_hazel_json();

// Parses a form in the micro-syntax into a regex with unresolved symbols.
RegexPtr parse_form(const std::string& src);

// All strings of the rule language with at most max_len symbols. Each string
// is a sequence of rule positions.
std::vector<std::vector<int>> enumerate_forms(const Grammar& g, int sort, int level,
                                              int max_len);

std::string symbol_name(const Grammar& g, const Symbol& s);

}  // namespace tylr

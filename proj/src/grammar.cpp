#include "tylr/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace tylr {

using ojson = nlohmann::ordered_json;

std::string prec_name(Prec p) {
  if (p == kBot) return "⊥";
  if (p == kTop) return "⊤";
  if (p == kZero) return "z";
  return std::to_string(p);
}

RegexPtr Regex::empty() { return std::make_shared<Regex>(); }

RegexPtr Regex::sym_of(Symbol s, int pos) {
  auto r = std::make_shared<Regex>();
  r->kind = Kind::kSym;
  r->sym = std::move(s);
  r->pos = pos;
  return r;
}

RegexPtr Regex::alt(RegexPtr a, RegexPtr b) {
  auto r = std::make_shared<Regex>();
  r->kind = Kind::kAlt;
  r->lhs = std::move(a);
  r->rhs = std::move(b);
  return r;
}

RegexPtr Regex::seq(RegexPtr a, RegexPtr b) {
  auto r = std::make_shared<Regex>();
  r->kind = Kind::kSeq;
  r->lhs = std::move(a);
  r->rhs = std::move(b);
  return r;
}

RegexPtr Regex::star(RegexPtr a) {
  auto r = std::make_shared<Regex>();
  r->kind = Kind::kStar;
  r->lhs = std::move(a);
  return r;
}

namespace {

std::string sym_text(const Symbol& s) {
  switch (s.kind) {
    case Symbol::Kind::kTile: return "'" + s.name + "'";
    case Symbol::Kind::kSort: return s.name;
    case Symbol::Kind::kClass: return "$" + s.name;
  }
  return "?";
}

void regex_str(const RegexPtr& r, std::string& out, int ctx) {
  // ctx: 0 alt, 1 seq, 2 postfix operand
  switch (r->kind) {
    case Regex::Kind::kEmpty: out += "()"; break;
    case Regex::Kind::kSym: out += sym_text(r->sym); break;
    case Regex::Kind::kAlt:
      if (r->rhs->kind == Regex::Kind::kEmpty) {
        if (ctx > 1 || r->lhs->kind != Regex::Kind::kSym) {
          out += "(";
          regex_str(r->lhs, out, 0);
          out += ")?";
        } else {
          regex_str(r->lhs, out, 2);
          out += "?";
        }
        break;
      }
      if (ctx > 0) out += "(";
      regex_str(r->lhs, out, 0);
      out += " | ";
      regex_str(r->rhs, out, 0);
      if (ctx > 0) out += ")";
      break;
    case Regex::Kind::kSeq:
      if (ctx > 1) out += "(";
      regex_str(r->lhs, out, 1);
      out += " ";
      regex_str(r->rhs, out, 1);
      if (ctx > 1) out += ")";
      break;
    case Regex::Kind::kStar:
      if (r->lhs->kind == Regex::Kind::kSym) {
        regex_str(r->lhs, out, 2);
      } else {
        out += "(";
        regex_str(r->lhs, out, 0);
        out += ")";
      }
      out += "*";
      break;
  }
}

class FormParser {
 public:
  explicit FormParser(const std::string& s) : s_(s) {}

  RegexPtr parse() {
    RegexPtr r = alt();
    skip();
    if (i_ < s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return r;
  }

 private:
  const std::string& s_;
  size_t i_ = 0;

  [[noreturn]] void fail(const std::string& msg) {
    throw GrammarError("form \"" + s_ + "\" at column " + std::to_string(i_ + 1) + ": " + msg);
  }

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  bool at_atom() {
    skip();
    if (i_ >= s_.size()) return false;
    char c = s_[i_];
    return c == '\'' || c == '$' || c == '(' || std::isalpha(static_cast<unsigned char>(c));
  }

  RegexPtr alt() {
    RegexPtr r = seq();
    skip();
    while (i_ < s_.size() && s_[i_] == '|') {
      ++i_;
      r = Regex::alt(r, seq());
      skip();
    }
    return r;
  }

  RegexPtr seq() {
    RegexPtr r;
    while (at_atom()) {
      RegexPtr a = post();
      r = r ? Regex::seq(r, a) : a;
    }
    return r ? r : Regex::empty();
  }

  RegexPtr post() {
    RegexPtr a = atom();
    for (;;) {
      skip();
      if (i_ < s_.size() && s_[i_] == '*') {
        ++i_;
        a = Regex::star(a);
      } else if (i_ < s_.size() && s_[i_] == '?') {
        ++i_;
        a = Regex::opt(a);
      } else {
        return a;
      }
    }
  }

  std::string ident() {
    size_t b = i_;
    while (i_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
      ++i_;
    if (b == i_) fail("expected identifier");
    return s_.substr(b, i_ - b);
  }

  RegexPtr atom() {
    skip();
    char c = s_[i_];
    Symbol sym;
    if (c == '\'') {
      ++i_;
      size_t b = i_;
      while (i_ < s_.size() && s_[i_] != '\'') ++i_;
      if (i_ >= s_.size()) fail("unterminated literal");
      sym.kind = Symbol::Kind::kTile;
      sym.name = s_.substr(b, i_ - b);
      ++i_;
      if (sym.name.empty()) fail("empty literal");
      if (sym.name.find_first_of(" \t\n") != std::string::npos)
        fail("literal contains whitespace");
      return Regex::sym_of(sym);
    }
    if (c == '$') {
      ++i_;
      sym.kind = Symbol::Kind::kClass;
      sym.name = ident();
      return Regex::sym_of(sym);
    }
    if (c == '(') {
      ++i_;
      RegexPtr r = alt();
      skip();
      if (i_ >= s_.size() || s_[i_] != ')') fail("expected ')'");
      ++i_;
      return r;
    }
    if (!std::isupper(static_cast<unsigned char>(c))) fail("sort names must be capitalized");
    sym.kind = Symbol::Kind::kSort;
    sym.name = ident();
    return Regex::sym_of(sym);
  }
};

// Glushkov construction. Returns the regex with numbered positions.
struct Glushkov {
  std::vector<Symbol> pos;
  std::vector<std::set<int>> follow;

  struct Info {
    bool nullable;
    std::set<int> first, last;
  };

  RegexPtr number(const RegexPtr& r) {
    switch (r->kind) {
      case Regex::Kind::kEmpty: return r;
      case Regex::Kind::kSym: {
        int p = static_cast<int>(pos.size());
        pos.push_back(r->sym);
        follow.emplace_back();
        return Regex::sym_of(r->sym, p);
      }
      case Regex::Kind::kAlt: {
        auto a = number(r->lhs);
        return Regex::alt(a, number(r->rhs));
      }
      case Regex::Kind::kSeq: {
        auto a = number(r->lhs);
        return Regex::seq(a, number(r->rhs));
      }
      case Regex::Kind::kStar: return Regex::star(number(r->lhs));
    }
    return r;
  }

  Info info(const RegexPtr& r) {
    switch (r->kind) {
      case Regex::Kind::kEmpty: return {true, {}, {}};
      case Regex::Kind::kSym: return {false, {r->pos}, {r->pos}};
      case Regex::Kind::kAlt: {
        Info a = info(r->lhs), b = info(r->rhs);
        a.nullable = a.nullable || b.nullable;
        a.first.insert(b.first.begin(), b.first.end());
        a.last.insert(b.last.begin(), b.last.end());
        return a;
      }
      case Regex::Kind::kSeq: {
        Info a = info(r->lhs), b = info(r->rhs);
        for (int l : a.last) follow[l].insert(b.first.begin(), b.first.end());
        Info out;
        out.nullable = a.nullable && b.nullable;
        out.first = a.first;
        if (a.nullable) out.first.insert(b.first.begin(), b.first.end());
        out.last = b.last;
        if (b.nullable) out.last.insert(a.last.begin(), a.last.end());
        return out;
      }
      case Regex::Kind::kStar: {
        Info a = info(r->lhs);
        for (int l : a.last) follow[l].insert(a.first.begin(), a.first.end());
        a.nullable = true;
        return a;
      }
    }
    return {};
  }
};

Assoc parse_assoc(const ojson& v) {
  if (v.is_null()) return Assoc::kNone;
  if (v.is_string()) {
    if (v == "left") return Assoc::kLeft;
    if (v == "right") return Assoc::kRight;
  }
  throw GrammarError("assoc must be \"left\", \"right\" or null");
}

}  // namespace

std::string regex_to_string(const RegexPtr& r) {
  std::string out;
  regex_str(r, out, 0);
  return out;
}

RegexPtr parse_form(const std::string& src) { return FormParser(src).parse(); }

int Grammar::sort_index(const std::string& name) const {
  for (size_t i = 0; i < sorts.size(); ++i)
    if (sorts[i] == name) return static_cast<int>(i);
  return -1;
}

int Grammar::rule_index(int sort, int level) const {
  auto it = rule_ix_.find({sort, level});
  return it == rule_ix_.end() ? -1 : it->second;
}

const Rule* Grammar::rule(int sort, int level) const {
  int i = rule_index(sort, level);
  return i < 0 ? nullptr : &rules[i];
}

const Rule& Grammar::rule_of_tile(int tile) const {
  return *rule(tiles[tile].sort, tiles[tile].level);
}

std::vector<int> Grammar::levels(int sort) const {
  std::vector<int> out;
  for (const auto& r : rules)
    if (r.sort == sort) out.push_back(r.level);
  std::sort(out.begin(), out.end());
  return out;
}

Assoc Grammar::assoc(int sort, int level) const {
  const Rule* r = rule(sort, level);
  return r ? r->assoc : Assoc::kNone;
}

bool Grammar::lt(int sort, Prec p, int m) const {
  if (p == kBot || p == kZero) return true;
  if (p == kTop) return false;
  return p < m || (p == m && assoc(sort, m) == Assoc::kRight);
}

bool Grammar::gt(int sort, int m, Prec q) const {
  if (q == kBot || q == kZero) return true;
  if (q == kTop) return false;
  return m > q || (m == q && assoc(sort, m) == Assoc::kLeft);
}

int Grammar::bound_index(Prec p) const {
  auto it = std::lower_bound(bounds_.begin(), bounds_.end(), p);
  if (it == bounds_.end() || *it != p) return -1;
  return static_cast<int>(it - bounds_.begin());
}

void Grammar::finalize() {
  rule_ix_.clear();
  std::set<Prec> bs{kBot, kZero, kTop};
  for (size_t i = 0; i < rules.size(); ++i) {
    rule_ix_[{rules[i].sort, rules[i].level}] = static_cast<int>(i);
    bs.insert(rules[i].level);
  }
  bounds_.assign(bs.begin(), bs.end());
  tile_pos_.assign(tiles.size(), -1);
  for (const auto& t : tiles) tile_pos_[t.id] = t.position;
}

TextGrammar parse_grammar_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw GrammarError("syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_object()) throw GrammarError("syntax error at byte 0: grammar must be an object");
  TextGrammar f;
  try {
    if (j.contains("token_classes")) {
      for (auto& [k, v] : j["token_classes"].items())
        f.classes.emplace_back(k, v.get<std::string>());
    }
    if (!j.contains("sorts") || !j["sorts"].is_object() || j["sorts"].empty())
      throw GrammarError("no root sort");
    for (auto& [name, levels] : j["sorts"].items()) {
      f.sorts.push_back(name);
      for (auto& lv : levels) {
        TextGrammar::Level L;
        L.sort = name;
        L.prec = lv.at("prec").get<int>();
        if (L.prec < 0) throw GrammarError("negative precedence in sort " + name);
        L.assoc = lv.contains("assoc") ? parse_assoc(lv["assoc"]) : Assoc::kNone;
        for (auto& form : lv.at("forms")) L.forms.push_back(form.get<std::string>());
        f.levels.push_back(std::move(L));
      }
    }
    if (!j.contains("root")) throw GrammarError("no root sort");
    f.root = j["root"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw GrammarError(std::string("malformed grammar: ") + e.what());
  }
  return f;
}

Grammar infer_molds(const TextGrammar& f) {
  Grammar g;
  g.sorts = f.sorts;
  g.root = g.sort_index(f.root);
  if (g.root < 0) throw GrammarError("no root sort: unknown root '" + f.root + "'");
  for (const auto& [name, pat] : f.classes) {
    TokenClass c;
    c.name = name;
    c.pattern = pat;
    try {
      c.re = std::regex(pat, std::regex::ECMAScript);
    } catch (const std::regex_error&) {
      throw GrammarError("bad token class pattern for $" + name);
    }
    g.classes.push_back(std::move(c));
  }
  std::vector<TextGrammar::Level> levels = f.levels;
  std::stable_sort(levels.begin(), levels.end(), [&](const auto& a, const auto& b) {
    int sa = g.sort_index(a.sort), sb = g.sort_index(b.sort);
    return sa != sb ? sa < sb : a.prec < b.prec;
  });
  std::set<std::pair<int, int>> seen;
  for (const auto& L : levels) {
    int s = g.sort_index(L.sort);
    if (!seen.insert({s, L.prec}).second)
      throw GrammarError("duplicate entry for sort " + L.sort + " level " + std::to_string(L.prec));
    if (L.forms.empty())
      throw GrammarError("sort " + L.sort + " level " + std::to_string(L.prec) + " has no forms");
    RegexPtr re;
    for (const auto& src : L.forms) {
      RegexPtr r = parse_form(src);
      re = re ? Regex::alt(re, r) : r;
    }
    Rule rule;
    rule.sort = s;
    rule.level = L.prec;
    rule.assoc = L.assoc;
    rule.sources = L.forms;
    Glushkov gl;
    rule.regex = gl.number(re);
    auto inf = gl.info(rule.regex);
    rule.nullable = inf.nullable;
    int n = static_cast<int>(gl.pos.size());
    rule.positions = gl.pos;
    rule.first.assign(n, 0);
    rule.last.assign(n, 0);
    for (int p : inf.first) rule.first[p] = 1;
    for (int p : inf.last) rule.last[p] = 1;
    rule.follow.resize(n);
    for (int p = 0; p < n; ++p) rule.follow[p].assign(gl.follow[p].begin(), gl.follow[p].end());
    rule.reach.assign(n, std::vector<char>(n, 0));
    for (int p = 0; p < n; ++p) {
      std::vector<int> st{p};
      rule.reach[p][p] = 1;
      while (!st.empty()) {
        int x = st.back();
        st.pop_back();
        for (int y : rule.follow[x])
          if (!rule.reach[p][y]) {
            rule.reach[p][y] = 1;
            st.push_back(y);
          }
      }
    }
    for (int p = 0; p < n; ++p) {
      Symbol& sym = rule.positions[p];
      if (sym.kind == Symbol::Kind::kSort) {
        sym.sort = g.sort_index(sym.name);
        if (sym.sort < 0)
          throw GrammarError("unknown sort '" + sym.name + "' in sort " + L.sort + " level " +
                             std::to_string(L.prec));
        continue;
      }
      TileDef t;
      t.id = static_cast<int>(g.tiles.size());
      t.sort = s;
      t.level = L.prec;
      t.position = p;
      if (sym.kind == Symbol::Kind::kClass) {
        for (size_t c = 0; c < g.classes.size(); ++c)
          if (g.classes[c].name == sym.name) t.klass = static_cast<int>(c);
        if (t.klass < 0) throw GrammarError("unknown token class '$" + sym.name + "'");
        sym.klass = t.klass;
        t.label = "$" + sym.name;
      } else {
        t.label = sym.name;
      }
      sym.tile = t.id;
      g.tiles.push_back(t);
    }
    g.rules.push_back(std::move(rule));
  }
  g.finalize();
  return g;
}

Grammar load_grammar(const std::string& text) { return infer_molds(parse_grammar_json(text)); }

Grammar load_grammar_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GrammarError("cannot read grammar file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_grammar(ss.str());
}

std::string symbol_name(const Grammar& g, const Symbol& s) {
  if (s.kind == Symbol::Kind::kSort) return s.sort >= 0 ? g.sorts[s.sort] : s.name;
  return sym_text(s);
}

std::vector<std::vector<int>> enumerate_forms(const Grammar& g, int sort, int level,
                                              int max_len) {
  const Rule* r = g.rule(sort, level);
  if (!r) throw GrammarError("no rule for sort/level");
  std::vector<std::vector<int>> out;
  if (r->nullable) out.push_back({});
  std::vector<int> cur;
  std::function<void(int)> go = [&](int p) {
    cur.push_back(p);
    if (r->last[p]) out.push_back(cur);
    if (static_cast<int>(cur.size()) < max_len)
      for (int q : r->follow[p]) go(q);
    cur.pop_back();
  };
  if (max_len > 0)
    for (int p = 0; p < static_cast<int>(r->positions.size()); ++p)
      if (r->first[p]) go(p);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

namespace {

std::string form_text(const Grammar& g, const Rule& r, const std::vector<int>& w) {
  std::string s;
  for (int p : w) {
    if (!s.empty()) s += ' ';
    s += symbol_name(g, r.positions[p]);
  }
  return s;
}

// Shortest position path from a first position to a last position that
// passes through the edge a -> b (b == -1 means just through a).
std::vector<int> witness_through(const Rule& r, int a, int b) {
  int n = static_cast<int>(r.positions.size());
  auto bfs = [&](const std::vector<int>& starts, auto&& is_goal) -> std::vector<int> {
    std::vector<int> prev(n, -2);
    std::vector<int> q;
    for (int s : starts) {
      prev[s] = -1;
      q.push_back(s);
    }
    for (size_t i = 0; i < q.size(); ++i) {
      int x = q[i];
      if (is_goal(x)) {
        std::vector<int> path;
        for (int y = x; y != -1; y = prev[y]) path.push_back(y);
        std::reverse(path.begin(), path.end());
        return path;
      }
      for (int y : r.follow[x])
        if (prev[y] == -2) {
          prev[y] = x;
          q.push_back(y);
        }
    }
    return {};
  };
  std::vector<int> firsts;
  for (int p = 0; p < n; ++p)
    if (r.first[p]) firsts.push_back(p);
  auto head = bfs(firsts, [&](int x) { return x == a; });
  int from = b >= 0 ? b : a;
  auto tail = bfs({from}, [&](int x) { return r.last[x] != 0; });
  if (b >= 0) head.push_back(b);
  head.insert(head.end(), tail.begin() + 1, tail.end());
  return head;
}

}  // namespace

std::vector<Violation> validate(const Grammar& g) {
  std::vector<Violation> out;
  if (g.root < 0 || g.root >= static_cast<int>(g.sorts.size()))
    out.push_back({"RootPresence", "root sort missing"});
  std::set<int> with_rules;
  for (const auto& r : g.rules) with_rules.insert(r.sort);
  for (size_t s = 0; s < g.sorts.size(); ++s)
    if (!with_rules.count(static_cast<int>(s)))
      out.push_back({"SymbolClosure", "sort " + g.sorts[s] + " has no forms"});
  for (const auto& r : g.rules) {
    std::string where = g.sorts[r.sort] + "/" + std::to_string(r.level) + ": ";
    int n = static_cast<int>(r.positions.size());
    for (int p = 0; p < n; ++p) {
      const Symbol& sym = r.positions[p];
      if (sym.kind == Symbol::Kind::kSort &&
          (sym.sort < 0 || sym.sort >= static_cast<int>(g.sorts.size())))
        out.push_back({"SymbolClosure", where + sym.name});
      if (sym.kind != Symbol::Kind::kSort) continue;
      for (int q : r.follow[p])
        if (r.positions[q].kind == Symbol::Kind::kSort)
          out.push_back({"OperatorForm", where + form_text(g, r, witness_through(r, p, q))});
    }
    // Every string of the rule must contain a tile.
    bool tile_free = r.nullable;
    std::vector<char> seen(n, 0);
    std::vector<int> st;
    for (int p = 0; p < n; ++p)
      if (r.first[p] && r.is_sort(p)) {
        seen[p] = 1;
        st.push_back(p);
      }
    while (!st.empty() && !tile_free) {
      int x = st.back();
      st.pop_back();
      if (r.last[x]) tile_free = true;
      for (int y : r.follow[x])
        if (r.is_sort(y) && !seen[y]) {
          seen[y] = 1;
          st.push_back(y);
        }
    }
    if (tile_free) out.push_back({"TileFreeForm", where + regex_to_string(r.regex)});
  }
  // Two molds of one label in one level clash when their neighbourhoods are
  // the same: nothing in the form could tell them apart.
  using MoldKey = std::tuple<std::string, int, int, bool, bool, std::set<std::string>,
                             std::set<std::string>>;
  std::map<MoldKey, int> molds;
  for (const auto& t : g.tiles) {
    const Rule& r = g.rule_of_tile(t.id);
    std::set<std::string> after, before;
    for (int q : r.follow[t.position]) after.insert(r.positions[q].name);
    for (size_t q = 0; q < r.positions.size(); ++q)
      for (int f : r.follow[q])
        if (f == t.position) before.insert(r.positions[q].name);
    MoldKey key{t.label, t.sort, t.level, static_cast<bool>(r.first[t.position]),
                static_cast<bool>(r.last[t.position]), after, before};
    if (molds[key]++ == 1)
      out.push_back({"UniqueTiles", t.label + " in " + g.sorts[t.sort] + "/" +
                                        std::to_string(t.level) + "#" +
                                        std::to_string(t.position)});
  }
  return out;
}

const std::string& builtin_hazel_json() {
  static const std::string text = R"({
  "root": "E",
  "token_classes": {"num": "[0-9]+", "id": "[a-z][a-zA-Z0-9_]*"},
  "sorts": {
    "E": [
      {"prec": 0, "assoc": "right",
       "forms": ["'let' P '=' E 'in' E", "'fun' P '=>' E", "'if' E 'then' E 'else' E", "E ',' E"]},
      {"prec": 1, "assoc": "left", "forms": ["E '+' E", "E '-' E"]},
      {"prec": 2, "assoc": "left", "forms": ["E '*' E"]},
      {"prec": 3, "assoc": "right", "forms": ["'-' E"]},
      {"prec": 4, "assoc": "left", "forms": ["E '(' E ')'"]},
      {"prec": 5, "assoc": null, "forms": ["'(' E ')'", "$num", "$id"]}
    ],
    "P": [
      {"prec": 0, "assoc": null, "forms": ["P ':' T"]},
      {"prec": 1, "assoc": "right", "forms": ["P ',' P"]},
      {"prec": 2, "assoc": null, "forms": ["'(' P ')'", "$id"]}
    ],
    "T": [
      {"prec": 0, "assoc": "right", "forms": ["T '->' T"]},
      {"prec": 1, "assoc": null, "forms": ["'(' T ')'", "$id"]}
    ]
  }
}
)";
  return text;
}

Grammar builtin_hazel() { return load_grammar(builtin_hazel_json()); }

}  // namespace tylr

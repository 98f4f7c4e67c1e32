#include "tylr/gen.hpp"

#include <algorithm>

namespace tylr {

namespace {

const char* kNames[] = {"x", "y", "z", "a", "b", "f", "g", "n", "k1", "foo", "bar", "q_2"};
const char* kNums[] = {"0", "1", "2", "3", "4", "7", "10", "42", "365"};

Token tile_token(const Grammar& g, int tile, std::string text) {
  Token t;
  t.t = Terminal::of_tile(tile);
  t.text = text.empty() ? g.tiles[tile].label : std::move(text);
  return t;
}

}  // namespace

Generator::Generator(const Relations& r, std::uint64_t seed) : rel_(r), rng_(seed) {}

int Generator::pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

std::string Generator::text_for(int tile) {
  const Grammar& g = rel_.g;
  const TileDef& d = g.tiles[tile];
  if (!d.is_class()) return d.label;
  const auto& re = g.classes[d.klass].re;
  std::vector<std::string> pool;
  auto reserved = [&](const std::string& s) {
    for (const auto& t : g.tiles)
      if (!t.is_class() && t.label == s) return true;
    return false;
  };
  for (const char* s : kNames)
    if (std::regex_match(s, re) && !reserved(s)) pool.push_back(s);
  for (const char* s : kNums)
    if (std::regex_match(s, re) && !reserved(s)) pool.push_back(s);
  if (pool.empty()) {
    // Fall back on short strings over letters and digits.
    for (char c = 'a'; c <= 'z'; ++c) {
      std::string s(1, c);
      if (std::regex_match(s, re) && !reserved(s)) pool.push_back(s);
    }
    for (char c = '0'; c <= '9'; ++c) {
      std::string s(1, c);
      if (std::regex_match(s, re) && !reserved(s)) pool.push_back(s);
    }
  }
  if (pool.empty()) return d.label;
  return pool[pick(static_cast<int>(pool.size()))];
}

const std::vector<Production>& Generator::prods(const NT& n) {
  int c = rel_.elab.nt_code(n);
  auto it = prods_.find(c);
  if (it != prods_.end()) return it->second;
  return prods_.emplace(c, produces(rel_.g, n, 8)).first->second;
}

TermPtr Generator::gen(const NT& n, int depth, int max_depth, std::vector<Token>& out) {
  const auto& all = prods(n);
  std::vector<const Production*> ok;
  for (const auto& p : all) {
    bool leaf = std::none_of(p.rhs.begin(), p.rhs.end(), [](const PSym& s) { return s.is_nt; });
    if (depth + 1 < max_depth || leaf) ok.push_back(&p);
  }
  if (ok.empty())
    for (const auto& p : all) ok.push_back(&p);
  const Production& p = *ok[pick(static_cast<int>(ok.size()))];
  std::vector<Child> kids;
  for (const auto& s : p.rhs) {
    if (s.is_nt) {
      kids.push_back(term_child(gen(s.n, depth + 1, max_depth, out)));
    } else {
      Token t = tile_token(rel_.g, s.t.tile, text_for(s.t.tile));
      out.push_back(t);
      kids.push_back(token_child(t));
    }
  }
  return make_term(rel_.elab, std::move(kids));
}

Generated Generator::derive_from(const NT& n, int max_depth) {
  Generated g;
  g.term = gen(n, 0, max_depth, g.tokens);
  return g;
}

Generated Generator::derive(int max_depth) {
  return derive_from(rel_.elab.unbounded(rel_.g.root), max_depth);
}

Generated Generator::sized(int n, int chunk_depth) {
  const Grammar& g = rel_.g;
  const Elaboration& e = rel_.elab;
  int s = g.root;
  int open = -1, close = -1, op = -1;
  for (const auto& r : g.rules) {
    if (r.sort != s) continue;
    int np = static_cast<int>(r.positions.size());
    for (int a = 0; a < np; ++a) {
      if (!r.first[a]) continue;
      for (int b : r.follow[a])
        for (int c : r.follow[b]) {
          if (!r.is_sort(a) && r.is_self(b) && !r.is_sort(c) && r.last[c] && open < 0) {
            open = r.positions[a].tile;
            close = r.positions[c].tile;
          }
          if (r.is_self(a) && !r.is_sort(b) && r.is_self(c) && r.last[c] &&
              r.assoc == Assoc::kLeft && op < 0)
            op = r.positions[b].tile;
        }
    }
  }
  Generated out;
  if (open < 0 || op < 0) {
    do {
      out = derive(chunk_depth + 2);
    } while (static_cast<int>(out.tokens.size()) < n && chunk_depth++ < 12);
    return out;
  }
  auto chunk = [&]() {
    Generated c = derive(chunk_depth);
    Token o = tile_token(g, open, "");
    Token cl = tile_token(g, close, "");
    out.tokens.push_back(o);
    out.tokens.insert(out.tokens.end(), c.tokens.begin(), c.tokens.end());
    out.tokens.push_back(cl);
    return make_term(e, {token_child(o), term_child(c.term), token_child(cl)});
  };
  out.term = chunk();
  while (static_cast<int>(out.tokens.size()) < n) {
    Token t = tile_token(g, op, "");
    out.tokens.push_back(t);
    TermPtr rhs = chunk();
    out.term = make_term(e, {term_child(out.term), token_child(t), term_child(rhs)});
  }
  return out;
}

std::vector<Token> Generator::random_tokens(int max_len) {
  const Grammar& g = rel_.g;
  int len = std::uniform_int_distribution<int>(0, max_len)(rng_);
  std::vector<Token> out;
  for (int i = 0; i < len; ++i) {
    int t = pick(static_cast<int>(g.tiles.size()));
    out.push_back(tile_token(g, t, text_for(t)));
  }
  return out;
}

}  // namespace tylr

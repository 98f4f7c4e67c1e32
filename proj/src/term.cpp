#include "tylr/term.hpp"

#include <functional>

namespace tylr {

std::string Obligations::str() const {
  return "{infix:" + std::to_string(infix) + ",sort:" + std::to_string(sort) +
         ",ghost:" + std::to_string(ghost) + ",operand:" + std::to_string(operand) + "}";
}

Obligations token_obligations(const Token& t) {
  Obligations o;
  if (t.t.is_tile()) {
    o.ghost = t.ghost ? 1 : 0;
  } else if (t.t.is_grout()) {
    switch (t.t.shape) {
      case GroutShape::kOperand: o.operand = 1; break;
      case GroutShape::kInfix: o.infix = 1; break;
      case GroutShape::kPrefix:
      case GroutShape::kPostfix: o.sort = 1; break;
    }
  }
  return o;
}

Child token_child(Token t) {
  Child c;
  c.tok = std::move(t);
  return c;
}

Child term_child(TermPtr t) {
  Child c;
  c.term = std::move(t);
  return c;
}

namespace {

std::uint64_t all_bits(int nb) { return nb >= 64 ? ~0ULL : ((1ULL << nb) - 1); }

void tile_matrix(const Elaboration& e, TermNode& n) {
  const Grammar& g = e.g;
  const Rule& r = g.rules[n.rule];
  const auto& ch = n.children;
  int nc = static_cast<int>(ch.size());
  int np = static_cast<int>(r.positions.size());
  // Reachable positions after each child; -1 stands for the start.
  std::vector<char> cur(np + 1, 0), nxt(np + 1, 0);
  cur[np] = 1;  // index np is the start state
  bool prev_term = false;
  for (int i = 0; i < nc; ++i) {
    std::fill(nxt.begin(), nxt.end(), 0);
    const Child& c = ch[i];
    if (c.is_term() && prev_term) return;
    prev_term = c.is_term();
    auto can_step = [&](int from, int to) {
      if (from == np) return r.first[to] != 0;
      for (int f : r.follow[from])
        if (f == to) return true;
      return false;
    };
    for (int from = 0; from <= np; ++from) {
      if (!cur[from]) continue;
      if (c.is_term()) {
        for (int p = 0; p < np; ++p)
          if (r.is_sort(p) && r.positions[p].sort == c.term->sort && can_step(from, p)) nxt[p] = 1;
      } else {
        int p = r.positions.size() ? g.tile_pos(c.tok.t.tile) : -1;
        if (p >= 0 && can_step(from, p)) nxt[p] = 1;
      }
    }
    std::swap(cur, nxt);
  }
  bool ends = false;
  for (int p = 0; p < np; ++p) ends = ends || (cur[p] && r.last[p]);
  if (!ends || nc == 0 || (nc == 1 && ch[0].is_term())) return;

  int nb = e.num_bounds();
  int bot = g.bound_index(kBot), lev = g.bound_index(r.level);
  std::uint64_t lmask = all_bits(nb), rmask = all_bits(nb);
  for (int i = 0; i < nc; ++i) {
    if (!ch[i].is_term()) continue;
    const TermNode& t = *ch[i].term;
    bool self = t.sort == r.sort;
    if (self && i == 0) {
      lmask = 0;
      for (int p = 0; p < nb; ++p)
        if (g.lt(r.sort, g.bounds()[p], r.level) && t.produced_by(p, lev)) lmask |= 1ULL << p;
    } else if (self && i == nc - 1) {
      rmask = 0;
      for (int q = 0; q < nb; ++q)
        if (g.gt(r.sort, r.level, g.bounds()[q]) && t.produced_by(lev, q)) rmask |= 1ULL << q;
    } else if (!t.produced_by(bot, bot)) {
      return;
    }
  }
  for (int p = 0; p < nb; ++p)
    if ((lmask >> p) & 1) n.ok[p] = rmask;
}

void grout_matrix(const Elaboration& e, TermNode& n) {
  const Grammar& g = e.g;
  const auto& ch = n.children;
  int nb = e.num_bounds();
  int bot = g.bound_index(kBot), z = g.bound_index(kZero);
  auto fill_all = [&] {
    for (int p = 0; p < nb; ++p) n.ok[p] = all_bits(nb);
  };
  if (ch.size() == 1 && !ch[0].is_term() && ch[0].tok.t.shape == GroutShape::kOperand) {
    fill_all();
    return;
  }
  if (ch.size() == 2 && !ch[0].is_term() && ch[0].tok.t.shape == GroutShape::kPrefix &&
      ch[1].is_term() && ch[1].term->sort != n.sort && ch[1].term->produced_by(bot, bot)) {
    fill_all();
    return;
  }
  if (ch.size() >= 3 && ch.size() % 2 == 1) {
    for (size_t i = 0; i < ch.size(); ++i) {
      if (i % 2 == 0) {
        if (!ch[i].is_term() || ch[i].term->sort != n.sort || !ch[i].term->produced_by(z, z))
          return;
      } else if (ch[i].is_term() || ch[i].tok.t.shape != GroutShape::kInfix ||
                 ch[i].tok.t.sort != n.sort) {
        return;
      }
    }
    n.ok[bot] = 1ULL << bot;
  }
}

}  // namespace

bool TermNode::produced_by(const Elaboration& e, const NT& n) const {
  return n.sort == sort && produced_by(e.g.bound_index(n.left), e.g.bound_index(n.right));
}

TermPtr make_term(const Elaboration& e, std::vector<Child> children) {
  auto n = std::make_shared<TermNode>();
  n->children = std::move(children);
  n->ok.assign(e.num_bounds(), 0);
  int tile_rule = -1, grout_sort = -1;
  bool mixed = false;
  for (const auto& c : n->children) {
    if (c.is_term()) {
      n->obl += c.term->obl;
      n->tokens += c.term->tokens;
      continue;
    }
    n->obl += token_obligations(c.tok);
    n->tokens += 1;
    if (c.tok.t.is_tile()) {
      const TileDef& d = e.g.tiles[c.tok.t.tile];
      int ri = e.g.rule_index(d.sort, d.level);
      if (tile_rule >= 0 && tile_rule != ri) mixed = true;
      tile_rule = ri;
    } else if (c.tok.t.is_grout()) {
      if (grout_sort >= 0 && grout_sort != c.tok.t.sort) mixed = true;
      grout_sort = c.tok.t.sort;
    } else {
      mixed = true;
    }
  }
  if (tile_rule >= 0 && grout_sort >= 0) mixed = true;
  if (tile_rule >= 0) {
    n->rule = tile_rule;
    n->sort = e.g.rules[tile_rule].sort;
    n->level = e.g.rules[tile_rule].level;
    if (!mixed) tile_matrix(e, *n);
  } else if (grout_sort >= 0) {
    n->sort = grout_sort;
    if (!mixed) grout_matrix(e, *n);
  }
  return n;
}

TermPtr hole_term(const Elaboration& e, int sort) {
  Token t;
  t.t = Terminal::grout(GroutShape::kOperand, sort);
  t.text = "⬚";
  return make_term(e, {token_child(t)});
}

bool natural(const Elaboration& e, const TermPtr& t) {
  return t->produced_by(e, e.zero(t->sort));
}

namespace {

bool wf_rec(const Elaboration& e, const NT& n, const TermPtr& t) {
  const Grammar& g = e.g;
  const auto& ch = t->children;
  bool has_tile = false, has_grout = false;
  for (const auto& c : ch)
    if (!c.is_term()) {
      has_tile = has_tile || c.tok.t.is_tile();
      has_grout = has_grout || c.tok.t.is_grout();
      if (!c.tok.t.is_tile() && !c.tok.t.is_grout()) return false;
      if (c.tok.ghost && !c.tok.t.is_tile()) return false;
    }
  if (has_tile && has_grout) return false;
  if (has_grout) {
    int s = -1;
    for (const auto& c : ch)
      if (!c.is_term()) s = c.tok.t.sort;
    if (s != n.sort) return false;
    if (ch.size() == 1 && !ch[0].is_term())
      return ch[0].tok.t.shape == GroutShape::kOperand;
    if (ch.size() == 2 && !ch[0].is_term() && ch[0].tok.t.shape == GroutShape::kPrefix &&
        ch[1].is_term()) {
      int r = ch[1].term->sort;
      return r != s && wf_rec(e, e.unbounded(r), ch[1].term);
    }
    if (!(n.left == kBot && n.right == kBot) || ch.size() < 3 || ch.size() % 2 == 0) return false;
    for (size_t i = 0; i < ch.size(); ++i) {
      if (i % 2 == 0) {
        if (!ch[i].is_term() || !wf_rec(e, e.zero(s), ch[i].term)) return false;
      } else if (ch[i].is_term() || ch[i].tok.t.shape != GroutShape::kInfix) {
        return false;
      }
    }
    return true;
  }
  if (!has_tile) return false;
  int tile = -1;
  for (const auto& c : ch)
    if (!c.is_term()) tile = c.tok.t.tile;
  const TileDef& d = g.tiles[tile];
  if (d.sort != n.sort) return false;
  const Rule& r = *g.rule(d.sort, d.level);
  // Enumerate candidate position strings for the children.
  std::vector<int> form;
  std::function<bool(size_t)> go = [&](size_t i) -> bool {
    if (i == ch.size()) {
      FormTemplate ft;
      try {
        ft = reduce_form(g, d.sort, d.level, form);
      } catch (const GrammarError&) {
        return false;
      }
      if (!admits(g, ft, n)) return false;
      Production p = instantiate(g, ft, n);
      for (size_t k = 0; k < ch.size(); ++k)
        if (ch[k].is_term() && !wf_rec(e, p.rhs[k].n, ch[k].term)) return false;
      return true;
    }
    if (!ch[i].is_term()) {
      const TileDef& td = g.tiles[ch[i].tok.t.tile];
      if (td.sort != d.sort || td.level != d.level) return false;
      form.push_back(td.position);
      bool ok = go(i + 1);
      form.pop_back();
      return ok;
    }
    for (size_t p = 0; p < r.positions.size(); ++p) {
      if (!r.is_sort(static_cast<int>(p)) || r.positions[p].sort != ch[i].term->sort) continue;
      form.push_back(static_cast<int>(p));
      bool ok = go(i + 1);
      form.pop_back();
      if (ok) return true;
    }
    return false;
  };
  return go(0);
}

}  // namespace

bool well_formed_term(const Elaboration& e, const NT* n, const TermPtr& t) {
  if (!t) return false;
  if (n) return wf_rec(e, *n, t);
  if (t->sort < 0) return false;
  return wf_rec(e, e.unbounded(t->sort), t);
}

Obligations obligations(const TermPtr& t) { return t ? t->obl : Obligations{}; }

void flatten(const TermPtr& t, std::vector<Token>& out) {
  for (const auto& c : t->children) {
    if (c.is_term())
      flatten(c.term, out);
    else
      out.push_back(c.tok);
  }
}

bool same_structure(const TermPtr& a, const TermPtr& b) {
  if (a->children.size() != b->children.size()) return false;
  for (size_t i = 0; i < a->children.size(); ++i) {
    const Child& x = a->children[i];
    const Child& y = b->children[i];
    if (x.is_term() != y.is_term()) return false;
    if (x.is_term()) {
      if (!same_structure(x.term, y.term)) return false;
    } else if (!(x.tok.t == y.tok.t) || x.tok.text != y.tok.text || x.tok.ghost != y.tok.ghost) {
      return false;
    }
  }
  return true;
}

}  // namespace tylr

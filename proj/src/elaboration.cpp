#include "tylr/elaboration.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace tylr {

const char* shape_name(GroutShape s) {
  switch (s) {
    case GroutShape::kOperand: return "operand";
    case GroutShape::kInfix: return "infix";
    case GroutShape::kPrefix: return "prefix";
    case GroutShape::kPostfix: return "postfix";
  }
  return "?";
}

Elaboration::Elaboration(const Grammar& gr)
    : g(gr), nb_(static_cast<int>(gr.bounds().size())), nsorts_(static_cast<int>(gr.sorts.size())) {
  size_t nr = g.rules.size();
  start_free_.resize(nr);
  start_self_.resize(nr);
  end_free_.resize(nr);
  end_self_.resize(nr);
  for (size_t ri = 0; ri < nr; ++ri) {
    const Rule& r = g.rules[ri];
    int n = static_cast<int>(r.positions.size());
    start_free_[ri].assign(n, 0);
    start_self_[ri].assign(n, 0);
    end_free_[ri].assign(n, 0);
    end_self_[ri].assign(n, 0);
    for (int f = 0; f < n; ++f) {
      if (!r.first[f]) continue;
      for (int p = 0; p < n; ++p)
        if (r.reach[f][p]) (r.is_self(f) ? start_self_ : start_free_)[ri][p] = 1;
    }
    for (int l = 0; l < n; ++l) {
      if (!r.last[l]) continue;
      for (int p = 0; p < n; ++p)
        if (r.reach[p][l]) (r.is_self(l) ? end_self_ : end_free_)[ri][p] = 1;
    }
  }
}

int Elaboration::nt_code(const NT& n) const {
  int l = g.bound_index(n.left), r = g.bound_index(n.right);
  return (n.sort * nb_ + l) * nb_ + r;
}

NT Elaboration::nt_of(int code) const {
  NT n;
  n.right = g.bounds()[code % nb_];
  code /= nb_;
  n.left = g.bounds()[code % nb_];
  n.sort = code / nb_;
  return n;
}

int Elaboration::term_code(const Terminal& t) const {
  switch (t.kind) {
    case Terminal::Kind::kStart: return kStartCode;
    case Terminal::Kind::kEnd: return kEndCode;
    case Terminal::Kind::kTile: return tile_code(t.tile);
    case Terminal::Kind::kGrout: return grout_code(t.shape, t.sort);
  }
  return -1;
}

Terminal Elaboration::terminal_of(int code) const {
  if (code == kStartCode) return Terminal::start();
  if (code == kEndCode) return Terminal::end();
  int nt = static_cast<int>(g.tiles.size());
  if (code < 2 + nt) return Terminal::of_tile(code - 2);
  int k = code - 2 - nt;
  return Terminal::grout(static_cast<GroutShape>(k % 4), k / 4);
}

NT Elaboration::child(int rule, int pos, Role role, const NT& n) const {
  const Rule& r = g.rules[rule];
  int s = r.positions[pos].sort;
  if (s != r.sort || role == Role::kInterior) return unbounded(s);
  if (role == Role::kLeading) return {s, n.left, r.level};
  return {s, r.level, n.right};
}

bool Elaboration::start_ok(int rule, int pos, const NT& n) const {
  const Rule& r = g.rules[rule];
  return start_free_[rule][pos] || (start_self_[rule][pos] && g.lt(r.sort, n.left, r.level));
}

bool Elaboration::end_ok(int rule, int pos, const NT& n) const {
  const Rule& r = g.rules[rule];
  return end_free_[rule][pos] || (end_self_[rule][pos] && g.gt(r.sort, r.level, n.right));
}

std::string Elaboration::nt_name(const NT& n) const {
  return "⟨" + prec_name(n.left) + " " + g.sorts[n.sort] + " " + prec_name(n.right) + "⟩";
}

std::string Elaboration::terminal_name(const Terminal& t, bool cfg_style) const {
  switch (t.kind) {
    case Terminal::Kind::kStart: return cfg_style ? "START" : "⧏";
    case Terminal::Kind::kEnd: return cfg_style ? "END" : "⧐";
    case Terminal::Kind::kTile: {
      const TileDef& d = g.tiles[t.tile];
      int same = 0;
      for (const auto& o : g.tiles) same += o.label == d.label;
      std::string name = cfg_style ? "'" + d.label + "'" : d.label;
      if (same > 1)
        name += "@" + g.sorts[d.sort] + std::to_string(d.level) + "." + std::to_string(d.position);
      return name;
    }
    case Terminal::Kind::kGrout: {
      static const char* cfg[] = {"HOLE:", "INFIX:", "PRE:", "POST:"};
      static const char* glyph[] = {"⬚", "⟐", "⦊", "⦉"};
      int k = static_cast<int>(t.shape);
      return std::string(cfg_style ? cfg[k] : glyph[k]) + g.sorts[t.sort];
    }
  }
  return "?";
}

NTInfo scan_nt(const Elaboration& e, const NT& n, bool grout) {
  const Grammar& g = e.g;
  NTInfo info;
  auto add_kid = [&](int c) { info.kids.push_back(c); };
  for (size_t ri = 0; ri < g.rules.size(); ++ri) {
    const Rule& r = g.rules[ri];
    if (r.sort != n.sort) continue;
    int rule = static_cast<int>(ri);
    int np = static_cast<int>(r.positions.size());
    for (int a = 0; a < np; ++a) {
      if (r.is_sort(a)) {
        if (!r.first[a]) continue;
        if (r.is_self(a) && !g.lt(r.sort, n.left, r.level)) continue;
        int c = e.nt_code(e.child(rule, a, Role::kLeading, n));
        bool used = false;
        for (int k : r.follow[a]) {
          if (r.is_sort(k) || !e.end_ok(rule, k, n)) continue;
          int tk = e.tile_code(r.positions[k].tile);
          info.lead.emplace_back(c, tk);
          info.nt_term.emplace_back(c, tk);
          used = true;
        }
        if (used) {
          info.left_kids.push_back(c);
          add_kid(c);
        }
        continue;
      }
      int ta = e.tile_code(r.positions[a].tile);
      bool sa = e.start_ok(rule, a, n);
      if (r.first[a] && e.end_ok(rule, a, n)) info.lead.emplace_back(-1, ta);
      if (!sa) continue;
      if (r.last[a]) info.trail.emplace_back(ta, -1);
      for (int b : r.follow[a]) {
        if (!r.is_sort(b)) {
          if (e.end_ok(rule, b, n)) info.eq.emplace_back(ta, -1, e.tile_code(r.positions[b].tile));
          continue;
        }
        if (r.last[b] && (!r.is_self(b) || g.gt(r.sort, r.level, n.right))) {
          int c = e.nt_code(e.child(rule, b, Role::kTrailing, n));
          info.trail.emplace_back(ta, c);
          info.term_nt.emplace_back(ta, c);
          info.right_kids.push_back(c);
          add_kid(c);
        }
        int c = e.nt_code(e.child(rule, b, Role::kInterior, n));
        for (int k : r.follow[b]) {
          if (r.is_sort(k) || !e.end_ok(rule, k, n)) continue;
          int tk = e.tile_code(r.positions[k].tile);
          info.eq.emplace_back(ta, c, tk);
          info.term_nt.emplace_back(ta, c);
          info.nt_term.emplace_back(c, tk);
          add_kid(c);
        }
      }
    }
  }
  if (grout) {
    int s = n.sort;
    int hole = e.grout_code(GroutShape::kOperand, s);
    info.lead.emplace_back(-1, hole);
    info.trail.emplace_back(hole, -1);
    int pre = e.grout_code(GroutShape::kPrefix, s);
    if (g.sorts.size() > 1) info.lead.emplace_back(-1, pre);
    for (int r = 0; r < static_cast<int>(g.sorts.size()); ++r) {
      if (r == s) continue;
      int c = e.nt_code(e.unbounded(r));
      info.trail.emplace_back(pre, c);
      info.term_nt.emplace_back(pre, c);
      info.right_kids.push_back(c);
      add_kid(c);
    }
    if (n.left == kBot && n.right == kBot) {
      int z = e.nt_code(e.zero(s));
      int in = e.grout_code(GroutShape::kInfix, s);
      info.lead.emplace_back(z, in);
      info.left_kids.push_back(z);
      info.nt_term.emplace_back(z, in);
      info.trail.emplace_back(in, z);
      info.right_kids.push_back(z);
      info.term_nt.emplace_back(in, z);
      info.eq.emplace_back(in, z, in);
      add_kid(z);
    }
  }
  auto uniq = [](auto& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(info.lead);
  uniq(info.trail);
  uniq(info.eq);
  uniq(info.term_nt);
  uniq(info.nt_term);
  uniq(info.left_kids);
  uniq(info.right_kids);
  uniq(info.kids);
  return info;
}

FormTemplate reduce_form(const Grammar& g, int sort, int level, const std::vector<int>& form) {
  const Rule* r = g.rule(sort, level);
  if (!r) throw GrammarError("no rule for sort/level");
  bool ok = !form.empty() && r->first[form.front()] && r->last[form.back()];
  for (size_t i = 0; ok && i + 1 < form.size(); ++i) {
    const auto& f = r->follow[form[i]];
    ok = std::find(f.begin(), f.end(), form[i + 1]) != f.end();
  }
  if (!ok) throw GrammarError("form not in the rule's language");
  FormTemplate t;
  t.sort = sort;
  t.level = level;
  t.form = form;
  t.lead_self = r->is_self(form.front());
  t.trail_self = r->is_self(form.back());
  return t;
}

bool admits(const Grammar& g, const FormTemplate& f, const NT& n) {
  if (n.sort != f.sort) return false;
  if (f.lead_self && !g.lt(f.sort, n.left, f.level)) return false;
  if (f.trail_self && !g.gt(f.sort, f.level, n.right)) return false;
  return true;
}

Production instantiate(const Grammar& g, const FormTemplate& f, const NT& n) {
  const Rule* r = g.rule(f.sort, f.level);
  Production p;
  p.lhs = n;
  p.rule = g.rule_index(f.sort, f.level);
  for (size_t i = 0; i < f.form.size(); ++i) {
    const Symbol& sym = r->positions[f.form[i]];
    PSym x;
    if (sym.kind != Symbol::Kind::kSort) {
      x.t = Terminal::of_tile(sym.tile);
    } else {
      x.is_nt = true;
      if (sym.sort == f.sort && i == 0)
        x.n = {f.sort, n.left, f.level};
      else if (sym.sort == f.sort && i + 1 == f.form.size())
        x.n = {f.sort, f.level, n.right};
      else
        x.n = {sym.sort, kBot, kBot};
    }
    p.rhs.push_back(x);
  }
  return p;
}

std::vector<Production> produces(const Grammar& g, const NT& n, int max_len) {
  std::vector<Production> out;
  for (int level : g.levels(n.sort)) {
    for (const auto& w : enumerate_forms(g, n.sort, level, max_len)) {
      if (w.empty()) continue;
      FormTemplate t = reduce_form(g, n.sort, level, w);
      if (admits(g, t, n)) out.push_back(instantiate(g, t, n));
    }
  }
  return out;
}

std::vector<Production> inject_grout(const Grammar& g, const NT& n, int max_len, int max_chain) {
  std::vector<Production> out = produces(g, n, max_len);
  int s = n.sort;
  auto term = [](Terminal t) {
    PSym x;
    x.t = t;
    return x;
  };
  auto nt = [](NT m) {
    PSym x;
    x.is_nt = true;
    x.n = m;
    return x;
  };
  out.push_back({n, {term(Terminal::grout(GroutShape::kOperand, s))}});
  for (int r = 0; r < static_cast<int>(g.sorts.size()); ++r)
    if (r != s)
      out.push_back({n, {term(Terminal::grout(GroutShape::kPrefix, s)), nt({r, kBot, kBot})}});
  if (n.left == kBot && n.right == kBot) {
    NT z{s, kZero, kZero};
    for (int k = 1; k <= max_chain; ++k) {
      Production p{n, {nt(z)}};
      for (int i = 0; i < k; ++i) {
        p.rhs.push_back(term(Terminal::grout(GroutShape::kInfix, s)));
        p.rhs.push_back(nt(z));
      }
      out.push_back(p);
    }
  }
  return out;
}

bool derives_leftmost(const Elaboration& e, const NT& a, const NT& b) {
  int goal = e.nt_code(b);
  std::set<int> seen{e.nt_code(a)};
  std::vector<int> st{e.nt_code(a)};
  while (!st.empty()) {
    int x = st.back();
    st.pop_back();
    if (x == goal) return true;
    for (int y : scan_nt(e, e.nt_of(x)).left_kids)
      if (seen.insert(y).second) st.push_back(y);
  }
  return false;
}

std::vector<NT> reachable_nts(const Elaboration& e) {
  int root = e.nt_code(e.unbounded(e.g.root));
  std::set<int> seen{root};
  std::vector<int> st{root};
  while (!st.empty()) {
    int x = st.back();
    st.pop_back();
    for (int y : scan_nt(e, e.nt_of(x)).kids)
      if (seen.insert(y).second) st.push_back(y);
  }
  std::vector<NT> out;
  for (int c : seen) out.push_back(e.nt_of(c));
  std::sort(out.begin(), out.end());
  return out;
}

std::string production_to_string(const Elaboration& e, const Production& p) {
  std::string s = e.nt_name(p.lhs) + " ->";
  for (const auto& x : p.rhs) s += " " + (x.is_nt ? e.nt_name(x.n) : e.terminal_name(x.t, true));
  return s;
}

std::string dump_cfg(const Elaboration& e, int max_len) {
  const Grammar& g = e.g;
  std::string out = "ROOT -> START " + e.nt_name(e.unbounded(g.root)) + " END\n";
  for (const NT& n : reachable_nts(e)) {
    for (const auto& p : produces(g, n, max_len)) out += production_to_string(e, p) + "\n";
    std::string lhs = e.nt_name(n) + " -> ";
    std::string s = g.sorts[n.sort];
    out += lhs + "HOLE:" + s + "\n";
    for (size_t r = 0; r < g.sorts.size(); ++r)
      if (static_cast<int>(r) != n.sort)
        out += lhs + "PRE:" + s + " " + e.nt_name(e.unbounded(static_cast<int>(r))) + "\n";
    if (n.left == kBot && n.right == kBot) {
      std::string z = e.nt_name(e.zero(n.sort));
      out += lhs + z + " (INFIX:" + s + " " + z + ")+\n";
    }
  }
  return out;
}

}  // namespace tylr

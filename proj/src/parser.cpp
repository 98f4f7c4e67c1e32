#include "tylr/parser.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "tylr/serialize.hpp"

namespace tylr {

int Stack::head(const Elaboration& e) const {
  return top ? e.term_code(top->tok.t) : Elaboration::kStartCode;
}

std::vector<const Link*> Stack::links() const {
  std::vector<const Link*> out;
  for (const Link* l = top.get(); l; l = l->prev.get()) out.push_back(l);
  std::reverse(out.begin(), out.end());
  return out;
}

Stack Stack::push(Op op, int slot, TermPtr cell, Token tok) const {
  auto l = std::make_shared<Link>();
  l->prev = top;
  l->op = op;
  l->slot = slot;
  l->obl = obligations() + token_obligations(tok);
  if (cell) l->obl += cell->obl;
  l->height = height() + (op == Op::kLT ? 1 : 0);
  l->size = size() + 1;
  l->cell = std::move(cell);
  l->tok = std::move(tok);
  return {l};
}

Obligations total_obligations(const std::vector<TermPtr>& rs) {
  Obligations o;
  for (const auto& t : rs) o += t->obl;
  return o;
}

namespace {

Obligations grout_part(Obligations o) {
  o.ghost = 0;
  return o;
}

bool single_eq(const Walk& w) { return w.length() == 1 && w.steps[0].op == Op::kEQ; }

void dissolve(const TermPtr& t, std::vector<TermPtr>& out) {
  if (t->rule >= 0) {
    out.push_back(t);
    return;
  }
  for (const auto& c : t->children)
    if (c.is_term()) dissolve(c.term, out);
}

}  // namespace

Parser::Parser(const Relations& r) : rel(r), e(r.elab) {
  const Grammar& g = e.g;
  completion_.resize(g.tiles.size());
  using Cost = std::tuple<int, int, int>;  // ghosts, holes, length
  for (const auto& t : g.tiles) {
    const Rule& r = g.rule_of_tile(t.id);
    int np = static_cast<int>(r.positions.size());
    int src = g.tile_pos(t.id);
    std::vector<Cost> dist(np, {1 << 30, 0, 0});
    std::vector<int> from(np, -1);
    using Item = std::pair<Cost, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    auto relax = [&](int p, Cost c, int f) {
      if (c < dist[p]) {
        dist[p] = c;
        from[p] = f;
        pq.push({c, p});
      }
    };
    for (int b : r.follow[src]) {
      Cost c = r.is_sort(b) ? Cost{0, 1, 1} : Cost{1, 0, 1};
      relax(b, c, -1);
    }
    while (!pq.empty()) {
      auto [c, p] = pq.top();
      pq.pop();
      if (c != dist[p]) continue;
      for (int b : r.follow[p]) {
        auto [gh, ho, len] = c;
        Cost nc = r.is_sort(b) ? Cost{gh, ho + 1, len + 1} : Cost{gh + 1, ho, len + 1};
        relax(b, nc, p);
      }
    }
    if (r.last[src]) continue;  // nothing needed
    int best = -1;
    for (int p = 0; p < np; ++p)
      if (r.last[p] && std::get<0>(dist[p]) < (1 << 30) && (best < 0 || dist[p] < dist[best]))
        best = p;
    std::vector<int> path;
    for (int p = best; p >= 0; p = from[p]) path.push_back(p);
    std::reverse(path.begin(), path.end());
    completion_[t.id] = path;
  }
}

TermPtr Parser::wrap(const TermPtr& t, int sort) const {
  Token pre;
  pre.t = Terminal::grout(GroutShape::kPrefix, sort);
  pre.text = grout_glyph(GroutShape::kPrefix, false);
  return make_term(e, {token_child(pre), term_child(t)});
}

TermPtr Parser::fill_slot(int slot, const std::vector<TermPtr>& terms) const {
  int s = e.nt_of(slot).sort;
  if (terms.empty()) return hole_term(e, s);
  auto fit = [&](const TermPtr& t) { return t->sort == s ? t : wrap(t, s); };
  if (terms.size() == 1) return fit(terms[0]);
  std::vector<Child> kids;
  for (size_t i = 0; i < terms.size(); ++i) {
    if (i > 0) {
      Token in;
      in.t = Terminal::grout(GroutShape::kInfix, s);
      in.text = grout_glyph(GroutShape::kInfix, false);
      kids.push_back(token_child(in));
    }
    kids.push_back(term_child(fit(terms[i])));
  }
  return make_term(e, std::move(kids));
}

int Parser::absorb(int slot, int j, const std::vector<TermPtr>& rs) const {
  int k = static_cast<int>(rs.size());
  if (slot < 0 || j == k) return j;
  NT n = e.nt_of(slot);
  if (n.left == kBot && n.right == kBot) return k;
  const TermPtr& t = rs[j];
  if (t->sort != n.sort || t->produced_by(e, n)) return j + 1;
  return -1;
}

std::optional<std::vector<TermPtr>> Parser::fill(const std::vector<TermPtr>& rs,
                                                 const std::vector<int>& slots) const {
  std::vector<TermPtr> out;
  int j = 0;
  for (int s : slots) {
    if (s < 0) {
      out.push_back(nullptr);
      continue;
    }
    int j2 = absorb(s, j, rs);
    if (j2 < 0) return std::nullopt;
    out.push_back(fill_slot(s, {rs.begin() + j, rs.begin() + j2}));
    j = j2;
  }
  if (j != static_cast<int>(rs.size())) return std::nullopt;
  return out;
}

std::optional<Obligations> Parser::walk_cost(const Walk& w, const std::vector<TermPtr>& rs) const {
  Obligations o;
  int j = 0;
  for (size_t i = 0; i < w.steps.size(); ++i) {
    const RelStep& s = w.steps[i];
    if (s.slot >= 0) {
      int j2 = absorb(s.slot, j, rs);
      if (j2 < 0) return std::nullopt;
      int sort = e.nt_of(s.slot).sort;
      if (j2 == j) {
        o.operand += 1;
      } else {
        for (int x = j; x < j2; ++x) o.sort += rs[x]->sort != sort;
        o.infix += j2 - j - 1;
      }
      j = j2;
    }
    if (i + 1 < w.steps.size()) {
      Terminal t = e.terminal_of(s.right);
      Token tk;
      tk.t = t;
      tk.ghost = t.is_tile();
      o += token_obligations(tk);
    }
  }
  if (j != static_cast<int>(rs.size())) return std::nullopt;
  return o;
}

const std::vector<Walk>& Parser::walks_for(int src, int dst, const std::vector<TermPtr>& rs) {
  std::string key;
  auto put = [&](std::uint64_t v) { key.append(reinterpret_cast<const char*>(&v), sizeof v); };
  put(static_cast<std::uint64_t>(src));
  put(static_cast<std::uint64_t>(dst));
  for (const auto& t : rs) {
    put(static_cast<std::uint64_t>(t->sort));
    for (auto row : t->ok) put(row);
  }
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  auto ab = [&](int slot, int j) { return absorb(slot, j, rs); };
  auto ws = search_walks(rel, src, dst, static_cast<int>(rs.size()), ab);
  return memo_.emplace(std::move(key), std::move(ws)).first->second;
}

std::pair<Stack, std::vector<TermPtr>> Parser::pop(const Stack& k, std::vector<TermPtr> rs) const {
  std::vector<const Link*> seg;
  const Link* l = k.top.get();
  for (; l; l = l->prev.get()) {
    seg.push_back(l);
    if (l->op == Op::kLT) break;
  }
  std::reverse(seg.begin(), seg.end());
  Stack rest{seg.front()->prev};

  if (seg.front()->tok.t.is_grout()) {
    std::vector<TermPtr> out;
    for (const Link* s : seg)
      if (s->cell) dissolve(s->cell, out);
    out.insert(out.end(), rs.begin(), rs.end());
    return {rest, out};
  }

  const Grammar& g = e.g;
  std::vector<Child> kids;
  for (const Link* s : seg) {
    if (s->cell) kids.push_back(term_child(s->cell));
    kids.push_back(token_child(s->tok));
  }
  int last_tile = seg.back()->tok.t.tile;
  const Rule& r = g.rule_of_tile(last_tile);
  const auto& comp = completion_[last_tile];
  size_t ri = 0;
  bool interior_used = false;
  for (size_t i = 0; i < comp.size(); ++i) {
    int p = comp[i];
    const Symbol& sym = r.positions[p];
    if (!r.is_sort(p)) {
      Token gh;
      gh.t = Terminal::of_tile(sym.tile);
      gh.text = g.tiles[sym.tile].label;
      gh.ghost = true;
      kids.push_back(token_child(gh));
      continue;
    }
    bool trailing = i + 1 == comp.size();
    std::vector<TermPtr> rest_rs(rs.begin() + ri, rs.end());
    int any = e.nt_code(e.unbounded(sym.sort));
    if (!trailing) {
      if (!interior_used && !rest_rs.empty()) {
        kids.push_back(term_child(fill_slot(any, rest_rs)));
        ri = rs.size();
        interior_used = true;
      } else {
        kids.push_back(term_child(hole_term(e, sym.sort)));
      }
    } else if (sym.sort != r.sort) {
      kids.push_back(term_child(fill_slot(any, rest_rs)));
      ri = rs.size();
    } else if (ri < rs.size() && rs[ri]->sort != r.sort) {
      kids.push_back(term_child(wrap(rs[ri++], r.sort)));
    } else if (ri < rs.size() &&
               rs[ri]->produced_by(g.bound_index(r.level), g.bound_index(kZero))) {
      kids.push_back(term_child(rs[ri++]));
    } else {
      kids.push_back(term_child(hole_term(e, sym.sort)));
    }
  }
  std::vector<TermPtr> out{make_term(e, std::move(kids))};
  out.insert(out.end(), rs.begin() + ri, rs.end());
  return {rest, out};
}

std::vector<Option> Parser::options(const Stack& k, const std::vector<TermPtr>& rs,
                                    const Token& tok, bool prune) {
  std::vector<Option> out;
  int dst = e.term_code(tok.t);
  Obligations start = k.obligations() + total_obligations(rs);
  Obligations extra = tok.t.is_tile() && tok.ghost ? Obligations{0, 0, 1, 0} : Obligations{};
  Stack cur = k;
  std::vector<TermPtr> cur_rs = rs;
  std::optional<Obligations> best;
  for (int depth = 0;; ++depth) {
    Obligations c = cur.obligations() + total_obligations(cur_rs) - start;
    for (const Walk& w : walks_for(cur.head(e), dst, cur_rs)) {
      auto cost = walk_cost(w, cur_rs);
      if (!cost) continue;
      Option o{depth, cur, cur_rs, w, c + *cost + extra};
      if (!best || o.delta < *best) best = o.delta;
      out.push_back(std::move(o));
    }
    if (cur.empty()) break;
    if (prune && best && *best <= c - grout_part(cur.obligations())) break;
    std::tie(cur, cur_rs) = pop(cur, std::move(cur_rs));
  }
  std::stable_sort(out.begin(), out.end(), [](const Option& a, const Option& b) {
    if (a.delta != b.delta) return a.delta < b.delta;
    return a.depth < b.depth;
  });
  return out;
}

Stack Parser::apply(const Option& o, const Token& tok) {
  Stack k = o.base;
  int j = 0;
  for (size_t i = 0; i < o.walk.steps.size(); ++i) {
    const RelStep& s = o.walk.steps[i];
    TermPtr cell;
    if (s.slot >= 0) {
      int j2 = absorb(s.slot, j, o.rs);
      cell = fill_slot(s.slot, {o.rs.begin() + j, o.rs.begin() + j2});
      j = j2;
    }
    Token t = tok;
    if (i + 1 < o.walk.steps.size()) {
      t = Token{};
      t.t = e.terminal_of(s.right);
      if (t.t.is_tile()) {
        t.text = e.g.tiles[t.t.tile].label;
        t.ghost = true;
      } else {
        t.text = grout_glyph(t.t.shape, false);
      }
    }
    k = k.push(s.op, s.slot, std::move(cell), std::move(t));
  }
  return k;
}

std::vector<Option> Parser::ghost_options(const Stack& k, const Token& tok) {
  std::vector<Option> out;
  for (auto& o : options(k, {}, tok, false))
    if (single_eq(o.walk)) out.push_back(std::move(o));
  return out;
}

Stack Parser::push(const Stack& k, const Token& tok, bool fresh) {
  if (tok.ghost) {
    auto opts = ghost_options(k, tok);
    return opts.empty() ? k : apply(opts.front(), tok);
  }
  if (fresh && tok.t.is_tile()) {
    const Link* ghost = nullptr;
    std::vector<const Link*> above;
    for (const Link* l = k.top.get(); l; l = l->prev.get()) {
      if (l->tok.ghost && l->tok.t == tok.t) {
        ghost = l;
        break;
      }
      above.push_back(l);
    }
    if (ghost) {
      Stack re{ghost->prev};
      std::vector<Token> toks;
      if (ghost->cell) flatten(ghost->cell, toks);
      for (auto it = above.rbegin(); it != above.rend(); ++it) {
        if ((*it)->cell) flatten((*it)->cell, toks);
        toks.push_back((*it)->tok);
      }
      for (const auto& t : toks)
        if (!t.t.is_grout()) re = push(re, t);
      auto opts = ghost_options(re, tok);
      if (!opts.empty()) return apply(opts.front(), tok);
    }
  }
  auto opts = options(k, {}, tok);
  if (opts.empty()) throw std::logic_error("no way to push " + tok.text);
  return apply(opts.front(), tok);
}

TermPtr Parser::finish(const Stack& k) {
  Token end;
  end.t = Terminal::end();
  end.text = "⧐";
  auto opts = options(k, {}, end);
  if (opts.empty()) throw std::logic_error("no way to close the stack");
  Stack done = apply(opts.front(), end);
  return done.top->cell;
}

TermPtr Parser::parse(const std::vector<Token>& toks, std::vector<Stack>* trace) {
  Stack k;
  for (const auto& t : toks) {
    k = push(k, t);
    if (trace) trace->push_back(k);
  }
  return finish(k);
}

bool well_formed_stack(const Relations& r, const Stack& k, bool reference) {
  const Elaboration& e = r.elab;
  int head = Elaboration::kStartCode;
  for (const Link* l : k.links()) {
    if (head == Elaboration::kEndCode) return false;
    if (l->tok.ghost && !l->tok.t.is_tile()) return false;
    int code = e.term_code(l->tok.t);
    if (!r.has({head, l->op, l->slot, code})) return false;
    if (l->slot < 0) {
      if (l->cell) return false;
    } else {
      if (!l->cell) return false;
      NT n = e.nt_of(l->slot);
      bool ok = reference ? well_formed_term(e, &n, l->cell) : l->cell->produced_by(e, n);
      if (!ok) return false;
    }
    head = code;
  }
  return true;
}

std::string stack_to_string(const Relations& r, const Stack& k, bool ascii) {
  (void)r;
  std::string s = "⧏";
  for (const Link* l : k.links()) {
    s += l->op == Op::kLT ? " ⋖" : " ≐";
    if (l->cell) s += "[" + term_text(l->cell, ascii) + "]";
    s += " " + token_text(l->tok, ascii);
  }
  return s;
}

std::vector<Token> solid_tokens(const TermPtr& t) {
  std::vector<Token> all, out;
  flatten(t, all);
  for (auto& k : all)
    if (!k.ghost && !k.t.is_grout()) out.push_back(std::move(k));
  return out;
}

}  // namespace tylr

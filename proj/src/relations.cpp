#include "tylr/relations.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <set>
#include <sstream>

namespace tylr {

const char* op_name(Op op) {
  switch (op) {
    case Op::kLT: return "<";
    case Op::kEQ: return "=";
    case Op::kGT: return ">";
  }
  return "?";
}

bool RelStep::operator<(const RelStep& o) const {
  return std::tie(left, op, slot, right) < std::tie(o.left, o.op, o.slot, o.right);
}

long long Relations::key(const RelStep& s) const {
  long long nn = elab.nt_count() + 1;
  long long nt = elab.terminal_count();
  return ((static_cast<long long>(s.left) * 3 + static_cast<int>(s.op)) * nn + s.slot + 1) * nt +
         s.right;
}

long long Relations::any_key(int l, Op op, int r) const {
  return (static_cast<long long>(l) * 3 + static_cast<int>(op)) * elab.terminal_count() + r;
}

namespace {

// Every step derivable from ⟨⊥ ŝ ⊥⟩ over the bounded sorts in `nts`.
std::vector<RelStep> derive_steps(const Elaboration& elab, const std::vector<NT>& nts,
                                  bool grout) {
  const Grammar& g = elab.g;
  std::map<int, NTInfo> info;
  for (const NT& n : nts) info.emplace(elab.nt_code(n), scan_nt(elab, n, grout));
  int root = elab.nt_code(elab.unbounded(g.root));
  std::set<std::pair<int, int>> term_nt{{Elaboration::kStartCode, root}};
  std::set<std::pair<int, int>> nt_term{{root, Elaboration::kEndCode}};
  std::set<RelStep> all;
  all.insert({Elaboration::kStartCode, Op::kEQ, root, Elaboration::kEndCode});
  for (const auto& [c, inf] : info) {
    term_nt.insert(inf.term_nt.begin(), inf.term_nt.end());
    nt_term.insert(inf.nt_term.begin(), inf.nt_term.end());
    for (const auto& [l, s, r] : inf.eq) all.insert({l, Op::kEQ, s, r});
  }
  auto closure = [&](int from, bool left) {
    std::vector<int> seen{from};
    std::set<int> mark{from};
    for (size_t i = 0; i < seen.size(); ++i) {
      const NTInfo& inf = info.at(seen[i]);
      for (int k : left ? inf.left_kids : inf.right_kids)
        if (mark.insert(k).second) seen.push_back(k);
    }
    return seen;
  };
  std::map<int, std::vector<int>> lc, rc;
  for (const auto& [t, n] : term_nt) {
    auto it = lc.find(n);
    if (it == lc.end()) it = lc.emplace(n, closure(n, true)).first;
    for (int m : it->second)
      for (const auto& [slot, tr] : info.at(m).lead) all.insert({t, Op::kLT, slot, tr});
  }
  for (const auto& [n, t] : nt_term) {
    auto it = rc.find(n);
    if (it == rc.end()) it = rc.emplace(n, closure(n, false)).first;
    for (int m : it->second)
      for (const auto& [tl, slot] : info.at(m).trail) all.insert({tl, Op::kGT, slot, t});
  }
  return {all.begin(), all.end()};
}

std::vector<NT> tile_reachable(const Elaboration& e) {
  int root = e.nt_code(e.unbounded(e.g.root));
  std::set<int> seen{root};
  std::vector<int> st{root};
  while (!st.empty()) {
    int x = st.back();
    st.pop_back();
    for (int y : scan_nt(e, e.nt_of(x), false).kids)
      if (seen.insert(y).second) st.push_back(y);
  }
  std::vector<NT> out;
  for (int c : seen) out.push_back(e.nt_of(c));
  return out;
}

}  // namespace

Relations::Relations(const Grammar& gr) : g(gr), elab(gr) {
  reach_list_ = reachable_nts(elab);
  reachable_.assign(elab.nt_count(), 0);
  for (const NT& n : reach_list_) reachable_[elab.nt_code(n)] = 1;
  steps_ = derive_steps(elab, reach_list_, true);
  index();
}

void Relations::index() {
  std::sort(steps_.begin(), steps_.end());
  set_.clear();
  any_.clear();
  out_.assign(elab.terminal_count(), {});
  in_.assign(elab.terminal_count(), {});
  for (const auto& s : steps_) {
    set_.insert(key(s));
    any_.insert(any_key(s.left, s.op, s.right));
    if (s.op == Op::kGT) continue;
    out_[s.left].push_back(s);
    in_[s.right].push_back(s);
  }
}

bool Relations::has(const RelStep& s) const { return set_.count(key(s)) > 0; }

bool Relations::any(int left, Op op, int right) const {
  return any_.count(any_key(left, op, right)) > 0;
}

void Relations::insert(const RelStep& s) {
  if (has(s)) return;
  steps_.push_back(s);
  index();
}

void Relations::erase(const RelStep& s) {
  steps_.erase(std::remove(steps_.begin(), steps_.end(), s), steps_.end());
  index();
}

std::string relations_tsv(const Relations& r) {
  std::string out;
  for (const auto& s : r.steps()) {
    out += r.elab.terminal_name(s.left, true);
    out += '\t';
    out += op_name(s.op);
    out += '\t';
    out += s.slot < 0 ? "-" : r.elab.nt_name(s.slot);
    out += '\t';
    out += r.elab.terminal_name(s.right, true);
    out += '\n';
  }
  return out;
}

std::string relations_dot(const Relations& r) {
  std::ostringstream os;
  os << "digraph relations {\n";
  std::set<int> nodes;
  for (const auto& s : r.steps()) {
    nodes.insert(s.left);
    nodes.insert(s.right);
  }
  for (int n : nodes) os << "  t" << n << " [label=\"" << r.elab.terminal_name(n, true) << "\"];\n";
  for (const auto& s : r.steps()) {
    os << "  t" << s.left << " -> t" << s.right << " [label=\"" << op_name(s.op);
    if (s.slot >= 0) os << " " << r.elab.nt_name(s.slot);
    os << "\"";
    if (s.op == Op::kGT) os << " style=dashed";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::vector<CoherenceFailure> check_coherence(const Relations& rel) {
  const Grammar& g = rel.g;
  const Elaboration& e = rel.elab;
  std::vector<CoherenceFailure> out;
  // Compared against derivations without grout: a prefix grout accepts any
  // foreign term, which makes every operator pair reachable both ways.
  std::set<std::tuple<int, Op, int>> tile_rel;
  auto nts = tile_reachable(e);
  auto tile_steps = derive_steps(e, nts, false);
  std::set<RelStep> tile_set(tile_steps.begin(), tile_steps.end());
  for (const auto& s : rel.steps())
    if (tile_set.count(s)) tile_rel.insert({s.left, s.op, s.right});
  // Tiles of sorts no derivation reaches are never compared.
  std::set<int> live;
  for (const NT& n : nts) live.insert(n.sort);
  auto right_adjacent = [&](const TileDef& t) {
    const Rule& r = g.rule_of_tile(t.id);
    for (int b : r.follow[t.position])
      if (r.is_self(b) && r.last[b]) return true;
    return false;
  };
  auto left_adjacent = [&](const TileDef& t) {
    const Rule& r = g.rule_of_tile(t.id);
    for (size_t f = 0; f < r.positions.size(); ++f) {
      if (!r.first[f] || !r.is_self(static_cast<int>(f))) continue;
      const auto& fl = r.follow[f];
      if (std::find(fl.begin(), fl.end(), t.position) != fl.end()) return true;
    }
    return false;
  };
  for (const auto& tl : g.tiles) {
    if (!live.count(tl.sort) || !right_adjacent(tl)) continue;
    for (const auto& tr : g.tiles) {
      if (tr.sort != tl.sort || !left_adjacent(tr)) continue;
      int a = e.tile_code(tl.id), b = e.tile_code(tr.id);
      bool lt = tile_rel.count({a, Op::kLT, b}) > 0, gt = tile_rel.count({a, Op::kGT, b}) > 0;
      bool want_lt = g.lt(tl.sort, tl.level, tr.level);
      bool want_gt = g.gt(tl.sort, tl.level, tr.level);
      if (lt != want_lt)
        out.push_back({tl.id, tr.id,
                       e.terminal_name(a) + (want_lt ? " should ⋖ " : " should not ⋖ ") +
                           e.terminal_name(b)});
      if (gt != want_gt)
        out.push_back({tl.id, tr.id,
                       e.terminal_name(a) + (want_gt ? " should ⋗ " : " should not ⋗ ") +
                           e.terminal_name(b)});
    }
  }
  return out;
}

std::vector<Violation> lemma_scan(const Relations& rel) {
  const Elaboration& e = rel.elab;
  const Grammar& g = rel.g;
  std::vector<Violation> out;
  auto name = [&](const RelStep& s) {
    return e.terminal_name(s.left) + " " + op_name(s.op) +
           (s.slot >= 0 ? "[" + e.nt_name(s.slot) + "]" : "") + " " + e.terminal_name(s.right);
  };
  const int S = Elaboration::kStartCode, E = Elaboration::kEndCode;
  int root = e.nt_code(e.unbounded(g.root));
  for (const auto& s : rel.steps()) {
    Terminal l = e.terminal_of(s.left), r = e.terminal_of(s.right);
    if (s.op == Op::kEQ) {
      bool ok = (s.left == S && s.right == E) ||
                (l.is_tile() && r.is_tile() &&
                 &g.rule_of_tile(l.tile) == &g.rule_of_tile(r.tile)) ||
                (l.is_grout() && r.is_grout() && l.sort == r.sort);
      if (!ok) out.push_back({"Homogeneity", name(s)});
    }
    bool r_left_convex = r.is_grout() && (r.shape == GroutShape::kOperand ||
                                          r.shape == GroutShape::kPrefix);
    if (r_left_convex && !(s.op == Op::kLT && s.slot < 0))
      out.push_back({"GroutPrecedence", name(s)});
    bool l_right_convex = l.is_grout() && (l.shape == GroutShape::kOperand ||
                                           l.shape == GroutShape::kPostfix);
    if (l_right_convex && !(s.op == Op::kGT && s.slot < 0))
      out.push_back({"GroutPrecedence", name(s)});
    if (s.left == S && s.op == Op::kEQ && !(s.right == E && s.slot == root))
      out.push_back({"StartMatchesEnd", name(s)});
    if (s.right == E && s.op == Op::kEQ && !(s.left == S && s.slot == root))
      out.push_back({"StartMatchesEnd", name(s)});
    if (s.op == Op::kLT && s.right == E) out.push_back({"NoEscaping", name(s)});
    if (s.op == Op::kGT && s.left == S) out.push_back({"NoEscaping", name(s)});
    if (s.right == S || s.left == E) out.push_back({"NoTrespassing", name(s)});
  }
  if (!rel.has({S, Op::kEQ, root, E})) out.push_back({"StartMatchesEnd", "missing ⧏ ≐ ⧐"});
  auto sw = walks(rel, S, E);
  if (sw.size() != 1 || sw[0].length() != 1 || sw[0].steps[0].op != Op::kEQ ||
      sw[0].steps[0].slot != root)
    out.push_back({"StartMatchesEnd", "walk ⧏ → ⧐ is not a single ≐ step"});
  std::vector<int> srcs{S};
  for (size_t s = 0; s < g.sorts.size(); ++s) {
    srcs.push_back(e.grout_code(GroutShape::kInfix, static_cast<int>(s)));
    srcs.push_back(e.grout_code(GroutShape::kPrefix, static_cast<int>(s)));
  }
  for (int src : srcs) {
    bool src_live = false;
    for (const auto& s : rel.steps()) src_live = src_live || s.left == src;
    if (!src_live) continue;
    for (const auto& t : g.tiles)
      if (walks(rel, src, e.tile_code(t.id)).empty())
        out.push_back({"Reachability", e.terminal_name(src) + " ↛ " + e.terminal_name(e.tile_code(t.id))});
  }
  return out;
}

int Walk::height() const {
  int h = 0;
  for (const auto& s : steps) h += s.op == Op::kLT;
  return h;
}

std::vector<std::tuple<std::string, int, int>> walk_key(const Relations& r, const Walk& w) {
  std::vector<std::tuple<std::string, int, int>> k;
  for (size_t i = 0; i + 1 < w.steps.size(); ++i) {
    Terminal t = r.elab.terminal_of(w.steps[i].right);
    if (t.is_tile()) {
      const TileDef& d = r.g.tiles[t.tile];
      k.emplace_back(r.g.sorts[d.sort], d.level, d.position);
    } else if (t.is_grout()) {
      k.emplace_back(r.g.sorts[t.sort], INT_MAX, static_cast<int>(t.shape));
    }
  }
  return k;
}

bool walk_less(const Relations& r, const Walk& a, const Walk& b) {
  if (a.height() != b.height()) return a.height() < b.height();
  if (a.length() != b.length()) return a.length() < b.length();
  auto ka = walk_key(r, a), kb = walk_key(r, b);
  if (ka != kb) return ka < kb;
  return a.steps < b.steps;
}

bool strictly_lt_intermediate(const Relations& r, const Walk& w) {
  int n = w.length();
  // terminals t0..tn, op i joins t(i-1) and ti (1-based).
  auto op = [&](int i) { return w.steps[i - 1].op; };
  auto is_tile = [&](int i) { return r.elab.terminal_of(w.steps[i - 1].right).is_tile(); };
  int i = 1;
  while (i <= n - 1) {
    if (!is_tile(i)) {
      ++i;
      continue;
    }
    int a = i, b = i;
    while (b + 1 <= n - 1 && is_tile(b + 1) && op(b + 1) == Op::kEQ) ++b;
    if (op(a) == Op::kLT && op(b + 1) == Op::kLT) return true;
    i = b + 1;
  }
  return false;
}

std::vector<Walk> search_walks(const Relations& rel, int src, int dst, int k, const Absorb& absorb,
                               int cap) {
  const int T = rel.elab.terminal_count();
  const int W = k + 1;
  const int S = T * W;
  const int INF = INT_MAX / 2;
  auto sid = [&](int t, int j) { return t * W + j; };
  auto step_j = [&](const RelStep& s, int j) { return s.slot < 0 ? j : absorb(s.slot, j); };
  std::vector<int> h(S, INF);
  int goal = sid(dst, k);
  h[goal] = 0;
  std::vector<int> q{goal};
  for (size_t qi = 0; qi < q.size(); ++qi) {
    int st = q[qi];
    int t2 = st / W, j2 = st % W;
    for (const auto& s : rel.in(t2)) {
      for (int j = 0; j <= k; ++j) {
        if (s.left == dst && !(s.left == src && j == 0)) continue;
        if (s.slot < 0 && j != j2) continue;
        if (step_j(s, j) != j2) continue;
        int p = sid(s.left, j);
        if (h[p] == INF) {
          h[p] = h[st] + 1;
          q.push_back(p);
        }
      }
    }
  }
  int start = sid(src, 0);
  if (h[start] == INF) return {};
  std::vector<Walk> found;
  Walk cur;
  cur.src = src;
  std::function<void(int, int)> dfs = [&](int st, int rem) {
    if (static_cast<int>(found.size()) >= cap) return;
    if (rem == 0) {
      if (st == goal) found.push_back(cur);
      return;
    }
    int t = st / W, j = st % W;
    for (const auto& s : rel.out(t)) {
      if (s.right == dst && rem != 1) continue;
      int j2 = step_j(s, j);
      if (j2 < 0) continue;
      int nx = sid(s.right, j2);
      if (h[nx] > rem - 1) continue;
      cur.steps.push_back(s);
      dfs(nx, rem - 1);
      cur.steps.pop_back();
    }
  };
  int lo = std::max(1, h[start]);
  for (int L = lo; L <= lo + 2; ++L) {
    found.clear();
    dfs(start, L);
    std::vector<Walk> keep;
    for (auto& w : found)
      if (!strictly_lt_intermediate(rel, w)) keep.push_back(std::move(w));
    if (!keep.empty()) {
      std::sort(keep.begin(), keep.end(),
                [&](const Walk& a, const Walk& b) { return walk_less(rel, a, b); });
      return keep;
    }
  }
  return {};
}

std::vector<Walk> walks(const Relations& r, int src, int dst) {
  return search_walks(r, src, dst, 0, [](int, int j) { return j; });
}

std::string walk_to_string(const Relations& r, const Walk& w) {
  std::string s = r.elab.terminal_name(w.src);
  for (const auto& st : w.steps) {
    s += st.op == Op::kLT ? " ⋖" : " ≐";
    if (st.slot >= 0) s += "[" + r.elab.nt_name(st.slot) + "]";
    s += " " + r.elab.terminal_name(st.right);
  }
  return s;
}

}  // namespace tylr

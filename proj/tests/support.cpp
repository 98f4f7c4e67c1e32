#include "support.hpp"

#include <map>
#include <sstream>

#include <json.hpp>

#include "tylr/gen.hpp"
#include "tylr/serialize.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tylr::testing {

std::string random_grammar_json(std::mt19937_64& rng) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  const char* names[] = {"A", "B", "C"};
  int nsorts = 1 + pick(3);
  int fresh = 0;
  auto lit = [&](const char* stem) { return "'" + std::string(stem) + std::to_string(fresh++) + "'"; };
  // Sort s > 0 is mentioned first by some sort below it, so every sort is
  // reachable from A.
  std::vector<int> parent(nsorts, -1);
  for (int s = 1; s < nsorts; ++s) parent[s] = pick(s);
  int owner = 0;
  // With later set, only sorts after the owner: a form ending in a foreign
  // sort must not lead back to the owner at its right end, or the grammar is
  // ambiguous there.
  auto any_sort = [&](bool later = false) {
    for (int s = 1; s < nsorts; ++s)
      if (parent[s] == owner) {
        parent[s] = -1;
        return std::string(names[s]);
      }
    if (later) return std::string(names[owner + pick(nsorts - owner)]);
    return std::string(names[pick(nsorts)]);
  };

  nlohmann::json sorts = nlohmann::json::object();
  for (int s = 0; s < nsorts; ++s) {
    std::string me = names[s];
    owner = s;
    int nlev = 1 + pick(4);
    nlohmann::json levels = nlohmann::json::array();
    for (int l = 0; l < nlev; ++l) {
      std::vector<std::string> forms;
      if (l == nlev - 1) {
        forms.push_back(lit("a"));
        for (int c = 1; c < nsorts; ++c)
          if (parent[c] == owner) {
            parent[c] = -1;
            forms.push_back(lit("o") + " " + names[c] + " " + lit("c"));
          }
        if (pick(2)) forms.push_back(lit("o") + " " + any_sort() + " " + lit("c"));
      } else {
        int n = 1 + pick(2);
        for (int k = 0; k < n; ++k) {
          switch (pick(6)) {
            case 0:
              forms.push_back(me + " " + lit("i") + " " + me);
              break;
            case 1:
              forms.push_back(lit("p") + " " + me);
              break;
            case 2:
              forms.push_back(me + " " + lit("q"));
              break;
            case 3:
              forms.push_back(lit("k") + " " + any_sort() + " " + lit("m") + " " + me);
              break;
            case 4:
              forms.push_back(me + " " + lit("j") + " " + any_sort() + " " + lit("e"));
              break;
            default:
              forms.push_back(me + " " + lit("t") + " " + any_sort(true));
              break;
          }
        }
      }
      const char* assoc[] = {"left", "right", nullptr};
      nlohmann::json lv = {{"prec", l}, {"forms", forms}};
      const char* a = assoc[pick(3)];
      lv["assoc"] = a ? nlohmann::json(a) : nlohmann::json(nullptr);
      levels.push_back(lv);
    }
    sorts[me] = levels;
  }
  nlohmann::json g = {{"root", "A"}, {"token_classes", nlohmann::json::object()}, {"sorts", sorts}};
  return g.dump();
}

std::set<RelStep> brute_relations(const Elaboration& e, int depth) {
  std::map<int, std::vector<Production>> prods;
  auto of = [&](const NT& n) -> const std::vector<Production>& {
    int c = e.nt_code(n);
    auto it = prods.find(c);
    if (it == prods.end()) it = prods.emplace(c, inject_grout(e.g, n, 8, 2)).first;
    return it->second;
  };
  auto code = [&](const PSym& s) { return s.is_nt ? e.nt_code(s.n) : e.term_code(s.t); };

  // Shallowest depth at which each bounded sort occurs.
  NT root = e.unbounded(e.g.root);
  std::map<int, int> at{{e.nt_code(root), 0}};
  std::vector<NT> frontier{root};
  for (int d = 1; d <= depth; ++d) {
    std::vector<NT> next;
    for (const NT& n : frontier)
      for (const auto& p : of(n))
        for (const auto& s : p.rhs)
          if (s.is_nt && at.emplace(e.nt_code(s.n), d).second) next.push_back(s.n);
    frontier = std::move(next);
  }

  std::set<RelStep> out;
  // Terminals a production of some sort reachable from n along its leftmost
  // (or rightmost) spine can begin (or end) with, within budget more levels.
  auto spine = [&](const NT& n, int budget, bool left) {
    std::set<std::pair<int, int>> ends;  // (slot, terminal)
    std::vector<std::pair<NT, int>> st{{n, budget}};
    std::set<std::pair<int, int>> seen;
    while (!st.empty()) {
      auto [m, b] = st.back();
      st.pop_back();
      if (b < 0 || !seen.insert({e.nt_code(m), b}).second) continue;
      for (const auto& p : of(m)) {
        const auto& r = p.rhs;
        int k = static_cast<int>(r.size());
        const PSym& s0 = left ? r[0] : r[k - 1];
        if (!s0.is_nt) {
          ends.insert({-1, code(s0)});
          continue;
        }
        st.push_back({s0.n, b - 1});
        if (k >= 2) {
          const PSym& s1 = left ? r[1] : r[k - 2];
          if (!s1.is_nt) ends.insert({code(s0), code(s1)});
        }
      }
    }
    return ends;
  };

  auto scan = [&](const std::vector<PSym>& rhs, int budget) {
    int k = static_cast<int>(rhs.size());
    for (int i = 0; i < k; ++i) {
      if (rhs[i].is_nt) continue;
      int a = code(rhs[i]);
      if (i + 1 < k && !rhs[i + 1].is_nt) out.insert({a, Op::kEQ, -1, code(rhs[i + 1])});
      if (i + 2 < k && rhs[i + 1].is_nt && !rhs[i + 2].is_nt)
        out.insert({a, Op::kEQ, code(rhs[i + 1]), code(rhs[i + 2])});
      if (i + 1 < k && rhs[i + 1].is_nt)
        for (auto [slot, b] : spine(rhs[i + 1].n, budget, true)) out.insert({a, Op::kLT, slot, b});
      if (i >= 1 && rhs[i - 1].is_nt)
        for (auto [slot, b] : spine(rhs[i - 1].n, budget, false)) out.insert({b, Op::kGT, slot, a});
    }
  };

  PSym start, end, top;
  start.t = Terminal::start();
  end.t = Terminal::end();
  top.is_nt = true;
  top.n = root;
  scan({start, top, end}, depth - 1);
  for (const auto& [c, d] : at) {
    if (d >= depth) continue;
    for (const auto& p : of(e.nt_of(c))) scan(p.rhs, depth - d - 2);
  }
  return out;
}

namespace {

int threads(bool parallel) {
#ifdef _OPENMP
  return parallel ? omp_get_max_threads() : 1;
#else
  (void)parallel;
  return 1;
#endif
}

}  // namespace

FuzzResult fuzz(const Relations& r, int runs, int max_len, std::uint64_t base_seed, bool parallel) {
  FuzzResult res;
  res.runs = runs;
#pragma omp parallel num_threads(threads(parallel))
  {
    Parser p(r);
    FuzzResult mine;
#pragma omp for schedule(dynamic, 16)
    for (int i = 0; i < runs; ++i) {
      Generator gen(r, base_seed + static_cast<std::uint64_t>(i));
      auto toks = gen.random_tokens(max_len);
      std::vector<Stack> trace;
      TermPtr t;
      std::string what;
      try {
        t = p.parse(toks, &trace);
      } catch (const std::exception& ex) {
        ++mine.exceptions;
        what = std::string("exception: ") + ex.what();
      }
      if (t) {
        if (!well_formed_term(r.elab, nullptr, t)) {
          ++mine.bad_term;
          what = "ill-formed term " + term_debug(r.elab, t);
        }
        for (const auto& k : trace)
          if (!well_formed_stack(r, k)) {
            ++mine.bad_stack;
            what = "ill-formed stack " + stack_to_string(r, k);
            break;
          }
        auto s = solid_tokens(t);
        bool same = s.size() == toks.size();
        for (size_t j = 0; same && j < s.size(); ++j)
          same = s[j].text == toks[j].text && s[j].t == toks[j].t;
        if (!same) {
          ++mine.not_completion;
          what = "not a completion: " + term_text(t);
        }
      }
      if (!what.empty() && mine.first_failure.empty())
        mine.first_failure = "seed " + std::to_string(base_seed + i) + ": " + what;
    }
#pragma omp critical
    {
      res.exceptions += mine.exceptions;
      res.bad_term += mine.bad_term;
      res.bad_stack += mine.bad_stack;
      res.not_completion += mine.not_completion;
      if (res.first_failure.empty()) res.first_failure = mine.first_failure;
    }
  }
  return res;
}

SoundResult soundness(const Relations& r, int runs, int depth, std::uint64_t base_seed,
                      bool parallel) {
  SoundResult res;
  res.runs = runs;
#pragma omp parallel num_threads(threads(parallel))
  {
    Molder m(r);
    SoundResult mine;
#pragma omp for schedule(dynamic, 16)
    for (int i = 0; i < runs; ++i) {
      Generator gen(r, base_seed + static_cast<std::uint64_t>(i));
      auto d = gen.derive(depth);
      TermPtr direct = m.parser.parse(d.tokens);
      std::vector<InputToken> in;
      for (const auto& k : d.tokens) in.push_back({k.text});
      TermPtr molded = m.run(in).term;
      std::string what;
      if (!obligations(direct).zero() || !obligations(molded).zero()) {
        ++mine.nonzero;
        what = "obligations in " + term_debug(r.elab, molded);
      }
      if (!same_structure(direct, d.term) || !same_structure(molded, d.term)) {
        ++mine.mismatches;
        what = term_debug(r.elab, d.term) + " came back as " + term_debug(r.elab, molded);
      }
      if (!what.empty() && mine.first_failure.empty()) mine.first_failure = what;
    }
#pragma omp critical
    {
      res.mismatches += mine.mismatches;
      res.nonzero += mine.nonzero;
      if (res.first_failure.empty()) res.first_failure = mine.first_failure;
    }
  }
  return res;
}

ArgminResult argmin_check(const Relations& r, int steps, std::uint64_t base_seed, bool parallel) {
  ArgminResult res;
  const int per_run = 20;
  int runs = (steps + per_run - 1) / per_run;
  res.steps = 0;
#pragma omp parallel num_threads(threads(parallel))
  {
    Molder m(r);
    ArgminResult mine;
#pragma omp for schedule(dynamic, 4)
    for (int i = 0; i < runs; ++i) {
      Generator gen(r, base_seed + static_cast<std::uint64_t>(i));
      auto toks = gen.random_tokens(per_run);
      while (static_cast<int>(toks.size()) < per_run) {
        auto more = gen.random_tokens(per_run);
        toks.insert(toks.end(), more.begin(), more.end());
      }
      toks.resize(per_run);
      Stack k;
      for (const auto& t : toks) {
        InputToken in{t.text};
        MoldChoice mc = m.choose(k, in);
        bool have = false;
        Obligations best;
        for (int c : m.restricted(in))
          for (const auto& o : m.parser.options(k, {}, m.token_for(in, c), false))
            if (!have || o.delta < best) {
              best = o.delta;
              have = true;
            }
        ++mine.steps;
        if (have != (mc.tile >= 0) || (have && mc.delta != best)) {
          ++mine.violations;
          if (mine.first_failure.empty())
            mine.first_failure = "token " + t.text + " chose " + mc.delta.str() + " but " +
                                 best.str() + " exists";
        }
        k = m.step(k, in);
      }
    }
#pragma omp critical
    {
      res.steps += mine.steps;
      res.violations += mine.violations;
      if (res.first_failure.empty()) res.first_failure = mine.first_failure;
    }
  }
  return res;
}

}  // namespace tylr::testing

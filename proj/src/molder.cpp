#include "tylr/molder.hpp"

#include <json.hpp>

namespace tylr {

std::vector<int> candidates(const Grammar& g, const std::string& text) {
  std::vector<int> out;
  for (const auto& t : g.tiles)
    if (!t.is_class() && t.label == text) out.push_back(t.id);
  if (!out.empty() || text.empty()) return out;
  for (const auto& t : g.tiles)
    if (t.is_class() && std::regex_match(text, g.classes[t.klass].re)) out.push_back(t.id);
  return out;
}

bool plan_less(const Relations& r, const Option& a, int ia, const Option& b, int ib) {
  if (a.delta != b.delta) return a.delta < b.delta;
  if (a.depth != b.depth) return a.depth < b.depth;
  if (walk_less(r, a.walk, b.walk)) return true;
  if (walk_less(r, b.walk, a.walk)) return false;
  return ia < ib;
}

std::vector<int> Molder::restricted(const InputToken& t) const {
  if (t.ghost && t.tile >= 0) return {t.tile};
  auto all = candidates(rel.g, t.text);
  if (t.sort < 0) return all;
  std::vector<int> same;
  for (int c : all)
    if (rel.g.tiles[c].sort == t.sort) same.push_back(c);
  return same.empty() ? all : same;
}

Token Molder::token_for(const InputToken& t, int tile) const {
  Token k;
  k.t = Terminal::of_tile(tile);
  k.text = t.text;
  k.ghost = t.ghost;
  k.uid = t.uid;
  return k;
}

MoldChoice Molder::choose(const Stack& k, const InputToken& t) {
  MoldChoice mc;
  auto cands = restricted(t);
  int best = -1;
  for (size_t i = 0; i < cands.size(); ++i) {
    auto opts = parser.options(k, {}, token_for(t, cands[i]));
    if (opts.empty()) continue;
    mc.considered.push_back({cands[i], opts.front()});
    int n = static_cast<int>(mc.considered.size()) - 1;
    if (best < 0 || plan_less(rel, mc.considered[n].plan, n, mc.considered[best].plan, best))
      best = n;
  }
  if (best >= 0) {
    mc.tile = mc.considered[best].tile;
    mc.plan = mc.considered[best].plan;
    mc.delta = mc.plan.delta;
  }
  return mc;
}

Stack Molder::step(const Stack& k, const InputToken& t, MoldChoice* choice, int* tile) {
  if (tile) *tile = -1;
  if (t.ghost && t.tile >= 0) {
    Stack out = parser.push(k, token_for(t, t.tile));
    if (tile && out.top != k.top) *tile = t.tile;
    return out;
  }
  MoldChoice mc = choose(k, t);
  if (choice) *choice = mc;
  if (mc.tile < 0) return k;
  if (tile) *tile = mc.tile;
  Token tok = token_for(t, mc.tile);
  if (t.fresh) return parser.push(k, tok, true);
  return parser.apply(mc.plan, tok);
}

ParseRun Molder::run(const std::vector<InputToken>& toks, bool keep_stacks) {
  ParseRun out;
  Stack k;
  for (const auto& t : toks) {
    MoldChoice mc;
    int tile = -1;
    k = step(k, t, &mc, &tile);
    out.tiles.push_back(tile);
    out.choices.push_back(std::move(mc));
    if (keep_stacks) out.stacks.push_back(k);
  }
  out.term = parser.finish(k);
  return out;
}

std::vector<std::string> lex(const Grammar& g, const std::string& src) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < src.size()) {
    unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    size_t best = 0;
    for (const auto& t : g.tiles)
      if (!t.is_class() && t.label.size() > best && src.compare(i, t.label.size(), t.label) == 0)
        best = t.label.size();
    for (const auto& k : g.classes) {
      std::smatch m;
      auto from = src.begin() + static_cast<std::ptrdiff_t>(i);
      if (std::regex_search(from, src.end(), m, k.re, std::regex_constants::match_continuous))
        best = std::max(best, static_cast<size_t>(m.length(0)));
    }
    if (best == 0) {
      best = 1;
      while (i + best < src.size() && (static_cast<unsigned char>(src[i + best]) & 0xC0) == 0x80)
        ++best;
    }
    out.push_back(src.substr(i, best));
    i += best;
  }
  return out;
}

TermPtr Molder::parse_text(const std::string& src) {
  std::vector<InputToken> toks;
  for (auto& s : lex(rel.g, src)) toks.push_back({s});
  return run(toks).term;
}

namespace {

nlohmann::json obl_json(const Obligations& o) {
  return {{"infix", o.infix}, {"sort", o.sort}, {"ghost", o.ghost}, {"operand", o.operand}};
}

std::string tile_name(const Relations& r, int tile) {
  const TileDef& d = r.g.tiles[tile];
  return d.label + "@" + r.g.sorts[d.sort] + std::to_string(d.level);
}

}  // namespace

std::string choice_json(const Relations& r, const InputToken& t, const MoldChoice& c) {
  nlohmann::json j;
  j["text"] = t.text;
  j["chosen"] = c.tile < 0 ? nlohmann::json(nullptr) : nlohmann::json(tile_name(r, c.tile));
  j["delta"] = obl_json(c.delta);
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& p : c.considered)
    cs.push_back({{"tile", tile_name(r, p.tile)},
                  {"delta", obl_json(p.plan.delta)},
                  {"depth", p.plan.depth},
                  {"walk", walk_to_string(r, p.plan.walk)}});
  j["candidates"] = cs;
  return j.dump();
}

}  // namespace tylr

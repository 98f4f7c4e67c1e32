#include "tylr/serialize.hpp"

namespace tylr {

using nlohmann::json;

json token_json(const Elaboration& e, const Token& t) {
  json j;
  if (t.t.is_grout()) {
    j["kind"] = "grout";
    j["shape"] = shape_name(t.t.shape);
    j["sort"] = e.g.sorts[t.t.sort];
    return j;
  }
  j["kind"] = "token";
  j["text"] = t.text;
  j["sort"] = t.t.is_tile() ? e.g.sorts[e.g.tiles[t.t.tile].sort] : "";
  j["ghost"] = t.ghost;
  return j;
}

json term_json(const Elaboration& e, const TermPtr& t) {
  json kids = json::array();
  for (const auto& c : t->children)
    kids.push_back(c.is_term() ? term_json(e, c.term) : token_json(e, c.tok));
  return {{"kind", "term"}, {"children", kids}};
}

std::string grout_glyph(GroutShape s, bool ascii) {
  switch (s) {
    case GroutShape::kOperand: return ascii ? "_" : "⬚";
    case GroutShape::kInfix: return ascii ? "<>" : "⟐";
    case GroutShape::kPrefix: return ascii ? ">>" : "⦊";
    case GroutShape::kPostfix: return ascii ? "<<" : "⦉";
  }
  return "?";
}

std::string token_text(const Token& t, bool ascii) {
  if (t.t.is_grout()) return grout_glyph(t.t.shape, ascii);
  if (t.ghost) return "[" + t.text + "]";
  return t.text;
}

std::string term_text(const TermPtr& t, bool ascii) {
  std::vector<Token> toks;
  flatten(t, toks);
  std::string s;
  for (const auto& k : toks) {
    if (!s.empty()) s += ' ';
    s += token_text(k, ascii);
  }
  return s;
}

std::string term_debug(const Elaboration& e, const TermPtr& t) {
  std::string s = "(";
  bool first = true;
  for (const auto& c : t->children) {
    if (!first) s += ' ';
    first = false;
    if (c.is_term()) {
      s += term_debug(e, c.term);
    } else {
      s += token_text(c.tok);
      if (c.tok.t.is_grout()) s += e.g.sorts[c.tok.t.sort];
    }
  }
  return s + ")";
}

}  // namespace tylr

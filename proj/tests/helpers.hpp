#pragma once

#include <string>

#include "tylr/editor.hpp"
#include "tylr/serialize.hpp"

namespace tylr::testing {

inline const Grammar& hazel_grammar() {
  static const Grammar g = builtin_hazel();
  return g;
}

inline const Relations& hazel() {
  static const Relations r(hazel_grammar());
  return r;
}

// Tile id by label and sort, optionally by level; -1 if absent.
inline int tile_of(const Grammar& g, const std::string& label, const std::string& sort,
                   int level = -1) {
  for (const auto& t : g.tiles)
    if (t.label == label && g.sorts[t.sort] == sort && (level < 0 || t.level == level)) return t.id;
  return -1;
}

inline Token tok(const Grammar& g, int tile, const std::string& text = "", bool ghost = false) {
  Token t;
  t.t = Terminal::of_tile(tile);
  t.text = text.empty() ? g.tiles[tile].label : text;
  t.ghost = ghost;
  return t;
}

inline std::string parse_text(const Relations& r, const std::string& src) {
  Molder m(r);
  return term_text(m.parse_text(src));
}

}  // namespace tylr::testing

#include "tylr/editor.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tylr/serialize.hpp"

namespace tylr {

namespace {

using Path = std::vector<std::pair<const TermNode*, int>>;

struct Elem {
  DisplayToken d;
  bool newline = false;
  bool caret = false;
  Path path;
};

void collect(const Grammar& g, const TermPtr& t, Path& path,
             std::vector<std::pair<Token, Path>>& out) {
  for (size_t i = 0; i < t->children.size(); ++i) {
    path.push_back({t.get(), static_cast<int>(i)});
    const Child& c = t->children[i];
    if (c.is_term())
      collect(g, c.term, path, out);
    else
      out.push_back({c.tok, path});
    path.pop_back();
  }
}

const TermNode* find_owner(const TermPtr& t, int uid, int* index) {
  for (size_t i = 0; i < t->children.size(); ++i) {
    const Child& c = t->children[i];
    if (c.is_term()) {
      if (const TermNode* n = find_owner(c.term, uid, index)) return n;
    } else if (c.tok.uid == uid) {
      *index = static_cast<int>(i);
      return t.get();
    }
  }
  return nullptr;
}

DisplayToken display(const Grammar& g, const Token& t, bool ascii = false) {
  DisplayToken d;
  d.ghost = t.ghost;
  if (t.t.is_grout()) {
    d.text = grout_glyph(t.t.shape, ascii);
    d.sort = g.sorts[t.t.sort];
    d.grout_kind = shape_name(t.t.shape);
  } else {
    d.text = t.text;
    d.sort = g.sorts[g.tiles[t.t.tile].sort];
  }
  return d;
}

int tile_count(const TermNode* n) {
  int c = 0;
  for (const auto& ch : n->children)
    if (!ch.is_term() && ch.tok.t.is_tile()) ++c;
  return c;
}

}  // namespace

std::vector<std::string> utf8_chars(const std::string& s) {
  std::vector<std::string> out;
  for (size_t i = 0; i < s.size();) {
    size_t n = 1;
    while (i + n < s.size() && (static_cast<unsigned char>(s[i + n]) & 0xC0) == 0x80) ++n;
    out.push_back(s.substr(i, n));
    i += n;
  }
  return out;
}

Event Event::from_json(const nlohmann::json& j) {
  static const std::map<std::string, Kind> kinds = {
      {"insert", Kind::kInsert}, {"backspace", Kind::kBackspace}, {"tab", Kind::kTab},
      {"newline", Kind::kNewline}, {"left", Kind::kMoveLeft},     {"right", Kind::kMoveRight}};
  Event e;
  std::string k = j.at("kind").get<std::string>();
  if (k == "move") k = j.at("dir").get<std::string>();
  auto it = kinds.find(k);
  if (it == kinds.end()) throw std::invalid_argument("unknown event kind: " + k);
  e.kind = it->second;
  if (e.kind == Kind::kInsert) e.text = j.at("text").get<std::string>();
  return e;
}

nlohmann::json Event::to_json() const {
  switch (kind) {
    case Kind::kInsert:
      return {{"kind", "insert"}, {"text", text}};
    case Kind::kBackspace:
      return {{"kind", "backspace"}};
    case Kind::kMoveLeft:
      return {{"kind", "move"}, {"dir", "left"}};
    case Kind::kMoveRight:
      return {{"kind", "move"}, {"dir", "right"}};
    case Kind::kTab:
      return {{"kind", "tab"}};
    case Kind::kNewline:
      return {{"kind", "newline"}};
  }
  return {};
}

nlohmann::json RenderModel::to_json() const {
  nlohmann::json ls = nlohmann::json::array();
  for (const auto& l : lines) {
    nlohmann::json ts = nlohmann::json::array();
    for (const auto& t : l.tokens)
      ts.push_back({{"text", t.text},
                    {"sort", t.sort},
                    {"left_tip", t.left_tip},
                    {"right_tip", t.right_tip},
                    {"ghost", t.ghost},
                    {"grout_kind", t.grout_kind},
                    {"unmolded", t.unmolded},
                    {"caret_here", t.caret_here},
                    {"underline_group", t.underline_group}});
    ls.push_back({{"indent", l.indent}, {"tokens", ts}});
  }
  return {{"lines", ls}, {"caret_index", caret_index}};
}

std::string RenderModel::text(bool ascii) const {
  std::string out;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (i) out += "\n";
    out += std::string(lines[i].indent, ' ');
    for (size_t j = 0; j < lines[i].tokens.size(); ++j) {
      const auto& t = lines[i].tokens[j];
      if (j) out += " ";
      std::string txt = t.text;
      if (ascii && !t.grout_kind.empty()) {
        static const std::map<std::string, std::string> a = {
            {"⬚", "_"}, {"⟐", "<>"}, {"⦊", ">>"}, {"⦉", "<<"}};
        auto it = a.find(txt);
        if (it != a.end()) txt = it->second;
      }
      if (t.ghost)
        txt = "[" + txt + "]";
      else if (t.unmolded)
        txt = "!" + txt + "!";
      out += txt;
    }
  }
  return out;
}

bool Editor::extendable(const std::string& s) const {
  for (const auto& t : rel.g.tiles) {
    if (t.is_class()) {
      if (std::regex_match(s, rel.g.classes[t.klass].re)) return true;
    } else if (t.label.compare(0, s.size(), s) == 0) {
      return true;
    }
  }
  return false;
}

Editor::Parsed Editor::parse(int fresh_uid) {
  Parsed p;
  auto add_pending = [&]() {
    if (!st.pending.empty()) p.input.push_back({st.pending, false, -1, -1, -2, false});
  };
  for (int i = 0; i < static_cast<int>(st.items.size()); ++i) {
    if (i == st.caret) add_pending();
    const Item& it = st.items[i];
    if (it.kind != Item::Kind::kToken) continue;
    InputToken t;
    t.text = it.text;
    t.ghost = it.ghost;
    t.tile = it.ghost ? it.tile : -1;
    t.sort = it.sort;
    t.uid = it.uid;
    t.fresh = it.uid == fresh_uid;
    p.input.push_back(t);
  }
  if (st.caret >= static_cast<int>(st.items.size())) add_pending();
  p.run = molder.run(p.input);
  return p;
}

TermPtr Editor::term() { return parse(-1).run.term; }

Stack Editor::prefix_stack() {
  std::vector<InputToken> in;
  for (int i = 0; i < st.caret; ++i) {
    const Item& it = st.items[i];
    if (it.kind != Item::Kind::kToken) continue;
    in.push_back({it.text, it.ghost, it.ghost ? it.tile : -1, it.sort, it.uid, false});
  }
  if (!st.pending.empty()) in.push_back({st.pending, false, -1, -1, -2, false});
  Stack k;
  for (const auto& t : in) k = molder.step(k, t);
  return k;
}

void Editor::rebuild(const Parsed& p, bool materialize) {
  std::vector<Item> items = st.items;
  Item marker;
  marker.kind = Item::Kind::kCaret;
  items.insert(items.begin() + st.caret, marker);

  std::vector<std::pair<Token, Path>> toks;
  Path path;
  collect(rel.g, p.run.term, path, toks);
  std::set<int> placed;
  for (const auto& [t, _] : toks)
    if (t.uid >= 0) placed.insert(t.uid);

  std::map<int, const Item*> by_uid;
  std::map<int, std::vector<Item>> runs;
  std::vector<Item> leading;
  std::vector<Item>* cur = &leading;
  for (const auto& it : items) {
    if (it.kind == Item::Kind::kToken) {
      if (placed.count(it.uid)) {
        by_uid[it.uid] = &it;
        cur = &runs[it.uid];
      } else if (!it.ghost) {
        Item u = it;
        u.kind = Item::Kind::kUnmolded;
        cur->push_back(u);
      }
      continue;
    }
    cur->push_back(it);
  }

  std::vector<Item> out = leading;
  for (const auto& [t, _] : toks) {
    if (t.t.is_grout()) continue;
    if (t.uid >= 0) {
      Item it = *by_uid.at(t.uid);
      it.ghost = t.ghost;
      it.tile = t.t.tile;
      it.sort = rel.g.tiles[t.t.tile].sort;
      out.push_back(it);
      const auto& r = runs[t.uid];
      out.insert(out.end(), r.begin(), r.end());
    } else if (t.uid == -1 && materialize) {
      Item it;
      it.text = t.text;
      it.ghost = true;
      it.tile = t.t.tile;
      it.sort = rel.g.tiles[t.t.tile].sort;
      it.uid = st.next_uid++;
      out.push_back(it);
    }
  }
  auto m = std::find_if(out.begin(), out.end(),
                        [](const Item& it) { return it.kind == Item::Kind::kCaret; });
  st.caret = static_cast<int>(m - out.begin());
  out.erase(m);
  st.items = std::move(out);
}

void Editor::commit() {
  if (st.pending.empty()) return;
  std::string text = std::move(st.pending);
  st.pending.clear();
  Item it;
  it.text = text;
  it.uid = st.next_uid++;
  if (candidates(rel.g, text).empty()) {
    it.kind = Item::Kind::kUnmolded;
    st.items.insert(st.items.begin() + st.caret++, it);
    return;
  }
  int uid = it.uid;
  st.items.insert(st.items.begin() + st.caret++, it);
  Parsed p = parse(uid);

  // Completion ghosts to the right of the new tile go to the end of the
  // caret's line.
  int at = -1;
  const TermNode* owner = find_owner(p.run.term, uid, &at);
  std::vector<Item> ghosts;
  if (owner)
    for (size_t i = at + 1; i < owner->children.size(); ++i) {
      const Child& c = owner->children[i];
      if (c.is_term() || c.tok.uid != -1 || !c.tok.t.is_tile()) continue;
      Item g;
      g.text = c.tok.text;
      g.ghost = true;
      g.tile = c.tok.t.tile;
      g.sort = rel.g.tiles[g.tile].sort;
      g.uid = st.next_uid++;
      ghosts.push_back(g);
    }
  if (!ghosts.empty()) {
    int pos = st.caret;
    while (pos < static_cast<int>(st.items.size()) && st.items[pos].kind != Item::Kind::kNewline)
      ++pos;
    st.items.insert(st.items.begin() + pos, ghosts.begin(), ghosts.end());
    p = parse(uid);
  }
  rebuild(p, true);
}

void Editor::insert_char(const std::string& c) {
  if (c == " " || c == "\t") {
    commit();
    return;
  }
  if (c == "\n" || c == "\r") {
    apply({Event::Kind::kNewline, ""});
    return;
  }
  if (!st.pending.empty() && !extendable(st.pending + c)) commit();
  st.pending += c;
}

void Editor::backspace() {
  if (!st.pending.empty()) {
    auto cs = utf8_chars(st.pending);
    cs.pop_back();
    st.pending.clear();
    for (auto& s : cs) st.pending += s;
    return;
  }
  if (st.caret == 0) return;
  Item& it = st.items[st.caret - 1];
  if (it.kind == Item::Kind::kToken && it.ghost) return;
  auto cs = utf8_chars(it.text);
  if (it.kind == Item::Kind::kNewline || cs.size() <= 1) {
    bool requisite = false;
    if (it.kind == Item::Kind::kToken) {
      int at = -1;
      TermPtr t = term();
      const TermNode* owner = find_owner(t, it.uid, &at);
      if (owner)
        for (size_t i = 0; i < owner->children.size(); ++i) {
          const Child& c = owner->children[i];
          if (static_cast<int>(i) != at && !c.is_term() && c.tok.t.is_tile() && !c.tok.ghost)
            requisite = true;
        }
      if (requisite) {
        it.ghost = true;
        it.text = rel.g.tiles[it.tile].label;
      }
    }
    if (!requisite) st.items.erase(st.items.begin() + st.caret - 1);
    --st.caret;
  } else {
    cs.pop_back();
    std::string rest;
    for (auto& s : cs) rest += s;
    st.items.erase(st.items.begin() + st.caret - 1);
    --st.caret;
    st.pending = rest;
  }
  rebuild(parse(-1), false);
}

void Editor::tab() {
  commit();
  for (int i = st.caret; i < static_cast<int>(st.items.size()); ++i) {
    Item& it = st.items[i];
    if (it.kind != Item::Kind::kToken) continue;
    if (!it.ghost) return;
    it.ghost = false;
    st.caret = i + 1;
    rebuild(parse(-1), false);
    return;
  }
}

void Editor::load(const std::string& src) {
  st = EditState{};
  size_t from = 0;
  while (true) {
    size_t nl = src.find('\n', from);
    std::string line = src.substr(from, nl == std::string::npos ? std::string::npos : nl - from);
    for (auto& w : lex(rel.g, line)) {
      Item it;
      it.text = w;
      it.uid = st.next_uid++;
      if (candidates(rel.g, w).empty()) it.kind = Item::Kind::kUnmolded;
      st.items.push_back(it);
    }
    if (nl == std::string::npos) break;
    Item it;
    it.kind = Item::Kind::kNewline;
    it.text = "\n";
    it.uid = st.next_uid++;
    st.items.push_back(it);
    from = nl + 1;
  }
  // Trailing newlines carry no structure.
  while (!st.items.empty() && st.items.back().kind == Item::Kind::kNewline) st.items.pop_back();
  st.caret = static_cast<int>(st.items.size());
}

void Editor::apply(const Event& ev) {
  switch (ev.kind) {
    case Event::Kind::kInsert:
      for (const auto& c : utf8_chars(ev.text)) insert_char(c);
      break;
    case Event::Kind::kBackspace:
      backspace();
      break;
    case Event::Kind::kMoveLeft:
      commit();
      st.caret = std::max(0, st.caret - 1);
      break;
    case Event::Kind::kMoveRight:
      commit();
      st.caret = std::min(static_cast<int>(st.items.size()), st.caret + 1);
      break;
    case Event::Kind::kTab:
      tab();
      break;
    case Event::Kind::kNewline: {
      commit();
      Item nl;
      nl.kind = Item::Kind::kNewline;
      nl.text = "\n";
      nl.uid = st.next_uid++;
      st.items.insert(st.items.begin() + st.caret++, nl);
      break;
    }
  }
}

RenderModel Editor::render() {
  Parsed p = parse(-1);
  const Grammar& g = rel.g;

  // Buffer order with the pending text and the caret spliced in.
  std::vector<Item> items = st.items;
  std::vector<Item> splice;
  if (!st.pending.empty()) {
    Item pend;
    pend.text = st.pending;
    pend.uid = -2;
    splice.push_back(pend);
  }
  Item marker;
  marker.kind = Item::Kind::kCaret;
  splice.push_back(marker);
  items.insert(items.begin() + st.caret, splice.begin(), splice.end());

  std::vector<std::pair<Token, Path>> toks;
  Path path;
  collect(g, p.run.term, path, toks);
  std::set<int> placed;
  for (const auto& [t, _] : toks)
    if (t.uid >= 0 || t.uid == -2) placed.insert(t.uid);

  auto trivia = [&](const Item& it) {
    Elem e;
    if (it.kind == Item::Kind::kNewline) {
      e.newline = true;
    } else if (it.kind == Item::Kind::kCaret) {
      e.caret = true;
    } else {
      e.d.text = it.text;
      e.d.unmolded = true;
    }
    return e;
  };
  std::map<int, std::vector<Elem>> runs;
  std::vector<Elem> leading;
  std::vector<Elem>* cur = &leading;
  for (const auto& it : items) {
    if (it.kind == Item::Kind::kToken) {
      if (placed.count(it.uid)) {
        cur = &runs[it.uid];
      } else if (!it.ghost) {
        Item u = it;
        u.kind = Item::Kind::kUnmolded;
        cur->push_back(trivia(u));
      }
      continue;
    }
    cur->push_back(trivia(it));
  }

  std::vector<Elem> elems = leading;
  for (const auto& [t, pth] : toks) {
    Elem e;
    e.d = display(g, t);
    e.path = pth;
    elems.push_back(e);
    if (t.uid >= 0 || t.uid == -2) {
      auto& r = runs[t.uid];
      elems.insert(elems.end(), r.begin(), r.end());
    }
  }

  // Lines, caret and the line each term starts on.
  RenderModel rm;
  rm.lines.emplace_back();
  std::vector<int> line_of;
  std::vector<Elem*> shown;
  std::map<const TermNode*, int> start_line;
  int caret_elem = -1;
  for (auto& e : elems) {
    if (e.newline) {
      rm.lines.emplace_back();
      continue;
    }
    if (e.caret) {
      rm.caret_index = static_cast<int>(shown.size());
      caret_elem = rm.caret_index;
      continue;
    }
    int line = static_cast<int>(rm.lines.size()) - 1;
    for (const auto& [n, _] : e.path) start_line.emplace(n, line);
    shown.push_back(&e);
    line_of.push_back(line);
  }

  // Caret term: the term holding the token beside the caret.
  const TermNode* ct = nullptr;
  for (int i = caret_elem - 1; i >= 0 && !ct; --i)
    if (!shown[i]->path.empty()) ct = shown[i]->path.back().first;
  for (int i = std::max(caret_elem, 0); i < static_cast<int>(shown.size()) && !ct; ++i)
    if (!shown[i]->path.empty()) ct = shown[i]->path.back().first;
  if (rm.caret_index > 0) shown[rm.caret_index - 1]->d.caret_here = true;

  for (auto* e : shown) {
    if (!ct || e->path.empty()) continue;
    auto [n, i] = e->path.back();
    if (n == ct) {
      bool l = i > 0 && ct->children[i - 1].is_term();
      bool r = i + 1 < static_cast<int>(ct->children.size()) && ct->children[i + 1].is_term();
      e->d.left_tip = l ? "concave" : "convex";
      e->d.right_tip = r ? "concave" : "convex";
    }
    for (const auto& [m, j] : e->path)
      if (m == ct && ct->children[j].is_term()) e->d.underline_group = j + 1;
  }

  // Indent two per enclosing multi-tile term started on an earlier line,
  // unless the line starts with that term's own tile or sits in its last
  // child.
  std::vector<int> indent(rm.lines.size(), -1);
  for (size_t k = 0; k < shown.size(); ++k) {
    int L = line_of[k];
    if (indent[L] >= 0 || shown[k]->path.empty()) continue;
    int ind = 0;
    const Path& pth = shown[k]->path;
    for (size_t a = 0; a + 1 < pth.size(); ++a) {
      auto [n, i] = pth[a];
      if (tile_count(n) < 2 || start_line[n] >= L) continue;
      if (i + 1 == static_cast<int>(n->children.size())) continue;
      ind += 2;
    }
    indent[L] = ind;
  }
  for (size_t k = 0; k < shown.size(); ++k) rm.lines[line_of[k]].tokens.push_back(shown[k]->d);
  for (size_t L = 0; L < rm.lines.size(); ++L) rm.lines[L].indent = std::max(0, indent[L]);
  return rm;
}

std::vector<RenderModel> run_script(const Relations& r, const std::vector<Event>& script) {
  Editor ed(r);
  std::vector<RenderModel> out;
  for (const auto& ev : script) {
    ed.apply(ev);
    out.push_back(ed.render());
  }
  return out;
}

}  // namespace tylr

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tylr/molder.hpp"

namespace tylr {

// Buffer entry. Spaces are not stored: the renderer puts one space between
// tokens.
struct Item {
  enum class Kind { kToken, kNewline, kUnmolded, kCaret };  // kCaret is internal
  Kind kind = Kind::kToken;
  std::string text;
  bool ghost = false;
  int tile = -1;  // fixed for ghosts
  int sort = -1;  // last molded sort of a solid token
  int uid = -1;
};

struct EditState {
  std::vector<Item> items;
  int caret = 0;  // caret sits before items[caret]
  std::string pending;
  int next_uid = 1;
};

struct Event {
  enum class Kind { kInsert, kBackspace, kMoveLeft, kMoveRight, kTab, kNewline };
  Kind kind = Kind::kInsert;
  std::string text;

  static Event from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct DisplayToken {
  std::string text;
  std::string sort;
  std::string left_tip;   // "convex", "concave" or "" off the caret term
  std::string right_tip;
  bool ghost = false;
  std::string grout_kind;  // "" for tiles
  bool unmolded = false;
  bool caret_here = false;  // caret sits right after this token
  int underline_group = 0;  // 1-based child of the caret term, 0 if none
};

struct RenderLine {
  int indent = 0;
  std::vector<DisplayToken> tokens;
};

struct RenderModel {
  std::vector<RenderLine> lines;
  int caret_index = 0;  // display tokens before the caret

  nlohmann::json to_json() const;
  // Plain text with ghosts in brackets, unmolded text in bangs and grout
  // glyphs.
  std::string text(bool ascii = false) const;
};

class Editor {
 public:
  explicit Editor(const Relations& r) : rel(r), molder(r) {}

  const Relations& rel;
  Molder molder;
  EditState st;

  // Replaces the buffer with lexed source text, caret at the end.
  void load(const std::string& src);
  void apply(const Event& ev);
  RenderModel render();
  TermPtr term();
  // Stack after pushing every token before the caret.
  Stack prefix_stack();

 private:
  struct Parsed {
    ParseRun run;
    std::vector<InputToken> input;
  };

  Parsed parse(int fresh_uid);
  void commit();
  void rebuild(const Parsed& p, bool materialize);
  void insert_char(const std::string& c);
  void backspace();
  void tab();
  bool extendable(const std::string& s) const;
};

std::vector<RenderModel> run_script(const Relations& r, const std::vector<Event>& script);

// Splits a string into UTF-8 characters.
std::vector<std::string> utf8_chars(const std::string& s);

}  // namespace tylr

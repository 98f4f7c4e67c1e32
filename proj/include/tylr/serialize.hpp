#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tylr/term.hpp"

namespace tylr {

nlohmann::json token_json(const Elaboration& e, const Token& t);
nlohmann::json term_json(const Elaboration& e, const TermPtr& t);

// Glyph for a grout shape: ⬚ ⟐ ⦊ ⦉, or _ <> >> << in ascii mode.
std::string grout_glyph(GroutShape s, bool ascii);

// Display text of one token: ghosts in brackets, grout as glyphs.
std::string token_text(const Token& t, bool ascii = false);

// Tokens of the term separated by single spaces.
std::string term_text(const TermPtr& t, bool ascii = false);

// Nested form with every term in parentheses, for debugging.
std::string term_debug(const Elaboration& e, const TermPtr& t);

}  // namespace tylr

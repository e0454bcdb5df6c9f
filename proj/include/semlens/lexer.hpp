// Byte-span tokenizer for the supported Java/Python subset. Comments and
// string literals are kept as single opaque tokens so statement splitting and
// identifier rewriting never touch their interiors.
#pragma once

#include <string_view>
#include <vector>

#include "semlens/common.hpp"

namespace semlens {

enum class TokenKind { Ident, Number, Str, Comment, Op, Newline };

struct Token {
  TokenKind kind;
  Span span;
  std::string_view text;  // view into the lexed source
};

// Tokenizes the whole buffer. Newline tokens are only emitted for Python and
// only outside (), [], {} nesting; they mark logical-line boundaries.
std::vector<Token> lex(std::string_view source, Language language);

}  // namespace semlens

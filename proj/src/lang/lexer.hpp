#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "livemodel/ast.hpp"
#include "livemodel/diagnostic.hpp"

namespace livemodel::detail {

enum class Tok {
    End,
    Ident,
    Int,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Bar,
    Dot,
    Plus,
    Minus,
    Amp,
    Arrow,
    Caret,
    Star,
    Tilde,
    Eq,
    NotEq,
    Bang,
    AndAnd,
    OrOr,
    Implies,
    Iff,
    Prime,
    Hash,
    Invalid,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    Span span;
    bool line_start = false;  // first token on its source line
};

const char* describe(Tok kind);

/// Tokenizes the whole text. Invalid characters become Tok::Invalid tokens;
/// an unterminated block comment is reported into diags.
std::vector<Token> lex(std::string_view text, std::vector<Diagnostic>& diags);

bool is_keyword(std::string_view word);
bool is_temporal_keyword(std::string_view word);

}  // namespace livemodel::detail

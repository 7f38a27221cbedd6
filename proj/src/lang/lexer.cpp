#include "lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace livemodel::detail {

namespace {

constexpr std::array<std::string_view, 20> kKeywords = {
    "abstract", "sig", "extends", "in", "one", "lone", "some", "no", "all", "set",
    "fact", "pred", "run", "for", "but", "not", "and", "or", "implies", "iff",
};

constexpr std::array<std::string_view, 11> kTemporal = {
    "var", "always", "eventually", "after", "before", "historically",
    "once", "until", "releases", "since", "triggered",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

bool is_keyword(std::string_view word) {
    for (auto k : kKeywords)
        if (k == word) return true;
    return false;
}

bool is_temporal_keyword(std::string_view word) {
    for (auto k : kTemporal)
        if (k == word) return true;
    return false;
}

const char* describe(Tok kind) {
    switch (kind) {
        case Tok::End: return "end of input";
        case Tok::Ident: return "name";
        case Tok::Int: return "integer";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Comma: return "','";
        case Tok::Colon: return "':'";
        case Tok::Bar: return "'|'";
        case Tok::Dot: return "'.'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Amp: return "'&'";
        case Tok::Arrow: return "'->'";
        case Tok::Caret: return "'^'";
        case Tok::Star: return "'*'";
        case Tok::Tilde: return "'~'";
        case Tok::Eq: return "'='";
        case Tok::NotEq: return "'!='";
        case Tok::Bang: return "'!'";
        case Tok::AndAnd: return "'&&'";
        case Tok::OrOr: return "'||'";
        case Tok::Implies: return "'=>'";
        case Tok::Iff: return "'<=>'";
        case Tok::Prime: return "'''";
        case Tok::Hash: return "'#'";
        case Tok::Invalid: return "invalid character";
    }
    return "token";
}

std::vector<Token> lex(std::string_view text, std::vector<Diagnostic>& diags) {
    std::vector<Token> out;
    size_t i = 0;
    const size_t n = text.size();
    bool at_line_start = true;

    auto push = [&](Tok kind, size_t begin, size_t end) {
        Token t;
        t.kind = kind;
        t.text = std::string(text.substr(begin, end - begin));
        t.span = {static_cast<uint32_t>(begin), static_cast<uint32_t>(end)};
        t.line_start = at_line_start;
        at_line_start = false;
        out.push_back(std::move(t));
    };

    while (i < n) {
        char c = text[i];
        if (c == '\n') {
            at_line_start = true;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '/') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '*') {
            size_t close = text.find("*/", i + 2);
            if (close == std::string_view::npos) {
                diags.push_back({Severity::Error,
                                 {static_cast<uint32_t>(i), static_cast<uint32_t>(n)},
                                 "unterminated block comment",
                                 codes::kSyntax,
                                 {"'*/'"}});
                i = n;
                break;
            }
            for (size_t k = i; k < close; ++k)
                if (text[k] == '\n') at_line_start = true;
            i = close + 2;
            continue;
        }
        size_t begin = i;
        if (ident_start(c)) {
            while (i < n && ident_char(text[i])) ++i;
            push(Tok::Ident, begin, i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            push(Tok::Int, begin, i);
            continue;
        }
        auto two = [&](char next) { return i + 1 < n && text[i + 1] == next; };
        switch (c) {
            case '{': push(Tok::LBrace, i, i + 1); ++i; break;
            case '}': push(Tok::RBrace, i, i + 1); ++i; break;
            case '(': push(Tok::LParen, i, i + 1); ++i; break;
            case ')': push(Tok::RParen, i, i + 1); ++i; break;
            case '[': push(Tok::LBracket, i, i + 1); ++i; break;
            case ']': push(Tok::RBracket, i, i + 1); ++i; break;
            case ',': push(Tok::Comma, i, i + 1); ++i; break;
            case ':': push(Tok::Colon, i, i + 1); ++i; break;
            case '.': push(Tok::Dot, i, i + 1); ++i; break;
            case '+': push(Tok::Plus, i, i + 1); ++i; break;
            case '^': push(Tok::Caret, i, i + 1); ++i; break;
            case '*': push(Tok::Star, i, i + 1); ++i; break;
            case '~': push(Tok::Tilde, i, i + 1); ++i; break;
            case '\'': push(Tok::Prime, i, i + 1); ++i; break;
            case '#': push(Tok::Hash, i, i + 1); ++i; break;
            case '-':
                if (two('>')) { push(Tok::Arrow, i, i + 2); i += 2; }
                else { push(Tok::Minus, i, i + 1); ++i; }
                break;
            case '&':
                if (two('&')) { push(Tok::AndAnd, i, i + 2); i += 2; }
                else { push(Tok::Amp, i, i + 1); ++i; }
                break;
            case '|':
                if (two('|')) { push(Tok::OrOr, i, i + 2); i += 2; }
                else { push(Tok::Bar, i, i + 1); ++i; }
                break;
            case '=':
                if (two('>')) { push(Tok::Implies, i, i + 2); i += 2; }
                else { push(Tok::Eq, i, i + 1); ++i; }
                break;
            case '!':
                if (two('=')) { push(Tok::NotEq, i, i + 2); i += 2; }
                else { push(Tok::Bang, i, i + 1); ++i; }
                break;
            case '<':
                if (i + 2 < n && text[i + 1] == '=' && text[i + 2] == '>') {
                    push(Tok::Iff, i, i + 3);
                    i += 3;
                    break;
                }
                [[fallthrough]];
            default: {
                // Consume one UTF-8 code point as a single invalid token.
                size_t len = 1;
                auto uc = static_cast<unsigned char>(c);
                if (uc >= 0xF0) len = 4;
                else if (uc >= 0xE0) len = 3;
                else if (uc >= 0xC0) len = 2;
                push(Tok::Invalid, i, std::min(n, i + len));
                i = std::min(n, i + len);
                break;
            }
        }
    }
    Token end;
    end.kind = Tok::End;
    end.span = {static_cast<uint32_t>(n), static_cast<uint32_t>(n)};
    end.line_start = true;
    out.push_back(end);
    return out;
}

}  // namespace livemodel::detail

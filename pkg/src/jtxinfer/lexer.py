"""Tokenizer for `.jtx` compilation units."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import JtxSyntaxError, UnsupportedFeature

KEYWORDS = {
    "class", "import", "var", "while", "return", "new", "void",
    "true", "false", "extends",
}

# Recognised but outside the supported subset; reported explicitly.
UNSUPPORTED = {
    "try", "catch", "finally", "throw", "throws", "if", "else", "for",
    "switch", "case", "interface", "implements", "static", "public",
    "private", "protected", "final", "abstract", "int", "boolean", "char",
    "byte", "short", "long", "float", "instanceof", "super", "this",
    "package", "enum", "record",
}

PUNCT = [
    "->", "<=", "++", "||", "==",
    "(", ")", "{", "}", "<", ">", ";", ",", ".", "=", "+", "*", "?",
]


@dataclass
class Token:
    kind: str  # 'ident', 'keyword', 'int', 'string', 'punct', 'eof'
    text: str
    line: int
    col: int

    def __repr__(self):
        return f"{self.kind}({self.text!r})"


def _is_ident_start(c):
    return c.isalpha() or c in "_$"


def _is_ident_char(c):
    return c.isalnum() or c in "_$"


def tokenize(source):
    tokens = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == "/" and source[i:i + 2] == "//":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c == "/" and source[i:i + 2] == "/*":
            end = source.find("*/", i + 2)
            if end < 0:
                raise JtxSyntaxError("unterminated comment", line, col)
            skipped = source[i:end + 2]
            line += skipped.count("\n")
            if "\n" in skipped:
                col = len(skipped) - skipped.rfind("\n")
            else:
                col += len(skipped)
            i = end + 2
            continue
        if _is_ident_start(c):
            j = i
            while j < n and _is_ident_char(source[j]):
                j += 1
            word = source[i:j]
            if word in UNSUPPORTED:
                raise UnsupportedFeature(
                    f"'{word}' is not part of the supported subset", line, col)
            kind = "keyword" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == ".":
                raise UnsupportedFeature(
                    "floating point literals are not supported", line, col)
            tokens.append(Token("int", source[i:j], line, col))
            col += j - i
            i = j
            continue
        if c == '"':
            j = i + 1
            while j < n and source[j] != '"':
                if source[j] == "\n":
                    raise JtxSyntaxError("unterminated string literal", line, col)
                j += 1
            if j >= n:
                raise JtxSyntaxError("unterminated string literal", line, col)
            tokens.append(Token("string", source[i + 1:j], line, col))
            col += j - i + 1
            i = j + 1
            continue
        for p in PUNCT:
            if source.startswith(p, i):
                if p == "?":
                    raise UnsupportedFeature(
                        "wildcard types are not supported", line, col)
                tokens.append(Token("punct", p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            raise JtxSyntaxError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens

"""Tokenizer for the .fsc specification language.

Keywords and operators are fixed; ``//`` starts a comment that runs to the end
of the line. Every token carries a span for diagnostics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from fsc.errors import LexError, Span

KEYWORDS = frozenset(
    """
    plant requirement supervisor automaton def end location edge when do goto
    needs initial marked monitor invariant controllable uncontrollable disc
    alg enum bool int true false not and or in any if else alphabet
    featuremodel
    """.split()
)

# Longest alternatives first so e.g. "<=>" never lexes as "<" "=" ">".
_OPERATORS = [
    "<=>", "=>", ":=", "..", "!=", "<=", ">=",
    "=", "<", ">", "+", "-", "*", ":", ";", ",", ".", "(", ")", "[", "]",
]

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<comment>//[^\n]*)"
    r"|(?P<int>\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>" + "|".join(re.escape(op) for op in _OPERATORS) + r")"
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'kw' | 'ident' | 'int' | 'op' | 'eof'
    value: str
    span: Span = field(compare=False, default=Span(0, 0))

    def __repr__(self) -> str:
        return f"{self.kind}:{self.value}"


def tokenize(source: str) -> list[Token]:
    """Turn source text into a token list ending with an ``eof`` token."""
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            col = pos - line_start + 1
            raise LexError(f"illegal character {source[pos]!r}", Span(line, col))
        text = m.group()
        span = Span(line, pos - line_start + 1, len(text))
        if m.lastgroup == "ws":
            nl = text.count("\n")
            if nl:
                line += nl
                line_start = pos + text.rindex("\n") + 1
        elif m.lastgroup == "comment":
            pass
        elif m.lastgroup == "int":
            tokens.append(Token("int", text, span))
        elif m.lastgroup == "ident":
            kind = "kw" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, span))
        else:
            tokens.append(Token("op", text, span))
        pos = m.end()
    tokens.append(Token("eof", "", Span(line, pos - line_start + 1)))
    return tokens

"""Plain-text reaction network DSL.

Grammar (one statement per line)::

    line      := reaction | comment | blank
    reaction  := complex arrow complex [ '|' rate-spec ]
    complex   := '0' | term ('+' term)*
    term      := [integer] ident
    arrow     := '->' | '<->'
    rate-spec := 'k=' decimal
               | 'k=' decimal ',' 'krev=' decimal
               | 'k~[' decimal ',' decimal ']' [',' 'krev~[' decimal ',' decimal ']']
    comment   := '#' any

'<->' expands to a forward and a reverse reaction.  'k~[a,b]' declares a
bounded time-varying rate with band [a, b] (0 < a <= b).  Omitted rates
default to k=1.0.  The zero complex is spelled '0'.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .kinetics import BandedRate, ConstantRate, Kinetics, RateSpec
from .model import ReactionNetwork, validate_network

DEFAULT_RATE = 1.0


class ParseError(ValueError):
    """Syntax or lexical error, with 1-based line/column position."""

    def __init__(self, message: str, line: int, column: int, kind: str = "syntax"):
        self.line = line
        self.column = column
        self.kind = kind
        self.bare_message = message
        super().__init__(f"{line}:{column}: {message}")

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.line}:{self.column}: {self.bare_message}"


@dataclass(frozen=True)
class RateAnnotation:
    """Rate clause of one statement; band is None for constant rates."""

    forward_value: float | None = None
    forward_band: tuple[float, float] | None = None
    reverse_value: float | None = None
    reverse_band: tuple[float, float] | None = None
    has_reverse: bool = False


@dataclass(frozen=True)
class ReactionStatement:
    source: tuple[tuple[str, int], ...]  # (species name, coefficient) terms
    product: tuple[tuple[str, int], ...]
    reversible: bool
    rate: RateAnnotation
    line: int


@dataclass
class NetworkDocument:
    """Parsed reaction statements plus document metadata."""

    statements: list[ReactionStatement] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)
    name: str | None = None


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow><->|->)
  | (?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>[+|=~,\[\]\-])
    """,
    re.VERBOSE,
)


def _tokenize(text: str, lineno: int) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos + 1))
        pos = m.end()
    return tokens


class _LineParser:
    def __init__(self, tokens: list[tuple[str, str, int]], lineno: int):
        self.tokens = tokens
        self.lineno = lineno
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of line", self.lineno, self._end_col())
        self.i += 1
        return tok

    def _end_col(self) -> int:
        return self.tokens[-1][2] + len(self.tokens[-1][1]) if self.tokens else 1

    def expect(self, value: str):
        tok = self.next()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1]!r}", self.lineno, tok[2])
        return tok

    def error(self, message: str, kind: str = "syntax"):
        tok = self.peek()
        col = tok[2] if tok else self._end_col()
        raise ParseError(message, self.lineno, col, kind=kind)

    # -- grammar ------------------------------------------------------------

    def parse_complex(self) -> tuple[tuple[str, int], ...]:
        tok = self.peek()
        if tok is None:
            self.error("expected a complex")
        if tok[0] == "sym" and tok[1] == "-":
            self.error("negative coefficient", kind="negative-coefficient")
        if tok[0] == "number" and tok[1] == "0":
            nxt = self.tokens[self.i + 1] if self.i + 1 < len(self.tokens) else None
            if nxt is None or nxt[0] != "ident":
                self.next()
                return ()
        terms: list[tuple[str, int]] = []
        while True:
            terms.append(self.parse_term())
            tok = self.peek()
            if tok is not None and tok[0] == "sym" and tok[1] == "+":
                self.next()
                continue
            break
        # merge repeated species within one complex
        merged: dict[str, int] = {}
        for name, coeff in terms:
            merged[name] = merged.get(name, 0) + coeff
        return tuple(merged.items())

    def parse_term(self) -> tuple[str, int]:
        tok = self.peek()
        if tok is None:
            self.error("expected a term")
        if tok[0] == "sym" and tok[1] == "-":
            self.error("negative coefficient", kind="negative-coefficient")
        coeff = 1
        if tok[0] == "number":
            if "." in tok[1] or "e" in tok[1] or "E" in tok[1]:
                self.error("coefficients must be integers")
            coeff = int(tok[1])
            self.next()
            tok = self.peek()
        if tok is None or tok[0] != "ident":
            self.error("expected a species name")
        self.next()
        return tok[1], coeff

    def parse_decimal(self) -> float:
        tok = self.next()
        if tok[0] != "number":
            raise ParseError(f"expected a number, found {tok[1]!r}", self.lineno, tok[2])
        return float(tok[1])

    def parse_band(self) -> tuple[float, float]:
        self.expect("[")
        lo = self.parse_decimal()
        self.expect(",")
        hi = self.parse_decimal()
        self.expect("]")
        if not 0 < lo <= hi:
            self.error(f"rate band requires 0 < a <= b, got [{lo}, {hi}]", kind="bad-band")
        return lo, hi

    def parse_rate_spec(self) -> RateAnnotation:
        tok = self.next()
        if tok[0] != "ident" or tok[1] != "k":
            raise ParseError("rate spec must start with 'k'", self.lineno, tok[2])
        mode = self.next()
        if mode[1] == "=":
            value = self.parse_decimal()
            if value <= 0:
                self.error("rate constants must be positive", kind="bad-rate")
            if self.peek() is None:
                return RateAnnotation(forward_value=value)
            self.expect(",")
            krev = self.next()
            if krev[0] != "ident" or krev[1] != "krev":
                raise ParseError("expected 'krev'", self.lineno, krev[2])
            self.expect("=")
            rvalue = self.parse_decimal()
            if rvalue <= 0:
                self.error("rate constants must be positive", kind="bad-rate")
            return RateAnnotation(
                forward_value=value, reverse_value=rvalue, has_reverse=True
            )
        if mode[1] == "~":
            band = self.parse_band()
            if self.peek() is None:
                return RateAnnotation(forward_band=band)
            self.expect(",")
            krev = self.next()
            if krev[0] != "ident" or krev[1] != "krev":
                raise ParseError("expected 'krev'", self.lineno, krev[2])
            self.expect("~")
            rband = self.parse_band()
            return RateAnnotation(
                forward_band=band, reverse_band=rband, has_reverse=True
            )
        raise ParseError("expected '=' or '~[' after 'k'", self.lineno, mode[2])

    def parse_reaction(self) -> ReactionStatement:
        source = self.parse_complex()
        tok = self.next()
        if tok[0] != "arrow":
            raise ParseError(f"expected '->' or '<->', found {tok[1]!r}", self.lineno, tok[2])
        reversible = tok[1] == "<->"
        product = self.parse_complex()
        rate = RateAnnotation()
        tok = self.peek()
        if tok is not None:
            if tok[1] != "|":
                raise ParseError(f"unexpected token {tok[1]!r}", self.lineno, tok[2])
            self.next()
            rate = self.parse_rate_spec()
        tok = self.peek()
        if tok is not None:
            raise ParseError(f"unexpected token {tok[1]!r}", self.lineno, tok[2])
        if rate.has_reverse and not reversible:
            raise ParseError(
                "krev requires a reversible '<->' statement", self.lineno, 1, kind="bad-rate"
            )
        return ReactionStatement(source, product, reversible, rate, self.lineno)


def parse(text: str) -> NetworkDocument:
    """Parse DSL text into a :class:`NetworkDocument`.

    Raises :class:`ParseError` (with line/column) on bad syntax, or with
    kind "empty-document" if no reaction statement is present.
    """
    doc = NetworkDocument()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comment = line[1:].strip()
            doc.comments.append(comment)
            if doc.name is None and comment.lower().startswith("name:"):
                doc.name = comment[5:].strip()
            continue
        tokens = _tokenize(raw, lineno)
        doc.statements.append(_LineParser(tokens, lineno).parse_reaction())
    if not doc.statements:
        raise ParseError("no reaction statements found", 1, 1, kind="empty-document")
    return doc


def lower(doc: NetworkDocument) -> tuple[ReactionNetwork, Kinetics]:
    """Build a validated network plus kinetics from a parsed document.

    Species are ordered by first appearance; complexes are deduplicated in
    first-appearance order; '<->' yields the forward then reverse reaction.
    Validation failures propagate as NetworkValidationError.
    """
    species: list[str] = []
    index_of: dict[str, int] = {}
    for stmt in doc.statements:
        for name, _ in stmt.source + stmt.product:
            if name not in index_of:
                index_of[name] = len(species)
                species.append(name)
    n = len(species)

    def to_vector(terms: tuple[tuple[str, int], ...]) -> tuple[int, ...]:
        vec = [0] * n
        for name, coeff in terms:
            vec[index_of[name]] += coeff
        return tuple(vec)

    complexes: list[tuple[int, ...]] = []
    cx_index: dict[tuple[int, ...], int] = {}

    def complex_id(vec: tuple[int, ...]) -> int:
        if vec not in cx_index:
            cx_index[vec] = len(complexes)
            complexes.append(vec)
        return cx_index[vec]

    reactions: list[tuple[int, int]] = []
    rates: list[RateSpec] = []
    for stmt in doc.statements:
        src = complex_id(to_vector(stmt.source))
        prod = complex_id(to_vector(stmt.product))
        reactions.append((src, prod))
        if stmt.rate.forward_band is not None:
            rates.append(BandedRate(*stmt.rate.forward_band))
        else:
            rates.append(ConstantRate(stmt.rate.forward_value or DEFAULT_RATE))
        if stmt.reversible:
            reactions.append((prod, src))
            if stmt.rate.reverse_band is not None:
                rates.append(BandedRate(*stmt.rate.reverse_band))
            elif stmt.rate.reverse_value is not None:
                rates.append(ConstantRate(stmt.rate.reverse_value))
            elif stmt.rate.forward_band is not None:
                rates.append(BandedRate(*stmt.rate.forward_band))
            else:
                rates.append(ConstantRate(stmt.rate.forward_value or DEFAULT_RATE))

    net = validate_network(species, complexes, reactions)
    return net, Kinetics(tuple(rates))


def render(net: ReactionNetwork, kin: Kinetics | None = None) -> str:
    """Render a network (one '->' statement per reaction) that reparses to
    the same complex and reaction multisets."""
    names = net.species_names
    lines = []
    for k, rx in enumerate(net.reactions):
        src = net.complexes[rx.source].format(names)
        prod = net.complexes[rx.product].format(names)
        if kin is None:
            lines.append(f"{src} -> {prod}")
            continue
        spec = kin.rates[k]
        if isinstance(spec, ConstantRate):
            lines.append(f"{src} -> {prod} | k={spec.kappa!r}")
        else:
            lines.append(f"{src} -> {prod} | k~[{spec.lower!r},{spec.upper!r}]")
    return "\n".join(lines) + "\n"


def parse_file(path: str) -> NetworkDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())

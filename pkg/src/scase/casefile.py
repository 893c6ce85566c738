"""Parser and canonical serializer for the three textual file formats.

One lexer serves all three formats:

* ``.scase``   -- a safety case: header block plus one block per GSN node,
* ``.schal``   -- a risk case: challenges filed against named nodes,
* ``.smatrix`` -- a severity x likelihood risk matrix.

Lexical conventions: ``#`` starts a line comment; blocks are ``{ ... }``;
attributes are ``key: value;``.  Numbers accept decimal and scientific
notation (never percent signs).  Input may use LF or CRLF; serializers emit
LF only.  The full grammar ships in ``docs/grammar.md`` as EBNF.

Serialization is canonical: nodes in topological order with node-id
tie-break, attributes in a fixed key order, defaults omitted, probabilities
in their shortest round-trip decimal form.  ``parse(serialize(parse(s)))``
equals ``parse(s)`` for every valid source ``s``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .errors import GraphError, ParseError
from .model import (
    FindingSeverity,
    GsnNode,
    Mode,
    NodeKind,
    NodeStatus,
    SafetyCase,
    SourceSpan,
    ID_PATTERN,
    canonical_order,
    validate_graph,
)

# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

IDENT = "ident"
STRING = "string"
NUMBER = "number"
PUNCT = "punct"
EOF = "eof"

_PUNCT_CHARS = "{}:;,"

_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}


class Token(NamedTuple):
    kind: str
    value: str
    line: int
    column: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column)


def _is_ident_start(c: str) -> bool:
    return c.isascii() and c.isalpha()


def _is_ident_char(c: str) -> bool:
    return c.isascii() and (c.isalnum() or c in "_-")


def tokenize(source: str) -> list[Token]:
    """Lex a full source text; raises ParseError at the first bad byte."""
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)

    def bump(k: int = 1):
        nonlocal i, line, col
        for _ in range(k):
            if i < n and source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = source[i]
        if c == "\n" or c == "\r" or c == " " or c == "\t":
            bump()
            continue
        if c == "#":
            while i < n and source[i] != "\n":
                bump()
            continue
        tl, tc = line, col
        if c in _PUNCT_CHARS:
            tokens.append(Token(PUNCT, c, tl, tc))
            bump()
            continue
        if _is_ident_start(c):
            j = i
            while j < n and _is_ident_char(source[j]):
                j += 1
            tokens.append(Token(IDENT, source[i:j], tl, tc))
            bump(j - i)
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == "." and j + 1 < n and source[j + 1].isdigit():
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            tokens.append(Token(NUMBER, source[i:j], tl, tc))
            bump(j - i)
            continue
        if c == '"':
            bump()
            parts: list[str] = []
            while True:
                if i >= n:
                    raise ParseError("SYNTAX", "unterminated string", line, col)
                c = source[i]
                if c == '"':
                    bump()
                    break
                if c == "\n" or c == "\r":
                    raise ParseError("SYNTAX", "newline inside string", line, col)
                if ord(c) < 0x20:
                    raise ParseError("SYNTAX", f"control character {c!r} in string", line, col)
                if c == "\\":
                    if i + 1 >= n or source[i + 1] not in _ESCAPES:
                        raise ParseError("SYNTAX", "bad escape sequence", line, col)
                    parts.append(_ESCAPES[source[i + 1]])
                    bump(2)
                    continue
                parts.append(c)
                bump()
            tokens.append(Token(STRING, "".join(parts), tl, tc))
            continue
        raise ParseError("SYNTAX", f"unexpected character {c!r}", line, col)
    tokens.append(Token(EOF, "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Shared parser machinery
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def fail(self, message: str, tok: Token, code: str = "SYNTAX"):
        found = tok.value if tok.kind != EOF else "end of input"
        raise ParseError(code, f"{message}, found {found!r}", tok.line, tok.column)

    def expect_punct(self, char: str) -> Token:
        tok = self.next()
        if tok.kind != PUNCT or tok.value != char:
            self.fail(f"expected {char!r}", tok)
        return tok

    def expect_ident(self, what: str = "identifier") -> Token:
        tok = self.next()
        if tok.kind != IDENT:
            self.fail(f"expected {what}", tok)
        return tok

    def expect_string(self, what: str = "string") -> Token:
        tok = self.next()
        if tok.kind != STRING:
            self.fail(f"expected {what}", tok)
        return tok

    def expect_number(self, what: str = "number") -> Token:
        tok = self.next()
        if tok.kind != NUMBER:
            self.fail(f"expected {what}", tok)
        return tok

    def expect_keyword(self, *words: str) -> Token:
        tok = self.next()
        if tok.kind != IDENT or tok.value not in words:
            self.fail("expected " + " or ".join(repr(w) for w in words), tok)
        return tok

    def probability(self, what: str) -> tuple[float, Token]:
        tok = self.expect_number(what)
        value = float(tok.value)
        if not (0.0 <= value <= 1.0):
            raise ParseError("PROB_RANGE", f"{what} {tok.value} is outside [0, 1]", tok.line, tok.column)
        return value, tok

    def id_list(self) -> list[Token]:
        out = [self.expect_ident()]
        while self.peek().kind == PUNCT and self.peek().value == ",":
            self.next()
            out.append(self.expect_ident())
        return out

    def boolean(self) -> bool:
        return self.expect_keyword("true", "false").value == "true"


def _check_node_id(tok: Token) -> str:
    if not ID_PATTERN.match(tok.value):
        raise ParseError("SYNTAX", f"invalid identifier {tok.value!r}", tok.line, tok.column)
    return tok.value


# ---------------------------------------------------------------------------
# Safety-case format
# ---------------------------------------------------------------------------

_NODE_KINDS = {k.value: k for k in NodeKind}

# Canonical attribute order for serialization.
_NODE_ATTR_ORDER = (
    "supported-by",
    "in-context-of",
    "mode",
    "p",
    "cond-p",
    "severity",
    "step",
    "template",
    "prereq",
    "waives",
    "collective",
    "fault-tolerant",
    "monitored",
    "status",
)


def parse_case(source: str) -> SafetyCase:
    """Parse a ``.scase`` text into a SafetyCase.

    Raises ParseError (with a 1-based source position) on the first syntax
    error, duplicate id, dangling reference, or out-of-range probability.
    Structural invariants beyond references are the business of
    ``validate_graph``, so that work-in-progress files still parse.
    """
    p = _Parser(source)
    p.expect_keyword("case")
    title = p.expect_string("case title").value
    p.expect_punct("{")

    macrosystem = ""
    deployment_window = ""
    thresholds: dict[str, float] = {}
    root_tok: Optional[Token] = None
    seen: set[str] = set()
    while not (p.peek().kind == PUNCT and p.peek().value == "}"):
        key = p.expect_ident("case attribute")
        p.expect_punct(":")
        if key.value in ("macrosystem", "deployment-window", "root") and key.value in seen:
            raise ParseError("DUPLICATE_ATTR", f"duplicate {key.value!r}", key.line, key.column)
        seen.add(key.value)
        if key.value == "macrosystem":
            macrosystem = p.expect_string().value
        elif key.value == "deployment-window":
            deployment_window = p.expect_string().value
        elif key.value == "threshold":
            sev = p.expect_ident("severity name")
            if sev.value in thresholds:
                raise ParseError("DUPLICATE_ATTR", f"duplicate threshold for {sev.value!r}", sev.line, sev.column)
            value, _ = p.probability("threshold")
            thresholds[sev.value] = value
        elif key.value == "root":
            root_tok = p.expect_ident("root node id")
        else:
            p.fail("expected case attribute", key)
        p.expect_punct(";")
    p.expect_punct("}")
    if root_tok is None:
        tok = p.peek()
        raise ParseError("MISSING_ROOT", "case header declares no root", tok.line, tok.column)

    nodes: dict[str, GsnNode] = {}
    support_edges: list[tuple[str, str]] = []
    context_edges: list[tuple[str, str]] = []
    refs: list[Token] = [root_tok]

    while p.peek().kind != EOF:
        kind_tok = p.expect_keyword(*_NODE_KINDS)
        kind = _NODE_KINDS[kind_tok.value]
        id_tok = p.expect_ident("node id")
        nid = _check_node_id(id_tok)
        if nid in nodes:
            raise ParseError("DUPLICATE_ID", f"duplicate node id {nid!r}", id_tok.line, id_tok.column)
        statement = p.expect_string("node statement").value
        p.expect_punct("{")

        attrs: dict[str, object] = {}
        while not (p.peek().kind == PUNCT and p.peek().value == "}"):
            key = p.expect_ident("node attribute")
            p.expect_punct(":")
            name = key.value
            if name in attrs:
                raise ParseError("DUPLICATE_ATTR", f"duplicate {name!r}", key.line, key.column)
            if name in ("supported-by", "in-context-of", "prereq", "waives", "collective"):
                toks = p.id_list()
                refs.extend(toks if name in ("supported-by", "in-context-of") else [])
                attrs[name] = [t.value for t in toks]
            elif name == "mode":
                attrs[name] = Mode(p.expect_keyword("conjunctive", "disjunctive").value)
            elif name in ("p", "cond-p"):
                attrs[name], _ = p.probability(name)
            elif name == "severity":
                attrs[name] = p.expect_ident("severity name").value
            elif name == "step":
                tok = p.expect_number("step")
                value = float(tok.value)
                if value != int(value) or int(value) not in range(1, 7):
                    raise ParseError("STEP_RANGE", f"step {tok.value} is outside 1..6", tok.line, tok.column)
                attrs[name] = int(value)
            elif name == "template":
                attrs[name] = p.expect_ident("template id").value
            elif name == "status":
                attrs[name] = NodeStatus(p.expect_keyword("active", "invalidated").value)
            elif name in ("monitored", "fault-tolerant"):
                attrs[name] = p.boolean()
            else:
                p.fail("expected node attribute", key)
            p.expect_punct(";")
        p.expect_punct("}")

        nodes[nid] = GsnNode(
            id=nid,
            kind=kind,
            statement=statement,
            leaf_p=attrs.get("p"),
            cond_p=attrs.get("cond-p"),
            mode=attrs.get("mode", Mode.CONJUNCTIVE),
            severity=attrs.get("severity"),
            step=attrs.get("step"),
            template=attrs.get("template"),
            status=attrs.get("status", NodeStatus.ACTIVE),
            monitored=attrs.get("monitored", False),
            prereqs=tuple(attrs.get("prereq", ())),
            waives=tuple(attrs.get("waives", ())),
            collective=tuple(attrs.get("collective", ())),
            fault_tolerant=attrs.get("fault-tolerant", False),
        )
        for child in attrs.get("supported-by", ()):
            support_edges.append((nid, child))
        for annotation in attrs.get("in-context-of", ()):
            context_edges.append((nid, annotation))

    for tok in refs:
        if tok.value not in nodes:
            raise ParseError("UNKNOWN_REFERENCE", f"reference to undeclared node {tok.value!r}", tok.line, tok.column)

    return SafetyCase(
        title=title,
        macrosystem=macrosystem,
        deployment_window=deployment_window,
        thresholds=thresholds,
        nodes=nodes,
        support_edges=support_edges,
        context_edges=context_edges,
        root=root_tok.value,
    )


def _quote(text: str) -> str:
    out = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


def _num(value: float) -> str:
    # repr() is the shortest decimal that round-trips a double.
    return repr(float(value))


def serialize_case(case: SafetyCase) -> str:
    """Render a validated case in canonical form (see module docstring)."""
    findings = validate_graph(case)
    if any(f.severity is FindingSeverity.ERROR for f in findings):
        first = next(f for f in findings if f.severity is FindingSeverity.ERROR)
        raise GraphError("INVALID_CASE", f"cannot serialize: {first.code}: {first.message}")

    lines: list[str] = []
    lines.append(f"case {_quote(case.title)} {{")
    if case.macrosystem:
        lines.append(f"  macrosystem: {_quote(case.macrosystem)};")
    if case.deployment_window:
        lines.append(f"  deployment-window: {_quote(case.deployment_window)};")
    for sev in sorted(case.thresholds):
        lines.append(f"  threshold: {sev} {_num(case.thresholds[sev])};")
    lines.append(f"  root: {case.root};")
    lines.append("}")

    for nid in canonical_order(case):
        node = case.nodes[nid]
        lines.append("")
        lines.append(f"{node.kind.value} {nid} {_quote(node.statement)} {{")
        children = case.support_children(nid)
        if children:
            lines.append(f"  supported-by: {', '.join(children)};")
        annotations = sorted(case.annotations(nid))
        if annotations:
            lines.append(f"  in-context-of: {', '.join(annotations)};")
        if node.mode is Mode.DISJUNCTIVE:
            lines.append("  mode: disjunctive;")
        if node.leaf_p is not None:
            lines.append(f"  p: {_num(node.leaf_p)};")
        if node.cond_p is not None:
            lines.append(f"  cond-p: {_num(node.cond_p)};")
        if node.severity is not None:
            lines.append(f"  severity: {node.severity};")
        if node.step is not None:
            lines.append(f"  step: {node.step};")
        if node.template is not None:
            lines.append(f"  template: {node.template};")
        if node.prereqs:
            lines.append(f"  prereq: {', '.join(node.prereqs)};")
        if node.waives:
            lines.append(f"  waives: {', '.join(node.waives)};")
        if node.collective:
            lines.append(f"  collective: {', '.join(node.collective)};")
        if node.fault_tolerant:
            lines.append("  fault-tolerant: true;")
        if node.monitored:
            lines.append("  monitored: true;")
        if node.status is NodeStatus.INVALIDATED:
            lines.append("  status: invalidated;")
        lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Challenge (risk-case) format
# ---------------------------------------------------------------------------


class ChallengeStatus(enum.Enum):
    OPEN = "open"
    REBUTTED = "rebutted"
    CONCEDED = "conceded"


@dataclass(frozen=True)
class Challenge:
    """One adversarial claim filed against a node of a safety case."""

    id: str
    target: str
    claim: str
    status: ChallengeStatus = ChallengeStatus.OPEN
    rebuttal: Optional[str] = None


@dataclass(frozen=True)
class ChallengeSet:
    case_title: str
    challenges: tuple[Challenge, ...] = ()


def parse_challenges(source: str) -> ChallengeSet:
    """Parse a ``.schal`` text; declaration order of challenges is preserved."""
    p = _Parser(source)
    p.expect_keyword("challenges")
    case_title = p.expect_string("case title").value
    p.expect_punct("{")
    p.expect_punct("}")

    challenges: list[Challenge] = []
    seen: set[str] = set()
    while p.peek().kind != EOF:
        p.expect_keyword("challenge")
        id_tok = p.expect_ident("challenge id")
        cid = _check_node_id(id_tok)
        if cid in seen:
            raise ParseError("DUPLICATE_ID", f"duplicate challenge id {cid!r}", id_tok.line, id_tok.column)
        seen.add(cid)
        claim = p.expect_string("challenge claim").value
        p.expect_punct("{")
        target: Optional[str] = None
        status = ChallengeStatus.OPEN
        status_tok: Optional[Token] = None
        rebuttal: Optional[str] = None
        attrs: set[str] = set()
        while not (p.peek().kind == PUNCT and p.peek().value == "}"):
            key = p.expect_ident("challenge attribute")
            p.expect_punct(":")
            if key.value in attrs:
                raise ParseError("DUPLICATE_ATTR", f"duplicate {key.value!r}", key.line, key.column)
            attrs.add(key.value)
            if key.value == "target":
                target = p.expect_ident("target node id").value
            elif key.value == "status":
                status_tok = p.expect_keyword("open", "rebutted", "conceded")
                status = ChallengeStatus(status_tok.value)
            elif key.value == "rebuttal":
                rebuttal = p.expect_string().value
            else:
                p.fail("expected challenge attribute", key)
            p.expect_punct(";")
        close = p.expect_punct("}")
        if target is None:
            raise ParseError("MISSING_TARGET", f"challenge {cid} declares no target", id_tok.line, id_tok.column)
        if status is ChallengeStatus.REBUTTED and not rebuttal:
            tok = status_tok or close
            raise ParseError("MISSING_REBUTTAL", f"challenge {cid} is rebutted without a rebuttal", tok.line, tok.column)
        challenges.append(Challenge(id=cid, target=target, claim=claim, status=status, rebuttal=rebuttal))

    return ChallengeSet(case_title=case_title, challenges=tuple(challenges))


def serialize_challenges(challenge_set: ChallengeSet) -> str:
    """Canonical ``.schal`` form; challenge order is semantic and preserved."""
    lines = [f"challenges {_quote(challenge_set.case_title)} {{ }}"]
    for ch in challenge_set.challenges:
        lines.append("")
        lines.append(f"challenge {ch.id} {_quote(ch.claim)} {{")
        lines.append(f"  target: {ch.target};")
        lines.append(f"  status: {ch.status.value};")
        if ch.rebuttal is not None:
            lines.append(f"  rebuttal: {_quote(ch.rebuttal)};")
        lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Risk-matrix format
# ---------------------------------------------------------------------------


class CellVerdict(enum.Enum):
    ACCEPTABLE = "acceptable"
    REVIEW = "review"
    UNACCEPTABLE = "unacceptable"


_VERDICT_RANK = {CellVerdict.ACCEPTABLE: 0, CellVerdict.REVIEW: 1, CellVerdict.UNACCEPTABLE: 2}


@dataclass(frozen=True)
class RiskMatrix:
    """Severity x likelihood acceptability grid.

    ``likelihood_levels`` are (name, upper probability bound) pairs with
    strictly increasing bounds ending at 1; ``severity_levels`` run from
    least to most severe.  A probability classifies as the first level whose
    bound is >= the probability.
    """

    name: str
    likelihood_levels: tuple[tuple[str, float], ...]
    severity_levels: tuple[str, ...]
    grid: dict[tuple[str, str], CellVerdict] = field(default_factory=dict)

    def likelihood_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.likelihood_levels)


def parse_matrix(source: str) -> RiskMatrix:
    """Parse a ``.smatrix`` text into a complete, monotone-bounded matrix."""
    p = _Parser(source)
    p.expect_keyword("matrix")
    name = p.expect_string("matrix name").value
    open_tok = p.expect_punct("{")

    levels: list[tuple[str, float]] = []
    level_toks: list[Token] = []
    severities: list[str] = []
    rows: dict[str, list[CellVerdict]] = {}
    row_toks: dict[str, Token] = {}

    while not (p.peek().kind == PUNCT and p.peek().value == "}"):
        key = p.expect_ident("matrix attribute")
        p.expect_punct(":")
        if key.value == "likelihood":
            lname = p.expect_ident("likelihood name")
            if lname.value in (n for n, _ in levels):
                raise ParseError("DUPLICATE_ID", f"duplicate likelihood {lname.value!r}", lname.line, lname.column)
            bound, btok = p.probability("likelihood bound")
            levels.append((lname.value, bound))
            level_toks.append(btok)
        elif key.value == "severity":
            if severities:
                raise ParseError("DUPLICATE_ATTR", "duplicate severity list", key.line, key.column)
            toks = p.id_list()
            for t in toks:
                if t.value in severities:
                    raise ParseError("DUPLICATE_ID", f"duplicate severity {t.value!r}", t.line, t.column)
                severities.append(t.value)
        elif key.value == "row":
            sev = p.expect_ident("severity name")
            if sev.value in rows:
                raise ParseError("DUPLICATE_ATTR", f"duplicate row for {sev.value!r}", sev.line, sev.column)
            verdicts: list[CellVerdict] = []
            while p.peek().kind == IDENT:
                verdicts.append(CellVerdict(p.expect_keyword("acceptable", "review", "unacceptable").value))
            rows[sev.value] = verdicts
            row_toks[sev.value] = sev
        else:
            p.fail("expected matrix attribute", key)
        p.expect_punct(";")
    close = p.expect_punct("}")

    if not levels or not severities:
        raise ParseError("INCOMPLETE_GRID", "matrix needs likelihood levels and a severity list", open_tok.line, open_tok.column)
    for i in range(1, len(levels)):
        if levels[i][1] <= levels[i - 1][1]:
            tok = level_toks[i]
            raise ParseError("NONMONOTONE_BOUNDS", "likelihood bounds must be strictly increasing", tok.line, tok.column)
    if levels[-1][1] != 1.0:
        tok = level_toks[-1]
        raise ParseError("LAST_BOUND", "last likelihood bound must be 1", tok.line, tok.column)

    for sev in rows:
        if sev not in severities:
            tok = row_toks[sev]
            raise ParseError("UNKNOWN_REFERENCE", f"row names unknown severity {sev!r}", tok.line, tok.column)
    grid: dict[tuple[str, str], CellVerdict] = {}
    for sev in severities:
        if sev not in rows:
            raise ParseError("INCOMPLETE_GRID", f"no row for severity {sev!r}", close.line, close.column)
        verdicts = rows[sev]
        if len(verdicts) < len(levels):
            tok = row_toks[sev]
            raise ParseError("INCOMPLETE_GRID", f"row {sev!r} has {len(verdicts)} cells, expected {len(levels)}", tok.line, tok.column)
        if len(verdicts) > len(levels):
            tok = row_toks[sev]
            raise ParseError("GRID_SHAPE", f"row {sev!r} has {len(verdicts)} cells, expected {len(levels)}", tok.line, tok.column)
        for (lname, _), verdict in zip(levels, verdicts):
            grid[(sev, lname)] = verdict

    return RiskMatrix(
        name=name,
        likelihood_levels=tuple(levels),
        severity_levels=tuple(severities),
        grid=grid,
    )


def serialize_matrix(matrix: RiskMatrix) -> str:
    """Canonical ``.smatrix`` form: levels, severity list, then one row each."""
    lines = [f"matrix {_quote(matrix.name)} {{"]
    for lname, bound in matrix.likelihood_levels:
        lines.append(f"  likelihood: {lname} {_num(bound)};")
    lines.append(f"  severity: {', '.join(matrix.severity_levels)};")
    for sev in matrix.severity_levels:
        cells = " ".join(matrix.grid[(sev, lname)].value for lname in matrix.likelihood_names())
        lines.append(f"  row: {sev} {cells};")
    lines.append("}")
    return "\n".join(lines) + "\n"

"""AST, concrete syntax and normalisation for ALCH• knowledge bases.

Concrete syntax, one axiom per line::

    concepts: A, B          # optional declarations
    roles: r, s
    individuals: a, b
    tbox:
    some s.B [= *A
    rbox: *r [= s
    abox:
    *r(a,b)
    B(b)

Connectives: ``~`` (not), ``&`` (and), ``|`` (or), ``*`` (typicality),
``all r.C``, ``some r.C``, ``top``, ``bottom``.  ``&`` binds tighter than
``|``; prefix operators and quantifiers bind tightest, so the body of
``some r.C`` is a single unary expression (use parentheses otherwise).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

__all__ = [
    "Role", "TypRole", "NegRole", "RoleExpr",
    "Atom", "Top", "Bottom", "Not", "And", "Or", "All", "Some", "Typ", "ConceptExpr",
    "GCI", "RIA", "ConceptAssertion", "RoleAssertion", "Axiom",
    "Signature", "KnowledgeBase", "ParseError",
    "parse_kb", "parse_query", "parse_concept", "parse_role",
    "format_concept", "format_role", "format_axiom", "format_kb",
    "normalize", "normalize_role", "normalize_axiom", "normalize_kb",
    "TOP_NAME",
]

# Reserved concept name used to compile away top/bottom.  User names must
# start with a letter, so it can never clash.
TOP_NAME = "_T0"


# ---------------------------------------------------------------- roles

@dataclass(frozen=True)
class Role:
    name: str

    def __str__(self):
        return format_role(self)


@dataclass(frozen=True)
class TypRole:
    inner: "RoleExpr"

    def __str__(self):
        return format_role(self)


@dataclass(frozen=True)
class NegRole:
    inner: "RoleExpr"

    def __str__(self):
        return format_role(self)


RoleExpr = Union[Role, TypRole, NegRole]


# ------------------------------------------------------------- concepts

@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self):
        return format_concept(self)


@dataclass(frozen=True)
class Top:
    def __str__(self):
        return "top"


@dataclass(frozen=True)
class Bottom:
    def __str__(self):
        return "bottom"


@dataclass(frozen=True)
class Not:
    inner: "ConceptExpr"

    def __str__(self):
        return format_concept(self)


@dataclass(frozen=True)
class And:
    left: "ConceptExpr"
    right: "ConceptExpr"

    def __str__(self):
        return format_concept(self)


@dataclass(frozen=True)
class Or:
    left: "ConceptExpr"
    right: "ConceptExpr"

    def __str__(self):
        return format_concept(self)


@dataclass(frozen=True)
class All:
    role: RoleExpr
    concept: "ConceptExpr"

    def __str__(self):
        return format_concept(self)


@dataclass(frozen=True)
class Some:
    role: RoleExpr
    concept: "ConceptExpr"

    def __str__(self):
        return format_concept(self)


@dataclass(frozen=True)
class Typ:
    inner: "ConceptExpr"

    def __str__(self):
        return format_concept(self)


ConceptExpr = Union[Atom, Top, Bottom, Not, And, Or, All, Some, Typ]


# --------------------------------------------------------------- axioms

@dataclass(frozen=True)
class GCI:
    lhs: ConceptExpr
    rhs: ConceptExpr

    def __str__(self):
        return format_axiom(self)


@dataclass(frozen=True)
class RIA:
    lhs: RoleExpr
    rhs: RoleExpr

    def __str__(self):
        return format_axiom(self)


@dataclass(frozen=True)
class ConceptAssertion:
    individual: str
    concept: ConceptExpr

    def __str__(self):
        return format_axiom(self)


@dataclass(frozen=True)
class RoleAssertion:
    individuals: tuple[str, str]
    role: RoleExpr

    def __str__(self):
        return format_axiom(self)


Axiom = Union[GCI, RIA, ConceptAssertion, RoleAssertion]


@dataclass(frozen=True)
class Signature:
    concepts: frozenset = frozenset()
    roles: frozenset = frozenset()
    individuals: frozenset = frozenset()

    def union(self, other: "Signature") -> "Signature":
        return Signature(self.concepts | other.concepts,
                         self.roles | other.roles,
                         self.individuals | other.individuals)


@dataclass(frozen=True)
class KnowledgeBase:
    tbox: tuple = ()
    rbox: tuple = ()
    abox: tuple = ()
    signature: Signature = field(default_factory=Signature)

    @classmethod
    def of(cls, *axioms: Axiom, signature: Optional[Signature] = None) -> "KnowledgeBase":
        """Build a KB from loose axioms, sorting them into boxes."""
        tbox = tuple(a for a in axioms if isinstance(a, GCI))
        rbox = tuple(a for a in axioms if isinstance(a, RIA))
        abox = tuple(a for a in axioms if isinstance(a, (ConceptAssertion, RoleAssertion)))
        sig = signature_of(*axioms)
        if signature is not None:
            sig = sig.union(signature)
        return cls(tbox, rbox, abox, sig)

    @property
    def axioms(self) -> tuple:
        return self.tbox + self.rbox + self.abox

    def __str__(self):
        return format_kb(self)


# ------------------------------------------------------------ signature

def _role_names(r: RoleExpr) -> Iterator[str]:
    while not isinstance(r, Role):
        r = r.inner
    yield r.name


def _concept_names(c: ConceptExpr, concepts: set, roles: set) -> None:
    if isinstance(c, Atom):
        concepts.add(c.name)
    elif isinstance(c, (Not, Typ)):
        _concept_names(c.inner, concepts, roles)
    elif isinstance(c, (And, Or)):
        _concept_names(c.left, concepts, roles)
        _concept_names(c.right, concepts, roles)
    elif isinstance(c, (All, Some)):
        roles.update(_role_names(c.role))
        _concept_names(c.concept, concepts, roles)


def signature_of(*axioms: Axiom) -> Signature:
    """Names used by the given axioms."""
    concepts: set = set()
    roles: set = set()
    individuals: set = set()
    for ax in axioms:
        if isinstance(ax, GCI):
            _concept_names(ax.lhs, concepts, roles)
            _concept_names(ax.rhs, concepts, roles)
        elif isinstance(ax, RIA):
            roles.update(_role_names(ax.lhs))
            roles.update(_role_names(ax.rhs))
        elif isinstance(ax, ConceptAssertion):
            individuals.add(ax.individual)
            _concept_names(ax.concept, concepts, roles)
        elif isinstance(ax, RoleAssertion):
            individuals.update(ax.individuals)
            roles.update(_role_names(ax.role))
    return Signature(frozenset(concepts), frozenset(roles), frozenset(individuals))


# -------------------------------------------------------------- printing

def format_role(r: RoleExpr) -> str:
    if isinstance(r, Role):
        return r.name
    if isinstance(r, TypRole):
        return "*" + format_role(r.inner)
    if isinstance(r, NegRole):
        return "~" + format_role(r.inner)
    raise TypeError(f"not a role expression: {r!r}")


def format_concept(c: ConceptExpr, level: int = 0) -> str:
    """Render ``c``; ``level`` is the binding strength of the context
    (0 top, 1 inside ``|``, 2 inside ``&``, 3 under a prefix operator)."""
    if isinstance(c, Atom):
        return c.name
    if isinstance(c, Top):
        return "top"
    if isinstance(c, Bottom):
        return "bottom"
    if isinstance(c, Not):
        return "~" + format_concept(c.inner, 3)
    if isinstance(c, Typ):
        return "*" + format_concept(c.inner, 3)
    if isinstance(c, All):
        return f"all {format_role(c.role)}.{format_concept(c.concept, 3)}"
    if isinstance(c, Some):
        return f"some {format_role(c.role)}.{format_concept(c.concept, 3)}"
    if isinstance(c, Or):
        text = f"{format_concept(c.left, 1)} | {format_concept(c.right, 2)}"
        return f"({text})" if level > 1 else text
    if isinstance(c, And):
        text = f"{format_concept(c.left, 2)} & {format_concept(c.right, 3)}"
        return f"({text})" if level > 2 else text
    raise TypeError(f"not a concept expression: {c!r}")


def _format_applied(c: ConceptExpr) -> str:
    # an application binds looser than everything, but compound concepts are
    # parenthesised so the printed form reads naturally
    if isinstance(c, (And, Or, All, Some)):
        return f"({format_concept(c)})"
    return format_concept(c)


def format_axiom(ax: Axiom) -> str:
    if isinstance(ax, GCI):
        return f"{format_concept(ax.lhs)} [= {format_concept(ax.rhs)}"
    if isinstance(ax, RIA):
        return f"{format_role(ax.lhs)} [= {format_role(ax.rhs)}"
    if isinstance(ax, ConceptAssertion):
        return f"{_format_applied(ax.concept)}({ax.individual})"
    if isinstance(ax, RoleAssertion):
        a, b = ax.individuals
        return f"{format_role(ax.role)}({a},{b})"
    raise TypeError(f"not an axiom: {ax!r}")


def format_kb(kb: KnowledgeBase) -> str:
    lines = []
    for header, box in (("tbox:", kb.tbox), ("rbox:", kb.rbox), ("abox:", kb.abox)):
        if box:
            lines.append(header)
            lines.extend(format_axiom(ax) for ax in box)
    return "\n".join(lines) + ("\n" if lines else "")


# --------------------------------------------------------------- parsing

class ParseError(ValueError):
    """Syntax or signature error, with 1-based source position."""

    def __init__(self, message: str, line: int = 0, column: int = 0,
                 expected: tuple = ()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<incl>\[=)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<punct>[~&|*.(),])
""", re.VERBOSE)

_KEYWORDS = {"all", "some", "top", "bottom"}


@dataclass(frozen=True)
class _Tok:
    kind: str      # 'ident', 'kw', 'incl', one of the punctuation chars, or 'eof'
    text: str
    line: int
    column: int


def _tokenize(text: str, line: int, col0: int = 1) -> list:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        value = m.group()
        if kind == "ident" and value in _KEYWORDS:
            toks.append(_Tok("kw", value, line, col0 + pos))
        elif kind == "ident":
            toks.append(_Tok("ident", value, line, col0 + pos))
        elif kind == "incl":
            toks.append(_Tok("incl", value, line, col0 + pos))
        elif kind == "punct":
            toks.append(_Tok(value, value, line, col0 + pos))
        pos = m.end()
    toks.append(_Tok("eof", "", line, col0 + len(text)))
    return toks


# Intermediate forms produced by the line parser before boxes are resolved.
@dataclass(frozen=True)
class _Inclusion:
    lhs: ConceptExpr
    rhs: ConceptExpr
    line: int


@dataclass(frozen=True)
class _Applied:
    expr: ConceptExpr
    args: tuple
    line: int
    column: int


class _LineParser:
    def __init__(self, toks: list):
        self.toks = toks
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, *expected: str):
        t = self.tok
        got = "end of line" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"expected {' or '.join(expected)}, got {got}",
                         t.line, t.column, expected)

    def take(self, kind: str, *expected: str) -> _Tok:
        if self.tok.kind != kind:
            self.error(*(expected or (kind,)))
        t = self.tok
        self.i += 1
        return t

    def accept(self, kind: str, text: Optional[str] = None) -> bool:
        if self.tok.kind == kind and (text is None or self.tok.text == text):
            self.i += 1
            return True
        return False

    # role ::= ident | '*' role | '~' role | '(' role ')'
    def role(self) -> RoleExpr:
        if self.accept("*"):
            return TypRole(self.role())
        if self.accept("~"):
            return NegRole(self.role())
        if self.accept("("):
            r = self.role()
            self.take(")", "')'")
            return r
        return Role(self.take("ident", "role name").text)

    # concept ::= conj ('|' conj)*
    def concept(self) -> ConceptExpr:
        c = self.conj()
        while self.accept("|"):
            c = Or(c, self.conj())
        return c

    def conj(self) -> ConceptExpr:
        c = self.unary()
        while self.accept("&"):
            c = And(c, self.unary())
        return c

    def unary(self) -> ConceptExpr:
        t = self.tok
        if self.accept("~"):
            return Not(self.unary())
        if self.accept("*"):
            return Typ(self.unary())
        if t.kind == "kw" and t.text in ("all", "some"):
            self.i += 1
            r = self.role()
            self.take(".", "'.'")
            body = self.unary()
            return All(r, body) if t.text == "all" else Some(r, body)
        if self.accept("kw", "top"):
            return Top()
        if self.accept("kw", "bottom"):
            return Bottom()
        if self.accept("("):
            c = self.concept()
            self.take(")", "')'")
            return c
        if t.kind == "ident":
            self.i += 1
            return Atom(t.text)
        self.error("concept", "'('", "'~'", "'*'", "'all'", "'some'")

    def axiom(self):
        start = self.tok
        lhs = self.concept()
        if self.tok.kind == "incl":
            self.i += 1
            rhs = self.concept()
            if self.tok.kind == "incl":
                self.error("end of line")
            self.take("eof", "end of line")
            return _Inclusion(lhs, rhs, start.line)
        if self.tok.kind == "(":
            paren = self.tok
            self.i += 1
            args = [self.take("ident", "individual name").text]
            if self.accept(","):
                args.append(self.take("ident", "individual name").text)
            self.take(")", "')'")
            self.take("eof", "end of line")
            return _Applied(lhs, tuple(args), paren.line, paren.column)
        self.error("'[='", "'('")


def _as_role(c: ConceptExpr, line: int = 0, column: int = 0) -> RoleExpr:
    """Reinterpret a role-shaped concept parse as a role expression."""
    if isinstance(c, Atom):
        return Role(c.name)
    if isinstance(c, Typ):
        return TypRole(_as_role(c.inner, line, column))
    if isinstance(c, Not):
        return NegRole(_as_role(c.inner, line, column))
    raise ParseError(f"not a role expression: {format_concept(c)}", line, column)


def _role_shaped(c: ConceptExpr) -> bool:
    while isinstance(c, (Typ, Not)):
        c = c.inner
    return isinstance(c, Atom)


def _atom_names(c: ConceptExpr) -> set:
    concepts: set = set()
    _concept_names(c, concepts, set())
    return concepts


_SECTION_RE = re.compile(r"^\s*(tbox|rbox|abox|concepts|roles|individuals)\s*:")


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _resolve(raw, section: Optional[str], role_names: set):
    """Turn a raw line parse into an Axiom, honouring the section it sits in."""
    if isinstance(raw, _Applied):
        if len(raw.args) == 2:
            return RoleAssertion(raw.args, _as_role(raw.expr, raw.line, raw.column))
        return ConceptAssertion(raw.args[0], raw.expr)
    is_ria = section == "rbox" or (
        section is None
        and _role_shaped(raw.lhs) and _role_shaped(raw.rhs)
        and (_atom_names(raw.lhs) | _atom_names(raw.rhs)) & role_names)
    if is_ria:
        return RIA(_as_role(raw.lhs, raw.line), _as_role(raw.rhs, raw.line))
    return GCI(raw.lhs, raw.rhs)


def _check_names(axioms, declared: dict, strict: bool, lines: list) -> Signature:
    sig = signature_of(*axioms)
    kinds = {}
    for kind, names in (("concept", sig.concepts), ("role", sig.roles),
                        ("individual", sig.individuals)):
        for n in names:
            if n in kinds:
                raise ParseError(f"name {n!r} used both as {kinds[n]} and {kind}")
            kinds[n] = kind
    for n, kind in declared.items():
        if n in kinds and kinds[n] != kind:
            raise ParseError(f"name {n!r} declared as {kind} but used as {kinds[n]}")
    if strict:
        for ax, line in zip(axioms, lines):
            s = signature_of(ax)
            for n in sorted(s.concepts | s.roles | s.individuals):
                if n not in declared:
                    raise ParseError(f"undeclared name {n!r}", line, 1)
    by_kind = {"concept": set(sig.concepts), "role": set(sig.roles),
               "individual": set(sig.individuals)}
    for n, kind in declared.items():
        by_kind[kind].add(n)
    return Signature(frozenset(by_kind["concept"]), frozenset(by_kind["role"]),
                     frozenset(by_kind["individual"]))


def parse_kb(text: str, strict: bool = False) -> KnowledgeBase:
    """Parse a knowledge base file.

    Raises ParseError on syntax errors, duplicate declarations, names used
    with two kinds, or (when ``strict``) undeclared names.
    """
    declared: dict = {}
    decl_kind = {"concepts": "concept", "roles": "role", "individuals": "individual"}
    section = None
    raws = []   # (raw, section, line)
    for lineno, full in enumerate(text.splitlines(), start=1):
        line = _strip_comment(full)
        col0 = 1
        m = _SECTION_RE.match(line)
        if m:
            key = m.group(1)
            rest = line[m.end():]
            col0 = m.end() + 1
            if key in decl_kind:
                for tok in _tokenize(rest, lineno, col0):
                    if tok.kind == "ident":
                        if tok.text in declared:
                            raise ParseError(f"duplicate declaration of {tok.text!r}",
                                             lineno, tok.column)
                        declared[tok.text] = decl_kind[key]
                    elif tok.kind not in (",", "eof"):
                        raise ParseError(f"expected name, got {tok.text!r}",
                                         lineno, tok.column, ("name",))
                continue
            section = key
            line = rest
        if not line.strip():
            continue
        raw = _LineParser(_tokenize(line, lineno, col0)).axiom()
        if section == "abox" and not isinstance(raw, _Applied):
            raise ParseError("expected an assertion in abox", lineno, col0)
        if section in ("tbox", "rbox") and not isinstance(raw, _Inclusion):
            raise ParseError(f"expected an inclusion in {section}", lineno, col0)
        raws.append((raw, section, lineno))

    role_names = {n for n, k in declared.items() if k == "role"}
    for raw, sec, _ in raws:
        if isinstance(raw, _Applied) and len(raw.args) == 2:
            role_names |= _atom_names(raw.expr)
        elif isinstance(raw, _Inclusion):
            r: set = set()
            _concept_names(raw.lhs, set(), r)
            _concept_names(raw.rhs, set(), r)
            role_names |= r
            if sec == "rbox":
                role_names |= _atom_names(raw.lhs) | _atom_names(raw.rhs)
        elif isinstance(raw, _Applied):
            r = set()
            _concept_names(raw.expr, set(), r)
            role_names |= r

    axioms = [_resolve(raw, sec, role_names) for raw, sec, _ in raws]
    sig = _check_names(axioms, declared, strict, [ln for _, _, ln in raws])
    tbox = tuple(a for a in axioms if isinstance(a, GCI))
    rbox = tuple(a for a in axioms if isinstance(a, RIA))
    abox = tuple(a for a in axioms if isinstance(a, (ConceptAssertion, RoleAssertion)))
    return KnowledgeBase(tbox, rbox, abox, sig)


def parse_query(text: str, signature: Optional[Signature] = None) -> Axiom:
    """Parse exactly one axiom.  ``signature`` disambiguates ``r [= s``
    (an inclusion between known role names is read as a role inclusion)."""
    lines = [ln for ln in (_strip_comment(x) for x in text.splitlines()) if ln.strip()]
    if len(lines) != 1:
        raise ParseError(f"expected exactly one axiom, got {len(lines)}")
    m = _SECTION_RE.match(lines[0])
    section = None
    line = lines[0]
    if m and m.group(1) in ("tbox", "rbox", "abox"):
        section = m.group(1)
        line = line[m.end():]
    raw = _LineParser(_tokenize(line, 1)).axiom()
    roles = set(signature.roles) if signature is not None else set()
    return _resolve(raw, section, roles)


def parse_concept(text: str) -> ConceptExpr:
    p = _LineParser(_tokenize(text, 1))
    c = p.concept()
    p.take("eof", "end of input")
    return c


def parse_role(text: str) -> RoleExpr:
    p = _LineParser(_tokenize(text, 1))
    r = p.role()
    p.take("eof", "end of input")
    return r


# --------------------------------------------------------- normalisation

def normalize(c: ConceptExpr) -> ConceptExpr:
    """Compile away top/bottom and collapse double negation.

    Negation is otherwise left where it is; the matrix translation has
    native cases for negated compounds.
    """
    if isinstance(c, Top):
        return Or(Atom(TOP_NAME), Not(Atom(TOP_NAME)))
    if isinstance(c, Bottom):
        return And(Atom(TOP_NAME), Not(Atom(TOP_NAME)))
    if isinstance(c, Atom):
        return c
    if isinstance(c, Not):
        inner = normalize(c.inner)
        return inner.inner if isinstance(inner, Not) else Not(inner)
    if isinstance(c, Typ):
        return Typ(normalize(c.inner))
    if isinstance(c, And):
        return And(normalize(c.left), normalize(c.right))
    if isinstance(c, Or):
        return Or(normalize(c.left), normalize(c.right))
    if isinstance(c, All):
        return All(normalize_role(c.role), normalize(c.concept))
    if isinstance(c, Some):
        return Some(normalize_role(c.role), normalize(c.concept))
    raise TypeError(f"not a concept expression: {c!r}")


def normalize_role(r: RoleExpr) -> RoleExpr:
    if isinstance(r, Role):
        return r
    if isinstance(r, TypRole):
        return TypRole(normalize_role(r.inner))
    inner = normalize_role(r.inner)
    return inner.inner if isinstance(inner, NegRole) else NegRole(inner)


def normalize_axiom(ax: Axiom) -> Axiom:
    if isinstance(ax, GCI):
        return GCI(normalize(ax.lhs), normalize(ax.rhs))
    if isinstance(ax, RIA):
        return RIA(normalize_role(ax.lhs), normalize_role(ax.rhs))
    if isinstance(ax, ConceptAssertion):
        return ConceptAssertion(ax.individual, normalize(ax.concept))
    return RoleAssertion(ax.individuals, normalize_role(ax.role))


def normalize_kb(kb: KnowledgeBase) -> KnowledgeBase:
    tbox = tuple(normalize_axiom(a) for a in kb.tbox)
    rbox = tuple(normalize_axiom(a) for a in kb.rbox)
    abox = tuple(normalize_axiom(a) for a in kb.abox)
    sig = kb.signature.union(signature_of(*tbox, *rbox, *abox))
    return KnowledgeBase(tbox, rbox, abox, sig)

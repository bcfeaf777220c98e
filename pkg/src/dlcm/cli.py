"""``dlcm`` command line front end.

Exit status: 0 positive answer, 1 definitive negative, 2 usage or parse
error, 3 inconclusive (a search bound was hit).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from . import __version__
from .calculus import Budget, Verdict, entails, format_connections, format_tree, inconsistent
from .fol import format_formula, pi_axiom, pi_kb
from .kb_syntax import ParseError, parse_kb, parse_query, signature_of
from .matrix import build_query_matrix, delta, format_matrix
from .oracle import MAX_DOMAIN, find_countermodel, find_model, format_interpretation

COMMANDS = ("check", "entail", "matrix", "fol", "oracle")
PROOF_FORMATS = ("connections", "tree", "none")

EXIT_POSITIVE, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3

_EXIT = {
    Verdict.PROVED: EXIT_POSITIVE,
    Verdict.INCONSISTENT: EXIT_POSITIVE,
    Verdict.NOT_PROVED: EXIT_NEGATIVE,
    Verdict.CONSISTENT: EXIT_NEGATIVE,
    Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    kb_path: str
    query_text: Optional[str] = None
    max_copies: int = Budget.max_copies
    max_depth: int = Budget.max_depth
    include_order_axioms: bool = True
    proof_format: str = "connections"
    oracle_domain: int = 2
    strict_signature: bool = False

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.command == "entail" and self.query_text is None:
            raise ConfigError("entail needs --query")
        if self.command == "check" and self.query_text is not None:
            raise ConfigError("check takes no --query")
        if self.proof_format not in PROOF_FORMATS:
            raise ConfigError(f"unknown proof format {self.proof_format!r}")
        if self.max_copies < 1 or self.max_depth < 1:
            raise ConfigError("--max-copies and --max-depth must be positive")
        if not 1 <= self.oracle_domain <= MAX_DOMAIN:
            raise ConfigError(f"--max-domain must be between 1 and {MAX_DOMAIN}")


def run(config: RunConfig) -> tuple:
    """Execute one command; returns ``(exit status, report text)``."""
    config.validate()
    with open(config.kb_path, encoding="utf-8") as fh:
        kb = parse_kb(fh.read(), strict=config.strict_signature)
    query = None
    if config.query_text is not None:
        query = parse_query(config.query_text, kb.signature)
        if config.strict_signature:
            _check_declared(query, kb.signature)
    budget = Budget(config.max_copies, config.max_depth)
    order = config.include_order_axioms

    if config.command == "matrix":
        m = build_query_matrix(kb, query, order) if query is not None else delta(kb, order)
        return EXIT_POSITIVE, format_matrix(m)
    if config.command == "fol":
        lines = ["pi(K) = " + format_formula(pi_kb(kb))]
        if query is not None:
            lines.append("pi(query) = " + format_formula(pi_axiom(query)))
        return EXIT_POSITIVE, "\n".join(lines)
    if config.command == "oracle":
        if query is None:
            o = find_model(kb, config.oracle_domain)
            head = "model" if o else f"no model up to domain size {config.oracle_domain}"
        else:
            o = find_countermodel(kb, query, config.oracle_domain)
            head = "countermodel" if o else f"no countermodel up to domain size {config.oracle_domain}"
        body = [head] + ([format_interpretation(o)] if o else [])
        return (EXIT_POSITIVE if o else EXIT_NEGATIVE), "\n".join(body)

    if config.command == "check":
        result = inconsistent(kb, budget, order)
    else:
        result = entails(kb, query, budget, order)
    lines = [result.verdict.value]
    if result.proof is not None and config.proof_format != "none":
        fmt = format_tree if config.proof_format == "tree" else format_connections
        lines.append(fmt(result.proof, result.sigma))
    return _EXIT[result.verdict], "\n".join(lines)


def _check_declared(query, sig) -> None:
    used = signature_of(query)
    for kind, names, known in (("concept", used.concepts, sig.concepts),
                               ("role", used.roles, sig.roles),
                               ("individual", used.individuals, sig.individuals)):
        missing = sorted(names - known)
        if missing:
            raise ParseError(f"undeclared {kind} in query: {', '.join(missing)}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dlcm", description="Connection-method reasoning for ALCH with typicality.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("file", help="knowledge base file")
    p.add_argument("--query", help="axiom to test, e.g. 'A(a)' or '*A [= B'")
    p.add_argument("--max-copies", type=int, default=Budget.max_copies,
                   help="largest per-branch copy bound tried (default %(default)s)")
    p.add_argument("--max-depth", type=int, default=Budget.max_depth,
                   help="maximum active path length (default %(default)s)")
    p.add_argument("--no-order-axioms", action="store_true",
                   help="leave the order clauses out of the matrix")
    p.add_argument("--proof", choices=PROOF_FORMATS, default="connections")
    p.add_argument("--max-domain", type=int, default=2,
                   help=f"largest domain for the oracle (1..{MAX_DOMAIN}, default %(default)s)")
    p.add_argument("--strict", action="store_true", help="reject undeclared names")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig(args.command, args.file, args.query, args.max_copies, args.max_depth,
                       not args.no_order_axioms, args.proof, args.max_domain, args.strict)
    try:
        status, report = run(config)
    except (ConfigError, ParseError, ValueError) as exc:
        print(f"dlcm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"dlcm: error: {exc.strerror or exc}: {config.kb_path}", file=sys.stderr)
        return EXIT_USAGE
    print(report)
    return status


if __name__ == "__main__":
    sys.exit(main())

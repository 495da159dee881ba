"""Line-oriented text format for qualitative models.

::

    # comment
    network haberman
    var age 3
    var class 2
    class class
    edge age -> class q-

The cardinality of a ``var`` may be ``auto``, in which case it is taken
from the ``cardinalities`` mapping passed to the parser (used by the
benchmark corpus, whose state counts depend on the discretisation).
"""

from __future__ import annotations

from typing import Mapping, TextIO

from ..exceptions import DomainError, ModelError, ParseError
from ..model import Edge, MonotoneSign, QualitativeModel, Variable, validate_model

AUTO = "auto"


def _tokens(line: str):
    """Whitespace-separated tokens with 1-based column numbers."""
    col = 0
    out = []
    for piece in line.split():
        col = line.index(piece, col)
        out.append((piece, col + 1))
        col += len(piece)
    return out


def parse_qualitative_model(source: str | TextIO,
                            cardinalities: Mapping[str, int] | None = None) -> QualitativeModel:
    text = source if isinstance(source, str) else source.read()
    name = ""
    class_var = None
    variables: list[Variable] = []
    edges: list[Edge] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        keyword, kcol = toks[0]
        args = toks[1:]

        def expect(n):
            if len(args) != n:
                col = args[n][1] if len(args) > n else len(line.rstrip()) + 1
                raise ParseError(f"'{keyword}' takes {n} argument(s), got {len(args)}",
                                 lineno, col)

        if keyword == "network":
            expect(1)
            name = args[0][0]
        elif keyword == "var":
            expect(2)
            vname, (card_tok, ccol) = args[0][0], args[1]
            if card_tok == AUTO:
                if not cardinalities or vname not in cardinalities:
                    raise ParseError(f"cardinality of {vname!r} is 'auto' but none was supplied",
                                     lineno, ccol)
                card = int(cardinalities[vname])
            else:
                try:
                    card = int(card_tok)
                except ValueError:
                    raise ParseError(f"bad cardinality {card_tok!r}", lineno, ccol) from None
            variables.append(Variable(vname, card))
        elif keyword == "class":
            expect(1)
            class_var = args[0][0]
        elif keyword == "edge":
            expect(4)
            if args[1][0] != "->":
                raise ParseError("expected '->'", lineno, args[1][1])
            try:
                sign = MonotoneSign.parse(args[3][0])
            except DomainError:
                raise ParseError(f"unknown sign {args[3][0]!r} (use q+, q- or none)",
                                 lineno, args[3][1]) from None
            edges.append(Edge(args[0][0], args[2][0], sign))
        else:
            raise ParseError(f"unknown keyword {keyword!r}", lineno, kcol)
    if class_var is None:
        raise ParseError("missing 'class' declaration")
    model = QualitativeModel(tuple(variables), tuple(edges), class_var, name)
    report = validate_model(model)
    if not report.ok:
        raise ModelError(report.violations)
    return model


def format_qualitative_model(model: QualitativeModel) -> str:
    lines = []
    if model.name:
        lines.append(f"network {model.name}")
    lines += [f"var {v.name} {v.cardinality}" for v in model.variables]
    lines.append(f"class {model.class_variable}")
    lines += [f"edge {e.parent} -> {e.child} {e.sign.value}" for e in model.edges]
    return "\n".join(lines) + "\n"

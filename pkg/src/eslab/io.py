"""Text formats (``.es``, ``.labels``) and Graphviz DOT export."""

from __future__ import annotations

from collections.abc import Mapping
from typing import Optional

from eslab.core import EVENT_ID, EventStructure, build
from eslab.domain import DomainPoset
from eslab.errors import DuplicateEvent, EsSyntaxError, UnknownEvent, UnlabelledEvent

ARITY = {"event": 1, "cover": 2, "conflict": 2}


def _tokens(line: str) -> list[tuple[int, str]]:
    """Whitespace-separated tokens with 1-based columns, comments removed."""
    body = line.split("#", 1)[0]
    out = []
    col = 0
    for tok in body.split():
        col = body.index(tok, col)
        out.append((col + 1, tok))
        col += len(tok)
    return out


def parse_es(text: str) -> tuple[list[str], list[tuple[str, str]], list[tuple[str, str]]]:
    """Directive triples ``(events, covers, conflict generators)`` ready for ``build``.

    Ids in ``cover`` and ``conflict`` lines may be declared later in the file.
    """
    events: list[str] = []
    declared: dict[str, int] = {}
    refs: list[tuple[int, int, str]] = []
    covers: list[tuple[str, str]] = []
    conflict: list[tuple[str, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = _tokens(line)
        if not toks:
            continue
        col, word = toks[0]
        if word not in ARITY:
            raise EsSyntaxError(lineno, col, f"unknown directive {word!r}")
        args = toks[1:]
        if len(args) != ARITY[word]:
            where = args[ARITY[word]][0] if len(args) > ARITY[word] else col + len(word)
            raise EsSyntaxError(lineno, where, f"{word!r} takes {ARITY[word]} argument(s), got {len(args)}")
        for c, tok in args:
            if not EVENT_ID.fullmatch(tok):
                raise EsSyntaxError(lineno, c, f"invalid event id {tok!r}")
        ids = [tok for _, tok in args]
        if word == "event":
            (x,) = ids
            if x in declared:
                raise DuplicateEvent(
                    f"line {lineno}: event {x!r} already declared on line {declared[x]}", witness=x
                )
            declared[x] = lineno
            events.append(x)
            continue
        refs.extend((lineno, c, tok) for c, tok in args)
        if word == "cover":
            covers.append((ids[0], ids[1]))
        else:
            if ids[0] == ids[1]:
                raise EsSyntaxError(lineno, args[1][0], f"event {ids[0]!r} in conflict with itself")
            conflict.append((ids[0], ids[1]))
    for lineno, col, tok in refs:
        if tok not in declared:
            raise UnknownEvent(f"line {lineno}, column {col}: undeclared event {tok!r}", witness=tok)
    return events, covers, conflict


def load_es(text: str) -> EventStructure:
    return build(*parse_es(text))


def read_es(path: str) -> EventStructure:
    with open(path, encoding="utf-8") as fh:
        return load_es(fh.read())


def serialize_es(es: EventStructure) -> str:
    """Canonical text: sorted events, sorted covers, then the minimal conflicts."""
    lines = [f"event {x}" for x in es.events]
    lines += [f"cover {p} {c}" for p, c in sorted(es.covers)]
    lines += [f"conflict {a} {b}" for a, b in es.minimal_conflicts()]
    return "".join(line + "\n" for line in lines)


# -- labels ----------------------------------------------------------------------


def parse_labels(text: str) -> dict[str, int]:
    out: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = _tokens(line)
        if not toks:
            continue
        col, word = toks[0]
        if word != "label":
            raise EsSyntaxError(lineno, col, f"expected 'label', got {word!r}")
        if len(toks) != 3:
            raise EsSyntaxError(lineno, col, "'label' takes an event id and a letter index")
        (c1, x), (c2, letter) = toks[1], toks[2]
        if not EVENT_ID.fullmatch(x):
            raise EsSyntaxError(lineno, c1, f"invalid event id {x!r}")
        if not letter.isascii() or not letter.isdigit():
            raise EsSyntaxError(lineno, c2, f"letter index must be a non-negative integer, got {letter!r}")
        if x in out:
            raise DuplicateEvent(f"line {lineno}: second label for {x!r}", witness=x)
        out[x] = int(letter)
    return out


def serialize_labels(lab: Mapping[str, int] | object) -> str:
    assignment = getattr(lab, "assignment", lab)
    return "".join(f"label {x} {assignment[x]}\n" for x in sorted(assignment))


# -- DOT ---------------------------------------------------------------------------


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def maximal_concurrent_pairs(es: EventStructure) -> list[tuple[str, str]]:
    """Concurrent pairs not dominated componentwise by another concurrent pair."""
    pairs = [
        (i, j)
        for i in range(len(es))
        for j in range(i + 1, len(es))
        if es.concurrent(es.events[i], es.events[j])
    ]
    out = []
    for i, j in pairs:
        up_i = es.above_mask(i) | (1 << i)
        up_j = es.above_mask(j) | (1 << j)
        dominated = any(
            (a, b) != (i, j)
            and ((up_i >> a & 1 and up_j >> b & 1) or (up_i >> b & 1 and up_j >> a & 1))
            for a, b in pairs
        )
        if not dominated:
            out.append((es.events[i], es.events[j]))
    return out


def export_dot_graph(es: EventStructure) -> str:
    """Hasse edges dotted, minimal conflicts bold, maximal concurrent pairs solid."""
    lines = ["graph events {", "  node [shape=plaintext];"]
    lines += [f"  {_q(x)};" for x in es.events]
    lines += [f"  {_q(p)} -- {_q(c)} [style=dotted];" for p, c in sorted(es.covers)]
    lines += [f"  {_q(a)} -- {_q(b)} [style=bold];" for a, b in es.minimal_conflicts()]
    lines += [f"  {_q(a)} -- {_q(b)} [style=solid];" for a, b in maximal_concurrent_pairs(es)]
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot_domain(d: DomainPoset, lab: Optional[Mapping[str, int] | object] = None) -> str:
    """Configurations as nodes; each Hasse edge is labelled by its event or its letter."""
    assignment = getattr(lab, "assignment", lab) if lab is not None else None
    if assignment is not None:
        for x in d.events:
            if x not in assignment:
                raise UnlabelledEvent(f"event {x!r} has no label", witness=x)
    lines = ["digraph domain {", "  rankdir=BT;", "  node [shape=box];"]
    for k in range(len(d)):
        members = d.sorted_config(k)
        text = "{" + ",".join(members) + "}" if members else "∅"
        lines.append(f"  c{k} [label={_q(text)}];")
    for (lo, hi), x in zip(d.hasse, d.added):
        tag = str(assignment[x]) if assignment is not None else x
        lines.append(f"  c{lo} -> c{hi} [label={_q(tag)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"

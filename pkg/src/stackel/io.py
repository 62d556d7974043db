"""Canonical JSON encoding of games.

Layout::

    {"graph": "tree", "root": 0, "nodes": [
      {"id": 0, "kind": "leader", "actions": [["l", 1], ["r", 2]]},
      {"id": 1, "kind": "leaf", "u": ["3", "0"]},
      ...
    ]}

Rationals are written as strings (``"p/q"`` or ``"p"``); integers are also
accepted on input. Output is canonical, so serialize(parse(text)) is
byte-identical to text whenever text was produced by serialize.
"""

from __future__ import annotations

import json

from .game import Chance, Concurrent, Follower, Game, Leader, Leaf
from .numeric import format_fraction, to_fraction

KINDS = ("leaf", "leader", "follower", "concurrent", "chance")


class ParseError(ValueError):
    def __init__(self, message: str, position: str):
        super().__init__(f"{position}: {message}")
        self.position = position


def _node_doc(i: int, node) -> dict:
    if isinstance(node, Leaf):
        return {"id": i, "kind": "leaf", "u": [format_fraction(node.u1), format_fraction(node.u2)]}
    if isinstance(node, Leader):
        return {"id": i, "kind": "leader", "actions": [[a, c] for a, c in node.actions]}
    if isinstance(node, Follower):
        return {"id": i, "kind": "follower", "actions": [[a, c] for a, c in node.actions]}
    if isinstance(node, Concurrent):
        return {"id": i, "kind": "concurrent", "rows": list(node.rows),
                "cols": list(node.cols), "cells": list(node.cells)}
    return {"id": i, "kind": "chance",
            "branches": [[format_fraction(p), c] for p, c in node.branches]}


def serialize(game: Game) -> str:
    head = json.dumps({"graph": game.graph, "root": game.root})[:-1]
    lines = [json.dumps(_node_doc(i, nd), ensure_ascii=False) for i, nd in enumerate(game.nodes)]
    return head + ', "nodes": [\n  ' + ",\n  ".join(lines) + "\n]}\n"


def _rational(value, where: str):
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ParseError(f"expected a rational string or integer, got {value!r}", where)
    try:
        return to_fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {value!r} ({exc})", where) from None


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", where)
    return value


def _list(value, where: str) -> list:
    if not isinstance(value, list):
        raise ParseError(f"expected a list, got {type(value).__name__}", where)
    return value


def _actions(doc, where):
    out = []
    for k, pair in enumerate(_list(doc.get("actions"), where + ".actions")):
        w = f"{where}.actions[{k}]"
        if not isinstance(pair, list) or len(pair) != 2 or not isinstance(pair[0], str):
            raise ParseError("expected [label, child]", w)
        out.append((pair[0], _int(pair[1], w + "[1]")))
    return tuple(out)


def parse(text: str) -> Game:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", "$")
    graph = doc.get("graph", "tree")
    if graph not in ("tree", "dag"):
        raise ParseError(f"graph must be 'tree' or 'dag', got {graph!r}", "$.graph")
    root = _int(doc.get("root", 0), "$.root")
    raw = _list(doc.get("nodes"), "$.nodes")
    nodes = [None] * len(raw)
    for k, nd in enumerate(raw):
        where = f"$.nodes[{k}]"
        if not isinstance(nd, dict):
            raise ParseError("node must be an object", where)
        i = _int(nd.get("id"), where + ".id")
        if not 0 <= i < len(raw) or nodes[i] is not None:
            raise ParseError(f"node ids must be dense and unique, got {i}", where + ".id")
        kind = nd.get("kind")
        if kind == "leaf":
            u = _list(nd.get("u"), where + ".u")
            if len(u) != 2:
                raise ParseError("leaf needs exactly two utilities", where + ".u")
            nodes[i] = Leaf(_rational(u[0], where + ".u[0]"), _rational(u[1], where + ".u[1]"))
        elif kind == "leader":
            nodes[i] = Leader(_actions(nd, where))
        elif kind == "follower":
            nodes[i] = Follower(_actions(nd, where))
        elif kind == "concurrent":
            rows = _list(nd.get("rows"), where + ".rows")
            cols = _list(nd.get("cols"), where + ".cols")
            if not all(isinstance(x, str) for x in rows + cols):
                raise ParseError("action labels must be strings", where)
            cells = [_int(c, f"{where}.cells[{j}]")
                     for j, c in enumerate(_list(nd.get("cells"), where + ".cells"))]
            nodes[i] = Concurrent(tuple(rows), tuple(cols), tuple(cells))
        elif kind == "chance":
            branches = []
            for j, pair in enumerate(_list(nd.get("branches"), where + ".branches")):
                w = f"{where}.branches[{j}]"
                if not isinstance(pair, list) or len(pair) != 2:
                    raise ParseError("expected [probability, child]", w)
                branches.append((_rational(pair[0], w + "[0]"), _int(pair[1], w + "[1]")))
            nodes[i] = Chance(tuple(branches))
        else:
            raise ParseError(f"unknown node kind {kind!r} (expected one of {', '.join(KINDS)})",
                             where + ".kind")
    return Game(tuple(nodes), root=root, graph=graph)


def load(path) -> Game:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(game: Game, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(game))

"""
Plain-text readers and writers for graphs and grid discs.

Graph records::

    v <id> [x y]
    e <id> <id> <weight>

Grid records::

    grid h=<h> r=<r> factor=<expr|table>
    f <i> <j> <value>          # one per node when factor=table

Blank lines and ``#`` comments are ignored. Floats are written with their
shortest round-trip representation, so ``write(read(text)) == text`` for text
produced by the writers.
"""

import ast
import logging
import math
import operator
from collections.abc import Callable
from pathlib import Path

import numpy as np

from catlab.exceptions import ValidationError
from catlab.lib.formatters import format_float
from catlab.lib.reports import write_text_atomic
from catlab.spaces.graph import MetricGraph
from catlab.spaces.grid import GridDisc

logger = logging.getLogger(__name__)

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_FUNCS = {
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
    "cosh": np.cosh,
    "sinh": np.sinh,
    "tanh": np.tanh,
    "abs": np.abs,
}
_CONSTS = {"pi": math.pi, "e": math.e}


def compile_factor(expr: str) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """
    Compile a factor expression in ``x``, ``y`` and ``r`` (= |z|).

    Only arithmetic, the functions ``exp log sqrt sin cos sinh cosh tanh abs``
    and the constants ``pi`` and ``e`` are accepted.

    Parameters
    ----------
    expr : str
        Expression such as ``"2/(1-r**2)"``.

    Returns
    -------
    callable
        Vectorized ``factor(x, y)``.

    Raises
    ------
    ValidationError
        If the expression uses anything outside the accepted grammar.

    Examples
    --------
    >>> f = compile_factor("exp(r**2/4)")
    >>> float(f(np.array([0.0]), np.array([0.0]))[0])
    1.0
    """
    try:
        tree = ast.parse(expr.strip(), mode="eval")
    except SyntaxError as e:
        raise ValidationError(f"Invalid factor expression: {expr!r}", {"reason": e.msg}) from e

    def evaluate(node, env):
        if isinstance(node, ast.Expression):
            return evaluate(node.body, env)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id in env:
                return env[node.id]
            if node.id in _CONSTS:
                return _CONSTS[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](evaluate(node.left, env), evaluate(node.right, env))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](evaluate(node.operand, env))
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS
            and len(node.args) == 1
            and not node.keywords
        ):
            return _FUNCS[node.func.id](evaluate(node.args[0], env))
        raise ValidationError(f"Unsupported element in factor expression: {ast.dump(node)}")

    # Validate once on scalars so errors surface at parse time
    evaluate(tree, {"x": 0.0, "y": 0.0, "r": 0.0})

    def factor(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.asarray(evaluate(tree, {"x": x, "y": y, "r": np.hypot(x, y)}), dtype=float)

    return factor


def _parse_id(token: str):
    try:
        return int(token)
    except ValueError:
        return token


def _float(token: str, lineno: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ValidationError(f"Expected a number, got {token!r}", {"line": lineno}) from None


def _records(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------


def parse_graph(text: str) -> MetricGraph:
    """
    Parse ``v``/``e`` records into a ``MetricGraph``.

    Integer-looking ids become ``int``; anything else stays a string.

    Raises
    ------
    ValidationError
        On malformed records, with the offending line number.
    """
    ids = []
    coords = {}
    edges = []
    for lineno, fields in _records(text):
        kind = fields[0]
        if kind == "v" and len(fields) in (2, 4):
            vid = _parse_id(fields[1])
            ids.append(vid)
            if len(fields) == 4:
                coords[vid] = (_float(fields[2], lineno), _float(fields[3], lineno))
        elif kind == "e" and len(fields) == 4:
            edges.append((_parse_id(fields[1]), _parse_id(fields[2]), _float(fields[3], lineno)))
        else:
            raise ValidationError(f"Malformed graph record: {' '.join(fields)!r}", {"line": lineno})
    if coords and len(coords) != len(set(ids)):
        raise ValidationError("Either all vertices or none must carry coordinates")
    if not all(isinstance(v, int) for v in ids):
        # Mixed ids sort as strings
        ids = [str(v) for v in ids]
        edges = [(str(a), str(b), w) for a, b, w in edges]
        coords = {str(k): xy for k, xy in coords.items()}
    return MetricGraph(ids, edges, coords or None)


def format_graph(g: MetricGraph) -> str:
    """Serialize a ``MetricGraph`` as ``v``/``e`` records."""
    lines = []
    coords = g.coords
    for k, vid in enumerate(g.ids):
        if coords is None:
            lines.append(f"v {vid}")
        else:
            lines.append(f"v {vid} {format_float(coords[k, 0])} {format_float(coords[k, 1])}")
    for a, b, w in g.edges():
        lines.append(f"e {a} {b} {format_float(w)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------


def parse_grid(text: str) -> GridDisc:
    """
    Parse a ``grid`` header and optional ``f`` records into a ``GridDisc``.

    Raises
    ------
    ValidationError
        On a missing header, unknown keys, or an incomplete factor table.
    """
    header = None
    table: dict[tuple[int, int], float] = {}
    for lineno, fields in _records(text):
        if fields[0] == "grid":
            options = {}
            for token in fields[1:]:
                key, sep, value = token.partition("=")
                if not sep or key not in ("h", "r", "factor"):
                    raise ValidationError(f"Bad grid option {token!r}", {"line": lineno})
                options[key] = value
            if set(options) != {"h", "r", "factor"}:
                raise ValidationError("grid needs h=, r= and factor=", {"line": lineno})
            header = (
                _float(options["h"], lineno),
                _float(options["r"], lineno),
                options["factor"],
            )
        elif fields[0] == "f" and len(fields) == 4:
            try:
                key = (int(fields[1]), int(fields[2]))
            except ValueError:
                raise ValidationError("Grid indices must be integers", {"line": lineno}) from None
            table[key] = _float(fields[3], lineno)
        else:
            raise ValidationError(f"Malformed grid record: {' '.join(fields)!r}", {"line": lineno})
    if header is None:
        raise ValidationError("Missing grid header")
    h, r, factor = header
    if factor != "table":
        return GridDisc.build(h, r, compile_factor(factor), expr=factor)
    disc = GridDisc.build(h, r, 1.0)
    missing = [tuple(ij) for ij in disc.ij.tolist() if tuple(ij) not in table]
    if missing:
        raise ValidationError("Factor table misses nodes", {"first": missing[0], "count": len(missing)})
    values = np.array([table[tuple(ij)] for ij in disc.ij.tolist()])
    return disc.with_factor(values)


def format_grid(gd: GridDisc) -> str:
    """Serialize a ``GridDisc``; expression-built discs keep their expression."""
    head = f"grid h={format_float(gd.h)} r={format_float(gd.r_dom)}"
    if gd.expr is not None and " " not in gd.expr:
        return f"{head} factor={gd.expr}\n"
    lines = [f"{head} factor=table"]
    for (i, j), value in zip(gd.ij.tolist(), gd.factor):
        lines.append(f"f {i} {j} {format_float(value)}")
    return "\n".join(lines) + "\n"


def read_space(path: Path) -> MetricGraph | GridDisc:
    """Read a graph or grid file, dispatching on the presence of a ``grid`` header."""
    text = Path(path).read_text(encoding="utf-8")
    if any(fields[0] == "grid" for _, fields in _records(text)):
        return parse_grid(text)
    return parse_graph(text)


def write_space(path: Path, space: MetricGraph | GridDisc) -> Path:
    """Write a graph or grid file atomically."""
    text = format_grid(space) if isinstance(space, GridDisc) else format_graph(space)
    return write_text_atomic(Path(path), text)

"""System description files.

A system file is YAML with a version, named blocks and either a
composition expression or a series-parallel graph over the blocks::

    version: 1
    blocks:
      A1:
        kind: iru            # explicit | iru | ordered
        mode: positive       # positive | nonnegative (default positive)
        rows:                # iru: candidate rows for each matrix row
          - [[1, 2], [2, 1]]
          - [[1, 1], [3, 0.5]]
      A2:
        kind: explicit
        matrices:            # explicit / ordered: list of matrices
          - [[2, 4], [1, 2]]
    composition:             # ref | add | mul | scale
      add:
        - mul: [{ref: A2}, {ref: A1}]
        - {ref: A1}

``add`` and ``mul`` take two or more operands and fold to the left;
``scale`` is written ``{scale: 0.5, of: <expr>}``. Instead of
``composition`` a file may give ``graph`` built from ``{edge: name}``,
``{series: [...]}`` (parts in signal order) and ``{parallel: [...]}``.
"""

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .algebra import (
    Add,
    BlockGraph,
    Edge,
    Mul,
    Parallel,
    Ref,
    Scale,
    Series,
    compile_graph,
    eval_poly,
    expr_shape,
)
from .exceptions import DimMismatch, ParseError, SwitchingError, ValidationError
from .matset import DEFAULT_LIMIT, make_explicit, make_iru, make_ordered

FORMAT_VERSION = 1
_BUILDERS = {"explicit": make_explicit, "iru": make_iru, "ordered": make_ordered}


@dataclass
class BlockSpec:
    kind: str
    mode: str
    entries: list


@dataclass
class SystemDescription:
    blocks: dict
    composition: object = None
    graph: object = None
    version: int = FORMAT_VERSION


@dataclass
class System:
    description: SystemDescription
    env: dict
    expr: object
    matrix_set: object = field(repr=False)


class _Doc:
    """Parsed YAML data plus the node tree, for error locations."""

    def __init__(self, node):
        self.root = node

    def loc(self, path):
        node = self.root
        for key in path:
            if isinstance(node, yaml.MappingNode):
                nxt = [v for k, v in node.value if k.value == key]
                if not nxt:
                    break
                node = nxt[0]
            elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) \
                    and key < len(node.value):
                node = node.value[key]
            else:
                break
        return node.start_mark.line + 1, node.start_mark.column + 1

    def parse_error(self, msg, path):
        line, col = self.loc(path)
        return ParseError(msg, line, col)


def loads_system(text):
    """Parse system text into a validated SystemDescription."""
    loader = yaml.SafeLoader(text)
    try:
        node = loader.get_single_node()
        data = loader.construct_document(node) if node is not None else None
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ParseError(f"malformed YAML: {exc.problem}",
                         mark.line + 1 if mark else None,
                         mark.column + 1 if mark else None) from exc
    finally:
        loader.dispose()
    if data is None:
        raise ParseError("empty system file", 1, 1)
    doc = _Doc(node)
    if not isinstance(data, dict):
        raise doc.parse_error("top level must be a mapping", ())
    unknown = set(data) - {"version", "blocks", "composition", "graph"}
    if unknown:
        key = sorted(map(str, unknown))[0]
        raise doc.parse_error(f"unknown top-level key {key!r}", (key,))
    if data.get("version") != FORMAT_VERSION:
        raise doc.parse_error(f"version must be {FORMAT_VERSION}", ("version",))
    blocks = data.get("blocks")
    if not isinstance(blocks, dict) or not blocks:
        raise doc.parse_error("'blocks' must be a non-empty mapping", ("blocks",))

    specs, sets = {}, {}
    for name, raw in blocks.items():
        name = str(name)
        specs[name], sets[name] = _parse_block(doc, name, raw)

    has_comp, has_graph = "composition" in data, "graph" in data
    if has_comp == has_graph:
        raise doc.parse_error("give exactly one of 'composition' or 'graph'", ())
    desc = SystemDescription(blocks=specs)
    if has_comp:
        desc.composition = _parse_expr(doc, data["composition"], ("composition",))
        _check_refs(doc, _expr_names(desc.composition), sets, "composition")
        try:
            expr_shape(desc.composition, {n: s.shape for n, s in sets.items()})
        except DimMismatch as exc:
            line, col = doc.loc(("composition",))
            raise ValidationError("composition", str(exc), line, col) from exc
    else:
        desc.graph = _parse_graph(doc, data["graph"], ("graph",))
        _check_refs(doc, _graph_names(desc.graph), sets, "graph")
        try:
            compile_graph(BlockGraph(sets, desc.graph))
        except DimMismatch as exc:
            line, col = doc.loc(("graph",))
            raise ValidationError("graph", str(exc), line, col) from exc
    return desc


def parse_system(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    return loads_system(text)


def _parse_block(doc, name, raw):
    path = ("blocks", name)
    if not isinstance(raw, dict):
        raise doc.parse_error(f"block {name!r} must be a mapping", path)
    kind = raw.get("kind")
    if kind not in _BUILDERS:
        raise doc.parse_error(
            f"block {name!r}: kind must be one of {sorted(_BUILDERS)}", path + ("kind",)
        )
    mode = raw.get("mode", "positive")
    key = "rows" if kind == "iru" else "matrices"
    extra = set(raw) - {"kind", "mode", key}
    if extra:
        bad = sorted(map(str, extra))[0]
        raise doc.parse_error(f"block {name!r}: unexpected key {bad!r}", path + (bad,))
    entries = raw.get(key)
    if not isinstance(entries, list):
        raise doc.parse_error(f"block {name!r}: {key!r} must be a list", path)
    try:
        entries = _floats(entries)
    except (TypeError, ValueError) as exc:
        line, col = doc.loc(path + (key,))
        raise ValidationError(name, f"entries must be numbers ({exc})", line, col) from exc
    try:
        S = _BUILDERS[kind](entries, mode)
    except (SwitchingError, ValueError) as exc:
        loc_path = path + (key,)
        index = getattr(exc, "index", None)
        if index:
            loc_path += tuple(index)
        line, col = doc.loc(loc_path)
        raise ValidationError(name, str(exc), line, col) from exc
    return BlockSpec(kind, S.mode, entries), S


def _floats(value):
    if isinstance(value, list):
        return [_floats(v) for v in value]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"{value!r} is not a number")
    return float(value)


def _single_key(doc, raw, path, allowed):
    if not isinstance(raw, dict):
        raise doc.parse_error(f"expected a mapping with one of {allowed}", path)
    keys = [k for k in raw if k in allowed]
    if len(keys) != 1:
        raise doc.parse_error(f"expected exactly one of {allowed}", path)
    return keys[0]


def _parse_expr(doc, raw, path):
    op = _single_key(doc, raw, path, ("ref", "add", "mul", "scale"))
    arg = raw[op]
    if op == "ref":
        if set(raw) != {"ref"}:
            raise doc.parse_error("'ref' takes no other keys", path)
        return Ref(str(arg))
    if op == "scale":
        if set(raw) != {"scale", "of"}:
            raise doc.parse_error("'scale' needs exactly the keys 'scale' and 'of'", path)
        if isinstance(arg, bool) or not isinstance(arg, (int, float)) or not arg > 0:
            raise doc.parse_error("scale coefficient must be a number > 0", path + ("scale",))
        return Scale(float(arg), _parse_expr(doc, raw["of"], path + ("of",)))
    if set(raw) != {op} or not isinstance(arg, list) or len(arg) < 2:
        raise doc.parse_error(f"'{op}' needs a list of at least two operands", path)
    nodes = [_parse_expr(doc, a, path + (op, i)) for i, a in enumerate(arg)]
    cls = Add if op == "add" else Mul
    out = nodes[0]
    for nd in nodes[1:]:
        out = cls(out, nd)
    return out


def _parse_graph(doc, raw, path):
    op = _single_key(doc, raw, path, ("edge", "series", "parallel"))
    if set(raw) != {op}:
        raise doc.parse_error(f"'{op}' takes no other keys", path)
    arg = raw[op]
    if op == "edge":
        return Edge(str(arg))
    if not isinstance(arg, list) or not arg:
        raise doc.parse_error(f"'{op}' needs a non-empty list of parts", path)
    parts = tuple(_parse_graph(doc, a, path + (op, i)) for i, a in enumerate(arg))
    return Series(parts) if op == "series" else Parallel(parts)


def _expr_names(expr):
    if isinstance(expr, Ref):
        return [expr.name]
    if isinstance(expr, Scale):
        return _expr_names(expr.child)
    return _expr_names(expr.left) + _expr_names(expr.right)


def _graph_names(node):
    if isinstance(node, Edge):
        return [node.block]
    return [n for p in node.parts for n in _graph_names(p)]


def _check_refs(doc, names, sets, where):
    for name in names:
        if name not in sets:
            line, col = doc.loc((where,))
            raise ValidationError(name, f"used in {where} but not declared", line, col)


# -- building and serialising --------------------------------------------------


def build_system(desc, limit=DEFAULT_LIMIT):
    """Instantiate blocks and evaluate the composed transition set."""
    env = {name: _BUILDERS[b.kind](b.entries, b.mode) for name, b in desc.blocks.items()}
    expr = desc.composition
    if expr is None:
        expr = compile_graph(BlockGraph(env, desc.graph))
    return System(desc, env, expr, eval_poly(expr, env, limit))


def load_system(path, limit=DEFAULT_LIMIT):
    return build_system(parse_system(path), limit)


def _expr_to_data(expr):
    if isinstance(expr, Ref):
        return {"ref": expr.name}
    if isinstance(expr, Scale):
        return {"scale": expr.coef, "of": _expr_to_data(expr.child)}
    op = "add" if isinstance(expr, Add) else "mul"
    return {op: [_expr_to_data(expr.left), _expr_to_data(expr.right)]}


def _graph_to_data(node):
    if isinstance(node, Edge):
        return {"edge": node.block}
    op = "series" if isinstance(node, Series) else "parallel"
    return {op: [_graph_to_data(p) for p in node.parts]}


def to_data(desc):
    blocks = {}
    for name, b in desc.blocks.items():
        key = "rows" if b.kind == "iru" else "matrices"
        blocks[name] = {"kind": b.kind, "mode": b.mode, key: b.entries}
    out = {"version": desc.version, "blocks": blocks}
    if desc.composition is not None:
        out["composition"] = _expr_to_data(desc.composition)
    else:
        out["graph"] = _graph_to_data(desc.graph)
    return out


def dumps_system(desc):
    """Canonical YAML text; ``loads_system(dumps_system(d)) == d``."""
    return yaml.safe_dump(to_data(desc), sort_keys=False, default_flow_style=None)

"""Reader and writer for the record-style DOT dialect used for CGs and CFGs.

Node statements look like::

    Node0x7f2ac4ce0410[shape=record,filename="/a/b.cpp",startline=177,
        headline=179,bbendline=177,startcolumn=5,label="{name|callee1|callee2}"];

and edges like ``A -> B;`` or ``A -> B[indirect];``. The first label field is
the node label proper; any further fields name callees of a CFG block.
Statements may span lines; a newline inside a quoted ``filename`` is a
typesetting wrap and is read back as a path separator.
"""

from __future__ import annotations

import re

from .model import CALLGRAPH, CFG, GraphEdge, GraphNode, ProgramGraph

_INT_FIELDS = ("startline", "headline", "bbendline", "startcolumn")
_FIELDS = ("shape", "filename") + _INT_FIELDS + ("label",)


class DotSyntaxError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_node(n: GraphNode) -> str:
    label = "{" + "|".join((n.label,) + tuple(n.calls)) + "}"
    return (f"{n.node_id}[shape=record,filename={_quote(n.filename)},"
            f"startline={n.startline},headline={n.headline},bbendline={n.bbendline},"
            f"startcolumn={n.startcolumn},label={_quote(label)}];")


def emit_dot(graph: ProgramGraph) -> str:
    lines = []
    if graph.kind == CALLGRAPH:
        lines.append('digraph "callgraph" {')
    elif graph.kind == CFG:
        lines.append(f'digraph {_quote("cfg." + (graph.function or ""))} {{')
    by_id = graph.node_map()
    order = graph.dfs_order() if graph.kind == CFG else [n.node_id for n in graph.nodes]
    for nid in order:
        lines.append(emit_node(by_id[nid]))
    for e in graph.edges:
        lines.append(f"{e.src} -> {e.dst}{'[indirect]' if e.indirect else ''};")
    if graph.kind is not None:
        lines.append("}")
    return "\n".join(lines) + "\n"


# -- parsing -----------------------------------------------------------------

_HEADER_RE = re.compile(r'\s*digraph\s*(?:"((?:[^"\\]|\\.)*)"|([A-Za-z_][\w.]*))?\s*\{')
_ID = r"[A-Za-z_][A-Za-z0-9_]*"
_EDGE_RE = re.compile(rf"^({_ID})\s*->\s*({_ID})\s*(?:\[\s*([^\]]*?)\s*\])?$", re.S)
_NODE_RE = re.compile(rf"^({_ID})\s*\[(.*)\]$", re.S)
_KEY_RE = re.compile(r"([A-Za-z_]\w*)\s*=\s*")
_BARE_RE = re.compile(r"[^,\s]+")


def _statements(text, offset_line):
    """Split on ``;`` outside quotes; yield (line, statement)."""
    buf = []
    line = offset_line
    start_line = None
    in_str = False
    escaped = False
    for ch in text:
        if start_line is None and not ch.isspace():
            start_line = line
        if in_str:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_str = False
            buf.append(ch)
        elif ch == '"':
            in_str = True
            buf.append(ch)
        elif ch == ";":
            yield start_line or line, "".join(buf).strip()
            buf = []
            start_line = None
        else:
            buf.append(ch)
        if ch == "\n":
            line += 1
    if in_str:
        raise DotSyntaxError(start_line or line, "unterminated string")
    rest = "".join(buf).strip()
    if rest:
        yield start_line, rest


def _attrs(body, line):
    """Parse ``k=v,k="v",...``; values are ints or quoted strings."""
    out = {}
    i, n = 0, len(body)
    while True:
        while i < n and body[i].isspace():
            i += 1
        if i >= n:
            break
        m = _KEY_RE.match(body, i)
        if not m:
            raise DotSyntaxError(line, f"malformed attribute list near {body[i:i + 20]!r}")
        key = m.group(1)
        i = m.end()
        if i < n and body[i] == '"':
            j = i + 1
            chars = []
            while j < n and body[j] != '"':
                if body[j] == "\\" and j + 1 < n:
                    j += 1
                chars.append(body[j])
                j += 1
            if j >= n:
                raise DotSyntaxError(line, "unterminated string")
            value = "".join(chars)
            i = j + 1
        else:
            m = _BARE_RE.match(body, i)
            if not m:
                raise DotSyntaxError(line, f"missing value for {key}")
            value = m.group(0)
            i = m.end()
        if key in out:
            raise DotSyntaxError(line, f"duplicate attribute {key}")
        out[key] = value
        while i < n and body[i].isspace():
            i += 1
        if i < n:
            if body[i] != ",":
                raise DotSyntaxError(line, f"expected ',' near {body[i:i + 20]!r}")
            i += 1
    return out


def _node(nid, attrs, line):
    for key in attrs:
        if key not in _FIELDS:
            raise DotSyntaxError(line, f"unknown attribute {key!r}")
    missing = [k for k in _FIELDS if k not in attrs]
    if missing:
        raise DotSyntaxError(line, f"missing attribute(s) {', '.join(missing)}")
    if attrs["shape"] != "record":
        raise DotSyntaxError(line, f"shape must be record, not {attrs['shape']!r}")
    ints = {}
    for k in _INT_FIELDS:
        try:
            ints[k] = int(attrs[k])
        except ValueError:
            raise DotSyntaxError(line, f"{k} must be an integer") from None
    filename = re.sub(r"/?\s*\n\s*/?", "/", attrs["filename"])
    label = re.sub(r"\s*\n\s*", "", attrs["label"])
    if not (label.startswith("{") and label.endswith("}")):
        raise DotSyntaxError(line, "record label must be enclosed in braces")
    fields = label[1:-1].split("|")
    node = GraphNode(nid, filename, ints["startline"], ints["headline"], ints["bbendline"],
                     ints["startcolumn"], fields[0], tuple(fields[1:]))
    problems = node.check()
    if problems:
        raise DotSyntaxError(line, "; ".join(problems))
    return node


def parse_dot(text: str) -> ProgramGraph:
    kind = function = None
    body = text
    offset = 1
    m = _HEADER_RE.match(text)
    if m:
        name = m.group(1) if m.group(1) is not None else m.group(2)
        if name == "callgraph":
            kind = CALLGRAPH
        elif name is not None and name.startswith("cfg."):
            kind, function = CFG, name[4:]
        offset += text.count("\n", 0, m.end())
        close = text.rfind("}")
        if close < m.end() or text[close + 1:].strip():
            raise DotSyntaxError(text.count("\n") + 1, "missing closing brace")
        body = text[m.end():close]
    nodes, edges, seen = [], [], set()
    for line, stmt in _statements(body, offset):
        if not stmt:
            continue
        em = _EDGE_RE.match(stmt)
        if em:
            attr = em.group(3)
            if attr is not None and attr != "indirect":
                raise DotSyntaxError(line, f"unsupported edge attribute {attr!r}")
            edges.append(GraphEdge(em.group(1), em.group(2), attr == "indirect"))
            continue
        nm = _NODE_RE.match(stmt)
        if not nm:
            raise DotSyntaxError(line, f"cannot parse statement {stmt[:40]!r}")
        nid = nm.group(1)
        if nid in seen:
            raise DotSyntaxError(line, f"duplicate node {nid}")
        seen.add(nid)
        nodes.append(_node(nid, _attrs(nm.group(2), line), line))
    entry = nodes[0].node_id if kind == CFG and nodes else None
    return ProgramGraph(kind, nodes, edges, function=function, entry=entry)

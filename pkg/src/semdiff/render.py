"""Witness rendering: text, DOT graph descriptions, and JSON documents.

Everything here is byte-deterministic for identical inputs. The text forms
round-trip through their parsers; DOT output is meant for graphviz but is
also checked by a small structural validator used in the test suite.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum

from .ad_lang import ActivityDiagram, NodeKind, print_guard
from .ad_semantics import Trace
from .cd_semantics import ObjectModel, print_om
from .lexer import Diagnostic, ParseError


class OutputFormat(Enum):
    TEXT = "text"
    DOT = "dot"
    JSON = "json"


@dataclass(frozen=True)
class RenderedArtifact:
    format: OutputFormat
    payload: str


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _json_dump(document) -> str:
    return json.dumps(document, indent=2) + "\n"


# ---------------------------------------------------------------------------
# object models


def om_json(om: ObjectModel) -> dict:
    return {
        "objects": [
            {"id": oid, "class": cls} for oid, cls in sorted(om.objects.items())
        ],
        "links": [
            {"assoc": assoc, "src": src, "dst": dst}
            for assoc, src, dst in sorted(om.links)
        ],
    }


def om_dot(om: ObjectModel) -> str:
    lines = [f"digraph {_dot_quote(om.name)} {{"]
    for oid, cls in sorted(om.objects.items()):
        lines.append(f"  {_dot_quote(oid)} [label={_dot_quote(f'{oid}:{cls}')}];")
    for assoc, src, dst in sorted(om.links):
        lines.append(
            f"  {_dot_quote(src)} -> {_dot_quote(dst)} [label={_dot_quote(assoc)}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_om(om: ObjectModel, format: OutputFormat) -> RenderedArtifact:
    if format is OutputFormat.TEXT:
        return RenderedArtifact(format, print_om(om))
    if format is OutputFormat.DOT:
        return RenderedArtifact(format, om_dot(om))
    return RenderedArtifact(format, _json_dump(om_json(om)))


# ---------------------------------------------------------------------------
# traces

_STEP_RE = re.compile(r"^\s*(\d+)\.\s*(\S+)\s*$")
_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def print_trace(trace: Trace) -> str:
    header = "inputs:"
    if trace.inputs:
        header += " " + ", ".join(f"{name}={value}" for name, value in trace.inputs)
    lines = [header]
    lines.extend(f"  {i}. {action}" for i, action in enumerate(trace.actions, 1))
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> Trace:
    """Parse the textual trace form back into a Trace.

    The first non-blank line is `inputs:` followed by comma-separated
    name=value pairs; each following line is a 1-based numbered action.
    """
    diagnostics: list[Diagnostic] = []
    inputs: dict[str, str] = {}
    actions: list[str] = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if not seen_header:
            if not line.startswith("inputs:"):
                diagnostics.append(Diagnostic(lineno, 1, "expected 'inputs:' header"))
                break
            seen_header = True
            rest = line[len("inputs:"):].strip()
            if not rest:
                continue
            for part in rest.split(","):
                name, sep, value = part.strip().partition("=")
                name, value = name.strip(), value.strip()
                if not sep or not _NAME_RE.match(name) or not _NAME_RE.match(value):
                    diagnostics.append(
                        Diagnostic(lineno, 1, f"malformed input binding '{part.strip()}'")
                    )
                elif name in inputs:
                    diagnostics.append(
                        Diagnostic(lineno, 1, f"duplicate input variable '{name}'")
                    )
                else:
                    inputs[name] = value
            continue
        m = _STEP_RE.match(raw)
        if not m or not _NAME_RE.match(m.group(2)):
            diagnostics.append(
                Diagnostic(lineno, 1, f"expected a numbered action step, found '{line}'")
            )
            continue
        number = int(m.group(1))
        if number != len(actions) + 1:
            diagnostics.append(
                Diagnostic(
                    lineno, 1,
                    f"step number {number} out of order (expected {len(actions) + 1})",
                )
            )
            continue
        actions.append(m.group(2))
    if not seen_header and not diagnostics:
        diagnostics.append(Diagnostic(1, 1, "expected 'inputs:' header"))
    if diagnostics:
        raise ParseError(diagnostics)
    return Trace.make(inputs, actions)


def trace_json(trace: Trace) -> dict:
    return {"inputs": dict(trace.inputs), "actions": list(trace.actions)}


_NODE_STYLE = {
    NodeKind.INITIAL: 'shape=circle, style=filled, fillcolor=black, label=""',
    NodeKind.FINAL: 'shape=doublecircle, label=""',
    NodeKind.DECISION: "shape=diamond",
    NodeKind.MERGE: "shape=diamond",
    NodeKind.FORK: 'shape=box, style=filled, fillcolor=black, height=0.08, label=""',
    NodeKind.JOIN: 'shape=box, style=filled, fillcolor=black, height=0.08, label=""',
}


def trace_dot(ad: ActivityDiagram, trace: Trace) -> str:
    """The diagram's graph with trace steps numbered onto its action nodes.

    Actions visited by the trace are filled and carry their 1-based step
    numbers; actions the diagram does not know are listed in a comment block
    because they have no node to attach to.
    """
    steps: dict[str, list[int]] = {}
    foreign: list[tuple[int, str]] = []
    known = ad.action_names()
    for i, action in enumerate(trace.actions, 1):
        if action in known:
            steps.setdefault(action, []).append(i)
        else:
            foreign.append((i, action))

    lines = [f"digraph {_dot_quote(ad.name)} {{"]
    for node in ad.nodes:
        if node.kind is NodeKind.ACTION:
            if node.name in steps:
                numbers = ",".join(str(n) for n in steps[node.name])
                label = _dot_quote(f"{node.name} [{numbers}]")
                attrs = f'shape=box, style="rounded,filled", fillcolor=lightblue, label={label}'
            else:
                attrs = f"shape=box, style=rounded, label={_dot_quote(node.name)}"
        else:
            attrs = _NODE_STYLE[node.kind]
        lines.append(f"  {_dot_quote(node.name)} [{attrs}];")
    for edge in ad.edges:
        attrs = ""
        if edge.guard is not None:
            attrs = f" [label={_dot_quote(print_guard(edge.guard))}]"
        lines.append(f"  {_dot_quote(edge.src)} -> {_dot_quote(edge.dst)}{attrs};")
    if foreign:
        lines.append("  // foreign actions (not nodes of this diagram):")
        for i, action in foreign:
            lines.append(f"  //   {i}. {action}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_trace(
    ad: ActivityDiagram, trace: Trace, format: OutputFormat
) -> RenderedArtifact:
    if format is OutputFormat.TEXT:
        return RenderedArtifact(format, print_trace(trace))
    if format is OutputFormat.DOT:
        return RenderedArtifact(format, trace_dot(ad, trace))
    return RenderedArtifact(format, _json_dump(trace_json(trace)))


# ---------------------------------------------------------------------------
# diff results


def diff_json(
    direction: str, exhausted: bool, bound: int | None, witnesses: list[dict]
) -> dict:
    if direction not in ("AtoB", "BtoA"):
        raise ValueError(f"unknown direction {direction!r}")
    return {
        "direction": direction,
        "exhausted": exhausted,
        "bound": bound,
        "witnesses": witnesses,
    }


# ---------------------------------------------------------------------------
# DOT validation (structural only; enough to catch malformed output)

_DOT_ATTRS = r'\[(?:[^\]"]|"(?:[^"\\]|\\.)*")*\]'
_DOT_NODE_RE = re.compile(r'^\s*("(?:[^"\\]|\\.)*")\s*(%s)?\s*;\s*$' % _DOT_ATTRS)
_DOT_EDGE_RE = re.compile(
    r'^\s*("(?:[^"\\]|\\.)*")\s*->\s*("(?:[^"\\]|\\.)*")\s*(%s)?\s*;\s*$' % _DOT_ATTRS
)


def validate_dot(payload: str) -> None:
    """Check digraph shape: header, balanced braces, edges between declared
    nodes. Raises ValueError on the first problem."""
    lines = payload.splitlines()
    if not lines or not re.match(r'^digraph\s+("(?:[^"\\]|\\.)*"|\w+)\s*\{$', lines[0]):
        raise ValueError("missing digraph header")
    if not lines or lines[-1].strip() != "}":
        raise ValueError("missing closing brace")
    declared: set[str] = set()
    for line in lines[1:-1]:
        stripped = line.strip()
        if not stripped or stripped.startswith("//"):
            continue
        edge = _DOT_EDGE_RE.match(line)
        if edge:
            for endpoint in (edge.group(1), edge.group(2)):
                if endpoint not in declared:
                    raise ValueError(f"edge endpoint {endpoint} is not a declared node")
            continue
        node = _DOT_NODE_RE.match(line)
        if node:
            declared.add(node.group(1))
            continue
        raise ValueError(f"unrecognized DOT line: {stripped!r}")
    if payload.count("{") != payload.count("}"):
        raise ValueError("unbalanced braces")

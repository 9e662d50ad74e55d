# This library is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This library is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this library; if not, see <http://www.gnu.org/licenses/>.

"""
preoccupied.bioblend.lpformat
LP text export and import, and solution files.

The writer emits the common CPLEX-style LP layout understood by CBC,
GLPK, HiGHS and friends. Each row is preceded by a ``\\ tag`` comment
naming its constraint family, which the reader restores. Every
continuous variable gets a bounds line so that variables appearing in
no row survive a round trip.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import math
import re
from typing import Dict, Iterable, List, Optional, Tuple

from .milp import MilpInstance


__all__ = (
    "export_lp_text",
    "parse_lp_text",
    "read_solution_text",
    "write_solution_text",
)


_TERMS_PER_LINE = 8

_SECTIONS = {
    "minimize": "objective",
    "minimise": "objective",
    "min": "objective",
    "subject to": "rows",
    "such that": "rows",
    "st": "rows",
    "s.t.": "rows",
    "bounds": "bounds",
    "binaries": "binaries",
    "binary": "binaries",
    "bin": "binaries",
    "end": "end",
}

_SENSE_RE = re.compile(r"(<=|>=|=<|=>|=)")


def _num(value: float) -> str:
    if value == math.inf:
        return "+inf"
    if value == -math.inf:
        return "-inf"
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def _terms(terms: Iterable[Tuple[str, float]]) -> List[str]:
    lines = []
    chunk = []
    for var, coef in terms:
        sign = "-" if coef < 0 else "+"
        chunk.append(f"{sign} {_num(abs(coef))} {var}")
        if len(chunk) == _TERMS_PER_LINE:
            lines.append(" ".join(chunk))
            chunk = []
    if chunk:
        lines.append(" ".join(chunk))
    return lines


def export_lp_text(instance: MilpInstance) -> str:
    """
    Render an instance as LP text. The output depends only on the
    instance, so identical models give identical files.
    """

    variables = sorted(instance.variables, key=lambda v: v.name)
    out = [
        f"\\ bioblend model {instance.name}",
        f"\\ variables {len(variables)} rows {len(instance.rows)}",
    ]
    if not variables and not instance.rows:
        return "\n".join(out) + "\n"

    out.append("Minimize")
    objective = _terms(sorted(instance.objective.items()))
    if objective:
        out.append(" obj: " + objective[0])
        out.extend("  " + line for line in objective[1:])
    else:
        out.append(" obj:")

    out.append("Subject To")
    for row in instance.rows:
        out.append(f"\\ tag {row.tag}")
        body = _terms(row.terms) or ["0 " + variables[0].name]
        tail = f" {row.sense} {_num(row.rhs)}"
        if len(body) == 1:
            out.append(f" {row.name}: {body[0]}{tail}")
        else:
            out.append(f" {row.name}: {body[0]}")
            out.extend("  " + line for line in body[1:-1])
            out.append(f"  {body[-1]}{tail}")

    out.append("Bounds")
    for var in variables:
        if var.binary:
            if var.lower != 0.0 or var.upper != 1.0:
                out.append(f" {_num(var.lower)} <= {var.name} <= {_num(var.upper)}")
        elif var.lower == -math.inf and var.upper == math.inf:
            out.append(f" {var.name} free")
        elif var.upper == math.inf:
            out.append(f" {var.name} >= {_num(var.lower)}")
        else:
            out.append(f" {_num(var.lower)} <= {var.name} <= {_num(var.upper)}")

    binaries = [v.name for v in variables if v.binary]
    if binaries:
        out.append("Binaries")
        for start in range(0, len(binaries), _TERMS_PER_LINE):
            out.append(" " + " ".join(binaries[start:start + _TERMS_PER_LINE]))

    out.append("End")
    return "\n".join(out) + "\n"


def _parse_number(token: str) -> float:
    lowered = token.lower()
    if lowered in ("+inf", "inf", "+infinity", "infinity"):
        return math.inf
    if lowered in ("-inf", "-infinity"):
        return -math.inf
    return float(token)


_TOKEN_RE = re.compile(r"[+-]|\d*\.?\d+(?:[eE][+-]?\d+)?|[A-Za-z_][\w.]*")


def _parse_terms(text: str) -> List[Tuple[str, float]]:
    terms = []
    sign = 1.0
    coef: Optional[float] = None
    for token in _TOKEN_RE.findall(text):
        if token in ("+", "-"):
            sign = -1.0 if token == "-" else 1.0
        elif token[0].isdigit() or token[0] == ".":
            coef = float(token)
        else:
            terms.append((token, sign * (1.0 if coef is None else coef)))
            sign, coef = 1.0, None
    return terms


def parse_lp_text(text: str) -> MilpInstance:
    """
    Read LP text written by :func:`export_lp_text` back into an instance.
    Rows without a tag comment are tagged ``plumbing``.
    """

    name = "bioblend"
    section = None
    tag = "plumbing"
    pending = ""

    objective: List[Tuple[str, float]] = []
    rows: List[Tuple[str, List[Tuple[str, float]], str, float, str]] = []
    bounds: Dict[str, Tuple[float, float]] = {}
    binaries: List[str] = []
    seen: List[str] = []

    def note(var: str) -> None:
        if var not in bounds:
            bounds[var] = (0.0, math.inf)
            seen.append(var)

    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue

        if line.startswith("\\"):
            comment = line[1:].strip()
            if comment.startswith("bioblend model "):
                name = comment[len("bioblend model "):].strip()
            elif comment.startswith("tag "):
                tag = comment[4:].strip()
            continue

        lowered = line.lower()
        if lowered in _SECTIONS:
            section = _SECTIONS[lowered]
            continue

        if section == "objective":
            if ":" in line:
                line = line.split(":", 1)[1]
            for var, coef in _parse_terms(line):
                note(var)
                objective.append((var, coef))

        elif section == "rows":
            pending = f"{pending} {line}" if pending else line
            match = _SENSE_RE.search(pending)
            if match is None:
                continue

            label, colon, body = pending.partition(":")
            if not colon:
                label, body = f"c{len(rows) + 1}", pending
            match = _SENSE_RE.search(body)
            sense = {"=<": "<=", "=>": ">="}.get(match.group(1), match.group(1))
            terms = _parse_terms(body[:match.start()])
            for var, _coef in terms:
                note(var)
            rhs = _parse_number(body[match.end():].strip())
            rows.append((label.strip(), terms, sense, rhs, tag))
            pending = ""
            tag = "plumbing"

        elif section == "bounds":
            _parse_bound(line, bounds, seen)

        elif section == "binaries":
            for var in line.split():
                if var not in bounds:
                    bounds[var] = (0.0, 1.0)
                    seen.append(var)
                elif bounds[var] == (0.0, math.inf):
                    bounds[var] = (0.0, 1.0)
                binaries.append(var)

    instance = MilpInstance(name)
    binary = set(binaries)
    for var in sorted(seen):
        lower, upper = bounds[var]
        instance.add_variable(var, lower, upper, binary=var in binary)
    for label, terms, sense, rhs, row_tag in rows:
        instance.add_row(terms, sense, rhs, row_tag, name=label)
    instance.set_objective(dict(objective))
    return instance


def _parse_bound(line: str, bounds: Dict[str, Tuple[float, float]], seen: List[str]) -> None:
    parts = line.split()

    def current(var: str) -> Tuple[float, float]:
        if var not in bounds:
            bounds[var] = (0.0, math.inf)
            seen.append(var)
        return bounds[var]

    if len(parts) == 2 and parts[1].lower() == "free":
        current(parts[0])
        bounds[parts[0]] = (-math.inf, math.inf)
    elif len(parts) == 5:
        var = parts[2]
        current(var)
        bounds[var] = (_parse_number(parts[0]), _parse_number(parts[4]))
    elif len(parts) == 3:
        var, op, value = parts
        lower, upper = current(var)
        number = _parse_number(value)
        if op == ">=":
            bounds[var] = (number, upper)
        elif op == "<=":
            bounds[var] = (lower, number)
        elif op == "=":
            bounds[var] = (number, number)
        else:
            raise ValueError(f"cannot read bound line {line!r}")
    else:
        raise ValueError(f"cannot read bound line {line!r}")


def write_solution_text(values: Dict[str, float]) -> str:
    """
    One ``name value`` pair per line, sorted by name.
    """

    return "".join(f"{name} {_num(values[name])}\n" for name in sorted(values))


def read_solution_text(text: str) -> Dict[str, float]:
    """
    Read variable values from a plain ``name value`` file. Lines of any
    other shape, such as a status line, are skipped.
    """

    values: Dict[str, float] = {}
    for raw in text.splitlines():
        parts = raw.split()
        if len(parts) != 2:
            continue
        name, value = parts
        try:
            values[name] = float(value)
        except ValueError:
            continue
    return values


# The end.

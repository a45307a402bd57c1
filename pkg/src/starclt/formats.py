"""CSV/JSON renderings of moments, measures and Jacobi parameters.

Integers (and integral fractions) are written in full; other numbers use
Python's shortest round-trip float repr, which never exceeds 17
significant digits. Output is byte-for-byte deterministic.
"""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from numbers import Integral

from .measures import DiscreteMeasure, JacobiParams, MomentSequence


def fmt_number(x) -> str:
    """Integers in full; everything else as the shortest round-trip float."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Integral):
        return str(int(x))
    if isinstance(x, Fraction) and x.denominator == 1:
        return str(x.numerator)
    return repr(float(x))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def moments_csv(m: MomentSequence) -> str:
    return _csv(("order", "value"), [(j, fmt_number(v)) for j, v in enumerate(m)])


def measure_csv(mu: DiscreteMeasure) -> str:
    return _csv(("position", "weight"), [(fmt_number(x), fmt_number(w)) for x, w in mu.atoms])


def jacobi_csv(j: JacobiParams) -> str:
    rows = []
    for level, b in enumerate(j.betas):
        g = fmt_number(j.gammas[level]) if level < len(j.gammas) else ""
        rows.append((level, fmt_number(b), g))
    return _csv(("level", "beta", "gamma"), rows)


def parse_moments_csv(text: str) -> MomentSequence:
    rows = list(csv.DictReader(io.StringIO(text)))
    vals = []
    for r in rows:
        s = r["value"]
        vals.append(int(s) if s.lstrip("-").isdigit() else float(s))
    return MomentSequence(tuple(vals))


def parse_jacobi_csv(text: str, terminated: bool = False) -> JacobiParams:
    rows = list(csv.DictReader(io.StringIO(text)))

    def num(s):
        return int(s) if s.lstrip("-").isdigit() else float(s)

    betas = tuple(num(r["beta"]) for r in rows)
    gammas = tuple(num(r["gamma"]) for r in rows if r["gamma"] != "")
    return JacobiParams(betas, gammas, terminated)


def json_value(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    return x


def moments_json(m: MomentSequence, **extra) -> str:
    doc = {"moments": [json_value(v) for v in m], "exact": m.exact, **extra}
    return json.dumps(doc, indent=2, sort_keys=True)


def jacobi_json(j: JacobiParams, **extra) -> str:
    doc = {
        "betas": [json_value(b) for b in j.betas],
        "gammas": [json_value(g) for g in j.gammas],
        "terminated": j.terminated,
        **extra,
    }
    return json.dumps(doc, indent=2, sort_keys=True)

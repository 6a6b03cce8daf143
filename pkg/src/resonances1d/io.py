"""Plain-text potential files and CSV/JSON result files.

Numbers are written with 17 significant digits so that data files are
byte-reproducible and round-trip exactly through the loaders here.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

from .errors import InputError, PotentialParseError
from .potential import (FULLLINE, HALFLINE, PotentialSpec, evaluate, spline_build,
                        square_potential)
from .states import Entry, ResonanceSet


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _floats(text: str, key: str):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise PotentialParseError(f"{key}: {exc}") from None


def parse_config(text: str) -> dict:
    """``key=value`` lines; ``#`` starts a comment."""
    cfg = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PotentialParseError(f"line {n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key.lower()] = value
    return cfg


def potential_from_config(cfg: dict) -> PotentialSpec:
    domain = cfg.get("domain", FULLLINE).lower()
    if domain not in (HALFLINE, FULLLINE):
        raise PotentialParseError(f"domain must be halfline or fullline, got {domain!r}")
    bc = cfg.get("bc")
    bc = bc.lower() if bc else ("dirichlet" if domain == HALFLINE else None)
    kind = cfg.get("kind", "").lower()
    if "values" not in cfg:
        raise PotentialParseError("missing values=")
    values = _floats(cfg["values"], "values")
    try:
        if kind == "squarepot":
            if "breaks" not in cfg:
                raise PotentialParseError("squarepot needs breaks=")
            return square_potential(values, _floats(cfg["breaks"], "breaks"), domain, bc)
        if kind == "splinepot":
            if "knots" not in cfg:
                raise PotentialParseError("splinepot needs knots=")
            return spline_build(values, _floats(cfg["knots"], "knots"), domain, bc)
    except PotentialParseError:
        raise
    except InputError as exc:
        raise PotentialParseError(str(exc)) from exc
    raise PotentialParseError(f"kind must be squarepot or splinepot, got {kind!r}")


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise PotentialParseError(f"cannot read {path}: {exc}") from exc
    return parse_config(text)


def load_potential(path) -> PotentialSpec:
    return potential_from_config(load_config(path))


def dump_potential(p: PotentialSpec) -> str:
    lines = [f"domain={p.domain}"]
    if p.bc:
        lines.append(f"bc={p.bc}")
    if p.kind == "squarepot":
        lines += ["kind=squarepot",
                  "values=" + ",".join(fmt(v) for v in p.values),
                  "breaks=" + ",".join(fmt(v) for v in p.breaks)]
    else:
        # knot values determine the natural spline
        vals = [evaluate(p, x) for x in p.breaks[:-1]] + [0.0]
        lines += ["kind=splinepot",
                  "values=" + ",".join(fmt(v) for v in vals),
                  "knots=" + ",".join(fmt(v) for v in p.breaks)]
    return "\n".join(lines) + "\n"


def atomic_write(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- JSON with fixed float formatting ----------------------------------------------

def _json(obj, indent=0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if obj != obj or obj in (float("inf"), float("-inf")):
            raise InputError("cannot serialize non-finite number")
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _json(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise InputError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    return _json(obj) + "\n"


# --- resonance sets ------------------------------------------------------------------

def resonance_set_to_json(rs: ResonanceSet) -> str:
    return dumps_json({
        "engine": rs.engine,
        "potential_hash": rs.potential_hash,
        "entries": [{"re": e.lam.real, "im": e.lam.imag, "class": e.cls, "accuracy": e.accuracy}
                    for e in rs.entries],
    })


def resonance_set_to_csv(rs: ResonanceSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re", "im", "class", "accuracy"])
    for e in rs.entries:
        w.writerow([fmt(e.lam.real), fmt(e.lam.imag), e.cls, fmt(e.accuracy)])
    return buf.getvalue()


def resonance_set_from_json(text: str) -> ResonanceSet:
    data = json.loads(text)
    entries = tuple(Entry(complex(d["re"], d["im"]), d["class"], float(d["accuracy"]))
                    for d in data["entries"])
    return ResonanceSet(entries, data["engine"], data["potential_hash"])


def resonance_set_from_csv(text: str, engine: str = "", potential_hash: str = "") -> ResonanceSet:
    rows = list(csv.DictReader(io.StringIO(text)))
    entries = tuple(Entry(complex(float(r["re"]), float(r["im"])), r["class"],
                          float(r.get("accuracy") or 0.0)) for r in rows)
    return ResonanceSet(entries, engine, potential_hash)


def load_resonance_set(path) -> ResonanceSet:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".csv":
        return resonance_set_from_csv(text)
    return resonance_set_from_json(text)


# --- scans ---------------------------------------------------------------------------

SCAN_COLUMNS = ["q", "q_squared", "kind", "k", "im_lambda", "paired_defect"]


def scan_to_csv(scan) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    for row in scan.rows:
        bdef = {kp: d for kp, _, d in row.pairs}
        adef = {km: d for _, km, d in row.pairs}
        for k in row.bounds:
            d = bdef.get(k)
            w.writerow([fmt(row.q), fmt(row.q * row.q), "bound", fmt(k), fmt(k),
                        "" if d is None else fmt(d)])
        for k in row.antibounds:
            d = adef.get(k)
            w.writerow([fmt(row.q), fmt(row.q * row.q), "antibound", fmt(k), fmt(-k),
                        "" if d is None else fmt(d)])
    return buf.getvalue()


def scan_from_csv(text: str) -> list[dict]:
    out = []
    for r in csv.DictReader(io.StringIO(text)):
        out.append({
            "q": float(r["q"]),
            "q_squared": float(r["q_squared"]),
            "kind": r["kind"],
            "k": float(r["k"]),
            "im_lambda": float(r["im_lambda"]),
            "paired_defect": float(r["paired_defect"]) if r["paired_defect"] else None,
        })
    return out


def scan_summary(scan) -> dict:
    fit = scan.fit
    return {
        "engine": scan.engine,
        "k0": float(scan.k0),
        "q_grid": [float(q) for q in scan.q_values],
        "barrier": None if scan.barrier is None else [float(v) for v in scan.barrier],
        "c_hat": None if fit is None else fit.c_hat,
        "r2": None if fit is None else fit.r2,
        "power_law_r2": None if fit is None else fit.power_r2,
        "symmetry": bool(fit is not None and fit.symmetric),
    }

"""JSON and text formats for polynomials, truth tables and exact numbers.

Exact numbers are written as ``"p/q"`` (or ``"p"``) strings; floats are
written as JSON numbers.  A polynomial file looks like::

    {"n": 4, "terms": [{"vars": [1, 2], "coef": "3/4"}, {"vars": [], "coef": "1"}]}
"""

from fractions import Fraction
import json
import math

import numpy as np

from ptfkit.fourier import BooleanFn, MultilinearPoly, mask_from_vars, normalize_coef


def coef_to_json(c):
    c = normalize_coef(c)
    if isinstance(c, float):
        return c
    return str(c)


def coef_from_json(v):
    if isinstance(v, bool):
        raise ValueError("booleans are not coefficients")
    if isinstance(v, (int, float)):
        return normalize_coef(v)
    if isinstance(v, str):
        text = v.strip()
        try:
            return normalize_coef(Fraction(text))
        except ValueError:
            return float(text)
    raise ValueError(f"cannot read coefficient {v!r}")


def number_to_json(x):
    """Exact values become strings, floats stay floats (non-finite as strings)."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, (int, Fraction)):
        return str(normalize_coef(x))
    x = float(x)
    if not math.isfinite(x):
        return str(x)
    return x


def poly_to_json(p):
    return {
        "n": p.n,
        "terms": [{"vars": list(vs), "coef": coef_to_json(c)} for vs, c in p.monomials()],
    }


def poly_from_json(data):
    n = int(data["n"])
    terms = [(mask_from_vars(t.get("vars", []), n), coef_from_json(t["coef"])) for t in data["terms"]]
    return MultilinearPoly(n, terms)


def boolfn_to_json(h):
    return {"n": h.n, "hex": h.to_hex(), "provenance": h.provenance}


def boolfn_from_json(data):
    return BooleanFn.from_hex(int(data["n"]), data["hex"], data.get("provenance", "table"))


def dumps(obj):
    """Deterministic JSON text (sorted keys, fixed separators, trailing newline)."""
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def _default(o):
    if isinstance(o, (Fraction,)):
        return str(normalize_coef(o))
    if isinstance(o, MultilinearPoly):
        return poly_to_json(o)
    if isinstance(o, BooleanFn):
        return boolfn_to_json(o)
    if hasattr(o, "to_json"):
        return o.to_json()
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def jsonable(obj):
    """Recursively convert results to JSON-ready values.

    Fractions become ``"p/q"`` strings, ints stay ints, finite floats stay floats and
    non-finite floats become strings; objects with ``to_json`` use it.
    """
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (Fraction, float, np.floating)):
        return number_to_json(obj)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, MultilinearPoly):
        return poly_to_json(obj)
    if isinstance(obj, BooleanFn):
        return boolfn_to_json(obj)
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def load_poly(path):
    return poly_from_json(read_json(path))


def save_poly(path, p):
    write_json(path, poly_to_json(p))

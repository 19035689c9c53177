"""JSON and CSV plumbing for specs, results and reports.

Complex numbers travel as ``[re, im]`` pairs.  Reports are written with
sorted keys and ``repr`` floats (shortest round-tripping form), so identical
inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import hashlib
import json
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .errors import PreconditionError
from .resonance import VectorFieldSpec

__all__ = [
    "SpecError", "parse_complex", "encode_complex", "spec_from_document", "spec_to_document",
    "load_spec", "corpus_path", "corpus_names", "to_jsonable", "dumps", "config_hash",
    "result_to_document", "result_from_document", "write_csv",
]

CORPUS_PACKAGE = "gevreylab.corpus"


class SpecError(PreconditionError):
    """A spec document is malformed or inconsistent."""


def parse_complex(v, what="value"):
    """``[re, im]`` or a plain number; integer-valued reals come back as ``int``."""
    if isinstance(v, (list, tuple)):
        if len(v) != 2 or not all(isinstance(x, (int, float)) for x in v):
            raise SpecError(f"{what}: expected [re, im], got {v!r}")
        re, im = v
    elif isinstance(v, (int, float)) and not isinstance(v, bool):
        re, im = v, 0
    else:
        raise SpecError(f"{what}: expected a number or [re, im], got {v!r}")
    if im == 0:
        if float(re).is_integer():
            return int(re)
        return float(re)
    return complex(re, im)


def encode_complex(v) -> list:
    c = complex(v)
    return [float(c.real), float(c.imag)]


def _require(doc: dict, key: str):
    if key not in doc:
        raise SpecError(f"missing field {key!r}")
    return doc[key]


def spec_from_document(doc: dict, name: str = "") -> VectorFieldSpec:
    """Validate a spec document and build the :class:`VectorFieldSpec`.

    The ``r`` field may be omitted (non-1-resonant systems); it is then
    stored as the zero vector.  Component indices ``i`` in ``f`` are 1-based.
    """
    if not isinstance(doc, dict):
        raise SpecError("spec document must be a JSON object")
    n = _require(doc, "n")
    k = _require(doc, "k")
    if not isinstance(n, int) or n < 2:
        raise SpecError("n must be an integer >= 2")
    if not isinstance(k, int) or k < 1:
        raise SpecError("k must be an integer >= 1")
    lam = [parse_complex(v, "lambda") for v in _require(doc, "lambda")]
    alpha = [parse_complex(v, "alpha") for v in _require(doc, "alpha")]
    if len(lam) != n or len(alpha) != n:
        raise SpecError(f"lambda and alpha must have length n={n}")
    r = doc.get("r", [0] * n)
    if len(r) != n or not all(isinstance(v, int) and v >= 0 for v in r):
        raise SpecError(f"r must be {n} nonnegative integers")
    f: dict = {}
    for entry in _require(doc, "f"):
        try:
            i, j, zc = entry["i"], tuple(entry["j"]), entry["z_coeffs"]
        except (KeyError, TypeError) as exc:
            raise SpecError(f"nonlinearity entry {entry!r} needs i, j, z_coeffs") from exc
        if not isinstance(i, int) or not 1 <= i <= n:
            raise SpecError(f"component index i={i!r} outside 1..{n}")
        if len(j) != n or any((not isinstance(v, int)) or v < 0 for v in j):
            raise SpecError(f"multi-index {list(j)} must have {n} nonnegative integers")
        if sum(j) < 2:
            raise SpecError(f"nonlinearity key {list(j)} has degree < 2")
        coeffs = [complex(parse_complex(c, "z_coeffs")) for c in zc]
        if not coeffs:
            continue
        arr = f.get(j)
        L = max(len(coeffs), 0 if arr is None else arr.shape[1])
        new = np.zeros((n, L), dtype=complex)
        if arr is not None:
            new[:, :arr.shape[1]] = arr
        new[i - 1, :len(coeffs)] += coeffs
        f[j] = new
    trunc = doc.get("trunc", {})
    N, M = trunc.get("N", 8), trunc.get("M", 12)
    if not (isinstance(N, int) and isinstance(M, int) and N >= 1 and M >= 0):
        raise SpecError("trunc.N must be >= 1 and trunc.M >= 0")
    tol = doc.get("tolerances", {}) or {}
    if not isinstance(tol, dict):
        raise SpecError("tolerances must be an object")
    try:
        return VectorFieldSpec(n, k, lam, alpha, r, f, N, M, dict(tol), doc.get("name", name))
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def spec_to_document(spec: VectorFieldSpec) -> dict:
    f = []
    for j in sorted(spec.f):
        arr = spec.f[j]
        for i in range(spec.n):
            if np.any(arr[i]):
                f.append({"i": i + 1, "j": list(j), "z_coeffs": [encode_complex(c) for c in arr[i]]})
    return {
        "name": spec.name, "n": spec.n, "k": spec.k,
        "lambda": [encode_complex(v) for v in spec.lam_values],
        "alpha": [encode_complex(v) for v in spec.alpha_values],
        "r": list(spec.r), "f": f, "trunc": {"N": spec.N, "M": spec.M},
        "tolerances": dict(spec.tolerances),
    }


def load_spec(path) -> VectorFieldSpec:
    """Read and validate a spec file; JSON errors surface as :class:`SpecError`."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: malformed JSON ({exc})") from exc
    return spec_from_document(doc, path.stem)


def corpus_path(name: str) -> Path:
    """Path of a bundled corpus spec (``"euler2d"`` or ``"euler2d.json"``)."""
    if not name.endswith(".json"):
        name += ".json"
    p = Path(str(resources.files(CORPUS_PACKAGE).joinpath(name)))
    if not p.exists():
        raise FileNotFoundError(name)
    return p


def corpus_names() -> list:
    root = Path(str(resources.files(CORPUS_PACKAGE)))
    return sorted(p.stem for p in root.glob("*.json"))


# ---------------------------------------------------------------------------
# reports

def to_jsonable(obj: Any):
    """Recursively convert numpy/complex/fraction values to JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if np.isnan(x):
            return "nan"
        if np.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def config_hash(config: dict) -> str:
    blob = json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def result_to_document(result) -> dict:
    """NormalizationResult as nested ``[re, im]`` tables keyed by multi-index."""
    basis = result.basis
    entries = []
    for pos, Q in enumerate(basis.indices):
        if sum(Q) == 0:
            continue
        entries.append({"Q": list(Q),
                        "g": [[encode_complex(c) for c in row] for row in result.g[pos]],
                        "t": [[encode_complex(c) for c in row] for row in result.t[pos]]})
    return {"spec": spec_to_document(result.spec), "N": result.N, "M": result.M, "table": entries}


def result_from_document(doc: dict):
    from .normalization import NormalizationResult, _divisor_tables
    from .series_core import MonomialBasis

    try:
        spec = spec_from_document(doc["spec"])
        N, M = int(doc["N"]), int(doc["M"])
        basis = MonomialBasis.get(spec.n, N)
        g = np.zeros((len(basis), spec.n, M + 1), dtype=complex)
        t = np.zeros_like(g)
        for e in doc["table"]:
            pos = basis.position[tuple(e["Q"])]
            g[pos] = [[complex(*c) for c in row] for row in e["g"]]
            t[pos] = [[complex(*c) for c in row] for row in e["t"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed normalization result: {exc}") from exc
    lamQ, alphaQ = _divisor_tables(spec, basis)
    return NormalizationResult(spec, N, M, g, t, lamQ, alphaQ)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])

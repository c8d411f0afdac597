"""JSON schemas for matrices, parameter sets and states.

Complex numbers travel as ``[re, im]`` pairs. Plain real numbers are
accepted on input wherever a pair is expected.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import DimensionError
from .jacobi import HankelMoments, JacobiParameters
from .qstate import BipartiteState, DensityMatrix, QubitJacobiCoords, SeparabilityVerdict
from .sc import SCParameters


class SchemaError(ValueError):
    """Input JSON is well-formed but does not follow the expected schema."""


def _num(x, what="value") -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(f"{what} must be a number, got {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise SchemaError(f"{what} must be finite")
    return x


def cplx_from_json(v, what="value") -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise SchemaError(f"{what} must be an [re, im] pair")
        return complex(_num(v[0], what), _num(v[1], what))
    return complex(_num(v, what), 0.0)


def cplx_to_json(z) -> list:
    z = complex(z)
    # -0.0 would print differently from 0.0 and break byte-identical output
    return [z.real + 0.0, z.imag + 0.0]


def _get(obj, key):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"missing field {key!r}")
    return obj[key]


def _int(x, what) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise SchemaError(f"{what} must be an integer")
    return x


def matrix_to_json(M) -> dict:
    M = np.asarray(M)
    rows, cols = M.shape
    return {"rows": rows, "cols": cols,
            "data": [[cplx_to_json(M[i, j]) for j in range(cols)] for i in range(rows)]}


def matrix_from_json(obj) -> np.ndarray:
    rows, cols = _int(_get(obj, "rows"), "rows"), _int(_get(obj, "cols"), "cols")
    data = _get(obj, "data")
    if not isinstance(data, list) or len(data) != rows or any(
        not isinstance(r, list) or len(r) != cols for r in data
    ):
        raise DimensionError(f"matrix data does not match rows x cols = {rows} x {cols}")
    M = np.zeros((rows, cols), dtype=np.complex128)
    for i, r in enumerate(data):
        for j, v in enumerate(r):
            M[i, j] = cplx_from_json(v, f"data[{i}][{j}]")
    return M


def sc_to_json(p: SCParameters) -> dict:
    n = p.n
    gammas = []
    for i in range(n):
        for j in range(i + 1, n):
            g = complex(p.gammas[i, j])
            gammas.append({"i": i + 1, "j": j + 1, "re": g.real + 0.0, "im": g.imag + 0.0})
    return {"n": n, "diag": [float(d) + 0.0 for d in p.diag], "gammas": gammas}


def sc_from_json(obj) -> SCParameters:
    n = _int(_get(obj, "n"), "n")
    diag = [_num(d, "diag entry") for d in _get(obj, "diag")]
    if len(diag) != n:
        raise DimensionError(f"diag has {len(diag)} entries, expected {n}")
    G = np.zeros((n, n), dtype=np.complex128)
    for g in _get(obj, "gammas"):
        i, j = _int(_get(g, "i"), "i"), _int(_get(g, "j"), "j")
        if not 1 <= i < j <= n:
            raise DimensionError(f"gamma index ({i}, {j}) outside 1 <= i < j <= {n}")
        G[i - 1, j - 1] = complex(_num(_get(g, "re"), "re"), _num(_get(g, "im"), "im"))
    return SCParameters(np.array(diag), G)


def jacobi_to_json(p: JacobiParameters) -> dict:
    n = p.n
    c = []
    for i in range(n):
        for j in range(i + 1, n):
            z = complex(p.c[i, j])
            c.append({"i": i, "j": j, "re": z.real + 0.0, "im": z.imag + 0.0})
    return {"n": n, "s0": p.s0 + 0.0, "a": [float(x) + 0.0 for x in p.a],
            "b": [cplx_to_json(z) for z in p.b], "c": c}


def jacobi_from_json(obj) -> JacobiParameters:
    n = _int(_get(obj, "n"), "n")
    a = [_num(x, "a entry") for x in _get(obj, "a")]
    b = [cplx_from_json(x, "b entry") for x in _get(obj, "b")]
    if len(a) != n or len(b) != n:
        raise DimensionError(f"a and b need {n} entries, got {len(a)} and {len(b)}")
    c = np.zeros((n, n), dtype=np.complex128)
    for e in obj.get("c", []):
        i, j = _int(_get(e, "i"), "i"), _int(_get(e, "j"), "j")
        if not 0 <= i < j < n:
            raise DimensionError(f"c index ({i}, {j}) outside 0 <= i < j < {n}")
        c[i, j] = complex(_num(_get(e, "re"), "re"), _num(_get(e, "im"), "im"))
    return JacobiParameters(_num(_get(obj, "s0"), "s0"), a, b, c)


def moments_to_json(h: HankelMoments) -> dict:
    return {"order": h.order, "s": [cplx_to_json(z) for z in h.s]}


def moments_from_json(obj) -> HankelMoments:
    s = obj if isinstance(obj, list) else _get(obj, "s")
    return HankelMoments([cplx_from_json(z, "moment") for z in s])


def state_to_json(s: BipartiteState) -> dict:
    out = matrix_to_json(s.mat)
    out["dim_a"], out["dim_b"] = s.dim_a, s.dim_b
    return out


def state_from_json(obj, dims=None, tol=None) -> BipartiteState:
    M = matrix_from_json(obj)
    if dims is None:
        dims = (_int(_get(obj, "dim_a"), "dim_a"), _int(_get(obj, "dim_b"), "dim_b"))
    dm = DensityMatrix(M) if tol is None else DensityMatrix(M, tol)
    return BipartiteState(dims[0], dims[1], dm)


def qubit_coords_to_json(q: QubitJacobiCoords) -> dict:
    return {"s0": q.s0 + 0.0, "a1": q.a1 + 0.0, "b0": cplx_to_json(q.b0)}


def qubit_coords_from_json(obj) -> QubitJacobiCoords:
    return QubitJacobiCoords(_num(_get(obj, "s0"), "s0"), _num(_get(obj, "a1"), "a1"),
                             cplx_from_json(_get(obj, "b0"), "b0"))


def verdict_to_json(v: SeparabilityVerdict) -> dict:
    out = {"verdict": v.verdict.value, "reason": v.reason}
    if v.certificate is not None:
        out["certificate"] = [
            {"weight": t.weight + 0.0,
             "vec_a": [cplx_to_json(z) for z in t.vec_a],
             "vec_b": [cplx_to_json(z) for z in t.vec_b]}
            for t in v.certificate
        ]
    return out


def dumps(obj) -> str:
    return json.dumps(obj, allow_nan=False)

"""
Separable state families built from unit SC contractions, and the
rank-one Kraus separability detector.

A pattern family splits the indices ``0..n-1`` into two classes ``I_s`` and
``I_t``. The pattern subspace consists of the matrices that are constant on
each of the blocks ``I_s x I_s``, ``I_s x I_t``, ``I_t x I_s``, ``I_t x I_t``
with equal values on the two cross blocks. Every state whose blocks (over an
arbitrary second factor) lie in that subspace is separable.

Value naming is ``a`` on ``I_s x I_s``, ``b`` on ``I_t x I_t``, ``c`` across.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, PosParamError
from .matcore import DEFAULT_TOL, Tolerances, numerical_rank
from .qstate import (
    BipartiteState,
    CertificateTerm,
    DensityMatrix,
    SeparabilityVerdict,
    Verdict,
    kraus_from_state,
    kraus_rows,
    ppt_verdict,
)
from .sc import sc_extract


class PatternKind(str, enum.Enum):
    GENERAL = "GENERAL"
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"
    SYMMETRIC_BLOCK = "SYMMETRIC_BLOCK"
    HANKEL = "HANKEL"


@dataclass(frozen=True)
class PatternFamily:
    """Partition of ``range(n)`` into the index classes ``i_s`` and ``i_t`` (0-based)."""

    n: int
    i_s: frozenset
    i_t: frozenset
    kind: PatternKind = PatternKind.GENERAL

    def __post_init__(self):
        i_s, i_t = frozenset(int(i) for i in self.i_s), frozenset(int(i) for i in self.i_t)
        object.__setattr__(self, "i_s", i_s)
        object.__setattr__(self, "i_t", i_t)
        object.__setattr__(self, "kind", PatternKind(self.kind))
        if i_s & i_t or (i_s | i_t) != frozenset(range(self.n)) or not i_s or not i_t:
            raise DomainError(
                f"index classes {sorted(i_s)} / {sorted(i_t)} must be a partition of 0..{self.n - 1} "
                "into two nonempty sets"
            )

    @classmethod
    def general(cls, n: int, i_s) -> "PatternFamily":
        i_s = frozenset(i_s)
        return cls(n, i_s, frozenset(range(n)) - i_s, PatternKind.GENERAL)

    @classmethod
    def s1(cls) -> "PatternFamily":
        # [[a, a, c], [a, a, c], [c, c, b]]
        return cls(3, frozenset({0, 1}), frozenset({2}), PatternKind.S1)

    @classmethod
    def s2(cls) -> "PatternFamily":
        # [[a, c, a], [c, b, c], [a, c, a]]
        return cls(3, frozenset({0, 2}), frozenset({1}), PatternKind.S2)

    @classmethod
    def s3(cls) -> "PatternFamily":
        # [[a, c, c], [c, b, b], [c, b, b]]
        return cls(3, frozenset({0}), frozenset({1, 2}), PatternKind.S3)

    @classmethod
    def symmetric_block(cls) -> "PatternFamily":
        """2x2 symmetric blocks; the pattern subspace is all symmetric 2x2 matrices."""
        return cls(2, frozenset({0}), frozenset({1}), PatternKind.SYMMETRIC_BLOCK)

    @classmethod
    def hankel(cls) -> "PatternFamily":
        """2x2 Hankel blocks, which coincide with symmetric 2x2 blocks."""
        return cls(2, frozenset({0}), frozenset({1}), PatternKind.HANKEL)

    def indicators(self):
        e_s = np.zeros(self.n)
        e_t = np.zeros(self.n)
        e_s[sorted(self.i_s)] = 1.0
        e_t[sorted(self.i_t)] = 1.0
        return e_s, e_t


def pattern_matrix(f: PatternFamily, a, b, c) -> np.ndarray:
    """``a e_s e_s* + c e_s e_t* + conj(c) e_t e_s* + b e_t e_t*``.

    PSD exactly when ``[[a, c], [conj(c), b]]`` is PSD.
    """
    e_s, e_t = f.indicators()
    c = complex(c)
    return (a * np.outer(e_s, e_s) + c * np.outer(e_s, e_t)
            + c.conjugate() * np.outer(e_t, e_s) + b * np.outer(e_t, e_t)).astype(np.complex128)


def _pt_qubit(tau: np.ndarray, k: int) -> np.ndarray:
    return tau.reshape(k, 2, k, 2).transpose(0, 3, 2, 1).reshape(2 * k, 2 * k)


def gen_pattern_state(f: PatternFamily, k: int, seed=None, max_tries: int = 10) -> BipartiteState:
    """Random state on ``C^k (x) C^n`` whose ``n x n`` blocks lie in the pattern subspace.

    Blocks of such a state are ``V M_ij V^T`` with ``V = [e_s/sqrt(n_s) | e_t/sqrt(n_t)]``
    and complex-symmetric 2x2 ``M_ij``. A random PSD ``k x 2`` state is
    symmetrized with its partial transpose (which makes every ``M_ij``
    symmetric), mixed with the identity just enough to restore positivity,
    compressed by ``I (x) V`` and normalized.
    """
    if k < 1:
        raise DimensionError("k must be >= 1")
    rng = np.random.default_rng(seed)
    e_s, e_t = f.indicators()
    V = np.column_stack([e_s / np.sqrt(e_s.sum()), e_t / np.sqrt(e_t.sum())])
    W = np.kron(np.eye(k), V)
    for _ in range(max_tries):
        G = rng.normal(size=(2 * k, 2 * k)) + 1j * rng.normal(size=(2 * k, 2 * k))
        rho0 = G @ G.conj().T
        tau = (rho0 + _pt_qubit(rho0, k)) / 2
        tau = (tau + tau.conj().T) / 2
        lam = np.linalg.eigvalsh(tau)[0]
        if lam < 0:
            tau = tau - lam * np.eye(2 * k)
        tr = np.trace(tau).real
        if tr > 0:
            rho = W @ (tau / tr) @ W.T
            return BipartiteState(k, f.n, DensityMatrix((rho + rho.conj().T) / 2))
    raise DomainError("could not draw a nonzero patterned state")


def hankel_state_from_measure(m: int, nodes, weights) -> BipartiteState:
    """Normalized ``sum_l w_l v(t_l) v(t_l)^T`` with ``v(t) = (1, t, ..., t^(2m-1))`` as an ``m x 2`` state."""
    nodes = np.asarray(nodes, dtype=float).reshape(-1)
    weights = np.asarray(weights, dtype=float).reshape(-1)
    if m < 1 or nodes.size == 0 or nodes.size != weights.size:
        raise DimensionError("need m >= 1 and matching, nonempty nodes/weights")
    if np.any(weights < 0) or weights.sum() <= 0:
        raise DomainError("weights must be nonnegative and not all zero")
    Vd = np.vander(nodes, 2 * m, increasing=True)
    H = (Vd.T * weights) @ Vd
    return BipartiteState(m, 2, DensityMatrix(H / np.trace(H)))


def gen_hankel_state(m: int, points: int, seed=None) -> BipartiteState:
    """Random PSD Hankel state from ``points`` nodes in ``[-1, 1]``."""
    if m < 2 or points < 1:
        raise DimensionError("need m >= 2 and points >= 1")
    rng = np.random.default_rng(seed)
    nodes = rng.uniform(-1.0, 1.0, size=points)
    weights = rng.uniform(0.05, 1.0, size=points)
    return hankel_state_from_measure(m, nodes, weights)


def rank1_kraus_test(s: BipartiteState, tol: Tolerances = DEFAULT_TOL) -> SeparabilityVerdict:
    """One-sided separability test on the SC Cholesky Kraus operators.

    Returns SEPARABLE with a product certificate if every nonzero Kraus
    operator has rank one, otherwise INCONCLUSIVE. Never returns ENTANGLED:
    another Kraus representation could still consist of rank-one operators.
    """
    ops = kraus_from_state(s, tol).ops
    ranks = [numerical_rank(K, tol) for K in ops]
    worst = max(ranks, default=0)
    if worst > 1:
        return SeparabilityVerdict(Verdict.INCONCLUSIVE, f"Kraus rank {worst}")
    terms = []
    for K in ops:
        U, S, Vh = np.linalg.svd(K)
        if S[0] == 0:
            continue
        # K = S0 u v^H, vec(K) = S0 kron(u, conj(v))
        terms.append(CertificateTerm(float(S[0] ** 2), U[:, 0].copy(), Vh[0, :].copy()))
    return SeparabilityVerdict(Verdict.SEPARABLE, "all Kraus operators have rank 1", tuple(terms))


CHECKLIST_ITEMS = ("1", "2", "3", "3'", "4", "5", "6")


def checklist_3x3(s: BipartiteState, tol: Tolerances = DEFAULT_TOL):
    """Sufficient parameter conditions for a 3x3 state to have rank-one Kraus operators.

    Items (1-based SC indices of the 9x9 state):

    1. ``D_{Gamma_i6} = 0`` for some ``i`` in 1..5;
    2. ``D_{Gamma_i5} = 0`` for some ``i`` in 1..4;
    3. if ``D_{Gamma_i6} != 0`` for all ``i`` in 2..5 then ``|Gamma_16| = 1`` and ``Gamma_15 = 0``;
    3'. the 4th-row Kraus operator has rank <= 1;
    4. ``D_{Gamma_23} = 0`` or ``D_{Gamma_13} = 0``;
    5. ``D_{Gamma_12} = 0``;
    6. the 1st-row Kraus operator has rank <= 1.

    A defect counts as zero also when the later variable has zero diagonal.
    Item 5 is evaluated as a defect condition like items 1, 2 and 4; the
    literal reading ``|Gamma_12| = 0`` is reported separately as
    ``"5_printed"`` and does not enter ``passed``.

    Returns
    -------
    passed : bool
    detail : dict
        Per-item booleans.
    """
    if s.dim_a != 3 or s.dim_b != 3:
        raise DimensionError(f"checklist needs a 3x3 state, got {s.dim_a}x{s.dim_b}")
    p = sc_extract(s.mat, tol)
    rows = kraus_rows(s, tol)

    floor = tol.psd_eig_tol * max(float(p.diag.max(initial=0.0)), 1e-300)

    def dz(i, j):
        # variable j already lies in the span of the earlier ones
        if p.diag[j - 1] <= floor:
            return True
        return p.diag[i - 1] > floor and 1.0 - abs(p.gamma(i, j)) ** 2 <= tol.psd_eig_tol

    premise = all(not dz(i, 6) for i in range(2, 6))
    detail = {
        "1": any(dz(i, 6) for i in range(1, 6)),
        "2": any(dz(i, 5) for i in range(1, 5)),
        "3": (not premise) or (dz(1, 6) and abs(p.gamma(1, 5)) <= tol.recon_tol),
        "3'": numerical_rank(rows[3], tol) <= 1,
        "4": dz(2, 3) or dz(1, 3),
        "5": dz(1, 2),
        "6": numerical_rank(rows[0], tol) <= 1,
        "5_printed": abs(p.gamma(1, 2)) <= tol.recon_tol,
    }
    passed = all(detail[k] for k in CHECKLIST_ITEMS)
    return passed, detail


REPORT_COLUMNS = ("state_id", "dims", "ppt", "rank1", "checklist", "consistent", "notes")


def run_detector_battery(states, tol: Tolerances = DEFAULT_TOL) -> list[dict]:
    """Run every detector on each state and cross-check the verdicts.

    A row is inconsistent when a state is ENTANGLED under PPT but certified
    SEPARABLE, when the checklist passes without a rank-one certificate, or
    when a certificate fails to re-sum to the state. Errors are recorded in
    ``notes`` instead of being raised.
    """
    report = []
    for idx, s in enumerate(states):
        row = {"state_id": idx, "dims": f"{s.dim_a}x{s.dim_b}", "ppt": "", "rank1": "",
               "checklist": "N/A", "consistent": True, "notes": ""}
        notes = []
        try:
            ppt = ppt_verdict(s, tol)
            r1 = rank1_kraus_test(s, tol)
            row["ppt"], row["rank1"] = ppt.verdict.value, r1.verdict.value
            if ppt.verdict is Verdict.ENTANGLED and r1.verdict is Verdict.SEPARABLE:
                row["consistent"] = False
                notes.append("entangled state certified separable")
            if r1.certificate is not None:
                err = np.linalg.norm(r1.certificate_sum() - s.mat)
                if err > tol.recon_tol * max(1.0, float(np.linalg.norm(s.mat))):
                    row["consistent"] = False
                    notes.append(f"certificate residual {err:.3e}")
            if s.dim_a == 3 and s.dim_b == 3:
                passed, detail = checklist_3x3(s, tol)
                row["checklist"] = "PASS" if passed else "FAIL"
                if passed and r1.verdict is not Verdict.SEPARABLE:
                    row["consistent"] = False
                    notes.append("checklist passed without rank-1 Kraus operators")
                if detail["5_printed"] != detail["5"]:
                    notes.append(f"item 5 as printed ({detail['5_printed']}) differs from defect reading")
        except PosParamError as exc:
            row["consistent"] = False
            notes.append(f"error: {exc}")
        row["notes"] = "; ".join(notes)
        report.append(row)
    return report


def report_to_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in report:
        writer.writerow(row)
    return buf.getvalue()


def report_to_json(report) -> str:
    return json.dumps(list(report), indent=2)

"""Hurwitz stability and quasi-stability tests.

Two independent routes are provided: root location (``classify``) and the
Routh-Hurwitz leading principal minors (``hurwitz_matrix`` +
``leading_minors``).  Minors are evaluated exactly over the rationals, so
their signs are reliable even when they are as small as 1e-200, which is
routine for the clustered near-axis roots produced by the perturbation step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import NonPositiveLeading, StabilityConsistencyError
from .polynomial import Polynomial, cluster_radius, cluster_roots, roots, to_fraction

MARGIN_TOL = 1e-9

STABLE = "stable"
QUASI = "quasi-stable-not-stable"
UNSTABLE = "unstable"


@dataclass(frozen=True)
class HurwitzMatrix:
    """n x n Hurwitz matrix; ``entries[r][c] = a_{2c - r + 1}`` (0-indexed).

    ``a_0`` is the leading coefficient, i.e. ``a_i`` multiplies ``s**(n-i)``.
    Entries keep the coefficient type of the polynomial.
    """

    entries: tuple

    @property
    def n(self) -> int:
        return len(self.entries)

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries], dtype=float)


def hurwitz_matrix(p: Polynomial) -> HurwitzMatrix:
    if p.is_zero():
        raise ValueError("zero polynomial")
    if p.leading <= 0:
        raise NonPositiveLeading(f"leading coefficient {p.leading!r} is not positive")
    n = p.degree
    a = [p.coeffs[n - i] for i in range(n + 1)]
    rows = []
    for r in range(n):
        row = []
        for c in range(n):
            idx = 2 * c - r + 1
            row.append(a[idx] if 0 <= idx <= n else 0)
        rows.append(tuple(row))
    return HurwitzMatrix(tuple(rows))


def _integer_rows(rows) -> tuple[list[list[int]], list[int]]:
    out, scales = [], []
    for row in rows:
        fr = [to_fraction(v) for v in row]
        den = 1
        for v in fr:
            den = lcm(den, v.denominator)
        out.append([int(v * den) for v in fr])
        scales.append(den)
    return out, scales


def _int_det(m: list[list[int]]) -> int:
    """Bareiss determinant with row pivoting."""
    a = [row[:] for row in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def leading_minors(m) -> list[Fraction]:
    """Exact leading principal minors of a square matrix, in order.

    Accepts a :class:`HurwitzMatrix` or any square nested sequence of reals.
    Uses fraction-free (Bareiss) elimination, whose k-th pivot is exactly
    the k-th leading minor; a zero pivot falls back to pivoted determinants
    of the remaining leading blocks.
    """
    rows = m.entries if isinstance(m, HurwitzMatrix) else [list(r) for r in m]
    n = len(rows)
    if n == 0:
        return []
    a, scales = _integer_rows(rows)
    prefix = [1]
    for s in scales:
        prefix.append(prefix[-1] * s)
    minors: list[Fraction] = []
    work = [row[:] for row in a]
    prev = 1
    for k in range(n):
        piv = work[k][k]
        minors.append(Fraction(piv, prefix[k + 1]))
        if piv == 0:
            for kk in range(k + 1, n):
                block = [row[: kk + 1] for row in a[: kk + 1]]
                minors.append(Fraction(_int_det(block), prefix[kk + 1]))
            break
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                work[i][j] = (work[i][j] * piv - work[i][k] * work[k][j]) // prev
        prev = piv
    return minors


def minors_positive(p: Polynomial) -> bool:
    """Routh-Hurwitz stability test (positive leading coefficient assumed)."""
    p = p.with_positive_leading()
    if (p.degree or 0) == 0:
        return True
    return all(v > 0 for v in leading_minors(hurwitz_matrix(p)))


def minors_nonnegative(p: Polynomial) -> bool:
    p = p.with_positive_leading()
    if (p.degree or 0) == 0:
        return True
    return all(v >= 0 for v in leading_minors(hurwitz_matrix(p)))


@dataclass
class StabilityReport:
    classification: str
    margin: float
    witness_roots: list = field(default_factory=list)

    @property
    def is_stable(self) -> bool:
        return self.classification == STABLE

    @property
    def is_quasi_stable(self) -> bool:
        return self.classification in (STABLE, QUASI)

    def to_json(self) -> dict:
        return {
            "classification": self.classification,
            "margin": None if math.isinf(self.margin) else self.margin,
            "witness_roots": [{"re": float(r.real), "im": float(r.imag)} for r in self.witness_roots],
        }


def classify(p: Polynomial, dps: int | None = None, margin_tol: float = MARGIN_TOL) -> StabilityReport:
    """Root-location classification with a Routh-Hurwitz cross-check.

    Roots are grouped into clusters (see :func:`cluster_roots`) so that a
    multiple root on the imaginary axis, which any finite-precision root
    finder splits into a small ring, is judged by its centroid.  A cluster
    at ``c`` counts as on the axis when ``|Re c| <= margin_tol * max(1, |c|)``.

    A "stable" verdict must be confirmed by exact positive Hurwitz minors;
    disagreement raises :class:`StabilityConsistencyError`.
    """
    if p.is_zero():
        raise ValueError("cannot classify the zero polynomial")
    p = p.with_positive_leading()
    if p.degree == 0:
        return StabilityReport(STABLE, -math.inf, [])
    rts = roots(p, dps=dps)
    clusters = cluster_roots(rts, cluster_radius(rts))
    margin = -math.inf
    any_right, all_left = False, True
    witnesses = []
    for cent, mult in clusters:
        re = float(cent.real)
        tol = margin_tol * max(1.0, float(abs(cent)))
        margin = max(margin, re)
        if re > tol:
            any_right = True
        if re >= -tol:
            all_left = False
            witnesses.extend([complex(cent)] * mult)
    if any_right:
        cls = UNSTABLE
    elif all_left:
        cls = STABLE
    else:
        cls = QUASI
    if cls == STABLE and not minors_positive(p):
        raise StabilityConsistencyError(
            f"roots place every root left of the axis (margin {margin:.3e}) but a Hurwitz minor is <= 0"
        )
    return StabilityReport(cls, margin, witnesses)


def is_quasi_stable_shifted(p: Polynomial, eps) -> bool:
    """Whether ``A(p(s + eps))`` has all leading minors positive.

    The shift is done in exact arithmetic on the rational value of every
    coefficient.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    q = p.to_fraction().shift(to_fraction(eps))
    if q.leading <= 0:
        raise NonPositiveLeading(f"leading coefficient {q.leading} is not positive")
    if q.degree == 0:
        return True
    return all(v > 0 for v in leading_minors(hurwitz_matrix(q)))


__all__ = [
    "HurwitzMatrix",
    "StabilityReport",
    "hurwitz_matrix",
    "leading_minors",
    "classify",
    "is_quasi_stable_shifted",
    "minors_positive",
    "minors_nonnegative",
    "STABLE",
    "QUASI",
    "UNSTABLE",
    "MARGIN_TOL",
]


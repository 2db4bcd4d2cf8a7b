"""Coefficient-matching systems derived from a symbolic template.

Expanding ``(s^2 - 2 delta s + 1) x + (s^2 - 1) y - z`` over the unknowns
gives one multinomial per power of ``s``.  The leading power must vanish
identically, as must every odd power of an even template; the remaining
coefficients are the equations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import OddCoefficientNonzero
from .template import SymbolicTemplate, mn_eval


@dataclass
class CompiledSystem:
    """Flat term arrays consumed by the Newton kernels."""

    n_vars: int
    n_eq: int
    term_eq: np.ndarray
    term_coef: np.ndarray
    term_exp: np.ndarray
    jac_idx: np.ndarray  # flat index eq * n_vars + var
    jac_coef: np.ndarray
    jac_exp: np.ndarray
    max_exp: int
    term_onehot: np.ndarray = field(default=None, repr=False)
    jac_onehot: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.term_onehot is None:
            self.term_onehot = np.zeros((self.term_eq.size, self.n_eq))
            self.term_onehot[np.arange(self.term_eq.size), self.term_eq] = 1.0
        if self.jac_onehot is None:
            self.jac_onehot = np.zeros((self.jac_idx.size, self.n_eq * self.n_vars))
            self.jac_onehot[np.arange(self.jac_idx.size), self.jac_idx] = 1.0


@dataclass
class CoefficientSystem:
    unknowns: tuple
    equations: list
    powers: list
    source: object = None
    _compiled: CompiledSystem | None = field(default=None, repr=False)

    @property
    def n_unknowns(self) -> int:
        return len(self.unknowns)

    @property
    def n_equations(self) -> int:
        return len(self.equations)

    @property
    def is_square(self) -> bool:
        return self.n_unknowns == self.n_equations

    def vector(self, point) -> list:
        if isinstance(point, Mapping):
            return [point[n] for n in self.unknowns]
        point = list(point)
        if len(point) != self.n_unknowns:
            raise ValueError(f"expected {self.n_unknowns} values, got {len(point)}")
        return point

    def residual(self, point) -> list:
        """Equation values at ``point``; works for any numeric type."""
        v = self.vector(point)
        return [mn_eval(eq, v) for eq in self.equations]

    def residual_norm(self, point) -> float:
        return max(abs(float(r)) for r in self.residual(point))

    def scaled_residual_norm(self, point) -> float:
        """``max_e |F_e| / (1 + sum_t |term_t|)``, the convergence measure."""
        v = self.vector(point)
        worst = 0.0
        for eq in self.equations:
            val, mag = 0, 0
            for e, c in eq.items():
                t = c
                for x, k in zip(v, e):
                    if k:
                        t = t * x ** k
                val = val + t
                mag = mag + abs(t)
            worst = max(worst, abs(float(val)) / (1.0 + float(mag)))
        return worst

    def jacobian(self, point) -> list:
        """Exact partial derivatives, rows = equations, columns = unknowns."""
        v = self.vector(point)
        n = self.n_unknowns
        rows = []
        for eq in self.equations:
            row = [0] * n
            for e, c in eq.items():
                for var in range(n):
                    k = e[var]
                    if not k:
                        continue
                    t = c * k
                    for w, (x, kk) in enumerate(zip(v, e)):
                        p = kk - 1 if w == var else kk
                        if p:
                            t = t * x ** p
                    row[var] = row[var] + t
            rows.append(row)
        return rows

    def compiled(self) -> CompiledSystem:
        if self._compiled is None:
            self._compiled = compile_system(self)
        return self._compiled

    def to_json(self) -> list:
        out = []
        for power, eq in zip(self.powers, self.equations):
            terms = []
            for e, c in sorted(eq.items(), reverse=True):
                terms.append({
                    "exponents": {n: k for n, k in zip(self.unknowns, e) if k},
                    "coeff": c,
                })
            out.append({"power": power, "terms": terms})
        return out


def build_system(tpl: SymbolicTemplate) -> CoefficientSystem:
    """Equate coefficients of the identity for ``tpl``.

    Raises :class:`OddCoefficientNonzero` when an odd coefficient of an even
    template, or the leading coefficient, fails to vanish identically.
    """
    poly = tpl.identity_lhs_minus_rhs()
    while poly and not poly[-1]:
        poly.pop()
    top = len(poly)
    eqs, powers = [], []
    deg_z = sum((len(f) - 1) * p for f, p in tpl.z)
    for i in range(max(top, deg_z + 1)):
        coeff = poly[i] if i < len(poly) else {}
        if i == deg_z:
            if coeff:
                raise OddCoefficientNonzero(f"leading coefficient s^{i} does not cancel: {coeff}")
            continue
        if tpl.even and i % 2 == 1:
            if coeff:
                raise OddCoefficientNonzero(f"odd coefficient s^{i} does not cancel: {coeff}")
            continue
        if i > deg_z:
            if coeff:
                raise OddCoefficientNonzero(f"coefficient s^{i} above deg z does not cancel")
            continue
        eqs.append(coeff)
        powers.append(i)
    return CoefficientSystem(tuple(tpl.unknowns), eqs, powers, source=tpl.source or tpl)


def compile_system(sys: CoefficientSystem) -> CompiledSystem:
    nv = sys.n_unknowns
    t_eq, t_coef, t_exp = [], [], []
    j_idx, j_coef, j_exp = [], [], []
    for ei, eq in enumerate(sys.equations):
        for e, c in eq.items():
            t_eq.append(ei)
            t_coef.append(float(c))
            t_exp.append(e)
            for var in range(nv):
                if e[var]:
                    de = list(e)
                    de[var] -= 1
                    j_idx.append(ei * nv + var)
                    j_coef.append(float(c * e[var]))
                    j_exp.append(de)
    term_exp = np.asarray(t_exp, dtype=np.int32).reshape(-1, nv)
    jac_exp = np.asarray(j_exp, dtype=np.int32).reshape(-1, nv)
    max_exp = int(term_exp.max()) if term_exp.size else 0
    return CompiledSystem(
        n_vars=nv,
        n_eq=sys.n_equations,
        term_eq=np.asarray(t_eq, dtype=np.int32),
        term_coef=np.asarray(t_coef, dtype=np.float64),
        term_exp=np.ascontiguousarray(term_exp),
        jac_idx=np.asarray(j_idx, dtype=np.int32),
        jac_coef=np.asarray(j_coef, dtype=np.float64),
        jac_exp=np.ascontiguousarray(jac_exp),
        max_exp=max_exp,
    )


def residual(sys: CoefficientSystem, point) -> tuple[list, float]:
    """Equation values and their max-norm."""
    r = sys.residual(point)
    return r, max((abs(float(v)) for v in r), default=0.0)


def jacobian(sys: CoefficientSystem, point) -> list:
    return sys.jacobian(point)


def finite_difference_jacobian(sys: CoefficientSystem, point, h: float = 1e-6) -> np.ndarray:
    """Central differences, used as an independent check of :func:`jacobian`."""
    v = np.asarray(sys.vector(point), dtype=float)
    cols = []
    for i in range(len(v)):
        up, dn = v.copy(), v.copy()
        up[i] += h
        dn[i] -= h
        fu = np.asarray(sys.residual(up), dtype=float)
        fd = np.asarray(sys.residual(dn), dtype=float)
        cols.append((fu - fd) / (2 * h))
    return np.column_stack(cols)

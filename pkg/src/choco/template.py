"""Symbolic templates: x, y, z as products of factors with unknown coefficients.

A multinomial is a ``dict`` mapping an exponent tuple (one entry per
unknown) to an integer coefficient.  A symbolic polynomial in ``s`` is a list
of multinomials indexed by the power of ``s``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

Multinomial = dict
SymPoly = list


def mn_add(a: Multinomial, b: Multinomial, sign: int = 1) -> Multinomial:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + sign * c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def mn_mul(a: Multinomial, b: Multinomial) -> Multinomial:
    out: Multinomial = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(e, 0) + ca * cb
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def mn_const(c: int, nvars: int) -> Multinomial:
    return {(0,) * nvars: c} if c else {}


def mn_var(index: int, nvars: int, coef: int = 1) -> Multinomial:
    e = [0] * nvars
    e[index] = 1
    return {tuple(e): coef}


def sp_mul(p: SymPoly, q: SymPoly) -> SymPoly:
    out: SymPoly = [{} for _ in range(len(p) + len(q) - 1)]
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            if b:
                out[i + j] = mn_add(out[i + j], mn_mul(a, b))
    return out


def sp_add(p: SymPoly, q: SymPoly, sign: int = 1) -> SymPoly:
    n = max(len(p), len(q))
    return [
        mn_add(p[i] if i < len(p) else {}, q[i] if i < len(q) else {}, sign)
        for i in range(n)
    ]


def sp_pow(p: SymPoly, k: int, nvars: int) -> SymPoly:
    out: SymPoly = [mn_const(1, nvars)]
    for _ in range(k):
        out = sp_mul(out, p)
    return out


def sp_trim(p: SymPoly) -> SymPoly:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def mn_eval(m: Multinomial, values) -> object:
    acc = 0
    for e, c in m.items():
        term = c
        for v, k in zip(values, e):
            if k:
                term = term * v ** k
        acc = acc + term
    return acc


@dataclass
class SymbolicTemplate:
    """Structural description of x, y, z over named unknowns.

    ``x``, ``y`` and ``z`` are lists of ``(factor, power)`` pairs, each factor
    a :data:`SymPoly`.  ``even`` marks templates whose odd coefficients in the
    identity must cancel identically (every grammar configuration).
    """

    unknowns: tuple
    x: list
    y: list
    z: list
    even: bool = True
    label: str = ""
    source: object = field(default=None, repr=False)

    @property
    def nvars(self) -> int:
        return len(self.unknowns)

    def index(self, name: str) -> int:
        return self.unknowns.index(name)

    def expand(self, part: str) -> SymPoly:
        out: SymPoly = [mn_const(1, self.nvars)]
        for factor, power in getattr(self, part):
            out = sp_mul(out, sp_pow(factor, power, self.nvars))
        return sp_trim(out)

    def identity_lhs_minus_rhs(self) -> SymPoly:
        """Coefficients of ``(s^2 - 2 delta s + 1) x + (s^2 - 1) y - z``."""
        n = self.nvars
        d = self.index("delta")
        quad = [mn_const(1, n), mn_var(d, n, -2), mn_const(1, n)]
        plant = [mn_const(-1, n), {}, mn_const(1, n)]
        lhs = sp_add(sp_mul(quad, self.expand("x")), sp_mul(plant, self.expand("y")))
        return sp_add(lhs, self.expand("z"), sign=-1)


def generic_cubic_template() -> SymbolicTemplate:
    """x = s^3 + A s^2 + B s + C, y = k, z = s^5.

    The odd-degree motivating case; it is outside the even configuration
    grammar and is shipped as a hand-built template.
    """
    names = ("delta", "A", "B", "C", "k")
    n = len(names)
    x = [mn_var(3, n), mn_var(2, n), mn_var(1, n), mn_const(1, n)]
    y = [mn_var(4, n)]
    z = [{} for _ in range(5)] + [mn_const(1, n)]
    return SymbolicTemplate(names, [(x, 1)], [(y, 1)], [(z, 1)], even=False, label="cubic")

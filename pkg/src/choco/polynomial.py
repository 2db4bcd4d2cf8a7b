"""Dense univariate real polynomials, rational functions and Mobius maps.

Coefficients are stored in ascending order (``coeffs[i]`` multiplies ``s**i``)
and may be any real number type that supports field arithmetic: ``int``,
``float``, :class:`fractions.Fraction` or :class:`mpmath.mpf`.  Floating
polynomials are handled in double precision; exact or multiprecision ones are
routed to :mod:`mpmath` for root finding, so a pipeline can stay exact end to
end and only touch floating point when it needs roots.
"""
from __future__ import annotations

import json
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import NonConvergence, NotAFactor

ROOT_RESIDUAL_TOL = 1e-10
PAIRING_TOL = 1e-8
DEFLATE_TOL = 1e-8
WORK_DPS = 60
POLISH_STEPS = 2


from mpmath.ctx_mp_python import _mpc as _MPC, _mpf as _MPF  # bases shared by every context


def is_mpf(v) -> bool:
    return isinstance(v, _MPF)


def is_mpc(v) -> bool:
    return isinstance(v, _MPC)


def _clean(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, bool):
        return int(v)
    return v


def is_exact(v) -> bool:
    return isinstance(v, (int, Fraction))


def to_fraction(v) -> Fraction:
    """Exact rational value of an int, float, Fraction or mpf."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, (float, np.floating)):
        return Fraction(float(v))
    if hasattr(v, "man_exp"):  # mpf from any mpmath context
        if not mpmath.isfinite(v):
            raise ValueError(f"cannot convert {v} to Fraction")
        man, exp = v.man_exp
        man = int(man)
        return Fraction(man * 2 ** exp) if exp >= 0 else Fraction(man, 2 ** -exp)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"cannot convert {type(v).__name__} to Fraction")


def to_ctx(ctx, v):
    """Convert a real or complex scalar into an mpmath context."""
    if isinstance(v, Fraction):
        return ctx.mpf(v.numerator) / v.denominator
    if isinstance(v, complex) or is_mpc(v):
        return ctx.mpc(v)
    return ctx.mpf(v)


def make_context(dps: int):
    ctx = mpmath.MPContext()
    ctx.dps = dps
    return ctx


class Polynomial:
    """Immutable dense polynomial in ``s`` with ascending coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [_clean(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    # construction helpers
    @classmethod
    def constant(cls, value) -> "Polynomial":
        return cls([value])

    @classmethod
    def monomial(cls, degree: int, value=1) -> "Polynomial":
        return cls([0] * degree + [value])

    @classmethod
    def from_roots(cls, roots: Sequence, leading=1.0, tol: float = 0.0) -> "Polynomial":
        """Real polynomial with the given roots.

        Complex roots must come in conjugate pairs; each root with
        ``Im > tol`` is combined with its partner into a real quadratic and
        roots with ``Im < -tol`` are skipped.
        """
        p = cls([leading])
        for r in roots:
            im = r.imag if hasattr(r, "imag") else 0
            re = r.real if hasattr(r, "real") else r
            if abs(im) <= tol:
                p = p * cls([-re, 1])
            elif im > 0:
                p = p * cls([re * re + im * im, -2 * re, 1])
        return p

    # basic properties
    @property
    def degree(self) -> int | None:
        return len(self.coeffs) - 1 if self.coeffs else None

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, numbers.Number) or is_mpf(other):
            return self.coeffs == Polynomial([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    # arithmetic
    @staticmethod
    def _coerce(other):
        if isinstance(other, Polynomial):
            return other
        return Polynomial([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-a for a in self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(a * other for a in self.coeffs)
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Polynomial(a / scalar for a in self.coeffs)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial([1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # calculus and substitutions
    def derivative(self) -> "Polynomial":
        return Polynomial(i * a for i, a in enumerate(self.coeffs) if i > 0)

    def shift(self, a) -> "Polynomial":
        """Taylor shift: the polynomial ``s -> p(s + a)``."""
        c = list(self.coeffs)
        n = len(c)
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                c[j] = c[j] + a * c[j + 1]
        return Polynomial(c)

    def scale_var(self, sigma) -> "Polynomial":
        """The polynomial ``s -> p(sigma * s)``."""
        out, pw = [], 1
        for a in self.coeffs:
            out.append(a * pw)
            pw = pw * sigma
        return Polynomial(out)

    def norm_inf(self):
        return max((abs(a) for a in self.coeffs), default=0)

    def normalized(self) -> "Polynomial":
        """Scaled so the largest coefficient magnitude is 1."""
        m = self.norm_inf()
        return self if m == 0 else self / m

    def with_positive_leading(self) -> "Polynomial":
        return -self if self.coeffs and self.leading < 0 else self

    def map_coeffs(self, fn) -> "Polynomial":
        return Polynomial(fn(a) for a in self.coeffs)

    def to_float(self) -> "Polynomial":
        return self.map_coeffs(float)

    def to_fraction(self) -> "Polynomial":
        return self.map_coeffs(to_fraction)

    def is_float(self) -> bool:
        return all(isinstance(a, (float, int)) and not isinstance(a, bool) for a in self.coeffs)

    # serialization
    def to_json(self) -> list:
        return [json_number(a) for a in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "Polynomial":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data)


def json_number(v):
    """Render a coefficient for JSON, keeping extra digits of exact types.

    Floats and ints pass through; Fractions and mpfs become :class:`RawNumber`
    so :func:`dumps` can emit them with full precision.
    """
    if isinstance(v, (int, float)):
        return v
    return RawNumber(v)


class RawNumber:
    """A high-precision real emitted verbatim as a JSON number."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def text(self, digits: int = 40) -> str:
        v = self.value
        if isinstance(v, Fraction):
            if v.denominator == 1:
                return str(v.numerator)
            ctx = make_context(digits + 5)
            v = to_ctx(ctx, v)
            return mpmath.nstr(v, digits, min_fixed=-4, max_fixed=6, strip_zeros=False).replace("e+", "e")
        return mpmath.nstr(v, digits, min_fixed=-4, max_fixed=6, strip_zeros=False).replace("e+", "e")


def dumps(obj, digits: int = 40, **kw) -> str:
    """``json.dumps`` that understands :class:`RawNumber` placeholders."""
    table = {}

    def default(o):
        if isinstance(o, RawNumber):
            key = f"@@raw{len(table)}@@"
            table[key] = o.text(digits)
            return key
        if isinstance(o, Fraction) or is_mpf(o):
            return default(RawNumber(o))
        if isinstance(o, (np.floating,)):
            return float(o)
        if isinstance(o, (np.integer,)):
            return int(o)
        raise TypeError(f"{type(o).__name__} is not JSON serializable")

    text = json.dumps(obj, default=default, **kw)
    for key, val in table.items():
        text = text.replace(f'"{key}"', val)
    return text


def loads_exact(text: str):
    """Parse JSON keeping every non-integer number as an exact Fraction."""
    return json.loads(text, parse_float=Fraction)


# ----------------------------------------------------------------------------
# division


def _poly_divmod_top(p: Sequence, f: Sequence):
    """Long division from the leading end; returns (quotient, remainder)."""
    p = list(p)
    n, m = len(p) - 1, len(f) - 1
    if n < m:
        return [], p
    q = [0] * (n - m + 1)
    lead = f[-1]
    for k in range(n - m, -1, -1):
        coef = p[k + m] / lead
        q[k] = coef
        if coef == 0:
            continue
        for i in range(m + 1):
            p[k + i] = p[k + i] - coef * f[i]
    return q, p[:m]


def poly_divmod(p: Polynomial, f: Polynomial) -> tuple[Polynomial, Polynomial]:
    if f.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    q, r = _poly_divmod_top(p.coeffs, f.coeffs)
    return Polynomial(q), Polynomial(r)


def deflate_factor(p: Polynomial, f: Polynomial, tol: float = DEFLATE_TOL) -> Polynomial:
    """Quotient ``q`` with ``p ~= q * f``.

    Division is tried from both ends (the bottom-up variant is the stable one
    when the roots of ``f`` lie outside the unit disk) and the quotient with
    the smaller reconstruction error wins.  Raises :class:`NotAFactor` when
    ``||p - q f||_inf > tol * ||p||_inf``.
    """
    if f.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return Polynomial()
    if f.degree > p.degree:
        raise NotAFactor(f"deg f = {f.degree} exceeds deg p = {p.degree}")
    q_top, _ = _poly_divmod_top(p.coeffs, f.coeffs)
    # bottom-up division = top-down division of the reversed polynomials;
    # f may have zero constant terms, which we strip first
    best = None
    for q in (Polynomial(q_top), _divide_from_bottom(p, f)):
        if q is None:
            continue
        err = (p - q * f).norm_inf()
        if best is None or err < best[0]:
            best = (err, q)
    err, q = best
    scale = p.norm_inf()
    if err > tol * scale:
        raise NotAFactor(f"remainder {float(err):.3e} exceeds {tol:.1e} * {float(scale):.3e}")
    return q


def _divide_from_bottom(p: Polynomial, f: Polynomial):
    shift = 0
    while shift < len(f.coeffs) and f.coeffs[shift] == 0:
        shift += 1
    if any(a != 0 for a in p.coeffs[:shift]):
        return None
    pc = p.coeffs[shift:]
    fc = f.coeffs[shift:]
    nq = len(pc) - len(fc) + 1
    if nq <= 0:
        return None
    # reversed-polynomial division, truncated to the quotient's length
    q = [0] * nq
    work = list(pc)
    for k in range(nq):
        coef = work[k] / fc[0]
        q[k] = coef
        if coef == 0:
            continue
        for i in range(len(fc)):
            if k + i < len(work):
                work[k + i] = work[k + i] - coef * fc[i]
    return Polynomial(q)


# ----------------------------------------------------------------------------
# roots


def backward_error(p: Polynomial, r) -> float:
    """``|p(r)| / sum |a_i| |r|^i``, the relative residual of an approximate root."""
    num, den, pw = 0, 0, 1
    ar = abs(r)
    val = p(r)
    for a in p.coeffs:
        den += abs(a) * pw
        pw *= ar
    return float(abs(val) / den) if den else 0.0


def _polish(p: Polynomial, dp: Polynomial, roots, steps: int):
    """Newton-polish isolated roots.

    Members of a cluster are left alone: Newton moves them independently and
    spoils the cluster centroid, which is what callers rely on for multiple
    roots.
    """
    radius = cluster_radius(roots)
    isolated = []
    for i, r in enumerate(roots):
        scale = radius * max(1.0, float(abs(r)))
        isolated.append(all(float(abs(r - q)) > scale for j, q in enumerate(roots) if j != i))
    out = []
    for r, alone in zip(roots, isolated):
        if not alone:
            out.append(r)
            continue
        pr = p(r)
        for _ in range(steps):
            d = dp(r)
            if d == 0:
                break
            cand = r - pr / d
            pc = p(cand)
            if abs(pc) < abs(pr):
                r, pr = cand, pc
            else:
                break
        out.append(r)
    return out


def _roots_double(c: Sequence[float]) -> list[complex]:
    n = len(c) - 1
    if n == 1:
        return [complex(-c[0] / c[1])]
    lead = c[-1]
    comp = np.zeros((n, n))
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -np.asarray(c[:-1], dtype=float) / lead
    # LAPACK geev balances the companion matrix before the QR iteration
    ev = np.linalg.eigvals(comp)
    return [complex(z) for z in ev]


def _roots_mp(c: Sequence, dps: int):
    ctx = make_context(dps)
    cc = [to_ctx(ctx, a) for a in c]
    n = len(cc) - 1
    if n == 1:
        return [ctx.mpc(-cc[0] / cc[1])], ctx
    comp = ctx.zeros(n, n)
    for i in range(1, n):
        comp[i, i - 1] = 1
    for i in range(n):
        comp[i, n - 1] = -cc[i] / cc[n]
    ev = ctx.eig(comp, left=False, right=False)
    return [ctx.mpc(z) for z in ev], ctx


def roots(p: Polynomial, dps: int | None = None, residual_tol: float = ROOT_RESIDUAL_TOL) -> list:
    """All complex roots of ``p`` with multiplicity.

    Exact zero roots are split off first.  Float polynomials use the balanced
    companion-matrix eigenvalues followed by Newton polish; exact or mpf
    polynomials (or an explicit ``dps``) use the mpmath eigenvalue solver at
    ``dps`` digits and return mpc values.  The retry schedule escalates
    double -> 30 -> 60 digits; :class:`NonConvergence` is raised when every
    stage leaves a root with backward error above ``residual_tol``.
    """
    if p.is_zero() or p.degree < 1:
        raise ValueError("roots() needs a nonzero polynomial of degree >= 1")
    zeros = 0
    while p.coeffs[zeros] == 0:
        zeros += 1
    c = p.coeffs[zeros:]
    reduced = Polynomial(c)
    if len(c) == 1:
        return [0j] * zeros if dps is None and p.is_float() else [mpmath.mpc(0)] * zeros

    if dps is None and reduced.is_float():
        schedule = [None, 30, WORK_DPS]
    else:
        schedule = [dps or WORK_DPS, 2 * (dps or WORK_DPS)]
    last_err = None
    for stage in schedule:
        if stage is None:
            rts = _roots_double(c)
            rts = _polish(reduced, reduced.derivative(), rts, POLISH_STEPS)
            zero = 0j
        else:
            rts, ctx = _roots_mp(c, stage)
            rp = Polynomial(to_ctx(ctx, a) for a in c)
            rts = _polish(rp, rp.derivative(), rts, POLISH_STEPS)
            if dps is None and reduced.is_float():
                rts = [complex(r) for r in rts]
                zero = 0j
            else:
                zero = ctx.mpc(0)
            reduced_eval = rp
        worst = max(backward_error(reduced if stage is None else reduced_eval, r) for r in rts)
        tol = residual_tol if stage is None else max(residual_tol * 1e-20, 10.0 ** (-stage / 2))
        if worst <= tol:
            return list(rts) + [zero] * zeros
        last_err = worst
    raise NonConvergence(f"root backward error {last_err:.3e} after retries")


def cluster_roots(rts: Sequence, radius: float) -> list[tuple[object, int]]:
    """Group roots by single linkage within ``radius * max(1, |r|)``.

    Returns ``(centroid, multiplicity)`` pairs.  The centroid of a cluster
    produced by a perturbed multiple root is accurate to first order in the
    perturbation, unlike its individual members.
    """
    n = len(rts)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    order = sorted(range(n), key=lambda i: (float(rts[i].real), float(rts[i].imag)))
    for a_pos, i in enumerate(order):
        ri = rts[i]
        scale = radius * max(1.0, float(abs(ri)))
        for j in order[a_pos + 1:]:
            rj = rts[j]
            if float(rj.real - ri.real) > scale:
                break
            if float(abs(ri - rj)) <= scale:
                parent[find(i)] = find(j)
    groups: dict[int, list] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(rts[i])
    out = []
    for members in groups.values():
        total = members[0] * 0
        for r in members:
            total = total + r
        out.append((total / len(members), len(members)))
    out.sort(key=lambda cm: (float(cm[0].real), float(cm[0].imag)))
    return out


def cluster_radius(rts: Sequence) -> float:
    """Linkage radius matched to the working precision of ``rts``."""
    if rts and is_mpc(rts[0]):
        prec = rts[0].context.prec
        eps = 2.0 ** (-prec)
    else:
        eps = np.finfo(float).eps
    return eps ** (1.0 / 6.0)


# ----------------------------------------------------------------------------
# rational functions and Mobius maps


@dataclass(frozen=True)
class RationalFunction:
    num: Polynomial
    den: Polynomial

    def __post_init__(self):
        if self.den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def scaled(self) -> "RationalFunction":
        """Jointly rescale so the largest coefficient magnitude is 1."""
        m = max(self.num.norm_inf(), self.den.norm_inf())
        return RationalFunction(self.num / m, self.den / m)


@dataclass(frozen=True)
class MobiusMap:
    """``s -> (a s + b) / (c s + d)``."""

    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        if self.det == 0:
            raise ValueError("degenerate Mobius map (ad - bc = 0)")

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def __call__(self, s):
        return (self.a * s + self.b) / (self.c * s + self.d)

    def compose(self, inner: "MobiusMap") -> "MobiusMap":
        """The map ``s -> self(inner(s))``."""
        return MobiusMap(
            self.a * inner.a + self.b * inner.c,
            self.a * inner.b + self.b * inner.d,
            self.c * inner.a + self.d * inner.c,
            self.c * inner.b + self.d * inner.d,
        )

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def proportional_to(self, other: "MobiusMap", tol: float = 1e-12) -> bool:
        u = [self.a, self.b, self.c, self.d]
        v = [other.a, other.b, other.c, other.d]
        i = max(range(4), key=lambda k: abs(v[k]))
        lam = u[i] / v[i]
        scale = max(abs(x) for x in u)
        return all(abs(x - lam * y) <= tol * scale for x, y in zip(u, v))


def mobius_compose(r: RationalFunction, m: MobiusMap) -> RationalFunction:
    """``s -> r(m(s))`` by homogenization with ``(c s + d)**N``.

    ``N = max(deg num, deg den)``.  No common factors are cancelled here.
    """
    n = max(r.num.degree or 0, r.den.degree or 0)
    lin_num = Polynomial([m.b, m.a])
    lin_den = Polynomial([m.d, m.c])
    # lin_num**i * lin_den**(n - i) for i = 0..n
    up = [Polynomial([1])]
    for _ in range(n):
        up.append(up[-1] * lin_num)
    down = [Polynomial([1])]
    for _ in range(n):
        down.append(down[-1] * lin_den)
    basis = [up[i] * down[n - i] for i in range(n + 1)]

    def hom(p: Polynomial) -> Polynomial:
        acc = Polynomial()
        for i, a in enumerate(p.coeffs):
            if a != 0:
                acc = acc + basis[i] * a
        return acc

    return RationalFunction(hom(r.num), hom(r.den))


def _common_factor(rn: list, rd: list, pairing_tol: float):
    """Pair clusters of two root lists; returns (root, count) for shared ones."""
    radius = max(cluster_radius(rn), cluster_radius(rd))
    cn = cluster_roots(rn, radius)
    cd = [list(x) for x in cluster_roots(rd, radius)]
    shared = []
    for cent, mult in cn:
        best, best_dist = None, None
        for k, (cent2, mult2) in enumerate(cd):
            if mult2 == 0:
                continue
            dist = float(abs(cent - cent2)) / max(1.0, float(abs(cent)))
            if dist <= pairing_tol and (best_dist is None or dist < best_dist):
                best, best_dist = k, dist
        if best is not None:
            cnt = min(mult, cd[best][1])
            shared.append(((cent + cd[best][0]) / 2, cnt))
            cd[best][1] -= cnt
    return shared


def lowest_terms(
    r: RationalFunction,
    pairing_tol: float = PAIRING_TOL,
    dps: int | None = None,
    deflate_tol: float = DEFLATE_TOL,
) -> RationalFunction:
    """Cancel numerator/denominator roots that coincide within ``pairing_tol``.

    Shared roots are found by pairing root clusters; the product of the
    shared linear and quadratic factors is then divided out of both sides,
    which keeps exact inputs exact when nothing cancels.
    """
    num, den = r.num, r.den
    if num.is_zero():
        return RationalFunction(Polynomial(), Polynomial([1]))
    if (num.degree or 0) < 1 or (den.degree or 0) < 1:
        return r
    rn = roots(num, dps=dps)
    rd = roots(den, dps=dps)
    if is_mpc(rn[0]) != is_mpc(rd[0]):
        rn = [complex(z) for z in rn]
        rd = [complex(z) for z in rd]
    shared = _common_factor(rn, rd, pairing_tol)
    if not shared:
        return r
    exact = not (num.is_float() and den.is_float())
    factor = Polynomial([1])
    imag_tol = pairing_tol
    for cent, cnt in shared:
        re, im = cent.real, cent.imag
        if exact:
            re, im = to_fraction(re), to_fraction(im)
        else:
            re, im = float(re), float(im)
        if abs(float(im)) <= imag_tol * max(1.0, abs(float(re))):
            lin = Polynomial([-re, 1])
        elif float(im) > 0:
            lin = Polynomial([re * re + im * im, -2 * re, 1])
        else:
            continue
        factor = factor * lin ** cnt
    if (factor.degree or 0) == 0:
        return r
    return RationalFunction(
        deflate_factor(num, factor, deflate_tol),
        deflate_factor(den, factor, deflate_tol),
    )


def shares_root(r: RationalFunction, pairing_tol: float = PAIRING_TOL, dps: int | None = None) -> bool:
    """True when numerator and denominator have a root pair within tolerance."""
    if (r.num.degree or 0) < 1 or (r.den.degree or 0) < 1:
        return False
    rn, rd = roots(r.num, dps=dps), roots(r.den, dps=dps)
    if is_mpc(rn[0]) != is_mpc(rd[0]):
        rn = [complex(z) for z in rn]
        rd = [complex(z) for z in rd]
    return bool(_common_factor(rn, rd, pairing_tol))


S = Polynomial([0, 1])


def isclose_multiset(a: Sequence, b: Sequence, tol: float) -> bool:
    """Greedy matching of two root multisets within relative ``tol``."""
    if len(a) != len(b):
        return False
    pool = [complex(z) for z in b]
    for z in a:
        z = complex(z)
        k = min(range(len(pool)), key=lambda i: abs(pool[i] - z))
        if abs(pool[k] - z) > tol * max(1.0, abs(z)):
            return False
        pool.pop(k)
    return True


__all__ = [
    "Polynomial",
    "RationalFunction",
    "MobiusMap",
    "roots",
    "mobius_compose",
    "lowest_terms",
    "deflate_factor",
    "poly_divmod",
    "cluster_roots",
    "cluster_radius",
    "backward_error",
    "to_fraction",
    "dumps",
    "loads_exact",
    "S",
]

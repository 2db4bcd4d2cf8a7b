"""From a quasi-admissible delta to certified stable x, y, z.

The rational function R = (s^2 - 1) y / z is pulled back through the Mobius
map s -> ((2+e) s + e) / (e s + 2 + e), which conjugates a dilation of the
unit disk by the Cayley map (1+s)/(1-s).  Writing the result as p/q in
lowest terms gives y_hat = p / (s^2 - 1), z_hat = q, and q - p factors as
(s^2 - 2 delta_hat s + 1) x_hat.  Every root that sat on the imaginary axis
moves strictly into the left half-plane, at the price of a slightly smaller
delta.

The pipeline runs on exact rationals: inputs are converted with
:func:`to_fraction`, the composition and the division by s^2 - 1 are exact,
and only root finding (for lowest terms, for delta_hat and for the final
classification) goes through mpmath at ``dps`` digits.  The reverse direction
(admissible towards quasi-admissible) is the inverse dilation and is not
provided.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .configuration import AlgebraicConfiguration, instantiate, parse_shorthand
from .errors import CertificationFailed, NotAFactor, OutOfRange, StabilityConsistencyError
from .polynomial import (
    PAIRING_TOL,
    WORK_DPS,
    MobiusMap,
    Polynomial,
    RationalFunction,
    deflate_factor,
    dumps,
    lowest_terms,
    make_context,
    mobius_compose,
    roots,
    to_ctx,
    to_fraction,
)
from .stability import classify

CERT_TOL = 1e-8
AGREE_TOL = 1e-6
POLISH_DPS = 120

PLANT = Polynomial([-1, 0, 1])  # s^2 - 1


def _exact(v) -> Fraction:
    # decimal literals such as 0.01 are meant as 1/100, not as the nearest double
    if isinstance(v, float):
        return Fraction(repr(v))
    return to_fraction(v)


def critical_t(delta) -> float:
    """``t = sqrt((1 - delta) / (1 + delta))``: the critical points map to +-i t."""
    return math.sqrt((1 - float(delta)) / (1 + float(delta)))


def delta_epsilon(delta, epsilon) -> float:
    """Predicted admissible delta after an epsilon-dilation.

    ``(1 - (1+e)^2 t^2) / (1 + (1+e)^2 t^2)``.  Raises :class:`OutOfRange`
    unless ``0 < delta < 1``, ``epsilon > 0`` and ``(1+e) t < 1``.
    """
    d, e = float(delta), float(epsilon)
    if not 0 < d < 1:
        raise OutOfRange(f"delta must lie in (0, 1), got {d}")
    if not e > 0:
        raise OutOfRange(f"epsilon must be positive, got {e}")
    t = critical_t(d)
    if (1 + e) * t >= 1:
        raise OutOfRange(f"(1+epsilon) t = {(1 + e) * t:.6g} >= 1: the dilation leaves the disk")
    u = (1 + e) ** 2 * t * t
    return (1 - u) / (1 + u)


def composed_map(epsilon) -> MobiusMap:
    e = _exact(epsilon)
    return MobiusMap(2 + e, e, e, 2 + e)


def cayley_chain(epsilon) -> MobiusMap:
    """f o dilation o f^-1 with f = (1+s)/(1-s); proportional to :func:`composed_map`."""
    e = _exact(epsilon)
    f = MobiusMap(1, 1, -1, 1)
    dil = MobiusMap(1, 0, 0, 1 + e)
    finv = MobiusMap(1, -1, 1, 1)
    return f.compose(dil.compose(finv))


@dataclass
class PerturbationState:
    epsilon: object
    t: float
    delta_eps: float
    R: RationalFunction
    R_eps: RationalFunction | None = None


@dataclass
class Certificate:
    delta_hat: object
    x_hat: Polynomial
    y_hat: Polynomial
    z_hat: Polynomial
    margins: list
    identity_residual: float
    epsilon: object = None
    source_config: str | None = None
    delta: object = None
    delta_epsilon: float | None = None
    critical_root: complex | None = None
    state: PerturbationState | None = field(default=None, repr=False)

    @property
    def classifications(self) -> list[str]:
        return ["stable" if m is not None and m < 0 else "not stable" for m in self.margins]

    def to_json(self) -> dict:
        out = {
            "delta_hat": _num(self.delta_hat),
            "x_hat": self.x_hat.to_json(),
            "y_hat": self.y_hat.to_json(),
            "z_hat": self.z_hat.to_json(),
            "margins": [None if m is None or math.isinf(m) else m for m in self.margins],
            "identity_residual": self.identity_residual,
            "epsilon": _num(self.epsilon),
            "source_config": self.source_config,
        }
        if self.delta is not None:
            out["delta"] = _num(self.delta)
        if self.delta_epsilon is not None:
            out["delta_epsilon"] = self.delta_epsilon
        if self.critical_root is not None:
            out["critical_root"] = {"re": self.critical_root.real, "im": abs(self.critical_root.imag)}
        return out

    def dumps(self, digits: int = 40) -> str:
        return dumps(self.to_json(), digits=digits, indent=1)

    @classmethod
    def from_json(cls, d: dict) -> "Certificate":
        return cls(
            delta_hat=d["delta_hat"],
            x_hat=Polynomial(d["x_hat"]),
            y_hat=Polynomial(d["y_hat"]),
            z_hat=Polynomial(d["z_hat"]),
            margins=list(d.get("margins", [])),
            identity_residual=float(d.get("identity_residual", 0.0)),
            epsilon=d.get("epsilon"),
            source_config=d.get("source_config"),
            delta=d.get("delta"),
            delta_epsilon=d.get("delta_epsilon"),
        )


def _num(v):
    if v is None or isinstance(v, (int, float)):
        return v
    return v  # Fraction / mpf: serialized at full precision by polynomial.dumps


def identity_residual(delta, x: Polynomial, y: Polynomial, z: Polynomial) -> float:
    """``||(s^2 - 2 delta s + 1) x + (s^2 - 1) y - z||_inf / ||z||_inf``."""
    lhs = Polynomial([1, -2 * delta, 1]) * x + PLANT * y
    nz = z.norm_inf()
    if nz == 0:
        return math.inf
    return float((lhs - z).norm_inf() / nz)


def _check_stable(name: str, p: Polynomial, dps) -> float:
    try:
        rep = classify(p, dps=dps)
    except StabilityConsistencyError as exc:
        raise CertificationFailed(f"{name} stable", str(exc)) from exc
    if not rep.is_stable:
        raise CertificationFailed(f"{name} stable", f"{rep.classification}, margin {rep.margin:.3e}")
    return rep.margin


def certify_admissible(delta, x: Polynomial, y: Polynomial, *, dps: int | None = None,
                       epsilon=None, source_config: str | None = None) -> Certificate:
    """Check that ``delta`` is admissible via ``x`` and ``y``.

    Computes z from the identity and requires x, y and z stable with
    deg x >= deg y.  The failing predicate is named in
    :class:`CertificationFailed`.
    """
    if x.is_zero():
        raise CertificationFailed("x nonzero")
    if not y.is_zero() and y.degree > x.degree:
        raise CertificationFailed("deg(x) >= deg(y)", f"deg x = {x.degree}, deg y = {y.degree}")
    z = Polynomial([1, -2 * delta, 1]) * x + PLANT * y
    mx = _check_stable("x", x, dps)
    my = _check_stable("y", y, dps) if not y.is_zero() else -math.inf
    mz = _check_stable("z", z, dps)
    return Certificate(delta, x, y, z, [mx, my, mz], identity_residual(delta, x, y, z),
                       epsilon=epsilon, source_config=source_config, delta=delta)


def _critical_pair(poly: Polynomial, dps: int):
    """Roots of ``poly`` in the open right half-plane: exactly one conjugate pair on |s| = 1."""
    rts = roots(poly, dps=dps)
    right = [r for r in rts if r.real > 0]
    upper = [r for r in right if r.imag > 0]
    if len(right) != 2 or len(upper) != 1:
        raise CertificationFailed(
            "single critical pair", f"{len(right)} roots of q - p with positive real part"
        )
    r = upper[0]
    if abs(abs(r) - 1) > PAIRING_TOL:
        raise CertificationFailed("critical pair on the unit circle", f"|r| = {mpmath.nstr(abs(r), 15)}")
    return r


def perturb(delta, x: Polynomial, y: Polynomial, z: Polynomial, epsilon, *,
            dps: int = WORK_DPS, cert_tol: float = CERT_TOL,
            source_config: str | None = None) -> Certificate:
    """Stable (delta_hat, x_hat, y_hat, z_hat) close to a quasi-admissible input.

    Raises :class:`OutOfRange` for an epsilon too large for this delta,
    :class:`NotAFactor` if the expected factors do not divide, and
    :class:`CertificationFailed` when an output is not stable or the identity
    residual exceeds ``cert_tol``.
    """
    d_eps = delta_epsilon(delta, epsilon)
    if not y.is_zero() and y.degree > x.degree:
        raise CertificationFailed("deg(x) >= deg(y)", f"deg x = {x.degree}, deg y = {y.degree}")
    dq, xq, yq, zq = to_fraction(delta), x.to_fraction(), y.to_fraction(), z.to_fraction()
    res_in = identity_residual(dq, xq, yq, zq)
    if res_in > cert_tol:
        raise CertificationFailed("input identity", f"relative residual {res_in:.3e}")
    eps = _exact(epsilon)
    state = PerturbationState(epsilon, critical_t(delta), d_eps, RationalFunction(PLANT * yq, zq))

    # Step 1: pull R back through the composed map
    state.R_eps = mobius_compose(state.R, composed_map(eps))
    # Step 2: lowest terms, then a joint rescale to unit max coefficient
    red = lowest_terms(state.R_eps, dps=dps).scaled()
    p, q = red.num, red.den
    if q.leading < 0:
        p, q = -p, -q
    # Step 3: y_hat, delta_hat, x_hat, z_hat
    y_hat = deflate_factor(p, PLANT)
    qp = q - p
    crit = _critical_pair(qp, dps)
    d_hat = to_fraction(crit.real)
    x_hat = deflate_factor(qp, Polynomial([1, -2 * d_hat, 1]))
    z_hat = q

    if abs(float(d_hat) - d_eps) > AGREE_TOL * d_eps:
        raise CertificationFailed("delta_hat matches delta_epsilon",
                                  f"{float(d_hat):.12f} vs {d_eps:.12f}")
    if x_hat.degree > x.degree:
        raise CertificationFailed("deg(x_hat) <= deg(x)", f"{x_hat.degree} > {x.degree}")
    margins = [_check_stable("x_hat", x_hat, dps), _check_stable("y_hat", y_hat, dps),
               _check_stable("z_hat", z_hat, dps)]
    res = identity_residual(d_hat, x_hat, y_hat, z_hat)
    if res > cert_tol:
        raise CertificationFailed("identity residual", f"{res:.3e} > {cert_tol:.1e}")
    ctx = make_context(20)
    return Certificate(
        delta_hat=d_hat, x_hat=x_hat, y_hat=y_hat, z_hat=z_hat, margins=margins,
        identity_residual=res, epsilon=epsilon, source_config=source_config,
        delta=delta, delta_epsilon=d_eps,
        critical_root=complex(to_ctx(ctx, crit)), state=state,
    )


def exact_instance(cfg: AlgebraicConfiguration | str, values, dps: int = POLISH_DPS):
    """Polish a double-precision solution and instantiate x, y, z over the rationals.

    Returns ``(delta, x, y, z)`` with :class:`~fractions.Fraction` data whose
    identity residual is around ``10**-dps``.
    """
    from .solver import polish_mp  # local import: solver pulls in the kernels
    from .system import build_system

    if isinstance(cfg, str):
        cfg = parse_shorthand(cfg)
    sys = build_system(cfg.template())
    hp, _ = polish_mp(sys, values, dps=dps)
    vals = {k: to_fraction(v) for k, v in hp.items()}
    x, y, z = instantiate(cfg, vals)
    return vals["delta"], x, y, z


def perturb_config(cfg: AlgebraicConfiguration | str, values, epsilon, **kw) -> Certificate:
    """:func:`perturb` applied to a solved configuration."""
    if isinstance(cfg, str):
        cfg = parse_shorthand(cfg)
    d, x, y, z = exact_instance(cfg, values)
    return perturb(d, x, y, z, epsilon, source_config=str(cfg), **kw)


__all__ = [
    "CERT_TOL", "Certificate", "PerturbationState", "delta_epsilon", "critical_t", "composed_map",
    "cayley_chain", "perturb", "perturb_config", "certify_admissible", "exact_instance",
    "identity_residual", "NotAFactor",
]

"""Algebraic configurations: multiplicity patterns for x, y and z.

A configuration ``[j1,...],[k1,...],[l1,...]`` prescribes

    x(s) = (s^2 + 2 delta s + 1) * prod (s^2 + A_i)^{j_i}
    y(s) = k * prod (s^2 + B_i)^{k_i}
    z(s) = s^c * prod (s^2 + C_i)^{l_i}

with ``c`` chosen so that ``deg z = deg x + 2``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .errors import InvalidConfiguration, ParseError
from .polynomial import Polynomial
from .template import SymbolicTemplate, mn_const, mn_var

_SHORTHAND = re.compile(r"^\s*\[([^\[\]]*)\]\s*,\s*\[([^\[\]]*)\]\s*,\s*\[([^\[\]]*)\]\s*$")


def _parse_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    out = []
    for item in text.split(","):
        item = item.strip()
        if not re.fullmatch(r"[+-]?\d+", item):
            raise ParseError(f"not an integer: {item!r}")
        out.append(int(item))
    return tuple(out)


@dataclass(frozen=True)
class AlgebraicConfiguration:
    j: tuple[int, ...]
    kexp: tuple[int, ...] = ()
    l: tuple[int, ...] = ()

    def __post_init__(self):
        for name in ("j", "kexp", "l"):
            vals = tuple(int(v) for v in getattr(self, name))
            if any(v <= 0 for v in vals):
                raise InvalidConfiguration(f"multiplicities must be positive, got {name}={list(vals)}")
            object.__setattr__(self, name, tuple(sorted(vals, reverse=True)))
        if self.c < 0:
            raise InvalidConfiguration(
                f"z factors have degree {2 * sum(self.l)} > deg z = {self.deg_z} (c = {self.c})"
            )
        if self.deg_y >= self.deg_x:
            # deg y = deg x makes the leading coefficient read 1 + k = 1, forcing y = 0
            raise InvalidConfiguration(f"deg y = {self.deg_y} must be below deg x = {self.deg_x}")

    # derived quantities
    @property
    def deg_x(self) -> int:
        return 2 + 2 * sum(self.j)

    @property
    def deg_y(self) -> int:
        return 2 * sum(self.kexp)

    @property
    def deg_z(self) -> int:
        return self.deg_x + 2

    @property
    def c(self) -> int:
        return self.deg_z - 2 * sum(self.l)

    @property
    def m(self) -> tuple[int, int, int]:
        return len(self.j), len(self.kexp), len(self.l)

    @property
    def unknowns(self) -> tuple[str, ...]:
        m1, m2, m3 = self.m
        return (
            ("delta",)
            + tuple(f"A{i + 1}" for i in range(m1))
            + tuple(f"B{i + 1}" for i in range(m2))
            + tuple(f"C{i + 1}" for i in range(m3))
            + ("k",)
        )

    @property
    def n_equations(self) -> int:
        return (self.deg_x + 2) // 2

    def symmetry_groups(self) -> list[list[str]]:
        """Unknown names that may be permuted without changing x, y, z."""
        groups = []
        for prefix, mult in (("A", self.j), ("B", self.kexp), ("C", self.l)):
            start = 0
            while start < len(mult):
                stop = start
                while stop < len(mult) and mult[stop] == mult[start]:
                    stop += 1
                if stop - start > 1:
                    groups.append([f"{prefix}{i + 1}" for i in range(start, stop)])
                start = stop
        return groups

    # formats
    def shorthand(self) -> str:
        def fmt(v):
            return "[" + ",".join(str(x) for x in v) + "]"

        return f"{fmt(self.j)},{fmt(self.kexp)},{fmt(self.l)}"

    def __str__(self):
        return self.shorthand()

    def to_json(self) -> dict:
        return {"j": list(self.j), "k": list(self.kexp), "l": list(self.l)}

    @classmethod
    def from_json(cls, data: Mapping) -> "AlgebraicConfiguration":
        try:
            return cls(tuple(data["j"]), tuple(data.get("k", ())), tuple(data.get("l", ())))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad configuration object: {data!r}") from exc

    def template(self) -> SymbolicTemplate:
        names = self.unknowns
        n = len(names)
        one = mn_const(1, n)
        idx = {name: i for i, name in enumerate(names)}

        def even_quad(var: str):
            return [mn_var(idx[var], n), {}, one]

        x = [([one, mn_var(idx["delta"], n, 2), one], 1)]
        x += [(even_quad(f"A{i + 1}"), p) for i, p in enumerate(self.j)]
        y = [([mn_var(idx["k"], n)], 1)]
        y += [(even_quad(f"B{i + 1}"), p) for i, p in enumerate(self.kexp)]
        z = [([{} for _ in range(self.c)] + [one], 1)]
        z += [(even_quad(f"C{i + 1}"), p) for i, p in enumerate(self.l)]
        return SymbolicTemplate(names, x, y, z, even=True, label=self.shorthand(), source=self)


def parse_shorthand(text: str) -> AlgebraicConfiguration:
    """Parse ``"[3,1],[2],[1]"``; empty brackets are allowed."""
    m = _SHORTHAND.match(text)
    if not m:
        raise ParseError(f"not a configuration shorthand: {text!r}")
    j, k, l = (_parse_list(g) for g in m.groups())
    return AlgebraicConfiguration(j, k, l)


def is_square(cfg: AlgebraicConfiguration) -> bool:
    """Unknown count equals the number of even-coefficient equations."""
    return sum(cfg.m) + 2 == cfg.n_equations


def partitions(n: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of ``n`` as non-increasing tuples, in lexicographic order."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(1, min(n, max_part) + 1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def bounded_parts(parts: int, max_total: int) -> Iterator[tuple[int, ...]]:
    """Non-increasing tuples of exactly ``parts`` positive ints with sum <= max_total."""
    for total in range(parts, max_total + 1):
        for p in partitions(total):
            if len(p) == parts:
                yield p


def enumerate_configurations(deg_x: int) -> list[AlgebraicConfiguration]:
    """Every square configuration whose x has degree ``deg_x``."""
    if deg_x < 4 or deg_x % 2:
        raise ValueError("deg_x must be an even integer >= 4")
    half = (deg_x - 2) // 2
    out = []
    for j in partitions(half):
        free = half - len(j)
        for m2 in range(free + 1):
            m3 = free - m2
            for k in bounded_parts(m2, half):
                for l in bounded_parts(m3, half + 2):
                    cfg = AlgebraicConfiguration(j, k, l)
                    if is_square(cfg):
                        out.append(cfg)
    out.sort(key=lambda c: (c.j, c.kexp, c.l))
    return out


def _values(cfg_or_names, values) -> dict:
    names = cfg_or_names.unknowns if hasattr(cfg_or_names, "unknowns") else cfg_or_names
    if isinstance(values, Mapping):
        missing = [n for n in names if n not in values]
        if missing:
            raise KeyError(f"missing values for {missing}")
        return {n: values[n] for n in names}
    values = list(values)
    if len(values) != len(names):
        raise ValueError(f"expected {len(names)} values, got {len(values)}")
    return dict(zip(names, values))


def instantiate(cfg: AlgebraicConfiguration, values) -> tuple[Polynomial, Polynomial, Polynomial]:
    """Expanded x, y, z for a parameter assignment (any numeric type)."""
    v = _values(cfg, values)
    d = v["delta"]
    x = Polynomial([1, 2 * d, 1])
    for i, p in enumerate(cfg.j):
        x = x * Polynomial([v[f"A{i + 1}"], 0, 1]) ** p
    y = Polynomial([v["k"]])
    for i, p in enumerate(cfg.kexp):
        y = y * Polynomial([v[f"B{i + 1}"], 0, 1]) ** p
    z = Polynomial.monomial(cfg.c)
    for i, p in enumerate(cfg.l):
        z = z * Polynomial([v[f"C{i + 1}"], 0, 1]) ** p
    return x, y, z


def identity_residual(delta, x: Polynomial, y: Polynomial, z: Polynomial) -> Polynomial:
    """``(s^2 - 2 delta s + 1) x + (s^2 - 1) y - z``."""
    return Polynomial([1, -2 * delta, 1]) * x + Polynomial([-1, 0, 1]) * y - z


def unknown_kinds(names: Sequence[str]) -> list[str]:
    return ["delta" if n == "delta" else "k" if n == "k" else n[0] for n in names]

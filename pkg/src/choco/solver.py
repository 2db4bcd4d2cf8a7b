"""Multistart Newton over coefficient systems and the per-degree search.

Each start is an independent damped-Newton run in the compiled (or numpy)
kernel.  Converged iterates are canonicalized, deduplicated, checked for the
sign constraints on the A, B, C parameters, and the feasible one with the
largest delta wins.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .configuration import AlgebraicConfiguration, enumerate_configurations, parse_shorthand
from .errors import NoFeasibleSolution, NoSolutions
from .polynomial import make_context
from .system import CoefficientSystem, build_system

LARGE_DEGREE = 16


@dataclass(frozen=True)
class SolverSettings:
    """Knobs for :func:`solve_system`.

    ``start_count=None`` picks 2000 random starts below deg x = 14 and 20000
    from there on.  Nonnegative unknowns are sampled log-uniformly from
    ``param_box``; ``delta`` and ``k`` uniformly from their boxes.  The
    damping is fixed inside the kernel: Armijo backtracking on ||F||^2 with
    step halving down to 2^-20.
    """

    start_count: int | None = None
    delta_box: tuple[float, float] = (0.0, 1.0)
    param_box: tuple[float, float] = (1e-3, 10.0)
    k_box: tuple[float, float] = (-300.0, 300.0)
    newton_max_iter: int = 100
    damping: str = "armijo(c=1e-4, halving, min step 2^-20)"
    converge_tol: float = 1e-10
    dedupe_tol: float = 1e-6
    feas_tol: float = 1e-9
    rng_seed: int = 0
    warm_starts: tuple = ()
    time_budget: float | None = None

    def __post_init__(self):
        if not self.converge_tol < self.dedupe_tol:
            raise ValueError("converge_tol must be smaller than dedupe_tol")
        if self.start_count is not None and self.start_count < 0:
            raise ValueError("start_count must be nonnegative")
        if not 0 < self.param_box[0] < self.param_box[1]:
            raise ValueError("param_box must be a positive interval for log-uniform sampling")
        object.__setattr__(self, "warm_starts", tuple(_freeze(w) for w in self.warm_starts))

    def starts_for(self, deg_x: int | None) -> int:
        if self.start_count is not None:
            return self.start_count
        if self.warm_starts:
            return 0
        return 20000 if (deg_x or 0) >= 14 else 2000

    def to_json(self) -> dict:
        d = asdict(self)
        d["warm_starts"] = [dict(w) for w in self.warm_starts]
        return d

    def digest(self, deg_x: int | None = None) -> str:
        """Hash of everything that can change the candidate list."""
        d = self.to_json()
        d.pop("time_budget")
        d["start_count"] = self.starts_for(deg_x)
        d["backend_contract"] = 1
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _freeze(w):
    if isinstance(w, Mapping):
        return tuple(sorted((str(k), float(v)) for k, v in w.items()))
    return tuple(w)


@dataclass
class SolutionCandidate:
    delta: float
    params: dict
    residual_norm: float
    feasible: bool

    @property
    def values(self) -> dict:
        return {"delta": self.delta, **self.params}

    def to_json(self) -> dict:
        return {"delta": self.delta, "params": dict(self.params),
                "residual_norm": self.residual_norm, "feasible": self.feasible}

    @classmethod
    def from_json(cls, d: Mapping) -> "SolutionCandidate":
        return cls(float(d["delta"]), {k: float(v) for k, v in d["params"].items()},
                   float(d["residual_norm"]), bool(d["feasible"]))


@dataclass
class SolveResult:
    candidates: list
    starts: int
    converged: int
    iterations: int
    truncated: bool = False
    from_cache: bool = False


@dataclass
class SearchRow:
    config: AlgebraicConfiguration
    candidate: SolutionCandidate | None
    status: str  # "ok", "no feasible solution", "no solutions"
    n_candidates: int = 0

    def to_json(self) -> dict:
        return {"config": str(self.config), "status": self.status,
                "n_candidates": self.n_candidates,
                "best": self.candidate.to_json() if self.candidate else None}


# sampling ---------------------------------------------------------------

def _kind(name: str) -> str:
    if name in ("delta", "k"):
        return name
    return "param"


def sample_starts(unknowns: Sequence[str], n: int, settings: SolverSettings,
                  rng: np.random.Generator) -> np.ndarray:
    X = np.empty((n, len(unknowns)))
    lo, hi = np.log(settings.param_box[0]), np.log(settings.param_box[1])
    for i, name in enumerate(unknowns):
        kind = _kind(name)
        if kind == "delta":
            X[:, i] = rng.uniform(*settings.delta_box, n)
        elif kind == "k":
            X[:, i] = rng.uniform(*settings.k_box, n)
        else:
            X[:, i] = np.exp(rng.uniform(lo, hi, n))
    return X


def _warm_matrix(unknowns: Sequence[str], warm: Iterable) -> np.ndarray:
    rows = []
    for w in warm:
        if w and isinstance(w[0], tuple):
            d = dict(w)
            missing = [u for u in unknowns if u not in d]
            if missing:
                raise ValueError(f"warm start is missing {missing}")
            rows.append([d[u] for u in unknowns])
        else:
            if len(w) != len(unknowns):
                raise ValueError(f"warm start needs {len(unknowns)} values")
            rows.append(list(w))
    return np.asarray(rows, dtype=float).reshape(-1, len(unknowns))


def _degree_of(sys: CoefficientSystem) -> int | None:
    src = sys.source
    return getattr(src, "deg_x", None)


def _symmetry_slices(sys: CoefficientSystem) -> list[list[int]]:
    src = sys.source
    if not isinstance(src, AlgebraicConfiguration):
        return []
    idx = {n: i for i, n in enumerate(sys.unknowns)}
    return [[idx[n] for n in g] for g in src.symmetry_groups()]


# solving ----------------------------------------------------------------

def run_newton(sys: CoefficientSystem, settings: SolverSettings) -> tuple[np.ndarray, np.ndarray, SolveResult]:
    """Run every start; returns converged points, their residuals and stats."""
    cs = sys.compiled()
    n = settings.starts_for(_degree_of(sys))
    rng = np.random.default_rng(settings.rng_seed)
    X0 = sample_starts(sys.unknowns, n, settings, rng)
    if settings.warm_starts:
        X0 = np.vstack([_warm_matrix(sys.unknowns, settings.warm_starts), X0])
    chunk = 1000
    t0 = time.perf_counter()
    pts, res = [], []
    iters = conv = done = 0
    truncated = False
    for i in range(0, X0.shape[0], chunk):
        if settings.time_budget is not None and time.perf_counter() - t0 > settings.time_budget:
            truncated = True
            break
        X, r, it, st = kernels.newton_batch(cs, X0[i:i + chunk], settings.newton_max_iter, settings.converge_tol)
        ok = st == kernels.CONVERGED
        pts.append(X[ok])
        res.append(r[ok])
        iters += int(it.sum())
        conv += int(ok.sum())
        done += X.shape[0]
    P = np.vstack(pts) if pts else np.empty((0, sys.n_unknowns))
    R = np.concatenate(res) if res else np.empty(0)
    return P, R, SolveResult([], done, conv, iters, truncated)


def _canonical(P: np.ndarray, groups: list[list[int]]) -> np.ndarray:
    P = P.copy()
    for g in groups:
        P[:, g] = -np.sort(-P[:, g], axis=1)
    return P


def _dedupe(P: np.ndarray, R: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((R, -P[:, 0])) if len(P) else np.empty(0, dtype=int)
    keep: list[int] = []
    for i in order:
        if all(np.max(np.abs(P[i] - P[j])) > tol for j in keep):
            keep.append(i)
    return P[keep], R[keep]


def make_candidate(sys: CoefficientSystem, point: Sequence[float], residual_norm: float,
                   settings: SolverSettings) -> SolutionCandidate:
    """Clamp near-zero negatives to zero, re-verify and decide feasibility."""
    names = sys.unknowns
    vals = [float(v) for v in point]
    params_idx = [i for i, n in enumerate(names) if _kind(n) == "param"]
    clamp = [i for i in params_idx if -settings.feas_tol < vals[i] < 0]
    if clamp:
        trial = list(vals)
        for i in clamp:
            trial[i] = 0.0
        r = sys.scaled_residual_norm(trial)
        if r <= settings.converge_tol:
            vals, residual_norm = trial, r
    d = vals[names.index("delta")]
    feasible = (d > 0 and all(vals[i] >= -settings.feas_tol for i in params_idx)
                and residual_norm <= settings.converge_tol)
    params = {n: v for n, v in zip(names, vals) if n != "delta"}
    return SolutionCandidate(d, params, float(residual_norm), bool(feasible))


def solve_system(sys: CoefficientSystem, settings: SolverSettings | None = None) -> list[SolutionCandidate]:
    """Deduplicated real solutions found from random (and warm) starts.

    Raises :class:`NoSolutions` when no start converges.
    """
    return solve_system_detailed(sys, settings).candidates


def solve_system_detailed(sys: CoefficientSystem, settings: SolverSettings | None = None) -> SolveResult:
    settings = settings or SolverSettings()
    if not sys.is_square:
        raise ValueError(f"system is not square: {sys.n_unknowns} unknowns, {sys.n_equations} equations")
    P, R, stats = run_newton(sys, settings)
    if not len(P):
        raise NoSolutions(f"none of {stats.starts} starts converged")
    P = _canonical(P, _symmetry_slices(sys))
    P, R = _dedupe(P, R, settings.dedupe_tol)
    stats.candidates = [make_candidate(sys, p, r, settings) for p, r in zip(P, R)]
    return stats


def _cand_key(c: SolutionCandidate):
    return (-c.delta, c.residual_norm, tuple(c.params[k] for k in sorted(c.params)))


def best_delta(cands: Iterable[SolutionCandidate]) -> SolutionCandidate:
    """Feasible candidate with the largest delta.

    Ties go to the smaller residual, then to the lexicographically smaller
    parameter vector.
    """
    feas = [c for c in cands if c.feasible]
    if not feas:
        raise NoFeasibleSolution("no candidate satisfies delta > 0 and A, B, C >= 0")
    return min(feas, key=_cand_key)


# caching ----------------------------------------------------------------

def default_cache_dir() -> Path:
    env = os.environ.get("CHOCO_CACHE_DIR")
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "choco"


class ResultCache:
    """One JSON file per (configuration, settings digest)."""

    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    def path(self, label: str, digest: str) -> Path:
        safe = re.sub(r"[^0-9A-Za-z]+", "_", label).strip("_") or "system"
        return self.root / f"{safe}-{digest}.json"

    def load(self, label: str, digest: str) -> list[SolutionCandidate] | None:
        p = self.path(label, digest)
        try:
            data = json.loads(p.read_text(encoding="utf-8"))
        except (OSError, ValueError):
            return None
        if data.get("config") != label or data.get("settings_digest") != digest:
            return None
        return [SolutionCandidate.from_json(c) for c in data["candidates"]]

    def store(self, label: str, digest: str, settings: SolverSettings, cands: list[SolutionCandidate]) -> Path:
        p = self.path(label, digest)
        p.parent.mkdir(parents=True, exist_ok=True)
        payload = {"config": label, "settings_digest": digest, "settings": settings.to_json(),
                   "candidates": [c.to_json() for c in cands]}
        tmp = p.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, indent=1), encoding="utf-8")
        os.replace(tmp, p)
        return p


def solve_config(cfg: AlgebraicConfiguration | str, settings: SolverSettings | None = None,
                 cache: ResultCache | None = None) -> SolveResult:
    """Solve one configuration, reading and writing ``cache`` when given."""
    if isinstance(cfg, str):
        cfg = parse_shorthand(cfg)
    settings = settings or SolverSettings()
    label = str(cfg)
    digest = settings.digest(cfg.deg_x)
    if cache is not None:
        hit = cache.load(label, digest)
        if hit is not None:
            return SolveResult(hit, 0, 0, 0, from_cache=True)
    sys = build_system(cfg.template())
    try:
        result = solve_system_detailed(sys, settings)
    except NoSolutions:
        result = SolveResult([], settings.starts_for(cfg.deg_x), 0, 0)
    if cache is not None and not result.truncated:
        cache.store(label, digest, settings, result.candidates)
    return result


def _search_one(args) -> SearchRow:
    label, settings, cache_root = args
    cfg = parse_shorthand(label)
    cache = ResultCache(cache_root) if cache_root is not None else None
    result = solve_config(cfg, settings, cache)
    if not result.candidates:
        return SearchRow(cfg, None, "no solutions", 0)
    try:
        return SearchRow(cfg, best_delta(result.candidates), "ok", len(result.candidates))
    except NoFeasibleSolution:
        return SearchRow(cfg, None, "no feasible solution", len(result.candidates))


def search_degree(deg_x: int, settings: SolverSettings | None = None, *, jobs: int = 1,
                  cache: ResultCache | None = None, allow_large_degree: bool = False,
                  progress=None) -> list[SearchRow]:
    """Best feasible delta for every square configuration of degree ``deg_x``.

    Rows are sorted by delta (descending); configurations without a feasible
    solution come last in enumeration order.  ``deg_x >= 16`` requires
    ``allow_large_degree``.
    """
    settings = settings or SolverSettings()
    if deg_x >= LARGE_DEGREE and not allow_large_degree:
        raise ValueError(f"deg_x = {deg_x} >= {LARGE_DEGREE} needs allow_large_degree (and a time budget)")
    cfgs = enumerate_configurations(deg_x)
    root = str(cache.root) if cache is not None else None
    work = [(str(c), settings, root) for c in cfgs]
    rows: list[SearchRow] = []
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for row in pool.map(_search_one, work, chunksize=1):
                rows.append(row)
                if progress:
                    progress(row)
    else:
        for w in work:
            row = _search_one(w)
            rows.append(row)
            if progress:
                progress(row)
    order = {str(c): i for i, c in enumerate(cfgs)}
    rows.sort(key=lambda r: (r.candidate is None,
                             -(r.candidate.delta if r.candidate else 0.0),
                             order[str(r.config)]))
    return rows


# high precision -----------------------------------------------------------

def polish_mp(sys: CoefficientSystem, values, dps: int = 120, max_steps: int = 60):
    """Newton refinement of a double-precision solution at ``dps`` digits.

    Returns a dict of mpmath numbers from a private context, so the caller's
    global precision is untouched.
    """
    ctx = make_context(dps)
    v = [ctx.mpf(float(x)) if not isinstance(x, ctx.mpf) else x for x in sys.vector(values)]
    target = ctx.mpf(10) ** (-(dps - 10))
    for _ in range(max_steps):
        F = sys.residual(v)
        if max(abs(f) for f in F) <= target:
            break
        J = ctx.matrix(sys.jacobian(v))
        d = ctx.lu_solve(J, ctx.matrix([-f for f in F]))
        v = [a + d[i] for i, a in enumerate(v)]
    else:
        F = sys.residual(v)
        if max(abs(f) for f in F) > ctx.mpf(10) ** (-(dps // 2)):
            raise NoSolutions("high-precision polish did not converge")
    return dict(zip(sys.unknowns, v)), ctx

"""Benchmark problem families, grid runs, and data profiles.

Four families, each drawn from a content-addressed instance seed so a grid
is reproducible from its base seed alone:

* ``barycenter_ambient``: sum of squared distances to 10 Gaussian ambient
  points, minimized over a random subspace.
* ``barycenter_on_manifold``: same, with the points projected onto the
  subspace first.
* ``strongly_convex_quadratic``: (1/2) x'Ax - b'x with spectrum in
  [0.1, 1], over a random subspace.
* ``rayleigh_sphere``: x'Ax for a symmetric Gaussian A, over a sphere of
  dimension m embedded in R^n.

Each family records its analytic optimal value, used by the data profiles
when it undercuts the best value any solver observed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._util import stable_seed
from .geometry import EmbeddedSphere, Subspace
from .pss import random_rotation
from .solver import Problem, SolverConfig, direct_search
from .tangent import PollingStrategy

FAMILIES = ("barycenter_ambient", "barycenter_on_manifold",
            "strongly_convex_quadratic", "rayleigh_sphere")

_INSTANCE_TAG = 0x696E73
_BARYCENTER_POINTS = 10


@dataclass(frozen=True)
class ProblemSpec:
    """Identity of one benchmark instance."""

    family: str
    m: int
    n: int
    instance_seed: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.m < 1:
            raise ValueError("manifold dimension must be positive")
        min_n = self.m + 1 if self.family == "rayleigh_sphere" else self.m
        if self.n < min_n:
            raise ValueError(f"ambient dimension {self.n} too small for {self.family}")

    def key(self) -> tuple:
        return (self.family, self.m, self.n, self.instance_seed)

    def to_json(self) -> dict:
        return {"family": self.family, "m": self.m, "n": self.n,
                "instance_seed": self.instance_seed}


def instance_seed(base_seed: int, family: str, m: int, n: int, index: int) -> int:
    return stable_seed(base_seed, family, m, n, index)


def generate_instance(spec: ProblemSpec) -> Problem:
    """Build the problem for a spec.  Draw order is fixed: manifold, data,
    then the starting point, so instances never change shape under edits
    elsewhere."""
    rng = np.random.default_rng([_INSTANCE_TAG, spec.instance_seed])
    m, n = spec.m, spec.n

    if spec.family == "rayleigh_sphere":
        manifold = EmbeddedSphere(m, n)
        mat = rng.standard_normal((n, n))
        a = (mat + mat.T) / 2.0
        f_star = float(np.linalg.eigvalsh(a[: m + 1, : m + 1])[0])

        def objective(p):
            return float(p.x @ a @ p.x)

        def gradient(p):
            return 2.0 * (a @ p.x)

        x0 = manifold.random_point(rng)
        return Problem(manifold=manifold, objective=objective, x0=x0,
                       euclid_gradient=gradient, f_lower=f_star,
                       name=_name(spec), problem_id=spec.instance_seed)

    z, r = np.linalg.qr(rng.standard_normal((n, m)))
    z = z * np.sign(np.diagonal(r))
    manifold = Subspace(z)

    if spec.family in ("barycenter_ambient", "barycenter_on_manifold"):
        pts = rng.standard_normal((_BARYCENTER_POINTS, n))
        if spec.family == "barycenter_on_manifold":
            pts = (pts @ z) @ z.T
        center = z @ (z.T @ pts.mean(axis=0))
        f_star = float(np.sum((pts - center) ** 2))

        def objective(p, pts=pts):
            return float(np.sum((pts - p.x) ** 2))

        def gradient(p, pts=pts):
            return 2.0 * (_BARYCENTER_POINTS * p.x - pts.sum(axis=0))

    else:  # strongly_convex_quadratic
        lam = rng.uniform(0.1, 1.0, n)
        q = random_rotation(n, rng=rng)
        a = (q * lam) @ q.T
        a = (a + a.T) / 2.0
        b = rng.standard_normal(n)
        reduced = z.T @ a @ z
        rhs = z.T @ b
        y_star = np.linalg.solve(reduced, rhs)
        f_star = float(0.5 * y_star @ reduced @ y_star - rhs @ y_star)

        def objective(p, a=a, b=b):
            return float(0.5 * p.x @ a @ p.x - b @ p.x)

        def gradient(p, a=a, b=b):
            return a @ p.x - b

    x0 = manifold.random_point(rng)
    return Problem(manifold=manifold, objective=objective, x0=x0,
                   euclid_gradient=gradient, f_lower=f_star,
                   name=_name(spec), problem_id=spec.instance_seed)


def _name(spec: ProblemSpec) -> str:
    return f"{spec.family}-m{spec.m}-n{spec.n}-s{spec.instance_seed:x}"


def solver_id(strategy: PollingStrategy) -> str:
    rot = "rot" if strategy.rotate else "norot"
    return f"{strategy.style}-{strategy.generator}-{rot}"


@dataclass(frozen=True, eq=False)
class BenchRecord:
    """One solve: improvement history plus the analytic optimum if known."""

    problem: ProblemSpec
    solver_id: str
    history: tuple
    final_f: float
    f_star_analytic: float | None = None
    error: str | None = None

    def __post_init__(self):
        hist = tuple((int(e), float(v)) for e, v in self.history)
        evals = [e for e, _ in hist]
        vals = [v for _, v in hist]
        if any(b <= a for a, b in zip(evals, evals[1:])):
            raise ValueError("history evaluation counts must increase")
        if any(b > a for a, b in zip(vals, vals[1:])):
            raise ValueError("history values must be nonincreasing")
        object.__setattr__(self, "history", hist)

    def to_json(self) -> dict:
        out = {"problem": self.problem.to_json(), "solver_id": self.solver_id,
               "history": [[e, v] for e, v in self.history],
               "final_f": self.final_f}
        if self.f_star_analytic is not None:
            out["f_star_analytic"] = self.f_star_analytic
        if self.error is not None:
            out["error"] = self.error
        return out


def record_from_json(obj: dict) -> BenchRecord:
    return BenchRecord(problem=ProblemSpec(**obj["problem"]),
                       solver_id=obj["solver_id"],
                       history=tuple((int(e), float(v)) for e, v in obj["history"]),
                       final_f=float(obj["final_f"]),
                       f_star_analytic=obj.get("f_star_analytic"),
                       error=obj.get("error"))


def default_strategies(generators=("plus_minus", "minimal_sum", "uniform_angles"),
                       rotate=(True,)) -> list[PollingStrategy]:
    out = []
    for style in ("intrinsic", "projected"):
        for gen in generators:
            for rot in rotate:
                out.append(PollingStrategy(style, gen, rotate=rot))
    return out


def run_one(spec: ProblemSpec, strategy: PollingStrategy, *,
            budget_factor: int = 100, base_seed: int = 0) -> BenchRecord:
    problem = generate_instance(spec)
    cfg = SolverConfig(budget=budget_factor * (spec.m + 1), polling=strategy,
                       seed=base_seed)
    try:
        trace = direct_search(problem, cfg)
    except Exception as exc:  # recorded, not fatal for a grid
        return BenchRecord(problem=spec, solver_id=solver_id(strategy),
                           history=(), final_f=math.nan,
                           f_star_analytic=problem.f_lower, error=str(exc))
    return BenchRecord(problem=spec, solver_id=solver_id(strategy),
                       history=tuple(trace.history()), final_f=trace.final_f,
                       f_star_analytic=problem.f_lower)


def run_grid(m_list, codims, strategies, *, families=FAMILIES,
             instances: int = 100, budget_factor: int = 100,
             base_seed: int = 0, threads: int = 1) -> list[BenchRecord]:
    """All (family, m, codim, instance) cells crossed with the strategies.

    Work may run on a thread pool; records are sorted on a content key
    afterwards, so the output is independent of scheduling.
    """
    specs = []
    for family in families:
        for m in m_list:
            for codim in codims:
                if family == "rayleigh_sphere" and codim < 1:
                    continue
                n = m + codim
                for index in range(instances):
                    specs.append(ProblemSpec(
                        family, m, n,
                        instance_seed(base_seed, family, m, n, index)))

    def work(spec):
        problem = generate_instance(spec)
        out = []
        for strategy in strategies:
            cfg = SolverConfig(budget=budget_factor * (spec.m + 1),
                               polling=strategy, seed=base_seed)
            try:
                trace = direct_search(problem, cfg)
                out.append(BenchRecord(problem=spec, solver_id=solver_id(strategy),
                                       history=tuple(trace.history()),
                                       final_f=trace.final_f,
                                       f_star_analytic=problem.f_lower))
            except Exception as exc:
                out.append(BenchRecord(problem=spec, solver_id=solver_id(strategy),
                                       history=(), final_f=math.nan,
                                       f_star_analytic=problem.f_lower,
                                       error=str(exc)))
        return out

    records: list[BenchRecord] = []
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for out in pool.map(work, specs):
                records.extend(out)
    else:
        for spec in specs:
            records.extend(work(spec))
    records.sort(key=lambda r: (r.problem.family, r.problem.m, r.problem.n,
                                r.problem.instance_seed, r.solver_id))
    return records


@dataclass(frozen=True)
class DataProfile:
    """Fraction of problems solved within alpha * (m+1) evaluations."""

    tau: float
    alphas: tuple
    curves: dict  # solver_id -> tuple of fractions


def data_profile(records, tau: float = 1e-2, *, budget_factor: int = 100,
                 f_star_policy: str = "best_across_solvers") -> DataProfile:
    """Data profiles over the problems present in ``records``.

    Per problem, f* is the smallest final value any solver reached, replaced
    by the analytic optimum when that is smaller.  A problem with
    f(x0) = f* counts as solved at zero evaluations for every solver.
    """
    if f_star_policy != "best_across_solvers":
        raise ValueError(f"unknown f* policy {f_star_policy!r}")
    good = [r for r in records if r.error is None and r.history]
    if not good:
        raise ValueError("no usable records")
    by_problem: dict[tuple, list[BenchRecord]] = {}
    for r in good:
        by_problem.setdefault(r.problem.key(), []).append(r)
    solver_ids = sorted({r.solver_id for r in good})
    alphas = tuple(range(0, budget_factor + 1))

    times: dict[str, list[float]] = {s: [] for s in solver_ids}
    for key, recs in by_problem.items():
        m = recs[0].problem.m
        f0 = recs[0].history[0][1]
        proxy = min(r.final_f for r in recs)
        analytic = next((r.f_star_analytic for r in recs
                         if r.f_star_analytic is not None), None)
        f_star = proxy
        if analytic is not None:
            if proxy < analytic - 1e-12 * max(1.0, abs(analytic)):
                raise RuntimeError(
                    "internal error: observed value beats the analytic optimum")
            f_star = min(proxy, analytic)
        denom = f0 - f_star
        threshold = f_star + tau * denom
        present = {r.solver_id: r for r in recs}
        for s in solver_ids:
            r = present.get(s)
            if r is None:
                continue
            if denom <= 0.0:
                times[s].append(0.0)
                continue
            t = math.inf
            for evals, val in r.history:
                if val <= threshold:
                    t = evals / (m + 1)
                    break
            times[s].append(t)

    curves = {}
    for s in solver_ids:
        ts = np.asarray(times[s])
        if ts.size == 0:
            curves[s] = tuple(0.0 for _ in alphas)
        else:
            curves[s] = tuple(float(np.mean(ts <= a)) for a in alphas)
    return DataProfile(tau=tau, alphas=alphas, curves=curves)


@dataclass(frozen=True)
class HeadToHead:
    """Per (m, codim): fraction of paired instances where the intrinsic
    variant finished strictly below the projected one."""

    generator: str
    rotate: bool
    cells: dict  # (m, codim) -> (fraction or None, wins, pairs)
    unpaired: int


def head_to_head(records, generator: str, rotate: bool) -> HeadToHead:
    rot = "rot" if rotate else "norot"
    intr_id = f"intrinsic-{generator}-{rot}"
    proj_id = f"projected-{generator}-{rot}"
    finals: dict[tuple, dict[str, float]] = {}
    for r in records:
        if r.error is not None or r.solver_id not in (intr_id, proj_id):
            continue
        finals.setdefault(r.problem.key(), {})[r.solver_id] = r.final_f
    cells: dict[tuple, list[int]] = {}
    unpaired = 0
    for key, vals in finals.items():
        family, m, n, _ = key
        if len(vals) != 2:
            unpaired += 1
            continue
        cell = cells.setdefault((m, n - m), [0, 0])
        cell[1] += 1
        if vals[intr_id] < vals[proj_id]:
            cell[0] += 1
    out = {}
    for cell_key, (wins, pairs) in sorted(cells.items()):
        frac = wins / pairs if pairs else None
        out[cell_key] = (frac, wins, pairs)
    return HeadToHead(generator=generator, rotate=rotate, cells=out,
                      unpaired=unpaired)

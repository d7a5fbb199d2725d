"""Direct search on a manifold with sufficient decrease.

Each iteration polls the directions of a tangent polling set in generation
order.  A step alpha_k * d is accepted as soon as

    f(R_x(alpha_k d)) < f(x_k) - (c/2) * alpha_k^2 * ||d||^2

in which case the iterate moves and the step size grows by gamma_inc (capped
at alpha_max); if the whole set fails the iterate stays and the step size
shrinks by gamma_dec.  The run stops when the evaluation budget is spent;
an iteration interrupted mid-poll is recorded as truncated-unsuccessful and
does not update the step size.  A NaN objective value counts as an
evaluation and never passes the decrease test.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._util import seed_entry
from .geometry import Point
from .tangent import PollingStrategy, tangent_cosine_measure

_ITER_TAG = 0x697465


@dataclass(frozen=True)
class SolverConfig:
    budget: int
    polling: PollingStrategy
    alpha0: float = 1.0
    alpha_max: float = 1.0
    c: float = 1.0
    gamma_dec: float = 0.5
    gamma_inc: float = 2.0
    retraction: str = "exponential"
    poll_order: str = "as_generated"
    seed: int = 0
    grad_tol: float | None = None  # optional early stop, meant for tests

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if not 0.0 < self.alpha0 <= self.alpha_max:
            raise ValueError("need 0 < alpha0 <= alpha_max")
        if not 0.0 < self.gamma_dec < 1.0:
            raise ValueError("gamma_dec must lie in (0, 1)")
        if self.gamma_inc < 1.0:
            raise ValueError("gamma_inc must be at least 1")
        if self.c <= 0.0:
            raise ValueError("the decrease constant c must be positive")
        if self.poll_order != "as_generated":
            raise ValueError("only 'as_generated' polling order is supported")
        if self.retraction.lower() not in ("metric", "exponential"):
            raise ValueError(f"unknown retraction scheme {self.retraction!r}")


@dataclass(frozen=True)
class Problem:
    """A minimization problem on a manifold.

    ``euclid_gradient`` is used only for diagnostics (gradient-norm traces
    and the unsuccessful-iteration bound); the search itself never calls it.
    ``f_lower`` carries the analytic optimal value when one is known.
    """

    manifold: object
    objective: object
    x0: Point
    euclid_gradient: object = None
    f_lower: float | None = None
    name: str = ""
    problem_id: int = 0


@dataclass(frozen=True, eq=False)
class IterationRecord:
    k: int
    alpha: float
    f_value: float
    success: bool
    accepted_index: int | None
    evals: int
    cumulative_evals: int
    grad_norm: float | None
    truncated: bool
    coords: np.ndarray


@dataclass(eq=False)
class SolverTrace:
    problem_id: int
    seed: int
    records: list = field(default_factory=list)
    final_point: Point | None = None
    final_f: float = np.nan
    final_grad_norm: float | None = None
    final_alpha: float = np.nan
    evals: int = 0

    def history(self) -> list[tuple[int, float]]:
        """(cumulative evaluations, best value) at the start and after every
        accepted step."""
        if not self.records and self.final_point is None:
            return []
        out = [(1, self.records[0].f_value if self.records else self.final_f)]
        for i, rec in enumerate(self.records):
            if rec.success:
                nxt = (self.records[i + 1].f_value if i + 1 < len(self.records)
                       else self.final_f)
                out.append((rec.cumulative_evals, nxt))
        return out

    def successes(self) -> int:
        return sum(1 for r in self.records if r.success)

    def to_json_dict(self) -> dict:
        return {
            "problem_id": self.problem_id,
            "seed": self.seed,
            "evals": self.evals,
            "final_f": self.final_f,
            "final_alpha": self.final_alpha,
            "final_grad_norm": self.final_grad_norm,
            "final_x": [float(v) for v in self.final_point.x],
            "records": [
                {
                    "k": r.k, "alpha": r.alpha, "f": r.f_value,
                    "success": r.success, "accepted_index": r.accepted_index,
                    "evals": r.evals, "cumulative_evals": r.cumulative_evals,
                    "grad_norm": r.grad_norm, "truncated": r.truncated,
                }
                for r in self.records
            ],
        }


def iteration_rng(problem_id: int, solver_seed: int, polling_seed: int,
                  k: int) -> np.random.Generator:
    """Generator for iteration k, reconstructible without replaying the run."""
    return np.random.default_rng([_ITER_TAG, seed_entry(problem_id),
                                  seed_entry(solver_seed), seed_entry(polling_seed),
                                  int(k)])


def _grad_norm(problem: Problem, x: Point) -> float | None:
    if problem.euclid_gradient is None:
        return None
    g = problem.manifold.gradient(x, problem.euclid_gradient(x))
    return float(np.linalg.norm(g.v))


def direct_search(problem: Problem, cfg: SolverConfig) -> SolverTrace:
    """Run the search until the evaluation budget is exhausted.

    The initial objective evaluation at x0 counts against the budget.  Every
    recorded quantity is a deterministic function of (problem, config), so
    repeated runs agree bit for bit.
    """
    mf = problem.manifold
    x = problem.x0
    f = float(problem.objective(x))
    trace = SolverTrace(problem_id=problem.problem_id, seed=cfg.seed)
    cumulative = 1
    alpha = cfg.alpha0
    k = 0
    while cumulative < cfg.budget:
        gnorm = _grad_norm(problem, x)
        if cfg.grad_tol is not None and gnorm is not None and gnorm <= cfg.grad_tol:
            break
        rng = iteration_rng(problem.problem_id, cfg.seed, cfg.polling.seed, k)
        pset = cfg.polling.build(x, rng)
        success = False
        truncated = False
        accepted = None
        x_next = x
        f_next = f
        evals_iter = 0
        for j, d in enumerate(pset.directions):
            if cumulative >= cfg.budget:
                truncated = True
                break
            y = mf.retract(x, alpha * d, cfg.retraction)
            fy = float(problem.objective(y))
            evals_iter += 1
            cumulative += 1
            if fy < f - 0.5 * cfg.c * alpha * alpha * float(d @ d):
                success = True
                accepted = j
                x_next, f_next = y, fy
                break
        trace.records.append(IterationRecord(
            k=k, alpha=alpha, f_value=f, success=success,
            accepted_index=accepted, evals=evals_iter,
            cumulative_evals=cumulative, grad_norm=gnorm,
            truncated=truncated, coords=x.x))
        if success:
            x, f = x_next, f_next
            alpha = min(cfg.gamma_inc * alpha, cfg.alpha_max)
        elif not truncated:
            alpha = cfg.gamma_dec * alpha
        k += 1
    trace.final_point = x
    trace.final_f = f
    trace.final_grad_norm = _grad_norm(problem, x)
    trace.final_alpha = alpha
    trace.evals = cumulative
    return trace


def diagnostic_unsuccessful_bound(trace: SolverTrace, problem: Problem,
                                  l_est: float, cfg: SolverConfig) -> list[dict]:
    """Check the stationarity bound at fully polled unsuccessful iterations.

    At such an iteration the projected gradient satisfies
    ||grad f(x_k)|| <= (L + c) * b_max / (2 kappa_k) * alpha_k with b_max = 1
    for unit polling sets and kappa_k the polling set's cosine measure.  The
    polling set is rebuilt from the iteration RNG, so rotated variants are
    checked against the directions that were actually polled.
    """
    if problem.euclid_gradient is None:
        raise ValueError("the diagnostic needs the problem's Euclidean gradient")
    mf = problem.manifold
    entries = []
    for rec in trace.records:
        if rec.success or rec.truncated:
            continue
        x = mf.point(rec.coords)
        g = mf.gradient(x, problem.euclid_gradient(x))
        lhs = float(np.linalg.norm(g.v))
        rng = iteration_rng(problem.problem_id, cfg.seed, cfg.polling.seed, rec.k)
        pset = cfg.polling.build(x, rng)
        kappa = tangent_cosine_measure(pset, mf.tangent_basis(x)).cosine_measure
        if kappa <= 0.0:
            raise ValueError(f"polling set at iteration {rec.k} is not positively spanning")
        rhs = (l_est + cfg.c) / (2.0 * kappa) * rec.alpha
        entries.append({"k": rec.k, "grad_norm": lhs, "bound": rhs,
                        "satisfied": bool(lhs <= rhs)})
    return entries


def diagnostic_step_square_sum(trace: SolverTrace) -> float:
    """Sum of alpha_k^2 over recorded iterations (bounded for any run)."""
    return float(sum(r.alpha * r.alpha for r in trace.records))

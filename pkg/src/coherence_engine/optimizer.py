"""Grid sweeps and simplex refinement over (beta_omega0, gt)."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .engine_cycle import CyclePerformance, performance_from_charge
from .jc_charging import DEFAULT_ACC, BathSpec, charged_qubit_state

OBJECTIVES = {
    "external_coherence": "external_coherence",
    "ext": "external_coherence",
    "efficiency": "efficiency",
    "eta": "efficiency",
}

# reflection, expansion, contraction, shrink
NM_COEFFS = (1.0, 2.0, 0.5, 0.5)


def canonical_objective(name: str) -> str:
    try:
        return OBJECTIVES[name]
    except KeyError:
        raise ValueError(f"unknown objective {name!r}; choose from {sorted(OBJECTIVES)}") from None


def objective_value(perf: CyclePerformance, objective: str) -> float:
    if canonical_objective(objective) == "efficiency":
        return perf.eta
    return perf.c_ext_per_qubit


@dataclass(frozen=True)
class SweepGrid:
    beta_range: tuple = (0.01, 3.0, 60)
    gt_range: tuple = (0.0, 30.0, 60)
    objective: str = "efficiency"
    n_qubits: int = 4
    acc: float = DEFAULT_ACC

    def __post_init__(self):
        for name, (lo, hi, steps) in (("beta", self.beta_range), ("gt", self.gt_range)):
            if not lo < hi:
                raise ValueError(f"{name} range needs min < max, got {lo}, {hi}")
            if int(steps) < 2:
                raise ValueError(f"{name} range needs at least 2 steps")
        if not self.beta_range[0] > 0:
            raise ValueError("beta_omega0 must stay positive; the bath partition function diverges at 0")
        if self.gt_range[0] < 0:
            raise ValueError("gt must be non-negative")
        object.__setattr__(self, "objective", canonical_objective(self.objective))

    def betas(self) -> np.ndarray:
        lo, hi, steps = self.beta_range
        return np.linspace(lo, hi, int(steps))

    def gts(self) -> np.ndarray:
        lo, hi, steps = self.gt_range
        return np.linspace(lo, hi, int(steps))

    @property
    def cell(self) -> tuple[float, float]:
        return (
            (self.beta_range[1] - self.beta_range[0]) / (int(self.beta_range[2]) - 1),
            (self.gt_range[1] - self.gt_range[0]) / (int(self.gt_range[2]) - 1),
        )

    @property
    def bounds(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return (self.beta_range[0], self.beta_range[1]), (self.gt_range[0], self.gt_range[1])


@dataclass(frozen=True)
class ChargeSummary:
    """The parts of a charging event that every N-copy evaluation needs."""

    beta_omega0: float
    gt: float
    rho_s: np.ndarray
    s_bath: float

    def performance(self, n: int) -> CyclePerformance:
        return performance_from_charge(self.rho_s, self.s_bath, n, self.beta_omega0, self.gt)


def charge_summary(beta_omega0: float, gt: float, acc: float = DEFAULT_ACC) -> ChargeSummary:
    charge = charged_qubit_state(beta_omega0, gt, BathSpec(beta_omega0, acc=acc))
    return ChargeSummary(beta_omega0, gt, charge.rho_s.matrix, charge.s_bath)


def _charge_row(args) -> list[ChargeSummary]:
    beta, gts, acc = args
    return [charge_summary(beta, float(gt), acc) for gt in gts]


def charge_grid(grid: SweepGrid, workers: int = 1) -> list[ChargeSummary]:
    """Charging summaries in row-major order (beta outer, gt inner)."""
    tasks = [(float(b), grid.gts(), grid.acc) for b in grid.betas()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_charge_row, tasks))
    else:
        rows = [_charge_row(t) for t in tasks]
    return [c for row in rows for c in row]


@dataclass(frozen=True)
class SweepRow:
    beta_omega0: float
    gt: float
    value: float
    performance: CyclePerformance


def grid_sweep(grid: SweepGrid, workers: int = 1, charges: list[ChargeSummary] | None = None) -> list[SweepRow]:
    """Evaluate the objective at every node; pass ``charges`` to reuse a charged grid."""
    charges = charge_grid(grid, workers) if charges is None else charges
    rows = []
    for c in charges:
        perf = c.performance(grid.n_qubits)
        rows.append(SweepRow(c.beta_omega0, c.gt, objective_value(perf, grid.objective), perf))
    return rows


def _rank_key(value: float, point) -> tuple:
    # larger value first; ties toward smaller beta, then smaller gt
    return (-value, point[0], point[1])


def grid_argmax(rows: list[SweepRow]) -> SweepRow:
    return min(rows, key=lambda r: _rank_key(r.value, (r.beta_omega0, r.gt)))


@dataclass
class OptimizationResult:
    best_point: tuple
    best_value: float
    trace: list = field(default_factory=list)
    refined: bool = False
    start_value: float = math.nan
    accepted: list = field(default_factory=list)
    evaluations: int = 0


def point_objective(objective: str, n: int, acc: float = DEFAULT_ACC):
    objective = canonical_objective(objective)

    def f(point) -> float:
        beta, gt = point
        return objective_value(charge_summary(float(beta), float(gt), acc).performance(n), objective)

    return f


def refine(
    start,
    objective,
    n: int = 4,
    bounds=((0.01, 3.0), (0.0, 30.0)),
    step=(0.05, 0.5),
    tol: float = 1e-3,
    max_evals: int = 200,
    acc: float = DEFAULT_ACC,
) -> OptimizationResult:
    """Downhill-simplex maximisation in the box ``bounds``.

    ``objective`` is an objective name (evaluated through the charging
    model for ``n`` qubits) or any callable of a 2-point.  Trial points are
    clipped into the box.  Stops when the simplex spans less than ``tol``
    in both coordinates (``refined=True``) or after ``max_evals``
    evaluations, returning the best point seen either way.
    """
    f = point_objective(objective, n, acc) if isinstance(objective, str) else objective
    lo = np.array([bounds[0][0], bounds[1][0]], dtype=float)
    hi = np.array([bounds[0][1], bounds[1][1]], dtype=float)
    alpha, gamma, rho, sigma = NM_COEFFS
    result = OptimizationResult(best_point=tuple(map(float, start)), best_value=-math.inf)

    def evaluate(x):
        x = np.clip(np.asarray(x, dtype=float), lo, hi)
        v = float(f(x))
        result.trace.append(((float(x[0]), float(x[1])), v))
        result.evaluations += 1
        return x, v

    def key(vertex):
        x, v = vertex
        return _rank_key(v, x)

    x0 = np.clip(np.asarray(start, dtype=float), lo, hi)
    simplex = [evaluate(x0)]
    result.start_value = simplex[0][1]
    for i in range(2):
        x = x0.copy()
        x[i] += step[i] if x0[i] + step[i] <= hi[i] else -step[i]
        simplex.append(evaluate(x))

    converged = False
    while True:
        simplex.sort(key=key)
        result.accepted.append((tuple(map(float, simplex[0][0])), simplex[0][1]))
        pts = np.array([x for x, _ in simplex])
        if np.all(pts.max(axis=0) - pts.min(axis=0) < tol):
            converged = True
            break
        if result.evaluations >= max_evals:
            break
        best, second, worst = simplex
        centroid = (best[0] + second[0]) / 2
        xr, vr = evaluate(centroid + alpha * (centroid - worst[0]))
        if key((xr, vr)) < key(best):
            xe, ve = evaluate(centroid + gamma * (xr - centroid))
            simplex[2] = (xe, ve) if key((xe, ve)) < key((xr, vr)) else (xr, vr)
            continue
        if key((xr, vr)) < key(second):
            simplex[2] = (xr, vr)
            continue
        if key((xr, vr)) < key(worst):
            xc, vc = evaluate(centroid + rho * (xr - centroid))
            if key((xc, vc)) <= key((xr, vr)):
                simplex[2] = (xc, vc)
                continue
        else:
            xc, vc = evaluate(centroid + rho * (worst[0] - centroid))
            if key((xc, vc)) < key(worst):
                simplex[2] = (xc, vc)
                continue
        simplex = [best] + [evaluate(best[0] + sigma * (x - best[0])) for x, _ in simplex[1:]]

    best_x, best_v = min(((np.array(p), v) for p, v in result.trace), key=key)
    result.best_point = (float(best_x[0]), float(best_x[1]))
    result.best_value = best_v
    result.refined = converged
    return result


@dataclass(frozen=True)
class PerNRow:
    n_qubits: int
    grid_point: tuple
    grid_value: float
    best_point: tuple
    best_value: float
    refined: bool
    c_int_per_qubit: float
    performance: CyclePerformance


def optimal_per_n(
    n_max: int,
    objective: str = "efficiency",
    grid: SweepGrid | None = None,
    workers: int = 1,
    n_values=None,
) -> list[PerNRow]:
    """Grid search then simplex refinement for each system size.

    The charged grid does not depend on N and is computed once.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    grid = SweepGrid(objective=objective) if grid is None else grid
    charges = charge_grid(grid, workers)
    step = grid.cell
    out = []
    for n in (range(1, n_max + 1) if n_values is None else n_values):
        g = SweepGrid(grid.beta_range, grid.gt_range, objective, n, grid.acc)
        top = grid_argmax(grid_sweep(g, charges=charges))
        res = refine((top.beta_omega0, top.gt), objective, n, bounds=grid.bounds, step=step, acc=grid.acc)
        perf = charge_summary(*res.best_point, grid.acc).performance(n)
        out.append(
            PerNRow(
                n_qubits=n,
                grid_point=(top.beta_omega0, top.gt),
                grid_value=top.value,
                best_point=res.best_point,
                best_value=res.best_value,
                refined=res.refined,
                c_int_per_qubit=perf.c_int_total / n,
                performance=perf,
            )
        )
    return out

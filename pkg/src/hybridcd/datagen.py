"""Synthetic benchmark data with known causal graphs.

Two families:

* linear SCMs on the six small structures (v-structure, fork, diamond,
  unfaithful diamond, cyclic fork, cyclic diamond) with uniform or Gaussian
  noise, every cross edge drawn instantaneous or at lag 1;
* a multi-species Ricker model on a random 3-trophic-level food web.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .graph import SummaryGraph, WindowGraph, scg_from_wcg, topological_order, _is_acyclic
from .stats import Dataset

log = logging.getLogger(__name__)

# structure id -> (variables, directed cross edges, has self causes)
STRUCTURES = {
    "v-structure": ("XYZ", [("X", "Z"), ("Y", "Z")], True),
    "fork": ("XYZ", [("X", "Y"), ("X", "Z")], True),
    "diamond": ("XYZW", [("X", "Y"), ("X", "Z"), ("Y", "W"), ("Z", "W")], True),
    "unfaithful-diamond": ("XYZW", [("X", "Y"), ("X", "Z"), ("Y", "W"), ("Z", "W")], False),
    "cyclic-fork": ("XYZ", [("X", "Y"), ("Y", "X"), ("X", "Z"), ("Z", "X")], True),
    "cyclic-diamond": ("XYZW", [("X", "Y"), ("Y", "X"), ("X", "Z"), ("Z", "X"),
                                ("Y", "W"), ("W", "Y"), ("Z", "W"), ("W", "Z")], True),
}
NOISES = ("uniform", "gaussian", "none")
MAX_RETRIES = 200


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ScmSpec:
    structure: str
    noise: str = "uniform"
    T: int = 1000
    seed: int = 0
    noise_scale: float = 0.1
    burn_in: int = 100
    lags: dict | None = None       # {(src, dst): 0 | 1} overrides the random lag draw
    coef: float | None = None      # fixed value for every coefficient instead of sampling
    x0: tuple | None = None        # initial state (defaults to zeros)

    def __post_init__(self):
        if self.structure not in STRUCTURES:
            raise ValueError(f"unknown structure {self.structure!r}; choose from {sorted(STRUCTURES)}")
        if self.noise not in NOISES:
            raise ValueError(f"unknown noise {self.noise!r}; choose from {NOISES}")
        if self.T < 1 or self.burn_in < 0:
            raise ValueError("T must be positive and burn_in nonnegative")


def sample_coefficient(rng: np.random.Generator, size=None):
    """Uniform on (-1, -0.1) U (0.1, 1)."""
    mag = rng.uniform(0.1, 1.0, size)
    sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    return mag * sign


def _draw_lags(rng, names, edges) -> dict:
    idx = {v: i for i, v in enumerate(names)}
    for _ in range(MAX_RETRIES):
        lags = {}
        for s, t in edges:
            if (t, s) in lags:
                # the reverse edge of a cycle pair: at most one side instantaneous
                lags[(s, t)] = 1 if lags[(t, s)] == 0 else int(rng.integers(0, 2))
            else:
                lags[(s, t)] = int(rng.integers(0, 2))
        inst = [(idx[s], idx[t]) for (s, t), l in lags.items() if l == 0]
        if _is_acyclic(len(names), inst):
            return lags
    raise GenerationError("could not draw an acyclic set of instantaneous edges")


def _spectral_radius(A0: np.ndarray, A1: np.ndarray) -> float:
    M = np.linalg.solve(np.eye(len(A0)) - A0, A1)
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def gen_structure(spec: ScmSpec) -> tuple[Dataset, WindowGraph, SummaryGraph]:
    """Simulate ``Y_t = a_y Y_{t-1} + sum a_xy X_{t-l} + noise_scale * xi``.

    Coefficients are redrawn (bounded retries) until the process is stable.
    Returns the data and the realized window/summary graphs.
    """
    names, edges, self_causes = STRUCTURES[spec.structure]
    names = list(names)
    d = len(names)
    idx = {v: i for i, v in enumerate(names)}
    rng = np.random.default_rng(spec.seed)
    unfaithful = spec.structure == "unfaithful-diamond"

    if spec.lags is not None:
        lags = {e: int(spec.lags[e]) for e in edges}
    elif unfaithful:
        lags = {e: 0 for e in edges}
    else:
        lags = _draw_lags(rng, names, edges)
    inst_edges = [(idx[s], idx[t]) for (s, t), l in lags.items() if l == 0]
    if not _is_acyclic(d, inst_edges):
        raise GenerationError("lag assignment gives an instantaneous cycle")

    for _ in range(MAX_RETRIES):
        A0 = np.zeros((d, d))   # A[t, s]: effect of s on t
        A1 = np.zeros((d, d))
        if self_causes:
            self_coef = np.full(d, spec.coef) if spec.coef is not None else sample_coefficient(rng, d)
            A1[np.arange(d), np.arange(d)] = self_coef
        for s, t in edges:
            a = spec.coef if spec.coef is not None else float(sample_coefficient(rng))
            (A0 if lags[(s, t)] == 0 else A1)[idx[t], idx[s]] = a
        if unfaithful and spec.coef is None:
            X, Y, Z, W = (idx[v] for v in "XYZW")
            # X's two paths into W cancel exactly
            A0[W, Y] = -A0[Z, X] * A0[W, Z] / A0[Y, X]
        if _spectral_radius(A0, A1) < 1.0 or spec.coef is not None:
            break
    else:
        raise GenerationError(f"no stable coefficients after {MAX_RETRIES} draws")

    topo = topological_order(d, inst_edges)
    n = spec.burn_in + spec.T
    if spec.noise == "uniform":
        xi = rng.uniform(-1.0, 1.0, (n, d))
    elif spec.noise == "gaussian":
        xi = rng.normal(0.0, 1.0, (n, d))
    else:
        xi = np.zeros((n, d))
    xi *= spec.noise_scale
    values = np.zeros((n + 1, d))
    if spec.x0 is not None:
        values[0] = spec.x0
    for t in range(1, n + 1):
        row = A1 @ values[t - 1] + xi[t - 1]
        for v in topo:
            row[v] += A0[v] @ row
        values[t] = row
    values = values[spec.burn_in + 1:] if spec.burn_in else values[1:]
    if not np.all(np.isfinite(values)):
        raise GenerationError("simulation produced non-finite values")

    lagged = {(s, 1, t) for t in range(d) for s in range(d) if A1[t, s] != 0}
    inst = {(s, t) for t in range(d) for s in range(d) if A0[t, s] != 0}
    # the cancelling coefficient is nonzero by construction; keep drawn lags as truth
    lagged |= {(idx[s], 1, idx[t]) for (s, t), l in lags.items() if l == 1}
    inst |= set(inst_edges)
    wcg = WindowGraph(1, names, lagged, inst)
    return Dataset(values, names), wcg, scg_from_wcg(wcg)


# ---------------------------------------------------------------- Ricker

@dataclass(frozen=True)
class RickerParams:
    S: int = 5
    T: int = 1000
    x: float = 0.5            # fixed environment
    mu: float = 0.05          # predator extinction rate
    sigma_r: float = 0.2      # sd of the log-scale process noise
    sigma_y: float = 0.2      # niche width
    dt: float = 0.5
    y_bar: float = 1.0
    seed: int = 0
    burn_in: int = 100
    interaction: np.ndarray | None = field(default=None, compare=False)  # A[x, y]: effect of x on y
    prey: tuple | None = None
    optimum: tuple | None = None

    def __post_init__(self):
        if self.S < 3 and self.interaction is None:
            raise ValueError("need at least 3 species for 3 trophic levels")


def trophic_levels(S: int) -> list[int]:
    """Level (0 = basal prey) of each species, levels of near-equal size."""
    sizes = [S // 3 + (1 if i < S % 3 else 0) for i in range(3)]
    return [lvl for lvl, k in enumerate(sizes) for _ in range(k)]


def random_food_web(S: int, rng: np.random.Generator) -> tuple[np.ndarray, list[int]]:
    """Connected 3-level food web with bidirected links.

    Every non-basal species eats at least one species of the level below;
    extra links between adjacent levels are added until the web is connected.
    Returns ``(A, level)`` with ``A[x, y]`` the effect of species x on y.
    """
    level = trophic_levels(S)
    by_level = [[i for i in range(S) if level[i] == k] for k in range(3)]
    links = set()
    for k in (1, 2):
        for pred in by_level[k]:
            links.add((int(rng.choice(by_level[k - 1])), pred))

    def components():
        comp = list(range(S))

        def find(i):
            while comp[i] != i:
                i = comp[i]
            return i
        for a, b in links:
            comp[find(a)] = find(b)
        return [find(i) for i in range(S)]

    candidates = [(a, b) for k in (1, 2) for a in by_level[k - 1] for b in by_level[k]]
    while len(set(components())) > 1:
        comp = components()
        bridging = [(a, b) for a, b in candidates if comp[a] != comp[b]]
        links.add(bridging[int(rng.integers(len(bridging)))])

    A = np.zeros((S, S))
    for prey, pred in links:
        A[prey, pred] = rng.uniform(0.1, 1.0)     # predator gains
        A[pred, prey] = -rng.uniform(0.1, 1.0)    # prey loses
    A[np.arange(S), np.arange(S)] = -rng.uniform(0.1, 1.0, S)  # self limitation
    return A, level


def ricker_step(prev: np.ndarray, A: np.ndarray, prey: np.ndarray, growth: np.ndarray,
                p: RickerParams, eps: np.ndarray) -> np.ndarray:
    drive = prev @ A                      # sum_x a_xy X_{t-1}
    drive = drive + np.where(prey, growth, -p.mu)
    return prev * np.exp(p.dt * drive + eps)


def gen_ricker(p: RickerParams) -> tuple[Dataset, SummaryGraph]:
    """Simulate multi-species Ricker dynamics with abiotic control.

    Prey grow with a Gaussian niche response to the environment, predators
    decay at rate ``mu``; both feel lag-1 interactions.  The truth summary
    graph is the bidirected food web plus a self loop on every species.
    """
    rng = np.random.default_rng(p.seed)
    if p.interaction is not None:
        A = np.asarray(p.interaction, dtype=float)
        S = A.shape[0]
        prey = np.asarray(p.prey if p.prey is not None else [True] * S, dtype=bool)
    else:
        S = p.S
        A, level = random_food_web(S, rng)
        prey = np.array([lvl == 0 for lvl in level]) if p.prey is None else np.asarray(p.prey, bool)
    optimum = np.asarray(p.optimum) if p.optimum is not None else rng.uniform(0, 1, S)
    niche = np.exp(-(optimum - p.x) ** 2 / (2 * p.sigma_y ** 2))
    growth = p.y_bar * (-np.diag(A)) * niche

    n = p.burn_in + p.T
    eps = rng.normal(0.0, p.sigma_r, (n, S))
    values = np.empty((n + 1, S))
    values[0] = p.y_bar
    with np.errstate(over="raise"):
        for t in range(1, n + 1):
            values[t] = ricker_step(values[t - 1], A, prey, growth, p, eps[t - 1])
    values = values[p.burn_in + 1:]
    if np.all(values[-1] == 0):
        log.warning("every species went extinct; dataset is degenerate")

    names = [f"S{i}" for i in range(S)]
    edges = {(x, y) for x in range(S) for y in range(S) if x != y and A[x, y] != 0}
    loops = {y for y in range(S)}
    return Dataset(values, names), SummaryGraph(names, edges, loops)


# ------------------------------------------------------- five-variable example

RUNNING_NAMES = ["X", "Y", "Z", "W", "U"]
_X, _Y, _Z, _W, _U = range(5)
RUNNING_LAGGED = {(v, 1, v) for v in range(5)} | {
    (_X, 1, _Y), (_X, 1, _Z), (_W, 1, _Z), (_W, 2, _Y)}
RUNNING_INST = {(_Y, _Z), (_Y, _W), (_Z, _W), (_Y, _X), (_Z, _X), (_W, _U)}


def running_example_graph() -> WindowGraph:
    """Window graph (gamma = 2) of the five-variable example with an
    instantaneous cycle group over X, Y, Z, W and a pendant edge W -> U."""
    return WindowGraph(2, RUNNING_NAMES, RUNNING_LAGGED, RUNNING_INST)


def _companion_radius(A: np.ndarray) -> float:
    """Spectral radius of the lag-2 VAR implied by ``A[lag, dst, src]``."""
    d = A.shape[1]
    inv = np.linalg.inv(np.eye(d) - A[0])
    top = np.hstack([inv @ A[1], inv @ A[2]])
    comp = np.vstack([top, np.hstack([np.eye(d), np.zeros((d, d))])])
    return float(np.max(np.abs(np.linalg.eigvals(comp))))


def gen_running_example(T: int = 1000, seed: int = 0, noise: str = "uniform",
                        noise_scale: float = 0.1, burn_in: int = 100
                        ) -> tuple[Dataset, WindowGraph, SummaryGraph]:
    """Linear simulation of :func:`running_example_graph`.

    Coefficients are positive: self terms from [0.3, 0.5], other lagged
    terms from [0.2, 0.4], instantaneous terms from [0.2, 0.5].  They are
    redrawn until the process is stable.  Equal signs keep
    distinct paths between two nodes from cancelling.
    """
    if noise not in NOISES:
        raise ValueError(f"unknown noise {noise!r}")
    g = running_example_graph()
    rng = np.random.default_rng(seed)
    edges = [(s, l, t) for s, l, t in sorted(g.lagged)] + [(s, 0, t) for s, t in sorted(g.inst)]
    for _ in range(50 * MAX_RETRIES):   # positive feedback rejects many draws
        A = np.zeros((3, 5, 5))   # A[lag, dst, src]
        for s, lag, t in edges:
            lo, hi = (0.3, 0.5) if s == t else (0.2, 0.4) if lag else (0.2, 0.5)
            A[lag, t, s] = rng.uniform(lo, hi)
        if _companion_radius(A) < 0.95:
            break
    else:
        raise GenerationError("no stable coefficients for the five-variable example")
    topo = topological_order(5, g.inst)
    n = burn_in + T
    if noise == "uniform":
        xi = rng.uniform(-1.0, 1.0, (n, 5))
    elif noise == "gaussian":
        xi = rng.normal(0.0, 1.0, (n, 5))
    else:
        xi = np.zeros((n, 5))
    xi *= noise_scale
    values = np.zeros((n + 2, 5))
    for t in range(2, n + 2):
        row = A[1] @ values[t - 1] + A[2] @ values[t - 2] + xi[t - 2]
        for v in topo:
            row[v] += A[0, v] @ row
        values[t] = row
    values = values[burn_in + 2:]
    return Dataset(values, list(RUNNING_NAMES)), g, scg_from_wcg(g)

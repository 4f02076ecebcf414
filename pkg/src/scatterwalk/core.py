"""Full-state engine for the scattering walk on a complete graph.

The walker lives on directed edges of the complete graph on N vertices.
A state is a complex vector over all N(N-1) ordered pairs (m, l), m != l,
read as "traveling from m to l", stored in canonical order

    index(m, l) = m*(N-1) + (l if l < m else l - 1)

i.e. row-major over sources with the diagonal removed.  One step scatters
every amplitude at its destination vertex with the Grover-type local
unitary (reflection -r back along the incoming edge, transmission t to
every other outgoing edge, t = 2/(N-1), r = 1 - t) and applies a phase
e^{i*phi} whenever the walker enters or leaves an edge whose endpoints
both belong to the marked vertex set.

The step is computed matrix-free in O(N^2): writing A[m, l] for the
amplitude on (m, l), the unmarked step is

    out[l, m] = t * sum_k A[k, l] - A[m, l]

which folds the reflection into the transmission using r + t = 1.  Marked
phases are a diagonal sandwich around that kernel: multiply every edge
internal to the marked set by e^{i*phi} before and after scattering,
which reproduces e^{2i*phi} on reflection back into a marked edge and
e^{i*phi} on entry or exit.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

__all__ = [
    "WalkConfig",
    "ScatteringCoefficients",
    "coefficients",
    "edge_index",
    "edge_endpoints",
    "edge_endpoint_arrays",
    "n_edge_states",
    "initial_state",
    "apply_step",
    "evolve",
    "marked_probability",
    "marked_edge_indices",
    "dense_step_operator",
]


@dataclass(frozen=True)
class WalkConfig:
    """Walk parameters: graph size N, marked vertex set, edge phase phi.

    The marked set may be empty (unmarked walk) or a singleton, in which
    case no edge is marked and the phase never fires.  Vertices are the
    integers 0..N-1.
    """

    n_vertices: int
    marked_set: frozenset[int] = field(default_factory=frozenset)
    phase: float = 0.0

    def __post_init__(self) -> None:
        n = self.n_vertices
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            raise TypeError(f"n_vertices must be an integer, got {n!r}")
        if n < 3:
            raise ValueError(f"n_vertices must be >= 3, got {n}")
        marked = frozenset(int(v) for v in self.marked_set)
        if any(v < 0 or v >= n for v in marked):
            raise ValueError(f"marked vertices must lie in 0..{n - 1}: {sorted(marked)}")
        object.__setattr__(self, "marked_set", marked)
        object.__setattr__(self, "phase", float(self.phase))

    @property
    def k_marked(self) -> int:
        return len(self.marked_set)


class ScatteringCoefficients(NamedTuple):
    """Transmission/reflection pair (t, r) of the local scattering unitary."""

    t: float
    r: float


def coefficients(n_vertices: int) -> ScatteringCoefficients:
    """Return t = 2/(N-1) and r = 1 - t for a degree-(N-1) vertex.

    Rejects N < 3: a degree-1 vertex has no nontrivial scattering.
    """
    if n_vertices < 3:
        raise ValueError(f"need n_vertices >= 3, got {n_vertices}")
    t = 2.0 / (n_vertices - 1)
    return ScatteringCoefficients(t=t, r=1.0 - t)


def n_edge_states(n_vertices: int) -> int:
    return n_vertices * (n_vertices - 1)


def edge_index(n_vertices: int, source: int, target: int) -> int:
    """Canonical index of the directed edge state (source -> target)."""
    if source == target:
        raise ValueError(f"no edge state ({source}, {target}): endpoints coincide")
    if not (0 <= source < n_vertices and 0 <= target < n_vertices):
        raise ValueError(f"endpoints ({source}, {target}) out of range for N={n_vertices}")
    return source * (n_vertices - 1) + (target if target < source else target - 1)


def edge_endpoints(n_vertices: int, index: int) -> tuple[int, int]:
    """Inverse of edge_index."""
    if not (0 <= index < n_edge_states(n_vertices)):
        raise ValueError(f"edge index {index} out of range for N={n_vertices}")
    source, rem = divmod(index, n_vertices - 1)
    target = rem if rem < source else rem + 1
    return source, target


@lru_cache(maxsize=32)
def edge_endpoint_arrays(n_vertices: int) -> tuple[np.ndarray, np.ndarray]:
    """(sources, targets) for every packed index, in canonical order."""
    n = n_vertices
    sources = np.repeat(np.arange(n), n - 1)
    offs = np.tile(np.arange(n - 1), n)
    targets = offs + (offs >= sources)
    sources.setflags(write=False)
    targets.setflags(write=False)
    return sources, targets


@lru_cache(maxsize=32)
def _offdiag_mask(n_vertices: int) -> np.ndarray:
    mask = ~np.eye(n_vertices, dtype=bool)
    mask.setflags(write=False)
    return mask


def _unpack(state: np.ndarray, n_vertices: int) -> np.ndarray:
    """Packed vector -> N x N matrix A with A[m, l] = amplitude(m -> l)."""
    grid = np.zeros((n_vertices, n_vertices), dtype=np.complex128)
    grid[_offdiag_mask(n_vertices)] = state
    return grid


def _pack(grid: np.ndarray, n_vertices: int) -> np.ndarray:
    return grid[_offdiag_mask(n_vertices)]


def initial_state(n_vertices: int) -> np.ndarray:
    """Equal superposition of all N(N-1) directed edge states."""
    if n_vertices < 3:
        raise ValueError(f"need n_vertices >= 3, got {n_vertices}")
    dim = n_edge_states(n_vertices)
    return np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)


def _check_state(state: np.ndarray, n_vertices: int) -> np.ndarray:
    state = np.asarray(state, dtype=np.complex128)
    expect = n_edge_states(n_vertices)
    if state.shape != (expect,):
        raise ValueError(
            f"state has shape {state.shape}, expected ({expect},) for N={n_vertices}"
        )
    if not np.isfinite(state).all():
        raise ValueError("state contains non-finite amplitudes")
    return state


def _marked_index_list(config: WalkConfig) -> np.ndarray:
    return np.fromiter(sorted(config.marked_set), dtype=np.intp, count=config.k_marked)


def _step_grid(grid: np.ndarray, t: float, marked: np.ndarray, phase: float) -> np.ndarray:
    """One step on the N x N layout; `marked` is a sorted vertex index array."""
    shift = len(marked) >= 2 and phase != 0.0
    if shift:
        factor = cmath.exp(1j * phase)
        block = np.ix_(marked, marked)
        grid = grid.copy()
        grid[block] *= factor
    incoming = grid.sum(axis=0)
    out = t * incoming[:, None] - grid.T
    np.fill_diagonal(out, 0.0)
    if shift:
        out[block] *= factor
    return out


def apply_step(state: np.ndarray, config: WalkConfig) -> np.ndarray:
    """Apply one step of the walk, marked-edge phases included.

    Returns a fresh state vector; the input is not modified.
    """
    state = _check_state(state, config.n_vertices)
    t, _ = coefficients(config.n_vertices)
    grid = _unpack(state, config.n_vertices)
    out = _step_grid(grid, t, _marked_index_list(config), config.phase)
    return _pack(out, config.n_vertices)


def evolve(state: np.ndarray, config: WalkConfig, steps: int) -> np.ndarray:
    """Apply `steps` walk steps.  steps = 0 returns a copy of the input."""
    if steps < 0 or steps != int(steps):
        raise ValueError(f"steps must be a nonnegative integer, got {steps!r}")
    state = _check_state(state, config.n_vertices)
    if steps == 0:
        return state.copy()
    t, _ = coefficients(config.n_vertices)
    marked = _marked_index_list(config)
    grid = _unpack(state, config.n_vertices)
    for _ in range(int(steps)):
        grid = _step_grid(grid, t, marked, config.phase)
    return _pack(grid, config.n_vertices)


def marked_edge_indices(config: WalkConfig) -> np.ndarray:
    """Packed indices of all directed edges internal to the marked set."""
    sources, targets = edge_endpoint_arrays(config.n_vertices)
    member = np.zeros(config.n_vertices, dtype=bool)
    member[list(config.marked_set)] = True
    return np.nonzero(member[sources] & member[targets])[0]


def marked_probability(state: np.ndarray, config: WalkConfig) -> float:
    """Probability of measuring the walker on an edge internal to the marked set."""
    state = _check_state(state, config.n_vertices)
    idx = marked_edge_indices(config)
    return float(np.sum(np.abs(state[idx]) ** 2))


def dense_step_operator(config: WalkConfig) -> np.ndarray:
    """Explicit N(N-1) x N(N-1) matrix of one walk step.

    Assembled entry by entry from (t, r), with the marked phase applied as
    diagonal factors on marked in-edges and marked out-edges.  Exists for
    verification: unitarity of this matrix is the operational check on the
    coefficient pair, and it must agree with the matrix-free apply_step.
    Cost O(N^4); intended for small N.
    """
    n = config.n_vertices
    t, r = coefficients(n)
    dim = n_edge_states(n)
    op = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(n):
        for l in range(n):
            if k == l:
                continue
            col = edge_index(n, k, l)
            for m in range(n):
                if m == l:
                    continue
                op[edge_index(n, l, m), col] = -r if m == k else t
    if config.k_marked >= 2 and config.phase != 0.0:
        factor = cmath.exp(1j * config.phase)
        diag = np.ones(dim, dtype=np.complex128)
        diag[marked_edge_indices(config)] = factor
        op = diag[:, None] * op * diag[None, :]
    return op

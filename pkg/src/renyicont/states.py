"""Bipartite density operators, samplers, perturbations and the JSON state format.

Randomness comes from numpy's counter-based ``Philox`` bit generator; an
integer seed always maps to ``Generator(Philox(seed))`` so campaign records
can be replayed from the stored seed alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import operators as ops
from .errors import ValidationError

TRACE_ATOL = 1e-9
CLASSICAL_ATOL = 1e-10
ENSEMBLES = ("haar-pure", "hilbert-schmidt", "bures", "rank-limited")
PERTURBATION_MODES = ("mixing", "hermitian-direction", "classical-only")


def make_rng(seed) -> np.random.Generator:
    """Philox generator from an int, a sequence of ints, or pass a Generator through."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (list, tuple)):
        return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(s) for s in seed])))
    return np.random.Generator(np.random.Philox(int(seed)))


def is_classical_a(matrix: np.ndarray, d_A: int, d_B: int, atol: float = CLASSICAL_ATOL) -> bool:
    t = matrix.reshape(d_A, d_B, d_A, d_B)
    off = t.copy()
    for a in range(d_A):
        off[a, :, a, :] = 0
    return bool(np.max(np.abs(off), initial=0.0) <= atol)


def is_classical_b(matrix: np.ndarray, d_A: int, d_B: int, atol: float = CLASSICAL_ATOL) -> bool:
    t = matrix.reshape(d_A, d_B, d_A, d_B)
    off = t.copy()
    for b in range(d_B):
        off[:, b, :, b] = 0
    return bool(np.max(np.abs(off), initial=0.0) <= atol)


def as_density(m) -> np.ndarray:
    """Validate a density operator (PSD, unit trace within 1e-9)."""
    m = ops.as_psd(m)
    tr = np.trace(m).real
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValidationError(f"state is not normalized: trace {tr:.12g} != 1")
    return m


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Density operator on A (x) B with composite index ``a * d_B + b``.

    The classical flags assert block structure: A-classical means the
    off-diagonal A blocks vanish, B-classical the same for B.
    """

    matrix: np.ndarray
    d_A: int
    d_B: int
    classical_A: bool = False
    classical_B: bool = False

    def __post_init__(self):
        if self.d_A < 1 or self.d_B < 1:
            raise ValidationError(f"dimensions must be positive, got ({self.d_A}, {self.d_B})")
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (self.d_A * self.d_B,) * 2:
            raise ValidationError(f"matrix shape {m.shape} does not match d_A*d_B = {self.d_A * self.d_B}")
        m = as_density(m)
        if self.classical_A and not is_classical_a(m, self.d_A, self.d_B):
            raise ValidationError("state flagged A-classical has off-diagonal A blocks")
        if self.classical_B and not is_classical_b(m, self.d_A, self.d_B):
            raise ValidationError("state flagged B-classical has off-diagonal B blocks")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.d_A, self.d_B)

    @property
    def dim(self) -> int:
        return self.d_A * self.d_B

    def marginal_A(self) -> np.ndarray:
        return ops.partial_trace(self.matrix, self.dims, "A")

    def marginal_B(self) -> np.ndarray:
        return ops.partial_trace(self.matrix, self.dims, "B")

    def with_matrix(self, matrix) -> "BipartiteState":
        return BipartiteState(matrix, self.d_A, self.d_B, self.classical_A, self.classical_B)


@dataclass(frozen=True)
class PerturbationSpec:
    epsilon: float
    mode: str = "mixing"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValidationError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.mode not in PERTURBATION_MODES:
            raise ValidationError(f"unknown perturbation mode {self.mode!r}; choose from {PERTURBATION_MODES}")


# -- samplers -----------------------------------------------------------------

def ginibre(n: int, k: int, rng) -> np.ndarray:
    rng = make_rng(rng)
    return (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) / np.sqrt(2.0)


def random_unitary(n: int, rng) -> np.ndarray:
    """Haar unitary via QR of a Ginibre matrix with the R-diagonal phases removed."""
    q, r = np.linalg.qr(ginibre(n, n, rng))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density(n: int, rng, ensemble: str = "hilbert-schmidt", rank: int | None = None) -> np.ndarray:
    rng = make_rng(rng)
    if ensemble == "haar-pure":
        v = ginibre(n, 1, rng)[:, 0]
        v /= np.linalg.norm(v)
        m = np.outer(v, v.conj())
    elif ensemble == "hilbert-schmidt":
        g = ginibre(n, n, rng)
        m = g @ g.conj().T
    elif ensemble == "bures":
        g = ginibre(n, n, rng)
        a = (np.eye(n) + random_unitary(n, rng)) @ g
        m = a @ a.conj().T
    elif ensemble == "rank-limited":
        if rank is None or not 1 <= rank <= n:
            raise ValidationError(f"rank-limited ensemble needs 1 <= rank <= {n}, got {rank}")
        g = ginibre(n, rank, rng)
        m = g @ g.conj().T
    else:
        raise ValidationError(f"unknown ensemble {ensemble!r}; choose from {ENSEMBLES}")
    m = 0.5 * (m + m.conj().T)
    return m / np.trace(m).real


def _parse_ensemble(ensemble: str, rank):
    # "rank-3" is shorthand for ("rank-limited", rank=3)
    if ensemble.startswith("rank-") and ensemble != "rank-limited":
        return "rank-limited", int(ensemble.split("-", 1)[1])
    return ensemble, rank


def sample_random_state(d_A: int, d_B: int, ensemble: str = "hilbert-schmidt", seed=0,
                        rank: int | None = None) -> BipartiteState:
    """Draw a bipartite state from ``ensemble``; deterministic per ``seed``."""
    if d_A < 1 or d_B < 1:
        raise ValidationError("dimensions must be positive")
    ensemble, rank = _parse_ensemble(ensemble, rank)
    return BipartiteState(random_density(d_A * d_B, seed, ensemble, rank), d_A, d_B)


def random_psd(n: int, rng, rank: int | None = None, scale: float = 1.0) -> np.ndarray:
    """Unnormalized PSD matrix ``scale * G G^+`` with ``G`` of shape ``(n, rank)``."""
    g = ginibre(n, n if rank is None else rank, rng)
    m = g @ g.conj().T
    return scale * 0.5 * (m + m.conj().T)


def random_table(d_A: int, d_B: int, rng, sparsity: float = 0.0) -> np.ndarray:
    """Joint distribution ``p[a, b]`` drawn uniformly from the simplex.

    With ``sparsity > 0`` each entry is zeroed with that probability before
    renormalizing (at least one entry is kept).
    """
    rng = make_rng(rng)
    p = rng.dirichlet(np.ones(d_A * d_B))
    if sparsity > 0:
        mask = rng.random(p.size) < sparsity
        if mask.all():
            mask[rng.integers(p.size)] = False
        p[mask] = 0.0
        p /= p.sum()
    return p.reshape(d_A, d_B)


# -- structured states --------------------------------------------------------

def make_cq_state(table) -> BipartiteState:
    """Diagonal state ``sum_ab p(a,b) |ab><ab|`` from a joint probability table."""
    p = np.asarray(table, dtype=float)
    if p.ndim != 2 or p.size == 0:
        raise ValidationError("probability table must be a non-empty 2-D array")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValidationError("probability table has negative or non-finite entries")
    if abs(p.sum() - 1.0) > 1e-10:
        raise ValidationError(f"probability table is not normalized: sum {p.sum():.12g}")
    d_A, d_B = p.shape
    return BipartiteState(np.diag(p.reshape(-1)).astype(np.complex128), d_A, d_B, True, True)


def max_entangled(d: int) -> BipartiteState:
    """Projector onto ``(1/sqrt d) sum_i |ii>``."""
    if d < 1:
        raise ValidationError("d must be positive")
    v = np.zeros(d * d, dtype=np.complex128)
    v[np.arange(d) * d + np.arange(d)] = 1.0 / np.sqrt(d)
    return BipartiteState(np.outer(v, v.conj()), d, d)


def product(rho_A, rho_B, classical_A: bool | None = None, classical_B: bool | None = None) -> BipartiteState:
    """Tensor-product state; classical flags default to diagonality of each factor."""
    rho_A = as_density(rho_A)
    rho_B = as_density(rho_B)
    if classical_A is None:
        classical_A = bool(np.allclose(rho_A, np.diag(np.diag(rho_A)), atol=CLASSICAL_ATOL))
    if classical_B is None:
        classical_B = bool(np.allclose(rho_B, np.diag(np.diag(rho_B)), atol=CLASSICAL_ATOL))
    return BipartiteState(np.kron(rho_A, rho_B), rho_A.shape[0], rho_B.shape[0], classical_A, classical_B)


def pure_state(vector, d_A: int, d_B: int) -> BipartiteState:
    v = np.asarray(vector, dtype=np.complex128)
    v = v / np.linalg.norm(v)
    return BipartiteState(np.outer(v, v.conj()), d_A, d_B)


# -- perturbations -------------------------------------------------------------

def _random_like(rho: BipartiteState, rng, ensemble: str) -> np.ndarray:
    """Random state sharing ``rho``'s classical structure."""
    d_A, d_B = rho.dims
    if rho.classical_A and rho.classical_B:
        return np.diag(random_table(d_A, d_B, rng).reshape(-1)).astype(np.complex128)
    if rho.classical_A:
        p = make_rng(rng).dirichlet(np.ones(d_A))
        blocks = [p[a] * random_density(d_B, rng, ensemble) for a in range(d_A)]
        m = np.zeros((d_A * d_B,) * 2, dtype=np.complex128)
        for a in range(d_A):
            m[a * d_B:(a + 1) * d_B, a * d_B:(a + 1) * d_B] = blocks[a]
        return m
    if rho.classical_B:
        p = make_rng(rng).dirichlet(np.ones(d_B))
        m = np.zeros((d_A * d_B,) * 2, dtype=np.complex128)
        for b in range(d_B):
            e = np.zeros((d_B, d_B))
            e[b, b] = 1.0
            m += p[b] * np.kron(random_density(d_A, rng, ensemble), e)
        return m
    return random_density(d_A * d_B, rng, ensemble)


def _mix(rho: BipartiteState, tau: np.ndarray, eps: float):
    dist = ops.trace_distance(rho.matrix, tau)
    if dist <= 0.0:
        return rho, 0.0
    t = min(1.0, eps / dist)
    sigma = (1.0 - t) * rho.matrix + t * tau
    realized = ops.trace_distance(rho.matrix, sigma)
    # rounding can push the realized distance a hair above the budget
    while realized > eps:
        t *= 1.0 - 1e-12
        sigma = (1.0 - t) * rho.matrix + t * tau
        realized = ops.trace_distance(rho.matrix, sigma)
    return rho.with_matrix(sigma), realized


def _clip_normalize(m: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(0.5 * (m + m.conj().T))
    w = np.clip(w, 0.0, None)
    out = (u * w) @ u.conj().T
    return out / np.trace(out).real


def _hermitian_direction(rho: BipartiteState, eps: float, rng, tol: float = 1e-6):
    n = rho.dim
    g = ginibre(n, n, rng)
    h = 0.5 * (g + g.conj().T)
    h -= np.trace(h).real / n * np.eye(n)
    h /= np.sum(np.abs(np.linalg.eigvalsh(h)))

    def at(s):
        sigma = _clip_normalize(rho.matrix + s * h)
        return sigma, ops.trace_distance(rho.matrix, sigma)

    lo, hi = 0.0, 2.0 * eps
    best = (rho.matrix, 0.0)
    sigma, d = at(hi)
    while d < eps and hi < 1e6:
        lo, best = hi, (sigma, d)
        hi *= 2.0
        sigma, d = at(hi)
    if d <= eps:
        best = (sigma, d)
    else:
        while hi - lo > 1e-15 * max(hi, 1.0):
            mid = 0.5 * (lo + hi)
            sigma, d = at(mid)
            if d <= eps:
                lo, best = mid, (sigma, d)
                if eps - d <= tol:
                    break
            else:
                hi = mid
    return rho.with_matrix(best[0]), best[1]


def perturb_within(rho: BipartiteState, spec: PerturbationSpec, ensemble: str = "hilbert-schmidt"):
    """Return ``(sigma, realized)`` with ``trace_distance(rho, sigma) = realized <= epsilon``.

    ``mixing`` moves toward a random state of ``ensemble``; ``classical-only``
    does the same with a partner that shares ``rho``'s classical flags (so
    diagonal inputs stay exactly diagonal); ``hermitian-direction`` adds a
    scaled traceless random Hermitian, clips and renormalizes, with the scale
    chosen by bisection so the realized distance is within 1e-6 of epsilon.
    """
    if spec.epsilon == 0.0:
        return rho, 0.0
    rng = make_rng(spec.seed)
    if spec.mode == "mixing":
        return _mix(rho, _random_like(rho, rng, ensemble) if (rho.classical_A or rho.classical_B)
                    else random_density(rho.dim, rng, ensemble), spec.epsilon)
    if spec.mode == "classical-only":
        if not (rho.classical_A or rho.classical_B):
            raise ValidationError("classical-only perturbation needs a state with a classical flag")
        return _mix(rho, _random_like(rho, rng, ensemble), spec.epsilon)
    if rho.classical_A or rho.classical_B:
        rho = BipartiteState(rho.matrix, rho.d_A, rho.d_B)
    return _hermitian_direction(rho, spec.epsilon, rng)


# -- serialization -------------------------------------------------------------

def state_to_dict(state: BipartiteState) -> dict:
    m = state.matrix
    return {
        "d_A": state.d_A,
        "d_B": state.d_B,
        "classical_A": state.classical_A,
        "classical_B": state.classical_B,
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def state_from_dict(data: dict) -> BipartiteState:
    try:
        d_A = int(data["d_A"])
        d_B = int(data["d_B"])
        raw = np.asarray(data["matrix"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed state object: {exc}") from exc
    if raw.ndim != 3 or raw.shape[2] != 2:
        raise ValidationError("matrix must be a 2-D array of [re, im] pairs")
    return BipartiteState(raw[..., 0] + 1j * raw[..., 1], d_A, d_B,
                          bool(data.get("classical_A", False)), bool(data.get("classical_B", False)))


def table_from_dict(data: dict) -> np.ndarray:
    if "table" not in data:
        raise ValidationError("probability file needs a 'table' field")
    return np.asarray(data["table"], dtype=float)


def load_state(path) -> BipartiteState:
    """Read a state file; probability-table files become cq states."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise ValidationError(f"cannot read state file: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError("state file must hold a JSON object")
    if isinstance(data, dict) and "table" in data and "matrix" not in data:
        return make_cq_state(table_from_dict(data))
    return state_from_dict(data)


def dump_state(state: BipartiteState, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state)))

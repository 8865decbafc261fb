"""Sandwiched Rényi divergences and conditional entropies (in bits).

The conditional entropy optimizes over states ``eta_B``::

    H_alpha(A|B) = sup_eta 1/(1-alpha) log2 tr[(eta^g rho eta^g)^alpha],
    g = (1 - alpha) / (2 alpha),

which is a maximization of the trace functional for ``alpha < 1`` and a
minimization for ``alpha > 1``.  Three independent solvers are available:

``fixed-point``
    damped iteration of ``eta <- normalize(tr_A[(eta^g rho eta^g)^alpha])``,
    whose fixed points are exactly the stationary points of the functional.
``gradient``
    L-BFGS over a Burer-Monteiro factor ``eta = L L^+ / tr(L L^+)`` with the
    analytic gradient of the trace functional.
``direct-search``
    derivative-free Nelder-Mead over ``eta = L L^+ / tr(L L^+)`` with ``L`` lower triangular.
``grid-oracle``
    exhaustive-resolution Bloch-ball lattice search (qubit B only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from . import operators as ops
from .errors import SolverError, ValidationError
from .states import BipartiteState, make_rng

CUTOFF = ops.SUPPORT_CUTOFF
VALID_ORDERS = "[1/2, 1) ∪ (1, ∞]"


@dataclass(frozen=True)
class RenyiOrder:
    """Rényi parameter in ``[1/2, 1) ∪ (1, inf]``."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v < 0.5 or v == 1.0 or v == -math.inf:
            raise ValidationError(f"Rényi order {self.value!r} outside the valid set {VALID_ORDERS}")
        object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, text) -> "RenyiOrder":
        if isinstance(text, RenyiOrder):
            return text
        if isinstance(text, str):
            t = text.strip().lower()
            if t in ("inf", "infinity", "∞", "+inf"):
                return cls(math.inf)
            if "/" in t:
                num, den = t.split("/", 1)
                return cls(float(num) / float(den))
            try:
                return cls(float(t))
            except ValueError:
                raise ValidationError(f"cannot parse Rényi order {text!r}; valid set is {VALID_ORDERS}") from None
        return cls(float(text))

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    @property
    def alpha_prime(self) -> float:
        if self.is_infinite:
            return 1.0
        return (self.value - 1.0) / self.value

    def __float__(self):
        return self.value

    def __str__(self):
        return "inf" if self.is_infinite else repr(self.value)


def as_order(order) -> RenyiOrder:
    return order if isinstance(order, RenyiOrder) else RenyiOrder.parse(order)


def dual_order(order) -> RenyiOrder:
    """The order beta with ``1/alpha + 1/beta = 2``."""
    order = as_order(order)
    if order.is_infinite:
        return RenyiOrder(0.5)
    a = order.value
    if a == 0.5:
        return RenyiOrder(math.inf)
    return RenyiOrder(a / (2.0 * a - 1.0))


@dataclass
class EntropyResult:
    value: float
    optimizer: np.ndarray | None
    solver: str
    iterations: int
    residual: float
    converged: bool
    details: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "value": self.value,
            "solver": self.solver,
            "iterations": self.iterations,
            "residual": self.residual,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for :func:`conditional_entropy_up`.

    ``solvers`` are always run; ``fallback`` adds the gradient solver and then
    direct search while none of them reached the stationarity tolerance.
    """

    solvers: tuple = ("fixed-point",)
    fallback: bool = True
    tol: float = 1e-10
    maxiter: int = 1000
    floor: float = 1e-14
    stationarity_tol: float = 1e-8
    agreement_tol: float = 1e-4
    restarts: int = 5
    seed: int = 0
    grid_resolution: int = 201
    grid_exhaustive: bool = False


DEFAULT_CONFIG = SolverConfig()


# -- unconditional quantities ---------------------------------------------------

def q_alpha(p, q, order) -> float:
    """``tr((q^{-a'/2} p q^{-a'/2})^alpha)`` with powers on supports.

    Returns ``inf`` for ``alpha > 1`` when the kernel of ``q`` is not inside
    the kernel of ``p``.
    """
    order = as_order(order)
    if order.is_infinite:
        raise ValidationError("q_alpha needs a finite order")
    p = ops.as_psd(p)
    q = ops.as_psd(q)
    if p.shape != q.shape:
        raise ValidationError(f"dimension mismatch: {p.shape} vs {q.shape}")
    return float(_kernels.sandwich_q(p, q, order.value, CUTOFF))


def sandwiched_divergence(p, q, order) -> float:
    """Sandwiched Rényi relative entropy in bits (``inf`` outside its domain)."""
    order = as_order(order)
    p = ops.as_psd(p)
    q = ops.as_psd(q)
    if p.shape != q.shape:
        raise ValidationError(f"dimension mismatch: {p.shape} vs {q.shape}")
    tr = float(np.trace(p).real)
    if tr <= 0.0:
        raise ValidationError("divergence needs tr(P) > 0")
    if order.is_infinite:
        lam = float(_kernels.sandwich_max(p, q, CUTOFF))
        if not math.isfinite(lam):
            return math.inf
        return math.log2(lam) if lam > 0 else -math.inf
    a = order.value
    log_q = _log2_sandwich_q(p, q, a)
    if log_q is None:
        # kernel leak for alpha > 1, or P orthogonal to Q for alpha < 1
        return math.inf
    return (log_q - math.log2(tr)) / (a - 1.0)


def _log2_sandwich_q(p, q, a: float):
    """``log2 tr((q^g p q^g)^a)`` without overflow; ``None`` when the trace is 0 or infinite."""
    if a > 1.0 and _kernels.kernel_leak(p, q, CUTOFF) > CUTOFF * max(np.trace(p).real, 1.0) * 1e2:
        return None
    qg = _kernels.herm_power(q, (1.0 - a) / (2.0 * a), CUTOFF)
    x = qg @ p @ qg
    w = np.linalg.eigvalsh(0.5 * (x + x.conj().T))
    w = w[w > CUTOFF * max(w[-1], 1.0)]
    if w.size == 0:
        return None
    top = w.max()
    return a * math.log2(top) + math.log2(np.sum((w / top) ** a))


def _spectrum(m) -> np.ndarray:
    w = np.linalg.eigvalsh(ops.as_hermitian(m))
    return w[w > ops.support_threshold(w)]


def von_neumann_entropy(m) -> float:
    w = _spectrum(m)
    return float(-np.sum(w * np.log2(w)))


def renyi_entropy(m, alpha) -> float:
    """Unconditional Rényi entropy ``1/(1-alpha) log2 tr m^alpha`` (alpha=1: von Neumann)."""
    alpha = float(alpha) if not isinstance(alpha, RenyiOrder) else alpha.value
    w = _spectrum(m)
    if alpha == 1.0:
        return float(-np.sum(w * np.log2(w)))
    if math.isinf(alpha):
        return float(-math.log2(w.max()))
    if alpha == 0.0:
        return float(math.log2(w.size))
    return float(math.log2(np.sum(w ** alpha)) / (1.0 - alpha))


def von_neumann_conditional(rho: BipartiteState) -> float:
    """``H(AB) - H(B)``."""
    return von_neumann_entropy(rho.matrix) - von_neumann_entropy(rho.marginal_B())


def classical_conditional_entropy(table, order) -> float:
    """Closed form for a fully classical state ``p(a, b)``.

    ``alpha/(1-alpha) log2 sum_b (sum_a p(a,b)^alpha)^(1/alpha)``, and
    ``-log2 sum_b max_a p(a,b)`` at ``alpha = inf``.
    """
    order = as_order(order)
    p = np.asarray(table, dtype=float)
    if order.is_infinite:
        return float(-math.log2(p.max(axis=0).sum()))
    a = order.value
    s = np.sum(p ** a, axis=0)
    return float(a / (1.0 - a) * math.log2(np.sum(s ** (1.0 / a))))


# -- conditional entropy ----------------------------------------------------------

def _value_from_q(q: float, alpha: float) -> float:
    if not math.isfinite(q):
        return -math.inf
    if q <= 0.0:
        return -math.inf if alpha < 1 else math.inf
    return math.log2(q) / (1.0 - alpha)


def _support_isometry(rho: BipartiteState):
    """Isometry ``V`` onto the support of ``rho_B`` and the compressed state."""
    w, u = np.linalg.eigh(rho.marginal_B())
    keep = w > ops.support_threshold(w)
    v = u[:, keep]
    if v.shape[1] == rho.d_B:
        return None, rho.matrix
    big = np.kron(np.eye(rho.d_A), v)
    reduced = big.conj().T @ rho.matrix @ big
    return v, np.ascontiguousarray(0.5 * (reduced + reduced.conj().T))


def stationarity_residual(rho_matrix, eta, d_A: int, alpha: float) -> float:
    """Trace distance between ``eta`` and its normalized fixed-point image."""
    g = (1.0 - alpha) / (2.0 * alpha)
    e = _kernels.lift_b(_kernels.herm_power(np.ascontiguousarray(eta, dtype=np.complex128), g, CUTOFF), d_A)
    x = e @ rho_matrix @ e
    x = 0.5 * (x + x.conj().T)
    w, u = np.linalg.eigh(x)
    xa = (u * np.clip(w, 0.0, None) ** alpha) @ u.conj().T
    t = _kernels.ptrace_a(np.ascontiguousarray(xa), d_A, eta.shape[0])
    t = t / np.trace(t).real
    return float(_kernels.trace_norm_half(eta - t))


def _closed_form(rho: BipartiteState, v, reduced, alpha: float) -> EntropyResult:
    # conditioning system is (effectively) one-dimensional: eta is forced
    rho_a = ops.partial_trace(rho.matrix, rho.dims, "A")
    value = renyi_entropy(rho_a, alpha)
    eta = np.ones((1, 1), dtype=np.complex128) if v is None else v @ v.conj().T
    return EntropyResult(value, eta.astype(np.complex128), "closed-form", 0, 0.0, True)


def solve_fixed_point(rho: BipartiteState, alpha: float, config: SolverConfig = DEFAULT_CONFIG) -> EntropyResult:
    v, reduced = _support_isometry(rho)
    d_b = rho.d_B if v is None else v.shape[1]
    if d_b == 1:
        return _closed_form(rho, v, reduced, alpha)
    eta0 = _kernels.ptrace_a(reduced, rho.d_A, d_b)
    eta0 = eta0 / np.trace(eta0).real
    eta, it, res, step = _kernels.fixed_point(reduced, eta0, rho.d_A, alpha, 1.0 / alpha,
                                              config.tol, config.maxiter, config.floor)
    q = float(_kernels.conditional_q(reduced, eta, rho.d_A, alpha, CUTOFF))
    full = eta if v is None else v @ eta @ v.conj().T
    full = 0.5 * (full + full.conj().T)
    return EntropyResult(_value_from_q(q, alpha), full, "fixed-point", int(it), float(res),
                         bool(res < config.stationarity_tol), {"last_step": float(step)})


def _q_and_jac(x, root, d_a, d, alpha, sign):
    L = (x[:d * d] + 1j * x[d * d:]).reshape(d, d)
    eta = L @ L.conj().T
    n = np.trace(eta).real
    if n <= 0.0:
        return 1e300, np.zeros_like(x)
    q, g = _kernels.conditional_q_grad(root, np.ascontiguousarray(eta / n), d_a, alpha, CUTOFF)
    # chain rule through the normalization eta / tr(eta)
    h = (g - (np.trace(g @ eta).real / n) * np.eye(d)) / n
    hl = 2.0 * (h @ L)
    return sign * q, sign * np.concatenate([hl.real.ravel(), hl.imag.ravel()])


def solve_gradient(rho: BipartiteState, alpha: float, config: SolverConfig = DEFAULT_CONFIG,
                   starts=None) -> EntropyResult:
    """L-BFGS on a square complex factor of ``eta`` (support of ``rho_B`` only).

    The factor parametrization keeps ``eta`` positive without constraints and,
    unlike a multiplicative update, can move weight back onto directions where
    ``eta`` is (numerically) singular.  The residual is the largest component
    of the gradient with respect to the factor, relative to the functional.
    """
    v, reduced = _support_isometry(rho)
    d = rho.d_B if v is None else v.shape[1]
    if d == 1:
        return _closed_form(rho, v, reduced, alpha)
    sign = -1.0 if alpha < 1 else 1.0
    w, u = np.linalg.eigh(reduced)
    root = np.ascontiguousarray((u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T)
    eta_starts = [_kernels.ptrace_a(reduced, rho.d_A, d)]
    for e in starts or ():
        e = np.asarray(e, dtype=np.complex128)
        eta_starts.append(e if v is None else v.conj().T @ e @ v)
    best = None
    evals = 0
    for e in eta_starts:
        e = 0.5 * (e + e.conj().T)
        e = e / np.trace(e).real + 1e-9 * np.eye(d)
        L = np.linalg.cholesky(e)
        x0 = np.concatenate([L.real.ravel(), L.imag.ravel()])
        r = minimize(_q_and_jac, x0, args=(root, rho.d_A, d, alpha, sign), jac=True, method="L-BFGS-B",
                     options={"maxiter": 20_000, "ftol": 1e-16, "gtol": 1e-13, "maxcor": 30})
        evals += int(r.nfev)
        if best is None or r.fun < best.fun:
            best = r
    L = (best.x[:d * d] + 1j * best.x[d * d:]).reshape(d, d)
    eta = L @ L.conj().T
    eta = eta / np.trace(eta).real
    q = float(_kernels.conditional_q(reduced, np.ascontiguousarray(eta), rho.d_A, alpha, CUTOFF))
    _, jac = _q_and_jac(best.x, root, rho.d_A, d, alpha, sign)
    res = float(np.max(np.abs(jac)) / max(abs(q), 1e-300))
    full = eta if v is None else v @ eta @ v.conj().T
    full = 0.5 * (full + full.conj().T)
    return EntropyResult(_value_from_q(q, alpha), full, "gradient", evals, res,
                         bool(res < config.stationarity_tol), {"message": str(best.message)})


def _eta_from_params(x: np.ndarray, d: int) -> np.ndarray:
    return _kernels.eta_from_params(np.ascontiguousarray(x, dtype=np.float64), d)


def _params_from_eta(eta: np.ndarray) -> np.ndarray:
    d = eta.shape[0]
    L = np.linalg.cholesky(eta + 1e-12 * np.eye(d))
    il = np.tril_indices(d, -1)
    return np.concatenate([L[np.diag_indices(d)].real, L[il].real, L[il].imag])


def solve_direct_search(rho: BipartiteState, alpha: float, config: SolverConfig = DEFAULT_CONFIG) -> EntropyResult:
    """Nelder-Mead over the full state space of B, ``config.restarts`` starts."""
    d = rho.d_B
    if d == 1:
        return _closed_form(rho, None, rho.matrix, alpha)
    sign = -1.0 if alpha < 1 else 1.0
    m = rho.matrix

    def objective(x):
        return _kernels.params_objective(x, m, rho.d_A, d, alpha, sign, CUTOFF)

    rng = make_rng(config.seed)
    rho_b = rho.marginal_B()
    starts = [_params_from_eta(rho_b / np.trace(rho_b).real)]
    while len(starts) < max(config.restarts, 1):
        starts.append(rng.standard_normal(d * d))
    n = d * d
    opts = {"xatol": 1e-9, "fatol": 1e-14, "maxiter": 2000 * n, "maxfev": 2000 * n, "adaptive": n > 4}
    best = None
    evals = 0
    for x0 in starts:
        r = minimize(objective, x0, method="Nelder-Mead", options=opts)
        evals += r.nfev
        if best is None or r.fun < best.fun:
            best = r
    # polishing restarts from the best optimum shake off simplex collapse
    for _ in range(2):
        r = minimize(objective, best.x, method="Nelder-Mead", options=opts)
        evals += r.nfev
        if r.fun <= best.fun:
            best = r
    eta = _eta_from_params(best.x, d)
    q = sign * best.fun
    value = _value_from_q(q, alpha)
    res = stationarity_residual(m, eta, rho.d_A, alpha) if np.isfinite(q) else math.inf
    return EntropyResult(value, eta, "direct-search", int(evals), res, bool(res < config.stationarity_tol))


def bloch_lattice(resolution: int) -> np.ndarray:
    return np.linspace(-1.0, 1.0, resolution)


def _lattice_points(idx: np.ndarray, coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pts = coords[idx]
    inside = np.einsum("ij,ij->i", pts, pts) <= 1.0 + 1e-12
    return idx[inside], pts[inside]


def solve_grid_oracle(rho: BipartiteState, alpha: float, config: SolverConfig = DEFAULT_CONFIG) -> EntropyResult:
    """Bloch-ball lattice search for a qubit conditioning system.

    The lattice has ``config.grid_resolution`` points per axis over
    ``[-1, 1]``.  With ``grid_exhaustive`` every lattice point in the closed
    ball is evaluated.  Otherwise the lattice is scanned coarse-to-fine (stride
    ~R/10, then /4 per level down to 1), keeping the four best points per
    level and rescanning a window of one coarse stride around each; the result
    is always a lattice point.
    """
    if rho.d_B != 2:
        raise ValidationError("grid oracle needs d_B = 2")
    R = int(config.grid_resolution)
    coords = bloch_lattice(R)
    m = rho.matrix
    sign = -1.0 if alpha < 1 else 1.0
    evaluated = 0

    def evaluate(idx):
        nonlocal evaluated
        idx, pts = _lattice_points(idx, coords)
        vals = _kernels.bloch_grid_q(m, rho.d_A, alpha, np.ascontiguousarray(pts), CUTOFF)
        evaluated += len(vals)
        return idx, sign * vals

    if config.grid_exhaustive:
        axis = np.arange(R)
        best_idx, best_val = None, math.inf
        for i in axis:
            jj, kk = np.meshgrid(axis, axis, indexing="ij")
            idx = np.stack([np.full(jj.size, i), jj.ravel(), kk.ravel()], axis=1)
            idx, vals = evaluate(idx)
            if len(vals) and vals.min() < best_val:
                best_val = float(vals.min())
                best_idx = idx[int(np.argmin(vals))]
    else:
        stride = max(1, (R - 1) // 10)
        axis = np.arange(0, R, stride)
        if axis[-1] != R - 1:
            axis = np.append(axis, R - 1)
        g = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
        idx, vals = evaluate(g)
        while True:
            order = np.argsort(vals)[:4]
            cands = idx[order]
            best_idx, best_val = idx[order[0]], float(vals[order[0]])
            if stride == 1:
                break
            new_stride = max(1, stride // 4)
            offs = np.arange(-stride, stride + 1, new_stride)
            o = np.stack(np.meshgrid(offs, offs, offs, indexing="ij"), axis=-1).reshape(-1, 3)
            pts = (cands[:, None, :] + o[None, :, :]).reshape(-1, 3)
            pts = pts[np.all((pts >= 0) & (pts < R), axis=1)]
            pts = np.unique(pts, axis=0)
            idx, vals = evaluate(pts)
            stride = new_stride
    r = coords[best_idx]
    eta = 0.5 * np.array([[1 + r[2], r[0] - 1j * r[1]], [r[0] + 1j * r[1], 1 - r[2]]])
    value = _value_from_q(sign * best_val, alpha)
    return EntropyResult(value, eta, "grid-oracle", int(evaluated), 2.0 / (R - 1), False,
                         {"bloch_vector": r.tolist(), "spacing": 2.0 / (R - 1)})


_SOLVERS = {
    "fixed-point": solve_fixed_point,
    "gradient": solve_gradient,
    "direct-search": solve_direct_search,
    "grid-oracle": solve_grid_oracle,
}


def conditional_entropy_up(rho: BipartiteState, order, config: SolverConfig = DEFAULT_CONFIG) -> EntropyResult:
    """Sandwiched Rényi conditional entropy ``H~_alpha^up(A|B)`` in bits.

    Runs every solver in ``config.solvers`` (plus the gradient solver and then
    direct search as fallbacks while none is stationary) and returns the
    largest value found.  The result
    is ``converged`` when some solver's stationarity residual is below
    ``config.stationarity_tol`` or two solvers agree within
    ``config.agreement_tol``.

    Raises
    ------
    SolverError
        if no solver converged; carries the best value and its residual.
    """
    order = as_order(order)
    if order.is_infinite:
        return hmin(rho)
    alpha = order.value
    names = list(config.solvers)
    for name in names:
        if name not in _SOLVERS:
            raise ValidationError(f"unknown solver {name!r}; choose from {sorted(_SOLVERS)}")
    results = [_SOLVERS[name](rho, alpha, config) for name in names]
    if config.fallback and not any(r.converged for r in results) and "gradient" not in names:
        warm = [r.optimizer for r in results if r.optimizer is not None and r.optimizer.shape == (rho.d_B, rho.d_B)]
        results.append(solve_gradient(rho, alpha, config, starts=warm))
    if config.fallback and not any(r.converged for r in results) and "direct-search" not in names:
        results.append(solve_direct_search(rho, alpha, config))
    best = max(results, key=lambda r: r.value)
    agree = any(abs(a.value - b.value) <= config.agreement_tol
                for i, a in enumerate(results) for b in results[i + 1:])
    converged = any(r.converged for r in results) or agree
    best.details = dict(best.details)
    best.details["solver_values"] = {r.solver: r.value for r in results}
    if not converged:
        raise SolverError(f"no solver converged for alpha={alpha}", value=best.value,
                          residual=best.residual, iterations=best.iterations, sidedness="lower")
    best.converged = True
    return best


def conditional_entropy(rho: BipartiteState, order, config: SolverConfig = DEFAULT_CONFIG) -> EntropyResult:
    """Dispatch on the order: ``inf`` goes to the min-entropy SDP."""
    order = as_order(order)
    if order.is_infinite:
        return hmin(rho)
    return conditional_entropy_up(rho, order, config)


# -- min- and max-entropy ----------------------------------------------------------

def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) basis of d x d Hermitian matrices."""
    out = []
    for i in range(d):
        m = np.zeros((d, d), dtype=np.complex128)
        m[i, i] = 1.0
        out.append(m)
    s = 1.0 / math.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=np.complex128)
            m[i, j] = m[j, i] = s
            out.append(m)
            m = np.zeros((d, d), dtype=np.complex128)
            m[i, j] = -1j * s
            m[j, i] = 1j * s
            out.append(m)
    return np.array(out)


HMIN_FEASIBILITY_TOL = 1e-8


def hmin(rho: BipartiteState, mu0: float = 1.0, shrink: float = 0.2, mu_min: float = 1e-10) -> EntropyResult:
    """Conditional min-entropy from ``min tr X s.t. I_A (x) X >= rho``.

    Solved with a log-det barrier and Newton steps on the ``d_B**2`` real
    coordinates of ``X``.  Every iterate is strictly feasible, so ``tr X`` is an
    upper bound on the optimum and the reported value a lower bound on
    ``H_min``; ``details["gap_bound"]`` bounds the barrier suboptimality.
    """
    d_a, d_b = rho.dims
    basis = hermitian_basis(d_b)
    x, steps, stat = _kernels.hmin_barrier(rho.matrix, d_a, d_b, basis, mu0, shrink, mu_min, 1e-12, 60)
    feas = float(np.linalg.eigvalsh(_kernels.lift_b(x, d_a) - rho.matrix)[0])
    tr = float(np.trace(x).real)
    nu = d_a * d_b + d_b
    mu_final = mu0
    while mu_final >= mu_min:
        mu_final *= shrink
    details = {"feasibility": feas, "newton_decrement": float(stat), "gap_bound": nu * mu_final / shrink,
               "trace": tr}
    value = -math.log2(tr)
    ok = feas >= -HMIN_FEASIBILITY_TOL and math.isfinite(value)
    result = EntropyResult(value, x / tr, "sdp", int(steps), max(0.0, -feas), ok, details)
    if not ok:
        raise SolverError("min-entropy barrier did not return a feasible point", value=value,
                          residual=max(0.0, -feas), iterations=int(steps), sidedness="lower")
    return result


def hmax(rho: BipartiteState, config: SolverConfig = DEFAULT_CONFIG) -> EntropyResult:
    return conditional_entropy_up(rho, RenyiOrder(0.5), config)


def hmax_fidelity_form(rho: BipartiteState, restarts: int = 5, seed: int = 0) -> float:
    """``max_sigma 2 log2 F(rho, I_A (x) sigma_B)`` by direct search over sigma.

    With ``sigma = L L^+ / tr(L L^+)`` the root fidelity is the trace norm of
    ``sqrt(rho) (I (x) L)`` divided by the Frobenius norm of ``L``, so no
    matrix square root of ``sigma`` is needed.
    """
    d = rho.d_B
    eye_a = np.eye(rho.d_A)
    if d == 1:
        return 2.0 * math.log2(ops.fidelity(rho.matrix, np.kron(eye_a, np.ones((1, 1)))))
    root = ops.matrix_power(rho.matrix, 0.5)
    il = np.tril_indices(d, -1)
    k = len(il[0])

    def objective(x):
        L = np.zeros((d, d), dtype=np.complex128)
        L[np.diag_indices(d)] = x[:d]
        L[il] = x[d:d + k] + 1j * x[d + k:]
        nrm = np.linalg.norm(L)
        if nrm == 0.0:
            return 0.0
        return -np.sum(np.linalg.svd(root @ np.kron(eye_a, L), compute_uv=False)) / nrm

    rng = make_rng(seed)
    rho_b = rho.marginal_B()
    starts = [_params_from_eta(rho_b / np.trace(rho_b).real)]
    while len(starts) < restarts:
        starts.append(rng.standard_normal(d * d))
    opts = {"xatol": 1e-10, "fatol": 1e-15, "maxiter": 4000 * d * d, "maxfev": 4000 * d * d, "adaptive": d * d > 4}
    best = min((minimize(objective, x0, method="Nelder-Mead", options=opts) for x0 in starts), key=lambda r: r.fun)
    for _ in range(2):
        r = minimize(objective, best.x, method="Nelder-Mead", options=opts)
        if r.fun <= best.fun:
            best = r
    return 2.0 * math.log2(-best.fun)


# -- duality ------------------------------------------------------------------------

def complementary_state(rho: BipartiteState) -> BipartiteState:
    """``rho_AC`` of the spectral purification ``rho_ABC`` of ``rho_AB``."""
    pur = ops.purify(rho.matrix)
    d_a, d_b, d_c = rho.d_A, rho.d_B, pur.d_C
    psi = pur.vector.reshape(d_a, d_b, d_c)
    # rho_AC[(a,c),(a',c')] = sum_b psi[a,b,c] conj(psi[a',b,c'])
    rho_ac = np.einsum("abc,ebd->aced", psi, psi.conj()).reshape(d_a * d_c, d_a * d_c)
    rho_ac = rho_ac / np.trace(rho_ac).real
    return BipartiteState(0.5 * (rho_ac + rho_ac.conj().T), d_a, d_c)


def duality_values(rho: BipartiteState, order, config: SolverConfig = DEFAULT_CONFIG):
    """``(H_alpha(A|B)_rho, H_beta(A|C)_rho)`` for the purification ``rho_ABC``."""
    order = as_order(order)
    beta = dual_order(order)
    h_ab = conditional_entropy(rho, order, config)
    h_ac = conditional_entropy(complementary_state(rho), beta, config)
    return h_ab, h_ac


def duality_residual(rho: BipartiteState, order, config: SolverConfig = DEFAULT_CONFIG) -> float:
    """``|H_alpha(A|B) + H_beta(A|C)|``, zero by the duality relation."""
    h_ab, h_ac = duality_values(rho, order, config)
    return abs(h_ab.value + h_ac.value)

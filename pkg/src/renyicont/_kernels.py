"""Hot numeric kernels.

Every kernel is written in the numpy subset numba understands.  When numba is
importable and ``RENYICONT_DISABLE_NUMBA`` is unset (or ``0``), the kernels are
compiled with ``numba.njit``; otherwise the very same functions run as plain
numpy.  The uncompiled function of a jitted kernel stays reachable through
``pure(kernel)``, which the benchmark and the parity tests use.

Composite index convention: ``i = a * d_B + b`` (A slow, B fast).
"""

from __future__ import annotations

import os

import numpy as np


def _numba_requested() -> bool:
    flag = os.environ.get("RENYICONT_DISABLE_NUMBA", "0").strip().lower()
    return flag in ("", "0", "false", "no", "off")


try:
    if not _numba_requested():
        raise ImportError("numba disabled by RENYICONT_DISABLE_NUMBA")
    import numba

    USE_NUMBA = True
except ImportError:
    numba = None
    USE_NUMBA = False


def jit(fn):
    if USE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn


def pure(kernel):
    """Return the uncompiled Python function behind ``kernel``."""
    return getattr(kernel, "py_func", kernel)


BACKEND = "numba" if USE_NUMBA else "numpy"


@jit
def herm_power(h, exponent, cutoff):
    """``h ** exponent`` on the support of ``h``.

    Eigenvalues at or below ``cutoff * max(lambda_max, 1)`` are mapped to zero.
    """
    w, u = np.linalg.eigh(h)
    thresh = cutoff * max(w[-1], 1.0)
    f = np.zeros(w.shape[0], dtype=np.complex128)
    for i in range(w.shape[0]):
        if w[i] > thresh:
            f[i] = w[i] ** exponent
    return (u * f) @ u.conj().T


@jit
def floored_power(h, exponent, floor):
    w, u = np.linalg.eigh(h)
    lo = floor * max(w[-1], 1e-300)
    f = np.empty(w.shape[0], dtype=np.complex128)
    for i in range(w.shape[0]):
        f[i] = max(w[i], lo) ** exponent
    return (u * f) @ u.conj().T


@jit
def ptrace_a(x, d_a, d_b):
    """Trace out the slow (A) factor."""
    out = np.zeros((d_b, d_b), dtype=np.complex128)
    for a in range(d_a):
        o = a * d_b
        for i in range(d_b):
            for j in range(d_b):
                out[i, j] += x[o + i, o + j]
    return out


@jit
def ptrace_b(x, d_a, d_b):
    """Trace out the fast (B) factor."""
    out = np.zeros((d_a, d_a), dtype=np.complex128)
    for a in range(d_a):
        for c in range(d_a):
            acc = 0.0j
            for b in range(d_b):
                acc += x[a * d_b + b, c * d_b + b]
            out[a, c] = acc
    return out


@jit
def lift_b(e, d_a):
    """``I_A (x) e``."""
    d_b = e.shape[0]
    out = np.zeros((d_a * d_b, d_a * d_b), dtype=np.complex128)
    for a in range(d_a):
        o = a * d_b
        out[o:o + d_b, o:o + d_b] = e
    return out


@jit
def trace_norm_half(x):
    w = np.linalg.eigvalsh(x)
    return 0.5 * np.sum(np.abs(w))


@jit
def trace_of_power(x, alpha, cutoff):
    w = np.linalg.eigvalsh(x)
    thresh = cutoff * max(w[-1], 1.0)
    acc = 0.0
    for i in range(w.shape[0]):
        if w[i] > thresh:
            acc += w[i] ** alpha
    return acc


@jit
def kernel_leak(p, q, cutoff):
    """Weight of ``p`` on the kernel of ``q``: ``tr(Pi_ker(q) p)``."""
    w, u = np.linalg.eigh(q)
    thresh = cutoff * max(w[-1], 1.0)
    acc = 0.0
    for i in range(w.shape[0]):
        if w[i] <= thresh:
            v = u[:, i]
            acc += (v.conj() @ p @ v).real
    return acc


@jit
def sandwich_q(p, q, alpha, cutoff):
    """``tr((q^g p q^g)^alpha)`` with ``g = (1 - alpha) / (2 alpha)``.

    Negative powers act on the support of ``q``.  Returns ``inf`` when
    ``alpha > 1`` and ``p`` leaks onto the kernel of ``q``.
    """
    if alpha > 1.0:
        if kernel_leak(p, q, cutoff) > cutoff * max(np.trace(p).real, 1.0) * 1e2:
            return np.inf
    g = (1.0 - alpha) / (2.0 * alpha)
    qg = herm_power(q, g, cutoff)
    x = qg @ p @ qg
    x = 0.5 * (x + x.conj().T)
    return trace_of_power(x, alpha, cutoff)


@jit
def sandwich_max(p, q, cutoff):
    """``lambda_max(q^{-1/2} p q^{-1/2})`` on supports; ``inf`` on kernel leak."""
    if kernel_leak(p, q, cutoff) > cutoff * max(np.trace(p).real, 1.0) * 1e2:
        return np.inf
    qh = herm_power(q, -0.5, cutoff)
    x = qh @ p @ qh
    x = 0.5 * (x + x.conj().T)
    return np.linalg.eigvalsh(x)[-1]


@jit
def conditional_q(rho, eta, d_a, alpha, cutoff):
    """``tr((eta^g rho eta^g)^alpha)`` with eta lifted to ``I_A (x) eta``."""
    d_b = eta.shape[0]
    if alpha > 1.0:
        lifted = lift_b(eta, d_a)
        if kernel_leak(rho, lifted, cutoff) > cutoff * 1e2:
            return np.inf
    g = (1.0 - alpha) / (2.0 * alpha)
    e = lift_b(herm_power(eta, g, cutoff), d_a)
    x = e @ rho @ e
    x = 0.5 * (x + x.conj().T)
    return trace_of_power(x, alpha, cutoff)


@jit
def _geometric_mean(w, u, t, theta):
    """Weighted geometric mean ``eta #_theta t`` given ``eta = u diag(w) u^+``."""
    sq = (u * np.sqrt(w).astype(np.complex128)) @ u.conj().T
    isq = (u * (1.0 / np.sqrt(w)).astype(np.complex128)) @ u.conj().T
    mid = isq @ t @ isq
    mid = 0.5 * (mid + mid.conj().T)
    mw, mu = np.linalg.eigh(mid)
    f = np.empty(mw.shape[0], dtype=np.complex128)
    for i in range(mw.shape[0]):
        f[i] = max(mw[i], 0.0) ** theta
    out = sq @ ((mu * f) @ mu.conj().T) @ sq
    return 0.5 * (out + out.conj().T)


@jit
def fixed_point(rho, eta0, d_a, alpha, theta0, tol, maxiter, floor):
    """Damped fixed-point iteration for the conditional optimum.

    Iterates ``eta <- eta #_theta normalize(tr_A[(eta^g rho eta^g)^alpha])``.
    The undamped map has the optimizer as fixed point; ``theta`` starts at
    ``theta0`` and is halved whenever the stationarity residual grows.

    Returns ``(eta, iterations, residual, last_step)`` where ``residual`` is
    the trace distance between ``eta`` and its normalized image.
    """
    d_b = eta0.shape[0]
    g = (1.0 - alpha) / (2.0 * alpha)
    eta = eta0.copy()
    theta = theta0
    prev_res = np.inf
    res = np.inf
    step = np.inf
    it = 0
    for it in range(1, maxiter + 1):
        w, u = np.linalg.eigh(eta)
        lo = floor * max(w[-1], 1e-300)
        for i in range(d_b):
            if w[i] < lo:
                w[i] = lo
        fg = np.empty(d_b, dtype=np.complex128)
        for i in range(d_b):
            fg[i] = w[i] ** g
        e = lift_b((u * fg) @ u.conj().T, d_a)
        x = e @ rho @ e
        x = 0.5 * (x + x.conj().T)
        xw, xu = np.linalg.eigh(x)
        fx = np.empty(xw.shape[0], dtype=np.complex128)
        for i in range(xw.shape[0]):
            fx[i] = max(xw[i], 0.0) ** alpha
        t = ptrace_a((xu * fx) @ xu.conj().T, d_a, d_b)
        t = 0.5 * (t + t.conj().T)
        t = t / np.trace(t).real
        res = trace_norm_half(eta - t)
        if res < tol:
            step = 0.0
            break
        if res > prev_res:
            theta = max(0.5 * theta, 1e-3)
        prev_res = res
        new = _geometric_mean(w, u, t, theta)
        new = new / np.trace(new).real
        step = trace_norm_half(new - eta)
        eta = new
        if step < tol:
            break
    return eta, it, res, step


@jit
def bloch_grid_q(rho, d_a, alpha, points, cutoff):
    """Evaluate the conditional trace functional on qubit-B Bloch vectors.

    ``points`` has shape ``(n, 3)`` with every row in the closed unit ball.
    """
    n = points.shape[0]
    out = np.empty(n)
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
    sz = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
    for k in range(n):
        rx = points[k, 0]
        ry = points[k, 1]
        rz = points[k, 2]
        eta = 0.5 * (np.eye(2, dtype=np.complex128) + rx * sx + ry * sy + rz * sz)
        out[k] = conditional_q(rho, eta, d_a, alpha, cutoff)
    return out


@jit
def hmin_barrier(rho, d_a, d_b, basis, mu0, shrink, mu_min, newton_tol, max_newton):
    """Interior-point barrier for ``min tr X  s.t.  I_A (x) X >= rho, X >= 0``.

    Minimizes ``tr X / mu - log det(I (x) X - rho) - log det X`` over Hermitian
    ``X = sum_k x_k basis[k]`` by damped Newton steps, shrinking ``mu``
    geometrically.  Returns ``(X, newton_steps, stationarity)``.
    """
    m = basis.shape[0]
    n = d_a * d_b
    lam = np.linalg.eigvalsh(rho)[-1]
    x = np.zeros(m)
    start = 2.0 * max(lam, 1e-12)
    for k in range(m):
        x[k] = np.trace(basis[k]).real * start
    trb = np.empty(m)
    for k in range(m):
        trb[k] = np.trace(basis[k]).real
    lifted = np.empty((m, n, n), dtype=np.complex128)
    for k in range(m):
        lifted[k] = lift_b(basis[k], d_a)
    mu = mu0
    steps = 0
    stat = np.inf
    while True:
        tpar = 1.0 / mu
        for _ in range(max_newton):
            xm = np.zeros((d_b, d_b), dtype=np.complex128)
            for k in range(m):
                xm += x[k] * basis[k]
            s = lift_b(xm, d_a) - rho
            s_inv = np.linalg.inv(s)
            x_inv = np.linalg.inv(xm)
            grad = np.empty(m)
            ms = np.empty((m, n, n), dtype=np.complex128)
            mx = np.empty((m, d_b, d_b), dtype=np.complex128)
            for k in range(m):
                ms[k] = s_inv @ lifted[k]
                mx[k] = x_inv @ basis[k]
                grad[k] = tpar * trb[k] - np.trace(ms[k]).real - np.trace(mx[k]).real
            hess = np.empty((m, m))
            for k in range(m):
                for l in range(k, m):
                    v = np.sum(ms[k] * ms[l].T).real + np.sum(mx[k] * mx[l].T).real
                    hess[k, l] = v
                    hess[l, k] = v
            dx = -np.linalg.solve(hess, grad)
            dec = -(grad @ dx)
            steps += 1
            if dec < 0.0:
                dec = 0.0
            stat = np.sqrt(dec)
            if 0.5 * dec < newton_tol:
                break
            # backtracking with feasibility via Cholesky success
            f0 = tpar * (trb @ x) - _logdet_pd(s) - _logdet_pd(xm)
            step = 1.0
            while step > 1e-16:
                xt = x + step * dx
                xmt = np.zeros((d_b, d_b), dtype=np.complex128)
                for k in range(m):
                    xmt += xt[k] * basis[k]
                st = lift_b(xmt, d_a) - rho
                if _is_pd(st) and _is_pd(xmt):
                    ft = tpar * (trb @ xt) - _logdet_pd(st) - _logdet_pd(xmt)
                    if ft <= f0 - 0.25 * step * dec:
                        break
                step *= 0.5
            if step <= 1e-16:
                break
            x = x + step * dx
        if mu < mu_min:
            break
        mu *= shrink
    xm = np.zeros((d_b, d_b), dtype=np.complex128)
    for k in range(m):
        xm += x[k] * basis[k]
    return 0.5 * (xm + xm.conj().T), steps, stat


@jit
def _is_pd(a):
    w = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    return w[0] > 0.0


@jit
def _logdet_pd(a):
    w = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    return np.sum(np.log(w))


@jit
def conditional_q_grad(root_rho, eta, d_a, alpha, cutoff):
    """Trace functional and its Hermitian gradient with respect to ``eta``.

    Uses ``Q = tr[(R (I (x) eta^s) R)^alpha]`` with ``R = sqrt(rho)`` and
    ``s = (1 - alpha)/alpha``; the derivative of ``eta^s`` is taken through
    Daleckii-Krein divided differences.
    """
    d_b = eta.shape[0]
    s = (1.0 - alpha) / alpha
    w, u = np.linalg.eigh(eta)
    for i in range(d_b):
        if w[i] < 1e-300:
            w[i] = 1e-300
    fs = np.empty(d_b, dtype=np.complex128)
    for i in range(d_b):
        fs[i] = w[i] ** s
    y = lift_b((u * fs) @ u.conj().T, d_a)
    m = root_rho @ y @ root_rho
    m = 0.5 * (m + m.conj().T)
    mw, mu = np.linalg.eigh(m)
    thresh = cutoff * max(mw[-1], 1.0)
    q = 0.0
    fm = np.zeros(mw.shape[0], dtype=np.complex128)
    for i in range(mw.shape[0]):
        if mw[i] > thresh:
            q += mw[i] ** alpha
            fm[i] = alpha * mw[i] ** (alpha - 1.0)
    z = root_rho @ ((mu * fm) @ mu.conj().T) @ root_rho
    zb = ptrace_a(z, d_a, d_b)
    dd = np.empty((d_b, d_b), dtype=np.complex128)
    for i in range(d_b):
        for j in range(d_b):
            li = w[i]
            lj = w[j]
            if abs(li - lj) > 1e-9 * max(li, lj):
                dd[i, j] = (li ** s - lj ** s) / (li - lj)
            else:
                dd[i, j] = s * (0.5 * (li + lj)) ** (s - 1.0)
    g = u @ (dd * (u.conj().T @ zb @ u)) @ u.conj().T
    return q, 0.5 * (g + g.conj().T)


@jit
def eta_from_params(x, d):
    """Normalized ``L L^+`` from a real vector: diagonal, then real and imaginary strict-lower parts."""
    L = np.zeros((d, d), dtype=np.complex128)
    for i in range(d):
        L[i, i] = x[i]
    k = 0
    m = d * (d - 1) // 2
    for i in range(1, d):
        for j in range(i):
            L[i, j] = x[d + k] + 1j * x[d + m + k]
            k += 1
    e = L @ L.conj().T
    tr = np.trace(e).real
    if tr <= 0.0:
        return np.eye(d, dtype=np.complex128) / d
    return e / tr


@jit
def params_objective(x, rho, d_a, d, alpha, sign, cutoff):
    q = conditional_q(rho, eta_from_params(x, d), d_a, alpha, cutoff)
    if not np.isfinite(q):
        return 1e300
    return sign * q

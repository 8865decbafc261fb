"""Closed-form continuity bounds for conditional entropies (bits).

Every function is a pure scalar formula in the trace distance ``epsilon``,
the dimension ``d_A`` of the conditioned system and, where relevant, the
Rényi order.  Terms ``eps**alpha`` and ``eps * log eps`` take their continuous
extension 0 at ``eps = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .entropy import RenyiOrder, as_order, dual_order
from .errors import ValidationError


@dataclass(frozen=True)
class BoundInputs:
    epsilon: float
    d_A: int
    order: RenyiOrder | None = None

    def __post_init__(self):
        _check_eps(self.epsilon)
        _check_dim(self.d_A)


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not (0.0 <= eps <= 1.0):
        raise ValidationError(f"epsilon must lie in [0, 1], got {eps!r}")
    return eps


def _check_dim(d_A) -> int:
    if int(d_A) != d_A or int(d_A) < 1:
        raise ValidationError(f"d_A must be a positive integer, got {d_A!r}")
    return int(d_A)


def _low_order(order) -> float:
    order = as_order(order)
    if order.is_infinite or order.value >= 1.0:
        raise ValidationError(f"this bound needs alpha in [1/2, 1), got {order}")
    return order.value


def _high_order(order) -> RenyiOrder:
    order = as_order(order)
    if not order.is_infinite and order.value <= 1.0:
        raise ValidationError(f"this bound needs alpha in (1, inf], got {order}")
    return order


def _pow(x: float, p: float) -> float:
    return 0.0 if x == 0.0 else x ** p


def binary_entropy(x: float) -> float:
    """``h(x) = -x log2 x - (1-x) log2(1-x)`` with ``h(0) = h(1) = 0``."""
    x = float(x)
    if not (0.0 <= x <= 1.0):
        raise ValidationError(f"binary entropy needs x in [0, 1], got {x!r}")
    out = 0.0
    for p in (x, 1.0 - x):
        if p > 0.0:
            out -= p * math.log2(p)
    return out


def trivial_diameter(d_A: int) -> float:
    """Width ``2 log2 d_A`` of the range of any conditional entropy."""
    return 2.0 * math.log2(_check_dim(d_A))


def afw_von_neumann(eps: float, d_A: int) -> float:
    """Tight von Neumann bound ``2 eps log2 d_A + (1+eps) h(eps/(1+eps))``."""
    eps = _check_eps(eps)
    d_A = _check_dim(d_A)
    return 2.0 * eps * math.log2(d_A) + (1.0 + eps) * binary_entropy(eps / (1.0 + eps))


def afw_limit_expression(eps: float, d_A: int) -> float:
    """``2 eps log2 d_A + (1+eps) log2(1+eps) - eps log2 eps``; the alpha -> 1 limit of the low-order bound."""
    eps = _check_eps(eps)
    d_A = _check_dim(d_A)
    e_log_e = eps * math.log2(eps) if eps > 0.0 else 0.0
    return 2.0 * eps * math.log2(d_A) + (1.0 + eps) * math.log2(1.0 + eps) - e_log_e


def _low(eps: float, d_A: int, alpha: float, dim_power: float) -> float:
    # eps is not range-checked here so the high-order bound may pass sqrt(2 eps) > 1
    if eps == 0.0:
        return 0.0
    inner = 1.0 + _pow(eps, alpha) * d_A ** dim_power - eps / (1.0 + eps) ** (1.0 - alpha)
    return math.log2(1.0 + eps) + math.log2(inner) / (1.0 - alpha)


def bound_low(eps: float, d_A: int, order) -> float:
    """Continuity bound for ``alpha`` in ``[1/2, 1)``.

    ``log2(1+eps) + 1/(1-alpha) log2(1 + eps^alpha d_A^(2(1-alpha)) - eps/(1+eps)^(1-alpha))``
    """
    alpha = _low_order(order)
    return _low(_check_eps(eps), _check_dim(d_A), alpha, 2.0 * (1.0 - alpha))


def bound_low_classical(eps: float, d_A: int, order) -> float:
    """Bound for states classical on ``A``.

    ``log2(1+eps) + 1/(1-alpha) log2(1 + eps^alpha d_A^(1-alpha) - eps/(d_A (1+eps))^(1-alpha))``
    """
    alpha = _low_order(order)
    eps = _check_eps(eps)
    d_A = _check_dim(d_A)
    if eps == 0.0:
        return 0.0
    inner = 1.0 + _pow(eps, alpha) * d_A ** (1.0 - alpha) - eps / (d_A * (1.0 + eps)) ** (1.0 - alpha)
    return math.log2(1.0 + eps) + math.log2(inner) / (1.0 - alpha)


def cor1_radius(eps: float) -> float:
    """Purified distance budget ``sqrt(2 eps)``."""
    return math.sqrt(2.0 * _check_eps(eps))


def bound_high(eps: float, d_A: int, order) -> float:
    """Bound for ``alpha`` in ``(1, inf]``: the low-order bound at ``sqrt(2 eps)`` and the dual order.

    For ``eps > 1/2`` the radius exceeds 1; the formula is still evaluated.
    """
    order = _high_order(order)
    beta = dual_order(order).value
    return _low(cor1_radius(eps), _check_dim(d_A), beta, 2.0 * (1.0 - beta))


def bound_hmin(eps: float, d_A: int) -> float:
    """Min-entropy bound ``log2(1 + eps d_A^2)``."""
    eps = _check_eps(eps)
    d_A = _check_dim(d_A)
    return math.log2(1.0 + eps * d_A * d_A)


def bound_jabbour_datta(eps: float, d_A: int, order) -> float:
    """Classical comparison bound ``1/(1-alpha) log2((1-eps)^alpha + eps^alpha (d_A-1)^(1-alpha))``.

    Defined as 0 for ``d_A = 1``.  The formula is exact as written; it peaks at
    ``eps = 1 - 1/d_A`` (value ``log2 d_A``) and decreases afterwards, see
    :func:`bound_jabbour_datta_envelope`.
    """
    alpha = _low_order(order)
    eps = _check_eps(eps)
    d_A = _check_dim(d_A)
    if d_A == 1 or eps == 0.0:
        return 0.0
    inner = _pow(1.0 - eps, alpha) + _pow(eps, alpha) * (d_A - 1) ** (1.0 - alpha)
    return math.log2(inner) / (1.0 - alpha)


def bound_jabbour_datta_envelope(eps: float, d_A: int, order) -> float:
    """Nondecreasing version: the formula at ``min(eps, 1 - 1/d_A)``.

    Past the peak the envelope equals ``log2 d_A``, the range of a classical
    conditional entropy, so it remains a valid bound for every ``eps``.
    """
    d_A = _check_dim(d_A)
    return bound_jabbour_datta(min(_check_eps(eps), 1.0 - 1.0 / d_A), d_A, order)


def leditzky_gap(fidelity: float, order) -> float:
    """Lower bound ``2 alpha/(1-alpha) log2 F`` on ``H_alpha(rho) - H_beta(sigma)``; ``-inf`` at ``F = 0``."""
    alpha = _low_order(order)
    f = float(fidelity)
    if not (0.0 <= f <= 1.0 + 1e-12):
        raise ValidationError(f"fidelity must lie in [0, 1], got {f!r}")
    if f == 0.0:
        return -math.inf
    return 2.0 * alpha / (1.0 - alpha) * math.log2(min(f, 1.0))

"""Single-user water-filling best responses.

Given effective interference levels s[k] > 0, a total budget and per-channel
caps, the maximizer of  sum_k log(1 + p[k]/s[k])  subject to
sum_k p[k] <= p_max,  0 <= p[k] <= mask[k]  is

    p[k] = clamp(mu - s[k], 0, mask[k])

where the water level mu is chosen to spend the budget exactly, unless the
caps alone sum to at most the budget (then every channel saturates and the
budget constraint is slack).  The dual variable of the budget constraint is
lam = 1/mu.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    ChannelRealization,
    PowerConstraints,
    UncertaintySpec,
    effective_interference,
    normalized_interference,
)

# Bisection stops when the budget residual |sum(p) - p_max| falls below
# BUDGET_RTOL * p_max, or the water-level bracket is narrower than
# WIDTH_RTOL relative to its magnitude.
BUDGET_RTOL = 1e-10
WIDTH_RTOL = 1e-14
MAX_BISECT_ITER = 200


@dataclass(frozen=True)
class WaterfillSolution:
    """Optimal allocation with its water level and budget dual variable.

    ``water_level`` is +inf (and ``lam`` is 0) when the mask saturates every
    channel before the budget binds.
    """

    p: np.ndarray
    water_level: float
    lam: float
    budget_active: bool


def _allocation(mu: float, s: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.clip(mu - s, 0.0, mask)


def waterfill(s_eff: np.ndarray, p_max: float, mask) -> WaterfillSolution:
    """Water-fill a budget over channels with interference levels ``s_eff``.

    Parameters
    ----------
    s_eff : array of K strictly positive effective interference levels.
    p_max : total power budget, > 0.
    mask : per-channel caps, scalar or length-K array, strictly positive.
    """
    s = np.asarray(s_eff, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("s_eff must be a nonempty 1-d array")
    mask = np.broadcast_to(np.asarray(mask, dtype=float), s.shape).copy()
    p_max = float(p_max)
    if not np.all(np.isfinite(s)) or np.any(s <= 0):
        raise ValueError("s_eff entries must be finite and > 0")
    if not np.all(np.isfinite(mask)) or np.any(mask <= 0):
        raise ValueError("mask entries must be finite and > 0")
    if not np.isfinite(p_max) or p_max <= 0:
        raise ValueError("p_max must be finite and > 0")

    if mask.sum() <= p_max:
        # Every channel saturates; the budget never binds.
        return WaterfillSolution(p=mask.copy(), water_level=np.inf, lam=0.0,
                                 budget_active=False)

    lo = float(s.min())            # allocation 0 here
    hi = float((s + mask).max())   # full-mask allocation here, > p_max
    budget_tol = BUDGET_RTOL * p_max
    mu = hi
    for _ in range(MAX_BISECT_ITER):
        mu = 0.5 * (lo + hi)
        total = _allocation(mu, s, mask).sum()
        if abs(total - p_max) <= budget_tol:
            break
        if total > p_max:
            hi = mu
        else:
            lo = mu
        if hi - lo <= WIDTH_RTOL * hi:
            mu = 0.5 * (lo + hi)
            break

    p = _allocation(mu, s, mask)
    saturated = p >= mask
    interior = (p > 0.0) & ~saturated
    if interior.any():
        # Re-solve the water level exactly on the identified linear segment:
        # sum_interior (mu - s) + sum_saturated mask = p_max.
        mu_exact = (p_max - mask[saturated].sum() + s[interior].sum()) / interior.sum()
        p_exact = _allocation(mu_exact, s, mask)
        if abs(p_exact.sum() - p_max) <= budget_tol:
            mu, p = float(mu_exact), p_exact
    elif saturated.any():
        # Flat segment: every loaded channel is capped, so a whole interval
        # of water levels yields this allocation.  Take its lower end.
        mu_low = float((s + mask)[saturated].max())
        p_low = _allocation(mu_low, s, mask)
        if abs(p_low.sum() - p_max) <= budget_tol:
            mu, p = mu_low, p_low

    return WaterfillSolution(p=p, water_level=float(mu), lam=1.0 / float(mu),
                             budget_active=True)


def best_response(user: int, channel: ChannelRealization, profile: np.ndarray,
                  constraints: PowerConstraints,
                  uncertainty: UncertaintySpec) -> WaterfillSolution:
    """Water-filling against the interference the other users generate.

    ``profile`` is a full (M, K) power profile; the user's own row is ignored.
    The nominal interference is scaled by the user's uncertainty multipliers
    before water-filling.
    """
    s_bar = normalized_interference(channel, profile, user)
    s_eff = effective_interference(s_bar, uncertainty, user)
    return waterfill(s_eff, float(constraints.p_max[user]), constraints.mask[user])

"""Regular-variation weights of class S on (0, 1).

Two parametric families are supported::

    power      w(t) = s * t**a
    power-log  w(t) = s * t**a * (1 + c*log(1/t))**b

with a > -1 and a positive scale ``s``.  A weight on the polydisc is a
:class:`ProductWeight`, ``w(1-|z|) = prod_j w_j(1-|z_j|)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .report import VerificationReport

__all__ = [
    "WeightFactor",
    "ProductWeight",
    "eval_weight",
    "regularity_indices",
    "verify_class_S",
    "lemma2_ratio",
    "weight_from_config",
]


@dataclass(frozen=True)
class WeightFactor:
    """One factor w_j of a product weight."""

    a: float
    b: float = 0.0
    c: float = 1.0
    family: str = "power"
    scale: float = 1.0

    def __post_init__(self):
        if self.family not in ("power", "power-log"):
            raise ValueError(f"unknown weight family {self.family!r}")
        if not self.a > -1:
            raise ValueError(f"weight exponent a={self.a} violates a > -1 (beta_w < 1)")
        if self.family == "power-log" and not self.c > 0:
            raise ValueError("power-log weight needs c > 0")
        if not self.scale > 0:
            raise ValueError("weight scale must be positive")

    @classmethod
    def power(cls, a: float, scale: float = 1.0) -> "WeightFactor":
        return cls(a=float(a), family="power", scale=float(scale))

    @classmethod
    def power_log(cls, a: float, b: float, c: float = 1.0, scale: float = 1.0) -> "WeightFactor":
        return cls(a=float(a), b=float(b), c=float(c), family="power-log", scale=float(scale))

    @property
    def has_log(self) -> bool:
        return self.family == "power-log" and self.b != 0.0

    def __call__(self, t):
        return eval_weight(self, t)

    def log_factor(self, t):
        """The slowly varying part ``s*(1 + c log(1/t))**b`` (``s`` for power)."""
        t = np.asarray(t, dtype=float)
        if not self.has_log:
            return np.full_like(t, self.scale)
        return self.scale * (1.0 + self.c * np.log(1.0 / t)) ** self.b

    def to_dict(self) -> dict:
        d = {"family": self.family, "a": self.a}
        if self.family == "power-log":
            d.update(b=self.b, c=self.c)
        if self.scale != 1.0:
            d["scale"] = self.scale
        return d


@dataclass(frozen=True)
class ProductWeight:
    factors: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 1:
            raise ValueError("a product weight needs at least one factor")

    @classmethod
    def of(cls, *factors: WeightFactor) -> "ProductWeight":
        return cls(tuple(factors))

    @classmethod
    def power(cls, *exponents: float) -> "ProductWeight":
        return cls(tuple(WeightFactor.power(a) for a in exponents))

    @property
    def n(self) -> int:
        return len(self.factors)

    def __call__(self, z: Sequence) -> np.ndarray:
        """Evaluate ``w(1-|z|)`` at a point (sequence of n complex arrays)."""
        out = 1.0
        for wj, zj in zip(self.factors, z):
            out = out * eval_weight(wj, 1.0 - np.abs(zj))
        return out

    def to_list(self) -> list:
        return [w.to_dict() for w in self.factors]


def weight_from_config(obj) -> ProductWeight:
    """Build a ProductWeight from ``{"family": ..., "a": ...}`` or a list of those."""
    if isinstance(obj, ProductWeight):
        return obj
    if isinstance(obj, WeightFactor):
        return ProductWeight.of(obj)
    if isinstance(obj, dict):
        obj = [obj]
    factors = []
    for d in obj:
        family = d.get("family", "power")
        if family == "power":
            factors.append(WeightFactor.power(d["a"], d.get("scale", 1.0)))
        elif family == "power-log":
            factors.append(
                WeightFactor.power_log(d["a"], d.get("b", 0.0), d.get("c", 1.0), d.get("scale", 1.0))
            )
        else:
            raise ValueError(f"unknown weight family {family!r}")
    return ProductWeight(tuple(factors))


def eval_weight(w: WeightFactor, t):
    """Return w(t) for t in (0, 1]."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(~((t_arr > 0) & (t_arr <= 1))):
        raise ValueError("weight argument must lie in (0, 1]")
    val = t_arr ** w.a * w.log_factor(t_arr)
    return float(val) if np.ndim(t) == 0 else val


def regularity_indices(w: WeightFactor) -> tuple[float, float]:
    """Closed-form indices (alpha_w, beta_w); log factors do not change them."""
    if not w.a > -1:
        raise ValueError("beta_w >= 1: weight exponent must exceed -1")
    return float(w.a), float(max(-w.a, 0.0))


def verify_class_S(w: WeightFactor, q: float = 0.5, grid_size: int = 200,
                   r_range: tuple[float, float] = (1e-12, 1e-2)) -> VerificationReport:
    """Empirical sweep of ``w(lam*r)/w(r)`` for r geometric in ``r_range``, lam in [q, 1].

    The default range probes the t -> 0 regime, where the indices live; for
    power weights the result does not depend on it.
    """
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    lo, hi = r_range
    r = np.geomspace(lo, hi, grid_size)
    lam = np.linspace(q, 1.0, grid_size)
    ratio = eval_weight(w, np.outer(lam, r)) / eval_weight(w, r)[None, :]
    rmin, rmax = float(ratio.min()), float(ratio.max())
    log_q_inv = math.log(1.0 / q)
    alpha_est = -math.log(rmin) / log_q_inv
    beta_est = math.log(rmax) / log_q_inv
    ok = bool(np.isfinite(rmin) and np.isfinite(rmax) and rmin > 0 and beta_est < 1)
    rep = VerificationReport(target="S", mode="sufficiency")
    rep.metrics.update(min_ratio=rmin, max_ratio=rmax, alpha_est=alpha_est,
                       beta_est=beta_est, q=q, grid_size=grid_size)
    rep.verdict = "pass" if ok else "fail"
    return rep


def lemma2_ratio(w: WeightFactor, a: float, b: float, z_moduli, quad=None,
                 growth_from: float = 0.9) -> VerificationReport:
    """Profile of R(|z|) = I(z) (1-|z|^2)^(b-a-2) / w(1-|z|^2) with
    I(z) = int_U (1-|zeta|^2)^a w(1-|zeta|^2) |1 - z conj(zeta)|^(-b) dm_2.

    When the hypotheses a+1-beta > 0, b > 1, b-a-2 > alpha hold the profile
    must stay bounded; when b-a-2 <= alpha it must grow beyond ``growth_from``.
    """
    from .quadrature import QuadratureError, QuadratureScheme, integrate_kernel

    alpha_w, beta_w = regularity_indices(w)
    hyp = {
        "a+1-beta>0": a + 1 - beta_w > 0,
        "b>1": b > 1,
        "b-a-2>alpha": b - a - 2 > alpha_w,
    }
    if quad is None:
        quad = QuadratureScheme.default(1)
    rep = VerificationReport(target="L2", mode="sufficiency" if all(hyp.values()) else "necessity")
    rep.metrics["hypotheses"] = hyp

    # (1-|zeta|^2)^(a + w.a) is absorbed by the radial rule; the log part is sampled.
    def extra(zeta):
        return w.log_factor(1.0 - np.abs(zeta[0]) ** 2)

    moduli = [float(x) for x in z_moduli]
    profile = []
    try:
        for x in moduli:
            val, err = integrate_kernel(quad, a + w.a, b, [x], extra)
            u = 1.0 - x * x
            scale = u ** (b - a - 2) / eval_weight(w, u)
            R = val.real * scale
            profile.append(R)
            rep.add_row(point=x, metric="R", value=R, est_error=err * scale)
    except QuadratureError as exc:
        rep.verdict = "nonconvergence"
        rep.metrics["error"] = str(exc)
        return rep

    prof = np.array(profile)
    rep.metrics["sup"] = float(prof.max()) if len(prof) else 0.0
    rep.metrics["profile"] = [float(v) for v in prof]
    mod = np.array(moduli)
    tail = prof[mod >= growth_from]
    if len(tail):
        rep.metrics["tail_spread"] = float(tail.max() / tail.min())
    if all(hyp.values()):
        # bounded up to a constant factor, measured from the first modulus >= 0.5
        ref = prof[mod >= 0.5][0] if np.any(mod >= 0.5) else prof[0]
        rep.metrics["bound_ratio"] = float(prof[mod >= 0.5].max() / ref) if np.any(mod >= 0.5) else 1.0
        ok = bool(np.all(np.isfinite(prof))) and rep.metrics["bound_ratio"] <= 4.0
    else:
        ok = len(tail) >= 2 and bool(np.all(np.diff(tail) > 0))
    rep.verdict = "pass" if ok else "fail"
    return rep

"""Weighted norms on U^n and the pointwise reproducing estimate."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .holocalc import D, PolySeries, polar_values
from .quadrature import (AngularRule, DiscRule, QuadratureError, QuadratureScheme, RadialRule,
                         integrate_kernel, tensor_sum)
from .report import VerificationReport
from .weights import ProductWeight, WeightFactor, regularity_indices, weight_from_config

__all__ = [
    "MeasureConditionError",
    "SpaceParams",
    "lp_norm",
    "lp_norm_with_error",
    "besov_norm",
    "besov_norm_with_error",
    "lp_norm_of_samples",
    "lemma1_ratio",
    "radial_weight_rule",
]


class MeasureConditionError(ValueError):
    """The radial weight of the requested norm is not integrable."""


@dataclass
class SpaceParams:
    p: float
    weight: ProductWeight
    scheme: QuadratureScheme | None = None
    rtol: float = 1e-8
    panel_nodes: int | None = None

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError("p must be positive")
        self.weight = weight_from_config(self.weight)
        if self.scheme is None:
            self.scheme = QuadratureScheme.default(self.weight.n)
        if self.panel_nodes is None:
            # tensor grids grow with the n-th power of the node count
            self.panel_nodes = 10 if self.weight.n == 1 else 6

    @property
    def n(self) -> int:
        return self.weight.n


def _exponent(wj: WeightFactor, shift: float, what: str) -> float:
    """Exponent e of (1-rho^2)^e carried by w(1-rho) (1-rho^2)^shift."""
    e = wj.a + shift
    if not e > -1:
        alpha_w, _ = regularity_indices(wj)
        raise MeasureConditionError(
            f"{what}: w(1-|z|)(1-|z|^2)^{shift:g} is not integrable for alpha_w={alpha_w:g} "
            f"(needs alpha_w > {-1 - shift:g})")
    return e


def _smooth_part(wj: WeightFactor, rho):
    """w(1-rho) / (1-rho^2)^a_j: the factor left after absorbing the power."""
    t = 1.0 - rho
    return (1.0 + rho) ** (-wj.a) * wj.log_factor(np.clip(t, 1e-300, None))


def radial_weight_rule(wj: WeightFactor, shift: float, t_min: float, q: int,
                       what: str = "norm") -> RadialRule:
    """Radial rule for int_0^1 h(rho) w(1-rho)(1-rho^2)^shift rho d rho."""
    e = _exponent(wj, shift, what)
    rule = RadialRule.graded(e, t_min=t_min, q=q)
    return RadialRule(rule.nodes, rule.weights * _smooth_part(wj, rule.nodes), e)


def _pow2(x: int) -> int:
    return 1 << max(int(x) - 1, 1).bit_length()


def _grid_integral(vals_p: np.ndarray, rules, ms) -> float:
    """Sum of |.|^p samples on a polar grid of shape (R.., M..) against rule weights."""
    n = len(rules)
    out = vals_p
    # angular means (trapezoid weights 2 pi / M) then radial weights, fixed order
    for j in range(n):
        out = out.mean(axis=-1) * 2 * np.pi
    for j in reversed(range(n)):
        out = np.sum(out * rules[j].weights, axis=-1)
    return float(out)


def _series_power_integral(f: PolySeries, sp: SpaceParams, shift: float, level: int,
                           what: str) -> float:
    n = f.dim
    N = f.degree_bound
    q = sp.panel_nodes + 4 * level
    rules = [radial_weight_rule(wj, shift, 1.0 / (8.0 * (N[j] + 1)), q, what)
             for j, wj in enumerate(sp.weight.factors)]
    base = sp.scheme.angular_nodes if n == 1 else max(16, sp.scheme.angular_nodes // 4)
    ms = [_pow2(max(base, 2 * (N[j] + 1))) * 2 ** level for j in range(n)]
    if n == 1:
        vals = polar_values(f, [r.nodes for r in rules], ms)
        return _grid_integral(np.abs(vals) ** sp.p, rules, ms)
    # one first-axis radius at a time keeps the n > 1 grid in memory
    rest = [r.nodes for r in rules[1:]]
    parts = []
    for i in range(len(rules[0].nodes)):
        r0 = RadialRule(rules[0].nodes[i:i + 1], rules[0].weights[i:i + 1], rules[0].a)
        vals = polar_values(f, [r0.nodes] + rest, ms)
        parts.append(_grid_integral(np.abs(vals) ** sp.p, [r0] + rules[1:], ms))
    return float(np.sum(np.array(parts)))


def _refined(compute, sp: SpaceParams):
    prev = compute(0)
    cur, err = prev, np.inf
    for level in range(1, sp.scheme.max_refinement + 1):
        cur = compute(level)
        err = abs(cur - prev)
        if err <= sp.rtol * abs(cur) or cur == 0:
            break
        prev = cur
    if cur != 0 and err > 1e-3 * abs(cur):
        raise QuadratureError(f"norm integral not converged: rel err {err / abs(cur):.2e}", cur, err)
    return cur, err


def besov_norm_with_error(f: PolySeries, sp: SpaceParams):
    """(||f||_{B_p(w)}, est_error); conjugated inputs use the mirrored series."""
    if f.dim != sp.n:
        raise ValueError("series dimension does not match the weight")
    if f.conjugated:
        f = f.mirrored()
    for wj in sp.weight.factors:
        _exponent(wj, sp.p - 2, "B_p(w) norm")
    if f.is_zero():
        return 0.0, 0.0
    if f.factors is not None and sp.n > 1:
        vals = []
        for fj, wj in zip(f.factors, sp.weight.factors):
            sub = SpaceParams(sp.p, ProductWeight.of(wj), QuadratureScheme.default(1),
                              sp.rtol, sp.panel_nodes)
            vals.append(besov_norm_with_error(fj, sub))
        val = math.prod(v for v, _ in vals)
        rel = sum(e / v for v, e in vals if v > 0)
        return val, rel * val
    Df = D(f)
    integral, err = _refined(lambda lv: _series_power_integral(Df, sp, sp.p - 2, lv, "B_p(w) norm"), sp)
    val = integral ** (1.0 / sp.p)
    return val, val * err / integral / sp.p


def besov_norm(f: PolySeries, sp: SpaceParams) -> float:
    """[int |Df|^p w(1-|z|)(1-|z|^2)^(p-2) dm]^(1/p)."""
    return besov_norm_with_error(f, sp)[0]


def lp_norm_with_error(f, sp: SpaceParams, t_min: float = 1e-3):
    """(||f||_{L_p(w)}, est_error) for a callable f on U^n.

    The radial rule lives in t = 1 - rho, so integrands smooth in rho (not
    only in rho^2) converge geometrically.
    """
    for wj in sp.weight.factors:
        _exponent(wj, -2.0, "L_p(w) norm")
    if isinstance(f, PolySeries) and f.is_zero():
        return 0.0, 0.0
    facs = getattr(f, "factors", None)
    if facs is not None and sp.n > 1:
        vals = []
        for fj, wj in zip(facs, sp.weight.factors):
            sub = SpaceParams(sp.p, ProductWeight.of(wj), QuadratureScheme.default(1),
                              sp.rtol, sp.panel_nodes)
            vals.append(lp_norm_with_error(lambda z, g=fj: g(z[0]), sub, t_min))
        val = math.prod(v for v, _ in vals)
        rel = sum(e / v for v, e in vals if v > 0)
        return val, rel * val

    def integrand(z):
        return np.abs(np.asarray(f(z))) ** sp.p

    def level(lv):
        q = sp.panel_nodes + 4 * lv
        m = (sp.scheme.angular_nodes if sp.n == 1 else sp.scheme.angular_nodes // 2) * 2 ** lv
        rules = [DiscRule(radial_weight_rule(wj, -2.0, t_min, q, "L_p(w) norm"),
                          AngularRule.periodic(m)) for wj in sp.weight.factors]
        return tensor_sum(rules, integrand).real

    val, err = _refined(level, sp)
    if val <= 0:
        return 0.0, float(err)
    norm = val ** (1.0 / sp.p)
    return norm, norm * err / val / sp.p


def lp_norm(f, sp: SpaceParams) -> float:
    """[int |f|^p w(1-|z|)(1-|z|^2)^(-2) dm]^(1/p); needs alpha_w > 1 per factor."""
    return lp_norm_with_error(f, sp)[0]


def lp_norm_of_samples(values: np.ndarray, rule: RadialRule, p: float) -> float:
    """L_p(w) norm (n = 1) of samples on rule.nodes x uniform angles; rule from radial_weight_rule."""
    integral = float(np.sum(rule.weights * (np.abs(values) ** p).mean(axis=-1) * 2 * np.pi))
    return integral ** (1.0 / p)


def lemma1_ratio(f: PolySeries, m, z_samples, sp: SpaceParams) -> VerificationReport:
    """|f(z)| / int (1-|zeta|^2)^m |1 - conj(zeta) z|^-(m+1) |Df(zeta)| dm over the samples."""
    n = f.dim
    m = [float(x) for x in np.atleast_1d(m)]
    if len(m) != n:
        raise ValueError("m needs one entry per variable")
    hyp = all(mj >= regularity_indices(wj)[0] - 1 for mj, wj in zip(m, sp.weight.factors))
    rep = VerificationReport(target="L1", mode="sufficiency" if hyp else "necessity")
    rep.metrics["hypothesis m_j >= alpha_w - 1"] = hyp
    if f.is_zero():
        rep.metrics["skipped"] = "zero function"
        rep.verdict = "pass"
        return rep
    Df = D(f)
    absDf = _abs_of(Df)
    ratios = []
    for z in z_samples:
        z = [complex(x) for x in np.atleast_1d(z)]
        # |Df| has kinks at zeros of Df; the refinement difference is reported, not enforced
        den, err = integrate_kernel(sp.scheme, m, [mj + 1 for mj in m], z, absDf, strict=False)
        num = abs(f(z if n > 1 else z[0]))
        ratio = num / den.real
        ratios.append(ratio)
        rep.add_row(point=tuple(abs(x) for x in z) if n > 1 else abs(z[0]),
                    metric="ratio", value=ratio, est_error=ratio * err / abs(den))
    ratios = np.array(ratios)
    rep.metrics["sup"] = float(ratios.max())
    rep.verdict = "pass" if bool(np.all(np.isfinite(ratios))) else "fail"
    return rep


def _abs_of(f: PolySeries):
    if f.factors is not None:
        from .quadrature import Separable
        return Separable([(lambda zj, g=g: np.abs(g(zj))) for g in f.factors])
    return lambda z: np.abs(f(list(z)))

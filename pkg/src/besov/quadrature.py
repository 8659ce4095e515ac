"""Cubature against area measure on products of unit discs.

Radial rules integrate ``h(rho) (1-rho^2)^a rho d rho`` over [0, 1] with the
boundary factor absorbed into Jacobi weights; angular rules integrate over
[-pi, pi).  A :class:`DiscRule` is their tensor product and realizes
``(1-|z|^2)^a dm_2(z)`` on one factor disc.

Integrands are callables taking a sequence ``z`` of n complex arrays (one per
factor, mutually broadcastable) and returning an array of the broadcast
shape.  An integrand that carries a ``factors`` attribute (a sequence of n
one-variable callables) is treated as a product and integrated factor by
factor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

__all__ = [
    "QuadratureError",
    "RadialRule",
    "AngularRule",
    "DiscRule",
    "QuadratureScheme",
    "Separable",
    "integrate",
    "integrate_kernel",
    "kernel_rule",
    "mc_integrate",
]

_CHUNK = 1 << 22


class QuadratureError(RuntimeError):
    """Nested rule levels disagree by more than the requested tolerance."""

    def __init__(self, msg, value=None, est_error=None):
        super().__init__(msg)
        self.value = value
        self.est_error = est_error


@lru_cache(maxsize=256)
def _legendre(q):
    x, w = roots_legendre(q)
    return x, w


@lru_cache(maxsize=256)
def _jacobi(q, a):
    # weight (1+x)^a on [-1, 1]
    x, w = roots_jacobi(q, 0.0, a)
    return x, w


@dataclass(frozen=True)
class RadialRule:
    """Nodes/weights with sum(w*h(rho)) ~ int_0^1 h(rho) (1-rho^2)^a rho d rho."""

    nodes: np.ndarray
    weights: np.ndarray
    a: float = 0.0

    def __len__(self):
        return len(self.nodes)

    @classmethod
    def gauss_jacobi(cls, n: int, a: float = 0.0) -> "RadialRule":
        """Gauss-Jacobi in s = rho^2; exact for polynomials in s of degree < 2n."""
        if not a > -1:
            raise ValueError("radial exponent must exceed -1")
        x, w = _jacobi(int(n), float(a)) if a != 0 else _legendre(int(n))
        # s = (1-x)/2 so that (1-s) = (1+x)/2
        s = (1.0 - x) / 2.0
        ws = w * 2.0 ** (-a - 1.0)
        return cls(np.sqrt(s)[::-1].copy(), (0.5 * ws)[::-1].copy(), float(a))

    @classmethod
    def graded(cls, a: float = 0.0, t_min: float = 1e-3, q: int = 12,
               ratio: float = 0.5) -> "RadialRule":
        """Composite Gauss rule in t = 1 - rho, geometrically graded toward t = 0.

        Panels [t_{i+1}, t_i] with t_0 = 1 shrink by ``ratio`` until t < t_min;
        the last panel [0, t_last] carries the Jacobi factor t^a exactly.
        """
        if not a > -1:
            raise ValueError("radial exponent must exceed -1")
        t_min = min(max(float(t_min), 1e-300), 0.5)
        edges = [1.0]
        while edges[-1] > t_min:
            edges.append(edges[-1] * ratio)
        xs, ws = [], []
        xl, wl = _legendre(q)
        for hi, lo in zip(edges[:-1], edges[1:]):
            t = lo + (hi - lo) * (xl + 1) / 2
            rho = 1.0 - t
            xs.append(rho)
            ws.append(wl * (hi - lo) / 2 * (t * (2 - t)) ** a * rho)
        T = edges[-1]
        xj, wj = _jacobi(q, float(a)) if a != 0 else (xl, wl)
        t = T * (xj + 1) / 2
        rho = 1.0 - t
        xs.append(rho)
        ws.append(wj * (T / 2) ** (a + 1) * (2 - t) ** a * rho)
        nodes = np.concatenate(xs)
        weights = np.concatenate(ws)
        order = np.argsort(nodes, kind="stable")
        return cls(nodes[order], weights[order], float(a))


@dataclass(frozen=True)
class AngularRule:
    nodes: np.ndarray
    weights: np.ndarray
    uniform: bool = False

    def __len__(self):
        return len(self.nodes)

    @classmethod
    def periodic(cls, m: int) -> "AngularRule":
        """Uniform trapezoid rule on [-pi, pi); exact for e^{ij theta}, |j| < m."""
        m = int(m)
        th = -np.pi + 2 * np.pi * np.arange(m) / m
        return cls(th, np.full(m, 2 * np.pi / m), True)

    @classmethod
    def graded(cls, center: float, width: float, q: int = 12) -> "AngularRule":
        """Composite Gauss rule with panels doubling away from ``center``."""
        width = float(width)
        if width >= np.pi / 2:
            return cls.periodic(max(2 * q, 16))
        h = [width]
        while h[-1] * 2 < np.pi:
            h.append(h[-1] * 2)
        h.append(np.pi)
        edges = np.concatenate([-np.array(h[::-1]), np.array(h)])
        xl, wl = _legendre(q)
        lo, hi = edges[:-1, None], edges[1:, None]
        th = lo + (hi - lo) * (xl[None, :] + 1) / 2
        w = wl[None, :] * (hi - lo) / 2
        return cls((th + center).ravel(), w.ravel(), False)


@dataclass(frozen=True)
class DiscRule:
    radial: RadialRule
    angular: AngularRule

    @property
    def a(self) -> float:
        return self.radial.a

    @classmethod
    def gauss(cls, radial_nodes: int = 64, angular_nodes: int = 256, a: float = 0.0):
        return cls(RadialRule.gauss_jacobi(radial_nodes, a), AngularRule.periodic(angular_nodes))

    def points(self) -> np.ndarray:
        return self.radial.nodes[:, None] * np.exp(1j * self.angular.nodes[None, :])

    def weights(self) -> np.ndarray:
        return self.radial.weights[:, None] * self.angular.weights[None, :]

    def __len__(self):
        return len(self.radial) * len(self.angular)


@dataclass
class QuadratureScheme:
    """Per-factor tensor rules with nested refinement (node counts doubled per level)."""

    n: int = 1
    radial_nodes: int = 64
    angular_nodes: int = 256
    max_refinement: int = 3
    target_rel_tol: float = 1e-10
    atol: float = 1e-13
    kernel_panel_nodes: int = 12

    @classmethod
    def default(cls, n: int = 1, **kw) -> "QuadratureScheme":
        if n == 1:
            return cls(n=1, **kw)
        # tensor grids grow as (R*M)^n
        base = dict(radial_nodes=16, angular_nodes=32, max_refinement=2, kernel_panel_nodes=8)
        base.update(kw)
        return cls(n=n, **base)

    @classmethod
    def from_config(cls, n: int, cfg: dict | None) -> "QuadratureScheme":
        cfg = dict(cfg or {})
        keys = ("radial_nodes", "angular_nodes", "max_refinement", "target_rel_tol")
        return cls.default(n, **{k: cfg[k] for k in keys if k in cfg})

    def disc_rules(self, level: int = 0, a=0.0) -> list[DiscRule]:
        a = _per_factor(a, self.n)
        f = 2 ** level
        return [DiscRule.gauss(self.radial_nodes * f, self.angular_nodes * f, aj) for aj in a]

    def converged(self, value, err) -> bool:
        return err <= self.target_rel_tol * abs(value) + self.atol

    def to_dict(self) -> dict:
        return {"radial_nodes": self.radial_nodes, "angular_nodes": self.angular_nodes,
                "max_refinement": self.max_refinement, "target_rel_tol": self.target_rel_tol}


class Separable:
    """Product integrand ``prod_j factors[j](z[j])``."""

    def __init__(self, factors: Sequence[Callable]):
        self.factors = tuple(factors)

    def __call__(self, z):
        out = 1.0
        for fj, zj in zip(self.factors, z):
            out = out * fj(zj)
        return out


def _per_factor(a, n):
    if np.ndim(a) == 0:
        return [float(a)] * n
    a = [float(x) for x in a]
    if len(a) != n:
        raise ValueError(f"expected {n} per-factor values, got {len(a)}")
    return a


def _factors_of(func, n):
    fac = getattr(func, "factors", None)
    if fac is not None and len(fac) == n:
        return list(fac)
    return None


def tensor_sum(rules: Sequence[DiscRule], func: Callable) -> complex:
    """Apply the tensor product of ``rules`` to ``func``; fixed summation order."""
    n = len(rules)
    pts = [r.points().ravel() for r in rules]
    wts = [r.weights().ravel() for r in rules]
    if n == 1:
        vals = np.asarray(func([pts[0]]), dtype=complex)
        vals = np.broadcast_to(vals, pts[0].shape)
        return complex(np.sum(wts[0] * vals))
    # chunk over the first factor to bound memory
    inner = int(np.prod([len(p) for p in pts[1:]]))
    step = max(1, _CHUNK // max(inner, 1))
    shape = [1] * n
    zs_rest = []
    w_rest = 1.0
    for j in range(1, n):
        sh = list(shape)
        sh[j] = -1
        zs_rest.append(pts[j].reshape(sh))
        w_rest = w_rest * wts[j].reshape(sh)
    partial = []
    for start in range(0, len(pts[0]), step):
        sl = slice(start, start + step)
        sh = list(shape)
        sh[0] = -1
        z0 = pts[0][sl].reshape(sh)
        w0 = wts[0][sl].reshape(sh)
        vals = np.asarray(func([z0] + zs_rest), dtype=complex)
        full = np.broadcast_to(vals * w0 * w_rest, (len(pts[0][sl]),) + tuple(len(p) for p in pts[1:]))
        partial.append(np.sum(full))
    return complex(np.sum(np.array(partial)))


def _refine(levels: Callable[[int], complex], scheme: QuadratureScheme, strict: bool):
    prev = levels(0)
    err = np.inf
    cur = prev
    for level in range(1, scheme.max_refinement + 1):
        cur = levels(level)
        err = abs(cur - prev)
        if scheme.converged(cur, err):
            return cur, float(err)
        prev = cur
    if strict:
        raise QuadratureError(
            f"quadrature did not converge: est_error={err:.3e}, value={abs(cur):.3e}", cur, err)
    return cur, float(err)


def integrate(scheme: QuadratureScheme, integrand: Callable, a=0.0, strict: bool = True):
    """Integrate ``integrand(z) * prod_j (1-|z_j|^2)^a_j`` against dm_{2n}.

    Returns ``(value, est_error)`` where est_error is the difference of the
    last two refinement levels.
    """
    n = scheme.n
    a = _per_factor(a, n)
    facs = _factors_of(integrand, n)
    if facs is not None and n > 1:
        sub = QuadratureScheme(1, scheme.radial_nodes, scheme.angular_nodes,
                               scheme.max_refinement, scheme.target_rel_tol, scheme.atol)
        return _product_of(
            [integrate(sub, (lambda z, f=f: f(z[0])), a=[aj], strict=strict)
             for f, aj in zip(facs, a)])
    return _refine(lambda lv: tensor_sum(scheme.disc_rules(lv, a), integrand), scheme, strict)


def _product_of(results):
    val = 1.0 + 0j
    rel = 0.0
    for v, e in results:
        val *= v
        rel += e / abs(v) if v != 0 else (0.0 if e == 0 else np.inf)
    err = rel * abs(val) if np.isfinite(rel) else max(e for _, e in results)
    return val, float(err)


def kernel_rule(zj: complex, a: float, q: int = 12, level: int = 0, additive: bool = False) -> DiscRule:
    """Disc rule graded toward the boundary point z/|z|, resolving a peak of width ~ 1-|z|.

    Nodes per panel double with ``level``, or grow by 4 per level when ``additive``.
    """
    q = q + 4 * level if additive else q * 2 ** level
    r = abs(zj)
    if r < 0.5:
        # graded in t = 1 - rho so integrands smooth in rho (not only rho^2) converge fast
        return DiscRule(RadialRule.graded(a, t_min=0.25, q=q), AngularRule.periodic(4 * q))
    d = 1.0 - r
    return DiscRule(RadialRule.graded(a, t_min=d / 4, q=q), AngularRule.graded(np.angle(zj), d / 2, q))


def _abs_kernel(z, b):
    def kern(zeta):
        out = 1.0
        for zj, zeta_j in zip(z, zeta):
            out = out * np.abs(1 - zj * np.conj(zeta_j)) ** (-b)
        return out
    return kern


def integrate_kernel(scheme: QuadratureScheme, a, b, z, extra: Callable | None = None,
                     kernel: Callable | None = None, strict: bool = True):
    """Integrate ``(1-|zeta|^2)^a |1 - z conj(zeta)|^{-b} extra(zeta)`` over U^n.

    ``kernel`` replaces the default modulus kernel (it receives zeta and must
    be a product over factors when ``extra`` is separable).  Angular and
    radial nodes are graded around each z_j / |z_j|.
    """
    z = [complex(x) for x in np.atleast_1d(z)]
    n = len(z)
    a = _per_factor(a, n)
    b = _per_factor(b, n)
    q = scheme.kernel_panel_nodes

    facs = _factors_of(extra, n) if extra is not None else [None] * n
    kfacs = _factors_of(kernel, n) if kernel is not None else [None] * n
    if n > 1 and facs is not None and (kernel is None or kfacs is not None):
        results = []
        for j in range(n):
            sub = QuadratureScheme(1, scheme.radial_nodes, scheme.angular_nodes,
                                   scheme.max_refinement, scheme.target_rel_tol,
                                   scheme.atol, scheme.kernel_panel_nodes)
            ex = None if facs[j] is None else (lambda zz, f=facs[j]: f(zz[0]))
            kr = None if kfacs[j] is None else (lambda zz, f=kfacs[j]: f(zz[0]))
            results.append(integrate_kernel(sub, a[j], b[j], [z[j]], ex, kr, strict))
        return _product_of(results)

    kern = kernel if kernel is not None else None

    def func(zeta):
        k = kern(zeta) if kern is not None else 1.0
        if kern is None:
            for zj, zeta_j, bj in zip(z, zeta, b):
                k = k * np.abs(1 - zj * np.conj(zeta_j)) ** (-bj)
        return k if extra is None else k * extra(zeta)

    def level(lv):
        # tensor grids of n > 1 factors cannot afford doubling per level
        rules = [kernel_rule(zj, aj, q, lv, additive=n > 1) for zj, aj in zip(z, a)]
        return tensor_sum(rules, func)

    return _refine(level, scheme, strict)


def mc_integrate(integrand: Callable, n: int = 1, n_samples: int = 10 ** 6, seed: int = 0,
                 block: int = 1 << 16):
    """Monte Carlo over U^n with uniform area sampling on each factor disc.

    Returns ``(value, std_error)``.  Blocks draw from independent Philox
    streams spawned from ``seed``, so results do not depend on evaluation order.
    """
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")
    nblocks = -(-n_samples // block)
    seqs = np.random.SeedSequence(seed).spawn(nblocks)
    total = 0j
    total_sq = 0.0
    count = 0
    for i, ss in enumerate(seqs):
        m = min(block, n_samples - i * block)
        rng = np.random.Generator(np.random.Philox(ss))
        z = [_disc_samples(rng, m) for _ in range(n)]
        vals = np.broadcast_to(np.asarray(integrand(z), dtype=complex), (m,))
        total += np.sum(vals)
        count += m
        # second moments accumulated about zero; centered at the end
        total_sq += float(np.sum(np.abs(vals) ** 2))
    mean = total / count
    var = max(total_sq / count - abs(mean) ** 2, 0.0) * count / (count - 1)
    vol = math.pi ** n
    return complex(mean * vol), float(math.sqrt(var / count) * vol)


def _disc_samples(rng: np.random.Generator, m: int) -> np.ndarray:
    out = np.empty(0, dtype=complex)
    while len(out) < m:
        xy = rng.uniform(-1.0, 1.0, size=(2, int(1.3 * (m - len(out))) + 16))
        z = xy[0] + 1j * xy[1]
        out = np.concatenate([out, z[np.abs(z) < 1]])
    return out[:m]

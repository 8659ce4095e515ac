"""Truncated power series on the polydisc and the fractional differential."""
from __future__ import annotations

import json
from typing import Sequence

import numpy as np
from scipy.special import gammaln
from scipy.stats import nbinom

from .symbols import Symbol
from .weights import ProductWeight, WeightFactor, eval_weight, regularity_indices

__all__ = [
    "PolySeries",
    "TruncationError",
    "frac_multiplier",
    "frac_diff",
    "D",
    "eval_series",
    "polar_values",
    "extremal_f_r",
    "required_degree",
    "symbol_g_r",
]

MAX_DEGREE = 1 << 15


class TruncationError(ValueError):
    def __init__(self, msg, required_degree=None):
        super().__init__(msg)
        self.required_degree = required_degree


def _check_multi_index(k, n=None):
    k = tuple(int(x) for x in np.atleast_1d(k))
    if any(x < 0 for x in k):
        raise ValueError("multi-index entries must be nonnegative")
    if n is not None and len(k) != n:
        raise ValueError(f"multi-index {k} has length {len(k)}, expected {n}")
    return k


def _check_order(beta, n=None):
    beta = tuple(float(x) for x in np.atleast_1d(beta))
    if any(not b > -1 for b in beta):
        raise ValueError(f"fractional order {beta} needs every entry > -1")
    if n is not None and len(beta) != n:
        raise ValueError(f"order {beta} has length {len(beta)}, expected {n}")
    return beta


class PolySeries:
    """Coefficients a_k, k <= N, of sum a_k z^k (or sum a_k conj(z)^k).

    ``coeffs`` is a dense complex array of shape ``N + 1``.  Series built
    with :meth:`product` keep their one-variable ``factors`` and materialize
    the dense array only on demand.
    """

    def __init__(self, coeffs=None, conjugated: bool = False, factors=None):
        if factors is not None:
            factors = tuple(factors)
            if any(f.dim != 1 for f in factors):
                raise ValueError("product factors must be one-variable series")
            if any(f.conjugated != conjugated for f in factors):
                raise ValueError("factor orientation must match")
            self.factors = factors
            self._coeffs = None
            self._shape = tuple(len(f.coeffs) for f in factors)
        else:
            arr = np.array(coeffs, dtype=complex, ndmin=1)
            self._coeffs = arr
            self._shape = arr.shape
            self.factors = None
        self.conjugated = bool(conjugated)

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            out = self.factors[0].coeffs
            for f in self.factors[1:]:
                out = np.multiply.outer(out, f.coeffs)
            self._coeffs = out
        return self._coeffs

    @property
    def dim(self) -> int:
        return len(self._shape)

    @property
    def degree_bound(self) -> tuple:
        return tuple(s - 1 for s in self._shape)

    def __repr__(self):
        kind = "conj" if self.conjugated else "holo"
        return f"PolySeries(dim={self.dim}, N={self.degree_bound}, {kind})"

    # construction -----------------------------------------------------
    @classmethod
    def monomial(cls, k, coefficient: complex = 1.0, conjugated: bool = False,
                 degree_bound=None) -> "PolySeries":
        k = _check_multi_index(k)
        shape = tuple(x + 1 for x in (degree_bound if degree_bound is not None else k))
        c = np.zeros(shape, dtype=complex)
        c[k] = coefficient
        return cls(c, conjugated)

    @classmethod
    def constant(cls, value: complex = 1.0, n: int = 1) -> "PolySeries":
        if n == 1:
            return cls(np.full((1,), value, dtype=complex))
        # a product of one-variable constants keeps integrals separable
        return cls.product(cls.constant(value), *[cls.constant(1.0)] * (n - 1))

    @classmethod
    def product(cls, *series: "PolySeries") -> "PolySeries":
        if len(series) == 1:
            return series[0]
        return cls(factors=series, conjugated=series[0].conjugated)

    @classmethod
    def random(cls, degree, rng: np.random.Generator, decay: float = 0.5) -> "PolySeries":
        """Complex Gaussian coefficients damped by ``decay**|k|``."""
        shape = tuple(d + 1 for d in np.atleast_1d(degree))
        c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        grids = np.meshgrid(*[np.arange(s) for s in shape], indexing="ij")
        return cls(c * decay ** sum(grids))

    def mirrored(self) -> "PolySeries":
        """Same coefficients with the orientation flipped."""
        if self.factors is not None:
            return PolySeries(factors=[f.mirrored() for f in self.factors],
                              conjugated=not self.conjugated)
        return PolySeries(self.coeffs, not self.conjugated)

    # arithmetic -------------------------------------------------------
    def _aligned(self, other: "PolySeries"):
        if self.dim != other.dim or self.conjugated != other.conjugated:
            raise ValueError("series must share dimension and orientation")
        shape = tuple(max(a, b) for a, b in zip(self._shape, other._shape))
        a = np.zeros(shape, dtype=complex)
        b = np.zeros(shape, dtype=complex)
        a[tuple(slice(0, s) for s in self._shape)] = self.coeffs
        b[tuple(slice(0, s) for s in other._shape)] = other.coeffs
        return a, b

    def __add__(self, other):
        a, b = self._aligned(other)
        return PolySeries(a + b, self.conjugated)

    def __sub__(self, other):
        a, b = self._aligned(other)
        return PolySeries(a - b, self.conjugated)

    def __mul__(self, c):
        if isinstance(c, PolySeries):
            return NotImplemented
        if self.factors is not None:
            f0 = self.factors[0] * c
            return PolySeries(factors=(f0,) + self.factors[1:], conjugated=self.conjugated)
        return PolySeries(self.coeffs * complex(c), self.conjugated)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def is_zero(self) -> bool:
        if self.factors is not None:
            return any(f.is_zero() for f in self.factors)
        return not np.any(self.coeffs)

    # evaluation -------------------------------------------------------
    def __call__(self, z):
        return eval_series(self, z)

    # serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        c = self.coeffs
        entries = []
        for k in zip(*np.nonzero(c)):
            v = c[k]
            entries.append({"k": [int(x) for x in k], "re": float(v.real), "im": float(v.imag)})
        return {"dim": self.dim, "degree_bound": list(self.degree_bound),
                "conjugated": self.conjugated, "coeffs": entries}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "PolySeries":
        shape = tuple(int(x) + 1 for x in d["degree_bound"])
        if len(shape) != int(d["dim"]):
            raise ValueError("degree_bound length does not match dim")
        c = np.zeros(shape, dtype=complex)
        for e in d["coeffs"]:
            k = _check_multi_index(e["k"], len(shape))
            if any(x >= s for x, s in zip(k, shape)):
                raise ValueError(f"index {k} exceeds degree bound")
            c[k] = complex(e["re"], e.get("im", 0.0))
        return cls(c, bool(d.get("conjugated", False)))

    @classmethod
    def from_json(cls, text: str) -> "PolySeries":
        return cls.from_dict(json.loads(text))


def eval_series(f: PolySeries, z) -> np.ndarray | complex:
    """Evaluate f at z (a point, or a sequence of n broadcastable arrays); Horner order."""
    coords = z if isinstance(z, (list, tuple)) else [z]
    zs = [np.asarray(x, dtype=complex) for x in coords]
    if len(zs) != f.dim:
        raise ValueError(f"expected {f.dim} coordinates, got {len(zs)}")
    if any(np.any(np.abs(x) >= 1) for x in zs):
        raise ValueError("evaluation point outside the open polydisc")
    if f.conjugated:
        zs = [np.conj(x) for x in zs]
    scalar = all(x.ndim == 0 for x in zs)
    if f.factors is not None:
        out = 1.0
        for fj, zj in zip(f.factors, zs):
            out = out * _horner(fj.coeffs, [zj])
    else:
        out = _horner(f.coeffs, zs)
    return complex(out) if scalar else out


def _horner(c: np.ndarray, zs):
    if c.ndim == 1:
        acc = np.zeros(np.shape(zs[0]), dtype=complex) + c[-1]
        for a in c[-2::-1]:
            acc = acc * zs[0] + a
        return acc
    acc = _horner(c[-1], zs[1:])
    for k in range(c.shape[0] - 2, -1, -1):
        acc = acc * zs[0] + _horner(c[k], zs[1:])
    return acc


def polar_values(f: PolySeries, radii: Sequence[np.ndarray], m: Sequence[int]) -> np.ndarray:
    """Values of f on the tensor polar grid rho_j e^{i theta_j}, theta_j uniform on [-pi, pi).

    ``radii[j]`` are the radial nodes of factor j and ``m[j]`` its number of
    angles.  Returns an array of shape (R_1, ..., R_n, M_1, ..., M_n).
    Computed by (folded) inverse FFTs, exact at the grid points.
    """
    n = f.dim
    if f.factors is not None:
        vals = [polar_values(fj, [radii[j]], [m[j]]) for j, fj in enumerate(f.factors)]
        out = vals[0]
        for v in vals[1:]:
            out = np.multiply.outer(out, v)
        # reorder (R1, M1, R2, M2, ...) -> (R1, R2, ..., M1, M2, ...)
        axes = [2 * j for j in range(n)] + [2 * j + 1 for j in range(n)]
        return out.transpose(axes)
    c = f.coeffs
    sign = -1.0 if f.conjugated else 1.0
    # a_k prod_j rho_j^k_j (-1)^k_j with shape (R_1..R_n, K_1..K_n)
    scaled = c.reshape((1,) * n + c.shape)
    for j in range(n):
        kj = np.arange(c.shape[j])
        rho = np.asarray(radii[j], dtype=float)
        powk = rho[:, None] ** kj[None, :] * (-1.0) ** kj[None, :]
        shape = [1] * (2 * n)
        shape[j] = len(rho)
        shape[n + j] = len(kj)
        scaled = scaled * powk.reshape(shape)
    # fold each angular axis to its grid size
    for j in range(n):
        ax = n + j
        size = scaled.shape[ax]
        mj = int(m[j])
        if size > mj:
            pad = (-size) % mj
            widths = [(0, 0)] * scaled.ndim
            widths[ax] = (0, pad)
            tmp = np.pad(scaled, widths)
            shp = list(tmp.shape)
            shp[ax:ax + 1] = [tmp.shape[ax] // mj, mj]
            scaled = tmp.reshape(shp).sum(axis=ax)
        elif size < mj:
            widths = [(0, 0)] * scaled.ndim
            widths[ax] = (0, mj - size)
            scaled = np.pad(scaled, widths)
    axes = tuple(range(n, 2 * n))
    if sign > 0:
        vals = np.fft.ifftn(scaled, axes=axes) * np.prod([int(x) for x in m])
    else:
        vals = np.fft.fftn(scaled, axes=axes)
    return vals


def frac_multiplier(beta: float, kmax: int) -> np.ndarray:
    """Gamma(beta+1+k) / (Gamma(beta+1) Gamma(k+1)) for k = 0..kmax (log-Gamma form)."""
    k = np.arange(kmax + 1, dtype=float)
    if beta == 1.0:
        return k + 1.0
    if beta == 0.0:
        return np.ones_like(k)
    return np.exp(gammaln(beta + 1 + k) - gammaln(beta + 1) - gammaln(k + 1))


def frac_diff(f: PolySeries, beta) -> PolySeries:
    """Fractional differential D^beta acting on coefficients."""
    if f.conjugated:
        raise ValueError("frac_diff expects a holomorphic series")
    beta = _check_order(beta, f.dim)
    if f.factors is not None:
        return PolySeries.product(*[frac_diff(fj, [bj]) for fj, bj in zip(f.factors, beta)])
    c = f.coeffs
    for j, bj in enumerate(beta):
        mult = frac_multiplier(bj, c.shape[j] - 1)
        shape = [1] * c.ndim
        shape[j] = -1
        c = c * mult.reshape(shape)
    return PolySeries(c)


def D(f: PolySeries) -> PolySeries:
    """D = D^(1,...,1); conjugated series are differentiated in conj(z)."""
    if f.conjugated:
        return frac_diff(f.mirrored(), [1.0] * f.dim).mirrored()
    return frac_diff(f, [1.0] * f.dim)


def required_degree(r: float, k: float, tol: float = 1e-10) -> int:
    """Smallest N whose dropped tail of (1 - r z)^-k has relative coefficient sum < tol."""
    if r == 0:
        return 0
    # coefficients normalized by (1-r)^k form a negative binomial pmf
    return int(nbinom.isf(tol, k, 1.0 - r))


def extremal_f_r(r, k, w: ProductWeight, p: float, degree_bound=None,
                 tol: float = 1e-10, max_degree: int = MAX_DEGREE) -> PolySeries:
    """Truncated f_r(z) = C_r prod_j (1 - r_j z_j)^(-k_j), C_r = (1-r)^k w(1-r)^(-1/p)."""
    n = w.n
    r = [float(x) for x in np.atleast_1d(r)]
    k = [float(x) for x in np.atleast_1d(k)]
    if len(r) != n or len(k) != n:
        raise ValueError("r and k need one entry per weight factor")
    if any(not 0 <= x < 1 for x in r):
        raise ValueError("r_j must lie in [0, 1)")
    for wj, kj in zip(w.factors, k):
        alpha_w, _ = regularity_indices(wj)
        if not (kj >= 1 and kj > (alpha_w + 2) / p):
            raise ValueError(f"k={kj} must satisfy k >= 1 and k > (alpha_w+2)/p = {(alpha_w + 2) / p:g}")
    if degree_bound is not None:
        degree_bound = [int(x) for x in np.atleast_1d(degree_bound)]
    factors = []
    for j in range(n):
        need = required_degree(r[j], k[j], tol)
        if degree_bound is None:
            N = need
            if N > max_degree:
                raise TruncationError(
                    f"r={r[j]} needs degree {N} > cap {max_degree}", required_degree=N)
        else:
            N = degree_bound[j]
            if N < need:
                raise TruncationError(
                    f"degree {N} too small for r={r[j]}: need {need}", required_degree=need)
        m = np.arange(N + 1, dtype=float)
        if r[j] == 0:
            logc = np.where(m == 0, 0.0, -np.inf)
        else:
            logc = gammaln(k[j] + m) - gammaln(k[j]) - gammaln(m + 1) + m * np.log(r[j])
        # C_r folded into the log to avoid overflow of the individual terms
        t = 1.0 - r[j]
        w_val = eval_weight(w.factors[j], t) if t < 1 else 1.0
        logC = k[j] * np.log(t) - np.log(w_val) / p
        factors.append(PolySeries(np.exp(logc + logC)))
    return PolySeries.product(*factors)


def _phase_factor(f1: PolySeries, reading: str):
    def g(zj):
        v = eval_series(f1, np.asarray(zj))
        v = np.asarray(v)
        ph = np.angle(v)
        out = np.exp(-1j * ph) if reading == "phase" else np.exp(-ph) + 0j
        return np.where(v == 0, 1.0 + 0j, out)
    return g


def symbol_g_r(f: PolySeries, reading: str = "phase") -> Symbol:
    """Phase-canceling symbol g(zeta) = exp(-i arg f(zeta)), so g f = |f|.

    ``reading="real"`` gives exp(-arg f) instead (bounded by e^pi, not unimodular).
    """
    if reading not in ("phase", "real"):
        raise ValueError("reading must be 'phase' or 'real'")
    sup = 1.0 if reading == "phase" else float(np.exp(np.pi))
    if f.factors is not None:
        facs = [_phase_factor(fj, reading) for fj in f.factors]
        sym = Symbol.product(facs, [sup] * len(facs), name=f"g_r[{reading}]")
    elif f.dim == 1:
        sym = Symbol.product([_phase_factor(f, reading)], [sup], name=f"g_r[{reading}]")
    else:
        def func(z):
            v = np.asarray(eval_series(f, z))
            ph = np.angle(v)
            out = np.exp(-1j * ph) if reading == "phase" else np.exp(-ph) + 0j
            return np.where(v == 0, 1.0 + 0j, out)
        sym = Symbol(func, sup ** f.dim if reading == "real" else 1.0, f.dim, name=f"g_r[{reading}]")
    sym.phase_of = f
    sym.reading = reading
    return sym

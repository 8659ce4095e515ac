"""Bounded symbols g on U^n."""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np


class Symbol:
    """A bounded function on U^n with a declared sup bound.

    ``func`` receives a sequence of n complex arrays.  A symbol built with
    ``factors`` (one-variable callables) is a product and lets integrators
    work factor by factor.
    """

    def __init__(self, func: Callable | None, sup: float, n: int = 1,
                 factors: Sequence[Callable] | None = None, name: str = ""):
        if not np.isfinite(sup) or sup < 0:
            raise ValueError("symbol needs a finite sup bound")
        if func is None and factors is None:
            raise ValueError("give func or factors")
        self.func = func
        self.sup = float(sup)
        self.factors = tuple(factors) if factors is not None else None
        self.n = len(self.factors) if self.factors is not None else int(n)
        self.name = name

    def __call__(self, z):
        if self.factors is not None:
            out = 1.0
            for fj, zj in zip(self.factors, z):
                out = out * fj(zj)
            return out
        return self.func(z)

    def __repr__(self):
        return f"Symbol({self.name or 'custom'}, n={self.n}, sup={self.sup:g})"

    @classmethod
    def constant(cls, c: complex = 1.0, n: int = 1) -> "Symbol":
        c = complex(c)
        first = (lambda z: np.full(np.shape(z), c, dtype=complex))
        one = (lambda z: np.ones(np.shape(z), dtype=complex))
        return cls(None, abs(c), factors=[first] + [one] * (n - 1), name=f"const({c:g})")

    @classmethod
    def product(cls, factors: Sequence[Callable], sups: Sequence[float] | None = None,
                name: str = "product") -> "Symbol":
        sups = sups if sups is not None else [1.0] * len(factors)
        return cls(None, float(np.prod(sups)), factors=factors, name=name)

    def scaled(self, c: complex) -> "Symbol":
        c = complex(c)
        if self.factors is not None:
            f0 = self.factors[0]
            facs = [(lambda z, f0=f0: c * f0(z))] + list(self.factors[1:])
            return Symbol(None, abs(c) * self.sup, factors=facs, name=f"{c:g}*{self.name}")
        return Symbol(lambda z: c * self.func(z), abs(c) * self.sup, self.n,
                      name=f"{c:g}*{self.name}")

"""Dyadic quadrangles of U^n, their 4/3 enlargements and comparability checks.

A one-variable cell of level k and index l is the annular sector
``1 - 2^-k <= |z| < 1 - 2^-(k+1)``, ``pi l 2^-k <= arg z < pi (l+1) 2^-k``
with l in {-2^k, ..., 2^k - 1}; level 0 is the disc of radius 1/2 cut into
two half discs.  Cells of U^n are products of one-variable cells.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .report import VerificationReport

__all__ = [
    "DyadicCell",
    "DyadicPartition",
    "build_partition",
    "check_proposition1",
    "covering_multiplicity",
    "ENLARGEMENT",
]

ENLARGEMENT = 4.0 / 3.0


@dataclass(frozen=True)
class Cell1:
    k: int
    l: int

    @property
    def r_lo(self) -> float:
        return 1.0 - 2.0 ** (-self.k)

    @property
    def r_hi(self) -> float:
        return 1.0 - 2.0 ** (-(self.k + 1))

    @property
    def th_lo(self) -> float:
        return math.pi * self.l * 2.0 ** (-self.k)

    @property
    def th_hi(self) -> float:
        return math.pi * (self.l + 1) * 2.0 ** (-self.k)

    @property
    def center(self) -> complex:
        rad = 1.0 - 3.0 * 2.0 ** (-(self.k + 2))
        return rad * complex(math.cos(math.pi * (self.l + 0.5) * 2.0 ** (-self.k)),
                             math.sin(math.pi * (self.l + 0.5) * 2.0 ** (-self.k)))

    @property
    def measure(self) -> float:
        return 0.5 * (self.r_hi ** 2 - self.r_lo ** 2) * (self.th_hi - self.th_lo)

    def enlarged(self, factor: float = ENLARGEMENT):
        """(r_lo, r_hi, th_lo, th_hi) scaled by ``factor`` about the center."""
        rc = 0.5 * (self.r_lo + self.r_hi)
        hr = 0.5 * factor * (self.r_hi - self.r_lo)
        tc = 0.5 * (self.th_lo + self.th_hi)
        ht = 0.5 * factor * (self.th_hi - self.th_lo)
        return rc - hr, rc + hr, tc - ht, tc + ht


def _cells1(K: int) -> list[Cell1]:
    return [Cell1(k, l) for k in range(K + 1) for l in range(-2 ** k, 2 ** k)]


@dataclass(frozen=True)
class DyadicCell:
    k: tuple
    l: tuple
    factors: tuple

    @property
    def center(self) -> tuple:
        return tuple(c.center for c in self.factors)

    @property
    def measure(self) -> float:
        return math.prod(c.measure for c in self.factors)

    @property
    def radial(self) -> tuple:
        return tuple((c.r_lo, c.r_hi) for c in self.factors)

    @property
    def arcs(self) -> tuple:
        return tuple((c.th_lo, c.th_hi) for c in self.factors)


@dataclass(frozen=True)
class DyadicPartition:
    n: int
    K: int

    @cached_property
    def factor_cells(self) -> list[Cell1]:
        return _cells1(self.K)

    def __len__(self) -> int:
        return len(self.factor_cells) ** self.n

    @property
    def cells(self):
        """All cells with k_j <= K, lexicographic in (k, l) per factor."""
        for combo in itertools.product(self.factor_cells, repeat=self.n):
            yield DyadicCell(tuple(c.k for c in combo), tuple(c.l for c in combo), combo)

    def total_measure(self) -> float:
        return sum(c.measure for c in self.cells)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(("level", "index", "center_re", "center_im", "measure"))
        for c in self.cells:
            ctr = c.center
            wr.writerow(("|".join(map(str, c.k)), "|".join(map(str, c.l)),
                         "|".join(repr(z.real) for z in ctr), "|".join(repr(z.imag) for z in ctr),
                         repr(c.measure)))
        return buf.getvalue()


def build_partition(n: int, K: int) -> DyadicPartition:
    if n < 1 or K < 0:
        raise ValueError("need n >= 1 and K >= 0")
    return DyadicPartition(int(n), int(K))


def _fractions(s: int) -> np.ndarray:
    # closure samples, endpoints included
    return np.linspace(0.0, 1.0, s)


def _radial_ratios(cell: Cell1, s: int) -> np.ndarray:
    r = cell.r_lo + (cell.r_hi - cell.r_lo) * _fractions(s)
    return (1.0 - abs(cell.center)) / (1.0 - r)


def check_proposition1(part: DyadicPartition, samples_per_cell: int = 8) -> VerificationReport:
    """Radial comparability (1-|center|)/(1-|zeta|) and (1-|center|)^2/|cell| per level.

    Both ratios factor over the coordinates, so n > 1 bands are products of
    one-variable bands.
    """
    if samples_per_cell < 4:
        raise ValueError("samples_per_cell must be at least 4")
    rep = VerificationReport(target="P1", mode="sufficiency")
    rad_lo, rad_hi = np.inf, -np.inf
    meas_lo, meas_hi = np.inf, -np.inf
    for k in range(part.K + 1):
        lvl_lo, lvl_hi = np.inf, -np.inf
        mlo, mhi = np.inf, -np.inf
        for cell in (c for c in part.factor_cells if c.k == k):
            rr = _radial_ratios(cell, samples_per_cell)
            lvl_lo, lvl_hi = min(lvl_lo, rr.min()), max(lvl_hi, rr.max())
            m = (1.0 - abs(cell.center)) ** 2 / cell.measure
            mlo, mhi = min(mlo, m), max(mhi, m)
        rep.add_row(k, "radial_min", float(lvl_lo) ** part.n)
        rep.add_row(k, "radial_max", float(lvl_hi) ** part.n)
        rep.add_row(k, "measure_ratio", float(mlo) ** part.n)
        rad_lo, rad_hi = min(rad_lo, lvl_lo), max(rad_hi, lvl_hi)
        meas_lo, meas_hi = min(meas_lo, mlo), max(meas_hi, mhi)
    rep.metrics["radial_band"] = [float(rad_lo), float(rad_hi)]
    rep.metrics["measure_band"] = [float(meas_lo) ** part.n, float(meas_hi) ** part.n]
    ok = rad_lo >= 0.75 * (1 - 1e-9) and rad_hi <= 1.5 * (1 + 1e-9)
    rep.verdict = "pass" if ok else "fail"
    return rep


def angle_offset(th, th_lo):
    """(th - th_lo) mod 2 pi in [0, 2 pi); np.mod can round tiny negatives up to 2 pi."""
    d = np.mod(np.asarray(th) - th_lo, 2 * np.pi)
    return np.where(d >= 2 * np.pi, 0.0, d)


def _count1(r: np.ndarray, th: np.ndarray, cells: list[Cell1], factor: float) -> np.ndarray:
    """Per-point number of (enlarged) one-variable cells containing (r, th)."""
    out = np.zeros(r.shape, dtype=int)
    for c in cells:
        if factor == 1.0:
            rl, rh, tl, th_ = c.r_lo, c.r_hi, c.th_lo, c.th_hi
            inr = (r >= rl) & (r < rh)
        else:
            rl, rh, tl, th_ = c.enlarged(factor)
            inr = (r >= rl) & (r <= rh)
        # angles compared modulo 2 pi
        d = angle_offset(th, tl)
        inth = d < (th_ - tl) if factor == 1.0 else d <= (th_ - tl)
        out += (inr & inth).astype(int)
    return out


def _sample_points(part: DyadicPartition, s: int):
    r, th = [], []
    fr = np.linspace(0.01, 0.99, s)
    for c in part.factor_cells:
        rr = c.r_lo + (c.r_hi - c.r_lo) * fr
        tt = c.th_lo + (c.th_hi - c.th_lo) * fr
        R, T = np.meshgrid(rr, tt, indexing="ij")
        r.append(R.ravel())
        th.append(T.ravel())
    return np.concatenate(r), np.concatenate(th)


def covering_multiplicity(part: DyadicPartition, enlarged: bool = True,
                          samples_per_cell: int = 6) -> int:
    """Max number of cells (Delta* when ``enlarged``) containing a sample point.

    Points are taken inside every cell; the product structure makes the
    n-variable count the n-th power of the one-variable maximum.
    """
    r, th = _sample_points(part, samples_per_cell)
    cnt = _count1(r, th, part.factor_cells, ENLARGEMENT if enlarged else 1.0)
    return int(cnt.max()) ** part.n

"""Experiment harness: sufficiency and necessity probes of the boundedness theorems.

Targets
-------
L1, L2, P1   pointwise reproducing estimate, weighted kernel bound, dyadic comparability
T1, T2, T3   little Hankel operator for p < 1, p = 1, p > 1
T4, T5, T6   Berezin-type operator for p < 1, p > 1, p = 1

A sufficiency run probes ``||T f|| / ||f||`` over a fixed family and checks
that the sequence stabilizes.  A necessity run sweeps the extremal family
f_r with its phase-canceling symbol as r -> 1 and checks for divergence.
"""
from __future__ import annotations

import json
import math
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy
from scipy.stats import spearmanr

from .holocalc import PolySeries, TruncationError, extremal_f_r, symbol_g_r
from .operators import OperatorConfig, operator_ratio
from .partition import build_partition, check_proposition1, covering_multiplicity
from .quadrature import QuadratureScheme
from .report import VerificationReport, config_hash
from .spaces import SpaceParams, lemma1_ratio
from .symbols import Symbol
from .weights import ProductWeight, lemma2_ratio, regularity_indices, weight_from_config

__all__ = [
    "InvalidSpecError",
    "THRESHOLD_PRESETS",
    "ExperimentSpec",
    "run_sufficiency",
    "run_necessity",
    "run_lemma_or_prop",
    "run",
    "proof_domains",
]

__version__ = "0.1.0"


class InvalidSpecError(ValueError):
    """Parameters do not fit the requested target or mode."""


THRESHOLD_PRESETS = {
    "T1-style": lambda aw, p: aw / p - 2.0,
    "remark1": lambda aw, p: (aw + 2.0) / p - 2.0,
    "plain": lambda aw, p: aw,
    "T2-statement": lambda aw, p: aw - 2.0,
}

# operator kind, admissible p, default threshold preset
TARGETS = {
    "T1": ("hankel", lambda p: 0 < p < 1, "T1-style"),
    "T2": ("hankel", lambda p: p == 1, "T2-statement"),
    "T3": ("hankel", lambda p: p > 1, "plain"),
    "T4": ("berezin", lambda p: 0 < p < 1, "T1-style"),
    "T5": ("berezin", lambda p: p > 1, "T1-style"),
    "T6": ("berezin", lambda p: p == 1, "plain"),
}
LEMMA_TARGETS = ("L1", "L2", "P1")

DEFAULT_SWEEP = (0.5, 0.7, 0.9, 0.95, 0.99)


@dataclass
class ExperimentSpec:
    target: str
    n: int = 1
    p: float = 1.0
    weight: ProductWeight | list | dict | None = None
    alpha: tuple = (0.0,)
    threshold_preset: str | None = None
    r_sweep: tuple = DEFAULT_SWEEP
    quadrature: dict = field(default_factory=dict)
    seed: int = 0
    k: tuple | None = None
    symbol: str = "phase"
    reading: str = "phase"
    mode: str | None = None
    # harness policy
    slope_threshold: float = 0.2
    stabilization_factor: float = 2.0
    spearman_threshold: float = 0.8
    monomial_degree: int = 8
    random_count: int = 20
    random_degree: int = 6
    # lemma / proposition parameters
    m: tuple | None = None
    a: float = 1.0
    b: float = 4.0
    z_moduli: tuple = (0.0, 0.5, 0.9, 0.95, 0.99)
    K: int = 6
    samples_per_cell: int = 8

    def __post_init__(self):
        self.target = str(self.target).upper()
        if self.target not in TARGETS and self.target not in LEMMA_TARGETS:
            raise InvalidSpecError(f"unknown target {self.target!r}")
        if self.weight is None:
            self.weight = [{"family": "power", "a": 0.0}] * int(self.n)
        try:
            self.weight = weight_from_config(self.weight)
        except ValueError as e:
            raise InvalidSpecError(str(e)) from e
        if self.weight.n != self.n:
            raise InvalidSpecError(f"weight has {self.weight.n} factors but n = {self.n}")
        self.alpha = tuple(float(a) for a in np.broadcast_to(np.atleast_1d(self.alpha), (self.n,)))
        if any(not a > -1 for a in self.alpha):
            raise InvalidSpecError("alpha_j > -1 is required")
        if not self.p > 0:
            raise InvalidSpecError("p must be positive")
        if self.target in TARGETS:
            kind, p_ok, preset = TARGETS[self.target]
            if not p_ok(self.p):
                raise InvalidSpecError(f"p = {self.p} is outside the range of target {self.target}")
            self.threshold_preset = self.threshold_preset or preset
            if self.threshold_preset not in THRESHOLD_PRESETS:
                raise InvalidSpecError(f"unknown threshold preset {self.threshold_preset!r}")
        if self.symbol not in ("phase", "one", "zero"):
            raise InvalidSpecError("symbol must be 'phase', 'one' or 'zero'")
        if self.mode not in (None, "sufficiency", "necessity"):
            raise InvalidSpecError("mode must be 'sufficiency' or 'necessity'")
        self.r_sweep = tuple(float(r) for r in self.r_sweep)
        if self.k is None:
            self.k = tuple(float(math.floor((regularity_indices(w)[0] + 2) / self.p) + 1)
                           for w in self.weight.factors)
        else:
            self.k = tuple(float(x) for x in np.broadcast_to(np.atleast_1d(self.k), (self.n,)))

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_dict(cls, d: dict, **overrides) -> "ExperimentSpec":
        d = dict(d)
        d.update({k: v for k, v in overrides.items() if v is not None})
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise InvalidSpecError(f"unknown config keys: {sorted(unknown)}")
        if "target" not in d:
            raise InvalidSpecError("config needs a target")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str, **overrides) -> "ExperimentSpec":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidSpecError(f"config is not valid JSON: {e}") from e
        return cls.from_dict(d, **overrides)

    def to_dict(self) -> dict:
        d = {}
        for name in self.__dataclass_fields__:
            v = getattr(self, name)
            if isinstance(v, ProductWeight):
                v = v.to_list()
            elif isinstance(v, tuple):
                v = list(v)
            d[name] = v
        return d

    # -- derived quantities -----------------------------------------------------

    @property
    def kind(self) -> str:
        return TARGETS[self.target][0]

    def thresholds(self) -> list[float]:
        fn = THRESHOLD_PRESETS[self.threshold_preset]
        return [fn(regularity_indices(w)[0], self.p) for w in self.weight.factors]

    def hypothesis_holds(self) -> bool:
        return all(a > t for a, t in zip(self.alpha, self.thresholds()))

    def scheme(self) -> QuadratureScheme:
        return QuadratureScheme.from_config(self.n, self.quadrature)

    def predictor(self, r: float) -> float:
        """prod_j (1-r)^((alpha_j+2) p) / w_j(1-r)."""
        out = 1.0
        for a, w in zip(self.alpha, self.weight.factors):
            out *= (1 - r) ** ((a + 2) * self.p) / float(w(1 - r))
        return out


def _reproducibility(spec: ExperimentSpec) -> dict:
    return {
        "seed": spec.seed,
        "config_hash": config_hash(spec.to_dict()),
        "versions": {"besov": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
    }


def _policy(spec: ExperimentSpec) -> dict:
    return {"slope_threshold": spec.slope_threshold,
            "stabilization_factor": spec.stabilization_factor,
            "spearman_threshold": spec.spearman_threshold,
            "threshold_preset": spec.threshold_preset,
            "thresholds": spec.thresholds()}


def _symbol_for(spec: ExperimentSpec, f: PolySeries) -> Symbol:
    if spec.symbol == "one":
        return Symbol.constant(1.0, spec.n)
    if spec.symbol == "zero":
        return Symbol.constant(0.0, spec.n)
    return symbol_g_r(f, spec.reading)


def _spaces(spec: ExperimentSpec):
    scheme = spec.scheme()
    sp_in = SpaceParams(spec.p, spec.weight, scheme)
    sp_out = SpaceParams(spec.p, spec.weight, scheme)
    return sp_in, sp_out


def _product_or_dense(factors: list[PolySeries]) -> PolySeries:
    return factors[0] if len(factors) == 1 else PolySeries.product(*factors)


def probe_family(spec: ExperimentSpec) -> list[tuple[str, PolySeries]]:
    """Monomials (d,...,d) for d <= monomial_degree, f_r over the sweep, seeded random polynomials."""
    fam = []
    for d in range(spec.monomial_degree + 1):
        fam.append((f"mono:{d}", _product_or_dense([PolySeries.monomial((d,))] * spec.n)))
    for r in spec.r_sweep:
        fam.append((f"f_r:{r!r}", extremal_f_r([r] * spec.n, spec.k, spec.weight, spec.p)))
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(spec.seed)))
    for i in range(spec.random_count):
        if spec.n > 1:
            # products keep every n > 1 probe separable (exact factorization of both norms)
            f = PolySeries.product(*[PolySeries.random((spec.random_degree,), rng) for _ in range(spec.n)])
        else:
            f = PolySeries.random((spec.random_degree,) * spec.n, rng)
        fam.append((f"rand:{i}", f))
    return fam


def _pmap(func, items, threads: int | None):
    if threads is None or threads <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(func, items))


def run_sufficiency(spec: ExperimentSpec, threads: int | None = None) -> VerificationReport:
    """Stabilization of the probe ratios when the index condition holds."""
    if spec.target not in TARGETS:
        raise InvalidSpecError("run_sufficiency needs an operator target T1..T6")
    if not spec.hypothesis_holds():
        bad = [f"alpha_{j + 1}={a:g} <= {t:g}" for j, (a, t) in
               enumerate(zip(spec.alpha, spec.thresholds())) if not a > t]
        raise InvalidSpecError(f"index condition violated under preset {spec.threshold_preset}: "
                               + ", ".join(bad))
    sp_in, sp_out = _spaces(spec)
    fam = probe_family(spec)
    scheme = spec.scheme()

    def one(item):
        label, f = item
        cfg = OperatorConfig(spec.alpha, _symbol_for(spec, f), spec.kind, scheme=scheme)
        try:
            ratio, nin, nout, err = operator_ratio(cfg, f, sp_in, sp_out)
        except ZeroDivisionError:
            return label, None
        return label, (ratio, nin, nout, err)

    results = _pmap(one, fam, threads)
    rep = VerificationReport(target=spec.target, mode="sufficiency")
    ratios = []
    for label, res in results:
        if res is None:
            continue
        ratio, nin, nout, err = res
        ratios.append(ratio)
        rep.add_row(label, "ratio", ratio, err / nin)
        rep.add_row(label, "input_norm", nin)
    q = max(1, len(ratios) // 4)
    head, tail = ratios[:-q], ratios[-q:]
    head_max = max(head, default=0.0)
    tail_max = max(tail, default=0.0)
    rep.metrics.update(sup_ratio=max(ratios, default=0.0), head_max=head_max, tail_max=tail_max,
                       family_size=len(ratios), policy=_policy(spec))
    stable = all(np.isfinite(ratios)) and tail_max <= spec.stabilization_factor * head_max
    rep.verdict = "pass" if stable else "fail"
    rep.quadrature = scheme.to_dict()
    rep.reproducibility = _reproducibility(spec)
    return rep


def proof_domains(r, z=None, points: int = 256) -> dict:
    """Localization used by the extremal construction.

    V^n is the product of discs centered at r_j with radius (1 - r_j)/4; for a
    point z the maximizer zeta~ of |1 - conj(z) zeta| over the boundary of V^n
    is returned (computed factor by factor on a discretized circle).
    """
    r = [float(x) for x in np.atleast_1d(r)]
    radii = [(1 - rj) / 4 for rj in r]
    out = {"V_centers": r, "V_radii": radii}
    if z is not None:
        z = [complex(x) for x in np.atleast_1d(z)]
        th = 2 * np.pi * np.arange(points) / points
        zt = []
        for rj, hj, zj in zip(r, radii, z):
            cand = rj + hj * np.exp(1j * th)
            zt.append(complex(cand[int(np.argmax(np.abs(1 - np.conj(zj) * cand)))]))
        out["zeta_tilde"] = zt
    return out


def _loglog_slope(rs, ratios) -> float:
    x = np.log(1.0 / (1.0 - np.asarray(rs)))
    y = np.log(np.asarray(ratios))
    return float(np.polyfit(x, y, 1)[0])


def run_necessity(spec: ExperimentSpec, threads: int | None = None) -> VerificationReport:
    """Divergence of ||T_{g_r} f_r|| / ||f_r|| as r -> 1 when the index condition fails."""
    if spec.target not in TARGETS:
        raise InvalidSpecError("run_necessity needs an operator target T1..T6")
    if spec.hypothesis_holds():
        raise InvalidSpecError(f"index condition holds under preset {spec.threshold_preset}; "
                               "necessity runs need violated parameters")
    sp_in, sp_out = _spaces(spec)
    scheme = spec.scheme()

    def one(r):
        try:
            f = extremal_f_r([r] * spec.n, spec.k, spec.weight, spec.p)
        except TruncationError as e:
            return r, None, e.required_degree
        cfg = OperatorConfig(spec.alpha, _symbol_for(spec, f), spec.kind, scheme=scheme)
        return r, operator_ratio(cfg, f, sp_in, sp_out), max(f.degree_bound)

    results = _pmap(one, spec.r_sweep, threads)
    rep = VerificationReport(target=spec.target, mode="necessity")
    rs, ratios, nins, preds = [], [], [], []
    stopped = None
    for r, res, deg in results:
        if res is None:
            stopped = {"r": r, "required_degree": deg}
            break
        ratio, nin, nout, err = res
        rs.append(r)
        ratios.append(ratio)
        nins.append(nin)
        preds.append(spec.predictor(r))
        rep.add_row(r, "ratio", ratio, err / nin)
        rep.add_row(r, "input_norm", nin)
        rep.add_row(r, "output_norm", nout, err)
        rep.add_row(r, "predictor", preds[-1])
        rep.add_row(r, "truncation_degree", deg)
    m = rep.metrics
    m["policy"] = _policy(spec)
    m["stopped"] = stopped
    m["V_radius_rule"] = "(1-r_j)/4"
    if len(rs) >= 3:
        m["slope"] = _loglog_slope(rs[-3:], ratios[-3:])
        rho = spearmanr(ratios, preds)[0] if len(set(preds)) > 1 else float("nan")
        m["spearman"] = float(rho)
        m["input_norm_band"] = float(max(nins) / min(nins))
        expo = [(a + 2) * spec.p - regularity_indices(w)[0]
                for a, w in zip(spec.alpha, spec.weight.factors)]
        m["predictor_exponent"] = expo
        boundary = all(abs(e) < 1e-12 for e in expo)
        m["boundary_case"] = boundary
        if boundary:
            x = np.log(1.0 / (1.0 - np.asarray(rs)))
            c, a0 = np.polyfit(x, np.asarray(ratios), 1)
            fit = a0 + c * x
            ss = float(np.sum((np.asarray(ratios) - fit) ** 2))
            tot = float(np.sum((np.asarray(ratios) - np.mean(ratios)) ** 2)) or 1.0
            m["log_fit"] = {"c": float(c), "r2": 1 - ss / tot}
            diverges = c > 0 and 1 - ss / tot >= 0.9
        else:
            diverges = m["slope"] >= spec.slope_threshold
        rep.verdict = "pass" if diverges else "fail"
    else:
        m["slope"] = float("nan")
        rep.verdict = "fail"
    rep.quadrature = scheme.to_dict()
    rep.reproducibility = _reproducibility(spec)
    return rep


def _lemma1(spec: ExperimentSpec, threads) -> VerificationReport:
    sp = SpaceParams(spec.p, spec.weight, spec.scheme())
    m = spec.m if spec.m is not None else [max(0.0, math.ceil(regularity_indices(w)[0] - 1))
                                           for w in spec.weight.factors]
    m = [float(x) for x in np.broadcast_to(np.atleast_1d(m), (spec.n,))]
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(spec.seed)))
    radii = (0.0, 0.5, 0.9)
    angles = (0.0, 2.0)
    z_samples = [tuple([rad * np.exp(1j * t)] * spec.n) for rad in radii for t in angles]
    fam = []
    for d in range(1, 11):
        if spec.n == 1:
            fam.append(PolySeries.random((d,), rng))
        else:
            fam.append(PolySeries.product(*[PolySeries.random((d,), rng) for _ in range(spec.n)]))

    def one(f):
        return lemma1_ratio(f, m, z_samples, sp)

    subs = _pmap(one, fam, threads)
    rep = VerificationReport(target="L1", mode=subs[0].mode)
    sups = []
    for d, sub in enumerate(subs, start=1):
        sups.append(sub.metrics["sup"])
        rep.add_row(d, "sup_ratio", sub.metrics["sup"], max(r["est_error"] for r in sub.rows))
    spread = max(sups) / min(sups)
    rep.metrics.update(m=m, sups=sups, spread=spread,
                       hypothesis=subs[0].metrics["hypothesis m_j >= alpha_w - 1"])
    stable = spread <= 4.0
    # violated mode reports whether C blows up across the family
    rep.metrics["blow_up"] = not stable
    rep.verdict = "pass" if (stable if rep.mode == "sufficiency" else not stable) else "fail"
    return rep


def run_lemma_or_prop(spec: ExperimentSpec, threads: int | None = None) -> VerificationReport:
    if spec.target not in LEMMA_TARGETS:
        raise InvalidSpecError("run_lemma_or_prop needs target L1, L2 or P1")
    if spec.target == "L1":
        rep = _lemma1(spec, threads)
    elif spec.target == "L2":
        rep = lemma2_ratio(spec.weight.factors[0], spec.a, spec.b, list(spec.z_moduli),
                           QuadratureScheme.from_config(1, spec.quadrature))
    else:
        part = build_partition(spec.n, spec.K)
        rep = check_proposition1(part, spec.samples_per_cell)
        rep.metrics["covering_multiplicity"] = covering_multiplicity(part)
    rep.reproducibility = _reproducibility(spec)
    return rep


def run(spec: ExperimentSpec, threads: int | None = None) -> VerificationReport:
    """Dispatch on target and mode (mode defaults from the index condition)."""
    if spec.target in LEMMA_TARGETS:
        return run_lemma_or_prop(spec, threads)
    mode = spec.mode or ("sufficiency" if spec.hypothesis_holds() else "necessity")
    if mode == "sufficiency":
        return run_sufficiency(spec, threads)
    return run_necessity(spec, threads)

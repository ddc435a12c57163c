"""
Monte-Carlo benchmarks: shaped vs unshaped trials, CDFs over group size,
alpha sweeps and per-symbol diagnostic profiles.

Every trial draws its payload from ``default_rng([seed, 0, trial])`` so results
do not depend on batching or execution order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator

import numpy as np
from scipy.stats import ks_2samp

from . import ofdm
from .report import provenance, read_csv, write_csv
from .shaper import Payload, ShapingConfig, seeded_payloads, shape_batch, unshaped_symbols, with_baselines

DEFAULT_N_GRID = (32, 64, 128, 256, 512, 1024)
DEFAULT_CONSTELLATIONS = ("16qam", "256qam")
DEFAULT_ALPHA_GRID = tuple(np.round(np.linspace(0.0, 1.0, 11), 10))
Z95 = 1.959963984540054

TRIAL_COLUMNS = [
    "trial", "isl_unshaped", "isl_shaped", "isl_ratio", "papr_unshaped", "papr_shaped", "papr_ratio",
    "isl_unshaped_db", "isl_shaped_db", "papr_unshaped_db", "papr_shaped_db",
]


def improvement_ratio(unshaped, shaped):
    """(unshaped - shaped) / unshaped."""
    unshaped = np.asarray(unshaped, dtype=float)
    return (unshaped - np.asarray(shaped, dtype=float)) / unshaped


def default_shaper(payload: Payload, cfg: ShapingConfig) -> np.ndarray:
    return shape_batch(payload, cfg).X


@dataclass(frozen=True)
class TrialMetrics:
    trial: int
    seed: int
    config_hash: str
    isl_unshaped: float
    isl_shaped: float
    papr_unshaped: float
    papr_shaped: float
    isl_ratio: float
    papr_ratio: float


@dataclass(frozen=True, eq=False)
class TrialSet:
    """Column-wise container of trial metrics; iterates as :class:`TrialMetrics`."""

    cfg: ShapingConfig
    seed: int
    trial: np.ndarray
    isl_unshaped: np.ndarray
    isl_shaped: np.ndarray
    papr_unshaped: np.ndarray
    papr_shaped: np.ndarray
    X_shaped: np.ndarray | None = field(default=None, repr=False)
    X_unshaped: np.ndarray | None = field(default=None, repr=False)

    @property
    def isl_ratio(self) -> np.ndarray:
        return improvement_ratio(self.isl_unshaped, self.isl_shaped)

    @property
    def papr_ratio(self) -> np.ndarray:
        return improvement_ratio(self.papr_unshaped, self.papr_shaped)

    def __len__(self) -> int:
        return self.trial.size

    def __iter__(self) -> Iterator[TrialMetrics]:
        h = self.cfg.digest()
        ir, pr = self.isl_ratio, self.papr_ratio
        for i in range(len(self)):
            yield TrialMetrics(int(self.trial[i]), self.seed, h, float(self.isl_unshaped[i]),
                               float(self.isl_shaped[i]), float(self.papr_unshaped[i]),
                               float(self.papr_shaped[i]), float(ir[i]), float(pr[i]))

    def summary(self) -> dict:
        ir, pr = self.isl_ratio, self.papr_ratio
        return {
            "n_trials": len(self),
            "isl_unshaped_mean": float(self.isl_unshaped.mean()),
            "isl_shaped_mean": float(self.isl_shaped.mean()),
            "isl_ratio_mean": float(ir.mean()),
            "isl_ratio_ci95": half_width(ir),
            "papr_unshaped_mean": float(self.papr_unshaped.mean()),
            "papr_shaped_mean": float(self.papr_shaped.mean()),
            "papr_ratio_mean": float(pr.mean()),
            "papr_ratio_ci95": half_width(pr),
        }

    def rows(self):
        ir, pr = self.isl_ratio, self.papr_ratio
        for i in range(len(self)):
            yield (int(self.trial[i]), self.isl_unshaped[i], self.isl_shaped[i], ir[i],
                   self.papr_unshaped[i], self.papr_shaped[i], pr[i],
                   ofdm.to_db(self.isl_unshaped[i]), ofdm.to_db(self.isl_shaped[i]),
                   ofdm.to_db(self.papr_unshaped[i]), ofdm.to_db(self.papr_shaped[i]))

    def to_csv(self, path):
        meta = provenance(self.cfg.digest(), self.seed, config=self.cfg.to_dict())
        return write_csv(path, TRIAL_COLUMNS, self.rows(), meta)


def half_width(values) -> float:
    """95% normal-approximation confidence half-width of the mean."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float("nan")
    return float(Z95 * values.std(ddof=1) / np.sqrt(values.size))


def run_trials(cfg: ShapingConfig, n_trials: int, seed: int = 0, chunk: int = 1000,
               shaper: Callable[[Payload, ShapingConfig], np.ndarray] = default_shaper,
               keep_symbols: bool = False) -> TrialSet:
    """Shape ``n_trials`` random symbols and score them against the unshaped (y = 0) symbols."""
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    cfg = with_baselines(cfg, seed=seed) if any(cfg.needed_baselines()) else cfg
    out = {k: [] for k in ("isl_u", "isl_s", "papr_u", "papr_s", "Xs", "Xu")}
    for c0 in range(0, n_trials, chunk):
        trials = np.arange(c0, min(c0 + chunk, n_trials))
        payload = seeded_payloads(cfg, seed, trials)
        Xu = unshaped_symbols(payload, cfg)
        Xs = shaper(payload, cfg)
        xu, xs = ofdm.synthesize_time(Xu), ofdm.synthesize_time(Xs)
        out["isl_u"].append(np.atleast_1d(ofdm.isl(xu)))
        out["isl_s"].append(np.atleast_1d(ofdm.isl(xs)))
        out["papr_u"].append(np.atleast_1d(ofdm.papr(xu)))
        out["papr_s"].append(np.atleast_1d(ofdm.papr(xs)))
        if keep_symbols:
            out["Xs"].append(Xs)
            out["Xu"].append(Xu)
    cat = {k: np.concatenate(v) if v else None for k, v in out.items()}
    return TrialSet(cfg, seed, np.arange(n_trials), cat["isl_u"], cat["isl_s"], cat["papr_u"], cat["papr_s"],
                    cat["Xs"], cat["Xu"])


def run_matrix(base: ShapingConfig, n_grid=DEFAULT_N_GRID, constellations=DEFAULT_CONSTELLATIONS,
               n_trials: int = 1000, seed: int = 0) -> list[dict]:
    """Summary rows of :func:`run_trials` over subcarrier counts and constellations."""
    rows = []
    for name in constellations:
        for n in n_grid:
            cfg = base.replace(n_subcarriers=int(n), constellation=name, baselines=None)
            row = {"n_subcarriers": int(n), "constellation": cfg.constellation.name, "isl_metric": cfg.isl_metric}
            row.update(run_trials(cfg, n_trials, seed).summary())
            rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# CDFs


def empirical_cdf(values) -> tuple[np.ndarray, np.ndarray]:
    v = np.sort(np.asarray(values, dtype=float))
    return v, np.arange(1, v.size + 1) / v.size


def ks_direction(a, b) -> dict:
    """Two-sample KS statistic plus its signed parts.

    ``d_plus`` = max(F_a - F_b) > 0 means ``a`` tends to be smaller than ``b``.
    """
    plus = ks_2samp(a, b, alternative="greater")
    minus = ks_2samp(a, b, alternative="less")
    d_plus, d_minus = float(plus.statistic), float(minus.statistic)
    return {"ks": max(d_plus, d_minus), "d_plus": d_plus, "d_minus": d_minus,
            "p_plus": float(plus.pvalue), "p_minus": float(minus.pvalue),
            "a_smaller": d_plus > d_minus, "median_shift": float(np.median(b) - np.median(a))}


@dataclass(frozen=True, eq=False)
class CdfResult:
    labels: list
    isl: dict  # label -> sorted values
    papr: dict
    ordering: list  # comparisons of consecutive variants
    seed: int

    def rows(self):
        for label in self.labels:
            for metric, table in (("isl", self.isl), ("papr", self.papr)):
                v, f = empirical_cdf(table[label])
                for value, prob in zip(v, f):
                    yield label, metric, value, ofdm.to_db(value), prob

    def to_csv(self, path, config_hash=""):
        meta = provenance(config_hash, self.seed, ordering=self.ordering)
        return write_csv(path, ["variant", "metric", "value", "value_db", "cdf"], self.rows(), meta)


def run_cdf(variants, n_trials: int, seed: int = 0) -> CdfResult:
    """Empirical ISL/PAPR CDFs of shaped symbols for configs differing only in group size."""
    variants = list(variants)
    if not variants:
        raise ValueError("need at least one variant")
    n, const = variants[0].n_subcarriers, variants[0].constellation.name
    if any(v.n_subcarriers != n or v.constellation.name != const for v in variants):
        raise ValueError("CDF variants must share subcarrier count and constellation")
    labels, isl, papr = [], {}, {}
    for v in variants:
        label = f"m_s={v.m_s}"
        ts = run_trials(v, n_trials, seed)
        labels.append(label)
        isl[label], papr[label] = np.sort(ts.isl_shaped), np.sort(ts.papr_shaped)
    ordering = []
    for a, b in zip(labels, labels[1:]):
        ordering.append({"a": a, "b": b, "isl": ks_direction(isl[a], isl[b]), "papr": ks_direction(papr[a], papr[b])})
    return CdfResult(labels, isl, papr, ordering, seed)


# ---------------------------------------------------------------------------
# Alpha sweep


@dataclass(frozen=True, eq=False)
class SweepResult:
    alpha: np.ndarray
    isl_ratio: np.ndarray
    isl_ci: np.ndarray
    papr_ratio: np.ndarray
    papr_ci: np.ndarray
    n_trials: int
    seed: int
    config_hash: str = ""

    def rows(self):
        for i, a in enumerate(self.alpha):
            yield a, self.isl_ratio[i], self.isl_ci[i], self.papr_ratio[i], self.papr_ci[i], self.n_trials

    def to_csv(self, path):
        cols = ["alpha", "isl_ratio", "isl_ratio_ci95", "papr_ratio", "papr_ratio_ci95", "n_trials"]
        return write_csv(path, cols, self.rows(), provenance(self.config_hash, self.seed))


def sweep_alpha(cfg: ShapingConfig, alpha_grid=DEFAULT_ALPHA_GRID, n_trials: int = 1000, seed: int = 0) -> SweepResult:
    """Mean improvement ratios per alpha; every alpha sees the same payloads."""
    grid = np.sort(np.asarray(alpha_grid, dtype=float))
    if grid.size == 0 or grid[0] < 0 or grid[-1] > 1:
        raise ValueError("alpha grid must be non-empty and within [0, 1]")
    base = with_baselines(cfg.replace(baselines=None), seed=seed) if cfg.baselines is None else cfg
    res = {k: [] for k in ("ir", "ic", "pr", "pc")}
    for a in grid:
        ts = run_trials(base.replace(alpha=float(a)), n_trials, seed)
        res["ir"].append(ts.isl_ratio.mean())
        res["ic"].append(half_width(ts.isl_ratio))
        res["pr"].append(ts.papr_ratio.mean())
        res["pc"].append(half_width(ts.papr_ratio))
    return SweepResult(grid, *(np.array(res[k]) for k in ("ir", "ic", "pr", "pc")), n_trials, seed, base.digest())


# ---------------------------------------------------------------------------
# Profiles


@dataclass(frozen=True, eq=False)
class ProfileBundle:
    X_shaped: np.ndarray
    X_unshaped: np.ndarray

    def __post_init__(self):
        if np.shape(self.X_shaped) != np.shape(self.X_unshaped):
            raise ValueError("shaped and unshaped symbols differ in length")

    def metrics(self) -> dict:
        xs, xu = ofdm.synthesize_time(self.X_shaped), ofdm.synthesize_time(self.X_unshaped)
        return {"isl_shaped": ofdm.isl(xs), "isl_unshaped": ofdm.isl(xu),
                "papr_shaped": ofdm.papr(xs), "papr_unshaped": ofdm.papr(xu)}

    def subcarrier_table(self):
        ps, pu = np.abs(self.X_shaped) ** 2, np.abs(self.X_unshaped) ** 2
        return ["k", "power_shaped", "power_unshaped"], list(zip(range(ps.size), ps, pu))

    def autocorr_table(self):
        rows = []
        rs = ofdm.aperiodic_autocorr(ofdm.synthesize_time(self.X_shaped))
        ru = ofdm.aperiodic_autocorr(ofdm.synthesize_time(self.X_unshaped))
        ds = ofdm.to_db(np.abs(rs) ** 2 / np.abs(rs[0]) ** 2)
        du = ofdm.to_db(np.abs(ru) ** 2 / np.abs(ru[0]) ** 2)
        for lag in range(rs.size):
            rows.append((lag, ds[lag], du[lag]))
        return ["lag", "shaped_db", "unshaped_db"], rows

    def time_table(self):
        ps = np.abs(ofdm.synthesize_time(self.X_shaped)) ** 2
        pu = np.abs(ofdm.synthesize_time(self.X_unshaped)) ** 2
        return ["n", "power_shaped", "power_unshaped"], list(zip(range(ps.size), ps, pu))

    def symbol_table(self):
        s, u = self.X_shaped, self.X_unshaped
        return ["k", "re_shaped", "im_shaped", "re_unshaped", "im_unshaped"], list(
            zip(range(s.size), s.real, s.imag, u.real, u.imag))

    def write(self, directory, meta: dict | None = None) -> dict[str, Path]:
        directory = Path(directory)
        meta = dict(meta or {})
        meta["metrics"] = self.metrics()
        paths = {}
        for name, table in (("subcarrier", self.subcarrier_table()), ("autocorr", self.autocorr_table()),
                            ("time", self.time_table()), ("symbols", self.symbol_table())):
            paths[name] = write_csv(directory / f"profile_{name}.csv", table[0], table[1], meta)
        return paths

    @classmethod
    def load(cls, directory) -> "ProfileBundle":
        _, cols = read_csv(Path(directory) / "profile_symbols.csv")
        return cls(cols["re_shaped"] + 1j * cols["im_shaped"], cols["re_unshaped"] + 1j * cols["im_unshaped"])


def export_profiles(shaped, unshaped) -> ProfileBundle:
    """Diagnostic tables for one shaped/unshaped pair of subcarrier vectors."""
    return ProfileBundle(np.asarray(shaped, dtype=np.complex128), np.asarray(unshaped, dtype=np.complex128))

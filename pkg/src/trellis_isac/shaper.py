"""
Viterbi trellis shaping of OFDM symbols.

Information bits ``s`` are expanded by the inverse syndrome former into MSB
labels ``z``; the search then walks the trellis of the shaping code from the
all-zero state and picks the codeword ``y`` whose transmitted labels
``z xor y`` minimise the configured cost. The receiver strips ``y`` with the
syndrome former, so ``s`` survives any choice of ``y``.

The engine runs forward with one survivor per state and processes a whole
batch of independent symbols at once. With the PSD-variance metric every
branch cost is local and the search is exact; the aperiodic-ISL and PAPR
metrics depend on the decided prefix, so one-survivor-per-state pruning makes
them a heuristic.

Cost units. Increments add up to whole-symbol quantities:

* PSD variance: ``sum_k (|X_k|^2 - P_t/N_s)^2`` (N_s times the variance),
* aperiodic ISL: the normalized ISL ``sum_{l>=1} |r(l)|^2 / r(0)^2`` of
  the time signal,
* PAPR proxy: ``sum_{l>=1} |R(l)|^2`` of the subcarrier sequence,
* thresholded PAPR: a +-P_t/N_s penalty per trellis step.

Mixed objectives (0 < alpha < 1) divide each part by an unshaped baseline
expressed in the same units; the thresholded part is divided by P_t. At
alpha = 0 or 1 only one raw term is left and no baseline is needed.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import ofdm
from .constellation import MultidimGroup, PartitionedConstellation, bits_to_int, get_constellation, int_to_bits
from .errors import ConfigError, InvalidArgumentError
from .gf2 import ShapingCode, conv_encode, get_code, inverse_syndrome

PAPR_MODES = ("incremental", "thresholded", "combined")
DEFAULT_N0 = 256
DEFAULT_EPSILON = 3.5
DEFAULT_BASELINE_TRIALS = 1000


@dataclass(frozen=True, eq=False)
class ShapingConfig:
    n_subcarriers: int
    constellation: PartitionedConstellation = field(default_factory=lambda: get_constellation("16qam"))
    code: ShapingCode = field(default_factory=lambda: get_code("5,7"))
    m_s: int = 1
    alpha: float = 1.0
    n0: int = DEFAULT_N0
    epsilon: float = DEFAULT_EPSILON
    papr_mode: str = "incremental"
    transmit_power: float | None = None
    baselines: tuple[float, float] | None = None
    amplitudes: tuple[tuple[float, ...], ...] | None = None
    group: MultidimGroup = field(init=False, repr=False)

    def __post_init__(self):
        n = self.n_subcarriers
        if isinstance(self.constellation, str):
            object.__setattr__(self, "constellation", get_constellation(self.constellation))
        if isinstance(self.code, str):
            object.__setattr__(self, "code", get_code(self.code))
        if n < 2:
            raise ConfigError("need at least two subcarriers")
        if self.m_s < 1 or n % self.m_s:
            raise ConfigError(f"group size {self.m_s} must divide {n} subcarriers")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.n0 < 2:
            raise ConfigError("regime threshold n0 must be at least 2")
        if self.papr_mode not in PAPR_MODES:
            raise ConfigError(f"papr_mode must be one of {PAPR_MODES}")
        if self.code.n_outputs != self.constellation.n_msb:
            raise ConfigError(
                f"code emits {self.code.n_outputs} bits per step but the constellation has "
                f"{self.constellation.n_msb} MSBs"
            )
        if self.n_groups < self.code.memory + 1:
            raise ConfigError(f"{self.n_groups} trellis steps cannot traverse a memory-{self.code.memory} code")
        if self.transmit_power is not None and self.transmit_power <= 0:
            raise ConfigError("transmit power must be positive")
        if self.baselines is not None:
            vi, vp = (float(v) for v in self.baselines)
            if vi < 0 or vp < 0 or not np.isfinite(vi + vp):
                raise ConfigError("baselines must be finite and nonnegative")
            object.__setattr__(self, "baselines", (vi, vp))
        amps = None if self.amplitudes is None else np.asarray(self.amplitudes, dtype=float)
        object.__setattr__(self, "group", MultidimGroup(self.constellation, self.m_s, amps))

    @property
    def n_groups(self) -> int:
        return self.n_subcarriers // self.m_s

    @property
    def power(self) -> float:
        """Total transmit power P_t (sum of E|X_k|^2)."""
        return float(self.n_subcarriers if self.transmit_power is None else self.transmit_power)

    @property
    def target_power(self) -> float:
        return self.power / self.n_subcarriers

    @property
    def isl_metric(self) -> str:
        return "variance" if self.n_subcarriers >= self.n0 else "aperiodic"

    @property
    def n_syndrome_bits(self) -> int:
        return self.code.n_outputs - 1

    @property
    def info_bits_per_subcarrier(self) -> float:
        per_group = self.n_syndrome_bits + (self.m_s - 1) * self.constellation.n_msb
        return per_group / self.m_s + self.constellation.n_lsb

    @property
    def rate(self) -> float:
        return self.info_bits_per_subcarrier / self.constellation.bits_per_symbol

    def replace(self, **changes) -> "ShapingConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "n_subcarriers": self.n_subcarriers,
            "constellation": self.constellation.name,
            "code": self.code.name or [str(g) for g in self.code.generators],
            "inverse_syndrome_former": [[str(p) for p in row] for row in self.code.inv_syndrome_former],
            "m_s": self.m_s,
            "alpha": self.alpha,
            "n0": self.n0,
            "epsilon": self.epsilon,
            "papr_mode": self.papr_mode,
            "transmit_power": self.power,
            "baselines": None if self.baselines is None else list(self.baselines),
            "amplitudes": None if self.amplitudes is None else [list(r) for r in self.amplitudes],
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def needed_baselines(self) -> tuple[bool, bool]:
        """Which of (V_I, V_p) the configured objective divides by."""
        if self.alpha in (0.0, 1.0):
            return False, self.alpha == 0.0 and self.papr_mode == "combined"
        return True, self.papr_mode != "thresholded"

    def check_baselines(self) -> None:
        need_i, need_p = self.needed_baselines()
        if not (need_i or need_p):
            return
        if self.baselines is None:
            raise ConfigError(f"alpha={self.alpha} mixes objectives and needs unshaped baselines")
        vi, vp = self.baselines
        # values at rounding level come from constant-power inputs and count as zero
        tiny_i = 1e-12 * self.n_subcarriers * self.target_power**2
        tiny_p = 1e-12 * (self.n_subcarriers * self.target_power) ** 2
        if (need_i and vi <= tiny_i) or (need_p and vp <= tiny_p):
            raise ConfigError(f"baselines must be positive for normalization, got {self.baselines}")


# ---------------------------------------------------------------------------
# Single-path reference state and the per-step cost terms


@dataclass(frozen=True, eq=False)
class SurvivorState:
    """Decided prefix X_0..X_{t-1} of one path with its running aggregates.

    ``x`` is the partial synthesis N^-1/2 sum_{k<t} X_k e^{j2pi kn/N} over the
    full symbol length, ``r`` its aperiodic autocorrelation and ``R`` the
    autocorrelation of the decided subcarriers. ``mu`` is the normalized ISL
    of ``x``, taken as zero while at most one subcarrier is decided.
    """

    symbols: np.ndarray
    n_decided: int
    x: np.ndarray
    r: np.ndarray
    R: np.ndarray
    mu: float = 0.0
    cost: float = 0.0

    @classmethod
    def empty(cls, n_subcarriers: int) -> "SurvivorState":
        z = np.zeros(n_subcarriers, dtype=np.complex128)
        return cls(z, 0, z, z, z)

    @property
    def n_subcarriers(self) -> int:
        return self.symbols.size

    def extend(self, X_t: complex, cost_increment: float = 0.0) -> "SurvivorState":
        """New state with X_t appended, aggregates recomputed from scratch."""
        n, k = self.n_subcarriers, self.n_decided
        if k >= n:
            raise InvalidArgumentError("all subcarriers already decided")
        symbols = self.symbols.copy()
        symbols[k] = X_t
        tone = np.exp(2j * np.pi * k * np.arange(n) / n) / np.sqrt(n)
        x = self.x + X_t * tone
        r = ofdm.aperiodic_autocorr(x)
        mu = ofdm.isl(x) if k + 1 >= 2 else 0.0
        return SurvivorState(symbols, k + 1, x, r, ofdm.freq_autocorr(symbols), mu, self.cost + cost_increment)


def cost_isl_variance_increment(X_t, cfg: ShapingConfig):
    return (np.abs(X_t) ** 2 - cfg.target_power) ** 2


def cost_isl_aperiodic_increment(survivor: SurvivorState, X_t: complex) -> float:
    """mu(t+1) - mu(t): partial ISL the next subcarrier adds."""
    return survivor.extend(X_t).mu - survivor.mu


def cost_papr_increment(survivor: SurvivorState, X_t: complex) -> float:
    """Growth of sum_{m>=1} |R(m)|^2 when X_t joins the decided prefix.

    With delta_m = X_t conj(X_{t-m}):
    sum_{m=1}^{t-1} 2 Re{conj(R_m) delta_m} + sum_{m=1}^{t} |delta_m|^2.
    """
    t = survivor.n_decided
    if t == 0:
        return 0.0
    m = np.arange(1, t + 1)
    delta = X_t * np.conj(survivor.symbols[t - m])
    cross = 2.0 * np.sum(np.real(np.conj(survivor.R[1:t]) * delta[: t - 1]))
    return float(cross + np.sum(np.abs(delta) ** 2))


def cost_papr_thresholded(R_k, cfg: ShapingConfig):
    """+P_t/N_s when the step's PAPR statistic exceeds epsilon, else -P_t/N_s."""
    return np.where(np.asarray(R_k) > cfg.epsilon, cfg.target_power, -cfg.target_power)[()]


def cost_joint_increment(delta_isl, delta_papr, cfg: ShapingConfig):
    """alpha * dI / V_I + (1 - alpha) * dP / V_p with the configured baselines."""
    if cfg.baselines is None or min(cfg.baselines) <= 0:
        raise ConfigError(f"joint cost needs positive baselines, got {cfg.baselines}")
    vi, vp = cfg.baselines
    return cfg.alpha * delta_isl / vi + (1.0 - cfg.alpha) * delta_papr / vp


# ---------------------------------------------------------------------------
# Whole-symbol metrics in the same units as the accumulated costs


def isl_cost(X, cfg: ShapingConfig):
    """From-scratch ISL-part cost of subcarrier vectors (..., N)."""
    X = np.asarray(X)
    if cfg.isl_metric == "variance":
        return np.sum((np.abs(X) ** 2 - cfg.target_power) ** 2, axis=-1)[()]
    return ofdm.isl(ofdm.synthesize_time(X))


def psd_variance(X, cfg: ShapingConfig):
    """(1/N_s) sum_k (|X_k|^2 - P_t/N_s)^2."""
    X = np.asarray(X)
    return np.mean((np.abs(X) ** 2 - cfg.target_power) ** 2, axis=-1)[()]


def papr_cost(X):
    """sum_{l>=1} |R(l)|^2 of subcarrier vectors (..., N)."""
    return ofdm.sidelobe_energy(ofdm.freq_autocorr(X))


def threshold_cost(X, cfg: ShapingConfig):
    """Replays the thresholded PAPR penalty over the trellis steps of X."""
    X = np.asarray(X, dtype=np.complex128)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    n, ms = cfg.n_subcarriers, cfg.m_s
    partial = np.zeros_like(X)
    total = np.zeros(X.shape[0])
    for g in range(cfg.n_groups):
        for i in range(ms):
            k = g * ms + i
            partial = partial + X[:, k, None] * np.exp(2j * np.pi * k * np.arange(n) / n) / np.sqrt(n)
        p = np.abs(partial) ** 2
        total += cost_papr_thresholded(p.max(-1) / p.mean(-1), cfg)
    return float(total[0]) if single else total


# ---------------------------------------------------------------------------
# Payloads and results


@dataclass(frozen=True, eq=False)
class Payload:
    """Information carried by a batch of symbols.

    ``s``: (B, G, M-1) syndrome bits; ``lsb``: (B, N) LSB labels;
    ``raw_msb``: (B, G, m_s-1) raw MSB labels of the non-leading group members.
    """

    s: np.ndarray
    lsb: np.ndarray
    raw_msb: np.ndarray

    @property
    def batch(self) -> int:
        return self.s.shape[0]

    def __getitem__(self, idx) -> "Payload":
        return Payload(self.s[idx], self.lsb[idx], self.raw_msb[idx])


def random_payload(cfg: ShapingConfig, rng: np.random.Generator, batch: int) -> Payload:
    c = cfg.constellation
    s = rng.integers(0, 2, size=(batch, cfg.n_groups, cfg.n_syndrome_bits), dtype=np.uint8)
    lsb = rng.integers(0, 1 << c.n_lsb, size=(batch, cfg.n_subcarriers))
    raw = rng.integers(0, c.n_subsets, size=(batch, cfg.n_groups, cfg.m_s - 1))
    return Payload(s, lsb, raw)


def seeded_payloads(cfg: ShapingConfig, seed: int, trials, stream: int = 0) -> Payload:
    """Payload rows drawn from ``default_rng([seed, stream, trial])``, one per trial index,
    so a trial's data does not depend on how trials are batched."""
    parts = [random_payload(cfg, np.random.default_rng([seed, stream, int(t)]), 1) for t in trials]
    return Payload(*(np.concatenate([getattr(q, f) for q in parts]) for f in ("s", "lsb", "raw_msb")))


def _check_payload(p: Payload, cfg: ShapingConfig) -> Payload:
    b = p.s.shape[0]
    c = cfg.constellation
    s = np.asarray(p.s, dtype=np.uint8)
    if s.ndim == 2 and cfg.n_syndrome_bits == 1:
        s = s[..., None]
    lsb = np.asarray(p.lsb, dtype=np.int64)
    raw = np.asarray(p.raw_msb, dtype=np.int64)
    if cfg.m_s == 1:
        raw = np.zeros((b, cfg.n_groups, 0), dtype=np.int64)
    if s.shape != (b, cfg.n_groups, cfg.n_syndrome_bits):
        raise InvalidArgumentError(f"expected {cfg.n_groups * cfg.n_syndrome_bits} syndrome bits per symbol, got shape {s.shape[1:]}")
    if lsb.shape != (b, cfg.n_subcarriers):
        raise InvalidArgumentError(f"expected {cfg.n_subcarriers} LSB labels per symbol, got shape {lsb.shape[1:]}")
    if raw.shape != (b, cfg.n_groups, cfg.m_s - 1):
        raise InvalidArgumentError(f"groups of {cfg.m_s} need raw MSB labels of shape {(b, cfg.n_groups, cfg.m_s - 1)}")
    if np.any(s > 1) or lsb.min(initial=0) < 0 or lsb.max(initial=0) >= 1 << c.n_lsb:
        raise InvalidArgumentError("bit or label out of range")
    if raw.size and (raw.min() < 0 or raw.max() >= c.n_subsets):
        raise InvalidArgumentError("raw MSB label out of range")
    return Payload(s, lsb, raw)


def group_labels(w, raw_msb) -> np.ndarray:
    """Per-subcarrier MSB labels from group labels ``w`` (..., G) and raw labels (..., G, m_s-1)."""
    w = np.asarray(w, dtype=np.int64)
    raw = np.asarray(raw_msb, dtype=np.int64)
    labels = np.concatenate([w[..., None], w[..., None] ^ raw], axis=-1)
    return labels.reshape(labels.shape[:-2] + (-1,))


def unshaped_symbols(payload: Payload, cfg: ShapingConfig) -> np.ndarray:
    """Symbols sent with the all-zero codeword (no shaping)."""
    p = _check_payload(payload, cfg)
    z = bits_to_int(inverse_syndrome(p.s, cfg.code))
    return cfg.group.map(group_labels(z, p.raw_msb), p.lsb)


@dataclass(frozen=True, eq=False)
class ShapedBatch:
    X: np.ndarray  # (B, N) shaped subcarriers
    msb: np.ndarray  # (B, N) transmitted MSB labels
    lsb: np.ndarray  # (B, N)
    z: np.ndarray  # (B, G, M) expanded syndrome bits
    y: np.ndarray  # (B, G, M) chosen codeword
    u: np.ndarray  # (B, G) code input bits of y
    s: np.ndarray  # (B, G, M-1)
    raw_msb: np.ndarray
    cost: np.ndarray  # (B,)
    isl_part: np.ndarray  # (B,) raw accumulated ISL increments
    papr_part: np.ndarray  # (B,) raw accumulated incremental-PAPR increments
    threshold_part: np.ndarray  # (B,) accumulated thresholded penalties

    def __len__(self) -> int:
        return self.X.shape[0]

    def __getitem__(self, i: int) -> "ShapedSymbol":
        return ShapedSymbol(
            self.X[i], self.msb[i], self.lsb[i], self.z[i], self.y[i], self.u[i], self.s[i],
            self.raw_msb[i], float(self.cost[i]), float(self.isl_part[i]), float(self.papr_part[i]),
            float(self.threshold_part[i]),
        )


@dataclass(frozen=True, eq=False)
class ShapedSymbol:
    X: np.ndarray
    msb: np.ndarray
    lsb: np.ndarray
    z: np.ndarray
    y: np.ndarray
    u: np.ndarray
    s: np.ndarray
    raw_msb: np.ndarray
    cost: float
    isl_part: float
    papr_part: float
    threshold_part: float

    @property
    def x(self) -> np.ndarray:
        return ofdm.synthesize_time(self.X)


# ---------------------------------------------------------------------------
# Engine


def _combine(cfg: ShapingConfig, d_isl, d_p, d_thr):
    a = cfg.alpha
    if a == 1.0:
        return d_isl
    if a == 0.0 and cfg.papr_mode == "incremental":
        return d_p
    if a == 0.0 and cfg.papr_mode == "thresholded":
        return d_thr
    vi, vp = cfg.baselines
    papr_term = 0.0
    if cfg.papr_mode != "thresholded":
        papr_term = papr_term + d_p / vp
    if cfg.papr_mode != "incremental":
        papr_term = papr_term + d_thr / cfg.power
    isl_term = a * d_isl / vi if a > 0 else 0.0
    return isl_term + (1.0 - a) * papr_term


def shape_batch(payload: Payload, cfg: ShapingConfig) -> ShapedBatch:
    """Shape a batch of symbols; see the module docstring for the cost."""
    cfg.check_baselines()
    p = _check_payload(payload, cfg)
    B, N, G, ms = p.batch, cfg.n_subcarriers, cfg.n_groups, cfg.m_s
    tr = cfg.code.trellis
    S = tr.n_states
    pred = tr.pred
    ylab = bits_to_int(tr.pred_output)  # (S, 2)
    z = inverse_syndrome(p.s, cfg.code)
    zl = bits_to_int(z)  # (B, G)
    group, target = cfg.group, cfg.target_power

    use_isl = cfg.alpha > 0.0
    use_var = use_isl and cfg.isl_metric == "variance"
    use_ap = use_isl and not use_var
    use_dp = cfg.alpha < 1.0 and cfg.papr_mode != "thresholded"
    use_thr = cfg.alpha < 1.0 and cfg.papr_mode != "incremental"
    need_x = use_ap or use_thr

    cost = np.full((B, S), np.inf)
    cost[:, 0] = 0.0
    acc_isl = np.zeros((B, S))
    acc_p = np.zeros((B, S))
    acc_thr = np.zeros((B, S))
    if need_x:
        x = np.zeros((B, S, N), dtype=np.complex128)
    if use_ap:
        r = np.zeros((B, S, N), dtype=np.complex128)
        mu = np.zeros((B, S))
    if use_dp:
        Xs = np.zeros((B, S, N), dtype=np.complex128)
        R = np.zeros((B, S, N), dtype=np.complex128)
    decisions = np.zeros((G, B, S), dtype=np.int8)
    n_idx = np.arange(N)
    rows = np.arange(B)[:, None]

    for g in range(G):
        w = zl[:, g, None, None] ^ ylab[None]  # (B, S, 2)
        d_isl = np.zeros((B, S, 2))
        d_p = np.zeros((B, S, 2))
        d_thr = np.zeros((B, S, 2))
        if need_x:
            cx = x[:, pred]  # (B, S, 2, N)
        if use_ap:
            cr = r[:, pred]
        if use_dp:
            cX = Xs[:, pred]
            cR = R[:, pred]
        for i in range(ms):
            k = g * ms + i
            msb = w if i == 0 else w ^ p.raw_msb[:, g, i - 1, None, None]
            Xk = group.map_at(i, msb, p.lsb[:, k, None, None])  # (B, S, 2)
            if use_var:
                d_isl += (np.abs(Xk) ** 2 - target) ** 2
            if need_x:
                ph = np.exp(2j * np.pi * k * n_idx / N)
                e = ph / np.sqrt(N)
                if use_ap:
                    pre = np.cumsum(np.conj(cx) * e, axis=-1)[..., ::-1]
                    suf = np.cumsum((np.conj(e) * cx)[..., ::-1], axis=-1)[..., ::-1]
                    Xe = Xk[..., None]
                    cr = cr + ph * (Xe * pre + np.conj(Xe) * suf + (np.abs(Xe) ** 2) * ((N - n_idx) / N))
                cx = cx + Xk[..., None] * e
            if use_dp and k > 0:
                m = np.arange(1, k + 1)
                delta = Xk[..., None] * np.conj(cX[..., k - m])
                d_p += np.sum(2.0 * np.real(np.conj(cR[..., 1 : k + 1]) * delta) + np.abs(delta) ** 2, axis=-1)
                cR[..., 1 : k + 1] += delta
            if use_dp:
                cX[..., k] = Xk
        decided = (g + 1) * ms
        if use_ap:
            if decided >= 2:
                mu_new = np.sum(np.abs(cr[..., 1:]) ** 2, axis=-1) / np.abs(cr[..., 0]) ** 2
            else:
                mu_new = np.zeros((B, S, 2))
            d_isl = mu_new - mu[:, pred]
        if use_thr:
            pw = np.abs(cx) ** 2
            d_thr = cost_papr_thresholded(pw.max(-1) / pw.mean(-1), cfg)
        total = cost[:, pred] + _combine(cfg, d_isl, d_p, d_thr)
        j = np.argmin(total, axis=-1)  # ties -> lower predecessor state
        decisions[g] = j
        pick = j[..., None]
        cost = np.take_along_axis(total, pick, -1)[..., 0]
        acc_isl = np.take_along_axis(acc_isl[:, pred] + d_isl, pick, -1)[..., 0]
        acc_p = np.take_along_axis(acc_p[:, pred] + d_p, pick, -1)[..., 0]
        acc_thr = np.take_along_axis(acc_thr[:, pred] + d_thr, pick, -1)[..., 0]
        pick4 = j[..., None, None]
        if need_x:
            x = np.take_along_axis(cx, pick4, 2)[:, :, 0]
        if use_ap:
            r = np.take_along_axis(cr, pick4, 2)[:, :, 0]
            mu = np.take_along_axis(mu_new, pick, -1)[..., 0]
        if use_dp:
            Xs = np.take_along_axis(cX, pick4, 2)[:, :, 0]
            R = np.take_along_axis(cR, pick4, 2)[:, :, 0]

    state = np.argmin(cost, axis=1)  # free termination, ties -> lowest state
    best = rows[:, 0], state
    final_cost, f_isl, f_p, f_thr = cost[best], acc_isl[best], acc_p[best], acc_thr[best]
    u = np.zeros((B, G), dtype=np.uint8)
    for g in range(G - 1, -1, -1):
        u[:, g] = state & 1
        state = pred[state, decisions[g, rows[:, 0], state]]
    if np.any(state != 0):
        raise AssertionError("traceback did not return to the zero state")
    y = conv_encode(u, cfg.code)
    w = zl ^ bits_to_int(y)
    msb = group_labels(w, p.raw_msb)
    X = group.map(msb, p.lsb)
    return ShapedBatch(X, msb, p.lsb, z, y, u, p.s, p.raw_msb, final_cost, f_isl, f_p, f_thr)


def shape(s, b, cfg: ShapingConfig, raw_msb=None) -> ShapedSymbol:
    """Shape one OFDM symbol.

    ``s``: syndrome bits, (G,) or (G, M-1); ``b``: LSB bits (N, n_lsb);
    ``raw_msb``: bits (G, m_s-1, n_msb) when m_s > 1.
    """
    b = np.asarray(b, dtype=np.uint8)
    n_lsb = cfg.constellation.n_lsb
    if b.shape != (cfg.n_subcarriers, n_lsb):
        raise InvalidArgumentError(f"expected LSB bits of shape {(cfg.n_subcarriers, n_lsb)}, got {b.shape}")
    if raw_msb is None:
        if cfg.m_s > 1:
            raise InvalidArgumentError(f"groups of {cfg.m_s} need raw MSB bits")
        raw = np.zeros((cfg.n_groups, 0), dtype=np.int64)
    else:
        raw_bits = np.asarray(raw_msb, dtype=np.uint8)
        if raw_bits.shape != (cfg.n_groups, cfg.m_s - 1, cfg.constellation.n_msb):
            raise InvalidArgumentError(f"raw MSB bits must have shape {(cfg.n_groups, cfg.m_s - 1, cfg.constellation.n_msb)}")
        raw = bits_to_int(raw_bits)
    s = np.asarray(s, dtype=np.uint8)
    if s.shape[0] != cfg.n_groups:
        raise InvalidArgumentError(f"expected {cfg.n_groups} syndrome bits, got {s.shape[0]}")
    payload = Payload(s[None], bits_to_int(b)[None], raw[None])
    return shape_batch(payload, cfg)[0]


def payload_bits(shaped: ShapedSymbol, cfg: ShapingConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(s, b, raw_msb) bit arrays of a shaped symbol."""
    c = cfg.constellation
    return shaped.s, int_to_bits(shaped.lsb, c.n_lsb), int_to_bits(shaped.raw_msb, c.n_msb)


# ---------------------------------------------------------------------------
# Baselines

_BASELINE_CACHE: dict = {}


def estimate_baselines(cfg: ShapingConfig, n_trials: int = DEFAULT_BASELINE_TRIALS, rng=None) -> tuple[float, float]:
    """Monte-Carlo means of the ISL-part and PAPR-part costs of unshaped symbols.

    ``rng`` may be a Generator or an integer seed; results are deterministic
    for a given seed.
    """
    if n_trials < 1:
        raise InvalidArgumentError("n_trials must be at least 1")
    rng = np.random.default_rng(rng)
    X = unshaped_symbols(random_payload(cfg, rng, n_trials), cfg)
    return float(np.mean(isl_cost(X, cfg))), float(np.mean(papr_cost(X)))


def with_baselines(cfg: ShapingConfig, n_trials: int = DEFAULT_BASELINE_TRIALS, seed: int = 0) -> ShapingConfig:
    """Config with baselines filled in (cached per configuration and seed)."""
    if cfg.baselines is not None:
        return cfg
    key = (cfg.replace(alpha=1.0).digest(), n_trials, seed)
    if key not in _BASELINE_CACHE:
        _BASELINE_CACHE[key] = estimate_baselines(cfg, n_trials, seed)
    return cfg.replace(baselines=_BASELINE_CACHE[key])

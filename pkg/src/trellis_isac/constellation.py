"""
Power-class partitioned QAM constellations.

A label is split into MSBs, which pick a subset (power class), and LSBs,
which pick the point inside the subset. Labels are integers; bit tuples are
converted MSB-first with :func:`bits_to_int` / :func:`int_to_bits`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidArgumentError


def bits_to_int(bits) -> np.ndarray:
    """(..., k) bit array, first bit most significant -> integer array (...)."""
    bits = np.asarray(bits, dtype=np.int64)
    k = bits.shape[-1]
    weights = 1 << np.arange(k - 1, -1, -1, dtype=np.int64)
    return bits @ weights


def int_to_bits(values, k: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    return ((values[..., None] >> shifts) & 1).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class PartitionedConstellation:
    """Points indexed by ``(msb << n_lsb) | lsb``."""

    name: str
    points: np.ndarray
    n_msb: int
    n_lsb: int
    equal_power_subsets: bool = True
    subset_power: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128)
        if pts.shape != (1 << (self.n_msb + self.n_lsb),):
            raise ConfigError(f"{self.name}: expected {1 << (self.n_msb + self.n_lsb)} points, got {pts.shape}")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        power = np.abs(pts.reshape(self.n_subsets, -1)) ** 2
        if abs(power.mean() - 1.0) > 1e-9:
            raise ConfigError(f"{self.name}: mean energy {power.mean():.6g} is not 1")
        if self.equal_power_subsets and np.ptp(power, axis=1).max() > 1e-9:
            raise ConfigError(f"{self.name}: points of a subset differ in power")
        if len(np.unique(np.round(pts, 12))) != pts.size:
            raise ConfigError(f"{self.name}: duplicate points")
        sp = power.mean(axis=1)
        sp.setflags(write=False)
        object.__setattr__(self, "subset_power", sp)

    @property
    def n_subsets(self) -> int:
        return 1 << self.n_msb

    @property
    def bits_per_symbol(self) -> int:
        return self.n_msb + self.n_lsb

    def map(self, msb, lsb) -> np.ndarray:
        """Integer labels -> complex points (broadcasting)."""
        msb = np.asarray(msb, dtype=np.int64)
        lsb = np.asarray(lsb, dtype=np.int64)
        return self.points[(msb << self.n_lsb) | lsb]

    def demap_exact(self, point) -> tuple[np.ndarray, np.ndarray]:
        return self.demap_nearest(point)

    def demap_nearest(self, received) -> tuple[np.ndarray, np.ndarray]:
        """Labels of the Euclidean-nearest point; ties go to the lowest label."""
        received = np.asarray(received, dtype=np.complex128)
        d = np.abs(received[..., None] - self.points) ** 2
        idx = np.argmin(d, axis=-1)
        return idx >> self.n_lsb, idx & ((1 << self.n_lsb) - 1)

    def to_dict(self) -> dict:
        labels = np.arange(self.points.size)
        return {
            "name": self.name,
            "n_msb": self.n_msb,
            "n_lsb": self.n_lsb,
            "equal_power_subsets": self.equal_power_subsets,
            "points": [[float(p.real), float(p.imag)] for p in self.points],
            "msb": (labels >> self.n_lsb).tolist(),
            "lsb": (labels & ((1 << self.n_lsb) - 1)).tolist(),
        }


def map_signbit(msb_bits, lsb_bits, const: PartitionedConstellation) -> np.ndarray:
    """Bit-level mapper: (..., n_msb) and (..., n_lsb) bit arrays -> points."""
    return const.map(bits_to_int(msb_bits), bits_to_int(lsb_bits))


def qam16_signbit() -> PartitionedConstellation:
    """16QAM split into the four constant-power classes of the +-1, +-3 grid.

    MSB 00 -> +-1+-1j (power 0.2), 01 -> +-3+-1j, 10 -> +-1+-3j (power 1.0),
    11 -> +-3+-3j (power 1.8). The two LSBs pick the quadrant in Gray order
    00 -> Q1, 01 -> Q2, 11 -> Q3, 10 -> Q4.
    """
    amps = {0: (1, 1), 1: (3, 1), 2: (1, 3), 3: (3, 3)}
    quadrant = {0: (1, 1), 1: (-1, 1), 3: (-1, -1), 2: (1, -1)}
    pts = np.zeros(16, dtype=np.complex128)
    for msb, (ar, ai) in amps.items():
        for lsb, (sr, si) in quadrant.items():
            pts[(msb << 2) | lsb] = complex(sr * ar, si * ai)
    return PartitionedConstellation("16qam", pts / np.sqrt(10.0), n_msb=2, n_lsb=2)


def qam256_shells() -> PartitionedConstellation:
    """256QAM split into four concentric shells of 64 points.

    Points are ordered by (power, angle); MSB label i is the i-th shell from
    the centre and the six LSBs index the shell in angular order.
    """
    lv = np.arange(-15, 16, 2)
    grid = (lv[:, None] + 1j * lv[None, :]).ravel() / np.sqrt(170.0)
    ang = np.mod(np.angle(grid), 2 * np.pi)
    power = np.round(np.abs(grid) ** 2, 12)
    order = np.lexsort((ang, power))
    pts = np.zeros(256, dtype=np.complex128)
    for shell in range(4):
        members = order[64 * shell : 64 * (shell + 1)]
        members = members[np.lexsort((power[members], ang[members]))]
        pts[shell * 64 : (shell + 1) * 64] = grid[members]
    return PartitionedConstellation("256qam", pts, n_msb=2, n_lsb=6, equal_power_subsets=False)


BUILTIN = {"16qam": qam16_signbit, "256qam": qam256_shells}


def get_constellation(name) -> PartitionedConstellation:
    if isinstance(name, PartitionedConstellation):
        return name
    key = str(name).lower().replace("-", "").replace("_", "")
    if key in BUILTIN:
        return BUILTIN[key]()
    path = Path(str(name))
    if path.suffix == ".json" and path.exists():
        return load_constellation(path)
    raise ConfigError(f"unknown constellation {name!r}; expected one of {sorted(BUILTIN)} or a JSON file")


def load_constellation(source) -> PartitionedConstellation:
    """Load and validate a constellation file (see :meth:`PartitionedConstellation.to_dict`)."""
    data = source if isinstance(source, dict) else json.loads(Path(source).read_text())
    try:
        n_msb, n_lsb = int(data["n_msb"]), int(data["n_lsb"])
        raw = np.asarray(data["points"], dtype=float)
        msb = np.asarray(data["msb"], dtype=np.int64)
        lsb = np.asarray(data["lsb"], dtype=np.int64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed constellation file: {exc}") from exc
    n = 1 << (n_msb + n_lsb)
    if raw.shape != (n, 2) or msb.shape != (n,) or lsb.shape != (n,):
        raise ConfigError(f"constellation file must list {n} points with msb/lsb labels")
    idx = (msb << n_lsb) | lsb
    if (msb.min() < 0 or msb.max() >= 1 << n_msb or lsb.min() < 0 or lsb.max() >= 1 << n_lsb
            or len(np.unique(idx)) != n):
        raise ConfigError("msb/lsb labels must form a bijection onto the points")
    pts = np.zeros(n, dtype=np.complex128)
    pts[idx] = raw[:, 0] + 1j * raw[:, 1]
    return PartitionedConstellation(
        data.get("name", "custom"), pts, n_msb, n_lsb, bool(data.get("equal_power_subsets", True))
    )


@dataclass(frozen=True, eq=False)
class MultidimGroup:
    """``m_s`` subcarriers shaped jointly.

    ``amplitudes[i, msb]`` is the amplitude subcarrier ``i`` of the group
    takes for subset ``msb``; by default the RMS amplitude of that subset in
    the underlying constellation, which leaves the points unchanged.
    """

    const: PartitionedConstellation
    m_s: int = 1
    amplitudes: np.ndarray | None = None

    def __post_init__(self):
        if self.m_s < 1:
            raise ConfigError("group size must be positive")
        base = np.sqrt(self.const.subset_power)
        amps = np.tile(base, (self.m_s, 1)) if self.amplitudes is None else np.asarray(self.amplitudes, float)
        if amps.shape != (self.m_s, self.const.n_subsets) or np.any(amps <= 0):
            raise ConfigError(f"amplitude table must be positive with shape {(self.m_s, self.const.n_subsets)}")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "_scale", amps / base)

    def subcarrier_power(self) -> np.ndarray:
        """(m_s, n_subsets) mean power of each subcarrier's classes."""
        return self._scale**2 * self.const.subset_power

    def composite_power_table(self) -> np.ndarray:
        """Group power for every combination of per-subcarrier MSB labels."""
        table = np.zeros(())
        for row in self.subcarrier_power():
            table = np.add.outer(table, row)
        return table

    def map(self, msb, lsb) -> np.ndarray:
        """Labels shaped (..., N) with N a multiple of m_s -> points (..., N)."""
        msb = np.asarray(msb, dtype=np.int64)
        lsb = np.asarray(lsb, dtype=np.int64)
        if msb.shape != lsb.shape:
            raise InvalidArgumentError("msb and lsb label arrays differ in shape")
        n = msb.shape[-1]
        if n % self.m_s:
            raise InvalidArgumentError(f"{n} subcarriers do not split into groups of {self.m_s}")
        pos = np.arange(n) % self.m_s
        return self.const.map(msb, lsb) * self._scale[pos, msb]

    def map_at(self, position: int, msb, lsb) -> np.ndarray:
        """Map labels for a single position of the group."""
        msb = np.asarray(msb, dtype=np.int64)
        return self.const.map(msb, lsb) * self._scale[position, msb]

    def point_tables(self) -> np.ndarray:
        """(m_s, 2^bits) points seen at each position of the group."""
        labels = np.arange(self.const.points.size)
        return self.const.points * self._scale[:, labels >> self.const.n_lsb]

    def demap_nearest(self, received) -> tuple[np.ndarray, np.ndarray]:
        """Nearest-point labels for (..., N) received values, lowest label on ties."""
        received = np.asarray(received, dtype=np.complex128)
        n = received.shape[-1]
        if n % self.m_s:
            raise InvalidArgumentError(f"{n} subcarriers do not split into groups of {self.m_s}")
        tables = self.point_tables()[np.arange(n) % self.m_s]
        idx = np.argmin(np.abs(received[..., None] - tables) ** 2, axis=-1)
        return idx >> self.const.n_lsb, idx & ((1 << self.const.n_lsb) - 1)


def map_multidim(msb_bits, lsb_bits, group: MultidimGroup) -> np.ndarray:
    """(..., m_s*k, n_msb) / (..., m_s*k, n_lsb) bit arrays -> points."""
    return group.map(bits_to_int(msb_bits), bits_to_int(lsb_bits))

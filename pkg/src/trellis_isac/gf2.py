"""
Binary polynomial algebra and rate-1/M convolutional shaping codes.

Polynomials in the delay operator D are stored as Python ints, bit i holding
the coefficient of D^i. Bit sequences are numpy uint8 arrays with time along
the last axis (or the second to last, when a trailing axis indexes streams).
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CapacityError, ConfigError, InvalidArgumentError

MAX_MEMORY = 16


@dataclass(frozen=True, order=True)
class Gf2Poly:
    bits: int = 0

    def __post_init__(self):
        if self.bits < 0:
            raise InvalidArgumentError("polynomial coefficients must be a nonnegative bitmask")

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return self.bits.bit_length() - 1

    @property
    def coefficients(self) -> tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(max(self.degree + 1, 1)))

    @property
    def weight(self) -> int:
        return bin(self.bits).count("1")

    def __add__(self, other: "Gf2Poly") -> "Gf2Poly":
        return Gf2Poly(self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other: "Gf2Poly") -> "Gf2Poly":
        a, b, out = self.bits, other.bits, 0
        while b:
            if b & 1:
                out ^= a
            a <<= 1
            b >>= 1
        return Gf2Poly(out)

    def __divmod__(self, other: "Gf2Poly"):
        if other.bits == 0:
            raise ZeroDivisionError("division by the zero polynomial")
        q, r = 0, self.bits
        dg = other.degree
        while r and r.bit_length() - 1 >= dg:
            shift = r.bit_length() - 1 - dg
            q ^= 1 << shift
            r ^= other.bits << shift
        return Gf2Poly(q), Gf2Poly(r)

    def __bool__(self) -> bool:
        return self.bits != 0

    def __str__(self) -> str:
        if not self.bits:
            return "0"
        terms = []
        for i in range(self.degree + 1):
            if (self.bits >> i) & 1:
                terms.append("1" if i == 0 else "D" if i == 1 else f"D^{i}")
        return "+".join(terms)

    @classmethod
    def parse(cls, text: str) -> "Gf2Poly":
        """Parse '1+D+D^2' style strings (also accepts 'D2' and '0')."""
        text = str(text).replace(" ", "").replace("**", "^")
        if text in ("", "0"):
            return cls(0)
        bits = 0
        for term in text.split("+"):
            m = re.fullmatch(r"1|D(?:\^?(\d+))?", term)
            if not m:
                raise InvalidArgumentError(f"bad polynomial term {term!r} in {text!r}")
            power = 0 if term == "1" else int(m.group(1) or 1)
            bits ^= 1 << power
        return cls(bits)

    @classmethod
    def from_octal(cls, octal, constraint_length: int) -> "Gf2Poly":
        """Generator in the usual octal notation: the leftmost of the K
        register bits is the tap on the current input (D^0)."""
        value = int(str(octal), 8)
        if value.bit_length() > constraint_length:
            raise InvalidArgumentError(f"octal {octal} does not fit constraint length {constraint_length}")
        bits = 0
        for i in range(constraint_length):
            if (value >> (constraint_length - 1 - i)) & 1:
                bits |= 1 << i
        return cls(bits)

    def to_octal(self, constraint_length: int) -> str:
        value = 0
        for i in range(constraint_length):
            if (self.bits >> i) & 1:
                value |= 1 << (constraint_length - 1 - i)
        return format(value, "o")


def poly_egcd(a: Gf2Poly, b: Gf2Poly) -> tuple[Gf2Poly, Gf2Poly, Gf2Poly]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b)."""
    x0, x1, y0, y1 = Gf2Poly(1), Gf2Poly(0), Gf2Poly(0), Gf2Poly(1)
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 + q * x1
        y0, y1 = y1, y0 + q * y1
    return a, x0, y0


def poly_filter(seq: np.ndarray, poly: Gf2Poly) -> np.ndarray:
    """Truncated product seq(D) * poly(D) over GF(2) along the last axis."""
    seq = np.asarray(seq, dtype=np.uint8)
    out = np.zeros_like(seq)
    n = seq.shape[-1]
    for shift in range(min(poly.degree + 1, n)):
        if (poly.bits >> shift) & 1:
            out[..., shift:] ^= seq[..., : n - shift]
    return out


def _matmul_streams(streams: np.ndarray, matrix) -> np.ndarray:
    """streams: (..., N, rows); matrix[rows][cols] of Gf2Poly -> (..., N, cols)."""
    rows, cols = len(matrix), len(matrix[0])
    if streams.shape[-1] != rows:
        raise InvalidArgumentError(f"expected {rows} streams, got {streams.shape[-1]}")
    per_stream = np.moveaxis(streams, -1, 0)
    out = np.zeros((cols,) + per_stream.shape[1:], dtype=np.uint8)
    for i in range(rows):
        for j in range(cols):
            if matrix[i][j]:
                out[j] ^= poly_filter(per_stream[i], matrix[i][j])
    return np.moveaxis(out, 0, -1)


@dataclass(frozen=True, eq=False)
class Trellis:
    """Forward trellis of a rate-1/M feedforward encoder.

    State bit i holds the input i+1 steps in the past. ``pred[s]`` lists the
    two predecessor states of ``s`` in ascending order; every branch into
    ``s`` carries input bit ``s & 1``.
    """

    n_states: int
    next_state: np.ndarray  # (S, 2)
    output: np.ndarray  # (S, 2, M) uint8
    pred: np.ndarray  # (S, 2)
    pred_output: np.ndarray  # (S, 2, M)

    @property
    def n_branches(self) -> int:
        return 2 * self.n_states

    def input_bit(self, state) -> np.ndarray:
        return np.asarray(state) & 1

    def walk(self, info, start: int = 0) -> np.ndarray:
        """Encoder outputs obtained by following the trellis branches."""
        state, out = start, []
        for u in np.asarray(info, dtype=np.uint8):
            out.append(self.output[state, u])
            state = self.next_state[state, u]
        return np.array(out, dtype=np.uint8).reshape(-1, self.output.shape[-1])


@dataclass(frozen=True)
class ShapingCode:
    generators: tuple[Gf2Poly, ...]
    syndrome_former: tuple[tuple[Gf2Poly, ...], ...]  # M x (M-1)
    inv_syndrome_former: tuple[tuple[Gf2Poly, ...], ...]  # (M-1) x M
    name: str = ""
    trellis: Trellis = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = len(self.generators)
        if m < 2:
            raise ConfigError("a shaping code needs at least two generator polynomials")
        if len(self.syndrome_former) != m or any(len(row) != m - 1 for row in self.syndrome_former):
            raise ConfigError(f"syndrome former must be {m}x{m - 1}")
        if len(self.inv_syndrome_former) != m - 1 or any(len(row) != m for row in self.inv_syndrome_former):
            raise ConfigError(f"inverse syndrome former must be {m - 1}x{m}")
        if self.memory > MAX_MEMORY:
            raise CapacityError(f"memory {self.memory} exceeds the supported bound {MAX_MEMORY}")
        for j in range(m - 1):
            acc = Gf2Poly(0)
            for i in range(m):
                acc = acc + self.generators[i] * self.syndrome_former[i][j]
            if acc:
                raise ConfigError("G H^T != 0: codewords would have a nonzero syndrome")
        for a in range(m - 1):
            for b in range(m - 1):
                acc = Gf2Poly(0)
                for i in range(m):
                    acc = acc + self.inv_syndrome_former[a][i] * self.syndrome_former[i][b]
                if acc.bits != (1 if a == b else 0):
                    raise ConfigError("(H^-1)^T H^T is not the identity")
        object.__setattr__(self, "trellis", build_trellis(self))

    @property
    def n_outputs(self) -> int:
        return len(self.generators)

    @property
    def memory(self) -> int:
        return max(g.degree for g in self.generators)

    @property
    def n_states(self) -> int:
        return 1 << self.memory

    @classmethod
    def from_generators(cls, generators, inv_syndrome_former=None, syndrome_former=None, name=""):
        """Build a code from generator polynomials.

        For M = 2 the syndrome former is (g2, g1)^T and its inverse is found
        from the Bezout identity; larger M needs both matrices supplied.
        """
        gens = tuple(g if isinstance(g, Gf2Poly) else Gf2Poly.parse(g) for g in generators)
        if syndrome_former is None:
            if len(gens) != 2:
                raise ConfigError("syndrome former must be given explicitly for M > 2")
            syndrome_former = ((gens[1],), (gens[0],))
        if inv_syndrome_former is None:
            if len(gens) != 2:
                raise ConfigError("inverse syndrome former must be given explicitly for M > 2")
            h0, h1 = syndrome_former[0][0], syndrome_former[1][0]
            g, a, b = poly_egcd(h0, h1)
            if g.bits != 1:
                raise ConfigError(f"H^T has no right inverse: gcd is {g}, the code is catastrophic")
            inv_syndrome_former = ((a, b),)
        return cls(gens, _poly_matrix(syndrome_former), _poly_matrix(inv_syndrome_former), name=name)

    @classmethod
    def from_octal(cls, octals, **kwargs) -> "ShapingCode":
        if isinstance(octals, str):
            octals = [o for o in re.split(r"[,\s]+", octals.strip()) if o]
        k = max(int(str(o), 8).bit_length() for o in octals)
        gens = [Gf2Poly.from_octal(o, k) for o in octals]
        kwargs.setdefault("name", ",".join(str(o) for o in octals))
        return cls.from_generators(gens, **kwargs)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "generators": [str(g) for g in self.generators],
            "syndrome_former": [[str(p) for p in row] for row in self.syndrome_former],
            "inverse_syndrome_former": [[str(p) for p in row] for row in self.inv_syndrome_former],
            "memory": self.memory,
        }


def _poly_matrix(rows) -> tuple[tuple[Gf2Poly, ...], ...]:
    return tuple(tuple(p if isinstance(p, Gf2Poly) else Gf2Poly.parse(p) for p in row) for row in rows)


def build_trellis(code: ShapingCode) -> Trellis:
    nu = code.memory
    if nu > MAX_MEMORY:
        raise CapacityError(f"memory {nu} exceeds the supported bound {MAX_MEMORY}")
    n_states = 1 << nu
    mask = n_states - 1
    m = code.n_outputs
    next_state = np.zeros((n_states, 2), dtype=np.int64)
    output = np.zeros((n_states, 2, m), dtype=np.uint8)
    for s in range(n_states):
        for u in (0, 1):
            reg = (s << 1) | u
            next_state[s, u] = reg & mask
            for j, g in enumerate(code.generators):
                output[s, u, j] = bin(reg & g.bits).count("1") & 1
    pred = np.zeros((n_states, 2), dtype=np.int64)
    pred_output = np.zeros((n_states, 2, m), dtype=np.uint8)
    fill = np.zeros(n_states, dtype=np.int64)
    for s in range(n_states):
        for u in (0, 1):
            ns = next_state[s, u]
            pred[ns, fill[ns]] = s
            pred_output[ns, fill[ns]] = output[s, u]
            fill[ns] += 1
    if not np.all(fill == 2):
        raise ConfigError("trellis is not a regular two-in two-out graph")
    order = np.argsort(pred, axis=1, kind="stable")
    pred = np.take_along_axis(pred, order, axis=1)
    pred_output = np.take_along_axis(pred_output, order[..., None], axis=1)
    for arr in (next_state, output, pred, pred_output):
        arr.setflags(write=False)
    return Trellis(n_states, next_state, output, pred, pred_output)


def conv_encode(info, code: ShapingCode) -> np.ndarray:
    """Encode info bits (..., N) into (..., N, M); stream j is info(D) g_j(D)."""
    info = np.asarray(info, dtype=np.uint8)
    return np.stack([poly_filter(info, g) for g in code.generators], axis=-1)


def syndrome(coded, code: ShapingCode) -> np.ndarray:
    """s(D) = c(D) H^T(D) for coded bits of shape (..., N, M) or flat (..., N*M)."""
    coded = np.asarray(coded, dtype=np.uint8)
    m = code.n_outputs
    if coded.ndim == 0 or (coded.shape[-1] != m and coded.shape[-1] % m):
        raise InvalidArgumentError(f"coded length {coded.shape[-1] if coded.ndim else 0} is not a multiple of {m}")
    if coded.ndim == 1 or coded.shape[-1] != m:
        coded = coded.reshape(coded.shape[:-1] + (-1, m))
    return _matmul_streams(coded, code.syndrome_former)


def inverse_syndrome(s, code: ShapingCode) -> np.ndarray:
    """z(D) = s(D) (H^-1)^T(D). A trailing syndrome axis may be dropped when M = 2."""
    s = np.asarray(s, dtype=np.uint8)
    k = code.n_outputs - 1
    if k == 1 and (s.ndim == 1 or s.shape[-1] != 1):
        s = s[..., None]
    return _matmul_streams(s, code.inv_syndrome_former)


REGISTRY = {
    # H^T and (H^-1)^T as used for the BER study of this code
    "5,7": lambda: ShapingCode.from_generators(
        ["1+D^2", "1+D+D^2"],
        syndrome_former=[["1+D+D^2"], ["1+D^2"]],
        inv_syndrome_former=[["D", "1+D"]],
        name="5,7",
    ),
    "6,7": lambda: ShapingCode.from_generators(["1+D", "1+D+D^2"], name="6,7"),
}


def get_code(name: str = "5,7") -> ShapingCode:
    key = name.replace(" ", "")
    if key in REGISTRY:
        return REGISTRY[key]()
    return ShapingCode.from_octal(key)


def load_code(source) -> ShapingCode:
    """Load a code from a JSON file path, a mapping, or an octal string.

    Mapping keys: ``generators`` (octal list or '5,7' string), optional
    ``syndrome_former`` (M rows of M-1 polynomial strings) and
    ``inverse_syndrome_former`` ((M-1) rows of M polynomial strings).
    """
    if isinstance(source, (str, Path)) and Path(source).suffix == ".json" and Path(source).exists():
        source = json.loads(Path(source).read_text())
    if isinstance(source, str):
        return get_code(source)
    if not isinstance(source, dict) or "generators" not in source:
        raise ConfigError("code definition needs a 'generators' entry")
    gens = source["generators"]
    kwargs = {}
    for key in ("syndrome_former", "inverse_syndrome_former"):
        if source.get(key) is not None:
            kwargs[key if key == "syndrome_former" else "inv_syndrome_former"] = source[key]
    if not kwargs and isinstance(gens, str) and gens.replace(" ", "") in REGISTRY:
        return get_code(gens)
    return ShapingCode.from_octal(gens, **kwargs)

"""Plain-text and image export formats, plus the run-configuration file.

csv-matrix
    First line ``# q_grid: L N``, then N lines of N comma-separated values.
    Line k holds W(q_0 .. q_{N-1}, p_k) with p running from -L to +L.
csv-series
    Optional ``#`` comment lines, one header line of column names, then rows.
pgm
    Binary greymap (P5, maxval 255). The first image row is p = +L so the
    picture is upright with q increasing to the right. A value v maps to
    rint(255 (v + m) / (2 m)), m = max|W|, with ties rounded to even;
    v = 0 maps to 128. An all-zero grid maps to 128 everywhere.

Floats are written with 17 significant digits, which round-trips IEEE
doubles exactly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .core import NhParams, ParameterError, WignerGrid

__all__ = [
    "FLOAT_FMT",
    "RunConfig",
    "format_float",
    "write_csv_matrix",
    "read_csv_matrix",
    "write_csv_series",
    "read_csv_series",
    "write_pgm",
    "read_pgm",
    "pgm_levels",
]

FLOAT_FMT = ".17g"
FORMATS = ("csv-matrix", "csv-series", "pgm")


def format_float(x: float) -> str:
    return format(float(x), FLOAT_FMT)


def write_csv_matrix(path: str | os.PathLike, W: WignerGrid) -> Path:
    path = Path(path)
    lines = [f"# q_grid: {format_float(W.half_width)} {W.n_points}"]
    for row in W.values.T:
        lines.append(",".join(format(v, FLOAT_FMT) for v in row.tolist()))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv_matrix(path: str | os.PathLike, t: float = 0.0) -> WignerGrid:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[:2] != ["#", "q_grid:"]:
            raise ValueError(f"{path}: expected '# q_grid: L N' header")
        L, N = float(header[2]), int(header[3])
        rows = np.loadtxt(fh, delimiter=",", ndmin=2)
    if rows.shape != (N, N):
        raise ValueError(f"{path}: expected {N}x{N} values, got {rows.shape}")
    return WignerGrid(L, N, rows.T.copy(), t)


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def write_csv_series(
    path: str | os.PathLike,
    columns: Mapping[str, Sequence],
    comments: Sequence[str] = (),
) -> Path:
    path = Path(path)
    path.write_text(series_text(columns, comments))
    return path


def series_text(columns: Mapping[str, Sequence], comments: Sequence[str] = ()) -> str:
    names = list(columns)
    cols = [list(columns[k]) for k in names]
    lengths = {len(c) for c in cols}
    if len(lengths) > 1:
        raise ValueError("all columns must have the same length")
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(names))
    for row in zip(*cols):
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def read_csv_series(path: str | os.PathLike) -> tuple[dict[str, np.ndarray], list[str]]:
    """Return (columns, comments). Numeric columns become float arrays."""
    comments, body = [], []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                comments.append(line[1:].strip())
            else:
                body.append(line.split(","))
    names, rows = body[0], body[1:]
    out: dict[str, np.ndarray] = {}
    for k, name in enumerate(names):
        raw = [r[k] for r in rows]
        try:
            out[name] = np.array([float(v) for v in raw])
        except ValueError:
            out[name] = np.array(raw)
    return out, comments


def pgm_levels(values: np.ndarray) -> np.ndarray:
    m = float(np.max(np.abs(values)))
    if m == 0:
        return np.full(values.shape, 128, dtype=np.uint8)
    return np.rint(255.0 * (values + m) / (2.0 * m)).astype(np.uint8)


def write_pgm(path: str | os.PathLike, W: WignerGrid) -> Path:
    path = Path(path)
    image = pgm_levels(W.values).T[::-1]
    h, w = image.shape
    path.write_bytes(f"P5\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(image).tobytes())
    return path


def read_pgm(path: str | os.PathLike) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    pixels = data[len(data) - w * h :]
    return np.frombuffer(pixels, dtype=np.uint8).reshape(h, w)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ParameterError(f"not a boolean: {text!r}")


def _parse_modes(text: str) -> tuple[tuple[int, int, str], ...]:
    modes = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        parts = item.split(":")
        if len(parts) == 2:
            parts.append("+")
        if len(parts) != 3:
            raise ParameterError(f"mode must look like n:nu[:parity], got {item!r}")
        modes.append((int(parts[0]), int(parts[1]), parts[2]))
    return tuple(modes)


def _format_modes(modes) -> str:
    return ",".join(f"{n}:{nu}:{parity}" for n, nu, parity in modes)


@dataclass
class RunConfig:
    """Everything needed to reproduce a run; serializes as ``key = value`` lines."""

    model: str = "elliptic"
    alpha: float = 1.0
    beta: float | None = None
    gamma: float = 0.0
    L: float = 6.0
    N: int = 257
    dt: float | None = None
    t_end: float = 1.0
    record_every: int = 100
    normalized: bool = False
    order: int = 4
    modes: tuple[tuple[int, int, str], ...] = ((0, 0, "+"),)
    out: str = "."
    formats: tuple[str, ...] = ("csv-matrix", "csv-series")

    def __post_init__(self):
        if self.model not in ("elliptic", "hyperbolic", "general"):
            raise ParameterError(f"unknown model {self.model!r}")
        if self.model == "general" and self.beta is None:
            raise ParameterError("the general model needs an explicit beta")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise ParameterError(f"unknown output format(s): {sorted(bad)}")

    @property
    def params(self) -> NhParams:
        if self.model == "elliptic":
            beta = self.alpha
        elif self.model == "hyperbolic":
            beta = -self.alpha
        else:
            beta = self.beta
        return NhParams(self.alpha, beta, self.gamma)

    _CONVERTERS = {
        "model": str,
        "alpha": float,
        "beta": float,
        "gamma": float,
        "L": float,
        "N": int,
        "dt": float,
        "t_end": float,
        "record_every": int,
        "normalized": _parse_bool,
        "order": int,
        "modes": _parse_modes,
        "out": str,
        "formats": lambda s: tuple(filter(None, (x.strip() for x in s.split(",")))),
    }

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if f.name == "modes":
                text = _format_modes(value)
            elif f.name == "formats":
                text = ",".join(value)
            elif isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, float):
                text = format_float(value)
            else:
                text = str(value)
            lines.append(f"{f.name} = {text}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse_text(cls, text: str) -> dict:
        """Parse ``key = value`` lines into converted values (unknown keys rejected)."""
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"config line {lineno}: expected 'key = value', got {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in cls._CONVERTERS:
                raise ParameterError(f"config line {lineno}: unknown key {key!r}")
            try:
                values[key] = cls._CONVERTERS[key](value)
            except ValueError as exc:
                raise ParameterError(f"config line {lineno}: {exc}") from None
        return values

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        return cls(**cls.parse_text(text))

    def save(self, path: str | os.PathLike) -> Path:
        path = Path(path)
        path.write_text(self.to_text())
        return path

    @classmethod
    def load(cls, path: str | os.PathLike) -> "RunConfig":
        return cls.from_text(Path(path).read_text())

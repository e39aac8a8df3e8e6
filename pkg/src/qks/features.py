"""Single-shot feature extraction and the bit-packed feature matrix.

Row i of a feature matrix stacks one measured bit pattern per episode:
column e * num_qubits + j holds qubit j's outcome from episode e, so a
machine with E episodes on an n-qubit template yields E * n binary columns.
Rows are stored packed, 64 columns per little-endian uint64 word.

On-disk format (``.qksf``): a 16-byte header (magic ``QKSF``, little-endian
u32 version, u64 row count) followed by the packed words row-major in
little-endian byte order, plus a ``<path>.json`` sidecar describing the
machine that produced the bits (template, sigma, episodes, seed, structure,
layers) and the matrix geometry.
"""

from __future__ import annotations

import json
import struct
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .encoding import QksMachine, shot_stream
from .simulator import EpisodeEngine

MAGIC = b"QKSF"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIQ")

# Fixed row-block size for featurization. Work is split into these blocks
# regardless of the worker count, so every arithmetic call sees identical
# operand shapes whether one thread or eight consume the task list.
ROW_BLOCK = 64

if sys.byteorder != "little":  # pragma: no cover
    raise ImportError("packed feature matrices require a little-endian host")


class FeatureFileError(ValueError):
    """Corrupt or unreadable feature file."""


@dataclass
class FeatureMatrix:
    """Bit-packed binary features: rows = examples, columns = episode bits."""

    packed: np.ndarray  # (rows, words) uint64
    num_columns: int
    num_qubits: int
    episodes: int
    meta: dict | None = None

    def __post_init__(self):
        if self.packed.dtype != np.uint64 or self.packed.ndim != 2:
            raise ValueError("packed storage must be a 2-D uint64 array")
        if self.num_columns != self.episodes * self.num_qubits:
            raise ValueError("column count must equal episodes * num_qubits")
        if self.packed.shape[1] != _words_for(self.num_columns):
            raise ValueError("packed width does not match the column count")

    @property
    def rows(self) -> int:
        return self.packed.shape[0]

    def to_dense(self) -> np.ndarray:
        """Unpack to a (rows, num_columns) uint8 array of 0/1 values."""
        bits = np.unpackbits(
            self.packed.view(np.uint8), axis=1, bitorder="little"
        )
        return bits[:, : self.num_columns]

    def truncate(self, episodes: int) -> "FeatureMatrix":
        """Keep only the first ``episodes`` episodes' columns.

        Valid because the column layout is episode-major: episode e's bits
        occupy columns [e*num_qubits, (e+1)*num_qubits).
        """
        if not 1 <= episodes <= self.episodes:
            raise ValueError(
                f"episodes must be in [1, {self.episodes}], got {episodes}"
            )
        if episodes == self.episodes:
            return self
        cols = episodes * self.num_qubits
        packed = _pack_rows(self.to_dense()[:, :cols])
        meta = dict(self.meta, episodes=episodes) if self.meta else None
        return FeatureMatrix(packed, cols, self.num_qubits, episodes, meta)

    def equals(self, other: "FeatureMatrix") -> bool:
        return (
            self.num_columns == other.num_columns
            and self.num_qubits == other.num_qubits
            and self.episodes == other.episodes
            and np.array_equal(self.packed, other.packed)
        )


def _words_for(columns: int) -> int:
    return (columns + 63) // 64


def _pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack (m, C) 0/1 rows into (m, ceil(C/64)) uint64 words, LSB first."""
    m, c = bits.shape
    by = np.packbits(bits, axis=1, bitorder="little")
    width = _words_for(c) * 8
    if by.shape[1] < width:
        by = np.pad(by, ((0, 0), (0, width - by.shape[1])))
    return np.ascontiguousarray(by).view(np.uint64)


def featurize(
    machine: QksMachine, inputs: np.ndarray, workers: int = 1
) -> FeatureMatrix:
    """Measure every (example, episode) pair once and pack the bits.

    Deterministic in (machine.seed, example index, episode index): the shot
    for example i, episode e consumes the e-th variate of a stream keyed by
    (seed, i), so worker count, row order within a call, and the machine's
    total episode count never change a bit that both runs produce.
    """
    x = np.ascontiguousarray(np.asarray(inputs, dtype=np.float64))
    if x.ndim != 2 or x.shape[1] != machine.structure.p:
        raise ValueError(
            f"expected inputs of shape (M, {machine.structure.p}), got {x.shape}"
        )
    if x.size and not np.isfinite(x).all():
        raise ValueError("inputs must be finite")
    if workers < 1:
        raise ValueError("workers must be >= 1")

    m = x.shape[0]
    n_eps = machine.episodes
    n_q = machine.num_qubits
    columns = n_eps * n_q
    out = np.zeros((m, _words_for(columns)), dtype=np.uint64)
    qubit_shifts = np.arange(n_q, dtype=np.uint8)

    def process_block(start: int) -> None:
        stop = min(start + ROW_BLOCK, m)
        block = stop - start
        engine = EpisodeEngine(machine.template, machine.layers)
        thetas = machine.encode_batch(x[start:stop])  # (block, E, k)
        uniforms = np.empty((block, n_eps))
        for i in range(block):
            uniforms[i] = shot_stream(machine.seed, start + i).random(n_eps)
        z = engine.sample(
            thetas.reshape(block * n_eps, machine.num_params),
            uniforms.reshape(-1),
        )
        bits = ((z[:, None] >> qubit_shifts) & 1).astype(np.uint8)
        out[start:stop] = _pack_rows(bits.reshape(block, columns))

    starts = range(0, m, ROW_BLOCK)
    if workers == 1 or m <= ROW_BLOCK:
        for s in starts:
            process_block(s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(process_block, starts))

    meta = {
        "template": machine.template.name,
        "sigma": machine.sigma,
        "episodes": n_eps,
        "seed": machine.seed,
        "layers": machine.layers,
        "structure": {
            "pattern": machine.structure.pattern,
            "p": machine.structure.p,
            "q": machine.structure.q,
            "rows": [list(r) for r in machine.structure.rows],
        },
        "num_qubits": n_q,
    }
    return FeatureMatrix(out, columns, n_q, n_eps, meta)


def _sidecar_path(path: str | Path) -> Path:
    return Path(str(path) + ".json")


def save_features(fm: FeatureMatrix, path: str | Path) -> None:
    """Write the packed matrix and its JSON sidecar."""
    path = Path(path)
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, fm.rows)
    payload = np.ascontiguousarray(fm.packed).astype("<u8").tobytes()
    path.write_bytes(header + payload)
    sidecar = {
        "format": "QKSF",
        "version": FORMAT_VERSION,
        "rows": fm.rows,
        "columns": fm.num_columns,
        "num_qubits": fm.num_qubits,
        "episodes": fm.episodes,
    }
    if fm.meta:
        sidecar["machine"] = {
            k: v for k, v in fm.meta.items() if k not in sidecar
        }
    _sidecar_path(path).write_text(json.dumps(sidecar, indent=2) + "\n")


def load_features(path: str | Path) -> FeatureMatrix:
    """Read a packed matrix written by :func:`save_features`."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise FeatureFileError(f"{path}: truncated header")
    magic, version, rows = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FeatureFileError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise FeatureFileError(f"{path}: unsupported version {version}")

    sidecar_file = _sidecar_path(path)
    if not sidecar_file.exists():
        raise FeatureFileError(f"{path}: missing sidecar {sidecar_file.name}")
    try:
        sidecar = json.loads(sidecar_file.read_text())
        columns = int(sidecar["columns"])
        num_qubits = int(sidecar["num_qubits"])
        episodes = int(sidecar["episodes"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise FeatureFileError(f"{sidecar_file}: malformed sidecar: {exc}") from exc

    words = _words_for(columns)
    expected = _HEADER.size + rows * words * 8
    if len(raw) != expected:
        raise FeatureFileError(
            f"{path}: expected {expected} bytes for {rows} rows x "
            f"{columns} columns, found {len(raw)}"
        )
    packed = (
        np.frombuffer(raw, dtype="<u8", offset=_HEADER.size)
        .reshape(rows, words)
        .astype(np.uint64)
    )
    meta = sidecar.get("machine")
    if isinstance(meta, dict):
        meta = dict(meta, episodes=episodes, num_qubits=num_qubits)
    return FeatureMatrix(packed, columns, num_qubits, episodes, meta)

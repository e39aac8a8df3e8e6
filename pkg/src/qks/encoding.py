"""Random linear encodings of classical inputs into circuit parameters.

Each episode e of a machine owns a random affine map theta = Omega_e u +
beta_e. Omega_e is a (q, p) matrix whose nonzero entries are i.i.d.
N(0, sigma^2) on a fixed sparsity pattern shared by all episodes, and beta_e
is i.i.d. Uniform[0, 2*pi). The sparsity pattern is described by an
:class:`EncodingStructure`: which input coordinates feed which parameter.

Randomness is drawn from named Philox substreams of the machine seed, one
stream per purpose, so enlarging the episode count extends every stream
instead of reshuffling it: a machine with E' > E episodes agrees with the
E-episode machine on the first E episodes exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .quil import CircuitTemplate

TAG_OMEGA = 1
TAG_BETA = 2
TAG_SHOTS = 3

TWO_PI = 2.0 * np.pi


def _substream(seed: int, *tags: int) -> np.random.Generator:
    """Philox generator for one named substream of a 64-bit seed."""
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *tags])))


@dataclass(frozen=True)
class EncodingStructure:
    """Sparsity pattern of the per-episode Omega matrices.

    ``rows[k]`` lists the input coordinates (ascending) that feed circuit
    parameter k. Patterns: ``dense`` (q=1 row covering all p coordinates),
    ``split`` (q=p, one coordinate each), ``tiled`` (q equal contiguous
    blocks, requires q | p), and ``custom`` (anything else, e.g. image tiles
    of unequal size).
    """

    p: int
    q: int
    pattern: str
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("input dimension p must be >= 1")
        if self.q != len(self.rows):
            raise ValueError("q must equal the number of mask rows")
        for k, row in enumerate(self.rows):
            if len(row) == 0:
                raise ValueError(f"mask row {k} is empty")
            if any(not 0 <= i < self.p for i in row):
                raise ValueError(f"mask row {k} references an out-of-range index")
            if tuple(sorted(set(row))) != row:
                raise ValueError(f"mask row {k} must be sorted and duplicate-free")

    @classmethod
    def dense(cls, p: int) -> "EncodingStructure":
        """One parameter fed by every coordinate (q=1, r=p)."""
        return cls(p, 1, "dense", (tuple(range(p)),))

    @classmethod
    def split(cls, p: int) -> "EncodingStructure":
        """One parameter per coordinate (q=p, r=1)."""
        return cls(p, p, "split", tuple((i,) for i in range(p)))

    @classmethod
    def tiled(cls, p: int, q: int) -> "EncodingStructure":
        """q equal contiguous blocks of r = p // q coordinates each."""
        if q < 1 or p % q != 0:
            raise ValueError(f"tiled structure requires q | p, got p={p}, q={q}")
        r = p // q
        rows = tuple(tuple(range(k * r, (k + 1) * r)) for k in range(q))
        return cls(p, q, "tiled", rows)

    @classmethod
    def from_tiles(
        cls, tiles: Iterable[Iterable[int]], p: int
    ) -> "EncodingStructure":
        """Structure from an explicit disjoint cover of range(p).

        Reports pattern ``tiled`` when the tiles are equal-sized contiguous
        blocks and ``custom`` otherwise.
        """
        rows = tuple(tuple(sorted(int(i) for i in tile)) for tile in tiles)
        seen: set[int] = set()
        for row in rows:
            if seen.intersection(row):
                raise ValueError("tiles must be disjoint")
            seen.update(row)
        if seen != set(range(p)):
            raise ValueError("tiles must cover every input coordinate exactly once")
        q = len(rows)
        uniform = len({len(r) for r in rows}) == 1
        contiguous = all(
            row == tuple(range(row[0], row[0] + len(row))) for row in rows
        )
        ordered = all(rows[k][-1] < rows[k + 1][0] for k in range(q - 1))
        pattern = "tiled" if (uniform and contiguous and ordered) else "custom"
        return cls(p, q, pattern, rows)

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "EncodingStructure":
        """Structure from a boolean (q, p) mask; rows may overlap."""
        mask = np.asarray(mask, dtype=bool)
        if mask.ndim != 2:
            raise ValueError("mask must be two-dimensional")
        rows = tuple(tuple(np.flatnonzero(r).tolist()) for r in mask)
        return cls(mask.shape[1], mask.shape[0], "custom", rows)

    @property
    def r(self) -> int | None:
        """Common row support size, or None if rows differ in size."""
        sizes = {len(row) for row in self.rows}
        return sizes.pop() if len(sizes) == 1 else None

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self.rows)

    def mask(self) -> np.ndarray:
        """Boolean (q, p) mask with True where Omega may be nonzero."""
        m = np.zeros((self.q, self.p), dtype=bool)
        for k, row in enumerate(self.rows):
            m[k, list(row)] = True
        return m

    def offsets(self) -> np.ndarray:
        """Prefix offsets of each row's support in the flat nonzero layout."""
        return np.concatenate(([0], np.cumsum([len(r) for r in self.rows])))


@dataclass(frozen=True)
class EpisodeEncoding:
    """One episode's affine map, with Omega materialized densely."""

    omega: np.ndarray  # (layers*q, p)
    beta: np.ndarray  # (layers*q,)


@dataclass
class QksMachine:
    """A sampled bank of E random episode encodings for one template.

    ``omega`` stores only the nonzero entries, shape (E, layers, nnz), laid
    out row by row per the structure's offsets; ``beta`` has shape
    (E, layers*q). Machines are built by :func:`sample_machine`.
    """

    template: CircuitTemplate
    structure: EncodingStructure
    sigma: float
    episodes: int
    seed: int
    omega: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    layers: int = 1

    @property
    def num_qubits(self) -> int:
        return self.template.num_qubits

    @property
    def num_params(self) -> int:
        """Circuit parameters per episode (template params times layers)."""
        return self.layers * self.structure.q

    def encoding(self, episode: int) -> EpisodeEncoding:
        """Materialize episode e's (Omega_e, beta_e) as dense arrays."""
        if not 0 <= episode < self.episodes:
            raise IndexError(f"episode {episode} out of range")
        q = self.structure.q
        off = self.structure.offsets()
        dense = np.zeros((self.num_params, self.structure.p))
        for layer in range(self.layers):
            for k, row in enumerate(self.structure.rows):
                dense[layer * q + k, list(row)] = self.omega[
                    episode, layer, off[k] : off[k + 1]
                ]
        return EpisodeEncoding(dense, self.beta[episode].copy())

    def encode(self, u: np.ndarray, episode: int) -> np.ndarray:
        """theta = Omega_e u + beta_e for one input vector."""
        if not 0 <= episode < self.episodes:
            raise IndexError(f"episode {episode} out of range")
        u = np.asarray(u, dtype=np.float64)
        if u.shape != (self.structure.p,):
            raise ValueError(
                f"expected input of shape ({self.structure.p},), got {u.shape}"
            )
        return self.encode_batch(u[np.newaxis, :], slice(episode, episode + 1))[0, 0]

    def encode_batch(
        self, inputs: np.ndarray, episode_slice: slice | None = None
    ) -> np.ndarray:
        """Parameter tensor of shape (M, E_slice, layers*q).

        Computed tile by tile: for parameter k, theta[:, :, k] =
        inputs[:, rows[k]] @ omega[:, layer, k-support].T + beta. Each
        matmul's shape depends only on (M, row size, episode count), never
        on any worker split, which keeps results bit-reproducible.
        """
        inputs = np.asarray(inputs, dtype=np.float64)
        if inputs.ndim != 2 or inputs.shape[1] != self.structure.p:
            raise ValueError(
                f"expected inputs of shape (M, {self.structure.p}), "
                f"got {inputs.shape}"
            )
        sl = episode_slice if episode_slice is not None else slice(0, self.episodes)
        omega = self.omega[sl]
        beta = self.beta[sl]
        m, n_eps = inputs.shape[0], omega.shape[0]
        q = self.structure.q
        off = self.structure.offsets()
        theta = np.empty((m, n_eps, self.num_params))
        for layer in range(self.layers):
            for k, row in enumerate(self.structure.rows):
                w = omega[:, layer, off[k] : off[k + 1]]  # (E, r_k)
                theta[:, :, layer * q + k] = inputs[:, list(row)] @ w.T
        theta += beta[np.newaxis, :, :]
        return theta


def sample_machine(
    template: CircuitTemplate,
    structure: EncodingStructure,
    sigma: float,
    episodes: int,
    seed: int,
    layers: int = 1,
) -> QksMachine:
    """Draw a machine: E episodes of (Omega_e, beta_e) for the template.

    The structure's q must match the template's parameter count (per layer).
    sigma is the standard deviation of the Omega nonzeros; sigma = 0 is the
    degenerate input-independent machine, negative sigma is an error.
    """
    if structure.q != template.num_params:
        raise ValueError(
            f"structure has q={structure.q} parameters per layer but template "
            f"{template.name!r} declares {template.num_params}"
        )
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    if layers < 1:
        raise ValueError("layers must be >= 1")

    omega_rng = _substream(seed, TAG_OMEGA)
    beta_rng = _substream(seed, TAG_BETA)
    omega = omega_rng.normal(0.0, 1.0, size=(episodes, layers, structure.nnz))
    omega *= sigma
    beta = beta_rng.uniform(0.0, TWO_PI, size=(episodes, layers * structure.q))
    return QksMachine(
        template=template,
        structure=structure,
        sigma=float(sigma),
        episodes=int(episodes),
        seed=int(seed),
        omega=omega,
        beta=beta,
        layers=int(layers),
    )


def shot_stream(seed: int, example_index: int) -> np.random.Generator:
    """Uniform-variate stream for one example's measurement shots.

    Keyed by (seed, example), with episode e consuming the e-th draw, so
    features are deterministic in (seed, example, episode) and truncating or
    extending the episode count never disturbs earlier episodes.
    """
    if example_index < 0:
        raise ValueError("example_index must be >= 0")
    return _substream(seed, TAG_SHOTS, int(example_index))

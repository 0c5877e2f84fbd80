"""Gaussian-process RSSI model over sender/receiver position pairs.

The prior mean is a log-distance path loss; the covariance is a squared
exponential over a symmetrised pair distance (swapping sender and
receiver leaves the channel unchanged).  All RSSI quantities are in dB,
variances in dB^2, positions and length scales in meters.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg


class ChannelError(ValueError):
    """Raised for invalid hyperparameters, samples, or prediction inputs."""


@dataclass(frozen=True)
class ChannelHyperparams:
    """Path-loss and shadowing/fading hyperparameters.

    l0_db: received power at 1 m from the source.
    path_loss_exponent: log-distance decay exponent (> 0).
    fading_var: uncorrelated fading variance (dB^2).
    shadowing_var: spatially correlated shadowing variance (dB^2).
    length_scale: shadowing correlation length (m).
    """

    l0_db: float
    path_loss_exponent: float
    fading_var: float
    shadowing_var: float
    length_scale: float

    def __post_init__(self):
        if self.fading_var < 0:
            raise ChannelError(f"fading variance must be >= 0, got {self.fading_var}")
        if self.shadowing_var < 0:
            raise ChannelError(
                f"shadowing variance must be >= 0, got {self.shadowing_var}"
            )
        if self.length_scale <= 0:
            raise ChannelError(f"length scale must be > 0, got {self.length_scale}")
        if self.path_loss_exponent <= 0:
            raise ChannelError(
                f"path loss exponent must be > 0, got {self.path_loss_exponent}"
            )


@dataclass(frozen=True)
class PairSample:
    """One RSSI measurement for a (sender, receiver) position pair."""

    sender: tuple[float, float]
    receiver: tuple[float, float]
    rssi_db: float

    def __post_init__(self):
        s = (float(self.sender[0]), float(self.sender[1]))
        r = (float(self.receiver[0]), float(self.receiver[1]))
        object.__setattr__(self, "sender", s)
        object.__setattr__(self, "receiver", r)
        object.__setattr__(self, "rssi_db", float(self.rssi_db))
        if s == r:
            raise ChannelError(f"sender and receiver coincide at {s}")

    def stacked(self) -> np.ndarray:
        return np.array([*self.sender, *self.receiver], dtype=float)


def _stack(pair) -> np.ndarray:
    if isinstance(pair, PairSample):
        return pair.stacked()
    arr = np.asarray(pair, dtype=float).reshape(-1)
    if arr.size != 4:
        raise ChannelError(f"a position pair has 4 coordinates, got {arr.size}")
    return arr


def pair_distance(y, y2) -> float:
    """Swap-symmetric distance between two sender/receiver pairs."""
    a = _stack(y)
    b = _stack(y2)
    b_swapped = np.concatenate([b[2:], b[:2]])
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a - b_swapped)))


def path_loss_mean(h: ChannelHyperparams, y) -> float:
    """Prior mean m(y) = L0 - 10 n log10(|p_s - p_r|)."""
    a = _stack(y)
    dist = float(np.linalg.norm(a[:2] - a[2:]))
    if dist <= 0.0:
        raise ChannelError("path loss undefined at zero sender-receiver distance")
    return h.l0_db - 10.0 * h.path_loss_exponent * np.log10(dist)


def kernel(h: ChannelHyperparams, y, y2) -> float:
    """Shadowing covariance sigma_k^2 exp(-d(y,y2)^2 / (2 l^2))."""
    d = pair_distance(y, y2)
    return float(h.shadowing_var * np.exp(-(d * d) / (2.0 * h.length_scale**2)))


def _pairwise_distance_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Pair distance between every row of A (m,4) and of B (k,4)."""
    B_swapped = np.concatenate([B[:, 2:], B[:, :2]], axis=1)
    d_plain = np.linalg.norm(A[:, None, :] - B[None, :, :], axis=2)
    d_swapped = np.linalg.norm(A[:, None, :] - B_swapped[None, :, :], axis=2)
    return np.minimum(d_plain, d_swapped)


def _mean_many(h: ChannelHyperparams, Y: np.ndarray) -> np.ndarray:
    dist = np.linalg.norm(Y[:, :2] - Y[:, 2:], axis=1)
    if np.any(dist <= 0.0):
        raise ChannelError("path loss undefined at zero sender-receiver distance")
    return h.l0_db - 10.0 * h.path_loss_exponent * np.log10(dist)


def _kernel_many(h: ChannelHyperparams, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    d = _pairwise_distance_matrix(A, B)
    return h.shadowing_var * np.exp(-(d * d) / (2.0 * h.length_scale**2))


@dataclass(frozen=True)
class GpChannelModel:
    """Fitted GP posterior; immutable, predictions are pure."""

    hyperparams: ChannelHyperparams
    training: tuple[PairSample, ...]
    _chol: np.ndarray | None = field(repr=False, default=None)
    _weights: np.ndarray | None = field(repr=False, default=None)
    _train_matrix: np.ndarray | None = field(repr=False, default=None)

    @property
    def sample_count(self) -> int:
        return len(self.training)

    def predict_mean(self, y) -> float:
        return float(self.predict_mean_many(np.asarray(_stack(y))[None, :])[0])

    def predict_mean_many(self, Y: np.ndarray) -> np.ndarray:
        """Posterior mean RSSI for each stacked pair row of Y (m, 4)."""
        Y = np.asarray(Y, dtype=float)
        mean = _mean_many(self.hyperparams, Y)
        if self._weights is None:
            return mean
        C_yT = _kernel_many(self.hyperparams, Y, self._train_matrix)
        return mean + C_yT @ self._weights

    def predict_variance(self, y) -> float:
        """Posterior variance C(y,y) - C_yT [C_T + s_F^2 I]^-1 C_Ty + s_F^2."""
        h = self.hyperparams
        row = _stack(y)[None, :]
        _mean_many(h, row)  # raises on zero distance
        prior = h.shadowing_var + h.fading_var
        if self._chol is None:
            return float(prior)
        C_yT = _kernel_many(h, row, self._train_matrix)
        solved = scipy.linalg.cho_solve((self._chol, True), C_yT[0])
        return float(prior - C_yT[0] @ solved)


def fit(h: ChannelHyperparams, samples: Sequence[PairSample],
        jitter: float = 1e-9) -> GpChannelModel:
    """Fit the GP: factorise C_T + sigma_F^2 I and precompute the residual
    weights.  An empty sample list yields the prior model.

    On a failed factorisation, ``jitter`` is added to the diagonal once
    and the factorisation retried; a second failure raises ChannelError
    naming the offending pivot.
    """
    samples = tuple(samples)
    if not samples:
        return GpChannelModel(h, samples)
    Y = np.stack([s.stacked() for s in samples])
    z = np.array([s.rssi_db for s in samples], dtype=float)
    C = _kernel_many(h, Y, Y) + h.fading_var * np.eye(len(samples))
    chol = _cholesky_or_raise(C, jitter)
    residual = z - _mean_many(h, Y)
    weights = scipy.linalg.cho_solve((chol, True), residual)
    return GpChannelModel(
        h, samples, _chol=chol, _weights=weights, _train_matrix=Y
    )


def _cholesky_or_raise(C: np.ndarray, jitter: float) -> np.ndarray:
    for attempt, bump in enumerate((0.0, jitter)):
        try:
            return scipy.linalg.cholesky(
                C + bump * np.eye(C.shape[0]), lower=True
            )
        except scipy.linalg.LinAlgError:
            if attempt == 1:
                break
    raise ChannelError(
        "kernel matrix is not positive definite "
        f"(failing pivot index {_failing_pivot(C)}); near-duplicate samples "
        "with zero fading variance are the usual cause"
    )


def _failing_pivot(C: np.ndarray) -> int:
    """Index of the first non-positive pivot in an unpivoted Cholesky sweep."""
    A = C.copy()
    n = A.shape[0]
    for k in range(n):
        if A[k, k] <= 0.0 or not np.isfinite(A[k, k]):
            return k
        A[k, k] = np.sqrt(A[k, k])
        if k + 1 < n:
            A[k + 1 :, k] /= A[k, k]
            A[k + 1 :, k + 1 :] -= np.outer(A[k + 1 :, k], A[k + 1 :, k])
    return n - 1


@dataclass(frozen=True)
class GridSpec:
    """Square partition grid: N x N cells of size d starting at (x_min, y_min)."""

    cells_per_side: int
    cell_size: float
    x_min: float
    y_min: float

    def __post_init__(self):
        if self.cells_per_side < 1:
            raise ChannelError(
                f"grid needs at least one cell per side, got {self.cells_per_side}"
            )
        if self.cell_size <= 0:
            raise ChannelError(f"cell size must be > 0, got {self.cell_size}")

    @property
    def partition_count(self) -> int:
        return self.cells_per_side**2

    def center(self, r: int) -> np.ndarray:
        """Center of 1-based partition r, with r = (row-1)*N + col where the
        row index follows the x axis and the column index the y axis."""
        if not 1 <= r <= self.partition_count:
            raise ChannelError(f"partition index {r} outside 1..{self.partition_count}")
        row = (r - 1) // self.cells_per_side  # x band, 0-based
        col = (r - 1) % self.cells_per_side  # y band, 0-based
        return np.array(
            [
                self.x_min + (row + 0.5) * self.cell_size,
                self.y_min + (col + 0.5) * self.cell_size,
            ]
        )

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        """1-based (row, col) of a position; boundary points round down."""
        row = int(np.floor((x - self.x_min) / self.cell_size)) + 1
        col = int(np.floor((y - self.y_min) / self.cell_size)) + 1
        row = min(max(row, 1), self.cells_per_side)
        col = min(max(col, 1), self.cells_per_side)
        return row, col

    def partition_of(self, x: float, y: float) -> int:
        row, col = self.cell_of(x, y)
        return (row - 1) * self.cells_per_side + col


@dataclass(frozen=True)
class GainMatrix:
    """Reciprocal-RSSI gain matrix over partition center pairs (1/dB)."""

    entries: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        n = self.grid.partition_count
        if arr.shape != (n, n):
            raise ChannelError(f"gain matrix must be {n}x{n}, got {arr.shape}")
        object.__setattr__(self, "entries", arr)

    def at(self, i: int, j: int) -> float:
        """Gain for 1-based partition indices."""
        return float(self.entries[i - 1, j - 1])


def build_gain_matrix(
    model: GpChannelModel, grid: GridSpec, rssi_exclusion_db: float = 0.1
) -> GainMatrix:
    """G_{ij} = 1 / (predicted RSSI between centers of partitions i and j).

    Same-partition pairs have zero center distance, which the log path
    loss cannot price; they are evaluated at a receiver offset of half a
    cell along +x instead.  Predictions inside ``rssi_exclusion_db`` of
    0 dB are rejected, as is a mix of positive and negative RSSI (the
    occupancy cost is only meaningful for a consistent sign).
    """
    n = grid.partition_count
    centers = np.stack([grid.center(r) for r in range(1, n + 1)])
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    pairs = np.concatenate(
        [centers[ii.ravel()], centers[jj.ravel()]], axis=1
    ).astype(float)
    same = ii.ravel() == jj.ravel()
    pairs[same, 2] += grid.cell_size / 2.0
    rssi = model.predict_mean_many(pairs).reshape(n, n)
    bad = np.abs(rssi) <= rssi_exclusion_db
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise ChannelError(
            f"predicted RSSI between partitions {i + 1} and {j + 1} is "
            f"{rssi[i, j]:.4f} dB, inside the +/-{rssi_exclusion_db} dB exclusion band"
        )
    if np.any(rssi > 0) and np.any(rssi < 0):
        raise ChannelError(
            "predicted RSSI changes sign across partition pairs; the "
            "communication cost needs a consistent sign"
        )
    return GainMatrix(1.0 / rssi, grid)


TRAINING_CSV_HEADER = ["sx", "sy", "rx", "ry", "rssi_db"]


def read_training_csv(source) -> list[PairSample]:
    """Read pair samples from CSV with header sx,sy,rx,ry,rssi_db."""
    if isinstance(source, (str, bytes)):
        text = source.decode("utf-8") if isinstance(source, bytes) else source
        handle = io.StringIO(text)
    else:
        handle = source
    reader = csv.DictReader(handle)
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != TRAINING_CSV_HEADER:
        raise ChannelError(
            f"training CSV must have header {','.join(TRAINING_CSV_HEADER)}, "
            f"got {reader.fieldnames}"
        )
    samples = []
    for lineno, row in enumerate(reader, start=2):
        try:
            samples.append(
                PairSample(
                    (float(row["sx"]), float(row["sy"])),
                    (float(row["rx"]), float(row["ry"])),
                    float(row["rssi_db"]),
                )
            )
        except (TypeError, ValueError) as exc:
            raise ChannelError(f"training CSV line {lineno}: {exc}") from exc
    return samples

"""Dense-matrix kernel, seeded randomness, He initialization, stable softmax.

Randomness is backed by numpy's PCG64 bit generator; standard normals come
from numpy's ziggurat implementation of ``Generator.standard_normal``. Both
produce identical streams for identical seeds on every platform, so every
random artifact in the package is reproducible from seeds alone.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, NumericFailure

__all__ = [
    "Matrix",
    "RngState",
    "matmul",
    "softmax",
    "softmax_rows",
    "he_normal_init",
    "normal_sample",
]


class Matrix:
    """Dense row-major float64 matrix; the sole numeric container.

    The backing array is C-contiguous, so ``values`` enumerates entries in
    row-major order and serialized matrices are portable. Construction
    rejects non-finite entries; the trainer's in-place parameter updates are
    the only writes that bypass this check (the training loop re-checks
    finiteness through the batch loss at every step).

    Note: probabilities may underflow to exactly 0 under softmax for logit
    gaps larger than ~745; the loss layer clamps before taking logs.
    """

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray | Sequence[Sequence[float]]):
        arr = np.ascontiguousarray(data, dtype=np.float64)
        if arr.ndim != 2:
            raise ConfigurationError(f"matrix must be 2-D, got {arr.ndim}-D")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ConfigurationError(f"matrix dims must be positive, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise NumericFailure("matrix contains non-finite values")
        self.data = arr

    @classmethod
    def from_values(cls, rows: int, cols: int, values: Sequence[float]) -> "Matrix":
        vals = np.asarray(values, dtype=np.float64)
        if vals.ndim != 1 or vals.size != rows * cols:
            raise ConfigurationError(
                f"expected {rows * cols} values for a {rows}x{cols} matrix, got {vals.size}"
            )
        return cls(vals.reshape(rows, cols))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(np.zeros((rows, cols)))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(np.eye(n))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def values(self) -> np.ndarray:
        """Entries in row-major order, length rows*cols."""
        return self.data.ravel()

    def copy(self) -> "Matrix":
        return Matrix(self.data.copy())

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols})"


class RngState:
    """Deterministic random source: one PCG64 stream per seed.

    Single-owner by contract: never share an instance across threads. All
    draws consume the stream in call order, so replaying the same calls from
    the same seed reproduces every value bit-for-bit.
    """

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))

    def standard_normals(self, *shape: int) -> np.ndarray:
        return self._gen.standard_normal(shape)

    def uniforms(self, *shape: int) -> np.ndarray:
        return self._gen.random(shape)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def integers(self, low: int, high: int, size: int | None = None):
        """Uniform integers in [low, high)."""
        return self._gen.integers(low, high, size=size)

    def __repr__(self) -> str:
        return f"RngState(seed={self.seed})"


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Matrix product; dims (a.rows, b.cols)."""
    if a.cols != b.rows:
        raise ConfigurationError(
            f"matmul dimension mismatch: {a.rows}x{a.cols} by {b.rows}x{b.cols}"
        )
    out = a.data @ b.data
    if not np.isfinite(out).all():
        raise NumericFailure("matmul overflowed to non-finite values")
    return Matrix(out)


def softmax(logits: Sequence[float] | np.ndarray) -> np.ndarray:
    """Probability vector from logits, stabilized by max-subtraction.

    Output is nonnegative, sums to 1 within 1e-12, and is invariant under
    adding a constant to all logits.
    """
    z = np.asarray(logits, dtype=np.float64)
    if z.ndim != 1:
        raise ConfigurationError(f"softmax expects a vector, got {z.ndim}-D input")
    if not np.isfinite(z).all():
        raise NumericFailure("softmax input contains non-finite values")
    e = np.exp(z - z.max())
    return e / e.sum()

def softmax_rows(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax for a batch of logit rows."""
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def he_normal_init(rng: RngState, fan_in: int, fan_out: int) -> Matrix:
    """Weights drawn from N(0, 2/fan_in), shape (fan_in, fan_out).

    The zero-mean normal with standard deviation sqrt(2/fan_in) is the
    variance-preserving choice for ReLU layers. Biases are initialized to
    zero elsewhere; this routine only produces weight matrices.
    """
    if fan_in < 1 or fan_out < 1:
        raise DomainError(f"fan_in and fan_out must be >= 1, got {fan_in}, {fan_out}")
    std = math.sqrt(2.0 / fan_in)
    return Matrix(rng.standard_normals(fan_in, fan_out) * std)


def normal_sample(rng: RngState) -> float:
    """One standard-normal draw (numpy ziggurat) from the given stream."""
    return float(rng.standard_normals())

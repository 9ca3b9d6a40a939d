"""Monte-Carlo simulation of source compression with classical side information.

The encoder bins source strings at random into 2^m bins (the identity map when the bins
can hold every string) and the decoder picks the most likely string in the received bin
given the side information, lowest index first on ties.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from functools import cache, cached_property

import numpy as np

from sel.entropy import ClassicalDist
from sel.errors import ArgumentError
from sel.metrics import trace_distance
from sel.operators import MultipartiteState, SystemLayout

logger = logging.getLogger(__name__)

MAX_STRINGS = 10**7
SHARD_TRIALS = 1000


def _check_size(source: ClassicalDist, n: int) -> int:
    if n < 1:
        raise ArgumentError(f"block length must be at least 1, got {n}")
    dz, db = source.shape
    if dz**n * db > MAX_STRINGS:
        raise ArgumentError(
            f"{dz}^{n} source strings with {db} side symbols exceed the simulator size"
        )
    return dz**n


@cache
def source_strings(d: int, n: int) -> np.ndarray:
    """All length-n strings over d symbols, one per row, in lexicographic order."""
    strings = np.stack(np.unravel_index(np.arange(d**n), (d,) * n), axis=1)
    strings.setflags(write=False)
    return strings


def random_binning(count: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Bin index of each of `count` strings; injective when 2^m >= count."""
    if m < 0:
        raise ArgumentError(f"message length must be non-negative, got {m}")
    if 2**m >= count:
        return np.arange(count)
    return rng.integers(0, 2**m, size=count)


@dataclass(frozen=True, eq=False)
class CompressionProtocol:
    """Encoder table over the source strings of length n, with a MAP decoder."""

    source: ClassicalDist
    n: int
    encoder: np.ndarray

    @property
    def strings(self) -> np.ndarray:
        return source_strings(self.source.shape[0], self.n)

    @cached_property
    def log_p(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.source.probabilities)

    def index(self, z: np.ndarray) -> int:
        return int(np.ravel_multi_index(tuple(z), (self.source.shape[0],) * self.n))

    def encode(self, index: int) -> int:
        return int(self.encoder[index])

    def decode(self, bin_index: int, side: np.ndarray) -> int:
        members = np.flatnonzero(self.encoder == bin_index)
        scores = self.log_p[self.strings[members], side].sum(axis=1)
        return int(members[np.argmax(scores)])


def _run_shard(
    source: ClassicalDist, n: int, m: int, trials: int, seed: np.random.SeedSequence
) -> int:
    rng = np.random.default_rng(seed)
    dz, db = source.shape
    flat = source.probabilities.reshape(-1)
    errors = 0
    for _ in range(trials):
        z, side = np.divmod(rng.choice(flat.size, size=n, p=flat), db)
        protocol = CompressionProtocol(source, n, random_binning(dz**n, m, rng))
        index = protocol.index(z)
        errors += protocol.decode(protocol.encode(index), side) != index
    return errors


@dataclass(frozen=True)
class SimulationResult:
    errors: int
    trials: int

    @property
    def p_err(self) -> float:
        return self.errors / self.trials

    def binomial_sigma(self, p: float) -> float:
        return math.sqrt(p * (1 - p) / self.trials)


def shard_plan(trials: int) -> list[int]:
    full, rest = divmod(trials, SHARD_TRIALS)
    return [SHARD_TRIALS] * full + ([rest] if rest else [])


def compress_simulate(
    p_zb: ClassicalDist | np.ndarray,
    n: int,
    m: int,
    trials: int,
    seed: int,
    workers: int = 1,
) -> SimulationResult:
    """Empirical error of random binning at message length m over i.i.d. blocks of length n."""
    source = p_zb if isinstance(p_zb, ClassicalDist) else ClassicalDist(np.asarray(p_zb))
    _check_size(source, n)
    if trials < 1:
        raise ArgumentError(f"need at least one trial, got {trials}")
    sizes = shard_plan(trials)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    errors = 0
    if workers <= 1:
        for i, (size, s) in enumerate(zip(sizes, seeds, strict=True)):
            logger.debug(f"compression shard {i}: {size} trials")
            errors += _run_shard(source, n, m, size, s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(_run_shard, source, n, m, size, s): i
                for i, (size, s) in enumerate(zip(sizes, seeds, strict=True))
            }
            for fut in as_completed(futures):
                logger.debug(f"compression shard {futures[fut]} finished")
                errors += fut.result()
    return SimulationResult(errors=int(errors), trials=trials)


def _decoded_joint(protocol: CompressionProtocol) -> tuple[np.ndarray, np.ndarray]:
    """P(z^n) and the joint distribution of (z^n, decoded string)."""
    source = protocol.source
    dz, db = source.shape
    count = dz**protocol.n
    sides = source_strings(db, protocol.n)
    joint = np.zeros((count, count))
    for index, z in enumerate(protocol.strings):
        for side in sides:
            p = float(np.prod(source.probabilities[z, side]))
            if p > 0:
                joint[index, protocol.decode(protocol.encode(index), side)] += p
    return joint.sum(axis=1), joint


def compression_error(protocol: CompressionProtocol) -> float:
    """Exact error probability of a fixed protocol by enumeration."""
    _check_size(protocol.source, protocol.n)
    _, joint = _decoded_joint(protocol)
    return float(joint.sum() - np.trace(joint))


def compression_error_from_trace_distance(protocol: CompressionProtocol) -> float:
    """D(rho_ZZ', chi_ZZ') between the decoded joint state and the perfectly correlated one."""
    _check_size(protocol.source, protocol.n)
    p_z, joint = _decoded_joint(protocol)
    count = p_z.size
    layout = SystemLayout.of(("Z", count), ("Z'", count))
    rho = MultipartiteState.from_diagonal(joint.reshape(-1), layout)
    chi = MultipartiteState.from_diagonal(np.diag(p_z).reshape(-1), layout)
    return trace_distance(rho, chi).value

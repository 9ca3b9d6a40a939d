"""Exact evaluation of Toeplitz-hash randomness extraction against classical side information."""

from __future__ import annotations

import itertools
import logging

import numpy as np
from scipy import optimize

from sel.entropy import ClassicalDist
from sel.errors import ArgumentError, SolverError

logger = logging.getLogger(__name__)

MAX_Z_BITS = 12
MAX_E = 2**6
MAX_EXHAUSTIVE_SEED_BITS = 20
DEFAULT_SAMPLES = 4096
DEFAULT_SEED = 0


def toeplitz_matrix(seed_bits: np.ndarray, ell: int, k: int) -> np.ndarray:
    """ell x k binary Toeplitz matrix T[i, j] = s[i - j + k - 1] from ell + k - 1 seed bits."""
    s = np.asarray(seed_bits, dtype=np.uint8)
    if s.shape != (ell + k - 1,):
        raise ArgumentError(f"a {ell}x{k} Toeplitz matrix needs {ell + k - 1} seed bits")
    i, j = np.meshgrid(np.arange(ell), np.arange(k), indexing="ij")
    return s[i - j + k - 1]


def _bits(values: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1)
    return (values[:, None] >> shifts) & 1


def hash_outputs(t: np.ndarray, k: int) -> np.ndarray:
    """Output index f(z) = T z over GF(2) for every input z in [0, 2^k)."""
    ell = t.shape[0]
    z_bits = _bits(np.arange(2**k), k)
    s_bits = (z_bits @ t.T.astype(np.int64)) % 2
    return s_bits @ (1 << np.arange(ell - 1, -1, -1)) if ell else np.zeros(2**k, dtype=np.int64)


def output_joint(p_ze: ClassicalDist, t: np.ndarray) -> np.ndarray:
    """P(s, e) = sum_z P(z, e) [f(z) = s], shape (2^ell, |E|)."""
    dz, de = p_ze.shape
    k = _input_bits(dz)
    out = np.zeros((2 ** t.shape[0], de))
    np.add.at(out, hash_outputs(t, k), p_ze.probabilities)
    return out


def _input_bits(dz: int) -> int:
    k = dz.bit_length() - 1
    if dz != 2**k:
        raise ArgumentError(f"source alphabet size {dz} is not a power of two")
    return k


def delta_marginal(p_se: np.ndarray) -> float:
    """sum_e P(e) 1/2 ||P_S|e - uniform||_1, the distance to uniform with sigma_E = rho_E."""
    uniform = p_se.sum(axis=0, keepdims=True) / p_se.shape[0]
    return 0.5 * float(np.abs(p_se - uniform).sum())


def delta_exact(p_se: np.ndarray) -> float:
    """min over normalized sigma_E of 1/2 ||rho_SE - pi_S ⊗ sigma_E||_1 for a diagonal rho_SE.

    The minimizer can be taken diagonal, which leaves a linear program over its spectrum.
    """
    ls, de = p_se.shape
    n_t = ls * de
    # variables: t (one per (s, e)), then q (one per e)
    c = np.concatenate([np.full(n_t, 0.5), np.zeros(de)])
    spread = np.zeros((n_t, de))
    for s, e in itertools.product(range(ls), range(de)):
        spread[s * de + e, e] = 1 / ls
    eye = np.eye(n_t)
    p = p_se.reshape(-1)
    a_ub = np.block([[-eye, -spread], [-eye, spread]])
    b_ub = np.concatenate([-p, p])
    a_eq = np.concatenate([np.zeros(n_t), np.ones(de)])[None, :]
    res = optimize.linprog(
        c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=[(0, None)] * (n_t + de)
    )
    if res.status != 0:
        raise SolverError(f"distance-to-uniform linear program failed: {res.message}")
    return float(res.fun)


def _seed_rows(
    width: int, samples: int | None, seed: int | None, default_samples: int, default_seed: int
) -> np.ndarray:
    """Seed bit rows to average over: every seed when they fit, otherwise a seeded sample."""
    if samples is not None:
        if seed is None or samples < 1:
            raise ArgumentError("sampled seeds need a positive sample count and a seed")
        return np.random.default_rng(seed).integers(0, 2, size=(samples, width))
    if width <= MAX_EXHAUSTIVE_SEED_BITS:
        return _bits(np.arange(2**width), width)
    if default_samples < 1:
        raise ArgumentError(f"default sample count must be positive, got {default_samples}")
    drawn_from = default_seed if seed is None else seed
    logger.debug(
        f"{width} seed bits exceed exhaustive enumeration; "
        f"sampling {default_samples} seeds from seed {drawn_from}"
    )
    return np.random.default_rng(drawn_from).integers(0, 2, size=(default_samples, width))


def extract_simulate(
    p_ze: ClassicalDist | np.ndarray,
    ell: int,
    samples: int | None = None,
    seed: int | None = None,
    exact: bool = False,
    default_samples: int = DEFAULT_SAMPLES,
    default_seed: int = DEFAULT_SEED,
) -> float:
    """Average distance from uniform of the hashed key over Toeplitz seeds.

    All seeds are enumerated unless `samples` is given, in which case that many seeds
    are drawn from `seed`. Past 2^20 seeds and without `samples`, `default_samples` seeds
    are drawn from `seed` or `default_seed`. `exact` minimizes over sigma_E instead of
    fixing sigma_E = rho_E.
    """
    dist = p_ze if isinstance(p_ze, ClassicalDist) else ClassicalDist(np.asarray(p_ze))
    dz, de = dist.shape
    k = _input_bits(dz)
    if k > MAX_Z_BITS or de > MAX_E:
        raise ArgumentError(f"|Z| = {dz}, |E| = {de} exceed the exact evaluation size")
    if ell < 0:
        raise ArgumentError(f"output length must be non-negative, got {ell}")
    if ell == 0:
        return 0.0
    seeds = _seed_rows(ell + k - 1, samples, seed, default_samples, default_seed)
    measure = delta_exact if exact else delta_marginal
    total = 0.0
    for bits in seeds:
        total += measure(output_joint(dist, toeplitz_matrix(bits, ell, k)))
    avg = total / len(seeds)
    logger.debug(f"average distance {avg:.6g} over {len(seeds)} Toeplitz seeds, ell = {ell}")
    return avg


def collision_probability(
    ell: int,
    k: int,
    z1: int,
    z2: int,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> float:
    """Fraction of Toeplitz seeds with f(z1) = f(z2), at most 2^-ell for z1 != z2.

    Exact over all seeds up to 2^20 of them, an estimate from `samples` seeds beyond.
    """
    seeds = _seed_rows(ell + k - 1, None, None, samples, seed)
    hits = 0
    for bits in seeds:
        out = hash_outputs(toeplitz_matrix(bits, ell, k), k)
        hits += out[z1] == out[z2]
    return hits / len(seeds)

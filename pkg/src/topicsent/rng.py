"""Seeded 64-bit generator shared by the numba samplers.

xorshift64* (Vigna 2016: shifts 12/25/27, multiplier 0x2545F4914F6CDD1D),
seeded through one splitmix64 step so that small seeds still give a
well-mixed nonzero state. Uniform doubles take the top 53 bits.

State lives in a length-1 uint64 array so jitted code can advance it in place.
"""
import numba
import numpy as np

MASK = (1 << 64) - 1
MULT = 0x2545F4914F6CDD1D


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def make_state(seed):
    s = splitmix64(int(seed) & MASK)
    if s == 0:
        s = 0x9E3779B97F4A7C15
    return np.array([s], dtype=np.uint64)


def next_u64_py(state):
    """Pure-Python reference; advances ``state`` (a one-item list)."""
    x = state[0]
    x ^= x >> 12
    x ^= (x << 25) & MASK
    x ^= x >> 27
    state[0] = x
    return (x * MULT) & MASK


@numba.njit(cache=True)
def next_u64(state):
    x = state[0]
    x ^= x >> numba.uint64(12)
    x ^= x << numba.uint64(25)
    x ^= x >> numba.uint64(27)
    state[0] = x
    return x * numba.uint64(0x2545F4914F6CDD1D)


@numba.njit(cache=True)
def uniform(state):
    return (next_u64(state) >> numba.uint64(11)) * (1.0 / 9007199254740992.0)


@numba.njit(cache=True)
def randint(state, n):
    k = int(uniform(state) * n)
    return k if k < n else n - 1


@numba.njit(cache=True)
def normal(state):
    # Box-Muller, one draw per call.
    u1 = uniform(state)
    while u1 <= 0.0:
        u1 = uniform(state)
    u2 = uniform(state)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


@numba.njit(cache=True)
def _fill_uniform(state, out):
    for i in range(out.shape[0]):
        out[i] = uniform(state)


def uniforms(state, n):
    out = np.empty(n)
    _fill_uniform(state, out)
    return out

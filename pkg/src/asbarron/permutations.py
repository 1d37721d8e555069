"""Permutation tables for explicit anti-symmetrisation.

Tables are produced by Heap's algorithm, which reaches every permutation
through a single transposition, so the sign flips at every step.
"""

from functools import lru_cache
import math

import numpy as np

from ._errors import CapabilityError, InputError

MAX_PARTICLES = 10


def heap_permutations(n):
    """Yield ``(perm, sign)`` for all permutations of ``range(n)``.

    ``perm`` is a fresh tuple; ``sign`` is +1 or -1 and is tracked
    incrementally rather than recomputed from cycle structure.
    """
    if n < 0:
        raise InputError("n must be non-negative")
    a = list(range(n))
    c = [0] * n
    sign = 1
    yield tuple(a), sign
    i = 1
    while i < n:
        if c[i] < i:
            if i % 2 == 0:
                a[0], a[i] = a[i], a[0]
            else:
                a[c[i]], a[i] = a[i], a[c[i]]
            sign = -sign
            yield tuple(a), sign
            c[i] += 1
            i = 1
        else:
            c[i] = 0
            i += 1


def parity(perm):
    """Sign of a permutation from its cycle decomposition."""
    perm = list(perm)
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def _table(n):
    perms = np.empty((math.factorial(n), n), dtype=np.int64)
    signs = np.empty(math.factorial(n), dtype=np.float64)
    for k, (p, s) in enumerate(heap_permutations(n)):
        perms[k] = p
        signs[k] = s
    perms.flags.writeable = False
    signs.flags.writeable = False
    return perms, signs


def permutation_table(n, limit=MAX_PARTICLES):
    """Return read-only arrays ``(perms, signs)`` of shape ``(n!, n)``, ``(n!,)``."""
    if n < 1:
        raise InputError("need at least one particle")
    if n > limit:
        raise CapabilityError(f"n={n} exceeds the enumeration cap {limit} ({n}! terms)")
    return _table(n)

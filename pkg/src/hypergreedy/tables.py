"""Published constants for the degree-greedy processes, keyed by ``(k, d)``.

The values are the three-decimal entries as printed; they look truncated
rather than rounded, so compare with a tolerance of a couple of units in the
last place.
"""
from __future__ import annotations

from .errors import InvalidParameters

K_RANGE = (3, 4, 5)
D_RANGE = (2, 3, 4, 5)

# scaled matching size
PRINTED_MATCHING = {
    (3, 2): 0.274, (3, 3): 0.284, (3, 4): 0.291, (3, 5): 0.296,
    (4, 2): 0.179, (4, 3): 0.181, (4, 4): 0.186, (4, 5): 0.190,
    (5, 2): 0.128, (5, 3): 0.127, (5, 4): 0.130, (5, 5): 0.132,
}

# scaled independent-set size
PRINTED_INDEPENDENT = {
    (3, 2): 0.666, (3, 3): 0.626, (3, 4): 0.600, (3, 5): 0.564,
    (4, 2): 0.749, (4, 3): 0.720, (4, 4): 0.694, (4, 5): 0.672,
    (5, 2): 0.799, (5, 3): 0.777, (5, 4): 0.755, (5, 5): 0.737,
}

PRINTED = {"matching": PRINTED_MATCHING, "independent": PRINTED_INDEPENDENT}


def nearest_valid_n(n: int, k: int, d: int) -> int:
    """Largest ``n' <= n`` for which ``k`` divides ``d * n'``.

    The pairing model needs ``k | d n``; e.g. ``k=3, d=4`` rules out ``n = 10**6``
    and this returns 999999.
    """
    if n < 1 or k < 1 or d < 1:
        raise InvalidParameters("n, k, d must be positive")
    while n > 0 and (d * n) % k:
        n -= 1
    if n == 0:
        raise InvalidParameters(f"no valid n for k={k}, d={d}")
    return n

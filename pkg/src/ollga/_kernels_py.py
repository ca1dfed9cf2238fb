"""Pure-Python hot kernels.

Twin of _kernels_cy: both consume the splitmix64 stream in exactly the
same order and must stay draw-for-draw identical, so that simulation
results do not depend on whether the compiled extension is available.

All functions thread the raw 64-bit generator state and return it
updated; wrappers in `engine` sync it back into the owning RngStream.

Draw-order contract (shared with the compiled twin):
  * binomial draws n unit doubles, one per trial, in order;
  * position subsets come from a partial Fisher-Yates, one bounded
    integer per chosen position;
  * crossover masks draw one unit double per differing position, in
    ascending position order;
  * argmax ties are broken by reservoir sampling: the t-th tying
    candidate replaces the incumbent iff one bounded draw below t is 0.
"""

from __future__ import annotations

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0


def _next(state: int) -> tuple[int, int]:
    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31), state


def _fitness(om: int, n: int, k: int) -> int:
    if om <= n - k or om == n:
        return om + k
    return n - om


def binomial(n: int, p: float, state: int) -> tuple[int, int]:
    """Bin(n, p) as a sum of n Bernoulli draws."""
    ell = 0
    for _ in range(n):
        u, state = _next(state)
        if (u >> 11) * _INV_2_53 < p:
            ell += 1
    return ell, state


def sample_positions(n: int, m: int, state: int) -> tuple[list[int], int]:
    """m distinct positions, uniform over m-subsets, in selection order."""
    idx = list(range(n))
    for j in range(m):
        u, state = _next(state)
        r = j + ((u * (n - j)) >> 64)
        idx[j], idx[r] = idx[r], idx[j]
    return idx[:m], state


def select_biased(positions: list[int], c: float, state: int) -> tuple[list[int], int]:
    """Each position kept independently with probability c, ascending order."""
    subset = []
    for q in positions:
        u, state = _next(state)
        if (u >> 11) * _INV_2_53 < c:
            subset.append(q)
    return subset, state


def mutation_phase(
    parent, parent_om: int, k: int, ell: int, lam_m: int, state: int
) -> tuple[list[int], int, int]:
    """Generate lam_m mutants at radius ell, return the winner.

    Returns (winner flip positions sorted ascending, hit offset, state)
    where hit offset is the 1-based index of the first mutant that is
    the global optimum, or 0.
    """
    n = len(parent)
    best_fit = -1
    ties = 0
    winner: list[int] = []
    hit = 0
    for i in range(lam_m):
        idx = list(range(n))
        delta = 0
        for j in range(ell):
            u, state = _next(state)
            r = j + ((u * (n - j)) >> 64)
            idx[j], idx[r] = idx[r], idx[j]
            delta += 1 - 2 * parent[idx[j]]
        om = parent_om + delta
        fit = _fitness(om, n, k)
        if om == n and hit == 0:
            hit = i + 1
        if fit > best_fit:
            best_fit = fit
            ties = 1
            winner = idx[:ell]
        elif fit == best_fit:
            ties += 1
            u, state = _next(state)
            if (u * ties) >> 64 == 0:
                winner = idx[:ell]
    winner.sort()
    return winner, hit, state


def crossover_phase(
    parent,
    parent_om: int,
    k: int,
    positions: list[int],
    c: float,
    lam_c: int,
    state: int,
) -> tuple[list[int], int, int]:
    """Generate lam_c biased-crossover offspring, return the winner.

    `positions` are the ascending positions where x' differs from the
    parent; the winner is returned as the subset taken from x'.
    """
    n = len(parent)
    best_fit = -1
    ties = 0
    winner: list[int] = []
    hit = 0
    for i in range(lam_c):
        subset = []
        delta = 0
        for q in positions:
            u, state = _next(state)
            if (u >> 11) * _INV_2_53 < c:
                subset.append(q)
                delta += 1 - 2 * parent[q]
        om = parent_om + delta
        fit = _fitness(om, n, k)
        if om == n and hit == 0:
            hit = i + 1
        if fit > best_fit:
            best_fit = fit
            ties = 1
            winner = subset
        elif fit == best_fit:
            ties += 1
            u, state = _next(state)
            if (u * ties) >> 64 == 0:
                winner = subset
    return winner, hit, state


def ga_iteration(
    parent: bytearray,
    parent_om: int,
    k: int,
    p: float,
    c: float,
    lam_m: int,
    lam_c: int,
    state: int,
) -> tuple[int, int, int]:
    """One full iteration; mutates `parent` in place on acceptance.

    Returns (new parent one-count, hit offset, state). Hit offset is the
    1-based evaluation index within the iteration (mutants first, then
    crossover offspring) at which the optimum was first sampled, or 0.
    """
    n = len(parent)
    ell, state = binomial(n, p, state)
    winner, hit_m, state = mutation_phase(parent, parent_om, k, ell, lam_m, state)
    subset, hit_c, state = crossover_phase(
        parent, parent_om, k, winner, c, lam_c, state
    )
    hit = hit_m if hit_m else (lam_m + hit_c if hit_c else 0)
    delta = sum(1 - 2 * parent[q] for q in subset)
    om_y = parent_om + delta
    if _fitness(om_y, n, k) >= _fitness(parent_om, n, k):
        for q in subset:
            parent[q] ^= 1
        parent_om = om_y
    return parent_om, hit, state


def ea_iteration(
    parent: bytearray, parent_om: int, k: int, rate: float, state: int
) -> tuple[int, int, int]:
    """One (1+1) EA iteration: per-bit flips, elitist acceptance."""
    n = len(parent)
    flips = []
    delta = 0
    for q in range(n):
        u, state = _next(state)
        if (u >> 11) * _INV_2_53 < rate:
            flips.append(q)
            delta += 1 - 2 * parent[q]
    om = parent_om + delta
    hit = 1 if om == n else 0
    if _fitness(om, n, k) >= _fitness(parent_om, n, k):
        for q in flips:
            parent[q] ^= 1
        parent_om = om
    return parent_om, hit, state

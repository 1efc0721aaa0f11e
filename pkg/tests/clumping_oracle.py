"""Independent oracles for the clumping guarantee, shared by the unit and acceptance tests."""

import itertools

from artifact.coarse import Cover
from artifact.simplicial import check_clumping, cover_clumping


def subfamily_violations(result, K, theta):
    """Check every subfamily of the clumped cover with a common point (no per-point shortcut)."""
    bad = []
    A = result.cover.sets if result.cover else []
    if not set(K) <= set().union(*A):
        bad.append("covers_K")
    for r in range(1, len(A) + 1):
        for fam in itertools.combinations(A, r):
            if frozenset.intersection(*fam):
                U = frozenset().union(*fam)
                if not any(U <= T for T in theta.sets):
                    bad.append(fam)
    return bad


def cover_from_signatures(sigs, k):
    """Point x lies in member i iff bit i of sigs[x] is set; empty members are left out."""
    sets = [[x for x, s in enumerate(sigs) if s >> i & 1] for i in range(k)]
    sets = [s for s in sets if s]
    return Cover.from_sets(len(sigs), sets) if sets else None


def run_signature_family(k, max_points, min_points=1):
    """Clump every cover whose points carry distinct membership signatures.

    Two points with equal signatures land in the same regions, so duplicating a
    point never changes the outcome; distinct signatures therefore exhaust all
    covers by k members on up to ``max_points`` points.  Returns (count, failures).
    """
    count, failures = 0, []
    for j in range(min_points, max_points + 1):
        for sigs in itertools.combinations(range(2 ** k), j):
            theta = cover_from_signatures(sigs, k)
            if theta is None:
                continue
            K = theta.union()
            res = cover_clumping(len(sigs), K, theta)
            count += 1
            if check_clumping(res, K, theta):
                failures.append(sigs)
    return count, failures

"""Brute-force reference computations, deliberately independent of the package internals.

They share no code with ``ordsurvey``: distances use exact fractions, neighbors
come from a full sort of (distance, index) pairs, and every ordered pair is
tallied in plain Python loops.
"""
from fractions import Fraction
import math


def missing(v):
    return v is None or (isinstance(v, float) and math.isnan(v))


def exact_distance(r1, r2, spans):
    total = Fraction(0)
    for v1, v2, span in zip(r1, r2, spans):
        if missing(v1) or missing(v2):
            total += Fraction(1, 2)
        else:
            total += Fraction(abs(int(v1) - int(v2)), span)
    return total / len(spans) if spans else Fraction(0)


def brute_neighbors(rows, spans, i, k):
    cands = sorted((exact_distance(rows[i], rows[h], spans), h) for h in range(len(rows)) if h != i)
    return [h for _, h in cands[: min(k, len(rows) - 1)]]


def brute_profile(rows, y, scales, k):
    """Reinforcement tallies by enumerating every (R, H in neighbors(R)) pair.

    ``scales`` is a list of (min, max). Returns a dict
    (attribute, value, direction) -> (successes, pairs).
    """
    spans = [hi - lo for lo, hi in scales]
    tally = {}
    for a, (lo, hi) in enumerate(scales):
        for v in range(lo, hi + 1):
            tally[(a, v, "up")] = [0, 0]
            tally[(a, v, "down")] = [0, 0]
    for r in range(len(rows)):
        for h in brute_neighbors(rows, spans, r, k):
            if missing(y[r]) or missing(y[h]):
                continue
            for a in range(len(scales)):
                vr, vh = rows[r][a], rows[h][a]
                if missing(vr) or missing(vh):
                    continue
                if vh > vr:
                    cell = tally[(a, int(vr), "up")]
                    cell[1] += 1
                    cell[0] += y[h] > y[r]
                elif vh < vr:
                    cell = tally[(a, int(vr), "down")]
                    cell[1] += 1
                    cell[0] += y[h] < y[r]
    return {key: tuple(v) for key, v in tally.items()}


def nb_posterior_by_hand(train, probe, classes, value_sets, alpha=1):
    """Closed-form Laplace-smoothed naive Bayes posterior using exact fractions."""
    n = len(train)
    K = len(classes)
    scores = {}
    for c in classes:
        rows_c = [x for x, yc in train if yc == c]
        score = Fraction(len(rows_c) + alpha, n + alpha * K)
        for a, v in enumerate(probe):
            if missing(v):
                continue
            known = [x[a] for x in rows_c if not missing(x[a])]
            score *= Fraction(sum(1 for w in known if w == v) + alpha,
                              len(known) + alpha * len(value_sets[a]))
        scores[c] = score
    total = sum(scores.values())
    return {c: s / total for c, s in scores.items()}

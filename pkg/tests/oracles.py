"""Independent reference implementations the tests check the library against.

These deliberately avoid the library's update paths: brute-force Bayes with an
explicit normalizer, a discretized 1-D grid filter, and a plain expectimax
recursion over the planner's sampled tree.
"""

from __future__ import annotations

import math

import numpy as np


def brute_force_label_posterior(prior: np.ndarray, factors: np.ndarray) -> np.ndarray:
    """Explicit-normalizer Bayes: posterior_l = prior_l * factor_l / sum."""
    joint = [float(prior[l]) * float(factors[l]) for l in range(len(prior))]
    z = sum(joint)
    if z <= 0:
        raise ZeroDivisionError("degenerate evidence")
    return np.array([j / z for j in joint])


def grid_filter_1d(prior_mean: float, prior_var: float, z: float, meas_var: float,
                   lo: float = -5.0, hi: float = 5.0, cells: int = 201) -> tuple[float, float]:
    """Posterior mean/variance by discretizing a 1-D Gaussian fusion."""
    xs = np.linspace(lo, hi, cells)
    prior = np.exp(-0.5 * (xs - prior_mean) ** 2 / prior_var)
    like = np.exp(-0.5 * (xs - z) ** 2 / meas_var)
    post = prior * like
    post /= post.sum()
    mean = float((xs * post).sum())
    var = float(((xs - mean) ** 2 * post).sum())
    return mean, var


def entropy_cat(p) -> float:
    return float(-sum(pi * math.log(pi) for pi in p if pi > 0))


def expectimax_plan(planner, track, px: float, py: float, plan_seed: int):
    """Plain expectimax over the identical sampled tree; no pruning anywhere.

    Returns (best_index, best_value) over the root candidates, using the same
    per-node seeded sampling as the planner under test.
    """
    cfg = planner.cfg

    def node_value(track, px, py, depth, path):
        ent = planner.entropy(track)
        if depth >= cfg.steps or ent <= cfg.entropy_floor:
            return ent
        cands = planner._candidates(px, py, track, plan_seed, path)
        if not cands:
            return ent
        return min(expected(track, c, depth + 1, path + (ai,))
                   for ai, c in enumerate(cands))

    def expected(track, cand, child_depth, path):
        import random as _random

        from beliefgraph import rng as rngmod

        cx, cy, heading = cand
        pd = planner._detection_probs(cx, cy, track)
        p_det = sum(p * q for p, q in zip(track.probs, pd))
        k = cfg.outcome_samples
        total = (1.0 - p_det) * node_value(planner._miss_update(track, pd),
                                           cx, cy, child_depth, path + (0,))
        if p_det > 0.0:
            for bi in range(1, k + 1):
                r = _random.Random(rngmod.node_seed(plan_seed, path + (bi,)))
                child = planner._detection_update(track, cx, cy, heading, r)
                total += (p_det / k) * node_value(child, cx, cy, child_depth,
                                                  path + (bi,))
        return total

    cands = planner._candidates(px, py, track, plan_seed, ())
    step = planner._path_step_candidate(px, py, track)
    if step is not None:
        cands = cands + [step]
    if not cands:
        return -1, planner.entropy(track)
    best_idx, best_val = -1, math.inf
    for ai, cand in enumerate(cands):
        val = expected(track, cand, 1, (ai,))
        if val < best_val:
            best_idx, best_val = ai, val
    return best_idx, best_val

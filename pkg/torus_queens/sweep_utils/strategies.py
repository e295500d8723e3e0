"""Sweep trial strategies."""
import itertools
import json
import random


def generate_trials(strategy, flat_params, nb_trials=None, seed=None):
    r"""Generates the (n, d, method) combinations a sweep runs.

    Two strategies are implemented:
    1. `grid_search`: the product of all flat_params, in input order. If
        `nb_trials` is specified the first `nb_trials` combinations are kept.
    2. `random_search`: `nb_trials` distinct combinations drawn with a seeded
        generator, returned in grid order so reports stay comparable.

    :param strategy: one of {`grid_search`, `random_search`}.
    :param flat_params: one list of options per swept argument.
    :param nb_trials: number of combinations to run.
    :param seed: seed of the random strategy.
    :return: list of tuples
    """
    if strategy == 'grid_search':
        return generate_grid_search_trials(flat_params, nb_trials)
    elif strategy == 'random_search':
        return generate_random_search_trials(flat_params, nb_trials, seed)
    else:
        raise ValueError(
            ('Unknown strategy "{}". Must be one of '
             '{{grid_search, random_search}}').format(strategy))


def generate_grid_search_trials(flat_params, nb_trials):
    trials = list(itertools.product(*flat_params))
    if nb_trials:
        trials = trials[0:nb_trials]
    return trials


def generate_random_search_trials(params, nb_trials, seed=None):
    """
    Samples unique combinations without replacement.

    :param params: The options of every swept argument.
    :param nb_trials: The number of trials to run.
    :param seed: seed for random.Random
    :return: list of tuples in grid order
    """
    if nb_trials is None:
        raise TypeError(
            '`random_search` strategy requires nb_trials to be an int.')
    rng = random.Random(seed)

    potential_trials = 1
    for param in params:
        potential_trials *= len(param)

    # we can't sample more trials than are possible
    max_iters = min(potential_trials, nb_trials)

    results = []
    seen_trials = set()
    while len(results) < max_iters:
        trial = tuple(rng.choice(param) for param in params)

        # skip duplicates so we don't run a row twice
        trial_str = json.dumps(trial)
        if trial_str not in seen_trials:
            seen_trials.add(trial_str)
            results.append(trial)

    order = {t: i for i, t in enumerate(itertools.product(*params))}
    return sorted(results, key=order.__getitem__)

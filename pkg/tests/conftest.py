import numpy as np
import pytest

from p6dyn import params
from p6dyn.words import CoxeterWord, classify


@pytest.fixture(scope="session")
def kappa_star():
    return params.KAPPA_STAR


@pytest.fixture(scope="session")
def theta_star():
    return params.rh(params.KAPPA_STAR)


@pytest.fixture(scope="session")
def b_star():
    return params.kappa_to_b(params.KAPPA_STAR)


def random_reduced_letters(rng, length):
    """Random reduced word: adjacent letters differ."""
    if length == 0:
        return ()
    letters = [int(rng.integers(1, 4))]
    while len(letters) < length:
        nxt = int(rng.integers(1, 4))
        if nxt != letters[-1]:
            letters.append(nxt)
    return tuple(letters)


def random_as_letters(rng, length):
    """Random reduced word with distinct end letters (analytically stable)."""
    assert length >= 2
    while True:
        letters = list(random_reduced_letters(rng, length))
        if letters[0] != letters[-1]:
            return tuple(letters)
        choices = [c for c in (1, 2, 3) if c != letters[-2] and c != letters[0]]
        if choices:
            letters[-1] = int(rng.choice(choices))
            return tuple(letters)
        # letters[-2] == letters[0]; no third option, resample


def random_as_nonelementary(rng, length):
    while True:
        letters = random_as_letters(rng, length)
        if not classify(CoxeterWord(letters)).is_elementary:
            return letters


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)

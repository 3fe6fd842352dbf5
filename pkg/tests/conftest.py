import numpy as np
import pytest
from fractions import Fraction

from hamloop import BumpProfile, LoopSpec, PathSpec, TrigPoly


@pytest.fixture(scope="session")
def theta_zero():
    return TrigPoly.from_normalized(0, 0, [])


@pytest.fixture(scope="session")
def alpha_zero():
    return TrigPoly.from_normalized(0, 0, [])


@pytest.fixture(scope="session")
def alpha_w1():
    """-t + sin(2 pi t)/(2 pi): winding-one exponent with alpha'(1) = 0."""
    return TrigPoly.from_normalized(0, -1, [(1, 0, 1)])


@pytest.fixture(scope="session")
def flat_path(theta_zero, alpha_zero):
    return PathSpec(theta=theta_zero, alpha=alpha_zero)


@pytest.fixture(scope="session")
def w1_path(theta_zero, alpha_w1):
    return PathSpec(theta=theta_zero, alpha=alpha_w1)


@pytest.fixture(scope="session")
def w1_loop(w1_path, flat_path):
    return LoopSpec(pathA=w1_path, pathB=flat_path, bump=BumpProfile(1.0, 1.5, 1.0))


@pytest.fixture(scope="session")
def w0_loop(w1_path):
    """pathA = pathB: the symmetric winding-zero loop."""
    return LoopSpec(pathA=w1_path, pathB=w1_path, bump=BumpProfile(1.0, 1.5, 1.0))


def winding_loop(w: int, bump=None) -> LoopSpec:
    """Loop of winding w from the standard family (alpha' vanishing at 1)."""
    theta = TrigPoly.from_normalized(0, 0, [])
    flat = PathSpec(theta=theta, alpha=TrigPoly.from_normalized(0, 0, []))
    if w == 0:
        spec = PathSpec(theta=theta, alpha=TrigPoly.from_normalized(0, -1, [(1, 0, 1)]))
        return LoopSpec(pathA=spec, pathB=spec, bump=bump or BumpProfile(1.0, 1.5, 1.0))
    exponent = TrigPoly.from_normalized(0, -w, [(1, 0, w)])
    wpath = PathSpec(theta=theta, alpha=exponent)
    if w > 0:
        return LoopSpec(pathA=wpath, pathB=flat, bump=bump or BumpProfile(1.0, 1.5, 1.0))
    pos = PathSpec(theta=theta, alpha=TrigPoly.from_normalized(0, w, [(1, 0, -w)]))
    return LoopSpec(pathA=flat, pathB=pos, bump=bump or BumpProfile(1.0, 1.5, 1.0))


def random_path_spec(rng, allow_theta=True, c1_choices=(-2, -1, 0, 2)) -> PathSpec:
    """Random spec from the sine-harmonic family (endpoints stay exact)."""
    def harm(scale):
        out = []
        for n in (1, 2, 3):
            if rng.random() < 0.6:
                out.append((n, Fraction(0), Fraction(int(rng.integers(-scale, scale + 1)))))
        return out

    theta = TrigPoly.from_normalized(0, 0, harm(2) if allow_theta else [])
    alpha = TrigPoly.from_normalized(
        Fraction(int(rng.integers(-1, 2))),
        Fraction(int(rng.choice(c1_choices))),
        harm(3),
    )
    return PathSpec(theta=theta, alpha=alpha)

"""Built-in genus-2 automorphisms: Dehn twists along the Humphries chain and a pseudo-Anosov word.

The chain is c1 = b1, c2 = a1, c3 = a1 B1 A1 b2, c4 = a2, c5 = b2; consecutive
curves meet once and the others are disjoint. Every fixture is checked on
load against the relator-conjugacy test, the transvection formula on H_1 and
the homological braid relations.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

import numpy as np

from ..errors import ValidationError
from .words import (SurfaceAutomorphism, homology_action, identity_automorphism, parse_automorphism,
                    surface_presentation, transvection)

# classes in the basis a1, a2, b1, b2
CHAIN_CLASSES = {
    "c1": (0, 0, 1, 0),
    "c2": (1, 0, 0, 0),
    "c3": (0, 0, -1, 1),
    "c4": (0, 1, 0, 0),
    "c5": (0, 0, 0, 1),
}
CHAIN = tuple(CHAIN_CLASSES)

# one negative twist; the first chain position giving spectral radius > 1 on H_1
PA_WORD = (("c1", -1), ("c2", 1), ("c3", 1), ("c4", 1), ("c5", 1))


def read_fixture(name: str) -> str:
    return resources.files(__package__).joinpath("data", f"{name}.aut").read_text()


def _load(name: str) -> SurfaceAutomorphism:
    return parse_automorphism(read_fixture(name))


def compose_word(word, twists) -> SurfaceAutomorphism:
    """Product of twists written left to right; the rightmost acts first."""
    f = identity_automorphism(surface_presentation(2))
    for curve, e in word:
        f = f.compose(twists[curve][e])
    return f


@lru_cache(maxsize=None)
def twist_corpus() -> dict:
    """``{curve: {+1: twist, -1: inverse twist}}`` after validation."""
    corpus = {}
    for c, cls in CHAIN_CLASSES.items():
        pos, neg = _load(f"twist_{c}"), _load(f"twist_{c}_inv")
        T = transvection(cls, 2)
        if not np.array_equal(homology_action(pos), T):
            raise ValidationError(f"twist fixture {c}: homology is not the transvection along its class")
        if not (pos.compose(neg).is_identity() and neg.compose(pos).is_identity()):
            raise ValidationError(f"twist fixture {c}: inverse does not invert at pi_1 level")
        corpus[c] = {1: pos, -1: neg}
    mats = {c: homology_action(corpus[c][1]) for c in CHAIN}
    for i, ci in enumerate(CHAIN):
        for j in range(i + 1, len(CHAIN)):
            A, B = mats[ci], mats[CHAIN[j]]
            ok = (np.array_equal(A @ B @ A, B @ A @ B) if j == i + 1
                  else np.array_equal(A @ B, B @ A))
            if not ok:
                raise ValidationError(f"homological braid relation fails for {ci}, {CHAIN[j]}")
    return corpus


def twist(curve: str, power: int = 1) -> SurfaceAutomorphism:
    corpus = twist_corpus()
    if curve not in corpus:
        raise KeyError(f"unknown curve {curve!r}; choose from {', '.join(CHAIN)}")
    f = identity_automorphism(surface_presentation(2))
    for _ in range(abs(power)):
        f = f.compose(corpus[curve][1 if power > 0 else -1])
    return f


@lru_cache(maxsize=None)
def pseudo_anosov() -> SurfaceAutomorphism:
    f = _load("pa")
    expected = compose_word(PA_WORD, twist_corpus())
    if f.images != expected.images:
        raise ValidationError("pA fixture file disagrees with its twist word")
    return f


def builtin(name: str) -> SurfaceAutomorphism:
    """``identity``, ``pa``, ``twist_c1`` .. ``twist_c5`` or their ``_inv`` variants."""
    if name == "pa":
        return pseudo_anosov()
    if name.startswith("twist_"):
        twist_corpus()
    return _load(name)


def builtin_names() -> list:
    names = ["identity", "pa"]
    for c in CHAIN:
        names += [f"twist_{c}", f"twist_{c}_inv"]
    return names

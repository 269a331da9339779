"""Desk-scale caps and seed handling.

Caps live in a single mutable :class:`Caps` instance so a manifest or CLI flag
can override them for one run; functions read them at call time.
"""

import contextlib
import dataclasses
import hashlib
import os
import random

DEFAULT_SEED = 0
SEED_ENV = "NILPOTWO_SEED"


@dataclasses.dataclass
class Caps:
    table_order: int = 512
    subgroup_enumeration: int = 256
    automorphism: int = 128
    associativity_exhaustive: int = 128
    associativity_samples: int = 100_000
    coset_index: int = 100_000
    class_scan: int = 10_000
    element_scan: int = 100_000
    fitting_scan: int = 20_000
    sylow_budget: int = 2_000
    elem3_restarts: int = 40
    exhaustive_pipeline: int = 256


CAPS = Caps()


@contextlib.contextmanager
def override_caps(**changes):
    old = dataclasses.asdict(CAPS)
    for key, value in changes.items():
        if not hasattr(CAPS, key):
            raise KeyError(f"unknown cap {key!r}")
        setattr(CAPS, key, int(value))
    try:
        yield CAPS
    finally:
        for key, value in old.items():
            setattr(CAPS, key, value)


def default_seed():
    value = os.environ.get(SEED_ENV)
    return int(value) if value not in (None, "") else DEFAULT_SEED


def derive_seed(*labels):
    """Stable 63-bit seed from arbitrary labels (independent of PYTHONHASHSEED)."""
    text = "\x1f".join(str(label) for label in labels)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def make_rng(seed, *stream):
    """A :class:`random.Random` for the per-task stream ``stream`` under ``seed``."""
    if isinstance(seed, random.Random):
        if not stream:
            return seed
        seed = seed.getrandbits(63)
    return random.Random(derive_seed(seed, *stream) if stream else seed)

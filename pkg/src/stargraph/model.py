"""Star graph domain types, bond length generation, and configuration.

A star graph is one central vertex joined by v bonds of lengths
L_1, ..., L_v.  Everything downstream consumes the immutable
BondLengths vector defined here; bond lengths for experiments are drawn
uniformly from the box [l_bar, l_bar + delta_l]^v.

Randomness contract: all sampling in the package goes through Philox
counter-based generators.  `stream(seed, index)` hands out disjoint,
reproducible streams, so chunked or multi-threaded sampling is
deterministic no matter how the chunks are scheduled.
"""

import configparser
import dataclasses
import math

import numpy as np

from .errors import LengthCollisionError


class BondLengths:
    """The vector L = (L_1, ..., L_v) of bond lengths of a star graph.

    Immutable; the backing array is read-only.  Lengths must be
    strictly positive.  Pairwise distinctness is required by the
    eigenvalue solver but not for plain evaluation, so it is checked by
    `require_distinct` at the solver entry points rather than here.
    """

    def __init__(self, lengths):
        arr = np.atleast_1d(np.asarray(lengths, dtype=np.float64)).copy()
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("lengths must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(arr)) or not np.all(arr > 0.0):
            raise ValueError("bond lengths must be finite and strictly positive")
        arr.setflags(write=False)
        self._lengths = arr

    @property
    def lengths(self):
        return self._lengths

    @property
    def v(self):
        return self._lengths.size

    @property
    def total(self):
        """Sum of the bond lengths."""
        return float(self._lengths.sum())

    def require_distinct(self):
        if np.unique(self._lengths).size != self.v:
            raise ValueError("bond lengths must be pairwise distinct for the solver")

    def __len__(self):
        return self.v

    def __repr__(self):
        return "BondLengths(%s)" % np.array2string(self._lengths, threshold=8)

    def __eq__(self, other):
        if not isinstance(other, BondLengths):
            return NotImplemented
        return self._lengths.shape == other._lengths.shape and bool(
            np.all(self._lengths == other._lengths))

    def __hash__(self):
        return hash(self._lengths.tobytes())


@dataclasses.dataclass(frozen=True)
class LengthBox:
    """Sampling box [l_bar, l_bar + delta_l] for each bond length."""
    l_bar: float
    delta_l: float

    def __post_init__(self):
        if not (self.l_bar > 0.0):
            raise ValueError("l_bar must be positive")
        if not (self.delta_l >= 0.0):
            raise ValueError("delta_l must be nonnegative")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Global run parameters.

    inverse_lambda records the boundary coupling as 1/lambda and is
    pinned to zero: only the Neumann-type case is supported, the field
    exists so configurations stay forward compatible.
    """
    seed: int = 0
    sample_count: int = 100_000
    inverse_lambda: float = 0.0

    def __post_init__(self):
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")
        if self.inverse_lambda != 0.0:
            raise ValueError("only inverse_lambda = 0 is supported")


#: keys accepted in config files, with their parsers
CONFIG_KEYS = {
    "seed": int,
    "v": int,
    "l_bar": float,
    "delta_l": float,
    "sample_count": int,
}


def load_config(path):
    """Read a flat key-value config file.

    Lines look like `seed = 42`; `#` starts a comment.  Recognized keys
    are seed, v, l_bar, delta_l, sample_count.  Returns a dict with
    parsed values; unknown keys raise ValueError so typos do not pass
    silently.
    """
    with open(path) as handle:
        text = handle.read()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.read_string("[run]\n" + text)
    out = {}
    for key, raw in parser["run"].items():
        if key not in CONFIG_KEYS:
            raise ValueError("unknown config key %r in %s" % (key, path))
        out[key] = CONFIG_KEYS[key](raw)
    return out


def stream(seed, index):
    """A Generator for worker `index`, disjoint from every other index.

    Each stream is the Philox sequence jumped 2**128 * index steps
    ahead, so chunked sampling is reproducible and collision free.
    """
    return np.random.Generator(np.random.Philox(key=seed).jumped(index))


def generate_lengths(box, v, seed):
    """Draw v bond lengths uniformly from the box, pairwise distinct.

    Deterministic for fixed (box, v, seed).  Exact floating point
    collisions are resampled coordinate-wise up to 100 rounds; a box of
    zero width is rejected for v > 1 since distinct values are then
    impossible.  (Exact rational relations between uniform 64-bit draws
    are measure-zero at experiment scale, so the result is treated as
    incommensurate.)
    """
    if v < 1:
        raise ValueError("v must be >= 1")
    if box.delta_l == 0.0 and v > 1:
        raise ValueError("delta_l = 0 cannot produce %d distinct lengths" % v)
    rng = stream(seed, 0)
    vals = box.l_bar + box.delta_l * rng.random(v)
    for _ in range(100):
        uniq, counts = np.unique(vals, return_counts=True)
        if uniq.size == v:
            return BondLengths(vals)
        # redraw every coordinate that collides with an earlier one
        dup_values = uniq[counts > 1]
        mask = np.isin(vals, dup_values)
        first_hit = np.zeros(v, dtype=bool)
        seen = set()
        for i, value in enumerate(vals):
            if mask[i] and value not in seen:
                first_hit[i] = True
                seen.add(value)
        redraw = mask & ~first_hit
        vals[redraw] = box.l_bar + box.delta_l * rng.random(int(redraw.sum()))
    raise LengthCollisionError(
        "could not draw %d distinct lengths from %r after 100 rounds" % (v, box))


def mean_density(lengths):
    """Mean density of eigenvalues per unit k: (1/pi) * sum of lengths."""
    return lengths.total / math.pi

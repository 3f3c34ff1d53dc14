"""The xorshift128+ generator: recursion, seeding, streams, unit conversion.

State is a pair of 64-bit words (s0, s1).  One step emits
(s0 + s1) mod 2**64 and replaces the pair with (s1, s2) where

    s2 = ((s0 ^ (s0 << a)) ^ ((s0 ^ (s0 << a)) >> b)) ^ (s1 ^ (s1 >> c))

i.e. the shift-count triple (a, b, c) drives one left xorshift of s0,
one right xorshift of the result, and one right xorshift of s1.
"""

from dataclasses import dataclass
import warnings

from .bitlin import MASK64, xorshift_xform

# SplitMix64 constants (Weyl increment plus the two finalizer multipliers);
# used only for deterministic seed expansion, documented in README.
SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_SPLITMIX_MUL1 = 0xBF58476D1CE4E5B9
_SPLITMIX_MUL2 = 0x94D049BB133111EB

DEFAULT_SHIFTS = (23, 17, 26)


@dataclass(frozen=True)
class Params:
    """Shift counts (a, b, c), each in 1..63.

    The top-bit analysis needs b and c comfortably above the inspected
    width; tiny values are accepted but flagged.
    """

    a: int
    b: int
    c: int

    def __post_init__(self):
        for name, v in (("a", self.a), ("b", self.b), ("c", self.c)):
            if not 1 <= v <= 63:
                raise ValueError(f"shift {name} must be in 1..63, got {v}")
        if self.b <= 3 or self.c <= 3:
            warnings.warn(
                f"shifts b={self.b}, c={self.c}: top-bit approximation "
                "analysis assumes b and c larger than 3",
                stacklevel=2,
            )


DEFAULT_PARAMS = Params(*DEFAULT_SHIFTS)


@dataclass(frozen=True)
class GenState:
    """Generator state (s0, s1) plus its shift parameters.

    The all-zero pair is a fixed point of the linear recursion and is
    rejected; every reachable successor of a valid state is valid.
    """

    s0: int
    s1: int
    params: Params = DEFAULT_PARAMS

    def __post_init__(self):
        for name, v in (("s0", self.s0), ("s1", self.s1)):
            if not 0 <= v <= MASK64:
                raise ValueError(f"{name} must be a 64-bit word, got {v}")
        if self.s0 == 0 and self.s1 == 0:
            raise ValueError("state (0, 0) is invalid (fixed point of the recursion)")


def step_words(s0: int, s1: int, params: Params) -> tuple[int, int]:
    """One state update on raw words: (s0, s1) -> (s1, s2)."""
    t = xorshift_xform(xorshift_xform(s0, params.a, "left"), params.b, "right")
    return s1, t ^ xorshift_xform(s1, params.c, "right")


def step(state: GenState) -> tuple[GenState, int]:
    """Advance one step; returns (next_state, output)."""
    out = (state.s0 + state.s1) & MASK64
    s1, s2 = step_words(state.s0, state.s1, state.params)
    return GenState(s1, s2, state.params), out


def splitmix64(x: int) -> tuple[int, int]:
    """One SplitMix64 round: returns (next_counter, output)."""
    x = (x + SPLITMIX_GAMMA) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * _SPLITMIX_MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _SPLITMIX_MUL2) & MASK64
    return x, z ^ (z >> 31)


def seed_state(seed: int, params: Params = DEFAULT_PARAMS) -> GenState:
    """Expand a 64-bit seed into a state via two SplitMix64 rounds.

    s0 is the first round's output, s1 the second's.  The (unreachable in
    practice) all-zero result is replaced by (1, 0).
    """
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be a 64-bit word, got {seed}")
    ctr, s0 = splitmix64(seed)
    _, s1 = splitmix64(ctr)
    if s0 == 0 and s1 == 0:
        s0 = 1
    return GenState(s0, s1, params)


def to_unit(out: int) -> float:
    """Map a 64-bit output to [0, 1) using its top 53 bits; exact in binary64."""
    return (out >> 11) * 2.0**-53


def iter_outputs(state: GenState):
    """Yield the raw 64-bit output stream, advancing an internal copy of state."""
    while True:
        state, out = step(state)
        yield out


def triples(state: GenState, count: int) -> list[tuple[float, float, float]]:
    """First `count` overlapping triples of unit-interval outputs (stride 1)."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    gen = iter_outputs(state)
    u0 = to_unit(next(gen))
    u1 = to_unit(next(gen))
    result = []
    for _ in range(count):
        u2 = to_unit(next(gen))
        result.append((u0, u1, u2))
        u0, u1 = u1, u2
    return result


def scaled_step(s0: int, s1: int, a: int, b: int, c: int, width: int) -> tuple[int, int]:
    """The same recursion on `width`-bit words; for small-word state-space checks."""
    if not 1 <= width <= 64:
        raise ValueError(f"width must be in 1..64, got {width}")
    for name, v in (("a", a), ("b", b), ("c", c)):
        if not 1 <= v <= width - 1:
            raise ValueError(f"shift {name} must be in 1..{width - 1}, got {v}")
    mask = (1 << width) - 1
    t = s0 ^ ((s0 << a) & mask)
    t ^= t >> b
    return s1, t ^ s1 ^ (s1 >> c)


# -- pair-state transition as an explicit GF(2) map ---------------------------
#
# The 128-bit pair (s0, s1), packed as (s0 << 64) | s1, evolves linearly; the
# helpers below give the map as 128 basis-image rows so bulk scans can start
# segments at exact stream offsets.  They are internal machinery for the
# experiment module's scanner, not a jump-ahead feature of the generator.


def transition_rows(params: Params) -> list[int]:
    """Basis images of one step on packed pairs; row i is the image of bit i (MSB first)."""
    rows = []
    for i in range(128):
        if i < 64:
            s0, s1 = 1 << (63 - i), 0
        else:
            s0, s1 = 0, 1 << (127 - i)
        n0, n1 = step_words(s0, s1, params)
        rows.append((n0 << 64) | n1)
    return rows


def apply_transition(rows: list[int], packed: int) -> int:
    """Apply a packed-pair transition matrix to one packed pair."""
    acc = 0
    while packed:
        low = packed & -packed
        acc ^= rows[128 - low.bit_length()]
        packed ^= low
    return acc


def transition_mul(m: list[int], n: list[int]) -> list[int]:
    """Row-vector-convention product: applying the result equals applying m then n."""
    return [apply_transition(n, row) for row in m]


def transition_pow(rows: list[int], k: int) -> list[int]:
    """k-fold composition of a packed-pair transition (k >= 0)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    result = [1 << (127 - i) for i in range(128)]
    base = rows
    while k:
        if k & 1:
            result = transition_mul(result, base)
        k >>= 1
        if k:
            base = transition_mul(base, base)
    return result

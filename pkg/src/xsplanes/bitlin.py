"""Bit-level linear algebra over GF(2) for 64-bit words.

A word is read as a row vector (x1, ..., x64) with x1 the most significant
bit, so the integer value is sum(x_i * 2**(64-i)) and a left shift by one
multiplies the value by two (mod 2**64).  Hot paths use plain word shifts;
the explicit matrix type exists to cross-check that the word operations
realize the intended linear maps.
"""

from dataclasses import dataclass

WIDTH = 64
MASK64 = (1 << 64) - 1


def _check_shift(count: int) -> None:
    if not 0 <= count <= WIDTH - 1:
        raise ValueError(f"shift count must be in 0..{WIDTH - 1}, got {count}")


def shl(x: int, a: int) -> int:
    """Left shift by a bits; equals (2**a * x) mod 2**64."""
    _check_shift(a)
    return (x << a) & MASK64


def shr(x: int, b: int) -> int:
    """Logical right shift by b bits (high bits fill with zero)."""
    _check_shift(b)
    return x >> b


def xorshift_xform(x: int, a: int, direction: str) -> int:
    """Apply x -> x ^ (x << a) or x -> x ^ (x >> a).

    direction is "left" or "right"; this is the word action of the
    shift-augmented identity map used by the generator recursion.
    """
    if direction == "left":
        return x ^ shl(x, a)
    if direction == "right":
        return x ^ shr(x, a)
    raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")


@dataclass(frozen=True)
class BitMatrix64:
    """Row-major 64x64 matrix over GF(2); row i is the image of basis vector i."""

    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != WIDTH:
            raise ValueError(f"expected {WIDTH} rows, got {len(self.rows)}")


def identity_matrix() -> BitMatrix64:
    return BitMatrix64(tuple(1 << (WIDTH - 1 - i) for i in range(WIDTH)))


def matrix_of(op) -> BitMatrix64:
    """Materialize a word transform as an explicit matrix.

    The caller asserts op is GF(2)-linear; row i is op applied to the basis
    vector whose only set bit is the i-th from the top.
    """
    return BitMatrix64(tuple(op(1 << (WIDTH - 1 - i)) for i in range(WIDTH)))


def act(m: BitMatrix64, v: int) -> int:
    """Row vector times matrix: xor of the rows selected by v's set bits."""
    acc = 0
    rows = m.rows
    while v:
        low = v & -v
        acc ^= rows[WIDTH - low.bit_length()]
        v ^= low
    return acc


def mat_mul(m: BitMatrix64, n: BitMatrix64) -> BitMatrix64:
    """Matrix product m*n under the row-vector convention: act(mat_mul(m,n), v) == act(n, act(m, v))."""
    return BitMatrix64(tuple(act(n, row) for row in m.rows))

"""
Polynomials over F2 packed into integers (bit i is the coefficient of T^i)
"""


def mul(a: int, b: int) -> int:
    """Carry-less product of two packed polynomials."""
    if a < b:
        a, b = b, a
    c = 0
    while b:
        if b & 1:
            c ^= a
        a <<= 1
        b >>= 1
    return c


def degree(a: int) -> int:
    """Degree of a, with -1 for the zero polynomial."""
    return a.bit_length() - 1


def parity(a: int) -> int:
    return bin(a).count("1") & 1


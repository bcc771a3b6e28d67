"""Zadoff-Chu sequences, the 64-preamble root set, and the concatenated
reference sequence used by the detector."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sympy import isprime

__all__ = ["ZcRoot", "zc_sequence", "preamble_root_set", "extended_sequence",
           "load_root_mapping"]


@dataclass(frozen=True)
class ZcRoot:
    """Root index u of a length-M Zadoff-Chu sequence. M must be prime so
    cyclic shifts stay within the same root's phase family."""

    u: int
    M: int = 139

    def __post_init__(self):
        if not isprime(self.M):
            raise ValueError(f"ZC length M={self.M} must be prime")
        if not 1 <= self.u <= self.M - 1:
            raise ValueError(f"root u={self.u} outside [1, {self.M - 1}]")


def zc_sequence(root: ZcRoot) -> np.ndarray:
    """x_u[l] = exp(-j*pi*u*l*(l+1)/M), l = 0..M-1."""
    l = np.arange(root.M)
    return np.exp(-1j * np.pi * root.u * l * (l + 1) / root.M)


def preamble_root_set(M: int, count: int,
                      mapping: list[int] | None = None) -> list[ZcRoot]:
    """Distinct roots for the preamble set; defaults to u = 1..count.

    An explicit mapping list overrides the default ordering (e.g. to plug
    in a standards-conformant logical-to-physical table).
    """
    if count > M - 1:
        raise ValueError(f"cannot form {count} roots of length-{M} ZC "
                         f"(max {M - 1})")
    if mapping is None:
        indices = list(range(1, count + 1))
    else:
        indices = list(mapping[:count])
        if len(indices) < count:
            raise ValueError(f"mapping provides {len(indices)} roots, "
                             f"need {count}")
        if len(set(indices)) != len(indices):
            raise ValueError("mapping contains duplicate roots")
    return [ZcRoot(u=u, M=M) for u in indices]


def load_root_mapping(path: str | Path) -> list[int]:
    """Root mapping file: one integer per line; blanks ignored."""
    values = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            values.append(int(line))
        except ValueError:
            raise ValueError(f"{path}:{line_no}: not an integer: {line!r}")
    if len(set(values)) != len(values):
        raise ValueError(f"{path}: duplicate root indices")
    return values


def extended_sequence(root: ZcRoot, k: int, N: int) -> np.ndarray:
    """Length-2M reference: x_u followed by exp(-j*2*pi*k/N) * x_u.

    The phase offset on the second copy encodes the Doppler row k so the
    2M-periodic wrap reproduces the phase pattern of the circular shift.
    """
    if not 0 <= k <= N - 1:
        raise ValueError(f"Doppler index k={k} outside [0, {N - 1}]")
    x = zc_sequence(root)
    return np.concatenate([x, np.exp(-2j * np.pi * k / N) * x])

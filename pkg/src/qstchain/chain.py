"""XX spin chains in a mirror-symmetric power-law on-site potential.

The chain Hamiltonian acting on N spins is

    H = sum_n J_n (sx_n sx_{n+1} + sy_n sy_{n+1}) + sum_n B_n sz_n

with sx, sy, sz the Pauli matrices, uniform bulk couplings J_n = j_bulk
except for the two boundary bonds J_1 = J_{N-1} = j_edge, and an on-site
field centred on the chain midpoint,

    B_n = a * |n - (N+1)/2| ** p        (n = 1..N, convention 0**0 = 1).

H commutes with total sz, so the one-magnon sector (a single up spin on a
down background) closes on itself.  In the site basis |n> it reduces to a
real symmetric tridiagonal matrix

    <n|H1|n>   = 2 B_n           <n|H1|n+1> = 2 J_n

after dropping the constant -sum_n B_n, which is returned alongside the
matrix as ``energy_offset``.  The factor 2 comes from using Pauli matrices
rather than spin-1/2 operators; every time reported by this package is in
units of hbar/J with that convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PotentialSpec",
    "ChainSpec",
    "Hamiltonian1Ex",
    "ChainConfig",
    "build_fields",
    "build_chain",
    "to_single_excitation",
    "is_mirror_symmetric",
]


def _frozen_array(values, n: int, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"{what} must have shape ({n},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} must be finite")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PotentialSpec:
    """Power-law potential B_n = a * |n - (N+1)/2|**p.

    a >= 0 is the amplitude, p >= 0 the exponent.  p = 0 gives a uniform
    field a on every site (0**0 = 1), large p pushes the potential onto
    the chain ends.
    """

    a: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a >= 0.0):
            raise ValueError(f"potential amplitude a must be finite and >= 0, got {self.a}")
        if not (math.isfinite(self.p) and self.p >= 0.0):
            raise ValueError(f"potential exponent p must be finite and >= 0, got {self.p}")


@dataclass(frozen=True)
class ChainSpec:
    """A concrete open chain: site count, bond couplings, on-site fields.

    couplings has length N-1 (bond n joins sites n and n+1), fields has
    length N.  Instances are immutable; the arrays are read-only views.
    """

    n_sites: int
    couplings: np.ndarray
    fields: np.ndarray

    def __post_init__(self):
        n = self.n_sites
        if not isinstance(n, int) or n < 1:
            raise ValueError(f"n_sites must be a positive integer, got {n!r}")
        object.__setattr__(self, "couplings", _frozen_array(self.couplings, n - 1, "couplings"))
        object.__setattr__(self, "fields", _frozen_array(self.fields, n, "fields"))


@dataclass(frozen=True)
class Hamiltonian1Ex:
    """One-magnon Hamiltonian in tridiagonal form.

    diag[k] = 2*B_{k+1}, offdiag[k] = 2*J_{k+1} (0-based storage of the
    1-based site labels).  energy_offset = -sum_n B_n is the constant
    dropped from the full-spin H; adding it back reproduces one-magnon
    energies of the spin model.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    energy_offset: float

    def __post_init__(self):
        n = len(np.atleast_1d(self.diag))
        object.__setattr__(self, "diag", _frozen_array(self.diag, n, "diag"))
        object.__setattr__(self, "offdiag", _frozen_array(self.offdiag, n - 1, "offdiag"))
        if not math.isfinite(self.energy_offset):
            raise ValueError("energy_offset must be finite")

    @property
    def n_sites(self) -> int:
        return len(self.diag)

    def dense(self) -> np.ndarray:
        """Dense matrix form (for oracles and small-N checks)."""
        h = np.diag(self.diag)
        idx = np.arange(self.n_sites - 1)
        h[idx, idx + 1] = self.offdiag
        h[idx + 1, idx] = self.offdiag
        return h

    def frobenius_norm(self) -> float:
        return math.sqrt(float(np.sum(self.diag**2) + 2.0 * np.sum(self.offdiag**2)))


def build_fields(n_sites: int, pot: PotentialSpec) -> np.ndarray:
    """On-site fields B_n = a * |n - (N+1)/2|**p for n = 1..N.

    The centre (N+1)/2 sits on the middle site for odd N and on the middle
    bond for even N, so the profile is mirror symmetric for every N.
    0**0 evaluates to 1, making p = 0 a uniform field.
    """
    if not isinstance(n_sites, int) or n_sites < 1:
        raise ValueError(f"n_sites must be a positive integer, got {n_sites!r}")
    centre = 0.5 * (n_sites + 1)
    dist = np.abs(np.arange(1, n_sites + 1, dtype=float) - centre)
    return pot.a * dist**pot.p


def build_chain(n_sites: int, j_edge: float, j_bulk: float, fields) -> ChainSpec:
    """Open chain with boundary bonds j_edge and uniform bulk bonds j_bulk.

    For N = 2 the single bond is the boundary bond; for N = 3 both bonds
    are boundary bonds.
    """
    for name, val in (("j_edge", j_edge), ("j_bulk", j_bulk)):
        if not (math.isfinite(val) and val > 0.0):
            raise ValueError(f"{name} must be finite and > 0, got {val}")
    if not isinstance(n_sites, int) or n_sites < 1:
        raise ValueError(f"n_sites must be a positive integer, got {n_sites!r}")
    couplings = np.full(n_sites - 1, float(j_bulk))
    if n_sites >= 2:
        couplings[0] = j_edge
        couplings[-1] = j_edge
    return ChainSpec(n_sites=n_sites, couplings=couplings, fields=fields)


def to_single_excitation(chain: ChainSpec) -> Hamiltonian1Ex:
    """Project onto the one-magnon sector.

    Hopping amplitude 2*J_n, on-site energy 2*B_n; the dropped constant
    -sum_n B_n is kept as energy_offset.
    """
    return Hamiltonian1Ex(
        diag=2.0 * chain.fields,
        offdiag=2.0 * chain.couplings,
        energy_offset=-float(np.sum(chain.fields)),
    )


def is_mirror_symmetric(chain: ChainSpec, tol: float = 0.0) -> bool:
    """True if fields and couplings are palindromic within tol (absolute)."""
    if tol < 0.0:
        raise ValueError("tol must be >= 0")
    f, c = chain.fields, chain.couplings
    return bool(
        np.all(np.abs(f - f[::-1]) <= tol) and np.all(np.abs(c - c[::-1]) <= tol)
    )


# --- structured configuration -------------------------------------------------

_CONFIG_KEYS = ("n_sites", "a", "p", "j_edge", "j_bulk", "fields", "couplings")


@dataclass(frozen=True)
class ChainConfig:
    """Declarative chain description used by config files and the CLI.

    Either the (a, p, j_edge, j_bulk) parametrisation or explicit fields /
    couplings arrays; explicit arrays win over the parametrisation.
    """

    n_sites: int
    a: float = 0.0
    p: float = 0.0
    j_edge: float = 1.0
    j_bulk: float = 1.0
    fields: tuple | None = None
    couplings: tuple | None = None

    def __post_init__(self):
        if not isinstance(self.n_sites, int) or self.n_sites < 1:
            raise ValueError(f"n_sites must be a positive integer, got {self.n_sites!r}")

    def to_chain(self) -> ChainSpec:
        fields = (
            np.asarray(self.fields, dtype=float)
            if self.fields is not None
            else build_fields(self.n_sites, PotentialSpec(a=self.a, p=self.p))
        )
        if self.couplings is not None:
            return ChainSpec(
                n_sites=self.n_sites,
                couplings=np.asarray(self.couplings, dtype=float),
                fields=fields,
            )
        return build_chain(self.n_sites, self.j_edge, self.j_bulk, fields)

    @classmethod
    def from_dict(cls, data: dict) -> "ChainConfig":
        unknown = sorted(set(data) - set(_CONFIG_KEYS))
        if unknown:
            raise ValueError(f"unknown chain config key: {unknown[0]!r}")
        if "n_sites" not in data:
            raise ValueError("chain config requires 'n_sites'")
        kwargs = dict(data)
        kwargs["n_sites"] = int(kwargs["n_sites"])
        for key in ("a", "p", "j_edge", "j_bulk"):
            if key in kwargs:
                kwargs[key] = float(kwargs[key])
        for key in ("fields", "couplings"):
            if kwargs.get(key) is not None:
                kwargs[key] = tuple(float(x) for x in kwargs[key])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        out = {
            "n_sites": self.n_sites,
            "a": self.a,
            "p": self.p,
            "j_edge": self.j_edge,
            "j_bulk": self.j_bulk,
        }
        if self.fields is not None:
            out["fields"] = list(self.fields)
        if self.couplings is not None:
            out["couplings"] = list(self.couplings)
        return out

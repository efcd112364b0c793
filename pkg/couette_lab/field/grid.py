from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from couette_lab.constants import Defaults, NormKind
from couette_lab.exceptions import GridError, InadmissibleParametersError
from couette_lab.presets import FieldPresets, RandomBandDefaults, ReferenceMode
from couette_lab.types import ComplexArray, GridHeader, RealArray


@dataclass(frozen=True)
class GridSpec:
    """Mode lattice {(k, j d_eta) : 1 <= |k| <= k_max, |j| <= eta_max / d_eta}.

    Attributes:
        k_max: Largest |k| (>= 1).
        eta_max: Largest |eta|.
        d_eta: eta spacing; every mode carries the measure d_eta.
        include_zero_mode: Also enumerate k = 0 (with j != 0).
    """

    k_max: int = Defaults.GRID_K_MAX
    eta_max: float = Defaults.GRID_ETA_MAX
    d_eta: float = Defaults.GRID_D_ETA
    include_zero_mode: bool = False

    def __post_init__(self) -> None:
        if self.k_max < 1 or not self.d_eta > 0 or self.eta_max < 0:
            raise GridError(
                f"invalid grid k_max={self.k_max}, eta_max={self.eta_max}, d_eta={self.d_eta}",
                code="grid",
            )

    @property
    def j_max(self) -> int:
        return int(math.floor(self.eta_max / self.d_eta + 1e-9))

    def eta(self, j: int) -> float:
        return j * self.d_eta

    def contains(self, k: int, j: int) -> bool:
        if abs(j) > self.j_max or abs(k) > self.k_max:
            return False
        if k == 0:
            return self.include_zero_mode and j != 0
        return True

    def index_of(self, eta: float) -> int:
        """Grid index j with j d_eta == eta; raises GridError off the grid."""
        j = round(eta / self.d_eta)
        if not math.isclose(j * self.d_eta, eta, rel_tol=1e-12, abs_tol=1e-12) or abs(j) > self.j_max:
            raise GridError(f"eta={eta} is not on the grid (d_eta={self.d_eta})", code="grid")
        return j

    def modes(self) -> list[tuple[int, int]]:
        """All lattice modes sorted by (k, j)."""
        ks = [k for k in range(-self.k_max, self.k_max + 1) if k != 0 or self.include_zero_mode]
        js = range(-self.j_max, self.j_max + 1)
        return [(k, j) for k in ks for j in js if self.contains(k, j)]

    def to_header(self) -> GridHeader:
        return {
            "k_max": self.k_max,
            "eta_max": self.eta_max,
            "d_eta": self.d_eta,
            "include_zero_mode": self.include_zero_mode,
        }

    @classmethod
    def from_header(cls, header: Mapping[str, object]) -> GridSpec:
        try:
            return cls(
                k_max=int(header["k_max"]),  # type: ignore[arg-type]
                eta_max=float(header["eta_max"]),  # type: ignore[arg-type]
                d_eta=float(header["d_eta"]),  # type: ignore[arg-type]
                include_zero_mode=bool(header.get("include_zero_mode", False)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise GridError(f"invalid grid header: {e}", code="grid") from e


class FieldMode(NamedTuple):
    """One explicit mode of a field: lattice index and (R, A, Omega)."""

    k: int
    j: int
    R: complex = 0j
    A: complex = 0j
    Omega: complex = 0j


def is_canonical(k: int, j: int) -> bool:
    """Representative of the conjugate pair {(k, j), (-k, -j)}."""
    return k > 0 or (k == 0 and j > 0)


@dataclass
class SpectralField:
    """Sparse moving-frame field: populated modes with (R, A, Omega).

    Modes absent from `keys` are zero. Keys are kept sorted by (k, j).
    """

    grid: GridSpec
    time: float = 0.0
    keys: list[tuple[int, int]] = field(default_factory=list)
    R: ComplexArray = field(default_factory=lambda: np.zeros(0, dtype=np.complex128))
    A: ComplexArray = field(default_factory=lambda: np.zeros(0, dtype=np.complex128))
    Omega: ComplexArray = field(default_factory=lambda: np.zeros(0, dtype=np.complex128))

    def __len__(self) -> int:
        return len(self.keys)

    @classmethod
    def from_modes(cls, grid: GridSpec, modes: Iterable[FieldMode], time: float = 0.0) -> SpectralField:
        table: dict[tuple[int, int], FieldMode] = {}
        for m in modes:
            if not grid.contains(m.k, m.j):
                raise GridError(f"mode (k={m.k}, j={m.j}) is not on the grid", code="grid")
            table[(m.k, m.j)] = m
        keys = sorted(table)
        return cls(
            grid=grid,
            time=time,
            keys=keys,
            R=np.array([table[k].R for k in keys], dtype=np.complex128),
            A=np.array([table[k].A for k in keys], dtype=np.complex128),
            Omega=np.array([table[k].Omega for k in keys], dtype=np.complex128),
        )

    def modes(self) -> list[FieldMode]:
        return [
            FieldMode(k, j, complex(self.R[i]), complex(self.A[i]), complex(self.Omega[i]))
            for i, (k, j) in enumerate(self.keys)
        ]

    def get(self, k: int, j: int) -> FieldMode:
        try:
            i = self.keys.index((k, j))
        except ValueError:
            if not self.grid.contains(k, j):
                raise GridError(f"mode (k={k}, j={j}) is not on the grid", code="grid") from None
            return FieldMode(k, j)
        return FieldMode(k, j, complex(self.R[i]), complex(self.A[i]), complex(self.Omega[i]))

    @property
    def k(self) -> RealArray:
        return np.array([k for k, _ in self.keys], dtype=np.float64)

    @property
    def eta(self) -> RealArray:
        return np.array([j * self.grid.d_eta for _, j in self.keys], dtype=np.float64)

    def canonical(self) -> SpectralField:
        """Sub-field of canonical representatives."""
        return SpectralField.from_modes(self.grid, [m for m in self.modes() if is_canonical(m.k, m.j)], self.time)

    def with_partners(self) -> SpectralField:
        """Field whose non-canonical modes are the conjugates of the canonical ones."""
        out = [m for m in self.modes() if is_canonical(m.k, m.j)]
        out += [
            FieldMode(-m.k, -m.j, m.R.conjugate(), m.A.conjugate(), m.Omega.conjugate())
            for m in list(out)
        ]
        return SpectralField.from_modes(self.grid, out, self.time)

    def reality_defect(self) -> float:
        """max |c(-k,-j) - conj(c(k,j))| over populated modes and components."""
        defect = 0.0
        for m in self.modes():
            partner = self.get(-m.k, -m.j)
            for a, b in ((m.R, partner.R), (m.A, partner.A), (m.Omega, partner.Omega)):
                defect = max(defect, abs(b - a.conjugate()))
        return defect


@dataclass(frozen=True)
class NormSpec:
    """Sobolev weight on the (k, eta) lattice.

    Attributes:
        kind: NormKind.L2, ANISO (<k>^(2 s1) <eta>^(2 s2)) or ISO (<k,eta>^(2 s)).
        s: ISO index (may be negative).
        s1: ANISO x-index.
        s2: ANISO y-index.
    """

    kind: str = NormKind.L2
    s: float = 0.0
    s1: float = 0.0
    s2: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in (NormKind.L2, NormKind.ANISO, NormKind.ISO):
            raise InadmissibleParametersError(f"unknown norm kind {self.kind!r}", code="norm")

    def weight(self, k: RealArray, eta: RealArray) -> RealArray:
        """Squared weight per mode."""
        k = np.asarray(k, dtype=np.float64)
        eta = np.asarray(eta, dtype=np.float64)
        match self.kind:
            case NormKind.ANISO:
                return (1.0 + k**2) ** self.s1 * (1.0 + eta**2) ** self.s2
            case NormKind.ISO:
                return (1.0 + k**2 + eta**2) ** self.s
            case _:
                return np.ones(np.broadcast(k, eta).shape)


def _explicit(grid: GridSpec, modes: Iterable[FieldMode | Mapping[str, object]]) -> list[FieldMode]:
    out = []
    for m in modes:
        if isinstance(m, FieldMode):
            out.append(m)
        elif isinstance(m, tuple):
            out.append(FieldMode(*m))
        else:
            out.append(
                FieldMode(
                    int(m["k"]),  # type: ignore[arg-type]
                    int(m["j"]),  # type: ignore[arg-type]
                    complex(m.get("R", 0j)),  # type: ignore[arg-type]
                    complex(m.get("A", 0j)),  # type: ignore[arg-type]
                    complex(m.get("Omega", 0j)),  # type: ignore[arg-type]
                )
            )
    return out


def _reference_mode(grid: GridSpec, R: complex, A: complex, xi: complex) -> list[FieldMode]:
    j = grid.index_of(ReferenceMode.ETA)
    if not grid.contains(ReferenceMode.K, j):
        raise GridError(f"reference mode k={ReferenceMode.K} is not on the grid", code="grid")
    return [FieldMode(ReferenceMode.K, j, R, A, xi - R)]


def _random_band(
    grid: GridSpec,
    seed: int,
    k_band: int,
    eta_band: float,
    amplitude: float,
) -> list[FieldMode]:
    rng = np.random.default_rng(seed)
    j_band = min(grid.j_max, int(math.floor(eta_band / grid.d_eta + 1e-9)))
    out = []
    for k in range(1, min(k_band, grid.k_max) + 1):
        for j in range(-j_band, j_band + 1):
            draw = rng.standard_normal(6)
            c = amplitude * (draw[:3] + 1j * draw[3:]) / math.sqrt(2.0)
            out.append(FieldMode(k, j, complex(c[0]), complex(c[1]), complex(c[2])))
    return out


def assemble(
    source: str | Iterable[FieldMode | Mapping[str, object]] | None = None,
    grid: GridSpec | None = None,
    *,
    enforce_reality: bool = True,
    seed: int = RandomBandDefaults.SEED,
    k_band: int = RandomBandDefaults.K_BAND,
    eta_band: float = RandomBandDefaults.ETA_BAND,
    amplitude: float = RandomBandDefaults.AMPLITUDE,
) -> SpectralField:
    """Build a field from a preset name or an explicit mode list.

    Presets:
        fig1_forced: R = A = 0, Xi = 5 at (3, 21).
        fig1_transient: R = 20, A = 50, Xi = 5 at (3, 21).
        random_band: complex Gaussian coefficients on 1 <= k <= k_band,
            |eta| <= eta_band, drawn from numpy's default_rng(seed).

    With `enforce_reality`, every canonical mode gets its conjugate partner at
    (-k, -j); an explicit partner that disagrees is an error.

    Raises:
        GridError: Off-grid mode or inconsistent explicit partner.
        InadmissibleParametersError: Unknown preset.
    """
    grid = grid or GridSpec()
    match source:
        case None:
            modes: list[FieldMode] = []
        case FieldPresets.FIG1_FORCED:
            modes = _reference_mode(grid, 0j, 0j, complex(ReferenceMode.XI_IN))
        case FieldPresets.FIG1_TRANSIENT:
            modes = _reference_mode(
                grid,
                complex(ReferenceMode.R_IN_TRANSIENT),
                complex(ReferenceMode.A_IN_TRANSIENT),
                complex(ReferenceMode.XI_IN),
            )
        case FieldPresets.RANDOM_BAND:
            modes = _random_band(grid, seed, k_band, eta_band, amplitude)
        case str():
            raise InadmissibleParametersError(
                f"unknown preset {source!r}; expected one of {', '.join(FieldPresets.ALL)}",
                code="preset",
            )
        case _:
            modes = _explicit(grid, source)

    base = SpectralField.from_modes(grid, modes)
    if not enforce_reality:
        return base

    given = {(m.k, m.j): m for m in base.modes()}
    out: dict[tuple[int, int], FieldMode] = {}
    for m in base.modes():
        if is_canonical(m.k, m.j):
            out[(m.k, m.j)] = m
            out[(-m.k, -m.j)] = _conjugate(m)
    for m in base.modes():
        if is_canonical(m.k, m.j):
            continue
        if (-m.k, -m.j) in given:
            expected = out[(m.k, m.j)]
            gap = max(abs(m.R - expected.R), abs(m.A - expected.A), abs(m.Omega - expected.Omega))
            if gap > 1e-12 * (1.0 + abs(expected.R) + abs(expected.A) + abs(expected.Omega)):
                raise GridError(f"mode (k={m.k}, j={m.j}) is not the conjugate of its partner", code="reality")
        else:
            out[(m.k, m.j)] = m
            out[(-m.k, -m.j)] = _conjugate(m)
    return SpectralField.from_modes(grid, out.values())


def _conjugate(m: FieldMode) -> FieldMode:
    return FieldMode(-m.k, -m.j, m.R.conjugate(), m.A.conjugate(), m.Omega.conjugate())

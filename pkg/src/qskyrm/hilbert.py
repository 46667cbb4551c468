"""Finite-dimensional spin-orbit Hilbert spaces for heralded photon pairs.

Conventions
-----------
* Circular polarization basis ``(R, L)``, in that order.  ``R`` maps to the
  north pole of the polarization sphere, i.e. S3 = +1.
* The canonical tripartite layout is ``pol_A (slowest) x pol_B x oam_B
  (fastest)`` with dimension ``2 * 2 * d_sp``.
* Orbital-angular-momentum (OAM) bases are ordered tuples of distinct integer
  topological charges.  The ordering is fixed when a state is created and is
  recorded verbatim on export.
* Intermediate states in the pair-source pipeline carry extra axes (an OAM
  axis for arm A); conditional states after heralding carry fewer.  The same
  :class:`State` container covers all of them, with the axis layout held in
  :class:`Space`.

Linear polarization labels used by the measurement modules are fixed here so
every module shares one convention::

    H = (|R> + |L>)/sqrt(2)      S1 = +1
    V = (|R> - |L>)/sqrt(2)      S1 = -1
    D = (|R> + i|L>)/sqrt(2)     S2 = +1
    A = (|R> - i|L>)/sqrt(2)     S2 = -1
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BasisMismatchError,
    EmptyStateError,
    UnsupportedStateError,
    ZeroProbabilityError,
)

__all__ = [
    "OamBasis",
    "Axis",
    "Space",
    "State",
    "QPlateParams",
    "ProjectionAngles",
    "SpdcSpectrum",
    "polarization_ket",
    "pauli_matrices",
    "apply_qplate",
    "spdc_pair_state",
    "build_spin_skyrmion_state",
    "balanced_switch_state",
    "herald_polarization",
    "project_oam",
    "project_oam_b",
    "restrict_oam_b",
    "extract_ghz_state",
    "extract_reference_state",
    "state_overlap",
    "state_to_dict",
    "state_from_dict",
    "save_state",
    "load_state",
]

_NORM_ATOL = 1e-9
_HERM_ATOL = 1e-9
_EIG_FLOOR = -1e-10
_PROB_FLOOR = 1e-12

_POL_KETS = {
    "R": np.array([1.0, 0.0], dtype=complex),
    "L": np.array([0.0, 1.0], dtype=complex),
    "H": np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
    "V": np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0),
    "D": np.array([1.0, 1.0j], dtype=complex) / math.sqrt(2.0),
    "A": np.array([1.0, -1.0j], dtype=complex) / math.sqrt(2.0),
}


def polarization_ket(label: str) -> np.ndarray:
    """Unit ket for one of the six standard polarization labels, in (R, L)."""
    try:
        return _POL_KETS[label].copy()
    except KeyError:
        raise ValueError(f"unknown polarization label {label!r}") from None


def pauli_matrices() -> np.ndarray:
    """Stack (4, 2, 2) of sigma_0..sigma_3 in the (R, L) basis."""
    return np.array(
        [
            [[1, 0], [0, 1]],
            [[0, 1], [1, 0]],
            [[0, -1j], [1j, 0]],
            [[1, 0], [0, -1]],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class OamBasis:
    """Ordered set of distinct integer OAM charges."""

    ells: tuple[int, ...]

    def __post_init__(self):
        ells = tuple(int(l) for l in self.ells)
        if len(ells) == 0:
            raise EmptyStateError("OAM basis must contain at least one charge")
        if len(set(ells)) != len(ells):
            raise BasisMismatchError(f"duplicate OAM charges in basis {ells}")
        object.__setattr__(self, "ells", ells)

    @property
    def dim(self) -> int:
        return len(self.ells)

    def index(self, ell: int) -> int:
        try:
            return self.ells.index(ell)
        except ValueError:
            raise BasisMismatchError(f"charge {ell} not in basis {self.ells}") from None

    def __contains__(self, ell: int) -> bool:
        return ell in self.ells


@dataclass(frozen=True)
class Axis:
    """One tensor factor: a polarization or an OAM axis of a named arm."""

    name: str  # "pol_A", "oam_A", "pol_B", "oam_B"
    kind: str  # "pol" | "oam"
    basis: OamBasis | None = None

    def __post_init__(self):
        if self.kind not in ("pol", "oam"):
            raise ValueError(f"axis kind must be 'pol' or 'oam', got {self.kind!r}")
        if self.kind == "oam" and self.basis is None:
            raise ValueError("oam axis needs a basis")
        if self.kind == "pol" and self.basis is not None:
            raise ValueError("pol axis takes no basis")

    @property
    def dim(self) -> int:
        return 2 if self.kind == "pol" else self.basis.dim

    @property
    def arm(self) -> str:
        return self.name.rsplit("_", 1)[1]


@dataclass(frozen=True)
class Space:
    """Ordered tensor product of axes; first axis is slowest in the flat index."""

    axes: tuple[Axis, ...]

    def __post_init__(self):
        names = [ax.name for ax in self.axes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate axis names {names}")

    @staticmethod
    def tripartite(oam_basis: OamBasis) -> "Space":
        return Space(
            (
                Axis("pol_A", "pol"),
                Axis("pol_B", "pol"),
                Axis("oam_B", "oam", oam_basis),
            )
        )

    @staticmethod
    def photon(oam_basis: OamBasis, arm: str = "B") -> "Space":
        return Space((Axis(f"pol_{arm}", "pol"), Axis(f"oam_{arm}", "oam", oam_basis)))

    @staticmethod
    def pair(oam_a: OamBasis, oam_b: OamBasis) -> "Space":
        return Space(
            (
                Axis("pol_A", "pol"),
                Axis("oam_A", "oam", oam_a),
                Axis("pol_B", "pol"),
                Axis("oam_B", "oam", oam_b),
            )
        )

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(ax.dim for ax in self.axes)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def axis_position(self, name: str) -> int:
        for i, ax in enumerate(self.axes):
            if ax.name == name:
                return i
        raise KeyError(name)

    def axis(self, name: str) -> Axis:
        return self.axes[self.axis_position(name)]

    def has_axis(self, name: str) -> bool:
        return any(ax.name == name for ax in self.axes)

    def oam_basis(self, arm: str = "B") -> OamBasis:
        return self.axis(f"oam_{arm}").basis

    def replace_basis(self, arm: str, basis: OamBasis) -> "Space":
        axes = tuple(
            Axis(ax.name, ax.kind, basis) if ax.name == f"oam_{arm}" else ax
            for ax in self.axes
        )
        return Space(axes)

    def drop_axis(self, name: str) -> "Space":
        axes = tuple(ax for ax in self.axes if ax.name != name)
        if not axes:
            raise ValueError("cannot drop the last axis")
        return Space(axes)

    @property
    def is_tripartite(self) -> bool:
        return tuple(ax.name for ax in self.axes) == ("pol_A", "pol_B", "oam_B")


@dataclass(frozen=True)
class State:
    """Pure amplitude vector or density matrix over a :class:`Space`.

    ``data`` is complex128 and read-only.  Pure vectors are validated to unit
    norm; density matrices to Hermitian, unit trace, and eigenvalues above
    -1e-10.
    """

    space: Space
    kind: str  # "pure" | "density"
    data: np.ndarray

    def __post_init__(self):
        if self.kind not in ("pure", "density"):
            raise ValueError(f"kind must be 'pure' or 'density', got {self.kind!r}")
        arr = np.array(self.data, dtype=complex)
        dim = self.space.dim
        if self.kind == "pure":
            if arr.shape != (dim,):
                raise BasisMismatchError(
                    f"pure state needs shape ({dim},), got {arr.shape}"
                )
            nrm = np.linalg.norm(arr)
            if abs(nrm - 1.0) > _NORM_ATOL:
                raise ValueError(f"pure state norm {nrm!r} is not 1")
        else:
            if arr.shape != (dim, dim):
                raise BasisMismatchError(
                    f"density matrix needs shape ({dim},{dim}), got {arr.shape}"
                )
            if not np.allclose(arr, arr.conj().T, atol=_HERM_ATOL):
                raise ValueError("density matrix is not Hermitian")
            tr = np.trace(arr).real
            if abs(tr - 1.0) > _NORM_ATOL:
                raise ValueError(f"density matrix trace {tr!r} is not 1")
            if np.linalg.eigvalsh(arr).min() < _EIG_FLOOR:
                raise ValueError("density matrix has a negative eigenvalue")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    # -- constructors -------------------------------------------------------

    @staticmethod
    def pure(space: Space, amplitudes: np.ndarray, normalize: bool = False) -> "State":
        arr = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if normalize:
            nrm = np.linalg.norm(arr)
            if nrm < _PROB_FLOOR:
                raise EmptyStateError("cannot normalize a zero vector")
            arr = arr / nrm
        return State(space, "pure", arr)

    @staticmethod
    def density(space: Space, matrix: np.ndarray) -> "State":
        return State(space, "density", np.asarray(matrix, dtype=complex))

    # -- views --------------------------------------------------------------

    @property
    def is_pure(self) -> bool:
        return self.kind == "pure"

    @property
    def dim(self) -> int:
        return self.space.dim

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one index per axis (two per axis if density)."""
        dims = self.space.dims
        if self.is_pure:
            return self.data.reshape(dims)
        return self.data.reshape(dims + dims)

    def to_density(self) -> "State":
        if not self.is_pure:
            return self
        return State.density(self.space, np.outer(self.data, self.data.conj()))

    def amplitude(self, pol_a: str = None, pol_b: str = None, ell_b: int = None) -> complex:
        """Single amplitude of a pure tripartite state by labels."""
        if not self.is_pure:
            raise UnsupportedStateError("amplitude lookup is for pure states")
        if not self.space.is_tripartite:
            raise UnsupportedStateError("amplitude lookup is for tripartite states")
        ia = {"R": 0, "L": 1}[pol_a]
        ib = {"R": 0, "L": 1}[pol_b]
        isp = self.space.oam_basis("B").index(ell_b)
        return complex(self.tensor()[ia, ib, isp])


@dataclass(frozen=True)
class QPlateParams:
    """Geometric-phase plate: charge q (half-integer allowed) and tuning in [0, 1].

    Tuning 0 leaves the beam untouched, tuning 1 converts fully; at tuning t
    each ``|R, l>`` component maps to ``sqrt(1-t)|R, l> + sqrt(t)|L, l-2q>``
    and each ``|L, l>`` to ``sqrt(1-t)|L, l> + sqrt(t)|R, l+2q>``.
    """

    q: float
    tuning: float = 0.5

    def __post_init__(self):
        two_q = 2.0 * self.q
        if abs(two_q - round(two_q)) > 1e-9:
            raise ValueError(f"2q must be an integer, got q={self.q}")
        if not 0.0 <= self.tuning <= 1.0:
            raise ValueError(f"tuning must lie in [0, 1], got {self.tuning}")

    @property
    def charge_shift(self) -> int:
        return int(round(2.0 * self.q))


@dataclass(frozen=True)
class ProjectionAngles:
    """Point on the heralding sphere: theta in [0, pi], alpha in [0, 2*pi].

    Both alpha endpoints name the same physical setting; the closed interval
    lets full-circle sweeps state their last sample directly.
    """

    theta: float
    alpha: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.alpha)):
            raise ValueError("angles must be finite")
        if not -1e-12 <= self.theta <= math.pi + 1e-12:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not -1e-12 <= self.alpha <= 2.0 * math.pi + 1e-12:
            raise ValueError(f"alpha must lie in [0, 2*pi], got {self.alpha}")

    def ket(self) -> np.ndarray:
        """Heralding polarization ket cos(t/2)|R> + sin(t/2) e^{i alpha}|L>."""
        half = 0.5 * self.theta
        return np.array(
            [math.cos(half), math.sin(half) * np.exp(1j * self.alpha)], dtype=complex
        )


@dataclass(frozen=True)
class SpdcSpectrum:
    """Real, non-negative OAM amplitudes of the pair source, unit L2 norm."""

    weights: Mapping[int, float]

    def __post_init__(self):
        w = {int(l): float(a) for l, a in dict(self.weights).items()}
        if not w:
            raise EmptyStateError("spectrum has no entries")
        if any(a < 0.0 for a in w.values()):
            raise ValueError("spectrum amplitudes must be non-negative")
        nrm = math.sqrt(sum(a * a for a in w.values()))
        if nrm <= 0.0:
            raise EmptyStateError("spectrum has zero total weight")
        object.__setattr__(self, "weights", {l: a / nrm for l, a in w.items()})

    @staticmethod
    def flat(ells: Sequence[int]) -> "SpdcSpectrum":
        return SpdcSpectrum({int(l): 1.0 for l in ells})

    @staticmethod
    def gaussian(ells: Sequence[int], bandwidth: float) -> "SpdcSpectrum":
        """Gaussian envelope exp(-l^2 / (2 bandwidth^2)) over the given charges."""
        if bandwidth <= 0.0:
            raise ValueError("bandwidth must be positive")
        return SpdcSpectrum(
            {int(l): math.exp(-0.5 * (l / bandwidth) ** 2) for l in ells}
        )

    def amplitude(self, ell: int) -> float:
        return self.weights.get(int(ell), 0.0)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def apply_qplate(state: State, arm: str, params: QPlateParams) -> State:
    """Apply a geometric-phase plate to the named arm of a pure state.

    The OAM basis of that arm is extended with whatever shifted charges
    acquire amplitude; charges already in the basis are never removed.  The
    map is written with real branch amplitudes, so it is an isometry exactly
    when no shifted component lands on an occupied ``|L, l-2q>`` /
    ``|R, l+2q>`` slot, which holds for every state the pair-source pipeline
    produces.
    """
    if not state.is_pure:
        raise UnsupportedStateError("apply_qplate acts on pure states only")
    if arm not in ("A", "B"):
        raise ValueError(f"arm must be 'A' or 'B', got {arm!r}")
    try:
        ip = state.space.axis_position(f"pol_{arm}")
        io = state.space.axis_position(f"oam_{arm}")
    except KeyError:
        raise UnsupportedStateError(
            f"state carries no polarization+OAM axes for arm {arm!r}"
        ) from None

    basis = state.space.axes[io].basis
    shift = params.charge_shift
    keep = math.sqrt(1.0 - params.tuning)
    move = math.sqrt(params.tuning)

    extended = list(basis.ells)
    for l in basis.ells:
        if l - shift not in extended:
            extended.append(l - shift)
    for l in basis.ells:
        if l + shift not in extended:
            extended.append(l + shift)
    wide = OamBasis(tuple(extended))

    psi = np.moveaxis(state.tensor(), (ip, io), (0, 1))
    rest = psi.shape[2:]
    out = np.zeros((2, wide.dim) + rest, dtype=complex)
    for k, l in enumerate(basis.ells):
        out[0, wide.index(l)] += keep * psi[0, k]
        out[1, wide.index(l - shift)] += move * psi[0, k]
        out[1, wide.index(l)] += keep * psi[1, k]
        out[0, wide.index(l + shift)] += move * psi[1, k]

    # drop added charges that stayed empty; original charges are kept
    occupancy = np.sum(np.abs(out) ** 2, axis=tuple(i for i in range(out.ndim) if i != 1))
    kept = [
        i
        for i, l in enumerate(wide.ells)
        if l in basis.ells or occupancy[i] > 0.0
    ]
    final = OamBasis(tuple(wide.ells[i] for i in kept))
    out = out[:, kept]

    out = np.moveaxis(out, (0, 1), (ip, io))
    space = state.space.replace_basis(arm, final)
    return State(space, "pure", out.reshape(-1))


def spdc_pair_state(ells_a: Sequence[int], spectrum: SpdcSpectrum | None = None) -> State:
    """Anti-correlated pair state sum_l c_l |R, l>_A |R, -l>_B before the plates."""
    ells_a = tuple(int(l) for l in ells_a)
    if spectrum is None:
        spectrum = SpdcSpectrum.flat(ells_a)
    amps = np.array([spectrum.amplitude(l) for l in ells_a], dtype=float)
    if np.linalg.norm(amps) <= 0.0:
        raise EmptyStateError("all requested charges have zero source weight")
    amps = amps / np.linalg.norm(amps)
    basis_a = OamBasis(ells_a)
    basis_b = OamBasis(tuple(-l for l in ells_a))
    space = Space.pair(basis_a, basis_b)
    psi = np.zeros(space.dims, dtype=complex)
    for k, l in enumerate(ells_a):
        psi[0, k, 0, basis_b.index(-l)] = amps[k]
    return State(space, "pure", psi.reshape(-1))


def _normalize_projection(ell_a) -> list[tuple[int, complex]]:
    if isinstance(ell_a, (int, np.integer)):
        entries = [(int(ell_a), 1.0 + 0.0j)]
    elif isinstance(ell_a, Mapping):
        entries = [(int(l), complex(a)) for l, a in ell_a.items()]
    else:
        entries = []
        for item in ell_a:
            if isinstance(item, (int, np.integer)):
                entries.append((int(item), 1.0 + 0.0j))
            else:
                l, a = item
                entries.append((int(l), complex(a)))
    if not entries:
        raise EmptyStateError("projection needs at least one charge")
    if len({l for l, _ in entries}) != len(entries):
        raise BasisMismatchError("duplicate charges in projection")
    nrm = math.sqrt(sum(abs(a) ** 2 for _, a in entries))
    if nrm <= 0.0:
        raise EmptyStateError("projection has zero weight")
    return [(l, a / nrm) for l, a in entries]


def build_spin_skyrmion_state(
    ell_a,
    params: QPlateParams,
    spectrum: SpdcSpectrum | None = None,
) -> State:
    """Tripartite state from the pair source, two plates, and an arm-A OAM filter.

    ``ell_a`` selects the spatial projection on photon A: a single charge, a
    mapping ``{charge: amplitude}``, or a sequence of charges/(charge,
    amplitude) pairs (amplitudes are normalized).  For a single charge l the
    photon-B OAM ladder is ``(-l, -l-2q, -l-4q)`` in that order; for a k-term
    projection the ladders interleave into one basis sorted by charge.
    """
    proj = _normalize_projection(ell_a)
    shift = params.charge_shift
    if shift == 0:
        raise ValueError("plate charge q must be non-zero to build a ladder")

    needed: list[int] = []
    for l, _ in proj:
        for cand in (l, l + shift):
            if cand not in needed:
                needed.append(cand)
    if spectrum is None:
        spectrum = SpdcSpectrum.flat(tuple(needed))
    for l, _ in proj:
        if spectrum.amplitude(l) == 0.0 and spectrum.amplitude(l + shift) == 0.0:
            raise EmptyStateError(
                f"projection charge {l} has zero source weight on both ladder rungs"
            )

    pair = spdc_pair_state(tuple(needed), spectrum)
    pair = apply_qplate(pair, "A", params)
    pair = apply_qplate(pair, "B", params)
    out, prob = project_oam(pair, "A", proj, keep_axis=False)
    if prob < _PROB_FLOOR:
        raise EmptyStateError("arm-A projection annihilated the state")

    # canonical tripartite ordering: ladders from each projection charge,
    # deduplicated, descending for positive q (ascending for negative)
    ladder: list[int] = []
    for l, _ in proj:
        for k in range(3):
            cand = -l - k * shift
            if cand not in ladder:
                ladder.append(cand)
    ladder.sort(reverse=shift > 0)
    out = _reorder_oam(out, "B", prune=True, order=ladder)
    return out


def balanced_switch_state(ells: Sequence[int]) -> State:
    """Balanced tripartite state for an explicit three-charge ladder.

    Returns (|R,R,l1> + |R,L,l2> + |L,R,l2> + |L,L,l3>)/2 over the given
    ``(l1, l2, l3)``.
    """
    l1, l2, l3 = (int(l) for l in ells)
    basis = OamBasis((l1, l2, l3))
    space = Space.tripartite(basis)
    psi = np.zeros(space.dims, dtype=complex)
    psi[0, 0, basis.index(l1)] = 0.5
    psi[0, 1, basis.index(l2)] = 0.5
    psi[1, 0, basis.index(l2)] = 0.5
    psi[1, 1, basis.index(l3)] = 0.5
    return State(space, "pure", psi.reshape(-1))


def _reorder_oam(state: State, arm: str, order: Sequence[int], prune: bool) -> State:
    """Reindex an OAM axis to the given charge order, optionally dropping
    charges with zero occupancy (pure states only)."""
    io = state.space.axis_position(f"oam_{arm}")
    basis = state.space.axes[io].basis
    if state.is_pure:
        psi = np.moveaxis(state.tensor(), io, 0)
        occupancy = np.sum(np.abs(psi) ** 2, axis=tuple(range(1, psi.ndim)))
        charges = [l for l in order if l in basis.ells]
        if prune:
            charges = [l for l in charges if occupancy[basis.index(l)] > 0.0]
        for l in basis.ells:  # anything not mentioned in `order` goes last
            if l not in charges and (not prune or occupancy[basis.index(l)] > 0.0):
                charges.append(l)
        idx = [basis.index(l) for l in charges]
        out = np.moveaxis(psi[idx], 0, io)
        space = state.space.replace_basis(arm, OamBasis(tuple(charges)))
        return State(space, "pure", out.reshape(-1))
    raise UnsupportedStateError("basis reordering is implemented for pure states")


def herald_polarization(state: State, angles: ProjectionAngles) -> tuple[State, float]:
    """Project arm A's polarization onto the heralding ket and drop that axis.

    Returns the renormalized conditional state of what remains (for the
    canonical tripartite input: photon B over pol_B x oam_B) and the
    heralding probability.  Works for pure and density inputs.
    """
    try:
        ip = state.space.axis_position("pol_A")
    except KeyError:
        raise UnsupportedStateError("state has no pol_A axis to herald on") from None
    ket = angles.ket()
    space = state.space.drop_axis("pol_A")
    if state.is_pure:
        psi = np.moveaxis(state.tensor(), ip, 0)
        cond = np.tensordot(ket.conj(), psi, axes=(0, 0))
        prob = float(np.sum(np.abs(cond) ** 2))
        if prob < _PROB_FLOOR:
            raise ZeroProbabilityError(
                f"heralding probability {prob:.3e} below {_PROB_FLOOR:.0e}"
            )
        return State(space, "pure", cond.reshape(-1) / math.sqrt(prob)), prob
    n = len(state.space.axes)
    rho = np.moveaxis(state.tensor(), (ip, n + ip), (0, 1))
    cond = np.einsum("i,ij...,j->...", ket.conj(), rho, ket)
    d = space.dim
    cond = cond.reshape(d, d)
    prob = float(np.trace(cond).real)
    if prob < _PROB_FLOOR:
        raise ZeroProbabilityError(
            f"heralding probability {prob:.3e} below {_PROB_FLOOR:.0e}"
        )
    cond = cond / prob
    cond = 0.5 * (cond + cond.conj().T)  # scrub float dust before validation
    return State(space, "density", cond), prob


def _chi_vector(basis: OamBasis, coeffs) -> np.ndarray:
    entries = _normalize_projection(coeffs)
    chi = np.zeros(basis.dim, dtype=complex)
    for l, a in entries:
        if l in basis:
            chi[basis.index(l)] = a
    return chi


def project_oam(
    state: State, arm: str, coeffs, keep_axis: bool = True
) -> tuple[State, float]:
    """Project the named arm's OAM onto the superposition given by ``coeffs``.

    ``coeffs`` follows the same forms as in :func:`build_spin_skyrmion_state`
    and is normalized.  Requested charges absent from the state's basis
    contribute nothing to the probability; with ``keep_axis`` they do appear
    in the output (a pure state collapses onto the full requested ket, so the
    basis is extended to hold it).  Without ``keep_axis`` the axis is removed.
    Returns the renormalized state and the projection probability.
    """
    try:
        io = state.space.axis_position(f"oam_{arm}")
    except KeyError:
        raise UnsupportedStateError(f"state has no OAM axis for arm {arm!r}") from None
    basis = state.space.axes[io].basis
    entries = _normalize_projection(coeffs)
    chi_in = _chi_vector(basis, entries)
    if np.linalg.norm(chi_in) == 0.0:
        raise ZeroProbabilityError("projection charges are all outside the basis")

    if state.is_pure:
        psi = np.moveaxis(state.tensor(), io, 0)
        overlap = np.tensordot(chi_in.conj(), psi, axes=(0, 0))
        prob = float(np.sum(np.abs(overlap) ** 2))
        if prob < _PROB_FLOOR:
            raise ZeroProbabilityError(
                f"projection probability {prob:.3e} below {_PROB_FLOOR:.0e}"
            )
        if keep_axis:
            wide_ells = list(basis.ells)
            for l, _ in entries:
                if l not in wide_ells:
                    wide_ells.append(l)
            wide = OamBasis(tuple(wide_ells))
            chi_full = np.zeros(wide.dim, dtype=complex)
            for l, a in entries:
                chi_full[wide.index(l)] = a
            out = np.multiply.outer(chi_full, overlap / math.sqrt(prob))
            out = np.moveaxis(out, 0, io)
            space = state.space.replace_basis(arm, wide)
            return State(space, "pure", out.reshape(-1)), prob
        space = state.space.drop_axis(f"oam_{arm}")
        # overlap's axes follow psi's remaining order, which matches `space`
        return State(space, "pure", overlap.reshape(-1) / math.sqrt(prob)), prob

    n = len(state.space.axes)
    rho = np.moveaxis(state.tensor(), (io, n + io), (0, 1))
    cond = np.einsum("i,ij...,j->...", chi_in.conj(), rho, chi_in)
    d_rest = state.space.drop_axis(f"oam_{arm}").dim
    cond = cond.reshape(d_rest, d_rest)
    prob = float(np.trace(cond).real)
    if prob < _PROB_FLOOR:
        raise ZeroProbabilityError(
            f"projection probability {prob:.3e} below {_PROB_FLOOR:.0e}"
        )
    cond = cond / prob
    cond = 0.5 * (cond + cond.conj().T)
    if not keep_axis:
        return State(state.space.drop_axis(f"oam_{arm}"), "density", cond), prob
    for l, _ in entries:
        if l not in basis:
            raise BasisMismatchError(
                "density projection with kept axis needs all charges in the basis"
            )
    unit = chi_in / np.linalg.norm(chi_in)
    mat = np.multiply.outer(np.outer(unit, unit.conj()), cond)
    # axes now (i, j, rest_bra, rest_ket): weave back into the space ordering
    dims = state.space.dims
    rest_dims = tuple(d for k, d in enumerate(dims) if k != io)
    mat = mat.reshape((basis.dim, basis.dim) + rest_dims + rest_dims)
    mat = np.moveaxis(mat, (0, 1), (io, n + io))
    return State(state.space, "density", mat.reshape(state.dim, state.dim)), prob


def project_oam_b(state: State, coeffs) -> State:
    """Rank-one filter of photon B's OAM onto ``coeffs``; axis kept, renormalized."""
    out, _ = project_oam(state, "B", coeffs, keep_axis=True)
    return out


def restrict_oam_b(state: State, ells: Sequence[int]) -> State:
    """Constrain photon B's OAM to the subspace spanned by ``ells``.

    Unlike :func:`project_oam_b` this keeps coherences between the retained
    charges, so entanglement with the other axes survives.
    """
    io = state.space.axis_position("oam_B")
    basis = state.space.axes[io].basis
    keep = [l for l in ells if l in basis]
    if not keep:
        raise ZeroProbabilityError("no requested charge is present in the basis")
    mask = np.array([l in keep for l in basis.ells], dtype=bool)
    if state.is_pure:
        psi = np.moveaxis(state.tensor(), io, 0).copy()
        psi[~mask] = 0.0
        nrm = np.linalg.norm(psi)
        if nrm**2 < _PROB_FLOOR:
            raise ZeroProbabilityError("subspace restriction annihilated the state")
        return State(state.space, "pure", np.moveaxis(psi, 0, io).reshape(-1) / nrm)
    n = len(state.space.axes)
    rho = np.moveaxis(state.tensor(), (io, n + io), (0, 1)).copy()
    rho[~mask] = 0.0
    rho[:, ~mask] = 0.0
    rho = np.moveaxis(rho, (0, 1), (io, n + io)).reshape(state.dim, state.dim)
    tr = np.trace(rho).real
    if tr < _PROB_FLOOR:
        raise ZeroProbabilityError("subspace restriction annihilated the state")
    return State(state.space, "density", rho / tr)


def extract_ghz_state(state: State, ells: Sequence[int] | None = None) -> State:
    """Constrain photon B's OAM to the outer ladder charges.

    For the canonical three-charge ladder this turns the balanced state into
    (|R,R,l1> + |L,L,l3>)/sqrt(2), the three-way entangled form.  ``ells``
    overrides the default (first, last) pair of the basis.
    """
    basis = state.space.oam_basis("B")
    if ells is None:
        if basis.dim != 3:
            raise BasisMismatchError(
                "default extraction expects a three-charge ladder; pass ells explicitly"
            )
        ells = (basis.ells[0], basis.ells[2])
    return restrict_oam_b(state, tuple(ells))


def extract_reference_state(state: State, ell: int | None = None) -> State:
    """Filter photon B's OAM onto the shared middle charge of the ladder."""
    basis = state.space.oam_basis("B")
    if ell is None:
        if basis.dim != 3:
            raise BasisMismatchError(
                "default extraction expects a three-charge ladder; pass ell explicitly"
            )
        ell = basis.ells[1]
    return project_oam_b(state, {int(ell): 1.0})


# ---------------------------------------------------------------------------
# overlaps and serialization
# ---------------------------------------------------------------------------


def _embed_pure(state: State, bases: dict[str, OamBasis]) -> np.ndarray:
    """Amplitude tensor of a pure state embedded into larger OAM bases."""
    psi = state.tensor()
    for name, big in bases.items():
        io = state.space.axis_position(name)
        small = state.space.axes[io].basis
        moved = np.moveaxis(psi, io, 0)
        out = np.zeros((big.dim,) + moved.shape[1:], dtype=complex)
        for k, l in enumerate(small.ells):
            out[big.index(l)] = moved[k]
        psi = np.moveaxis(out, 0, io)
        # axis dims changed; later positions are unaffected because moveaxis
        # restored the original ordering
    return psi


def state_overlap(a: State, b: State) -> complex:
    """Inner product <a|b> of two pure states with matching axis layouts.

    OAM bases may differ; they are merged before the contraction.
    """
    if not (a.is_pure and b.is_pure):
        raise UnsupportedStateError("state_overlap takes pure states")
    names_a = tuple(ax.name for ax in a.space.axes)
    names_b = tuple(ax.name for ax in b.space.axes)
    if names_a != names_b:
        raise BasisMismatchError(f"axis layouts differ: {names_a} vs {names_b}")
    merged: dict[str, OamBasis] = {}
    for ax in a.space.axes:
        if ax.kind != "oam":
            continue
        ells = list(ax.basis.ells)
        for l in b.space.axis(ax.name).basis.ells:
            if l not in ells:
                ells.append(l)
        merged[ax.name] = OamBasis(tuple(ells))
    ta = _embed_pure(a, merged)
    tb = _embed_pure(b, merged)
    return complex(np.vdot(ta, tb))


def state_to_dict(state: State) -> dict:
    """JSON-ready description: basis order, OAM charges, kind, [re, im] pairs."""
    oam = {
        ax.arm: list(ax.basis.ells)
        for ax in state.space.axes
        if ax.kind == "oam"
    }
    flat = state.data.ravel()
    return {
        "basis_order": [ax.name for ax in state.space.axes],
        "oam_basis": oam["B"] if set(oam) == {"B"} else oam,
        "kind": state.kind,
        "amplitudes": [[float(z.real), float(z.imag)] for z in flat],
    }


def state_from_dict(payload: Mapping) -> State:
    names = list(payload["basis_order"])
    oam = payload["oam_basis"]
    if isinstance(oam, Mapping):
        bases = {arm: OamBasis(tuple(int(l) for l in ells)) for arm, ells in oam.items()}
    else:
        bases = {"B": OamBasis(tuple(int(l) for l in oam))}
    axes = []
    for name in names:
        kind, _, arm = name.partition("_")
        if kind == "pol":
            axes.append(Axis(name, "pol"))
        elif kind == "oam":
            try:
                axes.append(Axis(name, "oam", bases[arm]))
            except KeyError:
                raise BasisMismatchError(f"no OAM basis given for arm {arm!r}") from None
        else:
            raise BasisMismatchError(f"unknown axis name {name!r}")
    space = Space(tuple(axes))
    flat = np.array(
        [complex(re, im) for re, im in payload["amplitudes"]], dtype=complex
    )
    kind = payload["kind"]
    if kind == "pure":
        return State(space, "pure", flat)
    dim = space.dim
    return State(space, "density", flat.reshape(dim, dim))


def save_state(path, state: State, meta: Mapping | None = None) -> None:
    doc = state_to_dict(state)
    if meta:
        doc["meta"] = dict(meta)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_state(path) -> tuple[State, dict]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return state_from_dict(doc), dict(doc.get("meta", {}))

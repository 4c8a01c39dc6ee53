"""Commuting projection families: Boolean atoms, standard projections,
multiplicity profiles, atom-block decompositions, and the atom map a partial
isometry induces.

At finite dimension the von Neumann algebra generated by a commuting family
is the linear span of its Boolean atoms, so the atoms are all this module
ever materializes.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .numlin import (
    DEFAULT_TOL,
    InvariantViolation,
    PisomError,
    ShapeMismatch,
    Subspace,
    ToleranceConfig,
    adjoint,
    approx_equal,
    as_matrix,
    commutator_norm,
    dominant_index,
    frobenius,
    frozen,
    full_subspace,
    intersect_with_projection,
    is_projection,
)
from .pisom import PartialIsometry, make_partial_isometry


class NotProjection(PisomError):
    pass


class NonCommutingFamily(PisomError):
    def __init__(self, message: str, worst_pair: tuple[int, int], norm: float):
        super().__init__(message)
        self.worst_pair = worst_pair
        self.norm = norm


class IndexOutOfRange(PisomError):
    pass


class OffDiagonalResidual(PisomError):
    def __init__(self, message: str, worst_pair: tuple[int, int], residual: float):
        super().__init__(message)
        self.worst_pair = worst_pair
        self.residual = residual


class NotStandard(PisomError):
    pass


@dataclass(frozen=True)
class ProjectionFamily:
    dim: int
    members: tuple[np.ndarray, ...]
    max_pairwise_commutator: float
    worst_pair: tuple[int, int] | None

    def __len__(self) -> int:
        return len(self.members)

    def is_commuting(self, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
        scale = max([1.0] + [frobenius(p) for p in self.members])
        return self.max_pairwise_commutator <= cfg.proj_tol * scale


def projection_family(members, dim: int | None = None,
                      cfg: ToleranceConfig = DEFAULT_TOL) -> ProjectionFamily:
    """Validate a list of projections and record the worst pairwise commutator."""
    mats = [as_matrix(p) for p in members]
    if dim is None:
        if not mats:
            raise ShapeMismatch("empty family needs an explicit dimension")
        dim = mats[0].shape[0]
    for i, p in enumerate(mats):
        if p.shape != (dim, dim):
            raise ShapeMismatch(f"member {i} has shape {p.shape}, expected {(dim, dim)}")
        if not is_projection(p, cfg):
            raise NotProjection(f"member {i} is not a projection")
    worst = 0.0
    worst_pair = None
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            c = commutator_norm(mats[i], mats[j])
            if c > worst:
                worst, worst_pair = c, (i, j)
    return ProjectionFamily(dim, tuple(frozen(p) for p in mats), worst, worst_pair)


@dataclass(frozen=True)
class AtomDecomposition:
    """Atoms of the Boolean algebra generated by a commuting family.

    atoms[i] = bases[i] @ bases[i]* are pairwise orthogonal projections
    summing to the identity; generator_masks[k] marks which atoms sum to
    family member k.
    """

    dim: int
    atoms: tuple[np.ndarray, ...]
    ranks: tuple[int, ...]
    generator_masks: tuple[tuple[bool, ...], ...]
    bases: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.atoms)

    def to_json_dict(self) -> dict:
        from .jsonio import matrix_to_json
        return {
            "ranks": list(self.ranks),
            "atoms": [matrix_to_json(a) for a in self.atoms],
            "generator_masks": [list(m) for m in self.generator_masks],
        }


def _atom_sort_key(sub: Subspace) -> tuple:
    proj = sub.projection()
    rounded = np.round(proj, 9)
    return (-sub.dim, dominant_index(proj),
            tuple(rounded.real.ravel().tolist()),
            tuple(rounded.imag.ravel().tolist()))


def boolean_atoms(fam: ProjectionFamily,
                  cfg: ToleranceConfig = DEFAULT_TOL) -> AtomDecomposition:
    """Split the space into joint eigenspaces of the family.

    Starting from the full space, each member splits every surviving cell
    into cell ∩ range(p) and cell ∩ ker(p); zero cells are dropped.  A split
    whose rank decision falls inside a factor-10 band around the SVD cutoff
    raises IllConditionedSplit instead of guessing, because a silently wrong
    atom corrupts every downstream check.

    The empty family yields the single atom I (the algebra C·I).
    """
    if not fam.is_commuting(cfg):
        raise NonCommutingFamily(
            f"family members {fam.worst_pair} have commutator norm "
            f"{fam.max_pairwise_commutator:.3e}",
            fam.worst_pair, fam.max_pairwise_commutator)
    cells: list[tuple[Subspace, tuple[bool, ...]]] = [(full_subspace(fam.dim), ())]
    for p in fam.members:
        split: list[tuple[Subspace, tuple[bool, ...]]] = []
        for sub, pattern in cells:
            inside = intersect_with_projection(sub, p, True, cfg, ambiguity_factor=10.0)
            outside = intersect_with_projection(sub, p, False, cfg, ambiguity_factor=10.0)
            if inside.dim + outside.dim != sub.dim:
                raise InvariantViolation(
                    f"cell of dimension {sub.dim} split into "
                    f"{inside.dim} + {outside.dim}")
            if inside.dim > 0:
                split.append((inside, pattern + (True,)))
            if outside.dim > 0:
                split.append((outside, pattern + (False,)))
        cells = split
    cells.sort(key=lambda item: _atom_sort_key(item[0]))

    atoms = tuple(frozen(sub.projection()) for sub, _ in cells)
    ranks = tuple(sub.dim for sub, _ in cells)
    bases = tuple(frozen(sub.basis) for sub, _ in cells)
    masks = tuple(
        tuple(pattern[k] for _, pattern in cells)
        for k in range(len(fam.members)))

    decomposition = AtomDecomposition(fam.dim, atoms, ranks, masks, bases)
    _validate_atoms(decomposition, fam, cfg)
    return decomposition


def _validate_atoms(dec: AtomDecomposition, fam: ProjectionFamily,
                    cfg: ToleranceConfig) -> None:
    total = np.zeros((dec.dim, dec.dim), dtype=np.complex128)
    for i, a in enumerate(dec.atoms):
        total += a
        for j in range(i + 1, len(dec.atoms)):
            if frobenius(a @ dec.atoms[j]) > cfg.proj_tol * dec.dim:
                raise InvariantViolation(f"atoms {i} and {j} are not orthogonal")
    if not approx_equal(total, np.eye(dec.dim), cfg):
        raise InvariantViolation("atoms do not sum to the identity")
    for k, member in enumerate(fam.members):
        recon = sum((dec.atoms[i] for i in range(len(dec)) if dec.generator_masks[k][i]),
                    start=np.zeros((dec.dim, dec.dim), dtype=np.complex128))
        if not approx_equal(recon, member, cfg):
            raise InvariantViolation(f"family member {k} is not the sum of its atoms")


def standard_projection(atoms: AtomDecomposition, subset) -> np.ndarray:
    """Sum of the selected atoms, the finite-dimensional standard projection."""
    indices = sorted(set(int(i) for i in subset))
    out = np.zeros((atoms.dim, atoms.dim), dtype=np.complex128)
    for i in indices:
        if not 0 <= i < len(atoms):
            raise IndexOutOfRange(f"atom index {i} out of range 0..{len(atoms) - 1}")
        out += atoms.atoms[i]
    return out


@dataclass(frozen=True)
class MultiplicityProfile:
    counts: dict[int, int]
    uniform: bool
    multiplicity: int | None


def multiplicity_profile(atoms: AtomDecomposition) -> MultiplicityProfile:
    """Histogram of atom ranks; uniform iff a single rank occurs."""
    counts = dict(Counter(atoms.ranks))
    uniform = len(counts) == 1
    return MultiplicityProfile(counts, uniform,
                               next(iter(counts)) if uniform else None)


def decompose_by_atoms(t, atoms: AtomDecomposition,
                       cfg: ToleranceConfig = DEFAULT_TOL) -> list[np.ndarray]:
    """Diagonal blocks of t in the atom bases; fails when t couples atoms.

    Succeeds iff every off-diagonal compression a_i t a_j (i != j) vanishes
    within eq_tol, i.e. iff t is decomposable along the atom decomposition.
    """
    t = as_matrix(t)
    if t.shape != (atoms.dim, atoms.dim):
        raise ShapeMismatch(f"operator shape {t.shape}, expected {(atoms.dim,) * 2}")
    scale = max(1.0, frobenius(t))
    worst = (0.0, None)
    for i in range(len(atoms)):
        for j in range(len(atoms)):
            if i == j:
                continue
            residual = frobenius(adjoint(atoms.bases[i]) @ t @ atoms.bases[j])
            if residual > worst[0]:
                worst = (residual, (i, j))
    if worst[0] > cfg.eq_tol * scale:
        raise OffDiagonalResidual(
            f"atoms {worst[1]} are coupled with residual {worst[0]:.3e}",
            worst[1], worst[0])
    return [adjoint(b) @ t @ b for b in atoms.bases]


def membership_in_span(p, atoms: AtomDecomposition,
                       cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Is the projection p a sum of atoms (i.e. in the span algebra)?"""
    p = as_matrix(p)
    if not is_projection(p, cfg):
        raise NotProjection("membership_in_span expects a projection")
    subset = _as_atom_subset(p, atoms, cfg)
    return subset is not None


def _as_atom_subset(p: np.ndarray, atoms: AtomDecomposition,
                    cfg: ToleranceConfig) -> frozenset[int] | None:
    """Express p as a subset of atoms, or None when it is not standard."""
    scale = max(1.0, frobenius(p))
    for i in range(len(atoms)):
        for j in range(i + 1, len(atoms)):
            if frobenius(adjoint(atoms.bases[i]) @ p @ atoms.bases[j]) > cfg.eq_tol * scale:
                return None
    chosen = []
    for i, basis in enumerate(atoms.bases):
        block = adjoint(basis) @ p @ basis
        if frobenius(block) <= cfg.eq_tol * scale:
            continue
        if frobenius(block - np.eye(atoms.ranks[i])) <= cfg.eq_tol * scale:
            chosen.append(i)
            continue
        return None
    return frozenset(chosen)


def induced_atom_map(t: PartialIsometry, atoms: AtomDecomposition,
                     cfg: ToleranceConfig = DEFAULT_TOL) -> dict[int, frozenset[int]]:
    """Atom image map: atom index i -> subset Y with final(t·a_i) = sum of Y.

    Each product t·a_i must validate as a partial isometry and its final
    projection must be standard; images of distinct atoms must be disjoint,
    which is the finite form of additivity over unions.
    """
    if t.dim != atoms.dim:
        raise ShapeMismatch(f"operator dim {t.dim}, atoms dim {atoms.dim}")
    mapping: dict[int, frozenset[int]] = {}
    for i, a in enumerate(atoms.atoms):
        product = make_partial_isometry(t.matrix @ a, cfg)
        subset = _as_atom_subset(np.asarray(product.final), atoms, cfg)
        if subset is None:
            raise NotStandard(
                f"final projection of t·atom[{i}] is not a standard projection")
        mapping[i] = subset
    covered: set[int] = set()
    for i, subset in mapping.items():
        overlap = covered & subset
        if overlap:
            raise NotStandard(
                f"atom images overlap on atoms {sorted(overlap)}; additivity fails")
        covered |= subset
    return mapping

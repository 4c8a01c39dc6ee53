"""Semigroup engine: monitored closure, selfadjoint closure, the P/Q set
predicates, projection enrichment, irreducibility, and Brandt structure.

Finitely generated semigroups of partial isometries can be infinite, so every
closure runs under explicit limits; Truncated is a first-class status and is
never silently promoted to Closed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

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
    frobenius,
    frozen,
    kernel_basis,
    range_basis,
)
from .pisom import NotPartialIsometry, PartialIsometry, make_partial_isometry
from .projlat import AtomDecomposition, ProjectionFamily, boolean_atoms, projection_family

CLOSED = "closed"
TRUNCATED = "truncated"
FAILURE = "failure"


class InvalidState(PisomError):
    pass


class NonCommutingQ(PisomError):
    pass


class NonzeroRequired(PisomError):
    pass


class NoMinimalWithLoop(PisomError):
    pass


class CoverageGap(PisomError):
    pass


class MembershipViolation(PisomError):
    pass


class IdentityViolation(PisomError):
    pass


@dataclass(frozen=True)
class Limits:
    max_elements: int = 20000
    max_word_length: int = 16

    def __post_init__(self):
        if self.max_elements < 1 or self.max_word_length < 1:
            raise ValueError("limits must be positive")


DEFAULT_LIMITS = Limits()


@dataclass(frozen=True)
class GeneratorSet:
    dim: int
    named_generators: tuple[tuple[str, np.ndarray], ...]
    include_identity: bool
    include_zero: bool
    pisoms: tuple[PartialIsometry, ...]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.named_generators)


def generator_set(named, dim: int | None = None, include_identity: bool = True,
                  include_zero: bool = False,
                  cfg: ToleranceConfig = DEFAULT_TOL) -> GeneratorSet:
    """Validate named generator matrices (each must be a partial isometry).

    Names must be unique and must not contain '*', which is reserved for
    adjoints in witness words.
    """
    pairs = []
    pisoms = []
    seen: set[str] = set()
    for name, mat in named:
        if not isinstance(name, str) or not name:
            raise ValueError("generator names must be non-empty strings")
        if "*" in name:
            raise ValueError(f"generator name {name!r} contains reserved character '*'")
        if name in seen:
            raise ValueError(f"duplicate generator name {name!r}")
        seen.add(name)
        pi = make_partial_isometry(mat, cfg)
        pairs.append((name, pi.matrix))
        pisoms.append(pi)
    if dim is None:
        if not pairs:
            raise ShapeMismatch("empty generator set needs an explicit dimension")
        dim = pairs[0][1].shape[0]
    for name, mat in pairs:
        if mat.shape != (dim, dim):
            raise ShapeMismatch(f"generator {name!r} has shape {mat.shape}, expected {(dim, dim)}")
    return GeneratorSet(dim, tuple(pairs), include_identity, include_zero, tuple(pisoms))


@dataclass(frozen=True)
class SemigroupElement:
    matrix: np.ndarray
    word: tuple[str, ...]
    pi: PartialIsometry | None

    def require_pi(self, cfg: ToleranceConfig = DEFAULT_TOL) -> PartialIsometry:
        if self.pi is not None:
            return self.pi
        return make_partial_isometry(self.matrix, cfg)


def word_label(word: tuple[str, ...]) -> str:
    return ".".join(word) if word else "I"


def evaluate_word(name_map: dict[str, np.ndarray], word, dim: int) -> np.ndarray:
    """Replay a witness word; the empty word is the identity."""
    out = np.eye(dim, dtype=np.complex128)
    for name in word:
        if name not in name_map:
            raise KeyError(f"unknown generator name {name!r} in word")
        out = out @ name_map[name]
    return out


class _ElementStore:
    """Growing matrix stack with vectorized tolerance dedup.

    A candidate matches the first retained element within eq_tol (relative);
    retained elements that come within 10x of that band are flagged as
    tolerance-chain risks.
    """

    def __init__(self, dim: int, cfg: ToleranceConfig, capacity: int = 64):
        self.dim = dim
        self.cfg = cfg
        self._buf = np.zeros((capacity, dim, dim), dtype=np.complex128)
        self._norms = np.zeros(capacity)
        self.count = 0

    def lookup(self, mat: np.ndarray):
        """-> (match index | None, near-pair (index, distance) | None)."""
        norm = frobenius(mat)
        if self.count == 0:
            return None, None
        tol = self.cfg.eq_tol
        norms = self._norms[: self.count]
        scale = np.maximum(1.0, np.maximum(norms, norm))
        band = np.abs(norms - norm) <= 10.0 * tol * scale
        idxs = np.nonzero(band)[0]
        if idxs.size == 0:
            return None, None
        diffs = self._buf[idxs] - mat
        dists = np.linalg.norm(diffs.reshape(idxs.size, -1), axis=1)
        matches = dists <= tol * scale[idxs]
        if np.any(matches):
            return int(idxs[np.argmax(matches)]), None
        near = dists <= 10.0 * tol * scale[idxs]
        if np.any(near):
            pos = int(np.argmin(np.where(near, dists, np.inf)))
            return None, (int(idxs[pos]), float(dists[pos]))
        return None, None

    def append(self, mat: np.ndarray) -> int:
        if self.count == self._buf.shape[0]:
            grown = np.zeros((2 * self.count, self.dim, self.dim), dtype=np.complex128)
            grown[: self.count] = self._buf
            self._buf = grown
            norms = np.zeros(2 * self.count)
            norms[: self.count] = self._norms
            self._norms = norms
        self._buf[self.count] = mat
        self._norms[self.count] = frobenius(mat)
        self.count += 1
        return self.count - 1


@dataclass
class ClosureResult:
    """Outcome of a monitored closure run.

    status is CLOSED, TRUNCATED (limit_hit says which limit fired) or FAILURE
    (witness_word evaluates to a matrix failing validation by
    witness_deviation in operator norm).  Elements carry one shortest
    witnessing word each; on FAILURE they are the elements retained before
    the abort.
    """

    dim: int
    generators: GeneratorSet
    name_map: dict[str, np.ndarray]
    elements: list[SemigroupElement]
    status: str
    limit_hit: str | None = None
    witness_word: tuple[str, ...] | None = None
    witness_deviation: float | None = None
    near_duplicate_pairs: list[tuple[int, int, float]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.elements)

    def matrices(self) -> list[np.ndarray]:
        return [e.matrix for e in self.elements]

    def find(self, mat, cfg: ToleranceConfig = DEFAULT_TOL) -> int | None:
        mat = as_matrix(mat)
        for i, e in enumerate(self.elements):
            if approx_equal(e.matrix, mat, cfg):
                return i
        return None

    def evaluate(self, word) -> np.ndarray:
        return evaluate_word(self.name_map, word, self.dim)


def close(gens: GeneratorSet, limits: Limits = DEFAULT_LIMITS,
          monitor_pi: bool = False,
          cfg: ToleranceConfig = DEFAULT_TOL) -> ClosureResult:
    """Breadth-first product closure of the generator set.

    Expansion is by right multiplication with generators, which enumerates
    every word shortest-first; duplicates are merged by approx_equal against
    all retained elements.  With monitor_pi every genuinely new product is
    validated and the first failure aborts with a FAILURE status carrying a
    minimal-length witness word.  Hitting a limit yields TRUNCATED; limits
    are results, not errors.
    """
    dim = gens.dim
    name_map: dict[str, np.ndarray] = {}
    gen_items: list[tuple[str, np.ndarray, PartialIsometry]] = []
    for (name, mat), pi in zip(gens.named_generators, gens.pisoms):
        name_map[name] = mat
        gen_items.append((name, mat, pi))
    if gens.include_zero and all(frobenius(m) > 0 for _, m, _ in gen_items):
        zero = np.zeros((dim, dim), dtype=np.complex128)
        zpi = make_partial_isometry(zero, cfg)
        name_map["0"] = zero
        gen_items.append(("0", zero, zpi))

    store = _ElementStore(dim, cfg)
    elements: list[SemigroupElement] = []
    near_pairs: list[tuple[int, int, float]] = []
    queue: deque[int] = deque()

    def retain(mat, word, pi, near) -> int:
        if near is not None:
            near_pairs.append((near[0], len(elements), near[1]))
        store.append(mat)
        elements.append(SemigroupElement(frozen(mat), word, pi))
        return len(elements) - 1

    limit_hit: str | None = None
    if gens.include_identity:
        identity = np.eye(dim, dtype=np.complex128)
        queue.append(retain(identity, (), make_partial_isometry(identity, cfg), None))
    for name, mat, pi in gen_items:
        match, near = store.lookup(mat)
        if match is None:
            if len(elements) >= limits.max_elements:
                limit_hit = "max_elements"
                break
            queue.append(retain(mat, (name,), pi, near))
    while queue and limit_hit != "max_elements":
        elem = elements[queue.popleft()]
        if len(elem.word) >= limits.max_word_length:
            limit_hit = limit_hit or "max_word_length"
            continue
        for name, gmat, _ in gen_items:
            prod = elem.matrix @ gmat
            match, near = store.lookup(prod)
            if match is not None:
                continue
            word = elem.word + (name,)
            pi = None
            try:
                pi = make_partial_isometry(prod, cfg)
            except NotPartialIsometry as err:
                if monitor_pi:
                    return ClosureResult(
                        dim, gens, name_map, elements, FAILURE,
                        witness_word=word, witness_deviation=err.deviation,
                        near_duplicate_pairs=near_pairs)
            if len(elements) >= limits.max_elements:
                limit_hit = "max_elements"
                queue.clear()
                break
            queue.append(retain(prod, word, pi, near))
        if limit_hit == "max_elements":
            break

    status = TRUNCATED if limit_hit else CLOSED
    return ClosureResult(dim, gens, name_map, elements, status,
                         limit_hit=limit_hit, near_duplicate_pairs=near_pairs)


def adjoint_generator_set(gens: GeneratorSet,
                          cfg: ToleranceConfig = DEFAULT_TOL) -> GeneratorSet:
    """Generators plus their adjoints, the adjoint of NAME named 'NAME*'.

    Adjoints already present among the generators (projections, or pairs that
    are adjoint to each other) are not duplicated.
    """
    named = list(gens.named_generators)
    pisoms = list(gens.pisoms)
    mats = [m for _, m in named]
    for (name, mat), pi in zip(gens.named_generators, gens.pisoms):
        adj = pi.adjoint()
        if any(approx_equal(adj.matrix, m, cfg) for m in mats):
            continue
        named.append((name + "*", adj.matrix))
        pisoms.append(adj)
        mats.append(adj.matrix)
    # built directly: adjoints of validated partial isometries need no re-check,
    # and the public factory reserves '*' for exactly these names
    return GeneratorSet(gens.dim, tuple(named), gens.include_identity,
                        gens.include_zero, tuple(pisoms))


def selfadjoint_closure(gens: GeneratorSet, limits: Limits = DEFAULT_LIMITS,
                        cfg: ToleranceConfig = DEFAULT_TOL) -> ClosureResult:
    """Monitored closure of the generators together with their adjoints."""
    return close(adjoint_generator_set(gens, cfg), limits, monitor_pi=True, cfg=cfg)


@dataclass(frozen=True)
class FamilyProjections:
    p_set: ProjectionFamily
    q_set: ProjectionFamily


def _add_unique(collection: list[np.ndarray], mat: np.ndarray,
                cfg: ToleranceConfig) -> None:
    if not any(approx_equal(mat, m, cfg) for m in collection):
        collection.append(mat)


def same_projection_set(a, b, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Set equality of two projection lists under approx_equal."""
    a = list(a)
    b = list(b)
    return (all(any(approx_equal(p, q, cfg) for q in b) for p in a)
            and all(any(approx_equal(q, p, cfg) for p in a) for q in b))


def family_projections(c: ClosureResult,
                       cfg: ToleranceConfig = DEFAULT_TOL) -> FamilyProjections:
    """Deduplicated initial and final projection families of all elements."""
    if c.status == FAILURE:
        raise InvalidState("closure ended in a failure witness; no projection families")
    ps: list[np.ndarray] = []
    qs: list[np.ndarray] = []
    for e in c.elements:
        pi = e.require_pi(cfg)
        _add_unique(ps, pi.initial, cfg)
        _add_unique(qs, pi.final, cfg)
    return FamilyProjections(projection_family(ps, c.dim, cfg),
                             projection_family(qs, c.dim, cfg))


def check_pq_equal(c: ClosureResult, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    fams = family_projections(c, cfg)
    return same_projection_set(fams.p_set.members, fams.q_set.members, cfg)


def check_pq_contained(c: ClosureResult, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    fams = family_projections(c, cfg)
    for proj in list(fams.p_set.members) + list(fams.q_set.members):
        if c.find(proj, cfg) is None:
            return False
    return True


def _fresh_name(base: str, taken: set[str]) -> str:
    name = base
    k = 1
    while name in taken or "*" in name:
        name = f"{base}#{k}"
        k += 1
    return name.replace("*", "'")


def q_family_commuting(c: ClosureResult, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    return family_projections(c, cfg).q_set.is_commuting(cfg)


def adjoin_final_projections(c: ClosureResult, limits: Limits = DEFAULT_LIMITS,
                             cfg: ToleranceConfig = DEFAULT_TOL) -> ClosureResult:
    """Adjoin Q_T for every element and re-close, iterated to a fixed point.

    On success every element's final projection is itself an element and the
    Boolean algebra generated by the Q family is unchanged (this is asserted
    by recomputing the atoms).  A failure witness or truncation found along
    the way is returned as-is.
    """
    fams = family_projections(c, cfg)
    if not fams.q_set.is_commuting(cfg):
        raise NonCommutingQ("final projections do not commute")
    atoms_before = boolean_atoms(fams.q_set, cfg)

    current = c
    for _ in range(64):
        taken = set(current.name_map)
        missing: list[tuple[str, np.ndarray]] = []
        for e in current.elements:
            q = e.require_pi(cfg).final
            if current.find(q, cfg) is not None:
                continue
            if any(approx_equal(q, m, cfg) for _, m in missing):
                continue
            name = _fresh_name(f"Q[{word_label(e.word)}]", taken)
            taken.add(name)
            missing.append((name, np.asarray(q)))
        if not missing:
            break
        named = list(current.generators.named_generators) + missing
        gens = generator_set(named, dim=current.dim,
                             include_identity=current.generators.include_identity,
                             include_zero=current.generators.include_zero, cfg=cfg)
        current = close(gens, limits, monitor_pi=True, cfg=cfg)
        if current.status != CLOSED:
            return current
    else:
        raise InvariantViolation("final-projection adjunction did not stabilize")

    atoms_after = boolean_atoms(family_projections(current, cfg).q_set, cfg)
    if not same_projection_set(atoms_before.atoms, atoms_after.atoms, cfg):
        raise InvariantViolation("adjunction changed the Boolean algebra of Q")
    return current


def adjoin_algebra_projections(c: ClosureResult, atoms: AtomDecomposition,
                               limits: Limits = DEFAULT_LIMITS,
                               cfg: ToleranceConfig = DEFAULT_TOL) -> ClosureResult:
    """Adjoin every atom of the Q algebra and re-close, monitored.

    Atoms generate all standard projections multiplicatively, so adjoining
    them realizes adjoining every projection of the algebra.  On a closed
    result the atom set is re-derived and compared; a change would violate
    the algebra-preservation guarantee.
    """
    fams = family_projections(c, cfg)
    if not fams.q_set.is_commuting(cfg):
        raise NonCommutingQ("final projections do not commute")
    taken = set(c.name_map)
    named = list(c.generators.named_generators)
    existing = [m for _, m in named]
    for i, atom in enumerate(atoms.atoms):
        if any(approx_equal(atom, m, cfg) for m in existing):
            continue
        name = _fresh_name(f"E{i}", taken)
        taken.add(name)
        named.append((name, np.asarray(atom)))
        existing.append(np.asarray(atom))
    gens = generator_set(named, dim=c.dim,
                         include_identity=c.generators.include_identity,
                         include_zero=c.generators.include_zero, cfg=cfg)
    result = close(gens, limits, monitor_pi=True, cfg=cfg)
    if result.status != CLOSED:
        return result
    atoms_after = boolean_atoms(family_projections(result, cfg).q_set, cfg)
    if not same_projection_set(atoms.atoms, atoms_after.atoms, cfg):
        raise InvariantViolation("adjoining algebra projections changed the Q algebra")
    return result


def enrich_projections(gens: GeneratorSet, limits: Limits = DEFAULT_LIMITS,
                       cfg: ToleranceConfig = DEFAULT_TOL) -> ClosureResult:
    """Fixed point of adjoining both initial and final projections.

    Constructive stand-in for the maximal extensions produced by transfinite
    arguments: alternately adjoin every P and Q that is not yet an element
    and re-close (monitored) until nothing is missing.  Unlike the Q-only
    adjunction this may enlarge the Q algebra unless the uniform-multiplicity
    hypothesis holds, so no algebra-preservation assertion is made here.
    """
    named = list(gens.named_generators)
    include_identity = gens.include_identity
    include_zero = gens.include_zero
    for _ in range(64):
        current_gens = generator_set(named, dim=gens.dim,
                                     include_identity=include_identity,
                                     include_zero=include_zero, cfg=cfg)
        result = close(current_gens, limits, monitor_pi=True, cfg=cfg)
        if result.status != CLOSED:
            return result
        taken = set(result.name_map)
        missing: list[tuple[str, np.ndarray]] = []
        for e in result.elements:
            pi = e.require_pi(cfg)
            for tag, proj in (("Q", pi.final), ("P", pi.initial)):
                if result.find(proj, cfg) is not None:
                    continue
                if any(approx_equal(proj, m, cfg) for _, m in missing):
                    continue
                name = _fresh_name(f"{tag}[{word_label(e.word)}]", taken)
                taken.add(name)
                missing.append((name, np.asarray(proj)))
        if not missing:
            return result
        named.extend(missing)
    raise InvariantViolation("projection enrichment did not stabilize")


@dataclass(frozen=True)
class IrreducibilityResult:
    irreducible: bool
    span_dim: int
    witness: Subspace | None


def is_irreducible(gens: GeneratorSet, cfg: ToleranceConfig = DEFAULT_TOL,
                   seed: int = 0) -> IrreducibilityResult:
    """Burnside test: the unital algebra spanned by the semigroup is the full
    matrix algebra iff its linear span has dimension n^2.

    When reducible, a best-effort invariant subspace is extracted from orbits
    of basis and seeded random vectors under the algebra, and from the
    orthocomplement trick applied to the adjoint algebra.  Absence of a
    witness never weakens the dimension-based verdict.
    """
    n = gens.dim
    gen_mats = [m for _, m in gens.named_generators]
    rows = np.zeros((0, n * n), dtype=np.complex128)
    span_mats: list[np.ndarray] = []

    def grow(mat: np.ndarray) -> bool:
        nonlocal rows
        v = mat.reshape(-1)
        nv = float(np.linalg.norm(v))
        if nv <= cfg.eq_tol:
            return False
        resid = v.astype(np.complex128)
        for _ in range(2):
            if rows.shape[0]:
                resid = resid - rows.T @ (rows.conj() @ resid)
        rn = float(np.linalg.norm(resid))
        if rn <= cfg.rank_tol * max(1.0, nv):
            return False
        rows = np.vstack([rows, (resid / rn)[None, :]])
        span_mats.append(mat)
        return True

    frontier: list[np.ndarray] = []
    for mat in [np.eye(n, dtype=np.complex128)] + gen_mats:
        if grow(mat):
            frontier.append(mat)
    while frontier and rows.shape[0] < n * n:
        fresh: list[np.ndarray] = []
        for mat in frontier:
            for g in gen_mats:
                cand = mat @ g
                if grow(cand):
                    fresh.append(cand)
                    if rows.shape[0] == n * n:
                        break
            if rows.shape[0] == n * n:
                break
        frontier = fresh

    span_dim = rows.shape[0]
    if span_dim == n * n:
        return IrreducibilityResult(True, span_dim, None)

    witness = _invariant_subspace_witness(gen_mats, span_mats, n, cfg, seed)
    return IrreducibilityResult(False, span_dim, witness)


def _is_invariant(basis: np.ndarray, gen_mats, n: int, cfg: ToleranceConfig) -> bool:
    proj = basis @ adjoint(basis)
    comp = np.eye(n) - proj
    for g in gen_mats:
        if frobenius(comp @ g @ basis) > cfg.eq_tol * max(1.0, frobenius(g)) * 10.0:
            return False
    return True


def _invariant_subspace_witness(gen_mats, span_mats, n: int,
                                cfg: ToleranceConfig, seed: int) -> Subspace | None:
    rng = np.random.default_rng(seed)
    candidates = [np.eye(n, dtype=np.complex128)[:, i] for i in range(n)]
    for _ in range(32):
        vec = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        candidates.append(vec / np.linalg.norm(vec))
    # orbits under the algebra itself
    for x in candidates:
        orbit = np.column_stack([m @ x for m in span_mats])
        sub = range_basis(orbit, cfg)
        if 0 < sub.dim < n and _is_invariant(sub.basis, gen_mats, n, cfg):
            return sub
    # orthocomplements of adjoint-algebra orbits are invariant for the originals
    adj_span = [adjoint(m) for m in span_mats]
    for x in candidates:
        orbit = np.column_stack([m @ x for m in adj_span])
        sub = range_basis(orbit, cfg)
        if 0 < sub.dim < n:
            comp = kernel_basis(adjoint(sub.basis), cfg)
            if 0 < comp.dim < n and _is_invariant(comp.basis, gen_mats, n, cfg):
                return comp
    return None


def check_asb_nonzero(gens: GeneratorSet, a, b,
                      cfg: ToleranceConfig = DEFAULT_TOL,
                      limits: Limits = Limits(2000, 8)) -> bool:
    """Does some word w (up to the limits) satisfy a·w·b != 0?

    A False answer only certifies absence up to the searched word length.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if frobenius(a) <= cfg.eq_tol or frobenius(b) <= cfg.eq_tol:
        raise NonzeroRequired("a and b must both be nonzero")
    scale = max(1.0, frobenius(a), frobenius(b))
    result = close(gens, limits, monitor_pi=False, cfg=cfg)
    for e in result.elements:
        if frobenius(a @ e.matrix @ b) > cfg.eq_tol * scale:
            return True
    return False


@dataclass(frozen=True)
class BrandtFamilyMember:
    projection: np.ndarray
    rank: int
    loop: SemigroupElement


@dataclass(frozen=True)
class BrandtStructure:
    """Orthogonal family of minimal projections with loop partial isometries,
    certifying the matrix-unit (Brandt) shape of the ambient semigroup."""

    dim: int
    family: tuple[BrandtFamilyMember, ...]
    checks: dict[str, bool]

    @property
    def family_ranks(self) -> tuple[int, ...]:
        return tuple(m.rank for m in self.family)


def _is_subprojection(small: np.ndarray, big: np.ndarray,
                      cfg: ToleranceConfig) -> bool:
    scale = max(1.0, frobenius(small), frobenius(big))
    return frobenius(big @ small - small) <= cfg.proj_tol * scale


def _brandt_pair_check(mat: np.ndarray, projections, cfg: ToleranceConfig):
    scale = max(1.0, frobenius(mat))
    for i, e1 in enumerate(projections):
        for j, e2 in enumerate(projections):
            block = e1 @ mat @ e2
            if frobenius(block) <= cfg.eq_tol * scale:
                continue
            try:
                pi = make_partial_isometry(block, cfg)
            except NotPartialIsometry:
                return False, f"E{i}·w·E{j} is neither zero nor a partial isometry"
            if not approx_equal(pi.initial, e2, cfg):
                return False, f"initial projection of E{i}·w·E{j} is not E{j}"
            if not approx_equal(pi.final, e1, cfg):
                return False, f"final projection of E{i}·w·E{j} is not E{i}"
    return True, None


def brandt_structure(c: ClosureResult,
                     cfg: ToleranceConfig = DEFAULT_TOL) -> BrandtStructure:
    """Extract and verify the family of minimal projections with loops.

    Verification only: minimal members of the P/Q union are located, a loop
    element with P = Q = E is required for each (NoMinimalWithLoop), the
    family must be orthogonal and cover the space (CoverageGap), and every
    element must pass the pair condition (MembershipViolation).
    """
    fams = family_projections(c, cfg)
    union: list[np.ndarray] = []
    for proj in list(fams.p_set.members) + list(fams.q_set.members):
        if frobenius(proj) <= cfg.eq_tol:
            continue
        _add_unique(union, proj, cfg)

    minimal: list[np.ndarray] = []
    for p in union:
        strictly_below = any(
            _is_subprojection(q, p, cfg) and not approx_equal(q, p, cfg)
            for q in union)
        if not strictly_below:
            minimal.append(p)
    minimal.sort(key=lambda p: (int(np.argmax(np.abs(np.diag(p)))),
                                tuple(np.round(np.diag(p).real, 9).tolist())))

    members: list[BrandtFamilyMember] = []
    for proj in minimal:
        loop = None
        for e in c.elements:
            pi = e.require_pi(cfg)
            if approx_equal(pi.initial, proj, cfg) and approx_equal(pi.final, proj, cfg):
                loop = e
                break
        if loop is None:
            raise NoMinimalWithLoop(
                f"no element has initial = final = the minimal projection with "
                f"dominant coordinate {int(np.argmax(np.abs(np.diag(proj))))}")
        members.append(BrandtFamilyMember(frozen(proj),
                                          int(round(float(np.trace(proj).real))), loop))

    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            prod = members[i].projection @ members[j].projection
            if frobenius(prod) > cfg.proj_tol * c.dim:
                raise CoverageGap(f"minimal projections {i} and {j} are not orthogonal")
    total_rank = sum(m.rank for m in members)
    if total_rank != c.dim:
        raise CoverageGap(
            f"family ranks sum to {total_rank}, not the dimension {c.dim}")

    projections = [m.projection for m in members]
    for e in c.elements:
        ok, reason = _brandt_pair_check(e.matrix, projections, cfg)
        if not ok:
            raise MembershipViolation(f"element {word_label(e.word)}: {reason}")

    checks = {"loops": True, "orthogonal": True, "coverage": True, "membership": True}
    return BrandtStructure(c.dim, tuple(members), checks)


def brandt_membership(w, s: BrandtStructure,
                      cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Pair condition: every E1·w·E2 is zero or a partial isometry moving E2
    exactly onto E1."""
    mat = as_matrix(w)
    if mat.shape != (s.dim, s.dim):
        raise ShapeMismatch(f"matrix shape {mat.shape}, expected {(s.dim, s.dim)}")
    ok, _ = _brandt_pair_check(mat, [m.projection for m in s.family], cfg)
    return ok


@dataclass(frozen=True)
class IntertwiningReport:
    samples: int
    max_residual: float


def check_intertwining_identity(c: ClosureResult, samples: int,
                                cfg: ToleranceConfig = DEFAULT_TOL,
                                seed: int = 0,
                                max_factors: int = 4) -> IntertwiningReport:
    """Sample the conjugation identity S (Q_R1 ... Q_Rm) S* = Q_SR1 ... Q_SRm.

    Tuples are drawn uniformly from the closure elements with m <= max_factors;
    any residual above eq_tol raises IdentityViolation naming the tuple.
    """
    fams = family_projections(c, cfg)
    if not fams.q_set.is_commuting(cfg):
        raise NonCommutingQ("final projections do not commute")
    if not c.elements:
        raise InvalidState("closure has no elements to sample")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        m = int(rng.integers(1, max_factors + 1))
        s_el = c.elements[int(rng.integers(len(c.elements)))]
        r_els = [c.elements[int(rng.integers(len(c.elements)))] for _ in range(m)]
        q_prod = np.eye(c.dim, dtype=np.complex128)
        for r in r_els:
            q_prod = q_prod @ r.require_pi(cfg).final
        lhs = s_el.matrix @ q_prod @ adjoint(s_el.matrix)
        rhs = np.eye(c.dim, dtype=np.complex128)
        for r in r_els:
            sr = s_el.matrix @ r.matrix
            rhs = rhs @ (sr @ adjoint(sr))
        residual = frobenius(lhs - rhs)
        worst = max(worst, residual)
        if residual > cfg.eq_tol * max(1.0, frobenius(lhs), frobenius(rhs)):
            raise IdentityViolation(
                f"identity fails for S = {word_label(s_el.word)}, "
                f"R = {[word_label(r.word) for r in r_els]} "
                f"with residual {residual:.3e}")
    return IntertwiningReport(samples, worst)

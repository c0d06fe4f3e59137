"""Unimodular symmetric forms and their special isometry groups.

Isometries act on columns: A is an isometry of Q when A^T Q A = Q.
"""

from dataclasses import dataclass, field
from itertools import product
from math import isqrt
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import ImmutableMatrix, Poly, Rational

from src.automorphism import Normalization, solve_rank2_middle
from src.config import Config
from src.errors import (
    DomainError,
    InvariantViolation,
    NonSplitJordanBlockError,
    PreconditionError,
)
from src.logger import setup_logger
from src.math_tools import (
    X,
    charpoly_coefficients,
    cyclotomic_orders,
    identity,
    igcdex,
    integer_det,
    integer_inverse,
    integer_kernel_basis,
    integer_trace,
    is_unimodular,
    lcm_of,
    matrix_to_lists,
    require_square,
    to_integer_matrix,
)
from src.records import Completeness, Conclusion, EvidenceItem, EvidenceStatus, VerdictRecord

logger = setup_logger(__name__)

RANK2_FORMS: Dict[str, List[List[int]]] = {
    "Q1": [[1, 0], [0, 1]],
    "Q2": [[-1, 0], [0, -1]],
    "Q3": [[1, 0], [0, -1]],
    "Q4": [[0, 1], [1, 0]],
}


def _sign_changes(coefficients: Sequence[int]) -> int:
    signs = [c > 0 for c in coefficients if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


@dataclass(frozen=True)
class UnimodularForm:
    matrix: ImmutableMatrix

    @classmethod
    def from_matrix(cls, rows: Any, name: str = "Q") -> "UnimodularForm":
        """Validate a symmetric integer matrix with determinant +1 or -1.

        Raises:
            DomainError: If the matrix is not square, not symmetric or not unimodular
        """
        Q = to_integer_matrix(rows, name)
        require_square(Q, name)
        if Q.rows == 0:
            raise DomainError(f"{name} must have rank at least 1")
        if Q != Q.T:
            raise DomainError(f"{name} is not symmetric")
        det = integer_det(Q)
        if det not in (1, -1):
            raise DomainError(f"{name} is not unimodular (det = {det})")
        return cls(Q)

    @property
    def rank(self) -> int:
        return self.matrix.rows

    @property
    def det(self) -> int:
        return integer_det(self.matrix)

    @property
    def signature(self) -> Tuple[int, int]:
        """(positive, negative) eigenvalue counts.

        The characteristic polynomial of a symmetric matrix is real-rooted, so
        Descartes' rule of signs counts its roots exactly.
        """
        coefficients = charpoly_coefficients(self.matrix)
        n = len(coefficients) - 1
        mirrored = [c * (-1) ** (n - i) for i, c in enumerate(coefficients)]
        return _sign_changes(coefficients), _sign_changes(mirrored)

    @property
    def is_definite(self) -> bool:
        return 0 in self.signature

    def pairing(self, u: ImmutableMatrix, v: ImmutableMatrix) -> int:
        return int((u.T * self.matrix * v)[0, 0])

    def to_dict(self) -> Dict[str, Any]:
        p, q = self.signature
        return {"matrix": matrix_to_lists(self.matrix), "rank": self.rank, "signature": [p, q]}


def is_isometry(A: ImmutableMatrix, form: UnimodularForm) -> bool:
    """True when A^T Q A = Q and det A = 1."""
    if A.shape != form.matrix.shape:
        return False
    return A.T * form.matrix * A == form.matrix and integer_det(A) == 1


def _group_key(A: ImmutableMatrix) -> Tuple:
    flat = [int(v) for v in A]
    n = A.rows
    eye = [int(i == j) for i in range(n) for j in range(n)]
    return (flat != eye, flat != [-v for v in eye], flat)


@dataclass
class IsometrySearch:
    form: UnimodularForm
    isometries: List[ImmutableMatrix]
    completeness: Completeness
    entry_bound: Optional[int] = None
    nodes: int = 0
    truncated: bool = False
    reduction: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "form": self.form.to_dict(),
            "completeness": self.completeness.value,
            "entry_bound": self.entry_bound,
            "nodes": self.nodes,
            "truncated": self.truncated,
            "reduction": self.reduction,
            "isometries": [matrix_to_lists(A) for A in self.isometries],
        }


def _vectors_of_norm(Q: List[List[int]], norm: int, bounds: Sequence[int]) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Integer vectors v in the box with v^T Q v = norm, paired with Q v."""
    n = len(Q)
    found = []
    for v in product(*(range(-b, b + 1) for b in bounds)):
        Qv = tuple(sum(Q[i][k] * v[k] for k in range(n)) for i in range(n))
        if sum(a * b for a, b in zip(v, Qv)) == norm:
            found.append((v, Qv))
    return found


def _assemble_columns(
    Q: List[List[int]],
    candidates: Sequence[Sequence[Tuple[Tuple[int, ...], Tuple[int, ...]]]],
    node_limit: Optional[int],
) -> Tuple[List[ImmutableMatrix], int, bool]:
    """Backtrack over column choices keeping Q(a_i, a_j) = Q_ij."""
    n = len(Q)
    chosen: List[Tuple[Tuple[int, ...], Tuple[int, ...]]] = []
    found: List[ImmutableMatrix] = []
    state = {"nodes": 0, "truncated": False}

    def extend(j: int) -> None:
        if j == n:
            A = ImmutableMatrix(n, n, lambda r, c: chosen[c][0][r])
            if integer_det(A) == 1:
                found.append(A)
            return
        for v, Qv in candidates[j]:
            if node_limit is not None and state["nodes"] >= node_limit:
                state["truncated"] = True
                return
            state["nodes"] += 1
            if all(sum(a * b for a, b in zip(chosen[i][1], v)) == Q[i][j] for i in range(j)):
                chosen.append((v, Qv))
                extend(j + 1)
                chosen.pop()
            if state["truncated"]:
                return

    extend(0)
    return found, state["nodes"], state["truncated"]


def _definite_search(form: UnimodularForm) -> IsometrySearch:
    Q = form.matrix if form.signature[1] == 0 else -form.matrix
    Q_inverse = integer_inverse(Q)
    rows = matrix_to_lists(Q)
    n = form.rank
    candidates = []
    largest = 0
    for j in range(n):
        # |v_i|^2 <= Q_jj * (Q^-1)_ii for every v of Q-norm Q_jj
        bounds = [isqrt(rows[j][j] * int(Q_inverse[i, i])) for i in range(n)]
        largest = max(largest, *bounds)
        candidates.append(_vectors_of_norm(rows, rows[j][j], bounds))
    isometries, nodes, _ = _assemble_columns(rows, candidates, None)
    return IsometrySearch(
        form=form,
        isometries=sorted(isometries, key=_group_key),
        completeness=Completeness.CERTIFIED,
        entry_bound=largest,
        nodes=nodes,
    )


def rank2_standard_basis(form: UnimodularForm) -> Tuple[ImmutableMatrix, int]:
    """Basis change P with P^T Q P = [[n, 1], [1, 0]] and n in {0, 1}.

    An indefinite unimodular rank-2 form has det -1, so its discriminant is
    a perfect square and it represents zero.

    Raises:
        DomainError: If the form is not indefinite of rank 2
    """
    if form.rank != 2 or form.is_definite:
        raise DomainError("standard basis needs an indefinite rank-2 form")
    a, b = int(form.matrix[0, 0]), int(form.matrix[0, 1])
    if a == 0:
        p, r = 1, 0
    else:
        slope = Rational(-b + 1, a)
        p, r = int(slope.p), int(slope.q)
    s, t, _ = igcdex(p, r)
    v = ImmutableMatrix([p, r])
    w = ImmutableMatrix([-t, s])
    if form.pairing(v, w) < 0:
        w = -w
    w = w - (form.pairing(w, w) // 2) * v
    n = form.pairing(w, w)
    P = ImmutableMatrix.hstack(w, v)
    if P.T * form.matrix * P != ImmutableMatrix([[n, 1], [1, 0]]):
        raise InvariantViolation(f"rank-2 reduction failed for {matrix_to_lists(form.matrix)}")
    return P, n


def _rank2_indefinite_search(form: UnimodularForm) -> IsometrySearch:
    P, n = rank2_standard_basis(form)
    P_inverse = integer_inverse(P)
    # Ring maps of x^2 = n w, xy = w fixing w are the transposes of the
    # isometries of [[n, 1], [1, 0]].
    standard = solve_rank2_middle(n, det=1, normalization=Normalization.OMEGA_FIXED)
    isometries = [ImmutableMatrix(P * M.T * P_inverse) for M in standard]
    return IsometrySearch(
        form=form,
        isometries=sorted(isometries, key=_group_key),
        completeness=Completeness.CERTIFIED,
        reduction={"basis": matrix_to_lists(P), "standard_form": [[n, 1], [1, 0]]},
    )


def _bounded_search(form: UnimodularForm, entry_bound: int) -> IsometrySearch:
    rows = matrix_to_lists(form.matrix)
    n = form.rank
    box = [entry_bound] * n
    by_norm: Dict[int, list] = {}
    candidates = []
    for j in range(n):
        norm = rows[j][j]
        if norm not in by_norm:
            by_norm[norm] = _vectors_of_norm(rows, norm, box)
        candidates.append(by_norm[norm])
    isometries, nodes, truncated = _assemble_columns(rows, candidates, Config.ISOMETRY_NODE_LIMIT)
    if truncated:
        logger.warning(f"Isometry search stopped after {nodes} nodes (entry bound {entry_bound})")
    return IsometrySearch(
        form=form,
        isometries=sorted(isometries, key=_group_key),
        completeness=Completeness.BOUNDED_ONLY,
        entry_bound=entry_bound,
        nodes=nodes,
        truncated=truncated,
    )


def enumerate_isometries(form: UnimodularForm, entry_bound: Optional[int] = None) -> IsometrySearch:
    """Enumerate SO(Q; Z).

    Definite forms have finitely many isometries and every column of one has
    Q-norm Q_jj, which bounds its entries; that search is complete. Indefinite
    rank-2 forms are reduced to a standard basis and solved in closed form.
    Anything else is a box search over entries in [-entry_bound, entry_bound]
    and only ever BOUNDED_ONLY.

    Args:
        form: The unimodular form
        entry_bound: Box size for the bounded search (Config.ISOMETRY_ENTRY_BOUND by default)

    Returns:
        IsometrySearch with the matrices sorted Id, -Id, then lexicographically
    """
    if form.is_definite:
        search = _definite_search(form)
    elif form.rank == 2:
        search = _rank2_indefinite_search(form)
    else:
        bound = entry_bound if entry_bound is not None else Config.ISOMETRY_ENTRY_BOUND
        if bound < 1:
            raise DomainError(f"entry bound must be positive, got {bound}")
        search = _bounded_search(form, bound)
    logger.debug(
        f"SO(Q;Z) for rank {form.rank}: {len(search.isometries)} elements, {search.completeness.value}"
    )
    return search


def power_stabilize(A: ImmutableMatrix) -> Tuple[int, ImmutableMatrix]:
    """Smallest power of A whose only root-of-unity eigenvalue is 1.

    Returns:
        (m, A^m) with m the lcm of the orders of the cyclotomic factors

    Raises:
        DomainError: If A is not in GL(N, Z)
    """
    A = to_integer_matrix(A, "A")
    if not is_unimodular(A):
        raise DomainError("power_stabilize needs a matrix in GL(N, Z)")
    orders = [k for k in cyclotomic_orders(charpoly_coefficients(A)) if k > 1]
    m = lcm_of(orders)
    return m, ImmutableMatrix(A ** m)


def _is_cyclotomic_product(coefficients: Sequence[int]) -> bool:
    _, factors = Poly(list(coefficients), X).factor_list()
    return all(cyclotomic_orders(f.all_coeffs()) for f, _ in factors if f.degree() > 0)


def has_expanding_eigenvalue(A: ImmutableMatrix) -> bool:
    """True when some eigenvalue of the integer matrix A has modulus above 1.

    For det A = +-1 this fails exactly when the characteristic polynomial is
    a product of cyclotomic polynomials.
    """
    return not _is_cyclotomic_product(charpoly_coefficients(A))


@dataclass
class FixedSplit:
    fixed_rank: int
    complement_basis: ImmutableMatrix
    complement_form: ImmutableMatrix
    fixed_form: ImmutableMatrix
    restricted: ImmutableMatrix
    unimodular_split: bool
    nondegenerate: bool

    @property
    def k(self) -> int:
        return self.complement_basis.cols

    def to_dict(self) -> Dict[str, Any]:
        return {
            "fixed_rank": self.fixed_rank,
            "k": self.k,
            "complement_basis": matrix_to_lists(self.complement_basis),
            "complement_form": matrix_to_lists(self.complement_form),
            "fixed_form": matrix_to_lists(self.fixed_form),
            "restricted": matrix_to_lists(self.restricted),
            "unimodular_split": self.unimodular_split,
            "nondegenerate": self.nondegenerate,
        }


def _restrict(A: ImmutableMatrix, C: ImmutableMatrix) -> ImmutableMatrix:
    if C.cols == 0:
        return ImmutableMatrix.zeros(0, 0)
    gram = C.T * C
    restricted = ImmutableMatrix(gram.inv() * C.T * A * C)
    if not all(v.is_Integer for v in restricted) or C * restricted != A * C:
        raise InvariantViolation("A does not preserve the orthogonal complement of its fixed lattice")
    return restricted


def _check_complement_rank(A: ImmutableMatrix, k: int) -> None:
    if k < 2 and A != identity(A.rows):
        raise InvariantViolation(f"A is not the identity but moves a sublattice of rank {k} only")


def fixed_subspace_split(A: ImmutableMatrix, form: UnimodularForm) -> FixedSplit:
    """Split off the fixed lattice V = ker(A - I) and restrict A to V-perp.

    Args:
        A: Isometry of the form, already stabilized by power_stabilize
        form: The unimodular form

    Returns:
        FixedSplit with the saturated basis of V-perp, Q', Q'' and A'

    Raises:
        DomainError: If A is not an isometry of the form
        PreconditionError: If A still has root-of-unity eigenvalues other than 1
        NonSplitJordanBlockError: If A - I has a Jordan block for eigenvalue 1
        InvariantViolation: If A is not the identity and V-perp has rank below 2,
            or a nondegenerate complement has odd rank or a non-reciprocal
            characteristic polynomial
    """
    A = to_integer_matrix(A, "A")
    if not is_isometry(A, form):
        raise DomainError("A is not in SO(Q; Z)")
    if any(k > 1 for k in cyclotomic_orders(charpoly_coefficients(A))):
        raise PreconditionError("A has root-of-unity eigenvalues other than 1; stabilize it first")
    shifted = A - identity(form.rank)
    if shifted.rank() != (shifted * shifted).rank():
        raise NonSplitJordanBlockError(
            "eigenvalue 1 of A has a non-split Jordan block; Q does not split as Q' + Q''"
        )
    fixed = integer_kernel_basis(shifted)
    complement = integer_kernel_basis(fixed.T * form.matrix)
    Q_complement = ImmutableMatrix(complement.T * form.matrix * complement)
    Q_fixed = ImmutableMatrix(fixed.T * form.matrix * fixed)
    restricted = _restrict(A, complement)

    det_complement = integer_det(Q_complement)
    split = FixedSplit(
        fixed_rank=fixed.cols,
        complement_basis=complement,
        complement_form=Q_complement,
        fixed_form=Q_fixed,
        restricted=restricted,
        unimodular_split=det_complement * integer_det(Q_fixed) in (1, -1),
        nondegenerate=det_complement != 0,
    )
    _check_complement_rank(A, split.k)
    if not split.unimodular_split:
        logger.warning("Fixed lattice and its complement do not split Q unimodularly")
    if split.nondegenerate:
        if split.k % 2:
            raise InvariantViolation(f"complement of the fixed lattice has odd rank {split.k}")
        coefficients = charpoly_coefficients(restricted)
        reversed_coefficients = coefficients[::-1]
        if reversed_coefficients != coefficients and reversed_coefficients != [-c for c in coefficients]:
            raise InvariantViolation(f"restricted charpoly {coefficients} is not reciprocal")
    return split


def periodic_point_sequence(A: ImmutableMatrix, length: int) -> List[int]:
    """2 + Tr(A^l) for l = 1..length."""
    A = to_integer_matrix(A, "A")
    require_square(A, "A")
    values = []
    current = identity(A.rows)
    for _ in range(length):
        current = current * A
        values.append(2 + integer_trace(current))
    return values


def _evidence(constraint: str, status: EvidenceStatus, citation: str, **data: Any) -> EvidenceItem:
    return EvidenceItem(constraint=constraint, status=status, citation=citation, data=data)


def _definite_verdict(form: UnimodularForm) -> VerdictRecord:
    citation = "isometries of a definite form lie in a compact group"
    evidence = [
        _evidence("Q is definite", EvidenceStatus.HOLDS, citation, signature=list(form.signature)),
    ]
    if form.rank <= Config.FORM_SEARCH_LIMIT:
        search = enumerate_isometries(form)
        orders = [power_stabilize(A)[0] for A in search.isometries]
        evidence.append(
            _evidence(
                "SO(Q;Z) is finite",
                EvidenceStatus.COMPUTED,
                citation,
                order=len(search.isometries),
                element_orders=orders,
            )
        )
    evidence.append(
        _evidence(
            "2 + Tr(A^l) is bounded for every isometry",
            EvidenceStatus.HOLDS,
            "A^m = Id for some m >= 1",
        )
    )
    return VerdictRecord(
        conclusion=Conclusion.NO_ANOSOV,
        rule="definite-middle-form",
        evidence=evidence,
        completeness=Completeness.CERTIFIED,
    )


def _rank2_certificates() -> Dict[str, int]:
    return {
        name: len(enumerate_isometries(UnimodularForm.from_matrix(rows, name)).isometries)
        for name, rows in RANK2_FORMS.items()
    }


def feasible_complement_ranks(rank: int, chi_nonzero: bool) -> List[int]:
    """Ranks k of V-perp left open: even, at least 4, and below N when chi != 0."""
    reserve = 1 if chi_nonzero else 0
    return [k for k in range(4, rank + 1, 2) if rank - k >= reserve]


def middle_form_check(
    form: UnimodularForm,
    chi_nonzero: bool = True,
    entry_bound: Optional[int] = None,
) -> VerdictRecord:
    """Decide whether a middle intersection form leaves room for an Anosov map.

    An Anosov diffeomorphism f of a (2n-1)-connected 4n-manifold gives an
    isometry A of Q. After passing to a power, A fixes a lattice V and acts
    on V-perp of rank k with an eigenvalue of modulus above 1. That forces k
    even and k >= 4 (every rank-2 isometry group is finite), and N - k >= 1
    when the Euler characteristic is nonzero.

    Args:
        form: Intersection form on the middle cohomology
        chi_nonzero: Whether the manifold has nonzero Euler characteristic
        entry_bound: Box size for the candidate search on indefinite forms

    Returns:
        NO_ANOSOV when the constraints cannot be met, otherwise INCONCLUSIVE
        with the candidates found by a bounded search

    Raises:
        PreconditionError: If an indefinite form exceeds Config.FORM_SEARCH_LIMIT
    """
    if form.is_definite:
        return _definite_verdict(form)
    if form.rank > Config.FORM_SEARCH_LIMIT:
        raise PreconditionError(
            f"rank {form.rank} exceeds the form search limit {Config.FORM_SEARCH_LIMIT}"
        )

    citation = "growth of 2 + Tr(A^l) on the middle cohomology"
    evidence = [
        _evidence(
            "stabilized A has an eigenvalue of modulus > 1 on V-perp",
            EvidenceStatus.ASSUMED,
            citation,
        ),
        _evidence(
            "k = rank V-perp is even",
            EvidenceStatus.HOLDS,
            "eigenvalues of A' pair as lambda, 1/lambda",
        ),
        _evidence(
            "k >= 4",
            EvidenceStatus.HOLDS,
            "rank-2 isometry groups are finite",
            rank2_group_orders=_rank2_certificates(),
        ),
    ]
    if chi_nonzero:
        evidence.append(
            _evidence("N - k >= 1", EvidenceStatus.HOLDS, "nonzero Euler characteristic", N=form.rank)
        )
    feasible = feasible_complement_ranks(form.rank, chi_nonzero)
    if not feasible:
        evidence.append(
            _evidence(
                "some k satisfies every constraint",
                EvidenceStatus.VIOLATED,
                citation,
                N=form.rank,
                chi_nonzero=chi_nonzero,
            )
        )
        logger.info(f"Rank {form.rank} middle form admits no Anosov action")
        return VerdictRecord(
            conclusion=Conclusion.NO_ANOSOV,
            rule="middle-form-rank",
            evidence=evidence,
            completeness=Completeness.CERTIFIED,
        )

    search = enumerate_isometries(form, entry_bound)
    candidates = []
    skipped = 0
    for A in search.isometries:
        if not has_expanding_eigenvalue(A):
            continue
        m, stabilized = power_stabilize(A)
        try:
            split = fixed_subspace_split(stabilized, form)
        except NonSplitJordanBlockError:
            skipped += 1
            continue
        if split.k in feasible:
            candidates.append({"A": matrix_to_lists(A), "power": m, "k": split.k})
    evidence.append(
        _evidence(
            "admissible isometries found by bounded search",
            EvidenceStatus.COMPUTED,
            "bounded enumeration of SO(Q;Z)",
            feasible_k=feasible,
            entry_bound=search.entry_bound,
            nodes=search.nodes,
            truncated=search.truncated,
            non_split_skipped=skipped,
            candidates=candidates[:5],
            candidate_count=len(candidates),
        )
    )
    logger.warning(
        f"Rank {form.rank} middle form is inconclusive; {len(candidates)} candidates within bound"
    )
    return VerdictRecord(
        conclusion=Conclusion.INCONCLUSIVE,
        rule="middle-form-search",
        evidence=evidence,
        completeness=search.completeness,
    )


@dataclass
class GroupTable:
    names: List[str]
    isometries: List[ImmutableMatrix] = field(default_factory=list)

    def format(self) -> str:
        header = " = ".join(f"SO({name};Z)" for name in self.names)
        lines = [f"{header} = {{"]
        rows = [f"  {matrix_to_lists(A)}" for A in self.isometries]
        lines.append(",\n".join(rows))
        lines.append("}")
        return "\n".join(lines)


def rank2_tables() -> List[GroupTable]:
    """SO(Q;Z) for the four rank-2 unimodular forms, equal groups merged."""
    tables: List[GroupTable] = []
    for name, rows in RANK2_FORMS.items():
        group = enumerate_isometries(UnimodularForm.from_matrix(rows, name)).isometries
        for table in tables:
            if table.isometries == group:
                table.names.append(name)
                break
        else:
            tables.append(GroupTable(names=[name], isometries=group))
    return tables


def format_tables() -> str:
    return "\n".join(table.format() for table in rank2_tables())

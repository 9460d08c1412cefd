"""Stratified nilpotent Lie algebras given by exact structure constants.

An algebra is a graded vector space V_1 + ... + V_M with basis elements
carrying stratum weights and a sparse structure tensor [e_i, e_j] =
sum_k c_ij^k e_k.  Elements have MultiPoly coefficients, so group words
with polynomial entries (t's, a's, formal parameters) are first-class.

The group product is computed through log(exp x exp y) by integrating
dz/dt = phi(ad_z)(y) for z(t) = log(exp x exp(t y)) with exact Bernoulli
coefficients; in a nilpotent algebra of step M the series terminates, and
in an a-truncated coefficient ring every contribution of a-degree >= 2
drops out during polynomial arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from .errors import AlgebraDefinitionError, RegistryMismatchError
from .polyring import MultiPoly, VarRegistry
from .ratlinalg import rank

BracketEntry = tuple[int, int, int, Fraction]  # (i, j, k, c): [e_i, e_j] has c along e_k


@dataclass(frozen=True)
class StratifiedAlgebra:
    """Graded nilpotent Lie algebra by structure constants.

    ``strata_dims[w]`` is dim V_{w+1}; basis indices are 0-based and grouped
    by stratum in order.  ``table`` maps ordered pairs (i, j) to the nonzero
    bracket coefficients; it is antisymmetrically completed at construction.
    ``declared`` keeps the entries as they appeared in the source document so
    the verifier can detect inconsistent double declarations.
    """

    strata_dims: tuple[int, ...]
    labels: tuple[str, ...]
    table: dict
    declared: tuple[BracketEntry, ...] = ()

    @property
    def dim(self) -> int:
        return sum(self.strata_dims)

    @property
    def step(self) -> int:
        return len(self.strata_dims)

    @property
    def weights(self) -> tuple[int, ...]:
        out = []
        for w, d in enumerate(self.strata_dims, start=1):
            out.extend([w] * d)
        return tuple(out)

    def weight(self, i: int) -> int:
        return self.weights[i]

    def stratum_indices(self, w: int) -> tuple[int, ...]:
        """0-based basis indices of stratum w (1-based stratum number)."""
        start = sum(self.strata_dims[: w - 1])
        return tuple(range(start, start + self.strata_dims[w - 1]))

    # -- constant-coefficient bracket (fast path for structural checks) ----

    def bracket_vec(self, u: list, v: list) -> list:
        out = [Fraction(0)] * self.dim
        for (i, j), row in self.table.items():
            ui = u[i]
            if ui == 0:
                continue
            vj = v[j]
            if vj == 0:
                continue
            prod = ui * vj
            for k, c in row.items():
                out[k] += c * prod
        return out

    def bracket_basis(self, i: int, j: int) -> dict:
        return dict(self.table.get((i, j), {}))

    # -- element factories --------------------------------------------------

    def zero_element(self, registry: VarRegistry) -> "AlgebraElement":
        z = MultiPoly.zero(registry)
        return AlgebraElement(self, registry, tuple([z] * self.dim))

    def element(self, registry: VarRegistry, coeffs: dict) -> "AlgebraElement":
        """Element from {basis index: coefficient}; coefficients may be
        MultiPoly, Fraction, int, or strings parsed as rationals."""
        vec = [MultiPoly.zero(registry)] * self.dim
        for i, c in coeffs.items():
            if not isinstance(c, MultiPoly):
                c = MultiPoly.const(registry, c)
            vec[i] = c
        return AlgebraElement(self, registry, tuple(vec))


class AlgebraElement:
    """Algebra element with MultiPoly coefficients over a fixed registry."""

    __slots__ = ("algebra", "registry", "coeffs")

    def __init__(self, algebra: StratifiedAlgebra, registry: VarRegistry, coeffs: tuple):
        if len(coeffs) != algebra.dim:
            raise ValueError("coefficient count != algebra dimension")
        self.algebra = algebra
        self.registry = registry
        self.coeffs = tuple(coeffs)

    def _check(self, other: "AlgebraElement"):
        if self.algebra is not other.algebra:
            raise RegistryMismatchError("elements of different algebras")
        if self.registry is not other.registry and self.registry != other.registry:
            raise RegistryMismatchError("elements over different variable registries")

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coeffs)

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, self.registry,
                              tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, self.registry,
                              tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return AlgebraElement(self.algebra, self.registry, tuple(-a for a in self.coeffs))

    def scale(self, c) -> "AlgebraElement":
        if not isinstance(c, MultiPoly):
            c = MultiPoly.const(self.registry, c)
        return AlgebraElement(self.algebra, self.registry, tuple(a * c for a in self.coeffs))

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return (self.algebra is other.algebra and self.registry == other.registry
                and self.coeffs == other.coeffs)

    def __repr__(self):
        parts = [f"{self.algebra.labels[i]}:({c.to_str()})"
                 for i, c in enumerate(self.coeffs) if not c.is_zero]
        return "AlgebraElement(" + ", ".join(parts) + ")" if parts else "AlgebraElement(0)"


def bracket(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Bilinear extension of the structure tensor; exact coefficients."""
    x._check(y)
    alg = x.algebra
    zero = MultiPoly.zero(x.registry)
    acc = [zero] * alg.dim
    for (i, j), row in alg.table.items():
        xi = x.coeffs[i]
        if xi.is_zero:
            continue
        yj = y.coeffs[j]
        if yj.is_zero:
            continue
        prod = xi * yj
        if prod.is_zero:
            continue
        for k, c in row.items():
            acc[k] = acc[k] + prod * c
    return AlgebraElement(alg, x.registry, tuple(acc))


@lru_cache(maxsize=None)
def _bernoulli(n: int) -> Fraction:
    if n == 0:
        return Fraction(1)
    total = Fraction(0)
    for j in range(n):
        total += comb(n + 1, j) * _bernoulli(j)
    return -total / (n + 1)


@lru_cache(maxsize=None)
def _phi_coefficient(k: int) -> Fraction:
    """Taylor coefficient of z/(1 - e^{-z}): 1, 1/2, B_2/2!, 0, B_4/4!, ..."""
    if k == 0:
        return Fraction(1)
    if k == 1:
        return Fraction(1, 2)
    if k % 2:
        return Fraction(0)
    fact = 1
    for i in range(2, k + 1):
        fact *= i
    return _bernoulli(k) / fact


def bch_product(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """log(exp x * exp y), exact, truncated by nilpotency.

    Integrates dz/dt = phi(ad_z)(y) with z(0) = x; the Taylor coefficient
    z_n collects every group-product term containing n letters y, so the
    sum over n <= step is the full series.
    """
    x._check(y)
    alg = x.algebra
    M = alg.step
    z = [x]  # z[m] = m-th Taylor coefficient of z(t)
    # A[k][n] = coefficient of t^n in ad_{z(t)}^k (y)
    A: list[list[AlgebraElement]] = [[y]]
    zero = alg.zero_element(x.registry)
    for n in range(M):
        # extend A-table at order n using z[0..n]
        if n > 0:
            A[0].append(zero)
        for k in range(1, M):
            if len(A) <= k:
                A.append([])
            acc = zero
            for m in range(n + 1):
                zm = z[m]
                if zm.is_zero:
                    continue
                prev = A[k - 1][n - m]
                if prev.is_zero:
                    continue
                acc = acc + bracket(zm, prev)
            A[k].append(acc)
        term = zero
        for k in range(M):
            coeff = _phi_coefficient(k)
            if coeff == 0 or k >= len(A):
                continue
            ak = A[k][n]
            if ak.is_zero:
                continue
            term = term + ak.scale(coeff)
        z.append(term.scale(Fraction(1, n + 1)))
        if all(A[k][n].is_zero for k in range(len(A))):
            break
    total = z[0]
    for zn in z[1:]:
        total = total + zn
    return total


def dilate_element(x: AlgebraElement, rho) -> AlgebraElement:
    """Grading dilation: stratum-w coefficients scale by rho^w.

    ``rho`` may be a Fraction/int or a MultiPoly (e.g. a formal parameter),
    in which case the result is an exact polynomial identity in rho.
    """
    if not isinstance(rho, MultiPoly):
        rho = MultiPoly.const(x.registry, rho)
    weights = x.algebra.weights
    coeffs = [c * rho ** weights[i] for i, c in enumerate(x.coeffs)]
    return AlgebraElement(x.algebra, x.registry, tuple(coeffs))


# ---------------------------------------------------------------------------
# Structural verification
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    ok: bool
    counterexample: tuple | None = None
    note: str = ""


@dataclass
class StratificationReport:
    antisymmetry: CheckResult
    jacobi: CheckResult
    grading: CheckResult
    generation: CheckResult

    @property
    def ok(self) -> bool:
        return all(c.ok for c in (self.antisymmetry, self.jacobi, self.grading, self.generation))

    def summary(self) -> dict:
        def one(c: CheckResult):
            d = {"ok": c.ok}
            if c.counterexample is not None:
                d["counterexample"] = list(c.counterexample)
            if c.note:
                d["note"] = c.note
            return d

        return {
            "antisymmetry": one(self.antisymmetry),
            "jacobi": one(self.jacobi),
            "grading": one(self.grading),
            "generation": one(self.generation),
            "ok": self.ok,
        }


def verify_stratification(alg: StratifiedAlgebra) -> StratificationReport:
    """Exact pass/fail per property with a first counterexample on failure."""
    dim = alg.dim
    weights = alg.weights
    M = alg.step

    # Antisymmetry: declared entries must be consistent, diagonal must vanish.
    anti = CheckResult(True)
    declared_map: dict[tuple[int, int], dict[int, Fraction]] = {}
    for (i, j, k, c) in alg.declared:
        declared_map.setdefault((i, j), {}).setdefault(k, Fraction(0))
        declared_map[(i, j)][k] += c
    for (i, j), row in declared_map.items():
        if i == j:
            bad = next((k for k, c in row.items() if c != 0), None)
            if bad is not None:
                anti = CheckResult(False, (i + 1, j + 1, bad + 1), "nonzero [e_i, e_i]")
                break
        mirror = declared_map.get((j, i))
        if mirror is None:
            continue
        keys = set(row) | set(mirror)
        bad = next((k for k in sorted(keys)
                    if row.get(k, Fraction(0)) != -mirror.get(k, Fraction(0))), None)
        if bad is not None:
            anti = CheckResult(False, (min(i, j) + 1, max(i, j) + 1, bad + 1),
                               "declared orientations disagree")
            break

    # Jacobi over all basis triples (exact; no tolerance).  Sparse: most
    # bracket rows are empty, so triples usually cost a few dict lookups.
    jac = CheckResult(True)
    table = alg.table

    def _bracket_of_row(acc: dict, row: dict | None, second: int):
        # acc += [sum_l row[l] e_l, e_second]
        if not row:
            return
        for l, c in row.items():
            for m, c2 in table.get((l, second), {}).items():
                acc[m] = acc.get(m, Fraction(0)) + c * c2

    if anti.ok:
        done = False
        for i in range(dim):
            if done:
                break
            for j in range(i + 1, dim):
                if done:
                    break
                row_ij = table.get((i, j))
                for k in range(j + 1, dim):
                    row_jk = table.get((j, k))
                    row_ki = table.get((k, i))
                    if not (row_ij or row_jk or row_ki):
                        continue
                    acc: dict[int, Fraction] = {}
                    _bracket_of_row(acc, row_ij, k)
                    _bracket_of_row(acc, row_jk, i)
                    _bracket_of_row(acc, row_ki, j)
                    if any(c != 0 for c in acc.values()):
                        jac = CheckResult(False, (i + 1, j + 1, k + 1))
                        done = True
                        break
    else:
        jac = CheckResult(False, None, "skipped: antisymmetry failed")

    # Grading: c_ij^k != 0 implies weight(k) = weight(i) + weight(j) <= step.
    grad = CheckResult(True)
    for (i, j), row in alg.table.items():
        bad = next((k for k, c in row.items()
                    if c != 0 and (weights[i] + weights[j] > M
                                   or weights[k] != weights[i] + weights[j])), None)
        if bad is not None:
            grad = CheckResult(False, (i + 1, j + 1, bad + 1))
            break

    # Generation: iterated brackets of V_1 must span every stratum.
    v1 = list(alg.stratum_indices(1))
    unit = [[Fraction(1) if a == b else Fraction(0) for a in range(dim)] for b in range(dim)]
    span = IncrementalSpan(dim)
    frontier = []
    for i in v1:
        span.add(unit[i])
        frontier.append(unit[i])
    while frontier:
        new_frontier = []
        for vec in frontier:
            for i in v1:
                cand = alg.bracket_vec(unit[i], vec)
                if any(c != 0 for c in cand) and span.add(cand):
                    new_frontier.append(cand)
        frontier = new_frontier
    gen = CheckResult(span.dim == dim)
    if not gen.ok:
        gen.note = f"V_1-generated span has dimension {span.dim} < {dim}"

    return StratificationReport(anti, jac, grad, gen)


# ---------------------------------------------------------------------------
# Algebra documents
# ---------------------------------------------------------------------------

def _parse_rational(value) -> Fraction:
    if isinstance(value, bool):
        raise AlgebraDefinitionError(f"non-rational coefficient literal {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise AlgebraDefinitionError(f"non-rational coefficient literal {value!r}") from exc
    raise AlgebraDefinitionError(f"non-rational coefficient literal {value!r}")


def algebra_from_structure(strata: list[int], bracket_entries: list[BracketEntry],
                           labels: list[str] | None = None) -> StratifiedAlgebra:
    """Build an algebra from raw entries, completing antisymmetric pairs."""
    dim = sum(strata)
    if labels is None:
        labels = [f"e{i + 1}" for i in range(dim)]
    if len(labels) != dim:
        raise AlgebraDefinitionError("label count != algebra dimension")
    table: dict[tuple[int, int], dict[int, Fraction]] = {}
    seen = set()
    for (i, j, k, c) in bracket_entries:
        for idx in (i, j, k):
            if not 0 <= idx < dim:
                raise AlgebraDefinitionError(f"basis index {idx + 1} out of range 1..{dim}")
        if c == 0:
            continue
        table.setdefault((i, j), {}).setdefault(k, Fraction(0))
        table[(i, j)][k] += c
        seen.add((i, j))
    # complete the missing orientations
    for (i, j) in list(seen):
        if (j, i) not in seen:
            table[(j, i)] = {k: -c for k, c in table[(i, j)].items()}
    clean = {}
    for key, row in table.items():
        row = {k: c for k, c in row.items() if c != 0}
        if row:
            clean[key] = row
    return StratifiedAlgebra(tuple(strata), tuple(labels), clean, tuple(bracket_entries))


def parse_algebra(document, verify: bool = True) -> StratifiedAlgebra:
    """Parse an algebra-definition document (dict or JSON text).

    Schema: ``{strata: [int], brackets: [{i, j, coeffs: {k: "p/q"}}],
    labels?: [str], vector_fields?: [...]}`` with 1-based basis indices.
    Documents with ``vector_fields`` are closed under brackets instead
    (see :mod:`stratsos.vfields`).
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise AlgebraDefinitionError(f"not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise AlgebraDefinitionError("algebra document must be a JSON object")

    if "vector_fields" in document:
        from .vfields import algebra_from_field_document

        return algebra_from_field_document(document)

    unknown = set(document) - {"strata", "brackets", "labels"}
    if unknown:
        raise AlgebraDefinitionError(f"unknown document fields {sorted(unknown)}")
    strata = document.get("strata")
    if (not isinstance(strata, list) or not strata
            or any(not isinstance(d, int) or d < 1 for d in strata)):
        raise AlgebraDefinitionError("'strata' must be a nonempty list of positive ints")
    entries: list[BracketEntry] = []
    for item in document.get("brackets", []):
        if not isinstance(item, dict) or not {"i", "j", "coeffs"} <= set(item):
            raise AlgebraDefinitionError(f"bad bracket entry {item!r}")
        i, j = item["i"], item["j"]
        if not isinstance(i, int) or not isinstance(j, int):
            raise AlgebraDefinitionError("bracket indices must be integers")
        for k_str, c in item["coeffs"].items():
            k = int(k_str)
            entries.append((i - 1, j - 1, k - 1, _parse_rational(c)))
    labels = document.get("labels")
    alg = algebra_from_structure(strata, entries, labels)
    if verify:
        report = verify_stratification(alg)
        if not report.ok:
            raise AlgebraDefinitionError(
                f"algebra fails stratification checks: {report.summary()}")
    return alg

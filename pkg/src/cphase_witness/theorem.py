"""Trichotomy verification for G_eta and the machinery of its proof.

For a state psi and |S| >= 2, at least one of these holds:

    (1) psi is S-entangled
    (2) G psi is S-entangled
    (3) G simplifies on psi

`verify_trichotomy` evaluates all three independently. When psi and G psi
are both S-separable, `audit_proof` replays the proof's first step on every
test string: it extracts the coefficient system from the two certificates,
checks the case equations and hands the system to the matching lemma.
`construct_witness_y` is the proof's second step, building a test string
with nonzero amplitude from non-simplification alone.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from loguru import logger

from .errors import ArgumentError, InternalContradictionError
from .gate import PhaseGateSpec, apply, eigen_mask, make_gate
from .lemmas import LemmaSystem, check_lemma
from .models import (
    ARITY_FOR_CASE,
    CANONICAL_EMPTIES,
    TAU_SEP,
    TAU_ZERO,
    CaseKind,
    ConclusionBranch,
    Quad,
    Region,
    Relabel,
)
from .separability import (
    SeparationCertificate,
    find_separation,
    min_second_singular_value,
    splitting_spectrum,
    verify_certificate,
)
from .simplification import (
    SimplificationVerdict,
    detect_simplification,
    support_string_with_zero,
    support_string_with_zero_in,
)
from .state import PureState, amplitude, distance
from .strings import (
    PartialString,
    QubitSet,
    build_family,
    enumerate_test_strings,
    format_qubits,
    is_test_string,
    quadrants,
    restrict,
    union,
)

log = logger.bind(component="theorem")

_CASE2_RELABEL: dict[Quad, tuple[Relabel, ...]] = {
    Quad.BC: (),
    Quad.AC: (Relabel.SWAP_AB,),
    Quad.AD: (Relabel.SWAP_AB, Relabel.SWAP_CD),
    Quad.BD: (Relabel.SWAP_CD,),
}


@dataclass(frozen=True)
class CaseTag:
    value: CaseKind
    empty_quads: tuple[Quad, ...]
    relabeling: tuple[Relabel, ...] = ()

    def __str__(self) -> str:
        empties = ",".join(q.value for q in self.empty_quads) or "-"
        moves = ",".join(r.value for r in self.relabeling) or "-"
        return f"{self.value} (empty: {empties}; relabel: {moves})"


@dataclass(frozen=True, eq=False)
class CoefficientSystem:
    """a, b, c, d for one test string, shaped per case.

    case1 keeps all four 2x2 arrays; case2 reduces b to b_{0m} and c to
    c_{j0}; case3 reduces all four to a_{j0}, b_{0m}, c_{j0}, d_{0m}.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    eta: complex
    case: CaseTag
    source: tuple[PartialString, PartialString]

    @property
    def a00_b00(self) -> complex:
        a0 = self.a[0, 0] if self.a.ndim == 2 else self.a[0]
        b0 = self.b[0, 0] if self.b.ndim == 2 else self.b[0]
        return complex(a0 * b0)


@dataclass(frozen=True)
class WitnessConstruction:
    y: PartialString
    case: CaseTag
    amplitude: complex
    intermediates: dict[str, PartialString] = field(default_factory=dict)


@dataclass(frozen=True)
class ProofAudit:
    case: CaseTag
    u: PartialString
    u_in_support: bool
    test_strings: int
    passing: int
    max_a00_b00: float
    lemma_branches: dict[str, int]
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return (
            self.passing == self.test_strings
            and self.lemma_branches.get(ConclusionBranch.VIOLATED.value, 0) == 0
        )

    def __str__(self) -> str:
        branches = ", ".join(f"{k}={v}" for k, v in sorted(self.lemma_branches.items()))
        more = "+" if self.truncated else ""
        return (
            f"{self.case.value}: {self.passing}/{self.test_strings}{more} test strings pass, "
            f"max|a00·b00|={self.max_a00_b00:.3g}, lemma: {branches or 'none'}"
        )


@dataclass(frozen=True, eq=False)
class TrichotomyReport:
    gate: PhaseGateSpec
    input_entangled: bool
    output_entangled: bool
    simplifies: SimplificationVerdict
    input_cert: SeparationCertificate | None
    output_cert: SeparationCertificate | None
    holds: bool
    input_sigma2: float = 0.0
    output_sigma2: float = 0.0
    counterexample_dump: dict[str, Any] | None = None
    audit: ProofAudit | None = None

    @property
    def branches(self) -> tuple[int, ...]:
        fired = []
        if self.input_entangled:
            fired.append(1)
        if self.output_entangled:
            fired.append(2)
        if self.simplifies.simplifies:
            fired.append(3)
        return tuple(fired)


def find_u(psi: PureState, s: Iterable[int], tol: float = TAU_ZERO) -> PartialString | None:
    """Smallest-index support string with u_{|S} all ones; None in the fixed-point regime."""
    hits = np.flatnonzero(eigen_mask(psi, s) & (np.abs(psi.amplitudes) > tol))
    if hits.size == 0:
        return None
    return PartialString.from_index(psi.carrier, int(hits[0]))


def _check_split(p: QubitSet, q: QubitSet, universe: QubitSet, s: QubitSet, label: str) -> None:
    if p & q or (p | q) != universe:
        raise ArgumentError(
            f"{label}={format_qubits(p)}|{format_qubits(q)} is not a bipartition of "
            f"{format_qubits(universe)}"
        )
    if not (p & s and q & s):
        raise ArgumentError(f"{label}={format_qubits(p)}|{format_qubits(q)} does not split S={format_qubits(s)}")


def classify_case(
    s: Iterable[int], a: Iterable[int], b: Iterable[int], c: Iterable[int], d: Iterable[int]
) -> CaseTag:
    """Count empty quadrants and pick the relabeling onto the canonical layout.

    Canonical layout: case2 has S∩B∩C empty, case3 has S∩A∩D and S∩B∩C empty.
    """
    s, a, b, c, d = (frozenset(x) for x in (s, a, b, c, d))
    universe = a | b
    _check_split(a, b, universe, s, "(A,B)")
    _check_split(c, d, universe, s, "(C,D)")

    quads = quadrants(s, a, b, c, d)
    empties = tuple(q for q in Quad if not quads[q])
    if not empties:
        return CaseTag(CaseKind.CASE1, empties)
    if len(empties) == 1:
        return CaseTag(CaseKind.CASE2, empties, _CASE2_RELABEL[empties[0]])
    pattern = frozenset(empties)
    if pattern == CANONICAL_EMPTIES[CaseKind.CASE3]:
        return CaseTag(CaseKind.CASE3, empties)
    if pattern == {Quad.AC, Quad.BD}:
        return CaseTag(CaseKind.CASE3, empties, (Relabel.SWAP_CD,))
    raise ArgumentError(
        f"empty quadrants {[q.value for q in empties]} cannot occur when both splits meet S"
    )


def relabel(
    tag: CaseTag, a: QubitSet, b: QubitSet, c: QubitSet, d: QubitSet
) -> tuple[QubitSet, QubitSet, QubitSet, QubitSet]:
    if Relabel.SWAP_AB in tag.relabeling:
        a, b = b, a
    if Relabel.SWAP_CD in tag.relabeling:
        c, d = d, c
    return a, b, c, d


def extract_coefficients(
    psi: PureState,
    phi: PureState,
    gate: PhaseGateSpec,
    cert_ab: SeparationCertificate,
    cert_cd: SeparationCertificate,
    x: PartialString,
    u: PartialString | None = None,
    tol: float = TAU_SEP,
) -> CoefficientSystem:
    """Inner products of the family strings of (x, u) with the four factors.

    `u` defaults to the all-ones string, which is what the fixed-point regime
    falls back on; any u with u_{|S} all ones keeps the case equations exact.
    """
    s = gate.targets
    if phi.carrier != psi.carrier or x.domain != psi.qubits:
        raise ArgumentError("psi, phi and x must share one carrier")
    if distance(apply(gate, psi), phi) > tol:
        raise ArgumentError(f"phi is not {gate} applied to psi")
    if not verify_certificate(psi, s, cert_ab, tol):
        raise ArgumentError(f"certificate {cert_ab.split} does not reconstruct psi")
    if not verify_certificate(phi, s, cert_cd, tol):
        raise ArgumentError(f"certificate {cert_cd.split} does not reconstruct phi")

    a_set, b_set = cert_ab.split.a, cert_ab.split.b
    c_set, d_set = cert_cd.split.a, cert_cd.split.b
    tag = classify_case(s, a_set, b_set, c_set, d_set)
    if not is_test_string(x, quadrants(s, a_set, b_set, c_set, d_set).values()):
        raise ArgumentError(f"x={x} is not a test string for this configuration")
    if u is None:
        u = PartialString.ones(psi.carrier)
    elif u.domain != psi.qubits or any(u[i] != 1 for i in s):
        raise ArgumentError(f"u={u} must cover the carrier and be all ones on S")

    factors = {
        Region.A: cert_ab.factor_a,
        Region.B: cert_ab.factor_b,
        Region.C: cert_cd.factor_a,
        Region.D: cert_cd.factor_b,
    }
    if Relabel.SWAP_AB in tag.relabeling:
        factors[Region.A], factors[Region.B] = factors[Region.B], factors[Region.A]
    if Relabel.SWAP_CD in tag.relabeling:
        factors[Region.C], factors[Region.D] = factors[Region.D], factors[Region.C]
    a_set, b_set, c_set, d_set = relabel(tag, a_set, b_set, c_set, d_set)

    family = build_family(x, u, a_set, b_set, c_set, d_set)
    full = {
        region: np.array(
            [[amplitude(state, family.get(region, j, k)) for k in (0, 1)] for j in (0, 1)],
            dtype=np.complex128,
        )
        for region, state in factors.items()
    }
    a, b, c, d = full[Region.A], full[Region.B], full[Region.C], full[Region.D]
    if tag.value == CaseKind.CASE2:
        b, c = b[0, :], c[:, 0]
    elif tag.value == CaseKind.CASE3:
        a, b, c, d = a[:, 0], b[0, :], c[:, 0], d[0, :]
    return CoefficientSystem(a=a, b=b, c=c, d=d, eta=gate.eta, case=tag, source=(x, u))


def _case_terms(sys: CoefficientSystem) -> Iterator[tuple[complex, complex, bool]]:
    """Yield (c·d, a·b, is_all_ones) for each case equation."""
    a, b, c, d = sys.a, sys.b, sys.c, sys.d
    if sys.case.value == CaseKind.CASE1:
        for j, k, ell, m in itertools.product((0, 1), repeat=4):
            yield c[j, ell] * d[k, m], a[j, k] * b[ell, m], bool(j & k & ell & m)
    elif sys.case.value == CaseKind.CASE2:
        for j, k, m in itertools.product((0, 1), repeat=3):
            yield c[j] * d[k, m], a[j, k] * b[m], bool(j & k & m)
    else:
        for j, m in itertools.product((0, 1), repeat=2):
            yield c[j] * d[m], a[j] * b[m], bool(j & m)


def case_residual(sys: CoefficientSystem) -> float:
    worst = 0.0
    for cd, ab, all_ones in _case_terms(sys):
        expected = sys.eta * ab if all_ones else ab
        worst = max(worst, abs(cd - expected))
    return worst


def check_case_equations(sys: CoefficientSystem, tol: float = TAU_SEP) -> bool:
    """c_{jl} d_{km} = eta a_{jk} b_{lm} on the all-ones index, = a_{jk} b_{lm} elsewhere."""
    return case_residual(sys) <= tol


def to_lemma_system(sys: CoefficientSystem) -> LemmaSystem:
    """The matching lemma's system; its eta is the conjugate of the gate's."""
    return LemmaSystem(
        arity=ARITY_FOR_CASE[sys.case.value],
        a=sys.a,
        b=sys.b,
        c=sys.c,
        d=sys.d,
        eta=complex(np.conj(sys.eta)),
    )


def _require(found: PartialString | None, what: str, diagnostics: dict[str, Any]) -> PartialString:
    if found is None:
        raise InternalContradictionError(f"no support string {what}", diagnostics)
    return found


def construct_witness_y(
    psi: PureState,
    phi: PureState,
    s: Iterable[int],
    a: Iterable[int],
    b: Iterable[int],
    c: Iterable[int],
    d: Iterable[int],
    case: CaseTag | None = None,
    tol: float = TAU_ZERO,
) -> WitnessConstruction:
    """Build a test string y with <y|psi> != 0.

    Every choice takes the smallest qubit index and the smallest-index
    support string. Case 1 glues y_A from y_AC on C and y_AD on D (same for
    B); case 2 does that for A and takes any support string with a 0 in S∩B;
    case 3 takes such strings for both sides. Raises ArgumentError when G
    simplifies on psi, and InternalContradictionError when a step the
    construction relies on cannot be carried out.
    """
    s, a_set, b_set, c_set, d_set = (frozenset(x) for x in (s, a, b, c, d))
    verdict = detect_simplification(psi, s, tol)
    if verdict.simplifies:
        raise ArgumentError(f"G simplifies on psi ({verdict}); no witness string exists")
    tag = case or classify_case(s, a_set, b_set, c_set, d_set)
    a_set, b_set, c_set, d_set = relabel(tag, a_set, b_set, c_set, d_set)
    quads = quadrants(s, a_set, b_set, c_set, d_set)
    diagnostics: dict[str, Any] = {"case": str(tag), "S": sorted(s), "tol": tol}
    empties = frozenset(q for q in Quad if not quads[q])
    if empties != CANONICAL_EMPTIES[tag.value]:
        raise ArgumentError(
            f"{tag} does not match the splits: empty quadrants after relabeling are "
            f"{sorted(q.value for q in empties)}"
        )
    steps: dict[str, PartialString] = {}

    def glued(side: str, on_c: QubitSet, on_d: QubitSet) -> PartialString:
        y_c = _require(support_string_with_zero(psi, min(on_c), tol), f"with a 0 at {min(on_c)}", diagnostics)
        y_d = _require(support_string_with_zero(psi, min(on_d), tol), f"with a 0 at {min(on_d)}", diagnostics)
        steps[f"y_{side}C"], steps[f"y_{side}D"] = y_c, y_d
        for label, z in ((f"y_{side}C", y_c), (f"y_{side}D", y_d)):
            diagnostics[f"{label} psi/phi"] = (amplitude(psi, z), amplitude(phi, z))
        return union(restrict(y_c, c_set), restrict(y_d, d_set))

    def simple(side: str, members: QubitSet) -> PartialString:
        return _require(
            support_string_with_zero_in(psi, members, tol),
            f"with a 0 in S∩{side}={format_qubits(members)}",
            diagnostics,
        )

    if tag.value == CaseKind.CASE1:
        y_a = glued("A", quads[Quad.AC], quads[Quad.AD])
        y_b = glued("B", quads[Quad.BC], quads[Quad.BD])
    elif tag.value == CaseKind.CASE2:
        y_a = glued("A", quads[Quad.AC], quads[Quad.AD])
        y_b = simple("B", s & b_set)
    else:
        y_a = simple("A", s & a_set)
        y_b = simple("B", s & b_set)
    steps["y_A"], steps["y_B"] = y_a, y_b

    y = union(restrict(y_a, a_set), restrict(y_b, b_set))
    steps["y"] = y
    value = amplitude(psi, y)
    diagnostics.update({name: str(z) for name, z in steps.items()})
    diagnostics["<y|psi>"] = value
    if not is_test_string(y, quads.values()):
        raise InternalContradictionError(f"y={y} is not a test string", diagnostics)
    if abs(value) <= tol:
        raise InternalContradictionError(f"<y|psi> = 0 at y={y}", diagnostics)
    log.debug(f"witness y={y} for {tag.value}, <y|psi>={value:.4g}")
    return WitnessConstruction(y=y, case=tag, amplitude=value, intermediates=steps)


def audit_proof(
    psi: PureState,
    gate: PhaseGateSpec,
    report: TrichotomyReport,
    tol: float = TAU_SEP,
    limit: int = 256,
) -> ProofAudit | None:
    """Replay step (1) on up to `limit` test strings; None without both certificates."""
    if report.input_cert is None or report.output_cert is None:
        return None
    phi = apply(gate, psi)
    s = gate.targets
    cert_ab, cert_cd = report.input_cert, report.output_cert
    tag = classify_case(s, cert_ab.split.a, cert_ab.split.b, cert_cd.split.a, cert_cd.split.b)
    quads = quadrants(s, cert_ab.split.a, cert_ab.split.b, cert_cd.split.a, cert_cd.split.b)
    found = find_u(psi, s)
    u = found or PartialString.ones(psi.carrier)

    seen = passing = 0
    worst = 0.0
    branches: dict[str, int] = {}
    truncated = False
    for x in enumerate_test_strings(psi.carrier, quads.values()):
        if seen >= limit:
            truncated = True
            break
        seen += 1
        sys = extract_coefficients(psi, phi, gate, cert_ab, cert_cd, x, u, tol)
        if check_case_equations(sys, tol):
            passing += 1
        worst = max(worst, abs(sys.a00_b00))
        lemma = check_lemma(to_lemma_system(sys), tol)
        key = lemma.conclusion_branch.value
        branches[key] = branches.get(key, 0) + 1

    audit = ProofAudit(
        case=tag,
        u=u,
        u_in_support=found is not None,
        test_strings=seen,
        passing=passing,
        max_a00_b00=worst,
        lemma_branches=branches,
        truncated=truncated,
    )
    log.debug(f"audit: {audit}")
    return audit


def _dump(
    psi: PureState, gate: PhaseGateSpec, phi: PureState, tau_sep: float, tau_zero: float
) -> dict[str, Any]:
    def spectrum(state: PureState) -> list[dict[str, Any]]:
        return [
            {"split": str(split), "singular_values": list(sv)}
            for split, sv in splitting_spectrum(state, gate.targets)
        ]

    return {
        "carrier": list(psi.carrier),
        "amplitudes": [[float(z.real), float(z.imag)] for z in psi.amplitudes],
        "S": sorted(gate.targets),
        "theta": gate.theta,
        "eta": [gate.eta.real, gate.eta.imag],
        "tau_sep": tau_sep,
        "tau_zero": tau_zero,
        "input_spectrum": spectrum(psi),
        "output_spectrum": spectrum(phi),
    }


def verify_trichotomy(
    psi: PureState,
    s: Iterable[int],
    theta: float,
    tau_sep: float = TAU_SEP,
    tau_zero: float = TAU_ZERO,
    audit: bool = True,
) -> TrichotomyReport:
    """Evaluate all three branches; `holds` is their disjunction.

    A report with holds = False carries a counterexample dump. That points
    at tolerances or numerics, since the statement itself is exact.
    """
    targets = frozenset(s)
    if len(targets) < 2:
        raise ArgumentError(f"|S| >= 2 required, got S={format_qubits(targets)}")
    gate = make_gate(targets, theta)
    phi = apply(gate, psi)

    input_cert = find_separation(psi, targets, tau_sep)
    output_cert = find_separation(phi, targets, tau_sep)
    verdict = detect_simplification(psi, targets, tau_zero)
    input_entangled = input_cert is None
    output_entangled = output_cert is None
    holds = input_entangled or output_entangled or verdict.simplifies

    dump = None
    if not holds:
        dump = _dump(psi, gate, phi, tau_sep, tau_zero)
        log.error(f"no trichotomy branch holds for {gate} on {psi!r}")

    report = TrichotomyReport(
        gate=gate,
        input_entangled=input_entangled,
        output_entangled=output_entangled,
        simplifies=verdict,
        input_cert=input_cert,
        output_cert=output_cert,
        holds=holds,
        input_sigma2=min_second_singular_value(psi, targets) if input_entangled else 0.0,
        output_sigma2=min_second_singular_value(phi, targets) if output_entangled else 0.0,
        counterexample_dump=dump,
    )
    if audit and input_cert is not None and output_cert is not None:
        proof = audit_proof(psi, gate, report, tau_sep)
        report = replace(report, audit=proof)
    log.debug(f"{gate}: branches={report.branches}, holds={holds}")
    return report

"""Core enums, constants, and tolerances for cphase-witness.

Enums:
    SimplificationKind -- How a gate application can be inessential (none,
                          fixed_point, reduces).
    CaseKind           -- Proof case by number of empty S-quadrants (1, 2, 3).
    Quad               -- The four quadrants S∩A∩C, S∩A∩D, S∩B∩C, S∩B∩D.
    Region             -- Side of a bipartition a family string lives on.
    Relabel            -- Symmetry action used to reach the canonical orientation.
    LemmaArity         -- Which coefficient lemma a system belongs to.
    ConclusionBranch   -- Outcome of a lemma check.
    FamilyKind         -- Generated state families for the fuzz harness.
    ExitCode           -- Stable process exit codes for the CLI.
"""

from enum import IntEnum, StrEnum

# Squared-norm deviation allowed for a unit state.
TAU_NORM: float = 1e-9
# |eta - 1| below this is treated as the identity phase.
TAU_ETA: float = 1e-9
# Threshold on sigma_2 / 2x2 minors for rank-one decisions.
TAU_SEP: float = 1e-8
# Amplitudes at or below this modulus count as zero.
TAU_ZERO: float = 1e-9
# Residual tolerance for lemma equation systems.
LEMMA_TOL: float = 1e-9

MAX_QUBITS: int = 24
REPORT_SCHEMA: int = 1


class SimplificationKind(StrEnum):
    NONE = "none"
    FIXED_POINT = "fixed_point"
    REDUCES = "reduces"


class CaseKind(StrEnum):
    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"


class Quad(StrEnum):
    AC = "AC"
    AD = "AD"
    BC = "BC"
    BD = "BD"


class Region(StrEnum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"


class Relabel(StrEnum):
    SWAP_AB = "swap_ab"
    SWAP_CD = "swap_cd"


class LemmaArity(StrEnum):
    FOUR = "4sets"
    THREE = "3sets"
    TWO = "2sets"


class ConclusionBranch(StrEnum):
    C_ZERO = "c_branch_zero"
    D_ZERO = "d_branch_zero"
    VACUOUS = "vacuous"
    VIOLATED = "violated"


class FamilyKind(StrEnum):
    HAAR = "haar"
    PRODUCT = "product"
    FORCED_FIXED_POINT = "forced_fixed_point"
    FORCED_REDUCE = "forced_reduce"
    BASIS = "basis"
    PLUS_ALL = "plus_all"


class ExitCode(IntEnum):
    OK = 0
    CONTRADICTION = 2
    USAGE = 64
    DATA = 65
    FILE = 66


# Which case each lemma arity covers, and back.
ARITY_FOR_CASE: dict[CaseKind, LemmaArity] = {
    CaseKind.CASE1: LemmaArity.FOUR,
    CaseKind.CASE2: LemmaArity.THREE,
    CaseKind.CASE3: LemmaArity.TWO,
}

# Canonical empty quadrants after relabeling.
CANONICAL_EMPTIES: dict[CaseKind, frozenset[Quad]] = {
    CaseKind.CASE1: frozenset(),
    CaseKind.CASE2: frozenset({Quad.BC}),
    CaseKind.CASE3: frozenset({Quad.AD, Quad.BC}),
}

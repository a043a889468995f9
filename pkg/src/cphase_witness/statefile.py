"""Plain-text state files.

    # comment
    n=2
    00  0.5  0
    11 -0.5  0

First non-comment line is the qubit count; each row is a bitstring (leftmost
character is qubit 1) and the real and imaginary parts. Unlisted basis
states are zero.
"""

from __future__ import annotations

import cmath
from pathlib import Path

import numpy as np
from loguru import logger

from .errors import DomainError, StateFileAccessError, StateFileError
from .models import MAX_QUBITS, TAU_NORM
from .state import PureState, make_state
from .strings import PartialString, format_qubits

log = logger.bind(component="statefile")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_header(text: str, line_no: int, max_qubits: int) -> int:
    key, sep, value = text.partition("=")
    if key.strip() != "n" or not sep:
        raise StateFileError(f"expected header 'n=<int>', got {text!r}", line_no)
    try:
        n = int(value.strip())
    except ValueError:
        raise StateFileError(f"qubit count {value.strip()!r} is not an integer", line_no) from None
    if not 1 <= n <= max_qubits:
        raise StateFileError(f"qubit count {n} outside 1..{max_qubits}", line_no)
    return n


def parse_state_file(
    text: str,
    renormalize: bool = False,
    tol: float = TAU_NORM,
    max_qubits: int = MAX_QUBITS,
) -> PureState:
    """Parse state file text into a PureState on qubits 1..n.

    Raises StateFileError on malformed input and NormalizationError when the
    amplitudes are not unit-norm (unless `renormalize`).
    """
    n: int | None = None
    vec: np.ndarray | None = None
    seen: dict[str, int] = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if n is None:
            n = _parse_header(line, line_no, max_qubits)
            vec = np.zeros(1 << n, dtype=np.complex128)
            continue

        fields = line.split()
        if len(fields) != 3:
            raise StateFileError(f"expected '<bits> <re> <im>', got {line!r}", line_no)
        bits, re_text, im_text = fields
        if bits in seen:
            raise StateFileError(f"duplicate bitstring {bits} (first on line {seen[bits]})", line_no)
        try:
            x = PartialString.from_bits(range(1, n + 1), bits)
        except DomainError as e:
            raise StateFileError(str(e), line_no) from None
        try:
            value = complex(float(re_text), float(im_text))
        except ValueError:
            raise StateFileError(f"amplitude {re_text} {im_text} is not a pair of decimals", line_no) from None
        if not cmath.isfinite(value):
            raise StateFileError(f"amplitude {re_text} {im_text} is not finite", line_no)
        seen[bits] = line_no
        vec[x.index] = value

    if n is None or vec is None:
        raise StateFileError("missing header 'n=<int>'")
    log.debug(f"parsed {len(seen)} rows for n={n}")
    return make_state(range(1, n + 1), vec, renormalize=renormalize, tol=tol, max_qubits=max_qubits)


def serialize_state(psi: PureState) -> str:
    """State file text; nonzero amplitudes only, 17 significant digits."""
    expected = tuple(range(1, psi.n + 1))
    if psi.carrier != expected:
        raise DomainError(f"state files hold qubits 1..n, got carrier {format_qubits(psi.carrier)}")
    lines = [f"n={psi.n}"]
    for index, value in enumerate(psi.amplitudes):
        if value == 0:
            continue
        bits = PartialString.from_index(expected, index).to_bitstring()
        lines.append(f"{bits} {value.real:.17g} {value.imag:.17g}")
    return "\n".join(lines) + "\n"


def read_state_file(
    path: Path,
    renormalize: bool = False,
    tol: float = TAU_NORM,
    max_qubits: int = MAX_QUBITS,
) -> PureState:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise StateFileAccessError(f"cannot read {path}: {e.strerror or e}") from e
    return parse_state_file(text, renormalize=renormalize, tol=tol, max_qubits=max_qubits)


def write_state_file(path: Path, psi: PureState) -> None:
    try:
        Path(path).write_text(serialize_state(psi), encoding="utf-8")
    except OSError as e:
        raise StateFileAccessError(f"cannot write {path}: {e.strerror or e}") from e
    log.info(f"wrote {psi!r} to {path}")

"""CLI entry point: czw analyze / fuzz / lemma / gen."""

from __future__ import annotations

import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import click
import numpy as np
from loguru import logger
from pydantic import ValidationError

from .config import WitnessConfig
from .errors import (
    InternalContradictionError,
    StateFileAccessError,
    WitnessError,
    categorize_error,
)
from .gate import apply
from .harness import FuzzConfig, StateFamily, fuzz_trichotomy, generate, lemma_batch
from .models import REPORT_SCHEMA, ExitCode, FamilyKind, LemmaArity
from .separability import Bipartition, SeparationCertificate, is_everywhere_entangled
from .state import PureState
from .statefile import read_state_file, serialize_state, write_state_file
from .strings import QubitSet, format_qubits, full_set
from .theorem import TrichotomyReport, verify_trichotomy

log = logger.bind(component="cli")

_THETA_RE = re.compile(r"^(?P<sign>[+-]?)pi(?:/(?P<div>\d+))?$")

_ARITIES = {"4": LemmaArity.FOUR, "3": LemmaArity.THREE, "2": LemmaArity.TWO}

_FAMILY_ALIASES = {"plus": FamilyKind.PLUS_ALL}


class ThetaType(click.ParamType):
    """An angle: 'pi', '-pi', 'pi/2' or a decimal."""

    name = "theta"

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None) -> float:
        if isinstance(value, (int, float)):
            return float(value)
        text = str(value).strip().lower()
        match = _THETA_RE.match(text)
        if match:
            div = int(match["div"] or 1)
            if div == 0:
                self.fail(f"{value!r} divides by zero", param, ctx)
            angle = math.pi / div
            return -angle if match["sign"] == "-" else angle
        try:
            angle = float(text)
        except ValueError:
            self.fail(f"{value!r} is not pi, pi/<k> or a decimal", param, ctx)
        if not math.isfinite(angle):
            self.fail(f"{value!r} is not finite", param, ctx)
        return angle


class ThetaListType(click.ParamType):
    name = "thetas"

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None) -> list[float]:
        if isinstance(value, list):
            return value
        parts = [p for p in str(value).split(",") if p.strip()]
        if not parts:
            self.fail("empty theta list", param, ctx)
        return [THETA.convert(p, param, ctx) for p in parts]


class QubitListType(click.ParamType):
    """Comma-separated 1-based qubit indices, e.g. '1,2'."""

    name = "qubits"

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None) -> QubitSet:
        if isinstance(value, frozenset):
            return value
        try:
            members = [int(p) for p in str(value).split(",") if p.strip()]
        except ValueError:
            self.fail(f"{value!r} is not a comma-separated list of qubit indices", param, ctx)
        if any(m < 1 for m in members):
            self.fail(f"qubit indices are 1-based, got {value!r}", param, ctx)
        return frozenset(members)


THETA = ThetaType()
THETA_LIST = ThetaListType()
QUBITS = QubitListType()


class WitnessGroup(click.Group):
    """Click group that maps every failure onto the stable exit codes."""

    def main(self, *args: Any, **kwargs: Any) -> Any:  # type: ignore[override]
        kwargs["standalone_mode"] = False
        try:
            rv = super().main(*args, **kwargs)
        except click.UsageError as e:
            e.show()
            sys.exit(ExitCode.USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(e.exit_code)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(1)
        except ValidationError as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(ExitCode.USAGE)
        except InternalContradictionError as e:
            click.echo(f"Error: {e}", err=True)
            click.echo(json.dumps(e.diagnostics, default=str, sort_keys=True), err=True)
            sys.exit(ExitCode.CONTRADICTION)
        except WitnessError as e:
            code = categorize_error(e)
            click.echo(f"Error: {e}", err=True)
            sys.exit(code)
        sys.exit(int(rv or 0))


@dataclass
class Runtime:
    config: WitnessConfig
    as_json: bool


def _emit(payload: dict[str, Any]) -> None:
    click.echo(json.dumps({"schema": REPORT_SCHEMA, **payload}, sort_keys=True, default=str))


def _fmt_complex(z: complex) -> str:
    if abs(z.imag) < 5e-5:
        return f"{z.real:.4g}"
    return f"{z.real:.4g}{z.imag:+.4g}j"


def _cert_lines(cert: SeparationCertificate) -> list[str]:
    sigma = ", ".join(f"{v:.4g}" for v in cert.singular_values)
    return [
        f"  sigma: {sigma}",
        f"  factor {format_qubits(cert.factor_a.carrier)}: "
        + ", ".join(_fmt_complex(z) for z in cert.factor_a.amplitudes),
        f"  factor {format_qubits(cert.factor_b.carrier)}: "
        + ", ".join(_fmt_complex(z) for z in cert.factor_b.amplitudes),
    ]


def _cert_json(cert: SeparationCertificate | None) -> dict[str, Any] | None:
    if cert is None:
        return None
    return {
        "split": [sorted(cert.split.a), sorted(cert.split.b)],
        "singular_values": list(cert.singular_values),
        "residual": cert.residual,
    }


def _side_line(label: str, cert: SeparationCertificate | None, sigma2: float) -> str:
    if cert is None:
        return f"{label}: S-entangled (σ₂={sigma2:.4g})"
    return f"{label}: separable {cert.split}"


def _verdict_line(report: TrichotomyReport) -> str:
    if report.holds:
        return "trichotomy: HOLDS via " + ", ".join(f"({b})" for b in report.branches)
    return "trichotomy: FAILS"


def _report_text(report: TrichotomyReport, psi_ee: bool, phi_ee: bool) -> list[str]:
    """One summary line, then the certificates and diagnostics behind it."""
    summary = "; ".join(
        [
            _side_line("input", report.input_cert, report.input_sigma2),
            _side_line("output", report.output_cert, report.output_sigma2),
            f"simplifies: {report.simplifies}",
            _verdict_line(report),
        ]
    )
    lines = [summary, _side_line("input", report.input_cert, report.input_sigma2)]
    if report.input_cert is not None:
        lines += _cert_lines(report.input_cert)
    lines.append(_side_line("output", report.output_cert, report.output_sigma2))
    if report.output_cert is not None:
        lines += _cert_lines(report.output_cert)
    lines.append(f"simplifies: {report.simplifies}")
    lines.append(
        f"everywhere-entangled: input={'yes' if psi_ee else 'no'} output={'yes' if phi_ee else 'no'}"
    )
    if report.audit is not None:
        lines.append(f"audit: {report.audit}")
    lines.append(_verdict_line(report))
    return lines


@click.group(cls=WitnessGroup)
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
@click.option(
    "-c",
    "--config",
    "config_file",
    type=click.Path(dir_okay=False),
    default=None,
    help="Path to .env file.",
)
@click.option("--json", "as_json", is_flag=True, help="Emit JSON-lines instead of text.")
@click.pass_context
def main(ctx: click.Context, verbose: bool, config_file: str | None, as_json: bool) -> None:
    """Check the entanglement trichotomy for generalized controlled-phase gates."""
    config_kwargs: dict[str, Any] = {}
    if verbose:
        config_kwargs["verbose"] = True
    if config_file:
        if not Path(config_file).is_file():
            raise StateFileAccessError(f"config file {config_file} not found")
        config_kwargs["_env_file"] = config_file
    config = WitnessConfig(**config_kwargs)
    config.setup_logging()
    log.debug(f"config: {config.model_dump()}")
    ctx.obj = Runtime(config=config, as_json=as_json)


@main.command()
@click.argument("state_file", type=click.Path(dir_okay=False))
@click.option("--s", "targets", type=QUBITS, required=True, help="Target set S, e.g. 1,2.")
@click.option("--theta", type=THETA, default="pi", show_default=True, help="Phase angle.")
@click.option("--tol", type=float, default=None, help="Separability tolerance (tau_sep).")
@click.option("--renormalize", is_flag=True, help="Rescale amplitudes to unit norm.")
@click.pass_obj
def analyze(
    runtime: Runtime,
    state_file: str,
    targets: QubitSet,
    theta: float,
    tol: float | None,
    renormalize: bool,
) -> int:
    """Evaluate the three trichotomy branches on a state file."""
    if len(targets) < 2:
        raise click.UsageError("|S| >= 2 required")
    config = runtime.config
    tau_sep = tol if tol is not None else config.tau_sep
    psi = read_state_file(
        Path(state_file),
        renormalize=renormalize,
        tol=config.tau_norm,
        max_qubits=config.max_qubits,
    )
    if not targets <= psi.qubits:
        raise click.UsageError(f"--s {format_qubits(targets)} is outside the state's qubits 1..{psi.n}")
    log.info(f"analyze {state_file}: n={psi.n}, S={format_qubits(targets)}, theta={theta:.6g}")
    report = verify_trichotomy(psi, targets, theta, tau_sep=tau_sep, tau_zero=config.tau_zero)

    phi = apply(report.gate, psi)
    psi_ee = is_everywhere_entangled(psi, tau_sep)
    phi_ee = is_everywhere_entangled(phi, tau_sep)

    if runtime.as_json:
        _emit(
            {
                "command": "analyze",
                "S": sorted(targets),
                "theta": theta,
                "input_entangled": report.input_entangled,
                "output_entangled": report.output_entangled,
                "input_cert": _cert_json(report.input_cert),
                "output_cert": _cert_json(report.output_cert),
                "input_sigma2": report.input_sigma2,
                "output_sigma2": report.output_sigma2,
                "simplifies": report.simplifies.kind.value,
                "simplify_witness": report.simplifies.witness_index,
                "input_everywhere_entangled": psi_ee,
                "output_everywhere_entangled": phi_ee,
                "audit": str(report.audit) if report.audit is not None else None,
                "branches": list(report.branches),
                "holds": report.holds,
            },
        )
    else:
        for line in _report_text(report, psi_ee, phi_ee):
            click.echo(line)

    if not report.holds:
        raise InternalContradictionError("no trichotomy branch holds", report.counterexample_dump or {})
    if report.audit is not None and not report.audit.ok:
        raise InternalContradictionError(f"proof audit failed: {report.audit}", {"audit": str(report.audit)})
    return ExitCode.OK


@main.command()
@click.option("--n-min", type=int, default=2, show_default=True)
@click.option("--n-max", type=int, default=4, show_default=True)
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=None, help="Defaults to CZW_SEED / config seed.")
@click.option("--theta", "thetas", type=THETA_LIST, default="pi,pi/2,1.0", show_default=True)
@click.option(
    "--family",
    "families",
    type=click.Choice([k.value for k in FamilyKind]),
    multiple=True,
    help="Restrict to these families (repeatable).",
)
@click.option("--full-support-products", is_flag=True, help="Only product states; track branch (2).")
@click.option("--workers", type=int, default=None, help="Worker threads (0 = auto).")
@click.pass_obj
def fuzz(
    runtime: Runtime,
    n_min: int,
    n_max: int,
    trials: int,
    seed: int | None,
    thetas: list[float],
    families: tuple[str, ...],
    full_support_products: bool,
    workers: int | None,
) -> int:
    """Sweep random (n, S, theta, family) trials through the trichotomy check."""
    if n_min > n_max:
        raise click.UsageError(f"--n-min {n_min} exceeds --n-max {n_max}")
    config = runtime.config
    fuzz_config = FuzzConfig(
        n_values=list(range(n_min, n_max + 1)),
        thetas=thetas,
        families=[FamilyKind(f) for f in families] or list(FamilyKind),
        trials=trials,
        seed=config.seed if seed is None else seed,
        product_full_support=full_support_products,
        max_workers=config.max_workers if workers is None else workers,
        tau_sep=config.tau_sep,
        tau_zero=config.tau_zero,
    )
    if n_max > config.max_qubits:
        raise click.UsageError(f"--n-max {n_max} exceeds max_qubits={config.max_qubits}")
    summary = fuzz_trichotomy(fuzz_config)

    if runtime.as_json:
        for record in summary.records:
            _emit({"kind": "trial", **record.as_dict()})
        _emit({"kind": "summary", **summary.as_dict()})
    else:
        click.echo(f"trials: {summary.trials}")
        for key, count in sorted(summary.branch_histogram.items()):
            click.echo(f"  branches {key}: {count}")
        for key, count in sorted(summary.family_counts.items()):
            click.echo(f"  family {key}: {count}")
        if summary.sharp_trials:
            click.echo(f"full-support products: {summary.sharp_hits}/{summary.sharp_trials} via (2) only")
        click.echo(f"failures: {len(summary.failures)}")
        click.echo(f"wall time: {summary.wall_time:.2f}s, peak RSS: {summary.peak_rss_mb:.1f} MiB")
    return ExitCode.OK if summary.ok else ExitCode.CONTRADICTION


@main.command()
@click.option("--arity", type=click.Choice(list(_ARITIES)), required=True, help="4, 3 or 2 sets.")
@click.option("--eta-theta", type=THETA, default="pi", show_default=True, help="eta = exp(i*theta).")
@click.option("--count", type=click.IntRange(min=0), default=1000, show_default=True)
@click.option("--seed", type=int, default=None, help="Defaults to CZW_SEED / config seed.")
@click.pass_obj
def lemma(runtime: Runtime, arity: str, eta_theta: float, count: int, seed: int | None) -> int:
    """Sample solutions of a coefficient lemma and check its conclusion."""
    eta = complex(np.exp(1j * eta_theta))
    if abs(eta - 1.0) <= runtime.config.tau_eta:
        raise click.UsageError(f"--eta-theta {eta_theta:g} makes eta = 1")
    config = runtime.config
    summary = lemma_batch(
        _ARITIES[arity],
        eta,
        count,
        config.seed if seed is None else seed,
        tol=config.lemma_tol,
        max_workers=config.max_workers,
    )
    if runtime.as_json:
        _emit({"command": "lemma", **summary.as_dict()})
    else:
        click.echo(f"lemma {summary.arity.value}: {summary.count} systems")
        for key, value in sorted(summary.branch_histogram.items()):
            click.echo(f"  {key}: {value}")
        click.echo(f"violated: {summary.violated}")
        click.echo(f"max residual: {summary.max_residual:.3g}")
        click.echo(f"max remark residual: {summary.max_remark_residual:.3g}")
    return ExitCode.OK if summary.violated == 0 else ExitCode.CONTRADICTION


@main.command()
@click.option(
    "--family",
    "family_name",
    type=click.Choice([k.value for k in FamilyKind] + list(_FAMILY_ALIASES)),
    required=True,
)
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@click.option("--seed", type=int, default=None, help="Defaults to CZW_SEED / config seed.")
@click.option("--s", "targets", type=QUBITS, default=None, help="S for the forced families.")
@click.option("--i", "witness", type=int, default=None, help="Constant-1 qubit for forced_reduce.")
@click.option("--split", "split_a", type=QUBITS, default=None, help="Side A for product.")
@click.option("--bits", default=None, help="Basis string for basis.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="Write here instead of stdout.")
@click.pass_obj
def gen(
    runtime: Runtime,
    family_name: str,
    n: int,
    seed: int | None,
    targets: QubitSet | None,
    witness: int | None,
    split_a: QubitSet | None,
    bits: str | None,
    output: str | None,
) -> int:
    """Write a generated state in state file format."""
    if n > runtime.config.max_qubits:
        raise click.UsageError(f"--n {n} exceeds max_qubits={runtime.config.max_qubits}")
    kind = _FAMILY_ALIASES.get(family_name) or FamilyKind(family_name)
    split = None
    if split_a is not None:
        split = Bipartition(a=split_a, b=full_set(n) - split_a)
    family = StateFamily(
        kind=kind,
        seed=runtime.config.seed if seed is None else seed,
        split=split,
        targets=targets,
        witness=witness,
        bits=bits,
    )
    psi: PureState = generate(family, n, runtime.config.tau_zero)
    if output:
        write_state_file(Path(output), psi)
    else:
        click.echo(serialize_state(psi), nl=False)
    return ExitCode.OK

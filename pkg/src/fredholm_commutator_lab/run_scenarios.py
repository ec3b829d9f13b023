"""Command-line entry point: run registered scenarios and persist their results.

    uv run -m fredholm_commutator_lab.run_scenarios --scenario shift-counterexample --z 1.0
    uv run -m fredholm_commutator_lab.run_scenarios --scenario all --out runs/ --workers 4

Exit codes: 0 all passed, 1 error, 2 tolerance failure.
"""
import argparse
import logging
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from datetime import datetime, timezone
from typing import Any, Callable, Dict, List, Optional, Sequence

from tqdm import tqdm

from . import __version__, config, scenarios
from .errors import LabError, ScheduleError, UnknownScenarioError
from .operator_spaces import CompressionSchedule
from .reports import RunManifest, emit_artifacts, to_jsonable, write_manifest
from .scenarios import ScenarioResult

logger = logging.getLogger(__name__)

ALL = "all"
MANIFEST_NAME = "manifest.json"


# --- FLAG PARSING ---
def parse_complex(text: str) -> complex:
    """``re`` or ``re,im``."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(f"expected re or re,im, got {text!r}")
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    return complex(values[0], values[1] if len(values) == 2 else 0.0)


def parse_schedule(text: str) -> CompressionSchedule:
    try:
        return CompressionSchedule.parse(text)
    except (ValueError, ScheduleError) as exc:
        raise argparse.ArgumentTypeError(f"bad schedule {text!r}: {exc}") from exc


def parse_floats(text: str) -> tuple:
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad list of reals {text!r}") from exc


def parse_seed_range(text: str) -> range:
    """Inclusive ``a-b`` or a single seed."""
    try:
        if "-" in text:
            start, stop = (int(p) for p in text.split("-", 1))
        else:
            start = stop = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad seed range {text!r}") from exc
    if stop < start:
        raise argparse.ArgumentTypeError(f"empty seed range {text!r}")
    return range(start, stop + 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fcl", description="Two-scale checks of det(ABA^-1B^-1) = 1.")
    parser.add_argument("--scenario", type=str, default=ALL, help=f"one of {', '.join(sorted(REGISTRY))} or 'all'")
    parser.add_argument("--ambient", type=int, default=config.DEFAULT_AMBIENT)
    parser.add_argument("--schedule", type=parse_schedule, default=None, help="comma-separated compressions")
    parser.add_argument("--windows", type=parse_schedule, default=None, help="grid trace windows")
    parser.add_argument("--z", type=parse_complex, default=complex(1.0))
    parser.add_argument("--k", type=int, default=1)
    parser.add_argument("--grid-length", type=float, default=config.DEFAULT_GRID_LENGTH)
    parser.add_argument("--grid-points", type=int, default=config.DEFAULT_GRID_POINTS)
    parser.add_argument("--decay", type=float, default=config.DEFAULT_DECAY)
    parser.add_argument("--delta-sweep", type=parse_floats, default=config.DEFAULT_DELTA_SWEEP)
    parser.add_argument("--dim", type=int, default=32)
    parser.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    parser.add_argument("--seeds", type=parse_seed_range, default=range(0, 10))
    parser.add_argument("--slow-decay", type=float, default=0.9)
    parser.add_argument("--fast-decay", type=float, default=0.3)
    parser.add_argument("--tolerance", type=float, default=None)
    parser.add_argument("--out", type=str, default=None)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--log-level", type=str, default=config.LOG_LEVEL)
    return parser


# --- REGISTRY ---
def _tol(args: argparse.Namespace, default: float) -> float:
    return default if args.tolerance is None else args.tolerance


Runner = Callable[[argparse.Namespace], List[ScenarioResult]]

REGISTRY: Dict[str, Runner] = {
    "finite-identity": lambda a: [scenarios.run_finite_identity(a.seed, a.dim, _tol(a, 1e-8))],
    "shift-counterexample": lambda a: [
        scenarios.run_shift_counterexample(a.z, a.ambient, a.schedule, _tol(a, config.SEQUENCE_TOLERANCE))
    ],
    "hhp": lambda a: [scenarios.run_hhp(a.z, a.ambient, a.schedule, _tol(a, config.SEQUENCE_TOLERANCE))],
    "pincus": lambda a: [scenarios.run_pincus(a.z, a.ambient, a.schedule, _tol(a, config.SEQUENCE_TOLERANCE))],
    "theorem1": lambda a: [
        scenarios.run_theorem1(a.seed, a.decay, a.ambient, a.schedule, False, _tol(a, config.SEQUENCE_TOLERANCE))
    ],
    "kitaev-unitary": lambda a: [
        scenarios.run_theorem1(a.seed, a.decay, a.ambient, a.schedule, True, _tol(a, config.SEQUENCE_TOLERANCE))
    ],
    "prop1-quasinilpotent": lambda a: [
        scenarios.run_prop1_quasinilpotent(
            a.seed, a.ambient, a.schedule, a.decay, tolerance=_tol(a, config.SEQUENCE_TOLERANCE)
        )
    ],
    "nilpotent-example": lambda a: [
        scenarios.run_nilpotent_example(a.ambient, a.schedule, tolerance=_tol(a, 1e-12))
    ],
    "position-momentum": lambda a: [
        scenarios.run_position_momentum(a.k, a.grid_length, a.grid_points, a.windows)
    ],
    "spectral-split": lambda a: [
        scenarios.run_spectral_split(
            a.seed, a.delta_sweep, a.ambient, a.schedule, a.decay, _tol(a, config.SEQUENCE_TOLERANCE)
        )
    ],
    "lemma2": lambda a: [
        scenarios.run_lemma2(a.seed, a.decay, a.ambient, a.schedule, _tol(a, config.SEQUENCE_TOLERANCE))
    ],
    "conjecture-search": lambda a: scenarios.run_conjecture_search(
        a.seeds,
        a.ambient,
        a.schedule,
        a.slow_decay,
        a.fast_decay,
        tolerance=_tol(a, config.SEQUENCE_TOLERANCE),
        progress=a.workers == 1,
    ),
}


def resolve_scenarios(name: str) -> List[str]:
    if name == ALL:
        return sorted(REGISTRY)
    if name not in REGISTRY:
        raise UnknownScenarioError(f"unknown scenario {name!r}; choose from {', '.join(sorted(REGISTRY))} or 'all'")
    return [name]


# --- OUTPUT ---
def resolve_out_dir(out: Optional[str]) -> str:
    if out:
        return out
    if config.DEFAULT_OUT_DIR:
        return config.DEFAULT_OUT_DIR
    return os.path.join(config.RUNS_DIR, datetime.now().strftime("%Y%m%d-%H%M%S"))


def _plain(value: Any) -> Any:
    if isinstance(value, CompressionSchedule):
        return list(value.dims)
    if isinstance(value, range):
        return [value.start, value.stop - 1]
    return to_jsonable(value)


def summary_line(result: ScenarioResult) -> str:
    value = f"{result.computed.real:.10g}{result.computed.imag:+.10g}i"
    if result.exploratory:
        extra = " interesting" if "interesting" in result.flags else ""
        return f"✅ {result.name} (seed {result.seed}): det = {value} [exploratory{extra}]"
    marker = "✅" if result.passed else "⚠️"
    flags = f" flags={','.join(result.flags)}" if result.flags else ""
    return f"{marker} {result.name}: {value}, deviation {result.deviation:.3e} (tol {result.tolerance:.1e}){flags}"


def _stems(name: str, results: List[ScenarioResult]) -> List[str]:
    if len(results) == 1:
        return [name]
    return [f"{name}-seed{r.seed}" for r in results]


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    logging.basicConfig(level=args.log_level.upper(), format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        names = resolve_scenarios(args.scenario)
    except UnknownScenarioError as exc:
        parser.print_usage()
        print(f"❌ {exc}")
        return 1

    out_dir = resolve_out_dir(args.out)
    os.makedirs(out_dir, exist_ok=True)
    started_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    print(f"🔬 Running {len(names)} scenario(s) into {out_dir}")

    outcomes: Dict[str, List[ScenarioResult]] = {}
    errors: Dict[str, str] = {}
    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as executor:
        futures = {executor.submit(REGISTRY[name], args): name for name in names}
        with tqdm(total=len(futures), unit="scenario", disable=len(futures) == 1) as pbar:
            for future in as_completed(futures):
                name = futures[future]
                try:
                    outcomes[name] = future.result()
                except LabError as exc:
                    errors[name] = f"{type(exc).__name__}: {exc}"
                    logger.error("scenario %s failed: %s", name, exc)
                except Exception as exc:
                    errors[name] = f"{type(exc).__name__}: {exc}"
                    logger.exception("scenario %s crashed", name)
                pbar.set_postfix(errors=len(errors))
                pbar.update(1)

    artifacts: List[str] = []
    failures = 0
    for name in names:
        if name in errors:
            print(f"❌ {name}: {errors[name]}")
            continue
        results = outcomes[name]
        for stem, result in zip(_stems(name, results), results):
            written = emit_artifacts(result, out_dir, stem)
            artifacts.extend(os.path.relpath(p, out_dir) for p in written)
            print(summary_line(result))
            failures += not result.passed

    manifest = RunManifest(
        tool_version=__version__,
        scenario=args.scenario,
        parameters={k: _plain(v) for k, v in sorted(vars(args).items())},
        seed=args.seed,
        started_at=started_at,
        artifacts=artifacts,
    )
    write_manifest(manifest, os.path.join(out_dir, MANIFEST_NAME))

    if errors:
        print(f"\n❌ {len(errors)} scenario(s) raised errors")
        return 1
    if failures:
        print(f"\n⚠️ {failures} result(s) outside tolerance")
        return 2
    print("\n✅ All scenarios within tolerance")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

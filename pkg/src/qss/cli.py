"""Command-line surface: scheme verification, capacity runs, sweeps, teleport demo.

All randomness flows from a single --seed (default 42) and reports carry
no timestamps, so identical (input, seed) produces byte-identical output.
Exit codes: 0 all checks pass, 1 a verification/tolerance failure, 2 a
malformed or invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import access_structure as acc
from . import capacity as cap
from . import channels as chn
from . import qudit_engine as qe
from . import schemes

SCHEMA_VERSION = 1

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: "str | None"
    output_path: "str | None"
    seed: int
    tolerance: float
    format: str
    n: int = 1
    trials: int = 20

    def __post_init__(self):
        if self.command not in {"verify-scheme", "capacity", "sweep", "teleport-demo"}:
            raise ValueError(f"unknown command {self.command!r}")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.format not in {"json", "csv"}:
            raise ValueError(f"unknown format {self.format!r}")
        if self.n not in (1, 2):
            raise ValueError("tensor-power level n must be 1 or 2")


def _load_input(config: RunConfig) -> dict:
    if config.input_path is None:
        return {}
    with open(config.input_path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError("input must be a JSON object")
    return obj


def _emit(config: RunConfig, text: str):
    if config.output_path:
        Path(config.output_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json_text(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def cmd_verify_scheme(config: RunConfig) -> int:
    spec = schemes.ThresholdSchemeSpec.from_json(_load_input(config))
    access = acc.from_threshold(spec.t, spec.K)

    recovery = []
    for subset in access.qualified_sets():
        fid = schemes.verify_recovery(spec, sorted(subset), trials=config.trials, seed=config.seed)
        recovery.append(
            {
                "set": sorted(subset),
                "min_fidelity": float(fid),
                "pass": bool(fid >= 1.0 - config.tolerance),
            }
        )

    secrecy = []
    for subset in access.maximal_non_qualified():
        if not subset:
            continue
        defect = schemes.verify_secrecy(spec, sorted(subset))
        secrecy.append(
            {
                "set": sorted(subset),
                "max_defect": float(defect),
                "pass": bool(defect <= config.tolerance),
            }
        )

    ok = all(r["pass"] for r in recovery) and all(s["pass"] for s in secrecy)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify-scheme",
        "scheme": spec.to_json(),
        "seed": config.seed,
        "tolerance": config.tolerance,
        "trials": config.trials,
        "recovery": recovery,
        "secrecy": secrecy,
        "pass": ok,
    }
    _emit(config, _json_text(report))
    return EXIT_PASS if ok else EXIT_FAIL


def _closed_form_for(descriptor: dict) -> "tuple[float, str] | tuple[None, None]":
    members = descriptor.get("members")
    if not members:
        return None, None
    q_list = []
    for spec in members:
        kind = spec.get("kind")
        if kind == "identity":
            q_list.append(0.0)
        elif kind == "dephasing":
            q_list.append(float(spec["q"]))
        else:
            return None, None
    d = int(descriptor["d"])
    return cap.dephasing_capacity_closed_form(d, q_list), cap.closed_form_regime(d)


def cmd_capacity(config: RunConfig) -> int:
    descriptor = _load_input(config)
    family = chn.family_from_descriptor(descriptor)
    closed, regime = _closed_form_for(descriptor)
    report_opt = cap.maximize_min_coherent_info(
        family, tolerance=config.tolerance, seed=config.seed
    )
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "capacity",
        "family": descriptor,
        "closed_form_bits": closed,
        "closed_form_regime": regime,
        "optimizer": report_opt.to_json_dict(),
        "gap_bits": None if closed is None else float(closed - report_opt.value_bits),
    }
    _emit(config, _json_text(report))
    return EXIT_PASS


def cmd_sweep(config: RunConfig) -> int:
    descriptor = _load_input(config)
    d = int(descriptor["d"])
    q_values = [float(q) for q in descriptor["q_values"]]
    if not q_values:
        raise ValueError("q_values must be nonempty")
    label = str(descriptor.get("label", "m0"))

    rows = []
    for q in q_values:
        family = chn.direct_family(d, [{"label": label, "kind": "dephasing", "q": q}])
        report = cap.maximize_min_coherent_info(
            family, tolerance=config.tolerance, seed=config.seed
        )
        closed = cap.dephasing_capacity_closed_form(d, [q])
        rows.append(
            {
                "param": q,
                f"{label}_bits": report.per_member_bits[label],
                "min_bits": report.value_bits,
                "closed_form_bits": closed,
                "gap_bits": closed - report.value_bits,
            }
        )

    if config.format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
        _emit(config, buf.getvalue())
    else:
        _emit(
            config,
            _json_text(
                {
                    "schema_version": SCHEMA_VERSION,
                    "command": "sweep",
                    "d": d,
                    "seed": config.seed,
                    "rows": rows,
                }
            ),
        )
    return EXIT_PASS


def cmd_teleport_demo(config: RunConfig) -> int:
    obj = _load_input(config)
    d = int(obj.get("d", 3))
    if d not in (2, 3, 5):
        raise ValueError(f"teleport demo supports d in {{2, 3, 5}}, got {d}")
    trials = int(obj.get("trials", config.trials))
    rng = np.random.default_rng(config.seed)
    fidelities = []
    for _ in range(trials):
        psi = qe.haar_random_state((d,), rng, labels=("M",))
        out = qe.teleport(psi)
        fidelities.append(float(qe.fidelity(psi, out)))
    ok = min(fidelities) >= 1.0 - config.tolerance
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "teleport-demo",
        "d": d,
        "trials": trials,
        "seed": config.seed,
        "fidelities": fidelities,
        "min_fidelity": min(fidelities),
        "pass": bool(ok),
    }
    _emit(config, _json_text(report))
    return EXIT_PASS if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qss",
        description="Quantum secret sharing schemes and compound-channel capacity bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, default_tol in (
        ("verify-scheme", 1e-9),
        ("capacity", 1e-6),
        ("sweep", 1e-6),
        ("teleport-demo", 1e-9),
    ):
        p = sub.add_parser(name)
        p.add_argument("--input", default=None, help="input JSON path")
        p.add_argument("--output", default=None, help="output path (default stdout)")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--tolerance", type=float, default=default_tol)
        p.add_argument(
            "--format",
            choices=("json", "csv"),
            default="csv" if name == "sweep" else "json",
        )
        p.add_argument("--n", type=int, default=1, help="tensor-power level (<= 2)")
        p.add_argument("--trials", type=int, default=20)
    return parser


_HANDLERS = {
    "verify-scheme": cmd_verify_scheme,
    "capacity": cmd_capacity,
    "sweep": cmd_sweep,
    "teleport-demo": cmd_teleport_demo,
}


def main(argv: "list[str] | None" = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig(
            command=args.command,
            input_path=args.input,
            output_path=args.output,
            seed=args.seed,
            tolerance=args.tolerance,
            format=args.format,
            n=args.n,
            trials=args.trials,
        )
        return _HANDLERS[config.command](config)
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

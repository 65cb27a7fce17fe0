"""``sonine-lab`` command line.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage or
configuration errors (bad flags, unknown suite, missing inputs).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import kernels, spaces, zeta_lab
from .errors import CrossCheckError, MissingArtifactError, SonineError
from .profiles import RunConfig, resolve_profile
from .verification import SUITES, Check, Lab, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# tag -> suite whose checks carry it; used by `report` to flag skipped tags
TAG_SOURCES = {
    "multiplier_reflection": "specfun",
    "special_functions": "specfun",
    "cosine_isometry": "transforms",
    "inversion": "transforms",
    "mellin": "transforms",
    "kernel_routes": "kernels",
    "kernel_decay": "kernels",
    "kernel_entirety": "kernels",
    "sonine_spaces": "spaces",
    "trivial_zeros": "spaces",
    "representers": "spaces",
    "representer_independence": "spaces",
    "e_map": "zeta",
    "zeta_subspace": "zeta",
    "zero_detection": "zeta",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 already; keep its message format
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _tolerance(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name, float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"tolerance {name!r} is not a number") from exc


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", default=None, help="default, fast or custom:L,N (SONINE_PROFILE overrides)")
    common.add_argument("--lambda", dest="lam", type=float, default=2.0, help="Lambda > 1 (default 2)")
    common.add_argument("--tol", action="append", type=_tolerance, default=[], metavar="NAME=VALUE",
                        help="override a named tolerance; repeatable")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output directory (or CSV path for table commands)")

    parser = _Parser(prog="sonine-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    p.add_argument("suite", choices=sorted(SUITES))

    sub.add_parser("report", parents=[common], help="merge suite and scan outputs into one summary")

    p = sub.add_parser("kernel-eval", parents=[common], help="tabulate C_a(u, w)")
    p.add_argument("--u", type=float, nargs="+", required=True)
    p.add_argument("--w", type=_complex, nargs="+", required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--route", choices=["auto", "series", "quadrature"], default="auto")

    p = sub.add_parser("space-build", parents=[common], help="build a frame and write CSV + JSON sidecar")
    p.add_argument("--kind", choices=["K_ab", "H_Lambda", "W_Lambda", "HP_Lambda"], required=True)
    p.add_argument("--a", type=float, default=None, help="K_ab only; defaults to 1/Lambda")
    p.add_argument("--b", type=float, default=None, help="K_ab only; defaults to 1/Lambda")
    p.add_argument("--family-size", type=int, default=8)

    p = sub.add_parser("space-verify", parents=[common], help="re-check a frame written by space-build")
    p.add_argument("frame", help="CSV written by space-build")

    p = sub.add_parser("zero-scan", parents=[common], help="scan the obstruction on the critical line")
    p.add_argument("--tmin", type=float, default=10.0)
    p.add_argument("--tmax", type=float, default=30.0)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--family-size", type=int, default=8)
    return parser


def _config(args) -> RunConfig:
    out = args.out or "out"
    return RunConfig(resolve_profile(args.profile), args.lam, dict(args.tol), out, args.seed)


def _dump(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _out_dir(cfg: RunConfig) -> Path:
    return Path(cfg.output_dir)


def _table_path(cfg: RunConfig, args, default_name: str) -> Path:
    if args.out and args.out.endswith(".csv"):
        return Path(args.out)
    return _out_dir(cfg) / default_name


def _print_checks(checks: list[Check]) -> None:
    for c in checks:
        mark = "PASS" if c.passed else "FAIL"
        print(f"{mark}  {c.name}: {c.measured:.3e} {c.relation} {c.tolerance:g}" + (f"  ({c.detail})" if c.detail else ""))


# ---------------------------------------------------------------------------
# commands


def cmd_verify(args, cfg: RunConfig) -> int:
    checks = run_suite(args.suite, Lab(cfg))
    ok = all(c.passed for c in checks)
    payload = {
        "artifact": "verify",
        "suite": args.suite,
        "profile": cfg.profile.name,
        "lambda": cfg.lam,
        "seed": cfg.seed,
        "tolerance_overrides": cfg.tolerances,
        "checks": [c.to_dict() for c in checks],
        "passed": ok,
    }
    path = _out_dir(cfg) / f"verify_{args.suite}.json"
    _dump(path, payload)
    _print_checks(checks)
    print(f"wrote {path}")
    return EXIT_OK if ok else EXIT_FAIL


def _load_artifacts(out: Path) -> list[dict]:
    if not out.is_dir():
        raise MissingArtifactError(f"output directory {out} does not exist")
    found = []
    for path in sorted(out.glob("*.json")):
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError:
            continue
        if isinstance(data, dict) and data.get("artifact") in ("verify", "zero_scan"):
            data["_source"] = path.name
            found.append(data)
    if not any(d["artifact"] == "verify" for d in found):
        raise MissingArtifactError(f"no verify_<suite>.json found in {out} (run `sonine-lab verify <suite>` first)")
    return found


def build_report(out: Path) -> dict:
    artifacts = _load_artifacts(out)
    tags: dict[str, dict] = {}
    suites_run = set()
    for art in artifacts:
        if art["artifact"] == "verify":
            suites_run.add(art["suite"])
            for c in art["checks"]:
                entry = tags.setdefault(c["tag"], {"checks": [], "status": "pass"})
                entry["checks"].append({"name": c["name"], "passed": c["passed"], "source": art["_source"],
                                        "measured": c["measured"], "tolerance": c["tolerance"]})
        else:
            entry = tags.setdefault("zero_detection", {"checks": [], "status": "pass"})
            entry["checks"].append({"name": "zero_scan_oracle_match", "passed": art["matches_oracle"],
                                    "source": art["_source"], "measured": len(art["minima"]),
                                    "tolerance": len(art["oracle_zeros"])})
    for entry in tags.values():
        entry["status"] = "pass" if all(c["passed"] for c in entry["checks"]) else "fail"
    for tag, suite in TAG_SOURCES.items():
        if tag not in tags:
            tags[tag] = {"checks": [], "status": "skipped", "reason": f"suite {suite!r} has not been run"}
    executed = [t for t in tags.values() if t["status"] != "skipped"]
    return {
        "artifact": "report",
        "suites_run": sorted(suites_run),
        "sources": sorted(a["_source"] for a in artifacts),
        "tags": tags,
        "passed": all(t["status"] == "pass" for t in executed),
    }


def cmd_report(args, cfg: RunConfig) -> int:
    report = build_report(_out_dir(cfg))
    path = _out_dir(cfg) / "report.json"
    _dump(path, report)
    for tag in sorted(report["tags"]):
        print(f"{report['tags'][tag]['status']:>7}  {tag}")
    print(f"wrote {path}")
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_kernel_eval(args, cfg: RunConfig) -> int:
    path = _table_path(cfg, args, "kernel_eval.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "re_w", "im_w", "a", "route", "re_val", "im_val", "crosscheck_residual"])
        for w in args.w:
            for u in args.u:
                ev = kernels.C_a_eval(u, w, args.a, args.route)
                resid = "" if np.isnan(ev.crosscheck_residual) else repr(float(ev.crosscheck_residual))
                writer.writerow([repr(u), repr(w.real), repr(w.imag), repr(args.a), ev.route,
                                 repr(ev.value.real), repr(ev.value.imag), resid])
    print(f"wrote {path}")
    return EXIT_OK


def _frame_for(kind: str, cfg: RunConfig, args) -> spaces.SubspaceFrame:
    grid = cfg.profile.grid()
    guard = cfg.profile.guard_fraction
    tol = cfg.tol("nullspace", spaces.DEFAULT_TOL)
    if kind == "K_ab":
        a = args.a if args.a is not None else 1.0 / cfg.lam
        b = args.b if args.b is not None else 1.0 / cfg.lam
        return spaces.build_K_ab(a, b, grid, tol, guard)
    h = spaces.build_H_Lambda(cfg.lam, grid, tol, guard)
    if kind == "H_Lambda":
        return h
    w = zeta_lab.build_W_Lambda(cfg.lam, args.family_size, grid, guard_fraction=guard)
    return w if kind == "W_Lambda" else zeta_lab.build_HP_Lambda(h, w)


def cmd_space_build(args, cfg: RunConfig) -> int:
    frame = _frame_for(args.kind, cfg, args)
    path = _out_dir(cfg) / f"{args.kind}.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    spaces.save_frame(frame, path)
    print(f"{args.kind}: dimension {frame.dimension}, constraint residual {frame.constraint_residual:.3e}")
    print(f"wrote {path} and {path.with_suffix('.json')}")
    return EXIT_OK


# W is only approximately inside H: its members are exact E(D phi) samples whose
# transforms carry small tails past Lambda
_CONSTRAINT_DEFAULTS = {"W_Lambda": 1e-4}


def cmd_space_verify(args, cfg: RunConfig) -> int:
    path = Path(args.frame)
    if not path.exists() or not path.with_suffix(".json").exists():
        raise MissingArtifactError(f"frame {path} or its sidecar {path.with_suffix('.json')} is missing")
    frame = spaces.load_frame(path)
    recomputed = spaces.constraint_residual(frame)
    limit = cfg.tol("constraint", _CONSTRAINT_DEFAULTS.get(frame.kind, 1e-6))
    checks = [
        Check("orthonormality", "sonine_spaces", frame.gram_error(), cfg.tol("orthonormal", 1e-12),
              frame.gram_error() <= cfg.tol("orthonormal", 1e-12)),
        Check("constraint_residual", "sonine_spaces", recomputed, limit, recomputed <= limit),
        Check("recorded_residual_reproduced", "sonine_spaces", abs(recomputed - frame.constraint_residual),
              1e-3 * frame.constraint_residual + 1e-14,
              abs(recomputed - frame.constraint_residual) <= 1e-3 * frame.constraint_residual + 1e-14),
    ]
    _print_checks(checks)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def cmd_zero_scan(args, cfg: RunConfig) -> int:
    grid = cfg.profile.grid()
    guard = cfg.profile.guard_fraction
    h = spaces.build_H_Lambda(cfg.lam, grid, cfg.tol("nullspace", spaces.DEFAULT_TOL), guard, check_conjugation=False)
    w = zeta_lab.build_W_Lambda(cfg.lam, args.family_size, grid, guard_fraction=guard)
    threshold = cfg.tol("detection", zeta_lab.DETECTION_THRESHOLD)
    report = zeta_lab.zero_scan(h, w, args.tmin, args.tmax, args.step, threshold)
    ok, zeros = zeta_lab.detection_matches(report, args.tmin, args.tmax, cfg.tol("zero_match", 5e-2))
    path = _table_path(cfg, args, "zero_scan.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.column_stack([report.t_samples, report.beta]), delimiter=",", header="t,beta",
               comments="", fmt="%.17g")
    summary = report.summary(cfg.profile.name)
    summary.update({"artifact": "zero_scan", "oracle_zeros": zeros, "matches_oracle": ok,
                    "t_min": args.tmin, "t_max": args.tmax, "step": args.step})
    _dump(path.with_suffix(".json"), summary)
    for m in summary["minima"]:
        print(f"minimum t={m['t']:.6f} beta={m['beta']:.3e}")
    print(f"oracle zeros: {', '.join(f'{z:.6f}' for z in zeros)}  match={ok}")
    print(f"wrote {path} and {path.with_suffix('.json')}")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "verify": cmd_verify,
    "report": cmd_report,
    "kernel-eval": cmd_kernel_eval,
    "space-build": cmd_space_build,
    "space-verify": cmd_space_verify,
    "zero-scan": cmd_zero_scan,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
    except SonineError as exc:
        print(f"sonine-lab: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, cfg)
    except MissingArtifactError as exc:
        print(f"sonine-lab: missing artifact: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CrossCheckError as exc:
        print(f"sonine-lab: cross-check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except SonineError as exc:
        print(f"sonine-lab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

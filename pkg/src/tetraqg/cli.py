"""Command line: ``tetraqg <subcommand> ...``.

Exit status is 0 on success, 1 when a property or proof check fails and 2
for bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cases import TheoremReport, TriangleMode, iter_checks
from .geometry import EDGES, GeometryError, face_angles, quasigeodesic_faces
from .harness import Distribution, TrialConfig, run_theorem_trials
from .io import angle_report, dumps, load_tetrahedron
from .lp import InfeasibilityCertificate, Infeasible, LPError, RationalLinearSystem, verify_certificate
from .unfolding import DEFAULT_MAX_FACES, search_edge_quasigeodesic

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load(path: str):
    try:
        return load_tetrahedron(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    except GeometryError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_angles(args) -> int:
    print(dumps(angle_report(_load(args.file))))
    return EXIT_OK


def cmd_classify(args) -> int:
    cls = quasigeodesic_faces(face_angles(_load(args.file)))
    print(" ".join(f.value for f in cls.faces))
    return EXIT_OK if cls.faces else EXIT_FAIL


def cmd_verify_cases(args) -> int:
    modes = {
        "strict": ([TriangleMode.strict], False),
        "weak": ([TriangleMode.weak], False),
        "flat": ([], True),
        "all": ([TriangleMode.strict, TriangleMode.weak], True),
    }[args.mode]
    cert_dir = Path(args.emit_certs) if args.emit_certs else None
    results = []
    for system, res in iter_checks(*modes):
        results.append(res)
        if cert_dir is not None:
            _emit(cert_dir, system, res)
    report = TheoremReport(results)
    for mode in TriangleMode:
        done, total = report.summary(mode)
        if total:
            label = "flat" if mode is TriangleMode.equality else mode.value
            print(f"{label}: {done}/{total} infeasible")
    print(report.table())
    if args.json:
        Path(args.json).write_text(dumps(report.to_json()))
    return EXIT_OK if report.all_verified else EXIT_FAIL


def _emit(root: Path, system: RationalLinearSystem, res) -> None:
    folder = root
    if res.mode is TriangleMode.weak:
        folder = root / "weak"
    elif res.mode is TriangleMode.equality:
        folder = root / "flat" / res.flat.replace(":", "-").replace(",", "_")
    folder.mkdir(parents=True, exist_ok=True)
    key = res.assignment.key
    (folder / f"{key}.system.json").write_text(dumps(system.to_json()))
    if isinstance(res.outcome, Infeasible):
        doc = res.outcome.certificate.to_json()
        doc.update(assignment=key, case=res.case.value, mode=res.mode.value)
        (folder / f"{key}.cert.json").write_text(dumps(doc))


def cmd_check_cert(args) -> int:
    try:
        system = RationalLinearSystem.from_json(json.loads(Path(args.system).read_text()))
        cert = InfeasibilityCertificate.from_json(json.loads(Path(args.cert).read_text()))
        ok = verify_certificate(system, cert)
    except (OSError, ValueError, KeyError, LPError) as exc:
        raise InputError(str(exc)) from None
    print("certificate verified" if ok else "certificate REJECTED")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_edge_qg(args) -> int:
    if args.max_faces < 1:
        raise InputError("--max-faces must be at least 1")
    t = _load(args.file)
    out = [search_edge_quasigeodesic(t, e, args.max_faces).to_json() for e in EDGES]
    print(dumps({"max_faces": args.max_faces, "edges": out}))
    return EXIT_OK


def cmd_random_test(args) -> int:
    if args.count < 1:
        raise InputError("--count must be at least 1")
    cfg = TrialConfig(args.count, args.seed, Distribution(args.dist))
    if args.report:
        with open(args.report, "w", newline="") as fh:
            report = run_theorem_trials(cfg, workers=args.workers, csv_out=fh)
    else:
        report = run_theorem_trials(cfg, workers=args.workers)
    print(dumps(report.to_json()))
    if not report.ok:
        for v in report.violations[:20]:
            print(f"violation #{v.index} {v.kind}: {v.detail} at {v.coords}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tetraqg", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("angles", help="angle, curvature and failure report for a tetrahedron")
    s.add_argument("file")
    s.set_defaults(func=cmd_angles)

    s = sub.add_parser("classify", help="faces whose boundary is a quasigeodesic")
    s.add_argument("file")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("verify-cases", help="prove all 81 failure patterns infeasible")
    s.add_argument("--mode", choices=["strict", "weak", "flat", "all"], default="strict")
    s.add_argument("--emit-certs", metavar="DIR")
    s.add_argument("--json", metavar="PATH", help="write the full report as JSON")
    s.set_defaults(func=cmd_verify_cases)

    s = sub.add_parser("check-cert", help="re-check a certificate against a system file")
    s.add_argument("system")
    s.add_argument("cert")
    s.set_defaults(func=cmd_check_cert)

    s = sub.add_parser("edge-qg", help="search each edge for a 2-vertex quasigeodesic")
    s.add_argument("file")
    s.add_argument("--max-faces", type=int, default=DEFAULT_MAX_FACES)
    s.set_defaults(func=cmd_edge_qg)

    s = sub.add_parser("random-test", help="property trials on random tetrahedra")
    s.add_argument("--count", type=int, default=10000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--dist", choices=[d.value for d in Distribution], default="unit_cube_uniform")
    s.add_argument("--report", metavar="CSV")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_random_test)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"tetraqg: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

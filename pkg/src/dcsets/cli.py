"""Command-line front end: validate, certify, falsify, analyze, render and gen-example."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple

from . import analyze
from ._q import num_parse, qstr
from .certify import (
    alpha_lower_bound,
    build_psi,
    convexity_blowup,
    detect_non_dc,
    verify_local_concavity,
)
from .errors import PreconditionError
from .render import render_svg
from .scenes import Scene, SceneError, generate
from .sets import PlacedSSet, assemble_and_check, validate_sset

__all__ = ["main", "run"]

OK, FALSIFIED, INCONCLUSIVE, USAGE, INTERNAL = 0, 1, 2, 3, 4
COMMANDS = ("validate", "certify", "falsify", "analyze", "render", "gen-example")
LIPSCHITZ_SLACK = 1e-8
INCREMENT_SLACK = 1e-6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _n_sweep(text: str) -> List[int]:
    try:
        out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if not out or any(n < 1 for n in out):
        raise argparse.ArgumentTypeError("n-sweep needs positive integers")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dcsets", description="Exact toolkit for planar sets with DC distance functions.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("target", help="scene path, or example name (gen-example takes a name)")
    p.add_argument("--n-sweep", type=_n_sweep, default=None, help="grid sizes, e.g. 8,16,32")
    p.add_argument("--mode", choices=("global", "clamped"), default="global", help="cone potential mode for concavity")
    p.add_argument("--tol", type=float, default=1e-9, help="concavity tolerance relative to ball radius")
    p.add_argument("--out", type=Path, default=None, help="directory for artifacts (stdout when absent)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv", "svg"), default="json")
    return p


# ---------------------------------------------------------------------------
# scene loading


def load_scene(target: str) -> Scene:
    path = Path(target)
    if path.exists():
        return Scene.loads(path.read_text())
    try:
        return generate(target)
    except KeyError:
        raise UsageError(f"{target}: no such file and not a known example") from None


def _stem(target: str, scene: Scene) -> str:
    path = Path(target)
    return path.stem if path.exists() else (scene.name or path.name)


# ---------------------------------------------------------------------------
# commands; each returns (exit code, report dict, extra artifacts {suffix: text})


def cmd_validate(scene: Scene, args) -> Tuple[int, dict, dict]:
    pres = scene.presentation
    ssets = [validate_sset(p.sset).to_json() for p in pres.skeleton if isinstance(p, PlacedSSet)]
    problems = []
    if pres.window is not None:
        w = pres.window
        outside = [p for ab in pres.segments() for p in ab if not w.contains(p)]
        outside += [p for p in pres.points() if not w.contains(p)]
        if outside:
            problems.append(f"{len(outside)} presentation vertices lie outside the window")
    assembly = assemble_and_check(pres)
    valid = assembly.passes and not problems and all(s["valid"] for s in ssets)
    report = {
        "verdict": "valid" if valid else "invalid",
        "ssets": ssets,
        "assembly": assembly.to_json(),
        "problems": problems,
        "exact": pres.exact,
    }
    return (OK if valid else FALSIFIED), report, {}


def cmd_certify(scene: Scene, args) -> Tuple[int, dict, dict]:
    pres = scene.presentation
    sweep = args.n_sweep or scene.probes.get("n-sweep") or [8, 16, 32]
    rows, all_pass = [], True
    budget = {}
    try:
        for n in sweep:
            psi = build_psi(pres, n, args.mode)
            clamped = psi if args.mode == "clamped" else build_psi(psi.grid, n, "clamped")
            conc = verify_local_concavity(pres, psi, n_balls=200, seed=args.seed, tol=args.tol)
            lip = clamped.lipschitz_sample(pairs=200, seed=args.seed)
            lip_ok = lip <= clamped.D + LIPSCHITZ_SLACK
            ok = conc.passes and lip_ok and psi.budget["within_C"]
            all_pass = all_pass and ok
            rows.append({
                "n": n,
                "potentials": len(psi.potentials),
                "budget": psi.budget,
                "L": qstr(psi.L),
                "D": psi.D,
                "lipschitz_sampled": lip,
                "lipschitz_ok": lip_ok,
                "concavity": conc.to_json(),
                "passes": ok,
            })
            budget = {"C": qstr(psi.C), "L": qstr(psi.L), "D": psi.D}
    except PreconditionError as exc:
        report = {"verdict": "inconclusive", "reason": str(exc), "n-sweep": rows, "budget": budget, "witnesses": []}
        return INCONCLUSIVE, report, {}
    report = {
        "verdict": "consistent" if all_pass else "inconclusive",
        "mode": args.mode,
        "tol": args.tol,
        "seed": args.seed,
        "n-sweep": rows,
        "budget": budget,
        "witnesses": [],
    }
    csv_text = _csv(["n", "total", "C", "lipschitz_sampled", "D", "failures", "passes"], [
        [r["n"], r["budget"]["total"], r["budget"]["C"], repr(r["lipschitz_sampled"]), repr(r["D"]),
         r["concavity"]["failures"], r["passes"]] for r in rows])
    return (OK if all_pass else INCONCLUSIVE), report, {"csv": csv_text}


def _falsify_target(scene: Scene):
    pres = scene.presentation
    if "z" in scene.probes:
        z = tuple(num_parse(c) for c in scene.probes["z"])
    elif pres.accumulations:
        z = pres.accumulations[0]
    else:
        raise PreconditionError("falsify needs a probe point z or a declared accumulation")
    u = num_parse(scene.probes.get("u", "1"))
    lo, hi = scene.probes.get("N", [3, 8])
    return z, u, range(int(lo), int(hi) + 1)


def cmd_falsify(scene: Scene, args) -> Tuple[int, dict, dict]:
    pres = scene.presentation
    try:
        z, u, n_range = _falsify_target(scene)
        w = detect_non_dc(pres, z, u)
    except PreconditionError as exc:
        return INCONCLUSIVE, {"verdict": "inconclusive", "reason": str(exc), "witnesses": []}, {}
    alpha = alpha_lower_bound(u)
    if w is None:
        report = {"verdict": "inconclusive", "reason": "fewer than 3 empty-cone witnesses", "witnesses": [], "alpha": alpha}
        return INCONCLUSIVE, report, {}
    n_range = range(n_range.start, min(n_range.stop, len(w.witnesses) + 1))
    rows = convexity_blowup(pres, w, n_range) if len(n_range) >= 2 else []
    increasing = len(rows) >= 2 and all(r.increment > 0 for r in rows[1:])
    enough = increasing and all(r.increment >= alpha - INCREMENT_SLACK for r in rows[1:])
    falsified = enough and w.slope_bound_ok
    report = {
        "verdict": "falsified" if falsified else "inconclusive",
        "z": [qstr(c) for c in z],
        "u": qstr(u),
        "alpha": alpha,
        "witnesses": [x.to_json() for x in w.witnesses],
        "witness": w.to_json(),
        "blowup": [r.to_json() for r in rows],
        "strictly_increasing": increasing,
        "increments_at_least_alpha": enough,
    }
    csv_text = _csv(["N", "K_hat", "increment", "oscillations", "samples"], [
        [r.N, repr(r.K_hat), "" if r.increment is None else repr(r.increment), r.oscillations, r.samples] for r in rows])
    return (FALSIFIED if falsified else INCONCLUSIVE), report, {"csv": csv_text}


def cmd_analyze(scene: Scene, args) -> Tuple[int, dict, dict]:
    pres = scene.presentation
    comps = analyze.components_report(pres)
    iso = analyze.isolated_points_report(pres)
    em = analyze.singular_tangent_points(pres)
    assembly = assemble_and_check(pres)
    proj = assembly.boundary_projection()
    report = {
        "components": comps.to_json(),
        "isolated": iso.to_json(),
        "singular_tangent": em.to_json(),
        "assembly": assembly.to_json(),
        "boundary_projection": {
            "components": len(proj),
            "intervals": [[qstr(a), qstr(b)] for a, b in proj],
        },
    }
    expected = scene.probes.get("expected_projection_components")
    if expected is not None:
        report["boundary_projection"]["expected"] = expected
        report["boundary_projection"]["matches"] = len(proj) == expected
    if not pres.fills:
        report["decomposition"] = [g.to_json() for g in analyze.dc_graph_decomposition(pres)]
    compatible = comps.discrete and iso.discrete and em.discrete
    report["verdict"] = "consistent" if compatible else "not D_2-compatible"
    csv_text = _csv(["a", "b"], [[qstr(a), qstr(b)] for a, b in proj])
    return (OK if compatible else FALSIFIED), report, {"csv": csv_text, "dot": comps.to_dot()}


def cmd_render(scene: Scene, args) -> Tuple[int, dict, dict]:
    pres = scene.presentation
    psi = witness = None
    try:
        n = (args.n_sweep or scene.probes.get("n-sweep") or [16])[0]
        psi = build_psi(pres, n, args.mode)
    except PreconditionError:
        psi = None
    try:
        z, u, _ = _falsify_target(scene)
        witness = detect_non_dc(pres, z, u)
    except PreconditionError:
        witness = None
    svg = render_svg(pres, psi, witness)
    report = {"verdict": "rendered", "potentials": 0 if psi is None else len(psi.potentials),
              "witnesses": [] if witness is None else [x.to_json() for x in witness.witnesses]}
    return OK, report, {"svg": svg}


def cmd_gen_example(name: str, args) -> Tuple[int, dict, dict, Scene]:
    try:
        scene = generate(name)
    except (KeyError, ValueError) as exc:
        raise UsageError(exc.args[0]) from None
    code, report, _ = cmd_validate(scene, args)
    if code != OK:
        raise RuntimeError(f"generated example {name} failed validation: {report}")
    return OK, report, {}, scene


# ---------------------------------------------------------------------------
# output


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, Fraction):
        return qstr(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(args, stem: str, command: str, report: dict, extra: dict, stdout) -> List[Path]:
    fmt = args.format
    if fmt == "json":
        text, ext = dumps(report), "json"
    elif fmt in extra:
        text, ext = extra[fmt], fmt
    else:
        raise UsageError(f"{command} has no {fmt} output")
    if args.out is None:
        stdout.write(text)
        return []
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / f"{stem}.{command}.{ext}"
    path.write_text(text)
    return [path]


def run(argv: Optional[List[str]] = None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, execute one command and return its exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command == "gen-example":
            code, report, _, scene = cmd_gen_example(args.target, args)
            text = scene.dumps()
            if args.out is None:
                stdout.write(text)
            else:
                args.out.mkdir(parents=True, exist_ok=True)
                (args.out / f"{scene.name}.json").write_text(text)
                print(f"wrote {args.out / (scene.name + '.json')}", file=stderr)
            return code
        scene = load_scene(args.target)
        if args.command == "render" and args.format == "json":
            args.format = "svg"
        handler = {
            "validate": cmd_validate,
            "certify": cmd_certify,
            "falsify": cmd_falsify,
            "analyze": cmd_analyze,
            "render": cmd_render,
        }[args.command]
        code, report, extra = handler(scene, args)
        for path in _emit(args, _stem(args.target, scene), args.command, report, extra, stdout):
            print(f"wrote {path}", file=stderr)
        print(f"{args.command}: {report.get('verdict')}", file=stderr)
        return code
    except (UsageError, SceneError) as exc:
        print(f"usage error: {exc}", file=stderr)
        return USAGE
    except Exception as exc:  # noqa: BLE001 - reported as an internal error code
        print(f"internal error: {type(exc).__name__}: {exc}", file=stderr)
        return INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command-line interface: ``asymq analyze|verify|example|swapcheck``.

Exit codes: 0 ok/pass, 1 campaign violation, 2 usage or input error,
3 state invariant failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict

from . import config
from .errors import AsymqError, StateInvariantError
from .measures import (RoofOptions, eof_convex_roof, g_convex_roof, log_negativity,
                       symmetry_bracket, wootters_concurrence, wootters_eof)
from .reporting import REPORT_FORMAT, dumps
from .states import (bell_state, example_2x4_mixture, example_mix01_bell, load_state,
                     local_spectra, product_state, save_state, schmidt, state_to_dict)
from .swap import (ANSATZ_CLASSES, AnsatzOptions, SwapOptions, applicable_classes,
                   asymmetry_upper_bound, locc_swapability_report, lu_swap_check)
from .verify import CAMPAIGNS, run_campaign

EXAMPLES = ("mix01-bell", "mix-2x4", "bell", "product")


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _default_seed() -> int:
    env = os.environ.get("ASYMQ_SEED")
    return _seed(env) if env else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=_default_seed())
    common.add_argument("--tol-profile", choices=sorted(config.PROFILES), default="default")
    common.add_argument("--json", action="store_true", help="emit JSON on stdout")
    common.add_argument("--out", help="also write the JSON report to this path")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--timing", action="store_true", help="include wall-clock times in reports")

    roof = argparse.ArgumentParser(add_help=False)
    roof.add_argument("--restarts", type=int, default=16, help="convex-roof restarts")
    roof.add_argument("--ensemble-factor", type=int, default=2)
    roof.add_argument("--max-iters", type=int, default=2000)
    roof.add_argument("--tol", type=float, default=1e-7)

    p = argparse.ArgumentParser(prog="asymq", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common, roof], help="entanglement and swap diagnostics")
    a.add_argument("state")
    a.add_argument("--swap-restarts", type=int, default=32)
    a.add_argument("--ansatz", choices=ANSATZ_CLASSES, default=None,
                   help="ansatz for the asymmetry bound (default: best applicable)")
    a.add_argument("--ansatz-restarts", type=int, default=8)

    v = sub.add_parser("verify", parents=[common], help="run a verification campaign")
    v.add_argument("campaign", choices=CAMPAIGNS)
    v.add_argument("--samples", type=int, default=1000)
    v.add_argument("--dim", type=int, default=2)
    v.add_argument("--branches", type=int, default=3)

    e = sub.add_parser("example", parents=[common], help="write an example state file")
    e.add_argument("name", choices=EXAMPLES)
    e.add_argument("--p", type=float, default=0.5)

    s = sub.add_parser("swapcheck", parents=[common, roof], help="LOCC swapability report")
    s.add_argument("state")
    s.add_argument("--swap-restarts", type=int, default=32)
    s.add_argument("--ansatz", choices=ANSATZ_CLASSES, default=None)
    s.add_argument("--ansatz-restarts", type=int, default=8)
    return p


def _roof_opts(args) -> RoofOptions:
    return RoofOptions(restarts=args.restarts, ensemble_factor=args.ensemble_factor,
                       max_iters=args.max_iters, tol=args.tol, seed=args.seed)


def _emit(args, report: dict, lines: list[str]) -> None:
    text = dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text)
    else:
        print("\n".join(lines))


def _best_asymmetry(state, args):
    opts = AnsatzOptions(restarts=args.ansatz_restarts, seed=args.seed)
    out_dims = (state.dB, state.dA)
    classes = [args.ansatz] if args.ansatz else [c for c in applicable_classes(state.dims, out_dims)
                                                  if c != "identity"]
    best = None
    for cls in classes:
        est = asymmetry_upper_bound(state, cls, opts)
        if best is None or est.value < best.value:
            best = est
    return best


def cmd_analyze(args) -> int:
    state = load_state(args.state)
    roof = _roof_opts(args)
    spec_a, spec_b = local_spectra(state)
    g = g_convex_roof(state, roof)
    eof = eof_convex_roof(state, roof)
    bracket = symmetry_bracket(state, roof, eof=eof)
    lu = lu_swap_check(state, SwapOptions(restarts=args.swap_restarts, seed=args.seed))
    asym = _best_asymmetry(state, args)
    report = {
        "format": REPORT_FORMAT, "kind": "analyze",
        "state": {"path": args.state, **state_to_dict(state)},
        "local_spectra": {"A": spec_a, "B": spec_b},
        "g_upper": g.to_dict(), "eof_upper": eof.to_dict(),
        "log_negativity": log_negativity(state),
        "bracket": bracket.to_dict(),
        "verdict": lu.status, "residual": lu.residual, "swap": lu.to_dict(),
        "asymmetry": None if asym is None else asym.to_dict(),
        "seeds": [args.seed], "options": {"roof": asdict(roof), "swap_restarts": args.swap_restarts,
                                          "ansatz_restarts": args.ansatz_restarts,
                                          "tol_profile": args.tol_profile},
    }
    if state.is_pure:
        sd = schmidt(state)
        report["schmidt"] = {"coefficients": sd.coefficients, "rank": sd.rank}
    if state.dims == (2, 2):
        report["wootters"] = {"concurrence": wootters_concurrence(state), "eof": wootters_eof(state)}
    lines = [f"state            {args.state}  ({state.dA}x{state.dB}, {state.kind})",
             f"spectrum A       {_fmt(spec_a)}",
             f"spectrum B       {_fmt(spec_b)}",
             f"G                {g.value:.6g} ({g.direction})",
             f"E_F              {eof.value:.6g} ({eof.direction})"]
    if "wootters" in report:
        w = report["wootters"]
        lines.append(f"Wootters C, E_F  {w['concurrence']:.6g}, {w['eof']:.6g}")
    lines += [f"bracket          s_lower={_num(bracket.s_lower)}  asym_upper={bracket.asym_upper:.6g}",
              f"LU swap          {lu.status} (residual {_num(lu.residual)})"]
    if asym is not None:
        lines.append(f"asymmetry <=     {asym.value:.6g} [{asym.ansatz_class}]")
    _emit(args, report, lines)
    return 0


def cmd_swapcheck(args) -> int:
    state = load_state(args.state)
    ansatz = AnsatzOptions(restarts=args.ansatz_restarts, seed=args.seed)
    rep = locc_swapability_report(state, SwapOptions(restarts=args.swap_restarts, seed=args.seed),
                                  _roof_opts(args), ansatz)
    report = {"format": REPORT_FORMAT, "kind": "swapcheck",
              "state": {"path": args.state, **state_to_dict(state)},
              "verdict": rep.lu.status, "residual": rep.lu.residual,
              "g_upper": rep.g.value, "report": rep.to_dict(),
              "seeds": [args.seed],
              "options": {"swap_restarts": args.swap_restarts, "ansatz_restarts": args.ansatz_restarts}}
    if args.ansatz:
        est = asymmetry_upper_bound(state, args.ansatz, ansatz)
        report["asymmetry"] = est.to_dict()
    lines = [f"LU swap          {rep.lu.status} (residual {_num(rep.lu.residual)})",
             f"G                {rep.g.value:.6g}",
             f"criterion        {rep.full_rank_criterion}",
             f"verdict          {rep.verdict}"]
    _emit(args, report, lines)
    return 0


def cmd_verify(args) -> int:
    rep = run_campaign(args.campaign, args.samples, args.dim, args.branches, args.seed,
                       workers=max(1, args.threads))
    lines = [f"campaign   {rep.campaign}  dims={rep.dims}  samples={rep.samples}  seed={rep.seed}",
             f"violations {rep.violations} (tol {rep.tolerance:g}), max {_num(rep.max_violation)}",
             f"result     {'PASS' if rep.passed else 'FAIL'}"]
    _emit(args, rep.to_dict(timing=args.timing), lines)
    return 0 if rep.passed else 1


def cmd_example(args) -> int:
    if args.name == "mix01-bell":
        state = example_mix01_bell(args.p)
    elif args.name == "mix-2x4":
        state = example_2x4_mixture()
    elif args.name == "bell":
        state = bell_state(2)
    else:
        state = product_state([1, 0], [0, 1])
    if args.out:
        save_state(state, args.out)
        load_state(args.out)
    if args.json or not args.out:
        print(dumps(state_to_dict(state)))
    return 0


def _fmt(values) -> str:
    return "[" + ", ".join(f"{v:.6g}" for v in values) + "]"


def _num(x) -> str:
    return "n/a" if x is None or x != x else f"{x:.3g}"


COMMANDS = {"analyze": cmd_analyze, "verify": cmd_verify, "example": cmd_example,
            "swapcheck": cmd_swapcheck}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config.set_profile(args.tol_profile)
    try:
        return COMMANDS[args.command](args)
    except StateInvariantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (AsymqError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        config.set_profile("default")


if __name__ == "__main__":
    sys.exit(main())

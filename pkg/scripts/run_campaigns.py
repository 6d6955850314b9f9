"""Run every verification campaign and write one JSON report per run.

    python scripts/run_campaigns.py --samples 1000 --outdir results/
"""
import argparse
from pathlib import Path

from asymq.reporting import dumps
from asymq.verify import run_campaign


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", default="results")
    args = p.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    plan = [("lemma2", d, k) for d in (2, 3) for k in range(1, 7)]
    plan += [("lemma1", 2, 3), ("lemma1", 3, 3), ("monotonicity", 2, 3),
             ("g_identity", 2, 0), ("g_identity", 3, 0)]
    for name, d, k in plan:
        rep = run_campaign(name, args.samples, d, max(k, 1), args.seed)
        tag = f"{name}_d{d}" + (f"_k{k}" if k else "")
        (out / f"{tag}.json").write_text(dumps(rep.to_dict(timing=True)) + "\n")
        print(f"{tag:18s} {'PASS' if rep.passed else 'FAIL'}  max={rep.max_violation:+.2e}  "
              f"{rep.runtime_ms} ms")
    n2 = max(1, args.samples // 5)
    rep = run_campaign("theorem2", n2, seed=args.seed)
    (out / "theorem2.json").write_text(dumps(rep.to_dict(timing=True)) + "\n")
    print(f"{'theorem2':18s} {'PASS' if rep.passed else 'FAIL'}  max={rep.max_violation:+.2e}  "
          f"{rep.runtime_ms} ms")


if __name__ == "__main__":
    main()

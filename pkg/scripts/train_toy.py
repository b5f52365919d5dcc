"""Train one model on the bundled toy manifest and report test-split MCC before and after.

    python3 scripts/train_toy.py --model 3 --iterations 15 --out runs/m3
"""

import argparse
from pathlib import Path

import numpy as np

from rnaqubo.dataset_io import load_manifest
from rnaqubo.models import PARAM_TYPES
from rnaqubo.pipeline import SolverSettings, predict
from rnaqubo.scoring import score
from rnaqubo.trainer import SpsaConfig, train

TOY = Path(__file__).resolve().parents[1] / "src" / "rnaqubo" / "data" / "toy" / "manifest.tsv"


def mean_mcc(model, params, data, solver):
    return float(np.mean([score(predict(model, seq, params, solver).structure, truth) for _, seq, truth in data]))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--manifest", default=str(TOY))
    ap.add_argument("--model", type=int, choices=(1, 2, 3), default=3)
    ap.add_argument("--iterations", type=int, default=15)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="runs/toy")
    args = ap.parse_args()

    man = load_manifest(args.manifest)
    train_set, test_set = man.select("train").load(), man.select("test").load()
    solver = SolverSettings(method="exhaustive")
    rec = train(
        args.model,
        [(seq, truth) for _, seq, truth in train_set],
        SpsaConfig(iterations=args.iterations, seed=args.seed),
        solver,
    )
    params_type = PARAM_TYPES[args.model]
    fitted = params_type().with_vector(rec.best_params)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "params.tsv").write_text(fitted.to_kv())
    (out / "train_log.tsv").write_text("".join("\t".join(map(str, row)) + "\n" for row in rec.log_rows()))

    print(f"train loss {rec.initial_loss:.4f} -> {rec.best_loss:.4f}")
    for name, params in (("all-ones", params_type.ones()), ("trained", fitted)):
        print(f"test mean MCC ({name}): {mean_mcc(args.model, params, test_set, solver):.4f}")


if __name__ == "__main__":
    main()

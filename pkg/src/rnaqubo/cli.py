"""Command-line interface: ``rnaqubo <command> ...``.

Data goes to stdout (or ``--out``); diagnostics go to stderr. Any package
error exits with status 1, a usage error with status 2.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .dataset_io import emit_ct, is_pseudoknotted, known_stems, load_manifest, parse_fasta, read_ct, read_fasta
from .errors import DomainError, RnaQuboError
from .models import PARAM_TYPES, Qubo, build, load_preset
from .pipeline import FoldSettings, SolverSettings, candidates, predict
from .scoring import SecondaryStructure, confusion, mcc
from .seq_model import LoopPenaltyTable, NnTable, parse_sequence
from .solvers import METHODS, solve
from .stems import (
    BP_LENGTH,
    count_pairs,
    enumerate_stems,
    pair_count_closed_form,
    stem_count_closed_form,
    to_lines,
    worst_case_sequence,
)
from .trainer import LOSS_MEAN_SQUARED, LOSS_ONE_MINUS_MEAN, SpsaConfig, train

log = logging.getLogger("rnaqubo")

SCORE_HEADER = ("id", "model", "pseudoknotted", "tp", "fp", "fn", "tn", "mcc")


@dataclass(frozen=True)
class RunConfig:
    model: int = 1
    params: object = None
    solver: SolverSettings = field(default_factory=SolverSettings)
    fold: FoldSettings = field(default_factory=FoldSettings)
    jobs: int = 1
    out: Path | None = None

    def __post_init__(self):
        if self.params is None:
            object.__setattr__(self, "params", PARAM_TYPES[self.model]())


def resolve_params(model: int, preset: str | None = None, path: str | None = None, overrides=()):
    """Defaults, then a preset, then a ``KEY<TAB>VALUE`` file, then ``KEY=VALUE`` overrides."""
    ptype = PARAM_TYPES[model]
    params = load_preset(preset, model) if preset else ptype()
    if path:
        params = ptype.from_kv(Path(path).read_text(), base=params)
    if overrides:
        params = ptype.from_kv("\n".join(o.replace("=", "\t", 1) for o in overrides), base=params)
    return params


def config_from_args(args) -> RunConfig:
    model = getattr(args, "model", 1)
    fold = FoldSettings(
        m=getattr(args, "stem_min", 2),
        min_loop=getattr(args, "min_loop", 3),
        nn_table=NnTable.load(args.nn_table) if getattr(args, "nn_table", None) else None,
        loop_table=LoopPenaltyTable.load(args.loop_table) if getattr(args, "loop_table", None) else None,
    )
    solver = SolverSettings(
        method=getattr(args, "solver", "exhaustive"),
        seed=getattr(args, "seed", 0),
        reads=getattr(args, "reads", 8),
        sweeps=getattr(args, "sweeps", None),
        cap=getattr(args, "cap", 25),
    )
    params = resolve_params(
        model, getattr(args, "params_preset", None), getattr(args, "params", None), getattr(args, "set", None) or ()
    )
    out = Path(args.out) if getattr(args, "out", None) else None
    return RunConfig(model, params, solver, fold, getattr(args, "jobs", 1), out)


# ---------------------------------------------------------------------------
# output helpers


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _tsv(rows) -> str:
    return "".join("\t".join(_cell(v) for v in row) + "\n" for row in rows)


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _sequences(args):
    if args.sequence:
        return [parse_sequence(args.sequence, "seq")]
    if args.input == "-":
        return parse_fasta(sys.stdin.read())
    return read_fasta(args.input)


def _single_sequence(args):
    seqs = _sequences(args)
    if len(seqs) != 1:
        raise SystemExit(f"expected exactly one sequence, got {len(seqs)}")
    return seqs[0]


# ---------------------------------------------------------------------------
# commands


def cmd_enumerate(args) -> int:
    cfg = config_from_args(args)
    seq = _single_sequence(args)
    cset = candidates(cfg.model, seq, cfg.fold)
    header = f"# {seq.id or 'seq'} model={cfg.model} candidates={len(cset)} mu={cset.mu!r}\n"
    _emit(header + to_lines(cset), cfg.out)
    return 0


def cmd_build(args) -> int:
    cfg = config_from_args(args)
    seq = _single_sequence(args)
    cset = candidates(cfg.model, seq, cfg.fold)
    qubo = build(cfg.model, cset, cfg.params, cfg.fold.loop_table)
    _emit(qubo.to_json() + "\n", cfg.out)
    return 0


def cmd_solve(args) -> int:
    cfg = config_from_args(args)
    qubo = Qubo.load(args.qubo)
    _emit(json.dumps(solve(cfg.solver.request(qubo)).to_dict(), indent=1) + "\n", cfg.out)
    return 0


def _prediction_text(cfg: RunConfig, seq) -> str:
    pred = predict(cfg.model, seq, cfg.params, cfg.solver, cfg.fold)
    lines = [f"# model {cfg.model} solver {cfg.solver.method} energy {pred.result.best_energy!r}"]
    for bit, cand in zip(pred.result.best_q, pred.cset.candidates):
        if bit:
            lines.append(f"# selected {cand.first} {cand.last} {cand.length} {cand.weight!r}")
    lines.append(f"# dot-bracket {pred.structure.dot_bracket()}")
    return "\n".join(lines) + "\n" + emit_ct(seq, pred.structure)


def cmd_predict(args) -> int:
    cfg = config_from_args(args)
    seqs = _sequences(args)
    texts = _map(_prediction_text, cfg, seqs)
    if len(seqs) == 1:
        _emit(texts[0], cfg.out)
        return 0
    if cfg.out is None:
        sys.stdout.write("".join(texts))
        return 0
    cfg.out.mkdir(parents=True, exist_ok=True)
    for seq, text in zip(seqs, texts):
        (cfg.out / f"{seq.id}.ct").write_text(text)
    return 0


def _score_row(id_, model, pred: SecondaryStructure, truth: SecondaryStructure):
    c = confusion(pred, truth)
    return (id_, model, is_pseudoknotted(truth), c.tp, c.fp, c.fn, c.tn, mcc(c))


def _predict_and_score(cfg: RunConfig, item):
    idx, (id_, seq, truth) = item
    pred = predict(cfg.model, seq, cfg.params, cfg.solver, cfg.fold, seed=cfg.solver.seed + idx)
    return _score_row(id_, cfg.model, pred.structure, truth)


def cmd_score(args) -> int:
    cfg = config_from_args(args)
    if args.manifest:
        man = load_manifest(args.manifest).select(args.split, _pk_class(args.pk_class))
        rows = _map(_predict_and_score, cfg, list(enumerate(man.load())))
    else:
        if not (args.pred and args.truth):
            raise SystemExit("score needs PRED and TRUTH CT files, or --manifest")
        pseq, pred = read_ct(args.pred)
        tseq, truth = read_ct(args.truth)
        if pseq.bases != tseq.bases:
            log.warning("predicted and true CT files hold different sequences")
        rows = [_score_row(tseq.id, "-", pred, truth)]
    _emit(_tsv([SCORE_HEADER, *rows]), cfg.out)
    return 0


def _pk_class(name: str | None):
    return {None: None, "all": None, "pk": True, "npk": False}[name]


def cmd_train(args) -> int:
    cfg = config_from_args(args)
    man = load_manifest(args.manifest).select(args.split, _pk_class(args.pk_class))
    data = [(seq, truth) for _, seq, truth in man.load()]
    if not data:
        raise SystemExit("the selected training set is empty")
    log.info("training model %d on %d structures", cfg.model, len(data))
    initial = tuple(args.initial) if args.initial else None
    spsa = SpsaConfig(iterations=args.iterations, c=args.c, a=args.a, seed=args.seed, initial=initial, loss_kind=args.loss)
    rec = train(cfg.model, data, spsa, cfg.solver, cfg.fold)
    out = cfg.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    (out / "train_log.tsv").write_text(_tsv(rec.log_rows()))
    best = PARAM_TYPES[cfg.model]().with_vector(rec.best_params)
    (out / "params.tsv").write_text(best.to_kv())
    sys.stdout.write(f"initial_loss\t{rec.initial_loss!r}\nbest_loss\t{rec.best_loss!r}\n")
    return 0


def cmd_complexity(args) -> int:
    rows = [("N", "m", "S_closed", "P_closed", "S_brute", "P_brute", "match")]
    ok = True
    if args.n:
        bad = [n for n in args.n if n % 2 == 0]
        if bad:
            raise DomainError(f"closed forms hold for odd N only, got {bad}")
        sizes = args.n
    else:
        sizes = [n for n in range(args.n_min, args.n_max + 1) if n % 2]
    for n in sizes:
        for m in args.m:
            if n < 2 * m + 1:
                continue
            s, p = stem_count_closed_form(n, m), pair_count_closed_form(n, m)
            cands = enumerate_stems(worst_case_sequence(n), m=m, min_loop=args.min_loop, classify=False).candidates
            sb, pb = len(cands), count_pairs(cands)
            ok &= (s, p) == (sb, pb)
            rows.append((n, m, s, p, sb, pb, (s, p) == (sb, pb)))
    _emit(_tsv(rows), Path(args.out) if args.out else None)
    return 0 if ok else 1


def cmd_dataset_stats(args) -> int:
    man = load_manifest(args.manifest)
    rows = [("id", "split", "pseudoknotted", "length", "pairs", "stems", "mu_bp", "candidates_m1", "candidates_m2", "candidates_m3")]
    fold = FoldSettings(m=args.stem_min, min_loop=args.min_loop)
    for entry in man:
        seq, truth = entry.load()
        stems, mu = known_stems(truth, args.stem_min, BP_LENGTH)
        counts = [len(candidates(k, seq, fold)) for k in (1, 2, 3)]
        rows.append((entry.id, entry.split, is_pseudoknotted(truth), len(seq), len(truth.pairs), len(stems), mu, *counts))
    _emit(_tsv(rows), Path(args.out) if args.out else None)
    return 0


# ---------------------------------------------------------------------------
# parallel map


def _call(payload):
    fn, cfg, item = payload
    return fn(cfg, item)


def _map(fn, cfg: RunConfig, items):
    if cfg.jobs <= 1 or len(items) <= 1:
        return [fn(cfg, it) for it in items]
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        return list(pool.map(_call, [(fn, cfg, it) for it in items]))


# ---------------------------------------------------------------------------
# argument parsing


def _model_args(p, solver_default="exhaustive"):
    p.add_argument("--model", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--min-loop", type=int, default=3, help="minimum hairpin loop size")
    p.add_argument("--stem-min", type=int, default=2, help="minimum stem length m")
    p.add_argument("--params", help="KEY<TAB>VALUE parameter file")
    p.add_argument("--params-preset", help="named parameter preset, e.g. paper-2022")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one parameter")
    p.add_argument("--nn-table", help="stacking stability table (TSV)")
    p.add_argument("--loop-table", help="loop penalty table (TSV)")
    _solver_args(p, solver_default)


def _solver_args(p, default="exhaustive"):
    p.add_argument("--solver", choices=METHODS, default=default)
    p.add_argument("--reads", type=int, default=8, help="restarts for sa/tabu")
    p.add_argument("--sweeps", type=int, help="SA sweeps or tabu iterations per read")
    p.add_argument("--cap", type=int, default=25, help="exhaustive solver variable cap")
    p.add_argument("--seed", type=int, default=0)


def _seq_args(p):
    p.add_argument("input", nargs="?", default="-", help="FASTA file, or - for stdin")
    p.add_argument("--sequence", help="sequence given inline instead of a file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rnaqubo", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="list candidate stems and their pair relations")
    _seq_args(p)
    _model_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("build", help="write the QUBO for one sequence as JSON")
    _seq_args(p)
    _model_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("solve", help="minimise a QUBO JSON file")
    p.add_argument("qubo")
    _solver_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("predict", help="predict structures and write CT")
    _seq_args(p)
    _model_args(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="CT file, or a directory for several sequences")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("score", help="MCC of a predicted CT against a known one, or over a manifest")
    p.add_argument("pred", nargs="?")
    p.add_argument("truth", nargs="?")
    p.add_argument("--manifest")
    p.add_argument("--split")
    p.add_argument("--class", dest="pk_class", choices=("all", "pk", "npk"), default="all")
    _model_args(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("train", help="fit model parameters with SPSA")
    p.add_argument("manifest")
    p.add_argument("--split")
    p.add_argument("--class", dest="pk_class", choices=("all", "pk", "npk"), default="all")
    _model_args(p)
    p.add_argument("--iterations", type=int, default=60)
    p.add_argument("--c", type=float, default=0.1)
    p.add_argument("--a", type=float, help="gain a; calibrated when omitted")
    p.add_argument("--initial", type=float, nargs="+", help="starting vector (default all ones)")
    p.add_argument("--loss", choices=(LOSS_ONE_MINUS_MEAN, LOSS_MEAN_SQUARED), default=LOSS_ONE_MINUS_MEAN)
    p.add_argument("--out", help="directory for train_log.tsv and params.tsv")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("complexity", help="check the candidate-count closed forms")
    p.add_argument("--n-min", type=int, default=5)
    p.add_argument("--n-max", type=int, default=41)
    p.add_argument("--n", type=int, nargs="+", help="explicit odd lengths instead of the range")
    p.add_argument("--m", type=int, nargs="+", default=[2, 3, 4])
    p.add_argument("--min-loop", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("dataset-stats", help="per-entry summary of a manifest")
    p.add_argument("manifest")
    p.add_argument("--min-loop", type=int, default=3)
    p.add_argument("--stem-min", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dataset_stats)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (RnaQuboError, KeyError, ValueError, OSError) as exc:
        print(f"rnaqubo: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

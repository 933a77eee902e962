"""brkit command line.

Exit codes: 0 success, 1 a check failed (or recognition did not certify),
2 usage error.  Every command is a function of its flags, input files and
--seed.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .errors import BrkitError, BudgetExceeded, RankBoundViolated
from .field import SUPPORTED, field_make
from .models import CompressionModel, all_models, model_dim, model_space, model_urk
from .recognize import MODES, dumps_cert, recognize
from .space import adapted_mask, dumps_space, hyperplane_table, read_space, sh_dims, urk, write_space
from .verify import SUITES, SuiteConfig, run_suite, sample_bounded_space

USAGE, FAILED, OK = 2, 1, 0


class UsageError(Exception):
    pass


def _ints(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path: str):
    try:
        return read_space(path)
    except FileNotFoundError:
        raise UsageError(f"{path}: file not found") from None
    except IsADirectoryError:
        raise UsageError(f"{path}: is a directory") from None


def _check_q(q: int) -> None:
    if q not in SUPPORTED:
        raise UsageError(f"--q {q}: supported field sizes are {', '.join(map(str, SUPPORTED))}")


def _model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=("sym", "alt"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--q", type=int, default=2)


# ---------------------------------------------------------------- commands

def cmd_model(a) -> int:
    _check_q(a.q)
    S = model_space(CompressionModel(a.kind, a.n, a.s, a.t), field_make(a.q))
    if a.output:
        write_space(S, a.output)
        print(f"wrote {S.dim}-dimensional space to {a.output}", file=sys.stderr)
    else:
        sys.stdout.write(dumps_space(S))
    return OK


def cmd_dims(a) -> int:
    lines = ["kind\tn\ts\tt\tdim\turk"]
    kinds = (a.kind,) if a.kind else ("sym", "alt")
    F = field_make(2)
    for kind in kinds:
        for model in all_models(kind, a.n):
            mr = model_urk(model, F)
            flag = "" if mr.exact else "*"
            lines.append(f"{kind}\t{model.n}\t{model.s}\t{model.t}\t{model_dim(model)}\t{mr.value}{flag}")
    _emit("\n".join(lines) + "\n", a.output)
    return OK


def cmd_urk(a) -> int:
    S = _load(a.space)
    res = urk(S, a.mode, budget=a.budget, trials=a.trials, seed=a.seed)
    out = {"value": res.value, "method": res.method, "members_checked": res.members_checked,
           "witness": res.witness.tolist() if res.witness is not None else None}
    _emit(json.dumps(out) + "\n", a.output)
    return OK


def cmd_sh(a) -> int:
    S = _load(a.space)
    phis, dims = sh_dims(S)
    order = np.argsort(dims, kind="stable")[: a.top] if a.top else np.arange(len(phis))
    lines = ["phi\tdim_sh"] + [f"{' '.join(map(str, phis[i]))}\t{int(dims[i])}" for i in order]
    _emit("\n".join(lines) + "\n", a.output)
    return OK


def cmd_adapted(a) -> int:
    S = _load(a.space)
    if S.kind != "sym":
        raise UsageError("adapted hyperplanes are defined for symmetric spaces")
    phis, _ = hyperplane_table(S.q, S.n)
    _, dims = sh_dims(S)
    mask = adapted_mask(S)
    rows = [f"{' '.join(map(str, phis[i]))}\t{int(dims[i])}" for i in np.flatnonzero(mask)]
    _emit("\n".join(["phi\tdim_sh"] + rows) + "\n", a.output)
    print(f"{int(mask.sum())} of {len(phis)} hyperplanes are adapted", file=sys.stderr)
    return OK


def cmd_recognize(a) -> int:
    S = _load(a.space)
    if S.kind == "sym" and S.q == 2:
        raise UsageError("--q 2: symmetric recognition needs a field with more than two elements")
    out = recognize(S, a.r, mode=a.mode, check=not a.no_check, seed=a.seed, budget=a.budget)
    _emit(json.dumps(out.to_json()) + "\n", a.output)
    if a.cert and out.certified:
        with open(a.cert, "w") as fh:
            fh.write(dumps_cert(out.cert, S.q))
    print(f"{out.verdict}" + (f": {out.model}" if out.certified else ""), file=sys.stderr)
    return OK if out.certified else FAILED


def cmd_verify(a) -> int:
    names = SUITES if a.suite == "all" else (a.suite,)
    ok = True
    chunks = []
    for name in names:
        cfg = SuiteConfig(name, fields=a.q, n_max=a.n_max, r_values=a.r, trials=a.trials,
                          seed=a.seed, budget=a.budget, jobs=a.jobs)
        rep = run_suite(cfg)
        chunks.append(rep.to_jsonl(timing=a.timing))
        print(rep.summary(), file=sys.stderr)
        ok &= rep.passed
    _emit("".join(chunks), a.output)
    return OK if ok else FAILED


def cmd_sample(a) -> int:
    _check_q(a.q)
    model = CompressionModel(a.kind, a.n, a.s, a.t)
    d = model_dim(model) if a.d is None else a.d
    smp = sample_bounded_space(model, d, field_make(a.q), a.seed)
    if a.output:
        write_space(smp.space, a.output)
    else:
        sys.stdout.write(dumps_space(smp.space))
    if a.cert:
        with open(a.cert, "w") as fh:
            fh.write(dumps_cert(smp.truth, a.q))
    return OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="brkit", description="Spaces of bounded-rank matrices over small finite fields.")
    ap.add_argument("--version", action="version", version=f"brkit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model", help="write a compression model space")
    _model_args(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("dims", help="table of model dimensions and upper-ranks (* = structural bound only)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=("sym", "alt"))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("urk", help="upper-rank of a space")
    p.add_argument("space")
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--budget", type=int, default=10 ** 7)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_urk)

    p = sub.add_parser("sh", help="dim S_H for every hyperplane H")
    p.add_argument("space")
    p.add_argument("--top", type=int, default=0, help="only the TOP smallest")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sh)

    p = sub.add_parser("adapted", help="S-adapted hyperplanes of a symmetric space")
    p.add_argument("space")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_adapted)

    p = sub.add_parser("recognize", help="certify a space into a compression model")
    p.add_argument("space")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--mode", choices=MODES, default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10 ** 8, help="flag-search budget")
    p.add_argument("--no-check", action="store_true", help="skip the threshold and upper-rank prechecks")
    p.add_argument("--cert", help="also write the certificate here")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("verify", help="run check suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--q", type=_ints, help="field sizes, e.g. 2,3")
    p.add_argument("--n-max", type=int)
    p.add_argument("--r", type=_ints, help="rank bounds, e.g. 2,4")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="include per-record timings (breaks byte equality)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="random subspace of a model, randomly conjugated")
    _model_args(p)
    p.add_argument("--d", type=int, help="dimension (default: the whole model)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cert", help="write the ground-truth certificate here")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sample)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    try:
        return a.func(a)
    except UsageError as e:
        print(f"brkit {a.command}: error: {e}", file=sys.stderr)
        return USAGE
    except (RankBoundViolated, BudgetExceeded) as e:
        print(f"brkit {a.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return FAILED
    except BrkitError as e:
        print(f"brkit {a.command}: error: {type(e).__name__}: {e}", file=sys.stderr)
        return USAGE
    except OSError as e:
        print(f"brkit {a.command}: error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())

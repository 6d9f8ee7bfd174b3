"""Command-line harness: ``ordrep gen|train|eval|curve|loocv``.

Exit codes are 0 on success, 1 when a command fails at run time (I/O,
solver or optimizer failure) and 2 for usage errors. Result CSVs depend
only on the inputs and seeds; timestamps go to the ``.log`` sidecars.
"""

import argparse
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ordrep import learners, metrics
from ordrep.core import loocv_folds, read_csv, split_random, write_csv
from ordrep.learners import ExperimentConfig
from ordrep.synthdata import corruption_rate, generate, preset

# hyperparameter flags; names match ExperimentConfig fields
HYPER = {
    "model": dict(choices=learners.MODELS),
    "C": dict(type=float),
    "kernel": dict(choices=("linear", "poly", "polynomial")),
    "degree": dict(type=int),
    "tol": dict(type=float),
    "max_iter": dict(type=int),
    "h": dict(type=float),
    "s": dict(type=int),
    "j": dict(),
    "cumulative": dict(choices=("0", "1")),
    "hidden": dict(type=int),
    "epochs": dict(type=int),
    "lr": dict(type=float),
    "loss": dict(choices=("squared", "absolute")),
    "seed": dict(type=int),
}

# flag defaults that are not model hyperparameters
RUN_DEFAULTS = {"sizes": "20:100:20", "runs": 100, "seed": 0}


class UsageError(Exception):
    pass


# --- argument handling -------------------------------------------------------------

def read_config(path):
    """Flat ``key = value`` file; blank lines and ``#`` comments are skipped."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _merge(args, keys):
    """Flags override the config file; unset keys are left out."""
    merged = read_config(args.config) if getattr(args, "config", None) else {}
    unknown = set(merged) - set(keys)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _experiment(values, seed_key=True):
    hyper = {k: v for k, v in values.items() if k in HYPER and v is not None}
    if "model" not in hyper:
        raise UsageError("--model is required (flag or config file)")
    if not seed_key:
        hyper.pop("seed", None)
    try:
        return ExperimentConfig.from_mapping(hyper)
    except ValueError as err:
        raise UsageError(str(err)) from None


def _add_hyper(p):
    g = p.add_argument_group("model")
    for name, opts in HYPER.items():
        flag = "--" + name.replace("_", "-")
        g.add_argument(flag, dest=name, default=None, **opts)
    p.add_argument("--config", help="key=value file; flags take precedence")


def _parse_sizes(text):
    parts = str(text).split(":")
    try:
        nums = [int(v) for v in parts]
    except ValueError:
        raise UsageError(f"bad size range {text!r}") from None
    if len(nums) == 3:
        lo, hi, step = nums
        if step <= 0 or lo > hi:
            raise UsageError(f"bad size range {text!r}")
        return list(range(lo, hi + 1, step))
    if len(nums) == 1 and len(parts) == 1:
        return nums
    raise UsageError("sizes take the form START:STOP:STEP or a single size")


def build_parser():
    parser = argparse.ArgumentParser(prog="ordrep", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    p.add_argument("--space", choices=("r2", "r4"), required=True)
    p.add_argument("--classes", type=int, choices=(5, 10), required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train a model and save it")
    p.add_argument("--data")
    p.add_argument("--classes", type=int, default=None)
    p.add_argument("--out")
    _add_hyper(p)

    p = sub.add_parser("eval", help="evaluate a saved model on a dataset")
    p.add_argument("--model-file", dest="model_file", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out")

    p = sub.add_parser("curve", help="learning curve over training sizes")
    p.add_argument("--data")
    p.add_argument("--classes", type=int, default=None)
    p.add_argument("--sizes", default=None)
    p.add_argument("--runs", type=int, default=None)
    p.add_argument("--out")
    _add_hyper(p)

    p = sub.add_parser("loocv", help="leave-one-out evaluation")
    p.add_argument("--data")
    p.add_argument("--classes", type=int, default=None)
    p.add_argument("--out")
    _add_hyper(p)
    return parser


# --- output helpers ------------------------------------------------------------------

def _num(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _write_rows(path, header, rows):
    text = ",".join(header) + "\n" + "".join(",".join(_num(v) if not isinstance(v, str) else v
                                                      for v in r) + "\n" for r in rows)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _write_log(path, lines):
    if not path:
        return
    stamp = time.strftime("%Y-%m-%dT%H:%M:%S")
    with open(path + ".log", "w", encoding="utf-8") as fh:
        fh.write(f"# written {stamp}\n")
        fh.write("\n".join(lines) + "\n")


def _table(report):
    names = metrics.EvaluationReport.COLUMNS
    return "\n".join(f"{n:>9}  {_num(v)}" for n, v in zip(names, report.row()))


def _config_lines(config):
    return [f"config {k}={v}" for k, v in sorted(vars(config).items())]


def _load_data(path, classes=None):
    if not path:
        raise UsageError("--data is required (flag or config file)")
    return read_csv(path, num_classes=classes)


# --- commands ------------------------------------------------------------------------

def cmd_gen(args):
    try:
        spec = preset(args.space, args.classes, n=args.n, seed=args.seed, sigma=args.sigma)
    except ValueError as err:
        raise UsageError(str(err)) from None
    dataset, clean = generate(spec)
    write_csv(args.out, dataset, {"noiseless_label": clean})
    counts = dataset.class_counts()
    print(f"wrote {len(dataset)} rows to {args.out}")
    print("class counts " + " ".join(f"{k + 1}:{c}" for k, c in enumerate(counts)))
    print(f"corruption rate {corruption_rate(dataset.labels, clean):.4f}")
    return 0


def _classes(values):
    return None if values.get("classes") is None else int(values["classes"])


def cmd_train(args):
    values = _merge(args, list(HYPER) + ["data", "classes", "out"])
    config = _experiment(values)
    if not values.get("out"):
        raise UsageError("--out is required (flag or config file)")
    dataset = _load_data(values.get("data"), _classes(values))
    log = _config_lines(config) + [f"data {values['data']} rows={len(dataset)} K={dataset.num_classes}"]
    started = time.perf_counter()
    try:
        model = learners.train(config, dataset)
    except Exception as err:
        _write_log(values["out"], log + [f"error {type(err).__name__}: {err}"]
                   + [f"{k} {v}" for k, v in vars(err).items()])
        raise
    log.append(f"seconds {time.perf_counter() - started:.3f}")
    learners.save(model, values["out"])
    _write_log(values["out"], log + learners.diagnostics(model))
    print(f"saved {model.name} model to {values['out']}")
    return 0


def cmd_eval(args):
    model = learners.load(args.model_file)
    dataset = read_csv(args.data)
    if dataset.dim != model.dim:
        raise ValueError(f"model expects {model.dim} features, data has {dataset.dim}")
    if int(dataset.labels.max()) > model.num_classes:
        raise ValueError(f"data has labels above the model's K={model.num_classes}")
    report = metrics.evaluate(model.predict(dataset.features), dataset.labels)
    text = _write_rows(args.out, metrics.EvaluationReport.COLUMNS, [report.row()])
    sys.stdout.write(text)
    print()
    print(_table(report))
    return 0


def _trial(job):
    config, dataset, size, run, seed = job
    train, test = split_random(dataset, size, seed).apply(dataset)
    started = time.perf_counter()
    model = learners.train(config.with_seed(seed), train)
    elapsed = time.perf_counter() - started
    report = metrics.evaluate(model.predict(test.features), test.labels)
    return size, run, seed, report.row(), elapsed


def _threads():
    raw = os.environ.get("ORDREP_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"ORDREP_THREADS must be an integer, got {raw!r}") from None
    return max(n, 0)


def run_trials(jobs, threads=0):
    """Run ``_trial`` jobs, serially or in worker processes; results keep job order."""
    if threads <= 1:
        return [_trial(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_trial, jobs))


CURVE_HEADER = ("size", "run", "seed") + metrics.EvaluationReport.COLUMNS


def curve_rows(config, dataset, sizes, runs, base_seed, threads=0):
    """Per-run rows followed, for each size, by a ``mean`` row.

    Run ``i`` uses seed ``base_seed + i`` for both the split and the model.
    Means skip NaN entries (rank coefficients of constant predictions).
    """
    jobs = [(config, dataset, size, i, base_seed + i) for size in sizes for i in range(runs)]
    results = sorted(run_trials(jobs, threads), key=lambda r: (r[0], r[1]))
    rows, timings = [], []
    for size in sizes:
        block = [r for r in results if r[0] == size]
        for _, run, seed, row, elapsed in block:
            rows.append((size, run, seed) + tuple(row))
            timings.append((size, run, elapsed))
        cols = list(zip(*[r[3] for r in block]))
        means = []
        for values in cols[:-1]:
            finite = [v for v in values if not math.isnan(v)]
            means.append(math.fsum(finite) / len(finite) if finite else float("nan"))
        # every run at one size has the same test size
        n = set(cols[-1])
        means.append(n.pop() if len(n) == 1 else math.fsum(cols[-1]) / len(block))
        rows.append((size, "mean", "") + tuple(means))
    return rows, timings


def cmd_curve(args):
    values = _merge(args, list(HYPER) + ["data", "classes", "out", "sizes", "runs"])
    config = _experiment(values, seed_key=False)
    sizes = _parse_sizes(values.get("sizes") or RUN_DEFAULTS["sizes"])
    runs = int(values.get("runs") or RUN_DEFAULTS["runs"])
    base = int(values.get("seed") if values.get("seed") is not None else RUN_DEFAULTS["seed"])
    if runs < 1:
        raise UsageError("--runs must be at least 1")
    threads = _threads()
    dataset = _load_data(values.get("data"), _classes(values))
    if max(sizes) >= len(dataset) or min(sizes) < 1:
        raise UsageError(f"training sizes must lie in 1..{len(dataset) - 1}")
    started = time.perf_counter()
    log = _config_lines(config) + [f"sizes {sizes} runs {runs} base_seed {base} threads {threads}"]
    try:
        rows, timings = curve_rows(config, dataset, sizes, runs, base, threads)
    except Exception as err:
        _write_log(values.get("out"), log + [f"error {type(err).__name__}: {err}"])
        raise
    text = _write_rows(values.get("out"), CURVE_HEADER, rows)
    log += [f"trial size={s} run={r} seconds={t:.3f}" for s, r, t in timings]
    log.append(f"total_seconds {time.perf_counter() - started:.3f}")
    _write_log(values.get("out"), log)
    if not values.get("out"):
        sys.stdout.write(text)
    else:
        for r in rows:
            if r[1] == "mean":
                print(f"size {r[0]:>4}  mean mer {r[3]:.4f}  mae {r[4]:.4f}")
    return 0


def loocv_predictions(config, dataset):
    """Held-out prediction for every row, one training per row."""
    pred = np.empty(len(dataset), dtype=np.int64)
    for fold in loocv_folds(dataset):
        train, test = fold.apply(dataset)
        model = learners.train(config, train)
        pred[fold.test_indices] = model.predict(test.features)
    return pred


def cmd_loocv(args):
    values = _merge(args, list(HYPER) + ["data", "classes", "out"])
    config = _experiment(values)
    dataset = _load_data(values.get("data"), _classes(values))
    started = time.perf_counter()
    log = _config_lines(config) + [f"data rows={len(dataset)} K={dataset.num_classes}"]
    try:
        pred = loocv_predictions(config, dataset)
    except Exception as err:
        _write_log(values.get("out"), log + [f"error {type(err).__name__}: {err}"])
        raise
    report = metrics.evaluate(pred, dataset.labels)
    text = _write_rows(values.get("out"), metrics.EvaluationReport.COLUMNS, [report.row()])
    log += [f"trainings {len(dataset)}", f"seconds {time.perf_counter() - started:.3f}"]
    log.append("predictions " + " ".join(str(int(p)) for p in pred))
    _write_log(values.get("out"), log)
    sys.stdout.write(text)
    print()
    print(_table(report))
    return 0


COMMANDS = {"gen": cmd_gen, "train": cmd_train, "eval": cmd_eval,
            "curve": cmd_curve, "loocv": cmd_loocv}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return COMMANDS[args.command](args)
    except UsageError as err:
        parser.print_usage(sys.stderr)
        print(f"ordrep {args.command}: error: {err}", file=sys.stderr)
        return 2
    except Exception as err:
        print(f"ordrep {args.command}: {type(err).__name__}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

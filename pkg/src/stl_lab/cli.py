"""Command-line front-end: simulate, sample, train, predict, benchmark, sensitivity.

Exit codes: 0 success, 1 user/configuration error, 2 numerical failure.
Diagnostics go to stderr; data goes to files (or stdout where documented).
Reruns with identical flags and seed write byte-identical artifacts at any
thread count: BLAS is pinned to one thread here and all internal reductions
are index-ordered.
"""

from __future__ import annotations

import os

# Pin BLAS before numpy loads anywhere in this process: keeps CLI output
# byte-identical regardless of --threads.
for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .errors import NumericalError, StlLabError
from .grids import FrequencyGrid, band_average, default_bands, default_grid
from .modal import ModalTruncation
from .plate import AIR, fluid_from_json, plate_from_json
from .quadrature import QuadratureScheme
from .simulate import MODELS, stl_curve

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise StlLabError(f"file not found: {p}")
    return p


def _add_common(p: _Parser):
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("STL_LAB_THREADS", "1")),
        help="internal worker threads (default $STL_LAB_THREADS or 1)",
    )


def _add_grid(p: _Parser):
    p.add_argument("--grid-n", type=int, default=128, help="grid points (default 128)")
    p.add_argument("--grid-lo", type=float, default=50.0, help="lowest frequency Hz (default 50)")
    p.add_argument("--grid-hi", type=float, default=2500.0, help="highest frequency Hz (default 2500)")
    p.add_argument("--bands", action="store_true", help="one-third-octave band averaging (63-2000 Hz)")


def _add_quad(p: _Parser):
    p.add_argument("--n-theta", type=int, default=64, help="polar quadrature nodes (default 64)")
    p.add_argument("--n-phi", type=int, default=16, help="azimuth quadrature nodes (default 16)")
    p.add_argument("--theta-max-deg", type=float, default=90.0, help="polar cutoff in degrees (default 90)")


def _add_trunc(p: _Parser):
    p.add_argument("--freq-factor", type=float, default=3.0, help="modal truncation |w_mn| <= factor*w_max")
    p.add_argument("--max-m", type=int, default=40, help="modal index cap in x (default 40)")
    p.add_argument("--max-n", type=int, default=40, help="modal index cap in y (default 40)")


def _grid_of(args) -> FrequencyGrid:
    return default_grid(args.grid_n, args.grid_lo, args.grid_hi)


def _quad_of(args) -> QuadratureScheme:
    return QuadratureScheme(args.n_theta, args.n_phi, math.radians(args.theta_max_deg))


def _trunc_of(args) -> ModalTruncation:
    return ModalTruncation(args.max_m, args.max_n, args.freq_factor)


def _apply_threads(args) -> None:
    try:
        import numba

        numba.set_num_threads(max(1, min(args.threads, numba.config.NUMBA_NUM_THREADS)))
    except Exception:
        pass  # threading config is best-effort; results do not depend on it


def _cmd_simulate(args) -> int:
    plate_path = _require_file(args.plate)
    plate = plate_from_json(plate_path)
    fluid = fluid_from_json(_require_file(args.fluid)) if args.fluid else AIR
    _apply_threads(args)
    curve = stl_curve(args.model, plate, fluid, _grid_of(args), _quad_of(args), _trunc_of(args))
    if args.bands:
        curve = band_average(curve, default_bands())
    curve.write_csv(args.out)
    print(args.out)
    return 0


def _cmd_sample(args) -> int:
    from .dataset import DesignSpace, generate_dataset, save_dataset

    space = DesignSpace.from_json(_require_file(args.space))
    _apply_threads(args)
    ds = generate_dataset(
        model=args.model,
        space=space,
        n=args.n,
        seed=args.seed,
        grid=_grid_of(args),
        bands=default_bands() if args.bands else None,
        quad=_quad_of(args),
        trunc=_trunc_of(args),
    )
    save_dataset(ds, args.out)
    print(args.out)
    return 0


def _cmd_train(args) -> int:
    from .dataset import load_dataset
    from .preprocess import FeatureRecipe
    from .surrogates import default_spec, save_model, train

    ds = load_dataset(_require_file(args.data))
    _apply_threads(args)
    spec = default_spec(args.family, args.seed, ds.meta.get("model"))
    model = train(spec, ds.X, ds.Y, FeatureRecipe(args.recipe), ds.meta)
    save_model(model, args.out)
    print(args.out)
    return 0


def _cmd_predict(args) -> int:
    from .dataset import VARIABLES
    from .surrogates import load_model, predict

    model_path = _require_file(args.model)
    data_path = _require_file(args.data)
    model = load_model(model_path)
    with open(data_path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        if header[: len(VARIABLES)] != list(VARIABLES):
            raise StlLabError(f"{data_path}: first columns must be {','.join(VARIABLES)}")
        rows = [line.rstrip("\n").split(",")[: len(VARIABLES)] for line in fh if line.strip()]
    x = np.array([[float(v) for v in row] for row in rows])
    _apply_threads(args)
    pred = predict(model, x)
    freqs = model.grid_meta.get("frequencies")
    labels = (
        [f"STL@{float(f)!r}" for f in freqs]
        if freqs and len(freqs) == pred.shape[1]
        else [f"y{j}" for j in range(pred.shape[1])]
    )
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(labels) + "\n")
        for row in pred:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    print(args.out)
    return 0


def _cmd_benchmark(args) -> int:
    from .dataset import load_dataset
    from .evaluation import benchmark

    paths = [_require_file(p) for p in args.data]
    datasets = {}
    for p in paths:
        ds = load_dataset(p)
        datasets[p.stem] = ds
    _apply_threads(args)
    report = benchmark(
        datasets,
        families=args.families.split(","),
        recipes=args.recipes.split(","),
        sizes=[int(s) for s in args.sizes.split(",")],
        k=args.cv,
        seed=args.seed,
    )
    report.to_json(args.report)
    if args.csv:
        report.to_csv(args.csv)
    print(args.report)
    return 0


def _cmd_sensitivity(args) -> int:
    from .dataset import load_dataset
    from .preprocess import FeatureRecipe
    from .sensitivity import importance_map

    ds = load_dataset(_require_file(args.data))
    _apply_threads(args)
    imap = importance_map(ds, FeatureRecipe(args.recipe), n_trees=args.trees, seed=args.seed)
    imap.write_csv(args.out)
    print(args.out)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="stl-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="STL curve for one plate design")
    p.add_argument("--model", choices=MODELS, required=True)
    p.add_argument("--plate", required=True, help="plate JSON (rho, E, nu, eta_percent, h_mm, a, b)")
    p.add_argument("--fluid", default=None, help="optional fluid JSON (rho0, c0); default air")
    p.add_argument("--out", required=True, help="output curve CSV")
    _add_grid(p)
    _add_quad(p)
    _add_trunc(p)
    _add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sample", help="generate an LHS dataset against a simulator")
    p.add_argument("--space", required=True, help="design-space JSON")
    p.add_argument("--model", choices=MODELS, required=True)
    p.add_argument("--n", type=int, required=True, help="number of designs")
    p.add_argument("--out", required=True, help="output dataset CSV (+ .meta.json sidecar)")
    _add_grid(p)
    _add_quad(p)
    _add_trunc(p)
    _add_common(p)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("train", help="train one surrogate on a dataset")
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--family", choices=("nn", "gpr", "rf", "gbt"), required=True)
    p.add_argument("--recipe", choices=("base", "physics", "physics_r"), default="base")
    p.add_argument("--out", required=True, help="output model JSON")
    _add_common(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="predict STL for designs with a saved model")
    p.add_argument("--model", required=True, help="model JSON from train")
    p.add_argument("--data", required=True, help="CSV whose first 7 columns are rho,E,nu,eta,h,a,b")
    p.add_argument("--out", required=True, help="output prediction CSV")
    _add_common(p)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("benchmark", help="cross-validated accuracy/timing cross product")
    p.add_argument("--data", action="append", required=True, help="dataset CSV (repeatable)")
    p.add_argument("--families", default="nn,gpr,rf,gbt")
    p.add_argument("--recipes", default="base,physics,physics_r")
    p.add_argument("--sizes", default="2000")
    p.add_argument("--cv", type=int, default=5, help="number of folds (default 5)")
    p.add_argument("--report", required=True, help="output report JSON")
    p.add_argument("--csv", default=None, help="optional flat CSV report")
    _add_common(p)
    p.set_defaults(func=_cmd_benchmark)

    p = sub.add_parser("sensitivity", help="per-frequency MDI importance map")
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--recipe", choices=("base", "physics", "physics_r"), default="base")
    p.add_argument("--trees", type=int, default=200, help="trees per frequency (default 200)")
    p.add_argument("--out", required=True, help="output heatmap CSV")
    _add_common(p)
    p.set_defaults(func=_cmd_sensitivity)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"stl-lab: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (StlLabError, OSError) as exc:
        print(f"stl-lab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

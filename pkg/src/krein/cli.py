"""Command-line harness: sample/label hyperbolic datasets, train and score
learners over a disc grid, decompose Gram matrices, and run profile
diagnostics. Emits CSV point/grid data and JSON reports for external
plotting.

Subcommands: gen, run, decompose, diagnose. Exit codes: 0 success, 1 runtime
failure, 2 usage or parse error. The environment variable KREIN_LOG
(debug|info|quiet) controls logging verbosity on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, KreinError
from .geometry import (
    GeodesicBoundary,
    HyperboloidPoint,
    PoincarePoint,
    _riemannian_gaussian_coords,
    poincare_to_hyperboloid,
)
from .harmonic import (
    CosineSeries,
    circle_cosine_coeffs,
    eval_series,
    gaussian_circle_profile,
    legendre_coeffs,
    wiener_tail,
)
from .kernels import KernelExpr, gram, kernel_from_json
from .krein_linalg import (
    default_tol,
    finite_pd_decompose,
    inertia,
    sym_eigh,
)
from .learners import (
    LabeledDataset,
    accuracy,
    decision_scores,
    krr_fit,
    ksvm_fit,
)

LOG = logging.getLogger("krein")

_CONFIG_KEYS = {"version", "space", "classes", "boundaries", "kernel", "learner", "seed", "grid"}
_CLASS_KEYS = {"center", "sigma", "count"}
_BOUNDARY_KEYS = {"normal", "offset"}
_LEARNER_KEYS = {"type", "c", "box"}
_GRID_KEYS = {"resolution", "radius"}


def _setup_logging():
    level = {"debug": logging.DEBUG, "info": logging.INFO, "quiet": logging.CRITICAL}.get(
        os.environ.get("KREIN_LOG", "info").lower(), logging.INFO
    )
    logging.basicConfig(stream=sys.stderr, level=level, format="%(message)s")


# ---------------------------------------------------------------------------
# Deterministic serialization: floats at 17 significant digits, sorted keys.


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def dumps_canonical(obj) -> str:
    """Deterministic JSON text: sorted keys, LF lines, floats at 17 digits."""

    def render(node, pad: str) -> str:
        inner = pad + "  "
        if isinstance(node, dict):
            if not node:
                return "{}"
            items = (
                f"{inner}{json.dumps(str(key))}: {render(node[key], inner)}"
                for key in sorted(node)
            )
            return "{\n" + ",\n".join(items) + "\n" + pad + "}"
        if isinstance(node, (list, tuple, np.ndarray)):
            seq = list(node)
            if not seq:
                return "[]"
            return "[\n" + ",\n".join(inner + render(v, inner) for v in seq) + "\n" + pad + "]"
        if isinstance(node, bool) or isinstance(node, np.bool_):
            return "true" if node else "false"
        if isinstance(node, (int, np.integer)):
            return str(int(node))
        if isinstance(node, (float, np.floating)):
            return format_float(node)
        if node is None:
            return "null"
        return json.dumps(str(node))

    return render(obj, "") + "\n"


def _write_text(path: str, text: str):
    with open(path, "w", newline="\n") as handle:
        handle.write(text)


def _write_csv(path: str, header: str, rows):
    lines = [header]
    lines.extend(rows)
    _write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Experiment configuration


@dataclass(frozen=True)
class ExperimentConfig:
    space: str
    classes: tuple
    boundaries: tuple
    kernel: KernelExpr
    learner_type: str
    learner_param: float
    seed: int
    grid_resolution: int
    grid_radius: float


PRESETS = {
    # two offset classes, one diameter boundary: the soft-margin showcase
    "default": {
        "version": 1,
        "space": "hyperbolic-2",
        "classes": [
            {"center": [-0.2, 0.0], "sigma": 0.6, "count": 200},
            {"center": [0.2, 0.0], "sigma": 0.6, "count": 200},
        ],
        "boundaries": [{"normal": [0.0, 0.0, 1.0], "offset": 0.0}],
        "kernel": {
            "type": "geodesic-gaussian",
            "params": {"space": "hyperbolic", "lambda": 1.0},
            "children": [],
        },
        "learner": {"type": "ksvm", "box": 10.0},
        "seed": 7,
        "grid": {"resolution": 40, "radius": 0.95},
    },
    # one origin-centered cloud split by a diameter
    "disc-200-diameter": {
        "version": 1,
        "space": "hyperbolic-2",
        "classes": [{"center": [0.0, 0.0], "sigma": 0.6, "count": 200}],
        "boundaries": [{"normal": [0.0, 0.0, 1.0], "offset": 0.0}],
        "kernel": {
            "type": "geodesic-gaussian",
            "params": {"space": "hyperbolic", "lambda": 1.0},
            "children": [],
        },
        "learner": {"type": "ksvm", "box": 10.0},
        "seed": 7,
        "grid": {"resolution": 40, "radius": 0.95},
    },
    # one origin-centered cloud split by an off-center geodesic arc
    "disc-200-offset": {
        "version": 1,
        "space": "hyperbolic-2",
        "classes": [{"center": [0.0, 0.0], "sigma": 0.6, "count": 200}],
        "boundaries": [{"normal": [0.0, 1.0, 0.0], "offset": 0.3}],
        "kernel": {
            "type": "geodesic-gaussian",
            "params": {"space": "hyperbolic", "lambda": 1.0},
            "children": [],
        },
        "learner": {"type": "ksvm", "box": 10.0},
        "seed": 7,
        "grid": {"resolution": 40, "radius": 0.95},
    },
    # a larger cloud against the majority vote of two geodesics
    "disc-500-two-boundaries": {
        "version": 1,
        "space": "hyperbolic-2",
        "classes": [{"center": [0.0, 0.0], "sigma": 0.75, "count": 500}],
        "boundaries": [
            {"normal": [0.0, 0.0, 1.0], "offset": 0.0},
            {"normal": [0.0, 1.0, 0.0], "offset": 0.0},
        ],
        "kernel": {
            "type": "geodesic-gaussian",
            "params": {"space": "hyperbolic", "lambda": 1.0},
            "children": [],
        },
        "learner": {"type": "ksvm", "box": 10.0},
        "seed": 7,
        "grid": {"resolution": 40, "radius": 0.95},
    },
}


def _require_keys(doc: dict, allowed: set, what: str):
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown {what} fields: {sorted(unknown)}")


def validate_config(doc) -> ExperimentConfig:
    """Check an experiment document and build the validated configuration."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    _require_keys(doc, _CONFIG_KEYS, "configuration")
    if doc.get("version") != 1:
        raise ConfigError("configuration must declare version: 1")
    space = doc.get("space", "hyperbolic-2")
    if space not in ("hyperbolic-2", "euclidean-2"):
        raise ConfigError(f"unsupported space {space!r}")

    classes = doc.get("classes")
    if not isinstance(classes, list) or not classes:
        raise ConfigError("classes must be a nonempty list")
    parsed_classes = []
    for entry in classes:
        if not isinstance(entry, dict):
            raise ConfigError("each class must be an object")
        _require_keys(entry, _CLASS_KEYS, "class")
        try:
            center = [float(v) for v in entry["center"]]
            sigma = float(entry["sigma"])
            count = int(entry["count"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed class entry: {entry!r}") from exc
        if len(center) != 2:
            raise ConfigError("class centers must have two coordinates")
        if sigma <= 0.0:
            raise ConfigError("class sigma must be positive")
        if count < 1:
            raise ConfigError("class count must be >= 1")
        if space == "hyperbolic-2" and float(np.linalg.norm(center)) >= 1.0:
            raise ConfigError("hyperbolic class centers are Poincare points (norm < 1)")
        parsed_classes.append({"center": center, "sigma": sigma, "count": count})

    boundaries = doc.get("boundaries")
    if not isinstance(boundaries, list) or not boundaries:
        raise ConfigError("boundaries must be a nonempty list")
    parsed_boundaries = []
    for entry in boundaries:
        if not isinstance(entry, dict):
            raise ConfigError("each boundary must be an object")
        _require_keys(entry, _BOUNDARY_KEYS, "boundary")
        try:
            normal = np.asarray([float(v) for v in entry["normal"]], dtype=float)
            offset = float(entry.get("offset", 0.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed boundary entry: {entry!r}") from exc
        if space == "hyperbolic-2":
            if normal.shape != (3,):
                raise ConfigError("hyperbolic boundary normals have three coordinates")
            try:
                parsed_boundaries.append(GeodesicBoundary(normal=normal, offset=offset))
            except KreinError as exc:
                raise ConfigError(f"invalid boundary: {exc}") from exc
        else:
            if normal.shape != (2,) or not np.any(normal != 0.0):
                raise ConfigError("euclidean boundary normals are nonzero 2-vectors")
            parsed_boundaries.append((normal, offset))

    kernel_doc = doc.get("kernel")
    if kernel_doc is None:
        raise ConfigError("configuration must include a kernel document")
    try:
        kernel = kernel_from_json(kernel_doc)
    except KreinError as exc:
        raise ConfigError(f"invalid kernel: {exc}") from exc
    expected_space = "hyperbolic" if space == "hyperbolic-2" else "euclidean"
    if kernel.space != expected_space:
        raise ConfigError(
            f"kernel space {kernel.space!r} does not match experiment space {space!r}"
        )

    learner = doc.get("learner")
    if not isinstance(learner, dict):
        raise ConfigError("learner must be an object")
    _require_keys(learner, _LEARNER_KEYS, "learner")
    ltype = learner.get("type")
    if ltype == "krr":
        if "c" not in learner or "box" in learner:
            raise ConfigError("krr learners take a single parameter c")
        param = float(learner["c"])
        if param == 0.0:
            raise ConfigError("krr parameter c must be nonzero")
    elif ltype == "ksvm":
        if "box" not in learner or "c" in learner:
            raise ConfigError("ksvm learners take a single parameter box")
        param = float(learner["box"])
        if param <= 0.0:
            raise ConfigError("ksvm box must be positive")
    else:
        raise ConfigError(f"unknown learner type {ltype!r}")

    seed = doc.get("seed")
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")

    grid = doc.get("grid", {"resolution": 40, "radius": 0.95})
    if not isinstance(grid, dict):
        raise ConfigError("grid must be an object")
    _require_keys(grid, _GRID_KEYS, "grid")
    try:
        resolution = int(grid.get("resolution", 40))
        radius = float(grid.get("radius", 0.95))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed grid entry: {grid!r}") from exc
    if resolution < 1:
        raise ConfigError("grid resolution must be >= 1")
    if space == "hyperbolic-2" and not (0.0 < radius < 1.0):
        raise ConfigError("grid radius must lie in (0, 1) on the Poincare disc")
    if space == "euclidean-2" and radius <= 0.0:
        raise ConfigError("grid radius must be positive")

    return ExperimentConfig(
        space=space,
        classes=tuple(parsed_classes),
        boundaries=tuple(parsed_boundaries),
        kernel=kernel,
        learner_type=ltype,
        learner_param=param,
        seed=seed,
        grid_resolution=resolution,
        grid_radius=radius,
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc
    return validate_config(doc)


# ---------------------------------------------------------------------------
# Dataset generation and the experiment pipeline


def _majority_label_hyperbolic(coords: np.ndarray, boundaries) -> np.ndarray:
    votes = np.zeros(coords.shape[0])
    for boundary in boundaries:
        signs = np.ones(coords.shape[0])
        values = coords @ (boundary.normal * np.array([1.0, -1.0, -1.0])) - boundary.offset
        signs[values < 0.0] = -1.0
        votes += signs
    return np.where(votes >= 0.0, 1.0, -1.0)


def _poincare_center(center) -> HyperboloidPoint:
    return poincare_to_hyperboloid(PoincarePoint(np.asarray(center, dtype=float)))


def _majority_label_euclidean(coords: np.ndarray, boundaries) -> np.ndarray:
    votes = np.zeros(coords.shape[0])
    for normal, offset in boundaries:
        values = coords @ normal - offset
        votes += np.where(values >= 0.0, 1.0, -1.0)
    return np.where(votes >= 0.0, 1.0, -1.0)


def gen_dataset(config: ExperimentConfig):
    """Sample the configured class mixture and label it by the boundaries.

    Returns (dataset, plane_coords, labels): the dataset holds space points;
    plane_coords are the 2-d coordinates written to CSV (Poincare disc
    coordinates for hyperbolic experiments).
    """
    plane_rows = []
    points = []
    if config.space == "hyperbolic-2":
        all_coords = []
        for index, cls in enumerate(config.classes):
            center = _poincare_center(cls["center"])
            coords = _riemannian_gaussian_coords(
                center, cls["sigma"], cls["count"], config.seed + index
            )
            all_coords.append(coords)
        coords = np.vstack(all_coords)
        labels = _majority_label_hyperbolic(coords, config.boundaries)
        plane = coords[:, 1:] / (1.0 + coords[:, :1])
        points = [HyperboloidPoint(row) for row in coords]
    else:
        blocks = []
        for index, cls in enumerate(config.classes):
            rng = np.random.default_rng(config.seed + index)
            blocks.append(
                rng.normal(loc=cls["center"], scale=cls["sigma"], size=(cls["count"], 2))
            )
        plane = np.vstack(blocks)
        labels = _majority_label_euclidean(plane, config.boundaries)
        points = [row for row in plane]
    dataset = LabeledDataset(points=tuple(points), targets=labels)
    for row, label in zip(plane, labels):
        plane_rows.append(
            f"{format_float(row[0])},{format_float(row[1])},{int(label)}"
        )
    return dataset, plane, plane_rows


def _grid_points(config: ExperimentConfig):
    """Polar grid of resolution^2 points inside the configured radius."""
    res = config.grid_resolution
    radii = config.grid_radius * (np.arange(1, res + 1) / res)
    angles = 2.0 * np.pi * np.arange(res) / res
    rr, aa = np.meshgrid(radii, angles, indexing="ij")
    plane = np.column_stack([(rr * np.cos(aa)).ravel(), (rr * np.sin(aa)).ravel()])
    if config.space == "hyperbolic-2":
        n2 = np.sum(plane**2, axis=1, keepdims=True)
        coords = np.hstack([(1.0 + n2), 2.0 * plane]) / (1.0 - n2)
        points = [HyperboloidPoint(row) for row in coords]
    else:
        points = [row for row in plane]
    return plane, points


def run_experiment(config: ExperimentConfig, out_dir: str) -> dict:
    """Generate data, train the configured learner, score the disc grid, and
    write dataset.csv, grid.csv and report.json into `out_dir`."""
    started = time.perf_counter()
    os.makedirs(out_dir, exist_ok=True)
    dataset, _, dataset_rows = gen_dataset(config)
    dataset_path = os.path.join(out_dir, "dataset.csv")
    _write_csv(dataset_path, "px,py,label", dataset_rows)
    LOG.info("wrote %s (%d points)", dataset_path, len(dataset))

    if config.learner_type == "krr":
        model = krr_fit(config.kernel, dataset, config.learner_param)
    else:
        model = ksvm_fit(config.kernel, dataset, config.learner_param)
    train_accuracy = accuracy(model, dataset)

    gram_entries = gram(config.kernel, dataset.points).entries
    spectrum = sym_eigh(gram_entries)
    gram_inertia = inertia(spectrum, default_tol(gram_entries))

    plane, grid_pts = _grid_points(config)
    scores = decision_scores(model, grid_pts)
    grid_path = os.path.join(out_dir, "grid.csv")
    _write_csv(
        grid_path,
        "px,py,score",
        (
            f"{format_float(p[0])},{format_float(p[1])},{format_float(s)}"
            for p, s in zip(plane, scores)
        ),
    )

    alpha_scale = float(np.max(np.abs(model.alpha))) if len(model.alpha) else 0.0
    n_support = int(np.sum(np.abs(model.alpha) > 1e-12 * max(1.0, alpha_scale)))
    report = {
        "train_accuracy": train_accuracy,
        "n_support": n_support,
        "gram_inertia": {
            "n_plus": gram_inertia.n_plus,
            "n_minus": gram_inertia.n_minus,
            "n_zero": gram_inertia.n_zero,
            "tol": gram_inertia.tol,
        },
        "wall_time_ms": int(round((time.perf_counter() - started) * 1000.0)),
        "output_paths": [dataset_path, grid_path],
    }
    report_path = os.path.join(out_dir, "report.json")
    report["output_paths"].append(report_path)
    _write_text(report_path, dumps_canonical(report))
    LOG.info("train accuracy %.4f, inertia (%d, %d, %d)", train_accuracy,
             gram_inertia.n_plus, gram_inertia.n_minus, gram_inertia.n_zero)
    return report


# ---------------------------------------------------------------------------
# decompose and diagnose


def _read_matrix_csv(path: str) -> np.ndarray:
    try:
        with open(path) as handle:
            rows = [line.strip() for line in handle if line.strip()]
        parsed = [[float(cell) for cell in row.split(",")] for row in rows]
    except OSError as exc:
        raise ConfigError(f"cannot read matrix {path!r}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"matrix {path!r} is not numeric CSV: {exc}") from exc
    if not parsed:
        raise ConfigError(f"matrix {path!r} is empty")
    width = len(parsed[0])
    if any(len(row) != width for row in parsed):
        raise ConfigError(f"matrix {path!r} is ragged")
    mat = np.asarray(parsed, dtype=float)
    if mat.shape[0] != mat.shape[1]:
        raise ConfigError(f"matrix {path!r} is not square: shape {mat.shape}")
    if float(np.linalg.norm(mat - mat.T)) > 1e-10 * float(np.linalg.norm(mat)):
        raise ConfigError(f"matrix {path!r} is not symmetric")
    return mat


def _matrix_rows(mat: np.ndarray):
    return (",".join(format_float(v) for v in row) for row in mat)


def run_decompose(matrix_path: str, tol: float | None, out_dir: str) -> dict:
    """Split a symmetric CSV matrix into PSD parts and report the inertia."""
    mat = _read_matrix_csv(matrix_path)
    os.makedirs(out_dir, exist_ok=True)
    spectrum = sym_eigh(mat)
    used_tol = default_tol(mat) if tol is None else float(tol)
    counts = inertia(spectrum, used_tol)
    decomposition = finite_pd_decompose(mat, used_tol)
    recon = decomposition.k_plus - decomposition.k_minus
    scale = float(np.linalg.norm(mat))
    rel_error = float(np.linalg.norm(mat - recon)) / max(scale, 1e-300)
    plus_path = os.path.join(out_dir, "k_plus.csv")
    minus_path = os.path.join(out_dir, "k_minus.csv")
    _write_text(plus_path, "\n".join(_matrix_rows(decomposition.k_plus)) + "\n")
    _write_text(minus_path, "\n".join(_matrix_rows(decomposition.k_minus)) + "\n")
    report = {
        "inertia": {
            "n_plus": counts.n_plus,
            "n_minus": counts.n_minus,
            "n_zero": counts.n_zero,
            "tol": counts.tol,
        },
        "reconstruction_error": rel_error,
        "min_eig_plus": float(sym_eigh(decomposition.k_plus).eigenvalues[-1]),
        "min_eig_minus": float(sym_eigh(decomposition.k_minus).eigenvalues[-1]),
        "output_paths": [plus_path, minus_path],
    }
    report_path = os.path.join(out_dir, "decompose_report.json")
    report["output_paths"].append(report_path)
    _write_text(report_path, dumps_canonical(report))
    return report


def run_diagnose(args) -> dict:
    """Expand a named profile, split it by sign, and report the certificate."""
    k_max = args.k_max
    nodes = args.nodes if args.nodes is not None else 4 * (k_max + 1)
    if args.profile == "gaussian-circle":
        if args.lam is None:
            raise ConfigError("gaussian-circle requires --lam")
        profile = gaussian_circle_profile(args.lam)
        series = circle_cosine_coeffs(profile, k_max, nodes)
        grid = np.linspace(-np.pi, np.pi, 1000)
        recon_err = float(np.max(np.abs(eval_series(series, grid) - profile(grid))))
        name = {"name": "gaussian-circle", "lambda": args.lam}
        coeffs = series.a
    elif args.profile == "tanh-sphere":
        if args.a is None or args.b is None:
            raise ConfigError("tanh-sphere requires --a and --b")
        profile = lambda t: np.tanh(args.a * t + args.b)
        series = legendre_coeffs(profile, k_max, nodes)
        grid = np.linspace(-1.0, 1.0, 1000)
        recon_err = float(np.max(np.abs(eval_series(series, grid) - profile(grid))))
        name = {"name": "tanh-sphere", "a": args.a, "b": args.b}
        coeffs = series.c
    elif args.profile == "series":
        if not args.coeffs:
            raise ConfigError("series requires --coeffs")
        try:
            values = np.asarray([float(v) for v in args.coeffs.split(",")], dtype=float)
        except ValueError as exc:
            raise ConfigError(f"--coeffs must be comma-separated numbers: {exc}") from exc
        series = CosineSeries(a=values, k_max=values.size - 1, quadrature_nodes=0)
        k_max = series.k_max
        recon_err = 0.0
        name = {"name": "series"}
        coeffs = series.a
    else:
        raise ConfigError(f"unknown profile {args.profile!r}")

    tail_k0 = args.tail_k0 if args.tail_k0 is not None else k_max // 2
    abs_sum, tail_fraction = wiener_tail(series, tail_k0)
    min_index = int(np.argmin(coeffs))
    report = {
        "profile": name,
        "K_max": k_max,
        "nodes": series.quadrature_nodes,
        "coefficients": coeffs.tolist(),
        "min_coefficient": float(coeffs[min_index]),
        "min_index": min_index,
        "abs_sum": abs_sum,
        "tail_fraction": tail_fraction,
        "reconstruction_max_error": recon_err,
        "pd_certificate": bool(coeffs[min_index] >= 0.0),
    }
    return report


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="krein",
        description="Krein-space learning and positive-decomposition diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p):
        p.add_argument("--config", help="path to a JSON experiment configuration")
        p.add_argument("--preset", choices=sorted(PRESETS), help="bundled configuration")
        p.add_argument("--out-dir", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")

    gen = sub.add_parser("gen", help="sample and label a dataset")
    add_config_flags(gen)

    run = sub.add_parser("run", help="generate data, train, and score the disc grid")
    add_config_flags(run)

    dec = sub.add_parser("decompose", help="split a symmetric CSV matrix into PSD parts")
    dec.add_argument("matrix", help="path to a square symmetric CSV matrix (no header)")
    dec.add_argument("--tol", type=float, default=None, help="zero-eigenvalue tolerance")
    dec.add_argument("--out-dir", default=".", help="output directory")

    dia = sub.add_parser("diagnose", help="expand a kernel profile and report sign data")
    dia.add_argument("--profile", required=True, choices=["gaussian-circle", "tanh-sphere", "series"])
    dia.add_argument("--lam", "--lambda", dest="lam", type=float, default=None)
    dia.add_argument("--a", type=float, default=None)
    dia.add_argument("--b", type=float, default=None)
    dia.add_argument("--coeffs", default=None, help="comma-separated series coefficients")
    dia.add_argument("--k-max", type=int, default=200)
    dia.add_argument("--nodes", type=int, default=None)
    dia.add_argument("--tail-k0", type=int, default=None)
    dia.add_argument("--out-dir", default=None, help="also write the report here")
    return parser


def _resolve_config(args) -> ExperimentConfig:
    if bool(args.config) == bool(args.preset):
        raise ConfigError("provide exactly one of --config or --preset")
    if args.config:
        config = load_config(args.config)
    else:
        config = validate_config(PRESETS[args.preset])
    if args.seed is not None:
        config = ExperimentConfig(
            space=config.space,
            classes=config.classes,
            boundaries=config.boundaries,
            kernel=config.kernel,
            learner_type=config.learner_type,
            learner_param=config.learner_param,
            seed=args.seed,
            grid_resolution=config.grid_resolution,
            grid_radius=config.grid_radius,
        )
    return config


def main(argv=None) -> int:
    _setup_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            config = _resolve_config(args)
            os.makedirs(args.out_dir, exist_ok=True)
            _, _, rows = gen_dataset(config)
            path = os.path.join(args.out_dir, "dataset.csv")
            _write_csv(path, "px,py,label", rows)
            print(path)
        elif args.command == "run":
            config = _resolve_config(args)
            report = run_experiment(config, args.out_dir)
            print(dumps_canonical(report), end="")
        elif args.command == "decompose":
            report = run_decompose(args.matrix, args.tol, args.out_dir)
            print(dumps_canonical(report), end="")
        elif args.command == "diagnose":
            report = run_diagnose(args)
            text = dumps_canonical(report)
            if args.out_dir is not None:
                os.makedirs(args.out_dir, exist_ok=True)
                _write_text(os.path.join(args.out_dir, "diagnose_report.json"), text)
            print(text, end="")
    except ConfigError as exc:
        print(f"error: config: {exc}".replace("\n", " "), file=sys.stderr)
        return 2
    except KreinError as exc:
        print(f"error: {exc}".replace("\n", " "), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

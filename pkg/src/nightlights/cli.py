"""Command line interface.

One subcommand per correction plus the regression utilities and a config
driven pipeline.  Output files are written atomically (temp file + rename)
and depend only on inputs and flags, so a rerun is byte-identical.  Summary
lines go to stdout; run metadata (backend, timing) goes to stderr.  Domain
errors exit 1, usage errors exit 2.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import _kernels
from .deblooming import (
    BloomModel,
    PseudoPixelPolicy,
    apply_debloom,
    detect_pseudo_light,
    fit_bloom_model,
)
from .desaturation import (
    SampleSelectionPolicy,
    apply_desaturation,
    detect_saturated,
    fit_saturation_model,
    select_saturation_samples,
)
from .econometrics import (
    AnnualSeries,
    evaluate,
    fit_gdp_model,
    index_to_base,
    predict_gdp,
    read_series,
    report_to_text,
    series_to_text,
)
from .errors import NightlightsError
from .intercalibration import apply_intercalibration, fit_intercalibration
from .raster import extract_pairs, grid_to_text, read_grid, read_mask, sum_of_lights
from .svgplot import scatter_svg
from .synth import SceneSpec, forward_bloom, forward_intercal, forward_saturate, gen_scene

_PIPELINE_KEYS = {
    "outdir", "pending", "reference", "invariant_mask", "intercalibrate",
    "radiance", "saturation", "bloom", "statistic", "gdp_csv", "base_year",
}


def _atomic_write(path, text: str) -> None:
    """Write text to path via a temp file in the same directory, then rename."""
    import os
    import tempfile

    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _fmt(value: float) -> str:
    """Fixed six decimals with trailing zeros trimmed ('10.000000' -> '10')."""
    s = f"{float(value):.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("", "-0") else s


def _load_json(path, what: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise NightlightsError(f"{what} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise NightlightsError(f"{what} must be a JSON object")
    return doc


# ---------------------------------------------------------------------------
# correction stages, shared by the subcommands and the pipeline
# ---------------------------------------------------------------------------

def _run_intercal(pending, reference, mask):
    pairs = extract_pairs(pending, reference, mask)
    model = fit_intercalibration(pairs)
    corrected = apply_intercalibration(pending, model)
    line = f"intercalibration: a={model.a:.12g} b={model.b:.12g} n={pairs.shape[0]}"
    return model, corrected, line


def _run_desaturate(ntl, radiance, threshold, policy):
    saturated = detect_saturated(ntl, threshold)
    nsat = int(np.count_nonzero(saturated.bits))
    if nsat == 0:
        return None, ntl, f"desaturation: no saturated cells (threshold {threshold:g})"
    samples = select_saturation_samples(ntl, radiance, saturated, policy)
    model = fit_saturation_model(samples)
    corrected = apply_desaturation(ntl, radiance, saturated, model)
    line = (
        f"desaturation: a={model.a:.12g} b={model.b:.12g} "
        f"samples={samples.shape[0]} saturated={nsat}"
    )
    return model, corrected, line


def _run_debloom(grid, radius, policy):
    pseudo = detect_pseudo_light(grid, policy)
    model = fit_bloom_model(grid, pseudo, radius, emitter_min_dn=policy.pseudo_max_dn)
    corrected = apply_debloom(grid, model, emitter_min_dn=policy.pseudo_max_dn)
    npseudo = int(np.count_nonzero(pseudo.bits))
    line = f"deblooming: a={model.a:.12g} b={model.b:.12g} radius={radius} pseudo={npseudo}"
    return model, corrected, line


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_intercalibrate(args) -> int:
    pending = read_grid(args.pending)
    reference = read_grid(args.reference)
    mask = read_mask(args.mask)
    model, corrected, line = _run_intercal(pending, reference, mask)
    _atomic_write(args.out, grid_to_text(corrected))
    if args.model_out:
        _atomic_write(args.model_out, json.dumps({"a": model.a, "b": model.b}, sort_keys=True) + "\n")
    print(line)
    return 0


def _cmd_desaturate(args) -> int:
    ntl = read_grid(args.ntl)
    radiance = read_grid(args.radiance)
    policy = SampleSelectionPolicy(
        max_abs_diff_quantile=args.quantile, min_radiance=args.min_radiance
    )
    model, corrected, line = _run_desaturate(ntl, radiance, args.threshold, policy)
    _atomic_write(args.out, grid_to_text(corrected))
    if args.model_out and model is not None:
        _atomic_write(args.model_out, json.dumps({"a": model.a, "b": model.b}, sort_keys=True) + "\n")
    print(line)
    return 0


def _cmd_debloom(args) -> int:
    grid = read_grid(args.grid)
    policy = PseudoPixelPolicy(
        background_max=args.background_max,
        pseudo_max_dn=args.pseudo_max,
        min_background_neighbors=args.min_bg_neighbors,
    )
    model, corrected, line = _run_debloom(grid, args.radius, policy)
    _atomic_write(args.out, grid_to_text(corrected))
    if args.model_out:
        _atomic_write(
            args.model_out,
            json.dumps({"a": model.a, "b": model.b, "radius": model.radius}, sort_keys=True) + "\n",
        )
    print(line)
    return 0


def _cmd_sol(args) -> int:
    grid = read_grid(args.grid)
    mask = read_mask(args.mask) if args.mask else None
    print(_fmt(sum_of_lights(grid, mask)))
    return 0


def _cmd_regress(args) -> int:
    lights = read_series(args.lights)
    gdp = read_series(args.gdp)
    model = fit_gdp_model(lights, gdp)
    report = evaluate(model, lights, gdp)
    _atomic_write(args.out, report_to_text(report))
    if args.model_out:
        _atomic_write(
            args.model_out,
            json.dumps(
                {"beta0": model.beta0, "beta1": model.beta1, "r2": model.fit.r2},
                sort_keys=True,
            ) + "\n",
        )
    if args.svg:
        from .econometrics import align

        aligned = align(lights, gdp)
        _atomic_write(
            args.svg,
            scatter_svg(
                [l for _, l, _ in aligned],
                [g for _, _, g in aligned],
                model.beta1,
                model.beta0,
                xlabel="lights",
                ylabel="GDP",
                title="GDP vs lights",
            ),
        )
    print(
        f"regression: beta0={model.beta0:.12g} beta1={model.beta1:.12g} "
        f"r2={model.fit.r2:.12g} n={len(report.rows)} mse={report.mse:.12g}"
    )
    return 0


def _cmd_predict(args) -> int:
    doc = _load_json(args.model, "model file")
    try:
        beta0, beta1 = float(doc["beta0"]), float(doc["beta1"])
    except (KeyError, TypeError, ValueError):
        raise NightlightsError("model file must contain numeric beta0 and beta1") from None
    print(_fmt(beta0 + beta1 * args.light))
    return 0


def _cmd_index(args) -> int:
    series = read_series(args.series)
    indexed = index_to_base(series, args.base_year)
    _atomic_write(args.out, series_to_text(indexed))
    print(f"indexed {len(indexed)} years to base {args.base_year}")
    return 0


def _cmd_synth(args) -> int:
    doc = _load_json(args.spec, "scene spec")
    blocks = {k: doc.pop(k) for k in ("bloom", "saturate", "intercal") if k in doc}
    scene = gen_scene(SceneSpec.from_doc(doc))
    try:
        if "bloom" in blocks:
            blk = blocks["bloom"]
            scene = forward_bloom(scene, float(blk["a"]), float(blk["b"]), int(blk["radius"]))
        if "saturate" in blocks:
            blk = blocks["saturate"]
            scene = forward_saturate(
                scene, float(blk["a"]), float(blk["b"]), float(blk.get("cap", 63.0))
            )
        if "intercal" in blocks:
            blk = blocks["intercal"]
            scene = forward_intercal(scene, float(blk["a"]), float(blk["b"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise NightlightsError(f"scene spec forward block malformed: {exc}") from None
    _atomic_write(args.out, grid_to_text(scene))
    print(f"scene {scene.nrows}x{scene.ncols} sources={len(doc.get('sources', []))}")
    return 0


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

def _pipeline_entries(doc) -> list[dict]:
    raw = doc.get("pending")
    if not raw or not isinstance(raw, list):
        raise NightlightsError("pipeline config needs a non-empty 'pending' list")
    entries = []
    for item in raw:
        if isinstance(item, str):
            entries.append({"path": item, "year": None, "radiance": None})
        elif isinstance(item, dict) and "path" in item:
            entries.append(
                {
                    "path": item["path"],
                    "year": int(item["year"]) if "year" in item and item["year"] is not None else None,
                    "radiance": item.get("radiance"),
                }
            )
        else:
            raise NightlightsError(f"pipeline pending entry malformed: {item!r}")
    labels = [str(e["year"]) if e["year"] is not None else Path(e["path"]).stem for e in entries]
    if len(set(labels)) != len(labels):
        raise NightlightsError("pipeline pending entries produce duplicate labels")
    for entry, label in zip(entries, labels):
        entry["label"] = label
    return entries


def _cmd_pipeline(args) -> int:
    doc = _load_json(args.config, "pipeline config")
    unknown = set(doc) - _PIPELINE_KEYS
    if unknown:
        raise NightlightsError(f"pipeline config has unknown keys: {sorted(unknown)}")

    outdir = Path(args.outdir if args.outdir else doc.get("outdir", "out"))
    base_year = args.base_year if args.base_year is not None else doc.get("base_year")
    statistic = doc.get("statistic", "sum")
    if statistic not in ("sum", "mean"):
        raise NightlightsError(f"unsupported lights statistic {statistic!r} (use 'sum' or 'mean')")
    entries = _pipeline_entries(doc)

    intercal_on = bool(doc.get("intercalibrate", False))
    if intercal_on:
        if "reference" not in doc or "invariant_mask" not in doc:
            raise NightlightsError(
                "pipeline config: intercalibrate needs 'reference' and 'invariant_mask'"
            )
        reference = read_grid(doc["reference"])
        invariant_mask = read_mask(doc["invariant_mask"])

    sat_cfg = doc.get("saturation")
    if sat_cfg is not None:
        if not isinstance(sat_cfg, dict):
            raise NightlightsError("pipeline config: 'saturation' must be an object or null")
        sat_threshold = float(sat_cfg.get("threshold", 63.0))
        sat_policy = SampleSelectionPolicy(
            max_abs_diff_quantile=float(sat_cfg.get("quantile", 1.0)),
            min_radiance=float(sat_cfg.get("min_radiance", 1e-6)),
        )

    bloom_cfg = doc.get("bloom")
    if bloom_cfg is not None:
        if not isinstance(bloom_cfg, dict) or "radius" not in bloom_cfg:
            raise NightlightsError("pipeline config: 'bloom' must be an object with a 'radius'")
        bloom_radius = int(bloom_cfg["radius"])
        bloom_policy = PseudoPixelPolicy(
            background_max=float(bloom_cfg.get("background_max", 0.0)),
            pseudo_max_dn=float(bloom_cfg.get("pseudo_max", 10.0)),
            min_background_neighbors=int(bloom_cfg.get("min_bg_neighbors", 5)),
        )

    outdir.mkdir(parents=True, exist_ok=True)
    lights_pairs = []
    for entry in entries:
        label = entry["label"]
        grid = read_grid(entry["path"])

        # each stage writes its grid and the next stage re-reads it, so the
        # pipeline is byte-identical to chaining the standalone subcommands
        if intercal_on:
            _, corrected, line = _run_intercal(grid, reference, invariant_mask)
            stage_path = outdir / f"{label}_intercal.asc"
            _atomic_write(stage_path, grid_to_text(corrected))
            grid = read_grid(stage_path)
            print(f"[{label}] {line}")

        if sat_cfg is not None:
            rad_path = entry["radiance"] or doc.get("radiance")
            if not rad_path:
                raise NightlightsError(
                    f"pipeline config: saturation enabled but no radiance grid for {label}"
                )
            radiance = read_grid(rad_path)
            _, corrected, line = _run_desaturate(grid, radiance, sat_threshold, sat_policy)
            stage_path = outdir / f"{label}_desat.asc"
            _atomic_write(stage_path, grid_to_text(corrected))
            grid = read_grid(stage_path)
            print(f"[{label}] {line}")

        if bloom_cfg is not None:
            _, corrected, line = _run_debloom(grid, bloom_radius, bloom_policy)
            stage_path = outdir / f"{label}_debloom.asc"
            _atomic_write(stage_path, grid_to_text(corrected))
            grid = read_grid(stage_path)
            print(f"[{label}] {line}")

        _atomic_write(outdir / f"corrected_{label}.asc", grid_to_text(grid))
        total = sum_of_lights(grid)
        if statistic == "mean":
            total /= int(np.count_nonzero(grid.valid))
        lights_pairs.append((entry["year"], total))
        print(f"[{label}] {statistic}_of_lights={total:.12g}")

    wants_series = doc.get("gdp_csv") or base_year is not None
    if any(year is None for year, _ in lights_pairs):
        if wants_series:
            raise NightlightsError(
                "pipeline config: every pending entry needs a 'year' for regression or indexing"
            )
        return 0

    lights = AnnualSeries.from_pairs(lights_pairs)
    _atomic_write(outdir / "lights.csv", series_to_text(lights))

    gdp = None
    if doc.get("gdp_csv"):
        gdp = read_series(doc["gdp_csv"])
        model = fit_gdp_model(lights, gdp)
        report = evaluate(model, lights, gdp)
        _atomic_write(outdir / "report.csv", report_to_text(report))
        _atomic_write(
            outdir / "gdp_model.json",
            json.dumps(
                {"beta0": model.beta0, "beta1": model.beta1, "r2": model.fit.r2},
                sort_keys=True,
            ) + "\n",
        )
        from .econometrics import align

        aligned = align(lights, gdp)
        _atomic_write(
            outdir / "scatter.svg",
            scatter_svg(
                [l for _, l, _ in aligned],
                [g for _, _, g in aligned],
                model.beta1,
                model.beta0,
                xlabel=f"lights ({statistic})",
                ylabel="GDP",
                title="GDP vs lights",
            ),
        )
        print(
            f"regression: beta0={model.beta0:.12g} beta1={model.beta1:.12g} "
            f"r2={model.fit.r2:.12g} n={len(report.rows)} mse={report.mse:.12g}"
        )

    if base_year is not None:
        _atomic_write(outdir / "lights_indexed.csv", series_to_text(index_to_base(lights, int(base_year))))
        if gdp is not None:
            _atomic_write(outdir / "gdp_indexed.csv", series_to_text(index_to_base(gdp, int(base_year))))
        print(f"indexed to base {int(base_year)}")
    return 0


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nightlights",
        description="Correct nighttime-light rasters and regress GDP on the lit area.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("intercalibrate", help="fit and apply the power-law calibration")
    sp.add_argument("--pending", required=True, help="grid to correct (.asc)")
    sp.add_argument("--reference", required=True, help="reference grid (.asc)")
    sp.add_argument("--mask", required=True, help="invariant-region mask grid (.asc, 0/1)")
    sp.add_argument("--out", required=True)
    sp.add_argument("--model-out", help="optional model JSON path")
    sp.set_defaults(func=_cmd_intercalibrate)

    sp = sub.add_parser("desaturate", help="replace saturated cells via the radiance log model")
    sp.add_argument("--ntl", required=True, help="capped DN grid (.asc)")
    sp.add_argument("--radiance", required=True, help="radiance-calibrated grid (.asc)")
    sp.add_argument("--threshold", type=float, default=63.0)
    sp.add_argument("--quantile", type=float, default=1.0,
                    help="keep this fraction of samples with smallest residuals")
    sp.add_argument("--min-radiance", type=float, default=1e-6)
    sp.add_argument("--out", required=True)
    sp.add_argument("--model-out")
    sp.set_defaults(func=_cmd_desaturate)

    sp = sub.add_parser("debloom", help="subtract fitted overglow from lit cells")
    sp.add_argument("--grid", required=True)
    sp.add_argument("--radius", type=int, required=True)
    sp.add_argument("--background-max", type=float, default=0.0)
    sp.add_argument("--pseudo-max", type=float, default=10.0)
    sp.add_argument("--min-bg-neighbors", type=int, default=5)
    sp.add_argument("--out", required=True)
    sp.add_argument("--model-out")
    sp.set_defaults(func=_cmd_debloom)

    sp = sub.add_parser("sol", help="print the sum of lights")
    sp.add_argument("--grid", required=True)
    sp.add_argument("--mask")
    sp.set_defaults(func=_cmd_sol)

    sp = sub.add_parser("regress", help="fit GDP on a lights series")
    sp.add_argument("--lights", required=True, help="year,value CSV")
    sp.add_argument("--gdp", required=True, help="year,value CSV")
    sp.add_argument("--out", required=True, help="report CSV path")
    sp.add_argument("--svg", help="optional scatter plot path")
    sp.add_argument("--model-out")
    sp.set_defaults(func=_cmd_regress)

    sp = sub.add_parser("predict", help="evaluate a saved GDP model at one lights value")
    sp.add_argument("--model", required=True)
    sp.add_argument("--light", type=float, required=True)
    sp.set_defaults(func=_cmd_predict)

    sp = sub.add_parser("index", help="rescale a series so the base year equals 1")
    sp.add_argument("--series", required=True)
    sp.add_argument("--base-year", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_index)

    sp = sub.add_parser("synth", help="generate a synthetic scene from a JSON spec")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_synth)

    sp = sub.add_parser("pipeline", help="run configured corrections, then regression/indexing")
    sp.add_argument("--config", required=True)
    sp.add_argument("--outdir", help="overrides the config outdir")
    sp.add_argument("--base-year", type=int, help="overrides the config base_year")
    sp.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse handles usage errors and --help
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        rc = args.func(args)
    except NightlightsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(
        f"[nightlights] backend={_kernels.BACKEND} elapsed={time.perf_counter() - start:.3f}s",
        file=sys.stderr,
    )
    return rc


if __name__ == "__main__":
    sys.exit(main())

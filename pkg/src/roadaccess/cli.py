"""Command-line entry point orchestrating the pipeline end to end.

Subcommands: run (ingest -> metrics -> grid -> classify, with cell layers,
summary, and a reproducibility manifest), evaluate (score cell outputs
against community validations), and export-connectors (per-building QA
layers). Exit codes: 0 ok, 2 configuration error, 3 data error,
4 evaluation error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import ingest, metrics, outputs
from .classify import classify_all, distribution
from .config import PipelineConfig, load_config
from .errors import ConfigurationError, PipelineError
from .evaluate import evaluation_report, ternary_proportions
from .grid import aggregate, enumerate_empty_cells
from .spatial_index import PolygonIndex, SegmentIndex

log = logging.getLogger(__name__)


def _load_inputs(config: PipelineConfig, counts: dict) -> tuple:
    road_stats = ingest.LoadStats()
    building_stats = ingest.LoadStats()
    roads = ingest.load_roads(
        config.roads,
        class_property=config.class_property,
        surface_property=config.surface_property,
        stats=road_stats,
    )
    motorable = ingest.filter_motorable(roads)
    counts["motorable_roads"] = len(motorable)
    buildings = ingest.load_buildings(
        config.buildings, min_confidence=config.min_confidence, stats=building_stats
    )
    boundary = ingest.load_boundary(config.boundary)
    buildings, motorable = ingest.clip_to_boundary(buildings, motorable, boundary)
    counts["roads"] = road_stats.as_dict()
    counts["buildings"] = building_stats.as_dict()
    counts["roads_in_scope"] = len(motorable)
    counts["buildings_in_scope"] = len(buildings)
    log.info(
        "in scope after clipping: %d buildings, %d motorable roads",
        len(buildings),
        len(motorable),
    )
    if not motorable:
        raise ConfigurationError("no motorable roads in scope; nearest-road queries undefined")
    return buildings, motorable, boundary


def _compute_metrics(config: PipelineConfig, buildings, motorable):
    road_index = SegmentIndex(motorable)
    building_index = PolygonIndex(buildings)
    return metrics.compute_all(
        buildings, road_index, building_index, motorable, workers=config.workers
    )


def cmd_run(config: PipelineConfig) -> int:
    config.validate()
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    counts: dict = {}
    buildings, motorable, boundary = _load_inputs(config, counts)

    building_metrics = _compute_metrics(config, buildings, motorable)
    log.info("computed metrics for %d buildings", len(building_metrics))

    aggregates = aggregate(building_metrics, buildings, config.cell_size)
    empty_cells = enumerate_empty_cells(boundary, aggregates, config.cell_size)
    cells = classify_all(aggregates, empty_cells, config.threshold)
    counts["built_cells"] = len(aggregates)
    counts["empty_cells"] = len(empty_cells)
    log.info("classified %d cells (%d built, %d empty)", len(cells), len(aggregates), len(empty_cells))

    cells_geojson = out_dir / "cells.geojson"
    cells_csv = out_dir / "cells.csv"
    aggregates_csv = out_dir / "aggregates.csv"
    summary_json = out_dir / "summary.json"
    outputs.write_cells_geojson(cells_geojson, cells, config.cell_size)
    outputs.write_cells_csv(cells_csv, cells)
    outputs.write_aggregates_csv(aggregates_csv, aggregates)
    dist = distribution(cells, include_empty=config.include_empty_in_distribution)
    outputs.write_json(
        summary_json,
        {
            "distribution": {
                "include_empty": config.include_empty_in_distribution,
                **dist.as_dict(),
            },
            "stage_counts": counts,
        },
    )

    manifest = {
        "inputs": {
            name: {
                "path": str(getattr(config, name)),
                "sha256": outputs.file_sha256(getattr(config, name)),
            }
            for name in ("buildings", "roads", "boundary")
        },
        "parameters": config.parameters(),
        "stage_counts": counts,
        "outputs": {
            p.name: outputs.file_sha256(p)
            for p in (cells_geojson, cells_csv, aggregates_csv, summary_json)
        },
    }
    outputs.write_json(out_dir / "manifest.json", manifest)
    return 0


def cmd_evaluate(config: PipelineConfig) -> int:
    config.validate(require_validations=True)
    out_dir = Path(config.output_dir)
    cells_csv = out_dir / "cells.csv"
    if not cells_csv.exists():
        raise ConfigurationError(f"classified cells not found: {cells_csv} (run the pipeline first)")
    cells = outputs.read_cells_csv(cells_csv)
    stats = ingest.LoadStats()
    records = ingest.load_validations(config.validations, stats=stats)
    report = evaluation_report(cells, records)
    report["validation_rows"] = stats.as_dict()
    outputs.write_json(out_dir / "evaluation.json", report)
    outputs.write_ternary_csv(out_dir / "ternary.csv", ternary_proportions(records))
    log.info(
        "evaluated %d matched cells: accuracy %.3f",
        report["matched_cells"],
        report["accuracy"],
    )
    return 0


def cmd_export_connectors(config: PipelineConfig) -> int:
    config.validate()
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    counts: dict = {}
    buildings, motorable, _ = _load_inputs(config, counts)
    building_metrics = _compute_metrics(config, buildings, motorable)
    road_index = SegmentIndex(motorable)
    connectors = metrics.connectors_for(buildings, road_index)
    by_id = {m.building_id: m for m in building_metrics}
    outputs.write_connectors_geojson(out_dir / "connectors.geojson", connectors, by_id)
    outputs.write_building_metrics_csv(out_dir / "building_metrics.csv", building_metrics)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roadaccess",
        description="Road access deprivation modeling pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "run the full pipeline and write cell outputs"),
        ("evaluate", "score cell outputs against community validations"),
        ("export-connectors", "write per-building connector layers for QA"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the JSON config file")
        p.add_argument("--threshold", type=float, help="override the obstruction threshold")
        p.add_argument("--min-confidence", type=float, help="override the building confidence filter")
        p.add_argument("--workers", type=int, help="override the worker count")
        p.add_argument("--out", help="override the output directory")
    return parser


_COMMANDS = {
    "run": cmd_run,
    "evaluate": cmd_evaluate,
    "export-connectors": cmd_export_connectors,
}


def _apply_overrides(config: PipelineConfig, args: argparse.Namespace) -> PipelineConfig:
    if args.threshold is not None:
        config.threshold = args.threshold
    if args.min_confidence is not None:
        config.min_confidence = args.min_confidence
    if args.workers is not None:
        config.workers = args.workers
    if args.out is not None:
        config.output_dir = Path(args.out)
    return config


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )
    args = build_parser().parse_args(argv)
    try:
        config = _apply_overrides(load_config(args.config), args)
        return _COMMANDS[args.command](config)
    except PipelineError as exc:
        print(f"{exc.kind}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

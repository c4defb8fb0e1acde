"""Command-line pipeline: raw files in, report bundle out.

Subcommands
    variables   build the tract x 10 variable table (variables.csv, dropped.csv)
    pca         PCA tables (variance, loadings, contributors, correlations, scores)
    moran       global spatial autocorrelation per variable (moran.csv)
    boxmap      per-component box-map classes (scores GeoJSON + one SVG per component)
    report      all of the above in one run

Exit codes: 0 success, 2 ingest failure, 3 numerical precondition,
4 invalid configuration, 5 output I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import ingest, report, stats
from .config import RunConfig, apply_overrides, load_config_file, resolve_seed
from .errors import AccessAtlasError, ConfigError
from .geometry import queen_adjacency
from .ingest import VARIABLE_COLUMNS, VariableTable
from .network import build_network, load_road_edges, load_road_nodes

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INGEST = 2
EXIT_NUMERIC = 3
EXIT_CONFIG = 4
EXIT_IO = 5


class _StageFailure(Exception):
    """Carries the exit code of the pipeline stage that failed."""

    def __init__(self, exit_code: int, cause: Exception):
        super().__init__(str(cause))
        self.exit_code = exit_code


def _stage(exit_code: int, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (AccessAtlasError, OSError) as exc:
        raise _StageFailure(exit_code, exc) from exc


# ---------------------------------------------------------------- pipeline


def _load_inputs(cfg: RunConfig):
    tracts = ingest.load_tracts(cfg.tracts, cfg.ref_lon, cfg.ref_lat)
    providers = ingest.load_providers(cfg.providers, cfg.ref_lon, cfg.ref_lat)
    nodes = load_road_nodes(cfg.roads_nodes, cfg.ref_lon, cfg.ref_lat)
    edges = load_road_edges(cfg.roads_edges)
    net = build_network(edges, nodes, cfg.road_classes)
    demographics = ingest.load_demographics(cfg.demographics)
    return tracts, providers, net, demographics


def _build_table(cfg: RunConfig):
    tracts, providers, net, demographics = _load_inputs(cfg)
    table = ingest.assemble_variable_table(
        tracts,
        providers,
        net,
        demographics,
        ace_net_mode=cfg.ace_net_mode,
        max_snap_m=cfg.snap_max_m,
    )
    return tracts, table


def _analyze(table: VariableTable):
    names = list(VARIABLE_COLUMNS)
    pca_result = stats.pca(table.values, names)
    var_corr = stats.correlation_matrix(table.values, names)
    loading_corr = stats.loading_profile_correlation(pca_result.loadings, names)
    return pca_result, var_corr, loading_corr


def _moran_rows(table: VariableTable, tracts, cfg: RunConfig):
    by_id = {t.tract_id: t for t in tracts}
    retained = [by_id[tid] for tid in table.tract_ids]
    adjacency = queen_adjacency([t.parts for t in retained])
    rows = []
    for j, name in enumerate(VARIABLE_COLUMNS):
        rows.append(
            (
                name,
                stats.morans_i(
                    table.values[:, j], adjacency, cfg.moran_permutations, cfg.seed
                ),
            )
        )
    return rows


def _boxmap_products(table: VariableTable, pca_result, cfg: RunConfig):
    k = min(cfg.components_mapped, pca_result.n_components)
    class_columns = [
        report.boxmap_classify(pca_result.scores[:, c], cfg.hinge) for c in range(k)
    ]
    scores = {
        tid: [float(pca_result.scores[i, c]) for c in range(k)]
        for i, tid in enumerate(table.tract_ids)
    }
    classes = {
        tid: [class_columns[c][i] for c in range(k)]
        for i, tid in enumerate(table.tract_ids)
    }
    return k, scores, classes


def _ensure_out_dir(cfg: RunConfig) -> str:
    try:
        os.makedirs(cfg.out_dir, exist_ok=True)
    except OSError as exc:
        raise _StageFailure(EXIT_IO, exc) from exc
    if not os.access(cfg.out_dir, os.W_OK):
        raise _StageFailure(
            EXIT_IO, PermissionError(f"out_dir {cfg.out_dir} is not writable")
        )
    return cfg.out_dir


# ------------------------------------------------------------- subcommands


def cmd_variables(cfg: RunConfig) -> int:
    _, table = _stage(EXIT_INGEST, _build_table, cfg)
    out = _ensure_out_dir(cfg)
    _stage(EXIT_IO, report.emit_variables_csv, table, out)
    log.info("variables table: %d tracts retained, %d dropped", table.n, len(table.dropped))
    return EXIT_OK


def cmd_pca(cfg: RunConfig) -> int:
    _, table = _stage(EXIT_INGEST, _build_table, cfg)
    pca_result, var_corr, loading_corr = _stage(EXIT_NUMERIC, _analyze, table)
    out = _ensure_out_dir(cfg)
    thresholds = stats.ContributorThresholds(cfg.sig_threshold, cfg.sec_threshold)
    _stage(
        EXIT_IO,
        report.emit_pca_tables,
        table,
        pca_result,
        var_corr,
        loading_corr,
        thresholds,
        out,
    )
    return EXIT_OK


def cmd_moran(cfg: RunConfig) -> int:
    tracts, table = _stage(EXIT_INGEST, _build_table, cfg)
    rows = _stage(EXIT_NUMERIC, _moran_rows, table, tracts, cfg)
    out = _ensure_out_dir(cfg)
    _stage(EXIT_IO, report.emit_moran_csv, rows, out)
    return EXIT_OK


def cmd_boxmap(cfg: RunConfig) -> int:
    tracts, table = _stage(EXIT_INGEST, _build_table, cfg)
    pca_result, _, _ = _stage(EXIT_NUMERIC, _analyze, table)
    k, scores, classes = _stage(EXIT_NUMERIC, _boxmap_products, table, pca_result, cfg)
    out = _ensure_out_dir(cfg)
    dropped = dict(table.dropped)
    _stage(
        EXIT_IO,
        report.emit_geojson,
        tracts,
        scores,
        classes,
        os.path.join(out, "scores.geojson"),
        dropped=dropped,
        components=k,
    )
    by_id = {t.tract_id: t for t in tracts}
    retained = [by_id[tid] for tid in table.tract_ids]
    for c in range(k):
        _stage(
            EXIT_IO,
            report.emit_svg_choropleth,
            retained,
            {tid: classes[tid][c] for tid in table.tract_ids},
            c,
            os.path.join(out, f"boxmap_pc{c + 1}.svg"),
        )
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    # Literally the composition of the other four, sharing one out_dir.
    for sub in (cmd_variables, cmd_pca, cmd_moran, cmd_boxmap):
        code = sub(cfg)
        if code != EXIT_OK:
            return code
    return EXIT_OK


COMMANDS = {
    "variables": cmd_variables,
    "pca": cmd_pca,
    "moran": cmd_moran,
    "boxmap": cmd_boxmap,
    "report": cmd_report,
}


# -------------------------------------------------------------- arg parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="access-atlas",
        description="Multidimensional food-access analysis over census tracts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("variables", "build the tract x 10 variable table"),
        ("pca", "principal component tables"),
        ("moran", "global Moran's I per variable"),
        ("boxmap", "box-map classes: scores GeoJSON + SVG choropleths"),
        ("report", "full pipeline: variables + pca + moran + boxmap"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output directory (overrides config out_dir)")
        p.add_argument("--seed", type=int, help="RNG seed for permutation tests")
        p.add_argument("--permutations", type=int, help="Moran permutation count (>= 99)")
        p.add_argument("--hinge", type=float, help="box-map hinge multiplier")
        p.add_argument("--sig-threshold", type=float, help="significant-loading cutoff")
        p.add_argument("--sec-threshold", type=float, help="secondary-loading cutoff")
        p.add_argument("--ace-net-mode", help="'centroid' or 'grid-K' origin sampling")
        p.add_argument("--ref-lon", type=float, help="projection reference longitude")
        p.add_argument("--ref-lat", type=float, help="projection reference latitude")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = load_config_file(args.config) if args.config else RunConfig()
    overrides = {
        "out_dir": args.out,
        "seed": args.seed,
        "moran_permutations": args.permutations,
        "hinge": args.hinge,
        "sig_threshold": args.sig_threshold,
        "sec_threshold": args.sec_threshold,
        "ace_net_mode": args.ace_net_mode,
        "ref_lon": args.ref_lon,
        "ref_lat": args.ref_lat,
    }
    apply_overrides(cfg, overrides)
    cfg.seed = resolve_seed(cfg.seed)
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](cfg)
    except _StageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()

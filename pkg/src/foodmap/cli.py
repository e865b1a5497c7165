"""Command line entry point: ``foodmap {ingest,kde,bn,synth,report}``.

Exit codes: 0 success, 1 analysis infeasible for at least one slot, 2 bad
input or arguments.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import warnings
from datetime import date
from pathlib import Path

from . import bn, core, export, geo, kde, places, synth
from .core import CATEGORIES, NAMED_SLOTS, FoodCategory, TimeSlot
from .errors import AnalysisError, InputError, TooFewPoints

SUMMARY_COLUMNS = ("slot", "bandwidth_m", "hotspots")


def _grid(text):
    try:
        lo, hi, n = text.split(":")
        return float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError("expected MIN:MAX:COUNT, e.g. 10:2000:32") from None


def _date(text):
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an ISO date: {text!r}") from None


def _quantile(text):
    q = float(text)
    if not 0 < q < 1:
        raise argparse.ArgumentTypeError("quantile must be in (0, 1)")
    return q


def _add_input(p):
    p.add_argument("--posts", required=True, help="posts CSV")
    p.add_argument("--businesses", required=True, help="businesses CSV")
    p.add_argument("--reference-date", required=True, type=_date, help="last day of the analysis window (YYYY-MM-DD)")
    p.add_argument("--window-days", type=int, default=core.WINDOW_DAYS)
    p.add_argument("--out", required=True, help="output directory")


def _add_slot(p):
    p.add_argument("--slot", choices=["breakfast", "lunch", "dinner", "all"], default="all")


def _add_kde(p):
    p.add_argument("--category", default=None,
                   help="restrict to one category, or 'all' for one run per category (default: pooled)")
    bw = p.add_mutually_exclusive_group()
    bw.add_argument("--bandwidth", type=float, help="fixed bandwidth in meters (skips selection)")
    bw.add_argument("--bandwidth-grid", type=_grid, default=kde.DEFAULT_GRID, metavar="MIN:MAX:COUNT")
    p.add_argument("--cell-size", type=float, default=None, help="raster cell size in meters (default h/4)")
    p.add_argument("--hotspot-quantile", type=_quantile, default=kde.DEFAULT_QUANTILE)
    p.add_argument("--max-hotspots", type=int, default=3, help="hot spots listed per row of summary.tsv")
    p.add_argument("--gazetteer", default=None, help="CSV of name,latitude,longitude for naming hot spots")
    p.add_argument("--seed", type=int, default=0, help="seed for duplicate-point jitter")


def _add_bn(p):
    p.add_argument("--bn-init", choices=["empty", "full"], default="empty")
    p.add_argument("--max-iters", type=int, default=1000)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="foodmap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load, filter and summarize posts")
    _add_input(p)

    p = sub.add_parser("kde", help="bandwidth selection, density rasters and hot spots per slot")
    _add_input(p)
    _add_slot(p)
    _add_kde(p)

    p = sub.add_parser("bn", help="BIC hill-climbing network per slot")
    _add_input(p)
    _add_slot(p)
    _add_bn(p)

    p = sub.add_parser("report", help="ingest, kde and bn in one run")
    _add_input(p)
    _add_slot(p)
    _add_kde(p)
    _add_bn(p)

    p = sub.add_parser("synth", help="write a synthetic dataset with ground truth")
    p.add_argument("--spec", default="manhattan",
                   help=f"built-in spec ({', '.join(synth.BUILTIN_SPECS)}) or a JSON spec file")
    p.add_argument("--seed", type=int, default=None, help="override the spec seed")
    p.add_argument("--out", required=True)
    return parser


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "out"}
    for k, v in cfg.items():
        if isinstance(v, date):
            cfg[k] = v.isoformat()
        elif isinstance(v, tuple):
            cfg[k] = list(v)
    return cfg


def _slots(args):
    return NAMED_SLOTS if args.slot == "all" else (TimeSlot(args.slot),)


def _load(args) -> core.Dataset:
    return core.load_dataset(args.posts, args.businesses, args.reference_date, window_days=args.window_days)


def _err(msg):
    print(f"foodmap: {msg}", file=sys.stderr)


def run_ingest(args, ds, out: Path) -> int:
    table = core.summarize(ds)
    lines = ["slot\t" + "\t".join(c.key for c in CATEGORIES) + "\ttotal"]
    for s in TimeSlot:
        row = table[s.value]
        lines.append(s.value + "\t" + "\t".join(str(row[c.key]) for c in CATEGORIES) + f"\t{sum(row.values())}")
    text = "\n".join(lines) + "\n"
    export.write_text(out / "ingest_summary.tsv", text)
    export.write_text(out / "dataset.json", ds.to_json())
    print(f"posts: {len(ds.posts)}  businesses: {len(ds.businesses)}  "
          f"window: {ds.window[0].isoformat()}..{ds.window[1].isoformat()}")
    print(text, end="")
    return 0


def _kde_groups(args):
    if args.category is None:
        return [None]
    if args.category == "all":
        return list(CATEGORIES)
    try:
        return [FoodCategory.parse(args.category)]
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _hotspot_names(spots, limit):
    names = []
    for s in spots:
        if s.name not in names:
            names.append(s.name)
        if len(names) == limit:
            break
    return ", ".join(names)


def run_kde(args, ds, out: Path) -> int:
    gazetteer = places.read_gazetteer(args.gazetteer) if args.gazetteer else places.MANHATTAN
    groups = _kde_groups(args)
    strata = core.stratify(ds)
    frame = geo.make_frame([(p.latitude, p.longitude) for p in ds.posts]) if ds.posts else None
    rows, failed = [], 0
    for slot in _slots(args):
        for cat in groups:
            posts = [p for p in strata[slot] if cat is None or p.category is cat]
            stem = slot.value if cat is None else f"{slot.value}_{cat.key}"
            label = stem.replace("_", " ")
            try:
                if not posts:
                    raise TooFewPoints("no posts")
                pts = geo.project_many(frame, [p.latitude for p in posts], [p.longitude for p in posts])
                if args.bandwidth is not None:
                    h = args.bandwidth
                else:
                    sel = kde.select_bandwidth(pts, kde.log_spaced_candidates(*args.bandwidth_grid),
                                               ids=[p.id for p in posts], seed=args.seed)
                    h = sel.chosen
                    if sel.clamped:
                        _err(f"{label}: chosen bandwidth {h:.1f} m lies at the edge of the search grid")
                    export.write_text(out / "kde" / f"{stem}_bandwidth.tsv",
                                      "bandwidth_m\tloo_log_density\n"
                                      + "".join(f"{float(c)!r}\t{float(s)!r}\n" for c, s in zip(sel.candidates, sel.scores)))
                field = kde.rasterize(pts, h, frame, args.cell_size, category=cat, slot=slot)
                spots = [dataclasses.replace(s, name=places.nearest_place(s.latitude, s.longitude, gazetteer))
                         for s in kde.extract_hotspots(field, args.hotspot_quantile)]
            except AnalysisError as exc:
                _err(f"{label}: {type(exc).__name__}: {exc}")
                failed += 1
                rows.append((slot, cat, "NA", ""))
                continue
            export.write_ascii_grid(field, out / "kde" / f"{stem}.asc")
            export.write_geojson(spots, out / "kde" / f"{stem}.geojson", cat, slot)
            rows.append((slot, cat, f"{h:.0f}", _hotspot_names(spots, args.max_hotspots)))

    header = SUMMARY_COLUMNS if args.category is None else ("slot", "category", "bandwidth_m", "hotspots")
    lines = ["\t".join(header)]
    for slot, cat, h, names in rows:
        cells = [slot.label] + ([] if args.category is None else [cat.key]) + [h, names]
        lines.append("\t".join(cells))
    text = "\n".join(lines) + "\n"
    export.write_text(out / "summary.tsv", text)
    print(text, end="")
    return 1 if failed else 0


def run_bn(args, ds, out: Path) -> int:
    failed = 0
    for slot in _slots(args):
        try:
            table = bn.build_count_table(ds, slot)
            init = bn.Dag.full() if args.bn_init == "full" else bn.Dag.empty()
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", bn.SingularDesignWarning)
                dag, trace = bn.hill_climb(table, init, max_iters=args.max_iters)
                report = bn.bic_score(table, dag)
        except AnalysisError as exc:
            _err(f"{slot.value}: {type(exc).__name__}: {exc}")
            failed += 1
            continue
        export.write_text(out / "bn" / f"{slot.value}.json",
                          export.dump_json(bn.dag_to_dict(dag, report, trace, slot)))
        export.write_text(out / "bn" / f"{slot.value}.dot", bn.dag_to_dot(dag, f"G_{slot.label}"))
        print(f"G_{slot.label}: {bn.format_edges(dag) or '(no edges)'}  BIC={report.total_bic:.3f}")
    return 1 if failed else 0


def run_synth(args) -> int:
    if args.spec in synth.BUILTIN_SPECS:
        spec = synth.BUILTIN_SPECS[args.spec]()
    else:
        try:
            spec = synth.SynthSpec.from_dict(json.loads(Path(args.spec).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read synth spec {args.spec}: {exc}") from None
    if args.seed is not None:
        spec.seed = args.seed
    result = synth.generate(spec)
    paths = result.write(args.out)
    print(f"wrote {result.manifest['n_posts']} posts for {result.manifest['n_businesses']} businesses "
          f"to {paths['posts'].parent}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            return run_synth(args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        export.write_text(out / "config.json", export.dump_json(_config(args)))
        ds = _load(args)
        if args.command == "ingest":
            return run_ingest(args, ds, out)
        if args.command == "kde":
            return run_kde(args, ds, out)
        if args.command == "bn":
            return run_bn(args, ds, out)
        codes = [run_ingest(args, ds, out), run_kde(args, ds, out), run_bn(args, ds, out)]
        return max(codes)
    except InputError as exc:
        _err(str(exc))
        return 2
    except AnalysisError as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return 1
    except OSError as exc:
        _err(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())

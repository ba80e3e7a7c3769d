"""Command-line entry point: ``marginbound {gen,run,ratio,doomlp,rademacher,plot}``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .data import save_csv
from .errors import ConfigError, DataError, NumericalError
from .rng import RngState

log = logging.getLogger("marginbound")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _config(args) -> ex.ExperimentConfig:
    cfg = ex.ExperimentConfig.load(args.config) if args.config else ex.ExperimentConfig()
    return cfg.replace(seed=args.seed, output_dir=args.output_dir,
                       every=getattr(args, "every", None))


def cmd_gen(args) -> int:
    cfg = _config(args)
    problem = ex.make_problem(cfg, RngState(cfg.seed).child("rep/0"))
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_csv(problem.train, out / "train.csv")
    if problem.test is not None:
        save_csv(problem.test, out / "test.csv")
    print(out / "train.csv")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config(args)
    print(ex.run_experiment(cfg, progress=lambda r, t: log.debug("rep %d round %d", r, t)))
    return EXIT_OK


def cmd_ratio(args) -> int:
    print(ex.run_ratio(_config(args)))
    return EXIT_OK


def cmd_rademacher(args) -> int:
    cfg = _config(args)
    print(ex.run_rademacher(cfg, args.sizes, args.draws))
    return EXIT_OK


def cmd_doomlp(args) -> int:
    delta = args.delta
    if delta != "auto":
        try:
            delta = float(delta)
        except ValueError:
            raise ConfigError(f"--delta must be a number or 'auto', got {delta!r}") from None
        if not 0 < delta <= 1:
            raise ConfigError("--delta must lie in (0, 1]")
    out = ex.run_doomlp(args.model, args.data, args.output_dir or "doomlp", delta, args.seed or 0,
                        args.draws, args.label_column, args.positive_label, args.header)
    print(out)
    return EXIT_OK


def cmd_plot(args) -> int:
    from .plotting import line_chart

    header, cols = ex.read_csv_columns(args.csv)
    missing = [c for c in [args.x] + (args.y or []) if c not in cols]
    if missing:
        raise DataError(f"{args.csv}: missing column(s) {', '.join(missing)}")
    ys = args.y or [h for h in header if h != args.x]
    out = args.out or str(Path(args.csv).with_suffix(".svg"))
    line_chart(cols[args.x], {y: cols[y] for y in ys}, out, xlabel=args.x, title=args.title or "")
    print(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="marginbound", description="Margin-based bounds for voting classifiers.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, every=False):
        sp.add_argument("--config", help="JSON config file (defaults apply when omitted)")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--output-dir", help="override the config output directory")
        if every:
            sp.add_argument("--every", type=int, help="evaluate bounds every k rounds")

    sp = sub.add_parser("gen", help="write the configured dataset as CSV")
    common(sp)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("run", help="train and write the per-round bound report")
    common(sp, every=True)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("ratio", help="sample over true gamma-margin ratio (intervals only)")
    common(sp, every=True)
    sp.set_defaults(func=cmd_ratio)

    sp = sub.add_parser("rademacher", help="Monte-Carlo Rademacher complexity of stumps")
    common(sp)
    sp.add_argument("--sizes", type=int, nargs="+", default=[100, 400, 1600])
    sp.add_argument("--draws", type=int, default=2000)
    sp.set_defaults(func=cmd_rademacher)

    sp = sub.add_parser("doomlp", help="redistribute the weights of a saved combination")
    sp.add_argument("model", help="combination file (weight,feature,threshold,orientation)")
    sp.add_argument("data", help="CSV of features and label")
    sp.add_argument("--delta", default="auto", help="margin scale in (0, 1] or 'auto'")
    sp.add_argument("--seed", type=int, help="seed for the Rademacher estimate used by 'auto'")
    sp.add_argument("--draws", type=int, default=1000)
    sp.add_argument("--output-dir")
    sp.add_argument("--label-column", type=int, default=-1)
    sp.add_argument("--positive-label", default="1")
    sp.add_argument("--header", action="store_true")
    sp.set_defaults(func=cmd_doomlp)

    sp = sub.add_parser("plot", help="SVG line chart of CSV columns")
    sp.add_argument("csv")
    sp.add_argument("--x", default="round")
    sp.add_argument("--y", nargs="+", help="columns to draw (default: all but x)")
    sp.add_argument("--out")
    sp.add_argument("--title")
    sp.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

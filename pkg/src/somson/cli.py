"""Command line: train a map, plot its views, render audio, serve the explorer.

Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.  The
environment variable SOMSON_SEED supplies the default training seed.
"""

from __future__ import annotations

import argparse
import os
import sys
from functools import partial
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer

from .bundle import (
    BundleError,
    FeatureFileError,
    MapBundle,
    export_bundle,
    import_bundle,
    load_features,
)
from .images import Mark, render_component_image, render_umatrix_image
from .som import GridShape, TrainingConfig, component_plane, fit_som, quantization_error
from .sonify import SonifierParams, render_wav

DEFAULT_GRID = "16x16"
DEFAULT_PORT = 8765

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3


class UsageError(Exception):
    """Bad invocation: malformed flag values or invalid flag combinations."""


def _parse_grid(text: str) -> GridShape:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise UsageError(f"--grid expects ROWSxCOLS, got {text!r}")
    try:
        rows, cols = int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"--grid expects ROWSxCOLS, got {text!r}") from None
    try:
        return GridShape(rows=rows, cols=cols)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse_node(text: str) -> tuple[int, int]:
    parts = text.split(",")
    try:
        row, col = (int(p) for p in parts)
    except ValueError:
        raise UsageError(f"--node expects ROW,COL, got {text!r}") from None
    return row, col


def _parse_params(text: str) -> SonifierParams:
    try:
        values = [float(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"--params expects comma-separated numbers, got {text!r}") from None
    try:
        return SonifierParams.from_vector(values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _default_seed() -> int:
    raw = os.environ.get("SOMSON_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"SOMSON_SEED must be an integer, got {raw!r}") from None


def _bundle_marks(bundle: MapBundle) -> list[Mark]:
    placement = bundle.placement()
    return [(*placement[item.id], item.label) for item in bundle.items]


# ------------------------------------------------------------------ commands


def cmd_train(args: argparse.Namespace) -> int:
    shape = _parse_grid(args.grid)
    seed = args.seed if args.seed is not None else _default_seed()
    features = load_features(args.features)
    config = TrainingConfig(rounds=args.rounds, seed=seed)
    fit = fit_som(list(features.items), shape, config)
    export_bundle(fit.grid, features, fit.normalizer, fit.config, args.out)
    qe = quantization_error(fit.grid, fit.normalizer.transform_many(fit.items))
    print(
        f"trained {shape.rows}x{shape.cols} map: {config.rounds} rounds, "
        f"seed {seed}, quantization error {qe:.6f} -> {args.out}"
    )
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    bundle = import_bundle(args.bundle)
    marks = _bundle_marks(bundle) if args.show_items else None
    if args.view == "umatrix":
        image = render_umatrix_image(bundle.umatrix, marks=marks, cell=args.cell)
    elif args.view.startswith("component:"):
        selector = args.view.partition(":")[2]
        try:
            feature = int(selector)
        except ValueError:
            if selector not in bundle.feature_names:
                raise ValueError(
                    f"unknown feature {selector!r}; have {list(bundle.feature_names)}"
                ) from None
            feature = bundle.feature_names.index(selector)
        plane = component_plane(bundle.grid, feature)
        image = render_component_image(plane, marks=marks, cell=args.cell)
    else:
        raise UsageError(f"unknown view {args.view!r}; expected umatrix or component:<f>")
    image.save(args.out)
    print(f"wrote {args.out} ({image.width}x{image.height})")
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    if (args.node is None) == (args.params is None):
        raise UsageError("exactly one of --node or --params is required")
    if args.params is not None:
        params = _parse_params(args.params)
    else:
        if args.bundle is None:
            raise UsageError("--node needs --bundle")
        bundle = import_bundle(args.bundle)
        row, col = _parse_node(args.node)
        shape = bundle.grid.shape
        if not (0 <= row < shape.rows and 0 <= col < shape.cols):
            raise ValueError(
                f"node {row},{col} outside the {shape.rows}x{shape.cols} map"
            )
        pointer = bundle.grid.pointers[row * shape.cols + col]
        # a node sounds exactly like its pointer, components in feature order
        params = SonifierParams.from_vector(pointer)
    render_wav(params, args.seconds, args.out, rate=args.rate)
    print(f"wrote {args.out} ({args.seconds} s at {args.rate} Hz)")
    return EXIT_OK


class _ExplorerHandler(SimpleHTTPRequestHandler):
    """Static assets plus the bundle document at /bundle."""

    bundle_bytes = b""

    def do_GET(self) -> None:  # noqa: N802 (base-class naming)
        if self.path.partition("?")[0] == "/bundle":
            self.send_response(200)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(self.bundle_bytes)))
            self.end_headers()
            self.wfile.write(self.bundle_bytes)
        else:
            super().do_GET()

    def log_message(self, format: str, *args) -> None:
        pass  # keep the console to the startup line


def make_server(bundle_path: str, assets_dir: str, port: int) -> ThreadingHTTPServer:
    """Build the explorer server; exposed separately so tests can drive it."""
    import_bundle(bundle_path)  # refuse to serve an inconsistent document
    with open(bundle_path, "rb") as handle:
        raw = handle.read()  # exact file bytes, not a re-serialization
    if not os.path.isdir(assets_dir):
        raise OSError(f"assets directory not found: {assets_dir}")
    handler = type(
        "BoundExplorerHandler", (_ExplorerHandler,), {"bundle_bytes": raw}
    )
    return ThreadingHTTPServer(
        ("127.0.0.1", port), partial(handler, directory=assets_dir)
    )


def cmd_serve(args: argparse.Namespace) -> int:
    with make_server(args.bundle, args.assets, args.port) as server:
        host, port = server.server_address[:2]
        print(f"serving on http://{host}:{port}/ (press Ctrl-C to stop)")
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
    return EXIT_OK


# --------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="somson",
        description="Train self-organizing maps and explore them by ear.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="fit a map to a feature file")
    train.add_argument("--features", required=True, help="feature CSV (id,label,names...)")
    train.add_argument("--out", required=True, help="bundle file to write")
    train.add_argument("--grid", default=DEFAULT_GRID, help="lattice as ROWSxCOLS")
    train.add_argument("--rounds", type=int, default=TrainingConfig.rounds)
    train.add_argument("--seed", type=int, default=None, help="defaults to $SOMSON_SEED or 0")
    train.set_defaults(func=cmd_train)

    plot = sub.add_parser("plot", help="render a map view to PNG")
    plot.add_argument("--bundle", required=True)
    plot.add_argument("--out", required=True)
    plot.add_argument("--view", default="umatrix", help="umatrix or component:<index|name>")
    plot.add_argument("--show-items", action="store_true", help="overlay item dots")
    plot.add_argument("--cell", type=int, default=24, help="pixels per node")
    plot.set_defaults(func=cmd_plot)

    render = sub.add_parser("render", help="sonify a node or explicit parameters")
    render.add_argument("--bundle", help="bundle file (needed with --node)")
    render.add_argument("--node", help="lattice node as ROW,COL")
    render.add_argument("--params", help="explicit values, 4 or 7 comma-separated")
    render.add_argument("--seconds", type=float, default=2.0)
    render.add_argument("--rate", type=int, default=48000)
    render.add_argument("--out", required=True, help="WAV file to write")
    render.set_defaults(func=cmd_render)

    serve = sub.add_parser("serve", help="host the explorer UI and bundle locally")
    serve.add_argument("--bundle", required=True)
    serve.add_argument("--assets", required=True, help="directory of explorer assets")
    serve.add_argument("--port", type=int, default=DEFAULT_PORT)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for bad usage; fold the latter
        # into our usage code
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FeatureFileError, BundleError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def entrypoint() -> None:
    sys.exit(main())

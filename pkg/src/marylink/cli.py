"""
Command-line front end.

Subcommands::

    marylink curve     analytic (or simulated) error-rate curves
    marylink sweep     Monte Carlo curves with confidence intervals
    marylink transmit  send a WAV file through the link
    marylink compare   ratio of two curves at shared SNR points

Curve output has a fixed CSV schema
(``scheme,m,mode,granularity,ebn0_db,value,ci_low,ci_high,seed``) preceded
by one ``#`` line holding the run configuration, or a versioned JSON
document. Files are written atomically and identical invocations produce
identical bytes.
"""

import argparse
import csv
import io
import json
import math
import sys

from . import __version__
from .analysis import CONVENTIONS, bits_per_symbol, valid_modes
from .exceptions import ConfigurationError, DomainError, MaryLinkError
from .modem import SUPPORTED_ORDERS, check_supported
from .montecarlo import StopCriteria, analytic_curve, sweep
from .payload import atomic_write, transmit_pipeline, voice_fixture, wav_read, wav_write

CURVE_COLUMNS = ("scheme", "m", "mode", "granularity", "ebn0_db",
                 "value", "ci_low", "ci_high", "seed")
COMPARE_COLUMNS = ("a_scheme", "a_m", "a_mode", "b_scheme", "b_m", "b_mode",
                   "granularity", "ebn0_db", "value_a", "value_b", "ratio")
SCHEMA_VERSION = 1


class UsageError(Exception):
    def __init__(self, field, message):
        super().__init__(f"invalid {field}: {message}")
        self.field = field


def parse_grid(spec):
    """Parse ``start:stop:step`` (inclusive) or a single value such as ``inf``."""
    parts = spec.split(":")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise UsageError("snr", f"cannot parse {spec!r} as start:stop:step") from None
    if len(parts) == 1:
        if math.isnan(values[0]):
            raise UsageError("snr", "NaN is not an SNR")
        return [values[0]]
    if len(parts) != 3:
        raise UsageError("snr", f"expected start:stop:step, got {spec!r}")
    start, stop, step = values
    if not all(math.isfinite(v) for v in values):
        raise UsageError("snr", "range endpoints and step must be finite")
    if step <= 0:
        raise UsageError("snr", "step must be > 0")
    if start > stop:
        raise UsageError("snr", "start must be <= stop")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(n)]


def _split(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _orders(text):
    try:
        orders = [int(t) for t in _split(text)]
    except ValueError:
        raise UsageError("m", f"expected comma-separated integers, got {text!r}") from None
    if not orders:
        raise UsageError("m", "at least one modulation order is required")
    for m in orders:
        try:
            bits_per_symbol(m)
        except DomainError as exc:
            raise UsageError("m", str(exc)) from None
    return orders


def _schemes(text):
    schemes = [s.upper() for s in _split(text)]
    if not schemes:
        raise UsageError("scheme", "at least one scheme is required")
    for s in schemes:
        if s not in SUPPORTED_ORDERS:
            raise UsageError("scheme", f"unknown scheme {s!r}")
    return schemes


def _check_mode(scheme, m, mode):
    if mode == "montecarlo":
        try:
            check_supported(scheme, m)
        except ConfigurationError as exc:
            raise UsageError("m", str(exc)) from None
    elif mode not in valid_modes(scheme):
        raise UsageError(
            "mode", f"{mode!r} is not defined for {scheme}; "
                    f"choose from {', '.join(valid_modes(scheme) + ('montecarlo',))}")


def _stop(args):
    try:
        return StopCriteria(args.min_errors, args.max_bits, args.batch)
    except DomainError as exc:
        raise UsageError("stop criteria", str(exc)) from None


def _curve(scheme, m, mode, grid, args):
    if mode == "montecarlo":
        return sweep(scheme, m, grid, _stop(args), args.seed, granularity=args.granularity,
                     convention=args.convention, workers=args.workers)
    return analytic_curve(scheme, m, grid, mode, granularity=args.granularity,
                          convention=args.convention)


def _fmt(x):
    """CSV cell text: empty for missing values, ``repr`` for floats."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, float):
        return "inf" if x == math.inf else repr(x)
    return str(x)


def _json_value(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def _dump_json(doc):
    def clean(obj):
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [clean(v) for v in obj]
        return _json_value(obj)
    return json.dumps(clean(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _render_table(columns, rows, config, fmt, kind):
    if fmt == "json":
        return _dump_json({"schema": kind, "version": SCHEMA_VERSION,
                           "config": config, "rows": rows})
    buf = io.StringIO()
    buf.write("# " + json.dumps(_json_config(config), sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _json_config(config):
    return json.loads(_dump_json(config))


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write(path, text.encode("utf-8"))


def _config(args, **extra):
    base = {
        "command": args.command, "version": __version__,
        "convention": args.convention, "seed": args.seed,
    }
    for name in ("granularity", "min_errors", "max_bits", "batch"):
        if hasattr(args, name):
            base[name] = getattr(args, name)
    base.update(extra)
    return base


def cmd_curve(args):
    schemes = _schemes(args.scheme)
    orders = _orders(args.m)
    modes = _split(args.mode)
    if not modes:
        raise UsageError("mode", "at least one mode is required")
    grid = parse_grid(args.snr)
    jobs = [(s, m, mode) for s in schemes for m in orders for mode in modes]
    for job in jobs:
        _check_mode(*job)
    rows = []
    for scheme, m, mode in jobs:
        rows.extend(_curve(scheme, m, mode, grid, args).rows())
    config = _config(args, scheme=schemes, m=orders, mode=modes, snr=args.snr, grid=grid)
    _emit(_render_table(CURVE_COLUMNS, rows, config, args.format, "marylink.curves"),
          args.output)


def _side(text, label):
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(label, f"expected scheme:m:mode, got {text!r}")
    scheme = _schemes(parts[0])[0]
    m = _orders(parts[1])[0]
    _check_mode(scheme, m, parts[2])
    return scheme, m, parts[2]


def cmd_compare(args):
    a = _side(args.a, "a")
    b = _side(args.b, "b")
    grid = parse_grid(args.snr)
    curve_a = _curve(*a, grid, args)
    curve_b = curve_a if a == b else _curve(*b, grid, args)
    rows = []
    for x, va, vb in zip(grid, curve_a.values, curve_b.values):
        if va == vb:
            ratio = 1.0
        elif vb == 0:
            ratio = math.inf
        else:
            ratio = va / vb
        rows.append({
            "a_scheme": a[0], "a_m": a[1], "a_mode": a[2],
            "b_scheme": b[0], "b_m": b[1], "b_mode": b[2],
            "granularity": args.granularity, "ebn0_db": x,
            "value_a": va, "value_b": vb, "ratio": ratio,
        })
    config = _config(args, a=args.a, b=args.b, snr=args.snr, grid=grid)
    _emit(_render_table(COMPARE_COLUMNS, rows, config, args.format, "marylink.compare"),
          args.output)


def cmd_transmit(args):
    scheme = _schemes(args.scheme)[0]
    m = _orders(str(args.m))[0]
    _check_mode(scheme, m, "montecarlo")
    ebn0 = parse_grid(args.ebn0)
    if len(ebn0) != 1:
        raise UsageError("ebn0", "transmit takes a single SNR value")
    if args.input:
        payload = wav_read(args.input)
        source = args.input
    else:
        payload = voice_fixture()
        source = "fixture"
    out, report = transmit_pipeline(payload, scheme, m, ebn0[0], args.seed,
                                    convention=args.convention)
    config = _config(args, scheme=scheme, m=m, ebn0_db=ebn0[0], input=source,
                     output=args.output)
    doc = dict(report.to_dict(), config=config, version=SCHEMA_VERSION)
    report_path = args.report or _default_report(args.output)
    wav_write(args.output, out)
    _emit(_dump_json(doc), report_path)


def _default_report(wav_path):
    stem = wav_path[:-4] if wav_path.lower().endswith(".wav") else wav_path
    return stem + ".json"


def _add_common(p, granularity=True):
    p.add_argument("--convention", choices=CONVENTIONS, default="paper",
                   help="how the SNR axis maps to Es/N0 (default: paper)")
    p.add_argument("--seed", type=int, default=0)
    if granularity:
        p.add_argument("--granularity", choices=("bit", "symbol"), default="bit")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("-o", "--output", default="-", help="output path, '-' for stdout")
        p.add_argument("--min-errors", type=int, default=StopCriteria.min_bit_errors)
        p.add_argument("--max-bits", type=int, default=StopCriteria.max_bits)
        p.add_argument("--batch", type=int, default=StopCriteria.batch_size)
        p.add_argument("--workers", type=int, default=None,
                       help="threads for Monte Carlo points")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="marylink", description="M-ary PSK/QAM/FSK error-rate laboratory.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    curve = sub.add_parser("curve", help="error-rate curves")
    curve.add_argument("--scheme", default="psk,qam,fsk")
    curve.add_argument("--m", default="2")
    curve.add_argument("--snr", default="0:12:1", help="start:stop:step in dB")
    curve.add_argument("--mode", default="exact",
                       help="comma list of exact, approx1-3, union, union_per_bit, montecarlo")
    _add_common(curve)
    curve.set_defaults(func=cmd_curve)

    mc = sub.add_parser("sweep", help="Monte Carlo curves")
    mc.add_argument("--scheme", default="psk")
    mc.add_argument("--m", default="2")
    mc.add_argument("--snr", default="0:12:1")
    _add_common(mc)
    mc.set_defaults(func=cmd_curve, mode="montecarlo")

    tx = sub.add_parser("transmit", help="send audio through the link")
    tx.add_argument("--scheme", default="psk")
    tx.add_argument("--m", default="2")
    tx.add_argument("--ebn0", default="6", help="SNR in dB, or 'inf' for no noise")
    tx.add_argument("-i", "--input", help="16-bit mono PCM WAV (default: built-in fixture)")
    tx.add_argument("-o", "--output", required=True, help="reconstructed WAV path")
    tx.add_argument("--report", help="JSON report path (default: output with .json)")
    _add_common(tx, granularity=False)
    tx.set_defaults(func=cmd_transmit)

    cmp_ = sub.add_parser("compare", help="ratio of two curves")
    cmp_.add_argument("--a", required=True, help="scheme:m:mode, e.g. psk:4:exact")
    cmp_.add_argument("--b", required=True)
    cmp_.add_argument("--snr", default="0:12:1")
    _add_common(cmp_)
    cmp_.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        parser.exit(2, f"marylink {args.command}: error: {exc}\n")
    except (MaryLinkError, OSError) as exc:
        field = getattr(exc, "field", None)
        prefix = f"invalid {field}: " if field else ""
        parser.exit(1, f"marylink {args.command}: error: {prefix}{exc}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

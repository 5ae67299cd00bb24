"""Command line front end: keygen, encrypt, decrypt, analyze, audit.

Exit codes::

    0  success, all requested checks passed
    1  a requested check failed
    2  bad usage or bad field parameters
    3  file could not be read or written
    4  key material does not match the data
    5  keystream ran out
    6  malformed container, key or keystream file
    7  request too large for exhaustive enumeration
    8  field too small for the byte encoding
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analysis, proj_auth, stream
from .errors import (
    FieldTooSmall,
    InvalidContainer,
    KeyMismatch,
    KeysourceExhausted,
    MoebiusError,
    TooLarge,
)
from .field import ExtCtx, ext_make, field_make
from .plane import MoebiusPlane

REPORT_DIR_ENV = "MOEBIUS_REPORT_DIR"

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
EXIT_KEY, EXIT_EXHAUSTED, EXIT_CONTAINER, EXIT_TOO_LARGE, EXIT_SMALL = 4, 5, 6, 7, 8

_ERROR_CODES = [
    (KeyMismatch, EXIT_KEY),
    (KeysourceExhausted, EXIT_EXHAUSTED),
    (InvalidContainer, EXIT_CONTAINER),
    (TooLarge, EXIT_TOO_LARGE),
    (FieldTooSmall, EXIT_SMALL),
]


def _coeffs(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        return tuple(int(c) for c in text.replace(" ", "").split(",") if c)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad coefficient list {text!r}") from None


def field_from_args(args) -> ExtCtx:
    F = field_make(args.p or 2, args.n or 8, _coeffs(args.poly))
    return ext_make(F, _coeffs(args.ext_poly))


def _check_same_field(args, ext: ExtCtx) -> None:
    """Explicit --p/--n/--poly/--ext-poly must agree with the key material."""
    given = any(v is not None for v in (args.p, args.n, args.poly, args.ext_poly))
    if given and field_from_args(args) != ext:
        raise KeyMismatch("field parameters differ from the key material")


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _write(path: str, data: bytes) -> None:
    Path(path).write_bytes(data)


def _load_key(path: str):
    data = _read(path)
    if data[:4] == stream.KEYSTREAM_MAGIC:
        ext, pts = stream.keystream_from_bytes(data)
        return "stream", ext, pts
    if data[:4] == stream.KEYFILE_MAGIC:
        ext, keys = stream.keys_from_bytes(data)
        return "explicit", ext, keys
    raise InvalidContainer(f"{path} is neither a keystream nor a key file")


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


# -- subcommands ------------------------------------------------------------------
def cmd_keygen(args) -> int:
    ext = field_from_args(args)
    bits = stream.bits_per_point(ext)
    if args.mode == "explicit":
        if not args.input:
            _info("keygen --mode explicit needs --in (keys depend on the message)")
            return EXIT_USAGE
        data = _read(args.input)
        keys = stream.derive_explicit_keys(data, ext, stream.random_points(ext, args.seed))
        blob = stream.keys_to_bytes(ext, keys)
        _write(args.out, blob)
        _info(f"key triples: {len(keys)}  message points: {3 * len(keys)}  file bytes: {len(blob)}")
        return EXIT_OK
    count = args.count
    if count is None:
        if not args.input:
            _info("keygen --mode stream needs --count or --in")
            return EXIT_USAGE
        triples = stream.triple_count(ext, 8 * len(_read(args.input)))
        # line keys use 3 points per triple; leave room for skips and fallbacks
        count = 9 * triples + 64
    blob = stream.keystream_to_bytes(ext, stream.random_points(ext, args.seed, limit=count))
    _write(args.out, blob)
    header = len(blob) - count * 2 * stream.Codec(ext).width
    _info(f"keystream points: {count}  payload bytes: {len(blob) - header}  header bytes: {header}"
          f"  message bits per point: {bits}")
    return EXIT_OK


def cmd_encrypt(args) -> int:
    data = _read(args.input)
    if args.key:
        mode, ext, material = _load_key(args.key)
        _check_same_field(args, ext)
        if args.mode and args.mode != mode:
            raise KeyMismatch(f"--mode {args.mode} but the key file is for {mode} mode")
        if mode == "stream":
            container = stream.encrypt_stream(data, ext, "stream", keystream=material)
        else:
            container = stream.encrypt_stream(data, ext, "explicit", keys=material)
    elif args.seed is not None:
        if args.mode == "explicit":
            _info("explicit mode needs a key file from keygen")
            return EXIT_USAGE
        ext = field_from_args(args)
        container = stream.encrypt_stream(data, ext, "stream", keystream=stream.random_points(ext, args.seed))
    else:
        _info("encrypt needs --key or --seed")
        return EXIT_USAGE
    blob = container.to_bytes()
    _write(args.out, blob)
    acc = container.key_accounting()
    _info(f"triples: {acc['triples']}  fallback: {acc['fallback_triples']}  "
          f"key points: {acc['accepted_key_points']}  message points: {acc['message_points']}  "
          f"container bytes: {len(blob)}")
    return EXIT_OK


def cmd_decrypt(args) -> int:
    container = stream.Container.from_bytes(_read(args.input))
    ext = container.ext
    if args.key:
        mode, kext, material = _load_key(args.key)
        if kext != ext:
            raise KeyMismatch("key material is for a different field")
        if stream.MODE_NAMES[mode] != container.mode:
            raise KeyMismatch(f"container mode does not match a {mode} key file")
        if mode == "stream":
            plain = stream.decrypt_stream(container, keystream=material)
        else:
            plain = stream.decrypt_stream(container, keys=material)
    elif args.seed is not None:
        _check_same_field(args, ext)
        if container.mode != stream.MODE_STREAM:
            raise KeyMismatch("explicit-mode containers need their key file")
        plain = stream.decrypt_stream(container, keystream=stream.random_points(ext, args.seed))
    else:
        _info("decrypt needs --key or --seed")
        return EXIT_USAGE
    _write(args.out, plain)
    return EXIT_OK


def _emit(args, name: str, payload: dict, csv_text: str) -> None:
    text = json.dumps(payload, indent=2) + "\n" if args.format == "json" else csv_text
    target = args.out
    if target is None and os.environ.get(REPORT_DIR_ENV):
        target = os.environ[REPORT_DIR_ENV]
    if target is None:
        sys.stdout.write(text)
        return
    path = Path(target)
    if path.is_dir():
        path = path / f"{name}.{args.format}"
    path.write_text(text)
    _info(f"wrote {path}")


def cmd_analyze(args) -> int:
    if args.completeness:
        n = args.n or 2
        A = analysis.cipher_completeness_matrix(n, p=args.p or 2)
        auth, wit = proj_auth.auth_completeness_matrix(n, field_make(args.p or 2, n))
        payload = {
            "cipher": A.to_dict(),
            "authentication": {
                "n": n,
                "matrix": [[int(e) for e in row] for row in auth],
                "all_true": all(all(r) for r in auth),
                "witnesses": [dict(zip(proj_auth.CSV_HEADER, w.row())) for w in wit],
            },
        }
        csv_text = (A.grid() + "\n\n" + A.witness_csv() + "\n"
                    + "\n".join(" ".join(str(int(e)) for e in r) for r in auth) + "\n\n"
                    + proj_auth.witnesses_csv(wit))
        _emit(args, f"completeness_n{n}", payload, csv_text)
        _info(f"cipher matrix all true: {A.all_true}; authentication matrix all true: "
              f"{payload['authentication']['all_true']}")
        ok = A.all_true and payload["authentication"]["all_true"]
        return EXIT_OK if ok else EXIT_CHECK
    q = args.q or 5
    report = analysis.aposteriori_tables(q)
    positions = [1, 2, 3] if args.position == "all" else [int(args.position)]
    rows = [r for r in report.rows if r.position in positions]
    dev = analysis.perfectness_deviation(q, report)
    payload = {
        "q": q,
        "message": [str(z) for z in report.message],
        "key_set_sizes": report.key_set_sizes,
        "rows": [r.to_dict() for r in rows],
        "deviation": dev.to_dict(),
        "all_match": all(r.match for r in rows if r.realized),
    }
    selected = analysis.ProbabilityReport(q, report.message, rows)
    _emit(args, f"analyze_q{q}", payload, selected.to_csv())
    for r in rows:
        _info(f"  pos {r.position}  {r.label:<28} mu={str(r.mu):<6} nu={str(r.nu):<8} "
              f"formula={str(r.formula_value):<8} {'ok' if r.match else ('n/a' if not r.realized else 'MISMATCH')}")
    return EXIT_OK if payload["all_match"] else EXIT_CHECK


def cmd_audit(args) -> int:
    q = args.q or 3
    if q > 16:
        raise TooLarge("plane audits are exhaustive only for q <= 16")
    audit = MoebiusPlane.of_order(q).audit()
    payload = {"plane": json.loads(audit.to_json())}
    ok = audit.matches
    csv_text = audit.to_csv()
    if q <= proj_auth.EXHAUSTIVE_Q:
        forg = proj_auth.forgery_stats(proj_auth.AuthContext.of_order(q))
        payload["authentication"] = forg.to_dict()
        csv_text += forg.to_csv()
        ok = ok and forg.perfect
    _emit(args, f"audit_q{q}", payload, csv_text)
    _info(f"points={audit.point_count} circles={audit.circle_count} "
          f"per circle={audit.points_per_circle} matches={audit.matches}")
    return EXIT_OK if ok else EXIT_CHECK


# -- parser -----------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="moebius", description="Möbius-plane cipher and analysis tools")
    sub = ap.add_subparsers(dest="command", required=True)

    def field_args(p):
        p.add_argument("--p", type=int, help="field characteristic (default 2)")
        p.add_argument("--n", type=int, help="extension degree (default 8)")
        p.add_argument("--poly", help="irreducible polynomial, coefficients constant term first")
        p.add_argument("--ext-poly", dest="ext_poly", help="quadratic b0,b1 over the base field")

    def io_args(p, need_out=True):
        p.add_argument("--in", dest="input", help="input file")
        p.add_argument("--out", required=need_out, help="output file")

    k = sub.add_parser("keygen", help="write a keystream (MOBS) or explicit key file (MOBK)")
    field_args(k)
    io_args(k)
    k.add_argument("--mode", choices=["explicit", "stream"], default="stream")
    k.add_argument("--seed", type=int, help="deterministic generator seed (default: system entropy)")
    k.add_argument("--count", type=int, help="number of keystream points")
    k.set_defaults(func=cmd_keygen)

    for name, func in (("encrypt", cmd_encrypt), ("decrypt", cmd_decrypt)):
        c = sub.add_parser(name, help=f"{name} a file")
        field_args(c)
        c.add_argument("--in", dest="input", required=True, help="input file")
        c.add_argument("--out", required=True, help="output file")
        c.add_argument("--key", help="keystream or key file")
        c.add_argument("--seed", type=int, help="regenerate the shared keystream from a seed")
        c.add_argument("--mode", choices=["explicit", "stream"])
        c.set_defaults(func=func)

    a = sub.add_parser("analyze", help="probability tables, deviation, completeness")
    a.add_argument("--q", type=int, help="plane order for the tables (default 5)")
    a.add_argument("--position", choices=["1", "2", "3", "all"], default="all")
    a.add_argument("--completeness", action="store_true", help="avalanche matrices instead of tables")
    a.add_argument("--n", type=int, help="bit width for --completeness (default 2)")
    a.add_argument("--p", type=int, help=argparse.SUPPRESS)
    a.add_argument("--format", choices=["json", "csv"], default="json")
    a.add_argument("--out", help=f"report file or directory (default ${REPORT_DIR_ENV} or stdout)")
    a.set_defaults(func=cmd_analyze)

    u = sub.add_parser("audit", help="incidence counts and authentication statistics")
    u.add_argument("--q", type=int, help="plane order (default 3)")
    u.add_argument("--format", choices=["json", "csv"], default="json")
    u.add_argument("--out", help=f"report file or directory (default ${REPORT_DIR_ENV} or stdout)")
    u.set_defaults(func=cmd_audit)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        _info(f"error: {exc}")
        return EXIT_IO
    except MoebiusError as exc:
        _info(f"error: {type(exc).__name__}: {exc}")
        for cls, code in _ERROR_CODES:
            if isinstance(exc, cls):
                return code
        return EXIT_USAGE
    except (argparse.ArgumentTypeError, ValueError) as exc:
        _info(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

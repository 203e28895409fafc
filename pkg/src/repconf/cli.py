"""Command line front end.

Three subcommands over the library:

``hn``
    canonical descending-value filtration of one representation;
``moduli``
    tables of lower-set system moduli for one index diagram, with
    per-field counts and an interpolated specialization column;
``identities``
    the numeric identity suite, selectable by id.

Exit codes: 0 success, 1 identity failure, 2 bad input, 3 size or
count bounds.  Output is byte-deterministic for a fixed invocation.
"""

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import config as cf
from . import hall as hl
from . import posets as ps
from . import quiver as qv
from . import stability as st
from .errors import (InputError, NonPolynomialCountError, RepconfError,
                     SizeBoundError, UnsupportedError)
from .gf import SUPPORTED_Q
from .hall import _jsonable as jsonable

EXIT_OK = 0
EXIT_IDENTITY = 1
EXIT_INPUT = 2
EXIT_BOUND = 3

NAMED_QUIVERS = {
    "a2": qv.line_quiver(2),
    "a3": qv.line_quiver(3),
    "a4": qv.line_quiver(4),
    "loop": qv.loop_quiver(),
}

MODULI_REQUIRE_ROWS = (
    (), ("ss",), ("si",), ("st",), ("best",),
    ("best", "ss"), ("best", "si"), ("best", "st"),
)


@dataclass
class RunConfig:
    """Validated run parameters shared by the subcommands."""

    quiver_spec: str = "a2"
    stability_spec: str = "trivial"
    qs: tuple = (2, 3)
    max_dim: int = 4
    max_poset: int = 4
    only: tuple = ()
    jobs: int = 1
    out_dir: str = ""
    fmt: str = "json"

    def validate(self):
        if len(set(self.qs)) != len(self.qs):
            raise InputError("field sizes must be distinct, got %r"
                             % (self.qs,))
        for q in self.qs:
            if q not in SUPPORTED_Q:
                raise InputError(
                    "unsupported field size %r (supported: %s)"
                    % (q, ", ".join(str(s) for s in SUPPORTED_Q)))
        if not self.qs:
            raise InputError("need at least one field size")
        if self.max_dim < 1 or self.max_poset < 1:
            raise InputError("bounds must be positive")
        if self.jobs < 1:
            raise InputError("--jobs must be positive")
        if self.fmt not in ("json", "csv"):
            raise InputError("--format must be json or csv")
        return self


# --------------------------------------------------------------------------
# argument parsing helpers
# --------------------------------------------------------------------------

def _read_spec(spec):
    """A flag value that may be a path: return the file's text when the
    path exists, else the value itself as inline text."""
    if os.path.isfile(spec):
        with open(spec, "r", encoding="utf-8") as fh:
            return fh.read()
    return spec


def load_quiver(spec):
    """Named quiver (a2/a3/a4/loop), a path to a quiver file, or inline
    quiver text."""
    key = spec.strip().lower()
    if key in NAMED_QUIVERS:
        return NAMED_QUIVERS[key]
    if os.path.isfile(spec):
        with open(spec, "r", encoding="utf-8") as fh:
            return qv.parse_quiver(fh.read(),
                                   name=os.path.basename(spec))
    if "vertex" in spec:
        return qv.parse_quiver(spec)
    raise InputError("unknown quiver %r (names: %s; or a file path)"
                     % (spec, ", ".join(sorted(NAMED_QUIVERS))))


def load_stability(spec, quiver):
    return st.parse_stability(_read_spec(spec), quiver)


def parse_qs(text):
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise InputError("--qs wants comma-separated integers, got %r"
                         % (text,))


def parse_poset_arg(text):
    """``"3;1<2,1<3"``: label count (or comma-separated labels), then
    ``a<b`` relations.  Labels are integers when they look like it."""
    head, _, rel = text.partition(";")
    head = head.strip()
    if not head:
        raise InputError("poset spec %r has no labels" % (text,))
    if head.isdigit():
        labels = tuple(range(1, int(head) + 1))
    else:
        raw = [part.strip() for part in head.split(",")]
        labels = tuple(int(p) if p.isdigit() else p for p in raw)
    known = set(labels)

    def one_label(tok):
        tok = tok.strip()
        val = int(tok) if tok.isdigit() else tok
        if val not in known:
            raise InputError("poset relation mentions unknown label %r"
                             % (tok,))
        return val

    pairs = []
    for chunk in rel.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "<" not in chunk:
            raise InputError("poset relation %r is not of the form a<b"
                             % (chunk,))
        a, b = chunk.split("<", 1)
        pairs.append((one_label(a), one_label(b)))
    return ps.FinitePoset(labels, pairs=pairs)


def parse_kappa_arg(text, poset, nvertices):
    """``"1:1,0;2:0,1"``: one dimension vector per poset label."""
    table = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise InputError("kappa entry %r is not label:d1,d2,..."
                             % (chunk,))
        label, _, body = chunk.partition(":")
        label = label.strip()
        key = int(label) if label.isdigit() else label
        try:
            vec = tuple(int(d) for d in body.split(","))
        except ValueError:
            raise InputError("kappa entry %r has a non-integer dimension"
                             % (chunk,))
        if len(vec) != nvertices or any(d < 0 for d in vec):
            raise InputError(
                "kappa entry %r wants %d nonnegative dimensions"
                % (chunk, nvertices))
        if key in table:
            raise InputError("kappa assigns %r twice" % (label,))
        table[key] = vec
    missing = [i for i in poset.labels if i not in table]
    if missing:
        raise InputError("kappa misses labels %r" % (missing,))
    return {i: table[i] for i in poset.labels}


def build_rep(selector, quiver, q):
    """``kind:args`` terms joined by ``+``:

    - ``semisimple:m1,m2,...``  multiplicities in vertex order
    - ``simple:<vertex>``
    - ``interval:lo,hi``        index range on a line-shaped quiver
    - ``jordan:p1,p2,...``      block sizes on the one-loop quiver
    """
    X = qv.zero_rep(quiver, q)
    for term in selector.split("+"):
        term = term.strip()
        kind, _, body = term.partition(":")
        if kind == "semisimple":
            mults = _int_list(body, term)
            if len(mults) != quiver.n:
                raise InputError(
                    "rep term %r wants %d multiplicities" % (term, quiver.n))
            piece = qv.semisimple_rep(quiver, q, mults)
        elif kind == "simple":
            piece = qv.simple_rep(quiver, q, body.strip())
        elif kind == "interval":
            lo_hi = _int_list(body, term)
            if len(lo_hi) != 2:
                raise InputError("rep term %r wants lo,hi" % (term,))
            piece = qv.interval_rep(quiver, q, lo_hi[0], lo_hi[1])
        elif kind == "jordan":
            piece = qv.jordan_rep(quiver, q, _int_list(body, term))
        else:
            raise InputError(
                "unknown rep term %r (kinds: semisimple, simple, "
                "interval, jordan)" % (term,))
        X = qv.direct_sum(X, piece)
    if X.total_dim == 0:
        raise InputError("rep selector %r builds the zero object"
                         % (selector,))
    return X


def _int_list(body, term):
    try:
        return [int(part) for part in body.split(",")]
    except ValueError:
        raise InputError("rep term %r has a non-integer argument" % (term,))


def _tau_text(value):
    return json.dumps(jsonable(value), sort_keys=True)


# --------------------------------------------------------------------------
# output plumbing
# --------------------------------------------------------------------------

def _emit(cfg, name, obj, csv_rows, stream):
    """Print the report and mirror it under --out.  ``csv_rows`` is
    (header, rows) for the tabular rendering."""
    if cfg.fmt == "json":
        text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header, rows = csv_rows
        writer.writerow(header)
        writer.writerows(rows)
        text = buf.getvalue()
    stream.write(text)
    if cfg.out_dir:
        os.makedirs(cfg.out_dir, exist_ok=True)
        path = os.path.join(cfg.out_dir, "%s.%s" % (name, cfg.fmt))
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# hn
# --------------------------------------------------------------------------

def cmd_hn(cfg, rep_selector, stream=None):
    stream = stream if stream is not None else sys.stdout
    quiver = load_quiver(cfg.quiver_spec)
    sc = load_stability(cfg.stability_spec, quiver)
    q = cfg.qs[0]
    X = build_rep(rep_selector, quiver, q)
    if X.total_dim > cfg.max_dim:
        raise SizeBoundError("total dimension %d exceeds --max-dim %d"
                             % (X.total_dim, cfg.max_dim))
    hn = st.hn_filtration(X, sc)
    factors = []
    for k in range(hn.length):
        factors.append({
            "index": k + 1,
            "stage_dims": list(qv.family_dims(hn.families[k + 1])),
            "factor_dims": list(hn.factor_reps[k].dims),
            "tau": _tau_text(hn.tau_values[k]),
        })
    obj = {
        "command": "hn",
        "quiver": quiver.name or qv.format_quiver(quiver),
        "q": q,
        "rep": rep_selector,
        "dims": list(X.dims),
        "length": hn.length,
        "factors": factors,
    }
    header = ["index", "stage_dims", "factor_dims", "tau"]
    rows = [[f["index"],
             " ".join(str(d) for d in f["stage_dims"]),
             " ".join(str(d) for d in f["factor_dims"]),
             f["tau"]] for f in factors]
    _emit(cfg, "hn", obj, (header, rows), stream)
    return EXIT_OK


# --------------------------------------------------------------------------
# moduli
# --------------------------------------------------------------------------

def _moduli_builder(cfg, poset, rep_selector):
    """Return (builder, quiver, default_kappa).  The ``witness`` selector
    is the order-remembering representation of the index poset itself
    (or of ``witness:<poset spec>``); its natural classes are the unit
    vectors in label order."""
    if rep_selector and rep_selector.split(":", 1)[0] == "witness":
        _, _, body = rep_selector.partition(":")
        wposet = parse_poset_arg(body) if body else poset
        X0 = cf.order_witness_rep(wposet, cfg.qs[0])
        quiver = X0.quiver
        n = quiver.n
        kappa = {i: tuple(1 if v == k else 0 for v in range(n))
                 for k, i in enumerate(poset.labels)}
        return (lambda q: cf.order_witness_rep(wposet, q)), quiver, kappa
    quiver = load_quiver(cfg.quiver_spec)
    if rep_selector:
        return (lambda q: build_rep(rep_selector, quiver, q)), quiver, None
    return None, quiver, None


def cmd_moduli(cfg, poset_spec, kappa_spec, rep_selector, flags,
               stream=None):
    stream = stream if stream is not None else sys.stdout
    poset = parse_poset_arg(poset_spec)
    builder, quiver, kappa = _moduli_builder(cfg, poset, rep_selector)
    if kappa_spec:
        kappa = parse_kappa_arg(kappa_spec, poset, quiver.n)
    if kappa is None:
        raise InputError("--kappa is required unless the rep is a witness")
    for f in flags:
        if f not in ("ss", "si", "st", "best"):
            raise InputError("unknown flag %r in --flags" % (f,))
    sc = load_stability(cfg.stability_spec, quiver)

    points = {}
    for q in cfg.qs:
        if builder is None:
            pts = cf.enumerate_config_moduli(
                None, poset, kappa, sc, quiver=quiver, q=q,
                max_poset=cfg.max_poset, max_dim=cfg.max_dim)
        else:
            X = builder(q)
            pts = cf.enumerate_config_moduli(
                X, poset, kappa, sc,
                max_poset=cfg.max_poset, max_dim=cfg.max_dim)
        rows = []
        for pt in pts:
            if flags and not all(pt.flags[f] for f in flags):
                continue
            rows.append({
                "aut_order": pt.aut_order,
                "flags": {k: pt.flags[k] for k in ("ss", "si", "st",
                                                   "best")},
                "family": repr(pt.family_key),
            })
        points[str(q)] = rows

    counts = []
    for require in MODULI_REQUIRE_ROWS:
        if builder is None:
            break
        row = {"require": list(require), "per_q": {}, "euler": None}
        for q in cfg.qs:
            row["per_q"][str(q)] = hl.count_systems(
                builder(q), poset, kappa, sc, require)
        try:
            fn = hl.system_count_function(builder, poset, kappa, sc,
                                          require)
            bound = hl.system_degree_bound(poset, kappa)
            row["euler"] = jsonable(hl._chi_of_counts(fn, bound))
        except (SizeBoundError, NonPolynomialCountError):
            row["euler"] = None
        counts.append(row)

    obj = {
        "command": "moduli",
        "quiver": quiver.name or qv.format_quiver(quiver),
        "poset": {"labels": [jsonable(i) for i in poset.labels],
                  "relations": sorted(map(list, poset.strict_pairs))},
        "kappa": {str(i): list(kappa[i]) for i in poset.labels},
        "rep": rep_selector or None,
        "flags": list(flags),
        "points": points,
        "counts": counts,
    }
    header = (["require"] + ["q=%d" % q for q in cfg.qs] + ["euler"])
    rows = [["+".join(r["require"]) or "(none)"]
            + [r["per_q"][str(q)] for q in cfg.qs]
            + [r["euler"] if r["euler"] is not None else ""]
            for r in counts]
    _emit(cfg, "moduli", obj, (header, rows), stream)
    return EXIT_OK


# --------------------------------------------------------------------------
# identities
# --------------------------------------------------------------------------

def _identity_instance(cfg, ident, overrides):
    defaults = hl.IDENTITIES[ident]["defaults"]
    inst = {}
    if overrides.get("max_poset") is not None and "labels" in defaults:
        inst["labels"] = overrides["max_poset"]
    if overrides.get("max_dim") is not None and "max_total" in defaults:
        inst["max_total"] = overrides["max_dim"]
    if overrides.get("qs") is not None and "qs" in defaults:
        inst["qs"] = list(overrides["qs"])
    return inst


def _identity_worker(job):
    ident, inst, perturb = job
    n_fn = hl.perturbed_n_fn() if perturb else None
    return hl.run_identity_check(ident, inst, n_fn=n_fn)


def cmd_identities(cfg, perturb, overrides, stream=None):
    stream = stream if stream is not None else sys.stdout
    ids = list(cfg.only) if cfg.only else hl.identity_ids()
    seen = set()
    ordered = []
    for ident in ids:
        if ident not in hl.IDENTITIES:
            raise InputError("unknown identity %r (known: %s)"
                             % (ident, ", ".join(hl.identity_ids())))
        if ident not in seen:
            seen.add(ident)
            ordered.append(ident)
    jobs = [(ident, _identity_instance(cfg, ident, overrides), perturb)
            for ident in ordered]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(_identity_worker, jobs))
    else:
        reports = [_identity_worker(job) for job in jobs]

    failed = 0
    for report in reports:
        if report["equal"]:
            stream.write("PASS %s\n" % report["identity_id"])
        else:
            failed += 1
            stream.write("FAIL %s\n" % report["identity_id"])
            for witness in report["witnesses"][:1]:
                stream.write("  witness: %s\n"
                             % json.dumps(witness, sort_keys=True))
    stream.write("passed %d/%d\n" % (len(reports) - failed, len(reports)))

    obj = {
        "command": "identities",
        "perturbed": bool(perturb),
        "reports": reports,
    }
    header = ["identity_id", "mode", "equal", "lhs", "rhs"]
    rows = [[r["identity_id"], r["mode"], str(r["equal"]).lower(),
             json.dumps(r["lhs"], sort_keys=True),
             json.dumps(r["rhs"], sort_keys=True)] for r in reports]
    if cfg.out_dir or cfg.fmt == "csv":
        _emit(cfg, "identities", obj, (header, rows),
              stream if cfg.fmt == "csv" else _NullStream())
    return EXIT_IDENTITY if failed else EXIT_OK


class _NullStream:
    def write(self, text):
        return len(text)


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def _add_common(parser):
    parser.add_argument("--quiver", default="a2",
                        help="a2/a3/a4/loop, a quiver file, or inline "
                             "'vertex ... arrow ...' text")
    parser.add_argument("--stability", default="trivial",
                        help="stability file or inline directive "
                             "(trivial | slope c=... r=... | polyorder "
                             "file=...)")
    parser.add_argument("--qs", default=None,
                        help="comma-separated field sizes (default 2,3)")
    parser.add_argument("--max-dim", type=int, default=None,
                        help="total dimension bound (default 4)")
    parser.add_argument("--max-poset", type=int, default=None,
                        help="index set size bound (default 4)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes for the identity suite")
    parser.add_argument("--out", default="",
                        help="directory to mirror the report into")
    parser.add_argument("--format", default="json",
                        choices=("json", "csv"), help="report format")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="repconf",
        description="filtrations, system moduli and identity checks for "
                    "quiver representations over small finite fields")
    sub = parser.add_subparsers(dest="command", required=True)

    p_hn = sub.add_parser("hn", help="canonical filtration of one rep")
    _add_common(p_hn)
    p_hn.add_argument("--rep", required=True,
                      help="e.g. semisimple:1,1 | interval:0,1 | "
                           "jordan:2,1 | sums via +")

    p_mod = sub.add_parser("moduli", help="system moduli tables")
    _add_common(p_mod)
    p_mod.add_argument("--poset", required=True,
                       help="e.g. '3;1<2,1<3' or 'a,b;a<b'")
    p_mod.add_argument("--kappa", default="",
                       help="per-label classes, e.g. '1:1,0;2:0,1'")
    p_mod.add_argument("--rep", default="",
                       help="rep selector, or 'witness' for the "
                            "order-remembering representation")
    p_mod.add_argument("--flags", default="",
                       help="comma subset of ss,si,st,best to filter "
                            "the point listing")

    p_id = sub.add_parser("identities", help="run the identity suite")
    _add_common(p_id)
    p_id.add_argument("--only", default="",
                      help="comma-separated identity ids")
    p_id.add_argument("--perturb-coefficients", action="store_true",
                      help="negative control: corrupt one chain-count "
                           "coefficient and expect failures")
    return parser


def _config_from(args):
    cfg = RunConfig(
        quiver_spec=args.quiver,
        stability_spec=args.stability,
        qs=parse_qs(args.qs) if args.qs else (2, 3),
        max_dim=args.max_dim if args.max_dim is not None else 4,
        max_poset=args.max_poset if args.max_poset is not None else 4,
        only=tuple(s.strip() for s in getattr(args, "only", "").split(",")
                   if s.strip()),
        jobs=args.jobs,
        out_dir=args.out,
        fmt=args.format,
    )
    return cfg.validate()


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from(args)
        if args.command == "hn":
            return cmd_hn(cfg, args.rep)
        if args.command == "moduli":
            flags = tuple(s.strip() for s in args.flags.split(",")
                          if s.strip())
            return cmd_moduli(cfg, args.poset, args.kappa, args.rep,
                              flags)
        overrides = {"max_poset": args.max_poset, "max_dim": args.max_dim,
                     "qs": parse_qs(args.qs) if args.qs else None}
        return cmd_identities(cfg, args.perturb_coefficients, overrides)
    except InputError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_INPUT
    except (SizeBoundError, NonPolynomialCountError,
            UnsupportedError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_BOUND
    except RepconfError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

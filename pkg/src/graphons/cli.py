"""Command-line interface.

Subcommands: density, metrics, purify, spectral, approx, aut, orbits,
transitive, connrank, cayley, examples, converge, sample.  Every command has
a human table mode and a --json machine mode; series commands emit CSV and
can render a figure next to it with --plot.  Exit codes: 0 success, 2 bad
input, 3 cap exceeded.

Step indices and graph nodes are 1-based on the command line, matching the
graph text format.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import cayley as cay
from . import density as dens
from . import graphs as gr
from . import metrics as met
from . import serialize as ser
from . import spectral as spec
from . import stepgraphon as sg
from . import symmetry as sym
from .errors import CapExceeded, GraphonError, InputError

_INT_PARAMS = {"n", "q", "seed", "entry_denominator", "max_weight"}


def _parse_value(key: str, text: str):
    if key in _INT_PARAMS:
        return int(text)
    return ser.parse_rational(text)


def parse_generate(spec_str: str) -> sg.StepGraphon:
    """Build a graphon from a spec like 'nonlip:eps=1/100' or
    'cyclic:n=40,alpha=1/4'."""
    name, _, rest = spec_str.partition(":")
    params = {}
    if rest:
        for part in rest.split(","):
            key, sep, val = part.partition("=")
            if not sep:
                raise InputError(f"bad generator parameter {part!r}")
            params[key.strip()] = _parse_value(key.strip(), val)
    return sg.generator(name.strip(), **params)


def _resolve_graphon(args) -> sg.StepGraphon:
    if getattr(args, "graphon", None):
        w = ser.load_graphon(args.graphon)
    elif getattr(args, "generate", None):
        w = parse_generate(args.generate)
    else:
        raise InputError("provide a graphon with --graphon FILE or --generate SPEC")
    if getattr(args, "mode", None) == "float":
        w = w.to_float()
    return w


def _resolve_motif(args) -> gr.LabeledGraph:
    if getattr(args, "motif", None):
        return gr.named_graph(args.motif)
    if getattr(args, "motif_file", None):
        return ser.load_graph(args.motif_file)
    raise InputError("provide a motif with --motif NAME or --motif-file FILE")


def _caps(args) -> dens.Caps:
    max_assign = getattr(args, "max_assignments", None) or dens.DEFAULT_CAPS.max_assignments
    return dens.Caps(max_motif_nodes=getattr(args, "max_motif_nodes", None)
                     or dens.DEFAULT_CAPS.max_motif_nodes,
                     max_assignments=max_assign)


def _emit(args, obj: dict, human: str):
    if args.json:
        print(json.dumps(obj))
    else:
        print(human)


def _num(x):
    return ser.number_to_json(x)


def _matrix_json(m) -> list:
    return [[_num(x) for x in row] for row in np.asarray(m)]


def _write_text(args, text: str):
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands ---------------------------------------------------------------

def cmd_density(args) -> int:
    w = _resolve_graphon(args)
    caps = _caps(args)
    anchor = ()
    if args.anchor:
        anchor = tuple(int(x) - 1 for x in args.anchor.split(","))
    if args.quantum:
        qg = gr.builtin_quantum(args.quantum)
        value = dens.t_quantum(qg, w, anchor, caps=caps)
        label = f"t_{{{args.anchor or ''}}}({args.quantum}, W)"
    else:
        motif = _resolve_motif(args)
        if anchor:
            value = dens.t_restricted(motif, w, anchor, caps=caps)
        else:
            value = dens.t(motif, w, caps=caps)
        label = f"t(motif, W)" if not anchor else f"t_{{{args.anchor}}}(motif, W)"
    _emit(args, {"value": _num(value)}, f"{label} = {_num(value)}")
    return 0


def cmd_metrics(args) -> int:
    w = _resolve_graphon(args)
    which = args.metric or "all"
    out = {}
    if which in ("r", "all"):
        out["r"] = _matrix_json(met.neighborhood_metric(w).values)
    if which in ("d", "all"):
        d = met.l2_metric(w)
        out["d"] = {"values": [[float(x) for x in row] for row in d.values],
                    "squared": _matrix_json(d.squared)}
    if which in ("rbar", "all"):
        out["rbar"] = _matrix_json(met.similarity_metric(w).values)
    lines = []
    for tag, data in out.items():
        lines.append(f"[{tag}]")
        rows = data["values"] if isinstance(data, dict) else data
        for row in rows:
            lines.append("  " + "  ".join(str(x) for x in row))
    _emit(args, out, "\n".join(lines))
    return 0


def cmd_purify(args) -> int:
    w = _resolve_graphon(args)
    tol = ser.parse_rational(args.tol) if args.tol and w.mode == "exact" \
        else (float(args.tol) if args.tol else None)
    pure, mapping = met.merge_twins(w, tol=tol)
    obj = {
        "graphon": ser.graphon_to_obj(pure),
        "partition": [None if m is None else m + 1 for m in mapping],
        "merged_steps": w.q - pure.q,
    }
    _emit(args, obj, f"pure graphon on {pure.q} steps "
                     f"(merged {w.q - pure.q} of {w.q}); partition "
                     f"{obj['partition']}")
    return 0


def cmd_spectral(args) -> int:
    w = _resolve_graphon(args)
    decomp = spec.decompose(w, rank_tol=float(args.rank_tol) if args.rank_tol else None)
    obj = {"eigenvalues": [float(v) for v in decomp.eigenvalues],
           "rank": decomp.rank}
    lines = ["eigenvalues: " + " ".join(f"{v:.12g}" for v in decomp.eigenvalues)]
    if args.threshold:
        emb = spec.embedding(w, float(args.threshold), decomp=decomp)
        kern = spec.truncate(w, float(args.threshold), decomp=decomp)
        lo, hi = kern.value_range()
        obj["embedding"] = {"dimension": emb.dimension,
                            "points": [[float(x) for x in row] for row in emb.points],
                            "weights": [float(x) for x in emb.weights]}
        obj["truncation_range"] = [float(lo), float(hi)]
        lines.append(f"embedding dimension {emb.dimension}; "
                     f"truncated kernel range [{float(lo):.6g}, {float(hi):.6g}]")
    if args.out:
        buf = io.StringIO()
        buf.write("index,eigenvalue\n")
        for i, v in enumerate(decomp.eigenvalues):
            buf.write(f"{i + 1},{v!r}\n")
        with open(args.out, "w") as fh:
            fh.write(buf.getvalue())
    _emit(args, obj, "\n".join(lines))
    return 0


def cmd_approx(args) -> int:
    w = _resolve_graphon(args)
    ns = [int(x) for x in args.ns.split(",")]
    rows = []
    for n in ns:
        _, err = met.un_approximation(w, n)
        rows.append((n, float(err)))
    csv_text = "n,l1_error\n" + "".join(f"{n},{err!r}\n" for n, err in rows)
    if args.json:
        print(json.dumps({"series": [{"n": n, "l1_error": e} for n, e in rows]}))
    else:
        _write_text(args, csv_text)
    if args.plot:
        from .plotting import plot_series
        plot_series(args.plot,
                    {"l1 error": ([n for n, _ in rows], [float(e) for _, e in rows])},
                    xlabel="n", ylabel="weighted L1 error",
                    title="kernel recovery error", logy=True)
    return 0


def cmd_aut(args) -> int:
    w = _resolve_graphon(args)
    pure, mapping = met.merge_twins(w)
    group = sym.automorphisms(pure)
    obj = {
        "purified_steps": pure.q,
        "partition": [None if m is None else m + 1 for m in mapping],
        "order": group.order,
        "transitive": group.is_transitive(),
        "node_orbits": [[x + 1 for x in orb] for orb in group.node_orbits()],
        "permutations": [[x + 1 for x in g] for g in group.elements],
    }
    _emit(args, obj, f"automorphism group order {group.order} on {pure.q} steps; "
                     f"transitive: {group.is_transitive()}; node orbits: "
                     f"{obj['node_orbits']}")
    return 0


def cmd_orbits(args) -> int:
    w = _resolve_graphon(args)
    pure, _ = met.merge_twins(w)
    group = sym.automorphisms(pure)
    orbs = sym.orbits(group, args.k)
    obj = {"k": args.k, "count": len(orbs),
           "orbits": [[[x + 1 for x in tup] for tup in orb] for orb in orbs]}
    _emit(args, obj, f"{len(orbs)} orbits on {args.k}-tuples of {pure.q} steps")
    return 0


def cmd_transitive(args) -> int:
    w = _resolve_graphon(args)
    rep = sym.node_transitivity_report(w, max_nodes=args.max_nodes or 5)
    obj = {
        "aut_transitive": rep.aut_transitive,
        "densities_constant": rep.densities_constant,
        "algebra_dim_one": rep.algebra_dim_one,
        "connection_rank_one": rep.connection_rank_one,
        "cauchy_schwarz_equality": rep.cauchy_schwarz_equality,
        "all_agree": rep.all_agree,
        "node_transitive": rep.node_transitive,
        "details": {k: (v if not isinstance(v, tuple) else list(v))
                    for k, v in rep.details.items()},
    }
    _emit(args, obj,
          "node-transitivity conditions (aut, densities, algebra, rank, CS): "
          f"{rep.verdicts}; agree: {rep.all_agree}")
    return 0


def cmd_connrank(args) -> int:
    w = _resolve_graphon(args)
    cm = sym.connection_matrix(w, args.k, args.max_nodes,
                               independent_only=args.independent)
    obj = {"k": args.k, "graphs": cm.size, "max_nodes": cm.max_nodes,
           "independent_labels": cm.independent_only,
           "rank": cm.rank(), "psd": cm.psd()}
    _emit(args, obj, f"connection matrix M_{args.k} over {cm.size} graphs "
                     f"(<= {cm.max_nodes} nodes): rank {obj['rank']}, "
                     f"psd: {obj['psd']}")
    return 0


def _resolve_group(args) -> cay.FiniteGroup:
    if args.group_file:
        return ser.load_group(args.group_file)
    if args.group:
        name, _, param = args.group.partition(":")
        if name == "product":
            raise InputError("build products via a group file")
        return cay.group_builtin(name, int(param))
    raise InputError("provide a group with --group name:n or --group-file FILE")


def cmd_cayley(args) -> int:
    if args.from_graphon or args.generate:
        if args.from_graphon:
            w = ser.load_graphon(args.from_graphon)
        else:
            w = parse_generate(args.generate)
        pure, _ = met.merge_twins(w)
        conv = cay.transitive_to_cayley(pure, motif_max_nodes=args.max_nodes or 4)
        obj = {
            "group": ser.group_to_obj(conv.group) if args.full_group else
            {"order": conv.group.order},
            "connection": [_num(x) for x in conv.connection],
            "densities_match": conv.densities_match,
            "motifs_checked": conv.motifs_checked,
            "translation_invariant": conv.translation_invariant,
            "graphon": ser.graphon_to_obj(conv.graphon) if args.full_group else None,
        }
        _emit(args, obj, f"Cayley form on group of order {conv.group.order}; "
                         f"weak isomorphism verified on {conv.motifs_checked} motifs: "
                         f"{conv.densities_match}")
        return 0
    group = _resolve_group(args)
    if args.f:
        f = [ser.parse_rational(x) for x in args.f.split(",")]
    else:
        f = cay.symmetric_connection(group, seed=args.seed or 0)
    w = cay.cayley_graphon(group, f)
    obj = {"order": group.order, "connection": [_num(x) for x in f],
           "graphon": ser.graphon_to_obj(w)}
    _emit(args, obj, f"Cayley graphon on {group.order} steps")
    return 0


def cmd_examples(args) -> int:
    if args.which == "nonlip":
        eps = ser.parse_rational(args.eps or "1/100")
        w = sg.nonlip(eps)
        k2dot = gr.LabeledGraph(2, 1, [(0, 1)])
        t_a = dens.t_restricted(k2dot, w, (2,))
        t_b = dens.t_restricted(k2dot, w, (3,))
        r = met.neighborhood_metric(w)
        rbar_ab = met.similarity_distance(w, 2, 3)
        obj = {"eps": _num(eps), "t_a": _num(t_a), "t_b": _num(t_b),
               "r_ab": _num(r.values[2][3]), "rbar_ab": _num(rbar_ab),
               "rbar_over_eps": float(rbar_ab / eps),
               "graphon": ser.graphon_to_obj(w)}
        human = (f"nonlip(eps={eps}): t_a = {_num(t_a)}, t_b = {_num(t_b)}, "
                 f"r(a,b) = {_num(r.values[2][3])}, rbar(a,b) = {_num(rbar_ab)}"
                 f" = {float(rbar_ab / eps):.4f} * eps")
    elif args.which == "dyadic":
        depth = int(args.depth or 3)
        w = sg.dyadic(depth)
        c2dot = gr.LabeledGraph(2, 1, [(0, 1), (0, 1)], "multi")
        band = [dens.t_restricted(c2dot, w, (k,)) for k in range(depth)]
        residual = dens.t_restricted(c2dot, w, (depth,))
        rbars = [met.similarity_distance(w, k, depth) for k in range(depth)]
        obj = {"depth": depth, "steps": w.q,
               "band_c2_density": [_num(x) for x in band],
               "residual_c2_density": _num(residual),
               "rbar_band_residual": [_num(x) for x in rbars]}
        human = (f"dyadic({depth}) on {w.q} steps: t_u(C2*) = "
                 f"{[_num(x) for x in band]} on bands, {_num(residual)} on the "
                 f"residual band; rbar(band k, residual) = {[_num(x) for x in rbars]}")
    elif args.which == "cyclic":
        n = int(args.n or 20)
        alpha = ser.parse_rational(args.alpha or "1/4")
        w = sg.cyclic(n, alpha)
        k2 = gr.complete(2)
        density = dens.t(k2, w)
        obj = {"n": n, "alpha": _num(alpha), "edge_density": _num(density),
               "graphon": ser.graphon_to_obj(w) if args.json else None}
        human = f"cyclic({n}, {alpha}): edge density {_num(density)}"
    else:
        raise InputError(f"unknown example {args.which!r}")
    _emit(args, obj, human)
    return 0


def cmd_converge(args) -> int:
    if args.family != "cyclic":
        raise InputError("only the cyclic family is implemented")
    alpha = ser.parse_rational(args.alpha)
    ns = [int(x) for x in args.ns.split(",")]
    motifs = [(name, gr.named_graph(name)) for name in args.motifs.split(",")]
    limit = sg.circle(args.limit_steps, alpha)
    caps = dens.Caps(max_motif_nodes=8, max_assignments=10 ** 11)
    limits = {name: dens.t(m, limit, caps=caps) for name, m in motifs}
    rows = []
    plot_data: dict[str, tuple[list, list]] = {name: ([], []) for name, _ in motifs}
    for n in ns:
        w = sg.cyclic(n, alpha)
        for name, m in motifs:
            val = dens.t(m, w, caps=caps)
            gap = abs(val - limits[name])
            rows.append({"family": "cyclic", "n": n, "motif": name,
                         "value": _num(val), "limit": _num(limits[name]),
                         "gap": _num(gap)})
            plot_data[name][0].append(n)
            plot_data[name][1].append(float(gap))
        resid = _transitivity_residual(w, args.cond_max_nodes, caps)
        rows.append({"family": "cyclic", "n": n, "motif": "cond_v_residual",
                     "value": _num(resid), "limit": "", "gap": ""})
    csv_text = "family,n,motif,value,limit,gap\n" + "".join(
        f"{r['family']},{r['n']},{r['motif']},{r['value']},{r['limit']},{r['gap']}\n"
        for r in rows)
    if args.json:
        print(json.dumps({"rows": rows}))
    else:
        _write_text(args, csv_text)
    if args.plot:
        from .plotting import plot_series
        plot_series(args.plot, plot_data, xlabel="n",
                    ylabel=f"|t(F, G_n) - t(F, circle({args.limit_steps}))|",
                    title=f"cyclic family convergence, alpha = {alpha}", logy=True)
    return 0


def _transitivity_residual(w, max_nodes: int, caps) -> Fraction:
    """max |t(F^2) t(H^2) - t(FH)^2| over 1-labeled pairs."""
    cm = sym.connection_matrix(w, 1, max_nodes, independent_only=True, caps=caps)
    worst = Fraction(0) if w.mode == "exact" else 0.0
    n = cm.size
    for i in range(n):
        for j in range(i, n):
            gap = abs(cm.matrix[i, i] * cm.matrix[j, j] - cm.matrix[i, j] ** 2)
            if gap > worst:
                worst = gap
    return worst


def cmd_sample(args) -> int:
    w = _resolve_graphon(args)
    g = sg.sample_wrandom(w, args.n, seed=args.seed or 0)
    text = ser.graph_to_text(g)
    if args.json:
        print(json.dumps(ser.graph_to_obj(g)))
    else:
        _write_text(args, text)
    return 0


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphons",
        description="Step-graphon computations: densities, metrics, spectra, "
                    "automorphism orbits, Cayley graphons.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=("exact", "float"),
                        help="numeric mode; float converts exact inputs")
    common.add_argument("--tol", help="tolerance override (purify, ranks)")
    common.add_argument("--max-nodes", dest="max_nodes", type=int,
                        help="motif family node cap")
    common.add_argument("--threads", type=int, default=1,
                        help="reserved; computations are single-threaded "
                             "and byte-deterministic")
    common.add_argument("--seed", type=int, help="seed for randomized steps")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    src = argparse.ArgumentParser(add_help=False)
    src.add_argument("--graphon", help="graphon JSON file")
    src.add_argument("--generate",
                     help="generator spec, e.g. nonlip:eps=1/100 or "
                          "cyclic:n=40,alpha=1/4 or random:q=5,seed=7")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", parents=[common, src],
                       help="homomorphism density t(F, W) or restricted density")
    p.add_argument("--motif", help="named motif (K3, P4, C5, petersen, frucht)")
    p.add_argument("--motif-file", help="motif in graph text format")
    p.add_argument("--quantum", choices=("h", "f"),
                   help="builtin 2-labeled quantum graph")
    p.add_argument("--anchor", help="1-based anchor steps, e.g. 3 or 1,2")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("metrics", parents=[common, src],
                       help="neighborhood, L2, and similarity metric matrices")
    p.add_argument("--metric", choices=("r", "d", "rbar", "all"))
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("purify", parents=[common, src],
                       help="merge twin steps and drop zero-weight steps")
    p.set_defaults(func=cmd_purify)

    p = sub.add_parser("spectral", parents=[common, src],
                       help="eigenvalues, truncation, spectral embedding")
    p.add_argument("--rank-tol", dest="rank_tol")
    p.add_argument("--threshold", help="truncation threshold lambda")
    p.add_argument("--out", help="write eigenvalue CSV here")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("approx", parents=[common, src],
                       help="kernel recovery error series (CSV)")
    p.add_argument("--ns", default="5,10,25,50,100,200",
                   help="comma-separated approximation orders")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--plot", help="render the error series to this image file")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("aut", parents=[common, src],
                       help="automorphism group of the purified graphon")
    p.set_defaults(func=cmd_aut)

    p = sub.add_parser("orbits", parents=[common, src],
                       help="orbits of the automorphism group on k-tuples")
    p.add_argument("-k", type=int, default=1)
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("transitive", parents=[common, src],
                       help="the five node-transitivity conditions")
    p.set_defaults(func=cmd_transitive)

    p = sub.add_parser("connrank", parents=[common, src],
                       help="connection matrix rank and PSD check")
    p.add_argument("-k", type=int, default=1)
    p.add_argument("--independent", action="store_true",
                   help="restrict to nonadjacent labeled nodes")
    p.set_defaults(func=cmd_connrank)

    p = sub.add_parser("cayley", parents=[common, src],
                       help="build a Cayley graphon or convert a transitive one")
    p.add_argument("--group", help="builtin group, e.g. cyclic:7 or dihedral:5")
    p.add_argument("--group-file", help="group table JSON")
    p.add_argument("--f", help="comma-separated connection values f(g)")
    p.add_argument("--from-graphon", dest="from_graphon",
                   help="convert this node-transitive graphon instead")
    p.add_argument("--full-group", action="store_true",
                   help="include the full table and converted graphon in JSON")
    p.set_defaults(func=cmd_cayley)

    p = sub.add_parser("examples", parents=[common],
                       help="the worked example graphons with headline values")
    p.add_argument("which", choices=("nonlip", "dyadic", "cyclic"))
    p.add_argument("--eps", help="nonlip epsilon (default 1/100)")
    p.add_argument("--depth", help="dyadic truncation depth (default 3)")
    p.add_argument("--n", help="cyclic node count")
    p.add_argument("--alpha", help="cyclic/circle reach (default 1/4)")
    p.set_defaults(func=cmd_examples)

    p = sub.add_parser("converge", parents=[common],
                       help="density convergence of a generated family (CSV)")
    p.add_argument("--family", default="cyclic")
    p.add_argument("--alpha", required=True)
    p.add_argument("--ns", required=True, help="comma-separated sizes")
    p.add_argument("--motifs", default="K2,P3,C4")
    p.add_argument("--limit-steps", dest="limit_steps", type=int, default=256)
    p.add_argument("--cond-max-nodes", dest="cond_max_nodes", type=int, default=4,
                   help="motif cap for the transitivity residual")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--plot", help="render the gap series to this image file")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("sample", parents=[common, src],
                       help="sample a W-random graph (graph text format)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_sample)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3
    except (GraphonError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

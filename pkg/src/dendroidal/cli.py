"""Command-line surface: trees, tree morphisms, operads, presheaves, cells, signs.

Inputs are JSON, inline or by file path; outputs are JSON (default), DOT or
text.  Exit codes: 0 on success, 2 on validation errors, 3 when a scale
limit or an Unknown verdict stops the computation.  The environment
variable ``DENDROIDAL_BOUND`` sets the default vertex bound.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import dold_kan, dsets, dtensor, omega, operads, presentations, trees, wcon

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SCALE = 3


class CliError(Exception):
    def __init__(self, message, code=EXIT_INVALID):
        super().__init__(message)
        self.code = code


def _load_json(value: str):
    if value is None:
        raise CliError("missing JSON input")
    if os.path.exists(value):
        with open(value) as fh:
            return json.load(fh)
    try:
        return json.loads(value)
    except json.JSONDecodeError as exc:
        raise CliError(f"not a file and not valid JSON: {exc}") from exc


def _tree(value: str) -> trees.Tree:
    return trees.tree_from_json(_load_json(value))


def _planar(value: str) -> trees.PlanarTree:
    data = _load_json(value)
    return trees.planar_tree_from_json(data)


def _emit(args, payload, dot: str | None = None, text: str | None = None) -> None:
    fmt = getattr(args, "format", "json")
    if fmt == "dot":
        if dot is None:
            raise CliError("no DOT rendering for this command")
        print(dot)
    elif fmt == "text":
        print(text if text is not None else json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))


def _default_bound(args) -> int:
    if getattr(args, "bound", None) is not None:
        return args.bound
    return int(os.environ.get("DENDROIDAL_BOUND", "3"))


def _named_operad(name: str, tree_arg: str | None):
    if name == "as":
        return operads.permutation_operad()
    if name == "comm":
        return operads.terminal_operad()
    if name == "one-per-arity":
        return wcon.one_per_arity_operad()
    if name == "omega":
        if tree_arg is None:
            raise CliError("--tree is required with the tree operad")
        return operads.free_tree_operad(_tree(tree_arg))
    raise CliError(f"unknown operad {name!r}; use as, comm, one-per-arity or omega")


def _named_presentation(value: str) -> presentations.OperadPresentation:
    if value == "as":
        return presentations.associative_presentation()
    if value == "comm":
        return presentations.commutative_presentation()
    if value == "as-as":
        As = presentations.associative_presentation()
        return presentations.bv_tensor_presentation(As, As)
    return presentations.presentation_from_json(_load_json(value))


# -- tree ------------------------------------------------------------------


def cmd_tree_validate(args):
    t = _tree(args.tree)
    _emit(args, {"ok": True, "edges": len(t.edges), "vertices": t.n_vertices,
                 "leaves": sorted(t.leaves), "code": trees.canonical_code(t)})


def cmd_tree_render(args):
    data = _load_json(args.tree)
    t = trees.any_tree_from_json(data)
    _emit(args, t.to_json(), dot=trees.to_dot(t), text=trees.tree_to_text(t))


def cmd_tree_enumerate(args):
    out = trees.enumerate_trees(
        args.max_vertices,
        planar=args.planar,
        reduced=args.reduced,
        max_edges=args.max_edges,
        leaves=args.leaves,
        nullary=not args.no_nullary,
    )
    payload = {
        "count": len(out),
        "codes": [trees.canonical_code(t) for t in out],
    }
    _emit(args, payload, text="\n".join(payload["codes"]))


# -- omega -----------------------------------------------------------------


def cmd_omega_homs(args):
    fs = omega.hom_set(_tree(args.s), _tree(args.t))
    _emit(args, {"count": len(fs), "morphisms": [f.to_json()["edge_map"] for f in fs]})


def cmd_omega_classify(args):
    f = omega.morphism_from_json(_load_json(args.map))
    kind, witness = omega.classify(f)
    _emit(args, {"kind": kind, "witness": witness})


def cmd_omega_factorize(args):
    f = omega.morphism_from_json(_load_json(args.map))
    fac = omega.factorize(f)
    payload = {
        "degeneracies": [d.witness for d in fac.degeneracies],
        "iso": {e: fac.iso.edge_map[e] for e in sorted(fac.iso.edge_map)},
        "faces": [face.label for face in fac.faces],
    }
    chain = " ; ".join(
        ["sigma:" + d.witness for d in fac.degeneracies]
        + ["iso"]
        + [face.label for face in fac.faces]
    )
    _emit(args, payload, text=chain)


def cmd_omega_faces(args):
    t = _tree(args.tree)
    payload = {
        "faces": [f.label for f in omega.faces(t)],
        "codim2": len(omega.subfaces2(t)),
    }
    _emit(args, payload)


# -- operad ----------------------------------------------------------------


def cmd_operad_tabulate(args):
    pres = _named_presentation(args.presentation)
    result = presentations.tabulate(
        pres, args.arity, args.term_size, args.closure_size
    )
    if isinstance(result, presentations.Unknown):
        raise CliError(result.reason, EXIT_SCALE)
    counts = {}
    for (dom, cod), ops in result.hom_table(args.arity).items():
        counts[f"{list(dom)!r}->{cod!r}"] = len(ops)
    _emit(args, {"profiles": counts})


def cmd_operad_functors(args):
    src = _named_operad(args.source, args.tree)
    tgt = _named_operad(args.target, args.target_tree)
    fs = operads.enumerate_functors(src, tgt, max_arity=args.arity)
    _emit(args, {"count": len(fs)})


def cmd_operad_bv_tensor(args):
    p = _named_presentation(args.p)
    q = _named_presentation(args.q)
    tensor = presentations.bv_tensor_presentation(p, q)
    _emit(args, presentations.presentation_to_json(tensor))


def cmd_operad_equal(args):
    pres = _named_presentation(args.presentation)
    t1 = presentations.term_from_json(_load_json(args.left))
    t2 = presentations.term_from_json(_load_json(args.right))
    verdict = presentations.terms_equal(pres, t1, t2, args.budget)
    if verdict == "unknown":
        raise CliError("Unknown: budget exhausted before a verdict", EXIT_SCALE)
    _emit(args, {"equal": verdict})


def cmd_operad_transfer(args):
    rng = random.Random(args.seed)
    E = operads.endomorphism_operad({"x": (0, 1)})
    src = operads.free_tree_operad(trees.corolla(2))
    cat = operads.j_upper(E)
    algebras = operads.enumerate_functors(src, E, max_arity=2)
    F = algebras[rng.randrange(len(algebras))]
    family = {c: rng.choice(cat.isos_from(F.color_map[c])) for c in src.colors}
    G, witness = operads.transfer_algebra(F, family)
    G.validate(max_arity=2)
    _emit(args, {"natural": witness["natural"], "colors": len(src.colors)})


# -- dset ------------------------------------------------------------------


def cmd_dset_nerve(args):
    P = _named_operad(args.operad, args.tree)
    X = dsets.nerve(P, dsets.shape_universe(_default_bound(args), args.max_edges))
    payload = {
        "within_bound": _default_bound(args),
        "shapes": len(X.universe),
        "dendrices": X.total_size(),
    }
    _emit(args, payload)


def cmd_dset_horns(args):
    P = _named_operad(args.operad, None)
    t = _tree(args.tree)
    universe = dsets.shape_universe(_default_bound(args), args.max_edges)
    X = dsets.nerve(P, universe)
    horns = {}
    for alpha in dsets.inner_horns(t):
        fams = dsets.horn_families(X, t, alpha)
        horns[alpha.label] = {
            "families": len(fams),
            "fillers": [len(dsets.fill_horn(X, fam)) for fam in fams],
        }
    _emit(args, {"within_bound": _default_bound(args), "horns": horns})


def cmd_dset_kan(args):
    P = _named_operad(args.operad, args.tree)
    bound = _default_bound(args)
    X = dsets.nerve(P, dsets.shape_universe(bound, args.max_edges))
    _emit(args, {"within_bound": bound, "inner_kan": dsets.is_inner_kan(X)})


def cmd_dset_strict(args):
    P = _named_operad(args.operad, args.tree)
    bound = _default_bound(args)
    X = dsets.nerve(P, dsets.shape_universe(bound, args.max_edges))
    _emit(args, {"within_bound": bound, "strict": dsets.is_strict(X)})


def cmd_dset_normal(args):
    P = _named_operad(args.operad, args.tree)
    bound = _default_bound(args)
    X = dsets.nerve(P, dsets.shape_universe(bound, args.max_edges))
    witness = dsets.normality_witness(X)
    payload = {"within_bound": bound, "normal": witness is None}
    if witness is not None:
        tree, _, g = witness
        payload["witness"] = {
            "shape": trees.canonical_code(tree),
            "automorphism": {e: g.edge_map[e] for e in sorted(g.edge_map)},
        }
    _emit(args, payload)


def cmd_dset_tau(args):
    t = _tree(args.tree)
    bound = max(_default_bound(args), t.n_vertices)
    X = dsets.representable(t, dsets.shape_universe(bound, args.max_edges))
    pres = dsets.tau_presentation(X)
    _emit(args, presentations.presentation_to_json(pres))


def cmd_dset_slice(args):
    P = _named_operad(args.operad, args.tree)
    bound = _default_bound(args)
    X = dsets.nerve(P, dsets.shape_universe(bound, args.max_edges))
    S = dsets.i_upper(X)
    _emit(
        args,
        {
            "within_bound": bound,
            "simplices": {n: len(S.sets[n]) for n in sorted(S.sets)},
        },
    )


# -- tensor ----------------------------------------------------------------


def cmd_tensor_percolation(args):
    S, T = _tree(args.s), _tree(args.t)
    poset = dtensor.percolation_poset(S, T)
    top, bottom = poset.top_and_bottom()
    payload = {
        "elements": len(poset),
        "covers": [[i + 1, j + 1] for i, j in poset.covers],
        "top": top + 1,
        "bottom": bottom + 1,
        "trees": [dtensor.percolation_tree_json(p) for p in poset.elements],
    }
    _emit(args, payload, dot=poset.to_dot())


def cmd_tensor_representables(args):
    S, T = _tree(args.s), _tree(args.t)
    bound = _default_bound(args)
    universe = dsets.shape_universe(bound, args.max_edges)
    X = dtensor.tensor_representables(S, T, universe)
    _emit(
        args,
        {
            "within_bound": bound,
            "dendrices": {
                trees.canonical_code(shape): len(X.dendrices(shape))
                for shape in universe
                if X.dendrices(shape)
            },
        },
    )


# -- w ---------------------------------------------------------------------


def cmd_w_cells(args):
    poset = wcon.w_cells(wcon.one_per_arity_operad(), args.n)
    payload = {
        "cells_by_dim": poset.cell_counts(),
        "euler": poset.euler_characteristic(),
    }
    _emit(args, payload, dot=poset.to_dot())


def cmd_w_assoc(args):
    summary = wcon.associahedron_summary(args.n)
    payload = {
        "vertices": summary["vertex_count"],
        "edges": summary["edge_count"],
        "euler": summary["euler_characteristic"],
        "cells_by_dim": summary["cells_by_dim"],
        "binary_vertices": summary["binary_vertex_count"],
    }
    _emit(args, payload)


def cmd_w_cat(args):
    _emit(args, wcon.w_cat_hom(args.n))


# -- signs -----------------------------------------------------------------


def cmd_signs_solve(args):
    signs = dold_kan.solve_signs(args.vertices, args.max_edges, gauge=args.gauge)
    if isinstance(signs, dold_kan.Infeasible):
        raise CliError(signs.reason, EXIT_SCALE)
    _emit(args, {"signs": signs.to_json()})


def cmd_signs_check(args):
    signs = dold_kan.solve_signs(args.vertices, args.max_edges)
    if isinstance(signs, dold_kan.Infeasible):
        raise CliError(signs.reason, EXIT_SCALE)
    universe = dold_kan.planar_universe(args.vertices, args.max_edges)
    failure = dold_kan.first_d_squared_failure(universe, signs)
    _emit(
        args,
        {
            "d_squared_zero": failure is None,
            "shapes_checked": len(universe),
        },
    )


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dendroidal",
        description="Desk-scale trees, operads and dendroidal sets.",
    )
    sub = parser.add_subparsers(dest="group", required=True)

    def add(group_parser, name, fn, **arguments):
        p = group_parser.add_parser(name)
        for flag, kw in arguments.items():
            p.add_argument("--" + flag.replace("_", "-"), **kw)
        p.add_argument("--format", choices=["json", "dot", "text"], default="json")
        p.set_defaults(fn=fn)
        return p

    tree = sub.add_parser("tree").add_subparsers(dest="cmd", required=True)
    add(tree, "validate", cmd_tree_validate, tree={"required": True})
    add(tree, "render", cmd_tree_render, tree={"required": True})
    add(
        tree,
        "enumerate",
        cmd_tree_enumerate,
        max_vertices={"type": int, "required": True},
        planar={"action": "store_true"},
        reduced={"action": "store_true"},
        no_nullary={"action": "store_true"},
        leaves={"type": int},
        max_edges={"type": int},
    )

    om = sub.add_parser("omega").add_subparsers(dest="cmd", required=True)
    add(om, "homs", cmd_omega_homs, s={"required": True}, t={"required": True})
    add(om, "classify", cmd_omega_classify, map={"required": True})
    add(om, "factorize", cmd_omega_factorize, map={"required": True})
    add(om, "faces", cmd_omega_faces, tree={"required": True})

    op = sub.add_parser("operad").add_subparsers(dest="cmd", required=True)
    add(
        op,
        "tabulate",
        cmd_operad_tabulate,
        presentation={"required": True},
        arity={"type": int, "default": 3},
        term_size={"type": int, "default": 4},
        closure_size={"type": int},
    )
    add(
        op,
        "functors",
        cmd_operad_functors,
        source={"default": "omega"},
        tree={},
        target={"required": True},
        target_tree={},
        arity={"type": int, "default": 3},
    )
    add(op, "bv-tensor", cmd_operad_bv_tensor, p={"required": True}, q={"required": True})
    add(
        op,
        "equal",
        cmd_operad_equal,
        presentation={"required": True},
        left={"required": True},
        right={"required": True},
        budget={"type": int},
    )
    add(op, "transfer", cmd_operad_transfer, seed={"type": int, "default": 0})

    ds = sub.add_parser("dset").add_subparsers(dest="cmd", required=True)
    for name, fn in [
        ("nerve", cmd_dset_nerve),
        ("kan", cmd_dset_kan),
        ("strict", cmd_dset_strict),
        ("normal", cmd_dset_normal),
        ("slice", cmd_dset_slice),
    ]:
        add(
            ds,
            name,
            fn,
            operad={"required": True},
            tree={},
            bound={"type": int},
            max_edges={"type": int},
        )
    add(
        ds,
        "horns",
        cmd_dset_horns,
        operad={"required": True},
        tree={"required": True},
        bound={"type": int},
        max_edges={"type": int},
    )
    add(
        ds,
        "tau",
        cmd_dset_tau,
        tree={"required": True},
        bound={"type": int},
        max_edges={"type": int},
    )

    tn = sub.add_parser("tensor").add_subparsers(dest="cmd", required=True)
    add(tn, "percolation", cmd_tensor_percolation, s={"required": True}, t={"required": True})
    add(
        tn,
        "representables",
        cmd_tensor_representables,
        s={"required": True},
        t={"required": True},
        bound={"type": int},
        max_edges={"type": int},
    )

    w = sub.add_parser("w").add_subparsers(dest="cmd", required=True)
    add(w, "cells", cmd_w_cells, n={"type": int, "required": True})
    add(w, "assoc", cmd_w_assoc, n={"type": int, "required": True})
    add(w, "cat", cmd_w_cat, n={"type": int, "required": True})

    sg = sub.add_parser("signs").add_subparsers(dest="cmd", required=True)
    add(
        sg,
        "solve",
        cmd_signs_solve,
        vertices={"type": int, "default": 4},
        max_edges={"type": int},
        gauge={"default": "simplicial"},
    )
    add(
        sg,
        "check",
        cmd_signs_check,
        vertices={"type": int, "default": 4},
        max_edges={"type": int},
    )

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except CliError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return exc.code
    except (dtensor.ScaleLimit, wcon.ScaleLimit) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_SCALE
    except (trees.TreeError, omega.OmegaError, ValueError, KeyError) as exc:
        print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}), file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

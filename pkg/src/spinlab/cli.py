"""Command-line front end: ``spinlab <subcommand>`` runs checks and emits a JSON report.

Exit status is 0 when every check passes, 1 when a verification fails and 2
on bad input (unreadable files, malformed JSON, invalid parameters).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


class InputError(Exception):
    """Raised for anything the user can fix by changing arguments or files."""


def _cap_threads() -> None:
    # must run before numpy is imported to take effect
    n = os.environ.get("SPINLAB_THREADS")
    if n:
        for var in _THREAD_VARS:
            os.environ.setdefault(var, n)


def _encode(obj):
    import numpy as np

    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _plain(obj):
    """Round-trip through JSON so tuple keys and numpy values become plain data."""
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def dumps(report: Dict) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2, default=_encode, allow_nan=True) + "\n"


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


# what the loaders raise on a well-formed JSON file with the wrong shape
_SCHEMA_ERRORS = (ValueError, TypeError, KeyError, AttributeError, IndexError)


def _tol(args, default: float) -> float:
    return default if args.tol is None else args.tol


# subcommands -------------------------------------------------------------------


def run_quat_reps(args) -> Dict:
    import itertools

    import numpy as np

    from .exterior import InnerProductSpace, exterior_module
    from .quat import random_sp_basis, random_unit
    from .quaternionic import (
        QuaternionicSpace,
        build_s0,
        build_s1,
        canonical_intertwiner,
        direct_sum_compatibility,
        verify_intertwiner,
    )

    def relations(module, dim):
        basis = [tuple(int(a == b) for b in range(dim)) for a in range(dim)]
        bad = [
            [i, j, k]
            for (i, v), (j, w) in itertools.combinations_with_replacement(enumerate(basis), 2)
            for k, good in module.clifford_relations(v, w).items()
            if not good
        ]
        return {"ok": not bad, "pairs": dim * (dim + 1) // 2, "failures": bad}

    ext = {str(d): relations(exterior_module(InnerProductSpace.standard(d)), d) for d in range(1, args.max_dim + 1)}
    H1 = QuaternionicSpace(1)
    reps = {name: relations(build(H1), 4) for name, build in (("S0", build_s0), ("S1", build_s1))}

    itw = canonical_intertwiner(H1)
    ver = verify_intertwiner(itw)
    vacuum_ok = itw.F.apply({0: 1}) == itw.vacuum.as_vector()
    rng = np.random.default_rng(args.seed)
    ref = itw.F.to_numpy()
    deviation = 0.0
    for _ in range(args.bases):
        F = canonical_intertwiner(H1, basis=random_unit(rng)[None, None, :]).F.to_numpy()
        deviation = max(deviation, float(np.abs(F - ref).max()))
    tol = _tol(args, 1e-12)
    out = {
        "exterior": ext,
        "quaternionic": reps,
        "intertwiner": {
            "residuals": {k: ver[k] for k in ("c", "h", "tau", "grading", "gram_minus_scalar")},
            "ok": bool(ver["ok"]),
        },
        "generator": {"ok": bool(vacuum_ok)},
        "basis_independence": {"bases": args.bases, "deviation": deviation, "tol": tol, "ok": deviation < tol},
    }
    if args.sp2:
        F2 = canonical_intertwiner(QuaternionicSpace(2), basis=random_sp_basis(rng, 2)).F.to_numpy()
        ref2 = canonical_intertwiner(QuaternionicSpace(2), exact=False).F.to_numpy()
        dev2 = float(np.abs(F2 - ref2).max())
        out["basis_independence_sp2"] = {"deviation": dev2, "ok": dev2 < max(tol, 1e-10)}
    ds = direct_sum_compatibility(H1, H1)
    out["direct_sum"] = {"real_dim": ds["real_dim"], "ok": all(ds[k] for k in ("c", "h", "tau", "F"))}
    return out


def run_oscillator(args) -> Dict:
    from .oscillator import gaussian_overlap, kernel_correspondence, line_spectrum, pseudo_susy_spectrum, supersymmetric_pairing

    tol = _tol(args, 1e-8)
    flat = {}
    for t in args.t:
        res = line_spectrum(t)
        unpaired = supersymmetric_pairing(res, tol)
        overlap = gaussian_overlap(res)
        flat[f"{t:g}"] = {
            **res.to_json(),
            "overlap": overlap,
            "unpaired": unpaired,
            "ok": res.kernel_dim == 1 and overlap >= 0.9999 and not unpaired,
        }
    out: Dict = {"flat": flat}
    if args.m > 1:
        pseudo = pseudo_susy_spectrum(args.m, args.pseudo_t)
        ref = pseudo_susy_spectrum(args.m, args.pseudo_t, metric="flat")
        above = args.pseudo_t >= pseudo.grid["t_min"]
        entry = {**pseudo.to_json(), "above_threshold": above}
        if pseudo.kernel_dim == 1 and ref.kernel_dim == 1:
            corr = kernel_correspondence(ref, pseudo)
            entry["correspondence"] = {k: v for k, v in corr.items() if k != "b_bar"}
            entry["ok"] = corr["overlap"] >= 0.999
        else:
            entry["ok"] = not above
        out["pseudo"] = entry
    return out


def _parse_sweep(text: str):
    try:
        start, factor, count = text.split(":")
        start, factor, count = float(start), float(factor), int(count)
    except ValueError:
        raise InputError(f"--t-sweep expects start:factor:count, got {text!r}") from None
    if start <= 0 or factor <= 0 or count < 1:
        raise InputError("--t-sweep needs start > 0, factor > 0 and count ≥ 1")
    return [start * factor**k for k in range(count)]


def run_witten(args) -> Dict:
    from .witten import load_model, phi_map, standard_models, verify_localization

    standard = standard_models()
    if args.model is None:
        names = sorted(standard)
    elif args.model in standard:
        names = [args.model]
    else:
        data = _read_json(args.model)
        try:
            model = load_model(data)
        except _SCHEMA_ERRORS as exc:
            raise InputError(f"bad model {args.model}: {exc}") from None
        names = [model.name]
        standard = {model.name: {"model": model, "partner": None, "margin": float(data.get("margin", 0.5)), "lam": None}}

    out, rows = {}, []
    for name in names:
        entry = standard[name]
        model, partner = entry["model"], entry["partner"]
        lam = args.lam if args.lam is not None else entry["lam"]
        ts = _parse_sweep(args.t_sweep) if args.t_sweep else [model.T * 2**k for k in range(7)]
        sweep = []
        for t in ts:
            try:
                loc = verify_localization(model, t, lam, entry["margin"])
                rep = phi_map(model, partner, entry["margin"], lam, t) if partner is not None else None
            except ValueError as exc:
                raise InputError(str(exc)) from None
            row = {"t": t, "A": loc["A"], "B": loc["B"], "localization_ok": loc["ok"], "count_below_lambda": loc["count_below_lambda"]}
            if rep is not None:
                sv = rep["singular_values"]
                row.update(min_singular_value=float(sv.min()) if sv.size else 1.0, distance=rep["distance"], dims=list(rep["dims"]))
            sweep.append(row)
            rows.append({"model": name, **row})
        result = {"sweep": sweep, "lambda": lam, "ok": all(r["localization_ok"] for r in sweep)}
        if partner is not None:
            result["final_distance"] = sweep[-1]["distance"]
            result["ok"] = result["ok"] and sweep[-1]["distance"] < 0.1 and sweep[-1]["min_singular_value"] >= 0.9
        out[name] = result
    if args.csv:
        fields = sorted({k for r in rows for k in r})
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            writer.writerows(rows)
    return out


def run_torsor(args) -> Dict:
    import numpy as np

    from .torsor import (
        EquivariantFunction,
        MeshError,
        StandardTriple,
        antipodal_lift_square,
        chern_number,
        component_invariant,
        icosphere,
        load_off,
        random_su2,
        su2_action,
    )

    if args.mesh:
        try:
            mesh = load_off(args.mesh)
        except OSError as exc:
            raise InputError(f"cannot read {args.mesh}: {exc.strerror or exc}") from None
        except ValueError as exc:
            raise InputError(f"bad mesh {args.mesh}: {exc}") from None
    else:
        mesh = icosphere(args.level)
    tol = _tol(args, 1e-6)
    L0 = StandardTriple()
    try:
        chern, residue = chern_number(L0, mesh, return_residue=True)
    except MeshError as exc:
        raise InputError(str(exc)) from None
    rng = np.random.default_rng(args.seed)
    n_vert = len(mesh.vertices)
    components = {}
    for label, sign in (("plus", 1), ("minus", -1)):
        phi = EquivariantFunction(mesh, sign * np.ones(n_vert))
        seen = {component_invariant(phi, root=int(rng.integers(n_vert)), seed=k) for k in range(args.paths)}
        components[label] = {"values": sorted(seen), "ok": seen == {sign}}
    worst_law = worst_iota = 0.0
    for _ in range(args.samples):
        A, B = su2_action(random_su2(rng)), su2_action(random_su2(rng))
        zw = rng.normal(size=2) + 1j * rng.normal(size=2)
        zw /= np.linalg.norm(zw)
        p = (zw, complex(*rng.normal(size=2)))
        lhs, rhs = A.apply(B.apply(p)), A.compose(B).apply(p)
        worst_law = max(worst_law, float(np.abs(lhs[0] - rhs[0]).max()), abs(lhs[1] - rhs[1]))
        worst_iota = max(worst_iota, float(A.commutes_with_iota(p)))
    iota_sq = antipodal_lift_square(L0)
    return {
        "mesh": {"vertices": n_vert, "faces": len(mesh.faces)},
        "chern": {"value": chern, "residue": residue, "ok": chern == 1 and residue < tol},
        "iota_sq": {"value": iota_sq, "weight_2": antipodal_lift_square(StandardTriple(2)), "ok": iota_sq == -1},
        "components": components,
        "su2": {"samples": args.samples, "group_law": worst_law, "iota": worst_iota, "ok": max(worst_law, worst_iota) < 1e-12},
    }


def run_fda(args) -> Dict:
    from .fda import DegreeError, check_axioms, hk3_conditions, load_fda_model, sw_toy

    if args.model:
        try:
            model = load_fda_model(_read_json(args.model))
        except _SCHEMA_ERRORS as exc:
            raise InputError(f"bad model {args.model}: {exc}") from None
    else:
        model = sw_toy()
    out: Dict = {"model": model.name}
    if args.check in ("all", "axioms"):
        rep = check_axioms(model, seed=args.seed, tol=_tol(args, 1e-10))
        out["axioms"] = {**rep, "ok": all(v["ok"] for v in rep.values())}
    if args.check in ("all", "hk3"):
        try:
            out["hk3"] = hk3_conditions(model, seed=args.seed)
        except DegreeError as exc:
            out["hk3"] = {"ok": False, "error": str(exc)}
        except ValueError as exc:
            raise InputError(str(exc)) from None
    return out


def run_gerbe(args) -> Dict:
    from .gerbe import load_cochain, load_nerve, rp2_extension_gerbe, trivialize, verify_certificate, verify_cocycle

    if args.nerve:
        if not args.cochain:
            raise InputError("--nerve needs --cochain")
        try:
            nerve = load_nerve(_read_json(args.nerve))
            g = load_cochain(_read_json(args.cochain), nerve)
        except _SCHEMA_ERRORS as exc:
            raise InputError(str(exc)) from None
        trivialize_too = args.trivialize
    else:
        g, _ = rp2_extension_gerbe()
        trivialize_too = True
    cocycle = verify_cocycle(g)
    out: Dict = {
        "nerve": {str(k): g.nerve.count(k) for k in range(3)},
        "cocycle": cocycle,
    }
    if trivialize_too and cocycle["ok"]:
        res = trivialize(g)
        if res["trivial"]:
            out["trivialization"] = {"trivial": True, "u": {",".join(map(str, e)): v for e, v in sorted(res["u"].items())}, "ok": True}
        else:
            cert = res["certificate"]
            out["trivialization"] = {
                "trivial": False,
                "certificate": [list(t) for t in cert],
                "pairing": res["pairing"],
                "ok": verify_certificate(g, cert),
            }
    return out


def run_all(args) -> Dict:
    defaults = {
        "quat-reps": dict(max_dim=6, bases=25, sp2=False),
        "oscillator": dict(t=[0.5, 1.0, 2.0, 8.0], m=4, pseudo_t=200.0),
        "witten": dict(model=None, t_sweep=None, lam=None, csv=None),
        "torsor": dict(mesh=None, level=2, paths=20, samples=100),
        "fda": dict(model=None, check="all"),
        "gerbe": dict(nerve=None, cochain=None, trivialize=True),
    }
    out = {}
    for name, extra in defaults.items():
        sub = argparse.Namespace(**vars(args), **extra)
        out[name] = COMMANDS[name](sub)
        _progress(args, name, out[name])
    return out


COMMANDS: Dict[str, Callable[[argparse.Namespace], Dict]] = {
    "quat-reps": run_quat_reps,
    "oscillator": run_oscillator,
    "witten": run_witten,
    "torsor": run_torsor,
    "fda": run_fda,
    "gerbe": run_gerbe,
    "all": run_all,
}


# reporting ---------------------------------------------------------------------


def failures(report, path: str = "") -> List[str]:
    """Dotted paths of every check whose ``ok`` is false."""
    found = []
    if isinstance(report, dict):
        if report.get("ok") is False:
            found.append(path or "<root>")
        for k, v in report.items():
            found += failures(v, f"{path}.{k}" if path else str(k))
    return found


def _progress(args, name, report) -> None:
    if not args.quiet and args.command == "all":
        bad = failures(report)
        print(f"{name}: {'ok' if not bad else 'FAILED'}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spinlab", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--tol", type=float, default=None, help="override the numeric tolerance of floating checks")
    p.add_argument("--json", "--report", dest="json", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--quiet", action="store_true", help="no summary on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("quat-reps", help="Clifford identities and the canonical intertwiner")
    q.add_argument("--max-dim", type=int, default=6)
    q.add_argument("--bases", type=int, default=25, help="random Sp(1) bases to rebuild from")
    q.add_argument("--sp2", action="store_true", help="also rebuild at quaternionic dimension 2 (slow)")

    o = sub.add_parser("oscillator", help="(pseudo-)supersymmetric oscillator spectra")
    o.add_argument("--t", type=float, nargs="+", default=[0.5, 1.0, 2.0, 8.0])
    o.add_argument("--m", type=int, default=4, help="fiber dimension of the pseudo-SUSY check (1 skips it)")
    o.add_argument("--pseudo-t", type=float, default=200.0)

    w = sub.add_parser("witten", help="localization bounds and the Φ map")
    w.add_argument("--model", help="linear, quadratic, cubic or a JSON model file (default: all three)")
    w.add_argument("--t-sweep", metavar="START:FACTOR:COUNT")
    w.add_argument("--lambda", dest="lam", type=float)
    w.add_argument("--csv", metavar="PATH", help="also write the sweep as CSV")
    w.add_argument("--report", dest="json", metavar="PATH", default=argparse.SUPPRESS, help="alias of the global --json")

    t = sub.add_parser("torsor", help="Chern number, ι̃₀² and the component invariant")
    t.add_argument("--mesh", metavar="OFF", help="antipodally symmetric sphere mesh")
    t.add_argument("--level", type=int, default=2, help="icosphere subdivision level when no mesh is given")
    t.add_argument("--paths", type=int, default=20)
    t.add_argument("--samples", type=int, default=100)

    f = sub.add_parser("fda", help="FDA axioms and the hK3 conditions")
    f.add_argument("--model", metavar="JSON")
    f.add_argument("--check", choices=("all", "axioms", "hk3"), default="all")

    g = sub.add_parser("gerbe", help="O(1)-gerbe cocycles and trivializations")
    g.add_argument("--nerve", metavar="JSON")
    g.add_argument("--cochain", metavar="JSON")
    g.add_argument("--trivialize", action="store_true")

    sub.add_parser("all", help="every subcommand with default settings")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    _cap_threads()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        body = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"spinlab: error: {exc}", file=sys.stderr)
        return 2
    bad = failures(body)
    report = {"command": args.command, "seed": args.seed, "ok": not bad, "failures": bad, "results": body}
    text = dumps(report)
    if args.json:
        try:
            Path(args.json).write_text(text)
        except OSError as exc:
            print(f"spinlab: error: cannot write {args.json}: {exc.strerror or exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    if not args.quiet:
        print(f"spinlab {args.command}: {'all checks passed' if not bad else 'FAILED: ' + ', '.join(bad)}", file=sys.stderr)
    return 0 if not bad else 1


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end.

Every command writes its artifacts plus a ``manifest.json`` into ``--out``.
Errors produce one JSON line on stderr and a nonzero exit status:
2 for bad input, 3 for numeric degeneracy, 4 for anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .curvature import merge_profiles, profile_backbone
from .curve_metrics import kabsch_align, rmsd, threshold_map, truncated_hop_matrix
from .errors import FibrilGeomError, InputError
from .hbond import join_carbonyl_torsions, regress_torsion_vs_distance, squared_distance_differences
from .io import (
    binary_csv,
    diagram_csv,
    dump_json,
    hbond_csv,
    matrix_csv,
    matrix_json,
    profile_csv,
    summary_dict,
)
from .pdb_ingest import (
    AtomSelection,
    Structure,
    extract_curve,
    read_structure,
    select_residues,
    shared_residue_keys,
)
from .persistence import compare_structures, diagram_of

COMMANDS = ("hop", "geometry", "regress", "ph", "compare", "rmsd")


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:END, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty residue range {text!r}")
    return lo, hi


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _chains(text: str) -> list[str]:
    return [c.strip() for c in text.split(",") if c.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fibrilgeom",
        description="Hop distances, discrete curvature/torsion and persistent homology "
                    "of protein backbones.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, pair: bool):
        if pair:
            p.add_argument("--a", required=True, help="first PDB file")
            p.add_argument("--b", required=True, help="second PDB file")
            p.add_argument("--chain", required=True, help="chain id (in both files unless --chain-b)")
            p.add_argument("--chain-b", help="chain id in the second file")
        p.add_argument("--range", type=_range, help="inclusive residue range START:END")
        p.add_argument("--out", default=".", help="output directory (default: current)")

    p = sub.add_parser("hop", help="truncated hop-distance matrix and threshold map")
    common(p, pair=True)
    p.add_argument("--atoms", default="ca", help="ca (default) or backbone")
    p.add_argument("--cutoff", type=_positive, default=25.0, help="Angstrom (default 25)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("geometry", help="discrete curvature and torsion per backbone atom")
    p.add_argument("--input", required=True)
    p.add_argument("--chain", required=True, type=_chains, help="chain id or comma list")
    p.add_argument("--normal-anchor", choices=("B", "A"), default="B")
    common(p, pair=False)

    p = sub.add_parser("regress", help="carbonyl torsion vs layer O..N distance regression")
    p.add_argument("--input", required=True)
    p.add_argument("--layers", required=True, type=_chains, help="chain ids in stacking order")
    p.add_argument("--normal-anchor", choices=("B", "A"), default="B")
    common(p, pair=False)

    p = sub.add_parser("ph", help="Vietoris-Rips persistence diagram of one chain")
    p.add_argument("--input", required=True)
    p.add_argument("--chain", required=True)
    p.add_argument("--atoms", default="ca")
    p.add_argument("--max-eps", type=_positive, required=True, help="Angstrom")
    common(p, pair=False)

    p = sub.add_parser("compare", help="bottleneck and Wasserstein-q distances of two chains")
    common(p, pair=True)
    p.add_argument("--atoms", default="ca")
    p.add_argument("--max-eps", type=_positive, required=True, help="Angstrom")
    p.add_argument("--q", type=float, default=1.0, help="Wasserstein exponent (>= 1)")

    p = sub.add_parser("rmsd", help="RMSD after optimal superposition")
    common(p, pair=True)
    p.add_argument("--atoms", default="ca")

    p = sub.add_parser("replay", help="re-run a command from its manifest.json")
    p.add_argument("manifest")
    p.add_argument("--out", help="override the output directory")
    return parser


# --- helpers ---------------------------------------------------------------

def _single_chain(structure: Structure, chain_id: str, keys=None) -> Structure:
    chain = structure.chain(chain_id)
    if keys is not None:
        chain = select_residues(chain, keys)
    return Structure(structure.id, (chain,))


def _paired_curves(args):
    """Matching curves of two chains, restricted to shared residues when --range is given."""
    sa, sb = read_structure(args.a), read_structure(args.b)
    ca, cb = args.chain, args.chain_b or args.chain
    selection = AtomSelection.parse(args.atoms)
    if args.range:
        keys = shared_residue_keys(sa.chain(ca), sb.chain(cb), args.range)
        if not keys:
            raise InputError(f"no shared residues in range {args.range[0]}:{args.range[1]}")
        sa, sb = _single_chain(sa, ca, keys), _single_chain(sb, cb, keys)
    return extract_curve(sa, ca, selection), extract_curve(sb, cb, selection)


def _aligned_pair(args):
    """Curves truncated to a common length, vertex by vertex."""
    a, b = _paired_curves(args)
    n = min(len(a), len(b))
    return a, b, n


class Run:
    def __init__(self, args):
        self.args = args
        self.out = Path(args.out)
        self.outputs: list[str] = []
        self.exclusions: dict[str, int] = {}

    def write(self, name: str, text: str):
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / name).write_text(text)
        self.outputs.append(name)

    def manifest(self):
        config = {k: v for k, v in vars(self.args).items() if k not in ("out", "func")}
        config = {k: list(v) if isinstance(v, tuple) else v for k, v in config.items()}
        self.write("manifest.json", dump_json({
            "tool": "fibrilgeom",
            "version": __version__,
            "command": self.args.command,
            "config": config,
            "exclusions": self.exclusions,
            "outputs": sorted(self.outputs + ["manifest.json"]),
        }))


# --- commands --------------------------------------------------------------

def cmd_hop(run: Run):
    a, b, n = _aligned_pair(run.args)
    matrix = truncated_hop_matrix(a, b, n)
    binary = threshold_map(matrix, run.args.cutoff)
    if run.args.format == "csv":
        run.write("hop_matrix.csv", matrix_csv(matrix.entries, matrix.labels))
        run.write("hop_binary.csv", binary_csv(binary.entries, binary.labels))
    else:
        run.write("hop_matrix.json", matrix_json(matrix.entries, matrix.labels))
        run.write("hop_binary.json", matrix_json(binary.entries, binary.labels))
    run.exclusions["truncated_vertices"] = max(len(a), len(b)) - n


def _profiles(structure: Structure, chains, residue_range, anchor):
    profiles = {}
    for cid in chains:
        curve = extract_curve(structure, cid, AtomSelection.N_CA_C, residue_range)
        profiles[cid] = profile_backbone(curve, anchor)
    return profiles


def cmd_geometry(run: Run):
    args = run.args
    structure = read_structure(args.input)
    profiles = _profiles(structure, args.chain, args.range, args.normal_anchor)
    pooled = merge_profiles(profiles.values())
    run.write("geometry.csv", profile_csv(pooled))
    summary = summary_dict(pooled.summary)
    summary["normal_anchor"] = args.normal_anchor
    summary["chains"] = list(args.chain)
    run.write("geometry_summary.json", dump_json(summary))
    run.exclusions["degenerate_windows"] = pooled.degenerate_count


def cmd_regress(run: Run):
    args = run.args
    structure = read_structure(args.input)
    scan = squared_distance_differences(structure, args.layers)
    interior = args.layers[1:-1]
    profiles = _profiles(structure, interior, args.range, args.normal_anchor)
    records, taus, dts, missing = join_carbonyl_torsions(scan, profiles)
    run.exclusions.update({
        "boundary_layers": scan.skipped_layers,
        "residues_missing_atoms": scan.skipped_residues,
        "residues_without_torsion": missing,
    })
    run.write("hbond.csv", hbond_csv(records, taus))
    result = regress_torsion_vs_distance(taus, dts)
    run.write("regression.json", dump_json(result.as_dict()))


def _cloud(args, path, chain):
    structure = read_structure(path)
    return extract_curve(structure, chain, AtomSelection.parse(args.atoms), args.range).vertices


def cmd_ph(run: Run):
    args = run.args
    points = _cloud(args, args.input, args.chain)
    diagram = diagram_of(points, args.max_eps)
    run.write("diagram.csv", diagram_csv(diagram))
    run.exclusions["zero_length_pairs"] = len(diagram.pairs) - len(diagram.points)


def cmd_compare(run: Run):
    args = run.args
    a, b = _paired_curves(args)
    result, d1, d2 = compare_structures(a.vertices, b.vertices, args.max_eps, args.q,
                                        return_diagrams=True)
    run.write("diagram_a.csv", diagram_csv(d1))
    run.write("diagram_b.csv", diagram_csv(d2))
    run.write("distances.json", dump_json(result))


def cmd_rmsd(run: Run):
    a, b, n = _aligned_pair(run.args)
    p, q = a.vertices[:n], b.vertices[:n]
    fit = kabsch_align(p, q)
    run.write("rmsd.json", dump_json({
        "n": n,
        "rmsd_aligned": fit.rmsd,
        "rmsd_unaligned": rmsd(p, q),
        "rotation": np.round(fit.rotation, 12),
        "translation": np.round(fit.translation, 9),
    }))


HANDLERS = {
    "hop": cmd_hop,
    "geometry": cmd_geometry,
    "regress": cmd_regress,
    "ph": cmd_ph,
    "compare": cmd_compare,
    "rmsd": cmd_rmsd,
}


def _replay_args(parser, manifest_path: str, out: Optional[str]):
    data = json.loads(Path(manifest_path).read_text())
    config = dict(data["config"])
    command = data["command"]
    ns = parser.parse_args([command] + _required_stub(command))
    for key, value in config.items():
        if key in ("range",) and value is not None:
            value = tuple(value)
        setattr(ns, key, value)
    ns.command = command
    ns.out = out or str(Path(manifest_path).parent)
    return ns


def _required_stub(command: str) -> list[str]:
    # placeholders so argparse accepts the subcommand; every field is then
    # overwritten from the manifest
    stubs = {
        "hop": ["--a", "x", "--b", "x", "--chain", "A"],
        "geometry": ["--input", "x", "--chain", "A"],
        "regress": ["--input", "x", "--layers", "A"],
        "ph": ["--input", "x", "--chain", "A", "--max-eps", "1"],
        "compare": ["--a", "x", "--b", "x", "--chain", "A", "--max-eps", "1"],
        "rmsd": ["--a", "x", "--b", "x", "--chain", "A"],
    }
    return stubs[command]


def _fail(exc: BaseException, code: int, category: str) -> int:
    line = json.dumps({"error": category, "exit_code": code, "message": str(exc)})
    print(line, file=sys.stderr)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            args = _replay_args(parser, args.manifest, args.out)
        if args.command in ("compare",) and not args.q >= 1:
            raise InputError("--q must be >= 1")
        run = Run(args)
        HANDLERS[args.command](run)
        run.manifest()
    except FibrilGeomError as exc:
        return _fail(exc, exc.exit_code, exc.category)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(exc, 2, type(exc).__name__)
    except Exception as exc:  # noqa: BLE001
        return _fail(exc, 4, type(exc).__name__)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line orchestration: generate sculpture files, verify symmetry,
check seeds, export the labelled-cell graph, and report feature statistics.

Exit codes: 0 success, 1 verification failure, 2 input/parse error,
3 pipeline error (a vertex landed on the projection pole).  Every failure
prints one machine-parsable line on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .blocks import cayley_graph, to_dot
from .mesh_pipeline import (
    Mesh,
    MeshFormatError,
    demo_seed,
    face_contact_check,
    feature_stats,
    generate_sculpture,
    load_obj,
    orbit_cloud,
    scale_for_min_feature,
    write_obj,
    write_stl,
)
from .projection import Pole, PoleProximityError, default_pole
from .quat import UNIT_NORM_TOL
from .symmetry import PointCloud4, seed_asymmetry_check, symmetry_group

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INPUT = 2
EXIT_PIPELINE = 3


def _diag(kind: str, message: str) -> None:
    flat = " ".join(str(message).split())
    print(f"q8sculpt: error: {kind}: {flat}", file=sys.stderr)


def _warn(message: str) -> None:
    print(f"q8sculpt: warning: {message}", file=sys.stderr)


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive number")
    return value


def _parse_pole(text: str | None) -> Pole:
    if text is None:
        return default_pole()
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError("pole needs four comma-separated coordinates")
    vec = np.array([float(p) for p in parts], dtype=np.float64)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise ValueError("pole cannot be the zero vector")
    if abs(norm - 1.0) > UNIT_NORM_TOL:
        _warn(f"pole normalized, adjustment {abs(norm - 1.0):.3g}")
        vec = vec / norm
    return Pole.from_vector(vec)


def _load_seed(source: str) -> Mesh:
    if source == "demo":
        return demo_seed()
    return load_obj(Path(source).read_bytes())


def _emit(path_text: str | None, payload: str) -> None:
    if path_text is None:
        sys.stdout.write(payload if payload.endswith("\n") else payload + "\n")
    else:
        Path(path_text).write_text(payload)


def _cmd_generate(args: argparse.Namespace) -> int:
    seed = _load_seed(args.seed)
    pole = _parse_pole(args.pole)
    if args.scale is not None:
        scale = args.scale
    else:
        scale = scale_for_min_feature(seed, pole, args.min_feature)
    bundle = generate_sculpture(seed, pole, scale)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = args.format

    manifest_parts = []
    for g, mesh in bundle.parts.items():
        name = f"part_{g.name}.{ext}"
        if ext == "obj":
            data = write_obj(mesh, comments=[f"q8sculpt part, element {g.name}"])
        else:
            data = write_stl(mesh)
        (out_dir / name).write_bytes(data)
        stats = feature_stats(mesh)
        manifest_parts.append(
            {
                "element": g.name,
                "file": name,
                "vertices": mesh.n_vertices,
                "triangles": mesh.n_triangles,
                "min_edge": stats["min_edge"],
                "max_edge": stats["max_edge"],
            }
        )
    merged_name = f"merged.{ext}"
    if ext == "obj":
        merged_data = write_obj(bundle.merged, comments=["q8sculpt merged sculpture"])
    else:
        merged_data = write_stl(bundle.merged)
    (out_dir / merged_name).write_bytes(merged_data)

    cloud = orbit_cloud(seed)
    cloud_name = "cloud.json"
    (out_dir / cloud_name).write_text(PointCloud4(cloud).to_json())

    manifest = {
        "tool": "q8sculpt",
        "version": __version__,
        "format": ext,
        "pole": [float(c) for c in pole.p],
        "scale": float(scale),
        "min_feature": None if args.scale is not None else float(args.min_feature),
        "merged": {
            "file": merged_name,
            "vertices": bundle.merged.n_vertices,
            "triangles": bundle.merged.n_triangles,
            "feature_stats": feature_stats(bundle.merged),
        },
        "parts": manifest_parts,
        "cloud_file": cloud_name,
        "cloud_points": len(cloud),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(bundle.parts) + 3} files to {out_dir}")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    cloud = PointCloud4.from_json(Path(args.cloud).read_text())
    report = symmetry_group(cloud, args.tol)
    _emit(args.out, report.to_json())
    if report.is_exactly_q8:
        return EXIT_OK
    _diag(
        "verification-failure",
        f"{len(report.symmetries)} candidate symmetries survive, "
        "expected exactly the 8 right-multiplication matrices",
    )
    return EXIT_VERIFICATION


def _cmd_check_seed(args: argparse.Namespace) -> int:
    seed = _load_seed(args.seed)
    asymmetric = seed_asymmetry_check(seed.vertices, args.tol)
    contact = face_contact_check(seed, args.tol)
    report = {
        "asymmetric": asymmetric,
        "contact": contact.to_dict(),
        "passed": asymmetric and contact.passed,
    }
    _emit(args.out, json.dumps(report, indent=2, sort_keys=True))
    if report["passed"]:
        return EXIT_OK
    if not asymmetric:
        _diag("verification-failure", "seed has nontrivial symmetry")
    else:
        failed = [a.axis for a in contact.axes if not a.passed]
        _diag("verification-failure", f"seed face contact fails on axes {failed}")
    return EXIT_VERIFICATION


def _cmd_cayley(args: argparse.Namespace) -> int:
    _emit(args.out, to_dot(cayley_graph()))
    return EXIT_OK


def _cmd_stats(args: argparse.Namespace) -> int:
    seed = _load_seed(args.seed)
    _emit(args.out, json.dumps(feature_stats(seed), indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="q8sculpt",
        description=(
            "Generate and verify 3D-printable sculptures whose symmetry group "
            "is exactly the eight-element quaternion group."
        ),
    )
    parser.add_argument("--version", action="version", version=f"q8sculpt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="transform a seed mesh into the eight-part sculpture")
    gen.add_argument("--seed", required=True, help="seed OBJ path, or 'demo' for the built-in seed")
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--pole", default=None, help="projection pole as four comma-separated reals")
    gen.add_argument("--scale", type=_positive, default=None, help="explicit uniform scale")
    gen.add_argument(
        "--min-feature",
        type=_positive,
        default=0.8,
        help="minimum edge length the default scale must achieve (default 0.8)",
    )
    gen.add_argument("--format", choices=("obj", "stl"), default="obj")
    gen.set_defaults(func=_cmd_generate)

    ver = sub.add_parser("verify", help="brute-force symmetry check of a point cloud JSON")
    ver.add_argument("--cloud", required=True, help="cloud JSON path")
    ver.add_argument("--tol", type=_positive, default=1e-6)
    ver.add_argument("--out", default=None, help="report path (default stdout)")
    ver.set_defaults(func=_cmd_verify)

    chk = sub.add_parser("check-seed", help="asymmetry and face-contact audit of a seed mesh")
    chk.add_argument("--seed", required=True, help="seed OBJ path, or 'demo'")
    chk.add_argument("--tol", type=_positive, default=1e-6)
    chk.add_argument("--out", default=None)
    chk.set_defaults(func=_cmd_check_seed)

    cay = sub.add_parser("cayley", help="export the labelled-cell graph in DOT format")
    cay.add_argument("--out", default=None)
    cay.set_defaults(func=_cmd_cayley)

    sta = sub.add_parser("stats", help="feature-size statistics of a mesh")
    sta.add_argument("--seed", required=True, help="mesh OBJ path, or 'demo'")
    sta.add_argument("--out", default=None)
    sta.set_defaults(func=_cmd_stats)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PoleProximityError as exc:
        _diag("pipeline-error", str(exc))
        return EXIT_PIPELINE
    except MeshFormatError as exc:
        _diag("input-error", str(exc))
        return EXIT_INPUT
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        _diag("input-error", str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())

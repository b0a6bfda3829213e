"""Command-line interface: JSON in, canonical JSON out.

Exit codes: 0 ok, 1 a mathematical check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from . import affine, generators, kan, normalization
from .errors import CheckFailed, InputError
from .linalg import rational_to_json
from .simplicial import (
    ChainComplex,
    SemiSVS,
    SimplicialMorphism,
    TruncatedSVS,
    ValidationReport,
    dold_kan_inverse,
    validate_morphism,
    validate_simplicial_identities,
)

EXIT = {"ok": 0, "check_failed": 1, "input_error": 2}


@dataclass
class CommandResult:
    status: str
    payload: dict
    diagnostics: list[str] = field(default_factory=list)
    output: str | None = None

    @property
    def exit_code(self) -> int:
        return EXIT[self.status]


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# input helpers


def _read_json(src: str):
    """Parse a path, ``-`` for stdin, or inline JSON text."""
    if src == "-":
        text = sys.stdin.read()
    elif os.path.exists(src):
        with open(src, encoding="utf-8") as fh:
            text = fh.read()
    elif src.lstrip().startswith(("{", "[")):
        text = src
    else:
        raise InputError(f"no such file: {src}")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {src}: {exc}") from None
    # accept our own output envelope so commands can be piped
    if isinstance(obj, dict) and set(obj) == {"status", "result"} and obj["status"] == "ok":
        obj = obj["result"]
    return obj


LOADERS = {
    "svs/1": TruncatedSVS.from_json,
    "semi/1": SemiSVS.from_json,
    "chain/1": ChainComplex.from_json,
    "morphism/1": SimplicialMorphism.from_json,
    "family/1": normalization.PointedFamily.from_json,
    "affine/1": affine.AffineSimplicialObject.from_json,
}
KINDS = {
    "svs": "svs/1", "semi": "semi/1", "chain": "chain/1", "morphism": "morphism/1",
    "family": "family/1", "affine": "affine/1",
}


def _load(src: str, allowed=None):
    obj = _read_json(src)
    schema = obj.get("schema") if isinstance(obj, dict) else None
    if schema not in LOADERS:
        raise InputError(f"unknown or missing schema {schema!r}")
    if allowed is not None and schema not in allowed:
        raise InputError(f"expected one of {sorted(allowed)}, got {schema!r}")
    return schema, LOADERS[schema](obj)


def _load_valid_simplicial(src: str, allowed=("svs/1", "semi/1")):
    _, x = _load(src, allowed)
    report = validate_simplicial_identities(x)
    if not report.ok:
        raise CheckFailed("input violates the simplicial identities: " + "; ".join(report.messages()[:3]))
    return x


def _int_list(text: str, what: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise InputError(f"{what} must be a comma-separated list of integers") from None


# --------------------------------------------------------------------------
# commands


def cmd_validate(args) -> CommandResult:
    allowed = {KINDS[args.kind]} if args.kind else None
    schema, obj = _load(args.input, allowed)
    if schema in ("svs/1", "semi/1"):
        report = validate_simplicial_identities(obj)
    elif schema == "chain/1":
        report = obj.validate()
    elif schema == "morphism/1":
        report = validate_simplicial_identities(obj.source)
        report.violations += validate_simplicial_identities(obj.target).violations
        report.violations += validate_morphism(obj).violations
    elif schema == "affine/1":
        report = affine.validate_affine(obj)
    else:
        report = ValidationReport()
        for p in obj.points:
            for v in validate_simplicial_identities(obj.fibers[p]).violations:
                report.violations.append({**v, "point": p})
    payload = {"schema": schema, **report.to_json()}
    return CommandResult("ok" if report.ok else "check_failed", payload, report.messages())


def cmd_kan(args) -> CommandResult:
    x = _load_valid_simplicial(args.input)
    if args.generalized is not None:
        jm = _int_list(args.generalized, "--generalized")
        if len(jm) != 2 or args.n is None:
            raise InputError("--generalized takes j,m and needs --n")
        j, m = jm
        if not (0 <= j <= m <= args.n and m >= 1):
            raise InputError(f"need 0 <= j <= m <= n and m >= 1, got j={j} m={m} n={args.n}")
        h = kan.HornIndex.filtered(args.n, j, m)
        if h.n > x.level:
            raise InputError(f"horn level {h.n} exceeds truncation level {x.level}")
        rows = [{"kind": "generalized", "n": args.n, "j": j, "m": m,
                 "removed": list(h.removed), "holds": kan.check_generalized_kan(x, h)}]
    elif args.n is not None or args.i is not None:
        if args.n is None or args.i is None:
            raise InputError("--n and --i go together")
        rows = [{"kind": "kan", "n": args.n, "i": args.i, "holds": kan.check_kan(x, args.n, args.i)}]
    else:
        rows = kan.kan_report(x)
    ok = all(r["holds"] for r in rows)
    return CommandResult("ok" if ok else "check_failed", {"all_hold": ok, "conditions": rows})


def cmd_horn(args) -> CommandResult:
    x = _load_valid_simplicial(args.input)
    h = kan.HornIndex(args.n, _int_list(args.removed, "--removed"))
    direct = kan.horn_space_direct(x, h)
    payload = direct.to_json()
    payload["method"] = "direct"
    if args.recursive:
        rec = kan.horn_space_recursive(x, h)
        payload = rec.to_json()
        payload["method"] = "recursive"
        payload["agrees_with_direct"] = rec.space == direct.space
        if rec.space != direct.space:
            return CommandResult("check_failed", payload, ["recursive horn space differs from direct"])
    return CommandResult("ok", payload)


def cmd_fill(args) -> CommandResult:
    x = _load_valid_simplicial(args.input)
    e = kan.HornElement.from_json(_read_json(args.element))
    if args.horn is not None:
        h = kan.HornIndex.from_json(_read_json(args.horn))
        if h != e.index:
            raise InputError(f"--horn {h} does not match the element's horn {e.index}")
    h = e.index
    if args.generalized:
        shape = h.filtered_shape()
        if shape is None or shape[1] >= h.n:
            raise InputError(f"{h} is not of the form {{j, m+1..n}} with m < n")
        j, m = shape
        filler = kan.fill_generalized_horn(x, h.n, m, j, e)
        method = "closed_form"
    else:
        filler = kan.fill_horn_solve(x, e)
        method = "linear_solve"
    faces_ok = all(x.face(h.n, i).apply(filler) == e.components[i] for i in h.kept)
    payload = {
        "horn": h.to_json(),
        "method": method,
        "filler": [rational_to_json(v) for v in filler],
        "faces_match": faces_ok,
    }
    return CommandResult("ok" if faces_ok else "check_failed", payload)


def cmd_normalize(args) -> CommandResult:
    x = _load_valid_simplicial(args.input)
    nc = normalization.normalize(x, args.variant)
    payload = nc.to_json()
    payload["dims"] = list(nc.dims)
    return CommandResult("ok", payload)


def cmd_gamma_check(args) -> CommandResult:
    x = _load_valid_simplicial(args.input, ("svs/1",))
    checks = {}
    diags = []
    try:
        iso = normalization.chain_isomorphism(x)
        checks["chain_isomorphism"] = True
        checks["equal_dims"] = iso.normal.dims == iso.tilde.dims
        checks["equal_homology"] = (
            normalization.homology_dims(iso.normal.complex)
            == normalization.homology_dims(iso.tilde.complex)
        )
    except CheckFailed as exc:
        checks["chain_isomorphism"] = False
        diags.append(str(exc))
    checks["gamma_inverse"] = all(
        normalization.gamma_pair_inverse(x, n, m)
        for n in range(x.level + 1)
        for m in range(n + 1)
    )
    checks["chain_square"] = all(
        normalization.chain_square_identity(x, n) for n in range(1, x.level + 1)
    )
    ok = all(checks.values())
    return CommandResult("ok" if ok else "check_failed", {"all_hold": ok, "checks": checks}, diags)


def cmd_homology(args) -> CommandResult:
    schema, obj = _load(args.input, ("chain/1", "svs/1", "semi/1"))
    if schema == "chain/1":
        if not obj.validate().ok:
            raise CheckFailed("differentials do not square to zero")
        c, truncated = obj, False
    else:
        if not validate_simplicial_identities(obj).ok:
            raise CheckFailed("input violates the simplicial identities")
        c, truncated = normalization.normalize(obj, "N").complex, True
    return CommandResult("ok", {
        "dims": normalization.homology_dims(c),
        "top_relative_to_truncation": truncated,
    })


def cmd_tangent(args) -> CommandResult:
    schema, obj = _load(args.input, ("family/1", "affine/1"))
    if schema == "family/1":
        for p in obj.points:
            if not validate_simplicial_identities(obj.fibers[p]).ok:
                raise CheckFailed(f"fiber over {p!r} violates the simplicial identities")
        t = normalization.tangent_complex(obj, args.variant)
        return CommandResult("ok", t.to_json())
    report = affine.validate_affine(obj)
    if not report.ok:
        raise CheckFailed("affine object violates the simplicial identities")
    lin = affine.tangent_at_base(obj)
    nc = normalization.normalize(lin, args.variant)
    local = affine.local_kan_check(obj)
    ok = all(r["holds"] for r in local)
    payload = {
        "variant": args.variant,
        "tangent_dims": list(lin.dims),
        "complex": nc.complex.to_json(),
        "complex_dims": list(nc.dims),
        "local_kan": {"all_hold": ok, "conditions": local},
    }
    return CommandResult("ok" if ok else "check_failed", payload)


def cmd_horn_profile(args) -> CommandResult:
    _, a = _load(args.input, ("affine/1",))
    report = affine.validate_affine(a)
    if not report.ok:
        raise CheckFailed("affine object violates the simplicial identities")
    h = kan.HornIndex(args.n, _int_list(args.removed, "--removed"))
    prof = affine.horn_profile(a, h)
    return CommandResult("ok" if prof.manifold_flag else "check_failed", prof.to_json())


def cmd_gen(args) -> CommandResult:
    if args.what == "dk":
        _, c = _load(args.chain, ("chain/1",))
        if not c.validate().ok:
            raise InputError("differentials do not square to zero")
        return CommandResult("ok", dold_kan_inverse(c, args.level).to_json())
    if args.what == "random":
        spec = generators.parse_complex_spec(_read_json(args.spec))
        c = generators.random_chain_complex(
            {"sphere": spec[0], "disk": spec[1]}, args.seed
        )
        return CommandResult("ok", c.to_json())
    return CommandResult("ok", affine.build_example_5_1(args.level).to_json())


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="simpkan", description="Exact linear checks for simplicial vector spaces.")
    p.add_argument("--output", help="write the JSON result here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(func=fn)
        sp.add_argument("--output", default=argparse.SUPPRESS,
                        help="write the JSON result here instead of stdout")
        return sp

    sp = command("validate", cmd_validate, help="check identities of any supported document")
    sp.add_argument("--input", required=True)
    sp.add_argument("--kind", choices=sorted(KINDS))

    sp = command("kan", cmd_kan, help="Kan and generalized Kan conditions")
    sp.add_argument("--input", required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--i", type=int)
    sp.add_argument("--all", action="store_true")
    sp.add_argument("--generalized", metavar="J,M")

    sp = command("horn", cmd_horn, help="horn space basis and dimension")
    sp.add_argument("--input", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--removed", required=True, metavar="I,J,...")
    sp.add_argument("--recursive", action="store_true")

    sp = command("fill", cmd_fill, help="fill a horn element")
    sp.add_argument("--input", required=True)
    sp.add_argument("--horn")
    sp.add_argument("--element", required=True)
    sp.add_argument("--generalized", action="store_true")

    sp = command("normalize", cmd_normalize, help="normalized chain complex")
    sp.add_argument("--input", required=True)
    sp.add_argument("--variant", choices=normalization.VARIANTS, default="N")

    sp = command("gamma-check", cmd_gamma_check, help="verify the gamma chain isomorphism")
    sp.add_argument("--input", required=True)

    sp = command("homology", cmd_homology, help="homology dimensions")
    sp.add_argument("--input", required=True)

    sp = command("tangent", cmd_tangent, help="tangent complex of a family or affine object")
    sp.add_argument("--input", required=True)
    sp.add_argument("--variant", choices=normalization.VARIANTS, default="N")

    sp = command("horn-profile", cmd_horn_profile, help="piecewise horn space dimensions")
    sp.add_argument("--input", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--removed", required=True, metavar="I,J,...")

    gen = command("gen", None, help="generate objects")
    gsub = gen.add_subparsers(dest="what", required=True, parser_class=_Parser)
    g = gsub.add_parser("dk", help="Dold-Kan inverse of a chain complex")
    g.add_argument("--chain", required=True)
    g.add_argument("--level", type=int, required=True)
    g = gsub.add_parser("random", help="seeded random chain complex")
    g.add_argument("--spec", required=True)
    g.add_argument("--seed", type=int, required=True)
    g = gsub.add_parser("example51", help="lines glued at zero, truncated")
    g.add_argument("--level", type=int, required=True)
    for g in gsub.choices.values():
        g.add_argument("--output", default=argparse.SUPPRESS)
    gen.set_defaults(func=cmd_gen)
    return p


def run(argv) -> CommandResult:
    args = None
    try:
        args = build_parser().parse_args(argv)
        result = args.func(args)
    except CheckFailed as exc:
        result = CommandResult("check_failed", {"error": str(exc)}, [str(exc)])
    except InputError as exc:
        result = CommandResult("input_error", {"error": str(exc)}, [str(exc)])
    result.payload = {"status": result.status, "result": result.payload}
    result.output = getattr(args, "output", None)
    return result


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    result = run(argv)
    text = canonical_json(result.payload)
    if result.output:
        try:
            with open(result.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {result.output}: {exc}", file=sys.stderr)
            return EXIT["input_error"]
    else:
        sys.stdout.write(text)
    for d in result.diagnostics:
        print(d, file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())

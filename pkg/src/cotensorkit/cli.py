"""Command line front end: load a coalgebra document, run a pipeline, print a report.

Exit codes: 0 when every check passes (a verdict may still be false),
1 when a mathematical check fails, 2 on input errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from fractions import Fraction

from .coalg import (Coalgebra, InvalidStructure, NotASubcoalgebra, build, permute_basis,
                    subcoalgebra_from_span, validate)
from .exactla import LinAlgError, LinMap, Space, tensor_space

FORMAT_VERSION = 1
COMMANDS = ("validate", "filtration", "cotensor", "verify", "coseparable", "fsmooth",
            "injective", "identities", "emit")


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# the file format

def parse_rational(x, where: str) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise InputError(f"{where}: rationals must be integers or \"p/q\" strings, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"{where}: cannot parse rational {x!r}") from None
    raise InputError(f"{where}: unexpected value {x!r}")


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def coalgebra_from_dict(doc: dict, name: str = "E") -> Coalgebra:
    try:
        basis = [str(b) for b in doc["basis"]]
        delta = doc["delta"]
        eps = doc["epsilon"]
    except (KeyError, TypeError):
        raise InputError("coalgebra needs basis, delta and epsilon") from None
    try:
        S = Space(tuple(basis))
    except ValueError as exc:
        raise InputError(f"coalgebra.basis: {exc}") from None
    n = S.dim
    if len(eps) != n:
        raise InputError(f"coalgebra.epsilon has {len(eps)} entries for {n} basis elements")
    cols = [dict() for _ in range(n)]
    for t, entry in enumerate(delta):
        where = f"coalgebra.delta[{t}]"
        if not isinstance(entry, list) or len(entry) != 4:
            raise InputError(f"{where}: expected [i, j, k, coefficient]")
        i, j, k, c = entry
        for v in (i, j, k):
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < n:
                raise InputError(f"{where}: index {v!r} out of range")
        q = parse_rational(c, where)
        col = cols[k]
        col[i * n + j] = col.get(i * n + j, 0) + q
    d = LinMap(S, tensor_space(S, S), cols)
    e = LinMap(S, Space.ground(), [{0: parse_rational(x, f"coalgebra.epsilon[{t}]")}
                                   for t, x in enumerate(eps)])
    return Coalgebra(S, d, e, name=name)


def coalgebra_to_dict(C: Coalgebra) -> dict:
    n = C.dim
    delta = []
    for k, col in enumerate(C.delta.cols):
        for r in sorted(col):
            i, j = divmod(r, n)
            delta.append([i, j, k, _fmt(col[r])])
    eps = [_fmt(C.epsilon.entry(0, k)) for k in range(n)]
    return {"basis": list(C.space.labels), "delta": delta, "epsilon": eps}


def load_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InputError("the document must be a JSON object")
    fv = doc.get("format_version")
    if fv != FORMAT_VERSION:
        raise InputError(f"unsupported format_version {fv!r}")
    if ("coalgebra" in doc) == ("builder" in doc):
        raise InputError("exactly one of coalgebra and builder must be present")
    return doc


def coalgebra_of(doc: dict) -> Coalgebra:
    if "builder" in doc:
        b = doc["builder"]
        try:
            return build(b["kind"], **b.get("params", {}))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"builder: {exc}") from None
    return coalgebra_from_dict(doc["coalgebra"], name=doc.get("name", "E"))


def span_of(obj) -> list | None:
    if obj is None:
        return None
    if isinstance(obj, dict):
        obj = obj.get("subcoalgebra", obj)
        obj = obj.get("span") if isinstance(obj, dict) else obj
    if not isinstance(obj, list):
        raise InputError("subcoalgebra.span must be a list")
    out = []
    for t, v in enumerate(obj):
        if isinstance(v, str):
            out.append(v)
        elif isinstance(v, list):
            out.append([parse_rational(x, f"subcoalgebra.span[{t}]") for x in v])
        else:
            raise InputError(f"subcoalgebra.span[{t}]: expected a coefficient list or a basis label")
    return out


def emit_document(C: Coalgebra, span=None) -> dict:
    doc = {"format_version": FORMAT_VERSION, "coalgebra": coalgebra_to_dict(C)}
    if span is not None:
        doc["subcoalgebra"] = {"span": span}
    return doc


# ---------------------------------------------------------------------------
# commands

def _permute(E: Coalgebra, span, seed: int):
    rng = random.Random(seed)
    perm = list(range(E.dim))
    rng.shuffle(perm)
    E2, P = permute_basis(E, perm)
    if span is None:
        return E2, None, perm
    new = []
    for v in span:
        if isinstance(v, str):
            new.append(v)
        else:
            col = P.apply({i: x for i, x in enumerate(v) if x})
            new.append([col.get(i, Fraction(0)) for i in range(E.dim)])
    return E2, new, perm


def _need_sub(span, command: str):
    if span is None:
        raise InputError(f"{command} needs a subcoalgebra: give --sub or a subcoalgebra entry")


def _serialize(x):
    if isinstance(x, Fraction):
        return _fmt(x)
    if isinstance(x, LinMap):
        from .exactla import serialize_map
        return serialize_map(x)
    return str(x)


def run(command: str, doc: dict, span=None, max_degree: int | None = None,
        check_identities: bool = False, seed: int | None = None) -> tuple[int, dict]:
    """Run one command on a loaded document.  Returns (exit code, results)."""
    from . import homcheck
    from .cotensorcoalg import CotensorModel, universal_morphism
    from .filtration import compute_filtration
    from .identities import identity_suite

    E = coalgebra_of(doc)
    if span is None:
        span = span_of(doc.get("subcoalgebra"))
    res: dict = {}
    if seed is not None:
        E, span, perm = _permute(E, span, seed)
        res["basis_permutation"] = perm
    rep = validate(E)
    res["validation"] = rep.to_dict()
    if not rep.ok:
        return 1, res
    D = None
    if span is not None:
        try:
            D = subcoalgebra_from_span(E, span)
        except NotASubcoalgebra as exc:
            raise InputError(f"NotASubcoalgebra: {exc} (witness {exc.witness})") from None
        except (LinAlgError, KeyError, ValueError) as exc:
            raise InputError(f"subcoalgebra: {exc}") from None
        res["subcoalgebra_dim"] = D.dim
    code = 0
    if command == "validate":
        pass
    elif command == "emit":
        res["document"] = emit_document(E, span)
    elif command == "filtration":
        _need_sub(span, command)
        filt = compute_filtration(E, D)
        res["filtration"] = {"dims": filt.dims(), "stabilization_index": filt.stabilization_index,
                             "dtilde_dim": filt.dtilde.dim}
    elif command == "cotensor":
        _need_sub(span, command)
        model = CotensorModel(E, D, degree_bound=max_degree)
        res["filtration"] = {"dims": model.filt.dims(),
                             "stabilization_index": model.filt.stabilization_index}
        res["cotensor"] = model.T.to_dict()
    elif command == "verify":
        _need_sub(span, command)
        rv = homcheck.theorem_verdict(E, D, degree_bound=max_degree)
        res["verify"] = rv
        if not rv["consistent"] or rv["universal_morphism"]["verdict"] == "Failure":
            code = 1
    elif command in ("coseparable", "fsmooth"):
        target = D.coalgebra if D is not None else E
        v = homcheck.coseparable(target) if command == "coseparable" else homcheck.formally_smooth(target)
        res[command] = v.to_dict()
        if v.details.get("certificate_checked") is False:
            code = 1
    elif command == "injective":
        _need_sub(span, command)
        model = CotensorModel(E, D, degree_bound=max_degree)
        v = homcheck.i_injective_bicomodule(model.M)
        out = {"M": v.to_dict(), "quotients": {}}
        Dt = model.filt.dtilde.coalgebra
        from .comod import quotient_bicomodule
        from .filtration import dn
        for n in range(1, model.s):
            Qr, _ = quotient_bicomodule(Dt, model.filt.xi(n), "both", name=f"D̃/{dn(n)}")
            out["quotients"][str(n)] = {"right": homcheck.i_injective_right(Qr).value,
                                        "left": homcheck.i_injective_left(Qr).value}
        res["injective"] = out
    elif command == "identities":
        check_identities = True
    else:
        raise InputError(f"unknown command {command!r}")
    if check_identities:
        _need_sub(span, "identities")
        suite = identity_suite(E, D)
        res["identities"] = [r.to_dict() for r in suite]
        if not all(r.passed for r in suite):
            code = 1
    return code, res


def render_text(command: str, res: dict) -> str:
    lines = [f"command: {command}"]

    def walk(prefix, x):
        if isinstance(x, dict):
            for k, v in x.items():
                walk(f"{prefix}.{k}" if prefix else str(k), v)
        elif isinstance(x, list) and x and all(isinstance(v, dict) for v in x):
            for i, v in enumerate(x):
                walk(f"{prefix}[{i}]", v)
        else:
            lines.append(f"{prefix}: {json.dumps(x, default=_serialize, ensure_ascii=False)}")

    ids = res.pop("identities", None)
    walk("", res)
    if ids is not None:
        for r in ids:
            mark = "PASS" if r["passed"] else "FAIL"
            lines.append(f"{mark} {r['tag']} ({r['instances']} instances)"
                         + (f" failing: {', '.join(r['detail'])}" if not r["passed"] else ""))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cotensorkit", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", required=True, help="coalgebra document (JSON)")
    p.add_argument("--sub", help="subcoalgebra document (JSON) selecting D")
    p.add_argument("--max-degree", type=int, default=None, help="degree bound for T^c")
    p.add_argument("--output", choices=("json", "text"), default="json")
    p.add_argument("--check-identities", action="store_true", help="also run the identity suite")
    p.add_argument("--seed", type=int, default=None, help="permute the basis of E with this seed first")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.input, encoding="utf-8") as fh:
            raw = fh.read()
        doc = load_document(raw)
        span = None
        if args.sub:
            with open(args.sub, encoding="utf-8") as fh:
                span = span_of(load_document_loose(fh.read()))
        code, res = run(args.command, doc, span, args.max_degree, args.check_identities, args.seed)
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (InputError, InvalidStructure) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    report = {
        "format_version": FORMAT_VERSION,
        "command": args.command,
        "input_digest": hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest(),
        "seed": args.seed,
        "exit_code": code,
        "results": res,
    }
    if args.output == "json":
        print(json.dumps(report, indent=2, default=_serialize, ensure_ascii=False))
    else:
        print(render_text(args.command, dict(res, exit_code=code)))
    return code


def load_document_loose(text: str):
    """Subcoalgebra files: a bare span list or an object holding one."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands: ``algebra`` (describe an algebra), ``eval`` (evaluate a section
at a point), ``tangent`` (first derivatives through the tangent algebra),
``dist`` (distribution pairing), ``check-nat`` (series recursion checker),
``check-trans`` (transitivity residual), ``selftest`` (property battery).
Results print as JSON on stdout; exit code 0 on success, 1 on domain errors,
2 on usage errors.  The property-test seed comes from --seed or the
SUPERWEIL_SEED environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

from . import battery
from . import expr as ex
from .algebra import (
    AlgebraElement,
    make_dual_numbers,
    make_grassmann,
    make_super_dual_numbers,
    make_truncated,
    quotient,
    tensor,
)
from .apoints import eval_ast, make_apoint
from .calculus import (
    TangentVector,
    check_transitivity,
    make_distribution,
    pair_distribution,
    tangent_eval,
)
from .errors import ParseError, SuperWeilError
from .fields import RATIONAL, field_by_name
from .nattrans import check_comes_from_morphism
from .serialize import (
    Workspace,
    algebra_to_json,
    coeff_map_to_json,
    series_from_json,
)
from .superfunc import Section, SuperDomain


def parse_algebra_spec(spec, field=RATIONAL, workspace=None):
    """Mini-language: grassmann:q | trunc:k,l,s | dual | superdual |
    quot:<ambient>;<gen>;... | tensor:<a>,<b> | @name (workspace lookup)."""
    algebra, rest = _consume_spec(spec.strip(), field, workspace)
    if rest.strip():
        raise ParseError(f"trailing algebra spec input {rest!r}")
    return algebra


def _consume_spec(spec, field, workspace):
    spec = spec.lstrip()
    if spec.startswith("@"):
        m = re.match(r"@([A-Za-z_][\w.-]*)", spec)
        if not m:
            raise ParseError(f"bad workspace reference in {spec!r}")
        name = m.group(1)
        if workspace is None or name not in workspace.algebras:
            raise ParseError(f"algebra @{name} is not in the workspace")
        return workspace.algebras[name], spec[m.end() :]
    if spec.startswith("superdual"):
        return make_super_dual_numbers(field), spec[len("superdual") :]
    if spec.startswith("dual"):
        return make_dual_numbers(field), spec[len("dual") :]
    if spec.startswith("grassmann:"):
        m = re.match(r"grassmann:(\d+)", spec)
        if not m:
            raise ParseError("grassmann spec needs grassmann:q")
        return make_grassmann(int(m.group(1)), field), spec[m.end() :]
    if spec.startswith("trunc:"):
        m = re.match(r"trunc:(\d+),(\d+),(\d+)", spec)
        if not m:
            raise ParseError("trunc spec needs trunc:k,l,s")
        k, l, s = (int(v) for v in m.groups())
        return make_truncated(k, l, s, field), spec[m.end() :]
    if spec.startswith("quot:"):
        ambient, rest = _consume_spec(spec[len("quot:") :], field, workspace)
        gens = []
        while rest.startswith(";"):
            text, rest = _consume_until(rest[1:], ";,")
            if text.strip():
                gens.append(parse_element(text, ambient))
        result, _ = quotient(ambient, gens)
        return result, rest
    if spec.startswith("tensor:"):
        a, rest = _consume_spec(spec[len("tensor:") :], field, workspace)
        if not rest.startswith(","):
            raise ParseError("tensor spec needs tensor:<a>,<b>")
        b, rest = _consume_spec(rest[1:], field, workspace)
        result, _, _ = tensor(a, b)
        return result, rest
    raise ParseError(f"unknown algebra spec {spec!r}")


def _consume_until(text, stops):
    """Take characters up to a top-level stop character (parens respected)."""
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in stops and depth == 0:
            return text[:i], text[i:]
    return text, ""


_ELEMENT_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+(?:/\d+)?)"
    r"|(?P<gen>[tz]\d+)|(?P<op>[-+*^()]))"
)


def parse_element(text, algebra):
    """Arithmetic over the algebra generators t1..tk, z1..zl and numbers."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _ELEMENT_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            tail = text[pos:].strip()
            if not tail:
                break
            raise ParseError(f"bad element token at {tail[:12]!r}")
        pos = m.end()
        if m.group("num"):
            tokens.append(("num", m.group("num")))
        elif m.group("gen"):
            tokens.append(("gen", m.group("gen")))
        else:
            tokens.append(("op", m.group("op")))
    tokens.append(("end", ""))
    return _ElementParser(tokens, algebra).parse()


class _ElementParser:
    def __init__(self, tokens, algebra):
        self.tokens = tokens
        self.pos = 0
        self.algebra = algebra

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def peek(self):
        return self.tokens[self.pos]

    def parse(self):
        v = self.expr()
        if self.peek()[0] != "end":
            raise ParseError(f"trailing element input {self.peek()[1]!r}")
        return v

    def expr(self):
        kind, val = self.peek()
        negate = kind == "op" and val == "-"
        if negate:
            self.take()
        v = self.term()
        if negate:
            v = -v
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                v = v + rhs if val == "+" else v - rhs
            else:
                return v

    def term(self):
        v = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                v = v * self.factor()
            else:
                return v

    def factor(self):
        v = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val = self.take()
            if kind != "num" or not val.isdigit():
                raise ParseError("element exponent must be a non-negative integer")
            v = v ** int(val)
        return v

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.algebra.scalar(self.algebra.field.parse(val))
        if kind == "gen":
            idx = int(val[1:])
            if val[0] == "t":
                return self.algebra.gen_even(idx)
            return self.algebra.gen_odd(idx)
        if kind == "op" and val == "(":
            v = self.expr()
            kind, val = self.take()
            if (kind, val) != ("op", ")"):
                raise ParseError("unbalanced parentheses in element")
            return v
        raise ParseError(f"unexpected element token {val!r}")


_ASSIGN = re.compile(r"\s*(x|th)(\d+)\s*=\s*")


def parse_point_spec(text, algebra):
    """Assignments "x1=..., th1=..." with element expressions on the right."""
    even = {}
    odd = {}
    pos = 0
    while pos < len(text):
        m = _ASSIGN.match(text, pos)
        if not m:
            raise ParseError(f"bad point assignment near {text[pos:pos + 16]!r}")
        kind, idx = m.group(1), int(m.group(2))
        pos = m.end()
        depth = 0
        end = pos
        while end < len(text):
            ch = text[end]
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                break
            end += 1
        value = parse_element(text[pos:end], algebra)
        if kind == "x":
            even[idx] = value
        else:
            odd[idx] = value
        pos = end + 1 if end < len(text) else end
    p = max(even, default=0)
    q = max(odd, default=0)
    if sorted(even) != list(range(1, p + 1)) or sorted(odd) != list(range(1, q + 1)):
        raise ParseError("point assignments must cover x1..xp and th1..thq")
    even_vals = [even[i] for i in range(1, p + 1)]
    odd_vals = [odd[j] for j in range(1, q + 1)]
    return even_vals, odd_vals


def parse_scalar_tuple(text, field):
    text = text.strip()
    if not text:
        return ()
    return tuple(field.parse(v) for v in text.split(","))


def _emit(obj):
    sys.stdout.write(json.dumps(obj) + "\n")


def element_json(v: AlgebraElement):
    return coeff_map_to_json(v)


# -- subcommand handlers -------------------------------------------------------


def cmd_algebra(args):
    field = field_by_name(args.field)
    algebra = parse_algebra_spec(args.spec, field, _load_workspace(args))
    info = algebra_to_json(algebra)
    info["dim"] = algebra.dim
    info["height"] = algebra.height()
    info["width"] = algebra.width()
    info["basis"] = [algebra.monomial_name(m) for m in algebra.quotient_basis]
    _emit(info)
    return 0


def _load_workspace(args):
    path = getattr(args, "workspace", None)
    if path:
        return Workspace.load(path)
    return None


def cmd_eval(args):
    field = field_by_name(args.field)
    ws = _load_workspace(args)
    algebra = parse_algebra_spec(args.algebra, field, ws)
    even_vals, odd_vals = parse_point_spec(args.point, algebra)
    p, q = len(even_vals), len(odd_vals)
    if args.section.startswith("@"):
        if ws is None or args.section[1:] not in ws.sections:
            raise ParseError(f"section {args.section!r} is not in the workspace")
        s = ws.sections[args.section[1:]]
        domain = s.domain
    else:
        domain = SuperDomain(p, q)
        s = Section(domain, ex.parse_expr(args.section, p, q))
    x = make_apoint(domain, algebra, even_vals, odd_vals)
    _emit(element_json(eval_ast(x, s)))
    return 0


def cmd_tangent(args):
    field = field_by_name(args.field)
    base = parse_scalar_tuple(args.base, field)
    v_even = parse_scalar_tuple(args.vE, field)
    v_odd = parse_scalar_tuple(args.vO, field)
    p, q = len(base), len(v_odd)
    if len(v_even) != p:
        raise ParseError("--vE must have one component per base coordinate")
    domain = SuperDomain(p, q)
    s = Section(domain, ex.parse_expr(args.section, p, q))
    value, d_even, d_odd = tangent_eval(s, TangentVector(domain, base, v_even, v_odd), field)
    out = {"value": field.to_json(value), "d": field.to_json(d_even)}
    if q:
        out["d_odd"] = field.to_json(d_odd)
    _emit(out)
    return 0


def cmd_dist(args):
    field = field_by_name(args.field)
    base = parse_scalar_tuple(args.base, field)
    coeff_entries = json.loads(args.coeffs)
    coeffs = {}
    for entry in coeff_entries:
        key = (tuple(entry["nu"]), tuple(entry.get("J", ())))
        coeffs[key] = field.parse(str(entry["a"]))
    q = max((max(j for j in indices) for (_, indices) in coeffs if indices), default=0)
    p = len(base)
    domain = SuperDomain(p, max(q, args.odd_dim))
    dist = make_distribution(domain, base, args.order, coeffs)
    s = Section(domain, ex.parse_expr(args.section, domain.p, domain.q))
    _emit({"pairing": field.to_json(pair_distribution(dist, s, field))})
    return 0


def cmd_check_nat(args):
    with open(args.series, encoding="utf-8") as fh:
        series = series_from_json(json.load(fh))
    field = field_by_name(args.field)
    points = [
        parse_scalar_tuple(chunk, field)
        for chunk in args.points.split(";")
        if chunk.strip()
    ]
    report = check_comes_from_morphism(series, points, args.tol, field)
    _emit(report.to_json())
    return 0


def cmd_check_trans(args):
    field = field_by_name(args.field)
    ws = _load_workspace(args)
    a = parse_algebra_spec(args.algebra, field, ws)
    b0 = parse_algebra_spec(args.even_part, field, ws)
    prod, _, _ = tensor(a, b0)
    even_vals, odd_vals = parse_point_spec(args.coords, prod)
    domain = SuperDomain(len(even_vals), len(odd_vals))
    x = make_apoint(domain, prod, even_vals, odd_vals)
    s = Section(domain, ex.parse_expr(args.section, domain.p, domain.q))
    residual = check_transitivity(s, x, a, b0)
    _emit({"residual": float(residual)})
    return 0


def cmd_selftest(args):
    results = battery.run_all(seed=args.seed, scale=args.scale, jobs=args.jobs)
    width = max(len(r.name) for r in results)
    all_ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{r.name:<{width}}  {status}  ({r.cases} cases)"
        if r.detail:
            line += f"  {r.detail}"
        print(line)
        all_ok = all_ok and r.passed
    print("selftest:", "PASS" if all_ok else "FAIL")
    return 0 if all_ok else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="superweil",
        description="supercommutative algebra kernel with Taylor-style evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, workspace=True):
        p.add_argument("--field", default="rational", choices=("rational", "real", "complex"))
        if workspace:
            p.add_argument("--workspace", help="JSON workspace file for @name lookups")

    p = sub.add_parser("algebra", help="construct an algebra and describe it")
    p.add_argument("--spec", required=True)
    common(p)
    p.set_defaults(func=cmd_algebra)

    p = sub.add_parser("eval", help="evaluate a section at an algebra-valued point")
    p.add_argument("--algebra", required=True)
    p.add_argument("--point", required=True, help='e.g. "x1=2, th1=z1, th2=z2"')
    p.add_argument("--section", required=True)
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tangent", help="value and first derivatives at a tangent vector")
    p.add_argument("--base", required=True)
    p.add_argument("--vE", required=True)
    p.add_argument("--vO", default="")
    p.add_argument("--section", required=True)
    common(p, workspace=False)
    p.set_defaults(func=cmd_tangent)

    p = sub.add_parser("dist", help="pair a point-supported distribution with a section")
    p.add_argument("--base", required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--coeffs", required=True, help='JSON [{"nu": [...], "J": [...], "a": ...}]')
    p.add_argument("--section", required=True)
    p.add_argument("--odd-dim", type=int, default=0, dest="odd_dim")
    common(p, workspace=False)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("check-nat", help="run the morphism-origin recursion checker")
    p.add_argument("--series", required=True, help="series JSON file")
    p.add_argument("--points", required=True, help='semicolon-separated tuples "1;2,0"')
    p.add_argument("--tol", type=float, default=0.0)
    common(p, workspace=False)
    p.set_defaults(func=cmd_check_nat)

    p = sub.add_parser("check-trans", help="two-stage vs direct tensor evaluation")
    p.add_argument("--algebra", required=True)
    p.add_argument("--even-part", required=True, dest="even_part")
    p.add_argument("--coords", required=True)
    p.add_argument("--section", required=True)
    common(p)
    p.set_defaults(func=cmd_check_trans)

    p = sub.add_parser("selftest", help="run the randomized property battery")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None and args.command == "selftest":
        args.seed = int(os.environ.get("SUPERWEIL_SEED", "0"))
    try:
        return args.func(args)
    except SuperWeilError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

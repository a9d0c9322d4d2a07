"""JSON forms for every value kind, plus the named-object workspace.

All encodings are deterministic: monomial keys follow the basis order,
rationals print as "num/den" strings, floats as plain JSON numbers, complex
scalars as [re, im] pairs.  Domains carrying a predicate cannot be encoded.
"""

from __future__ import annotations

import json
import re

from . import expr as ex
from .algebra import (
    AlgebraElement,
    Monomial,
    SuperWeilAlgebra,
    make_truncated,
    quotient,
)
from .apoints import APoint, DomainMorphism, make_apoint, make_domain_morphism
from .calculus import Derivation, Distribution, TangentVector, make_derivation, make_distribution
from .errors import ParseError
from .fields import field_by_name
from .nattrans import TruncatedFormalSeries
from .superfunc import Section, SuperDomain

WORKSPACE_SCHEMA = 1

_MONOMIAL_TOKEN = re.compile(r"(t|z)(\d+)(?:\^(\d+))?")


def monomial_key(algebra, m):
    return algebra.monomial_name(m)


def parse_monomial_key(algebra, key):
    if key == "1":
        return Monomial((0,) * algebra.k, 0)
    nu = [0] * algebra.k
    mask = 0
    pos = 0
    for tok in _MONOMIAL_TOKEN.finditer(key):
        if tok.start() != pos:
            raise ParseError(f"bad monomial key {key!r}")
        pos = tok.end()
        kind, idx, power = tok.group(1), int(tok.group(2)), tok.group(3)
        if kind == "t":
            if not 1 <= idx <= algebra.k:
                raise ParseError(f"even generator t{idx} out of range in {key!r}")
            nu[idx - 1] += int(power) if power else 1
        else:
            if power:
                raise ParseError(f"odd generators cannot carry powers: {key!r}")
            if not 1 <= idx <= algebra.l:
                raise ParseError(f"odd generator z{idx} out of range in {key!r}")
            bit = 1 << (idx - 1)
            if mask & bit:
                raise ParseError(f"odd generator z{idx} repeated in {key!r}")
            mask |= bit
    if pos != len(key):
        raise ParseError(f"bad monomial key {key!r}")
    return Monomial(tuple(nu), mask)


def coeff_map_to_json(elem: AlgebraElement):
    algebra = elem.algebra
    field = algebra.field
    out = {}
    for m in algebra.quotient_basis:
        if m in elem.coeffs:
            out[monomial_key(algebra, m)] = field.to_json(elem.coeffs[m])
    return out


def coeff_map_from_json(algebra, obj):
    field = algebra.field
    coeffs = {}
    for key, value in obj.items():
        coeffs[parse_monomial_key(algebra, key)] = field.from_json(value)
    return algebra.element(coeffs)


def algebra_to_json(algebra: SuperWeilAlgebra):
    field = algebra.field
    rows = []
    for row in algebra.ideal_rows:
        entry = {}
        for i, c in enumerate(row):
            if not field.is_zero(c):
                entry[algebra.monomial_name(algebra.ambient_basis[i])] = field.to_json(c)
        rows.append(entry)
    return {
        "field": field.name,
        "k": algebra.k,
        "l": algebra.l,
        "s": algebra.s,
        "ideal": rows,
    }


def algebra_from_json(obj):
    field = field_by_name(obj["field"])
    ambient = make_truncated(obj["k"], obj["l"], obj["s"], field)
    gens = []
    for entry in obj.get("ideal", []):
        coeffs = {
            parse_monomial_key(ambient, key): field.from_json(value)
            for key, value in entry.items()
        }
        gens.append(AlgebraElement(ambient, coeffs))
    if not gens:
        return ambient
    result, _ = quotient(ambient, gens)
    return result


def domain_to_json(domain: SuperDomain):
    if domain.predicate is not None:
        raise ParseError("domains with a predicate cannot be serialized")
    box = None
    if domain.box is not None:
        box = [list(iv) if iv is not None else None for iv in domain.box]
    return {"p": domain.p, "q": domain.q, "box": box}


def domain_from_json(obj):
    box = obj.get("box")
    if box is not None:
        box = tuple(tuple(iv) if iv is not None else None for iv in box)
    return SuperDomain(obj["p"], obj["q"], box)


def section_to_json(s: Section):
    return {"domain": domain_to_json(s.domain), "expr": ex.to_text(s.expr)}


def section_from_json(obj):
    domain = domain_from_json(obj["domain"])
    return Section(domain, ex.parse_expr(obj["expr"], domain.p, domain.q))


def apoint_to_json(x: APoint):
    return {
        "domain": domain_to_json(x.domain),
        "algebra": algebra_to_json(x.algebra),
        "even": [coeff_map_to_json(v) for v in x.even_vals],
        "odd": [coeff_map_to_json(v) for v in x.odd_vals],
    }


def apoint_from_json(obj, algebra=None, domain=None):
    if algebra is None:
        algebra = algebra_from_json(obj["algebra"])
    if domain is None:
        domain = domain_from_json(obj["domain"])
    even = [coeff_map_from_json(algebra, v) for v in obj["even"]]
    odd = [coeff_map_from_json(algebra, v) for v in obj["odd"]]
    return make_apoint(domain, algebra, even, odd)


def domain_morphism_to_json(phi: DomainMorphism):
    return {
        "source": domain_to_json(phi.source),
        "target": domain_to_json(phi.target),
        "pullbacks": [ex.to_text(pb.expr) for pb in phi.pullbacks],
    }


def domain_morphism_from_json(obj):
    source = domain_from_json(obj["source"])
    target = domain_from_json(obj["target"])
    return make_domain_morphism(source, target, obj["pullbacks"])


def tangent_to_json(tv: TangentVector, field):
    return {
        "domain": domain_to_json(tv.domain),
        "base": [field.to_json(field.coerce(v)) for v in tv.base],
        "v_even": [field.to_json(field.coerce(v)) for v in tv.v_even],
        "v_odd": [field.to_json(field.coerce(v)) for v in tv.v_odd],
    }


def tangent_from_json(obj, field):
    return TangentVector(
        domain_from_json(obj["domain"]),
        tuple(field.from_json(v) for v in obj["base"]),
        tuple(field.from_json(v) for v in obj["v_even"]),
        tuple(field.from_json(v) for v in obj["v_odd"]),
    )


def derivation_to_json(d: Derivation):
    return {
        "at": apoint_to_json(d.at),
        "f_even": [coeff_map_to_json(c) for c in d.f_even],
        "f_odd": [coeff_map_to_json(c) for c in d.f_odd],
        "parity": d.parity,
    }


def derivation_from_json(obj):
    at = apoint_from_json(obj["at"])
    algebra = at.algebra
    return make_derivation(
        at,
        [coeff_map_from_json(algebra, c) for c in obj["f_even"]],
        [coeff_map_from_json(algebra, c) for c in obj["f_odd"]],
        obj["parity"],
    )


def distribution_to_json(dist: Distribution, field):
    return {
        "domain": domain_to_json(dist.domain),
        "base": [field.to_json(field.coerce(v)) for v in dist.base],
        "order": dist.order,
        "coeffs": [
            {"nu": list(nu), "J": list(indices), "a": field.to_json(field.coerce(a))}
            for (nu, indices), a in dist.coeffs
        ],
    }


def distribution_from_json(obj, field):
    coeffs = {
        (tuple(entry["nu"]), tuple(entry["J"])): field.from_json(entry["a"])
        for entry in obj["coeffs"]
    }
    return make_distribution(
        domain_from_json(obj["domain"]),
        tuple(field.from_json(v) for v in obj["base"]),
        obj["order"],
        coeffs,
    )


def series_to_json(series: TruncatedFormalSeries):
    slots = []
    for cmap in series.coeffs:
        entries = [
            {"nu": list(nu), "J": list(indices), "expr": ex.to_text(e)}
            for (nu, indices), e in sorted(cmap.items())
        ]
        slots.append(entries)
    return {
        "source": list(series.source_dims),
        "target": list(series.target_dims),
        "order": series.order,
        "slots": slots,
    }


def series_from_json(obj):
    p, q = obj["source"]
    slots = []
    for entries in obj["slots"]:
        cmap = {}
        for entry in entries:
            cmap[(tuple(entry["nu"]), tuple(entry["J"]))] = ex.parse_expr(
                entry["expr"], p, None
            )
        slots.append(cmap)
    return TruncatedFormalSeries(
        (p, q), tuple(obj["target"]), obj["order"], tuple(slots)
    )


# -- workspace ---------------------------------------------------------------------


class Workspace:
    """Named registry of algebras, domains, sections, points, morphisms, series.

    Serialization stores cross-references by name: a point's algebra and
    domain must be registered (structural equality counts) or saving fails.
    """

    def __init__(self):
        self.algebras = {}
        self.domains = {}
        self.sections = {}
        self.points = {}
        self.morphisms = {}
        self.series = {}

    def __eq__(self, other):
        return isinstance(other, Workspace) and all(
            getattr(self, slot) == getattr(other, slot) for slot in _WS_SLOTS
        )

    def _find_name(self, registry, value, kind):
        for name, known in registry.items():
            if known == value:
                return name
        raise ParseError(f"unresolved cross-reference: {kind} is not registered")

    def to_json(self):
        out = {"schema": WORKSPACE_SCHEMA}
        out["algebras"] = {n: algebra_to_json(a) for n, a in self.algebras.items()}
        out["domains"] = {n: domain_to_json(d) for n, d in self.domains.items()}
        out["sections"] = {
            n: {
                "domain": self._find_name(self.domains, s.domain, "section domain"),
                "expr": ex.to_text(s.expr),
            }
            for n, s in self.sections.items()
        }
        out["points"] = {
            n: {
                "domain": self._find_name(self.domains, x.domain, "point domain"),
                "algebra": self._find_name(self.algebras, x.algebra, "point algebra"),
                "even": [coeff_map_to_json(v) for v in x.even_vals],
                "odd": [coeff_map_to_json(v) for v in x.odd_vals],
            }
            for n, x in self.points.items()
        }
        out["morphisms"] = {
            n: {
                "source": self._find_name(self.domains, phi.source, "morphism source"),
                "target": self._find_name(self.domains, phi.target, "morphism target"),
                "pullbacks": [ex.to_text(pb.expr) for pb in phi.pullbacks],
            }
            for n, phi in self.morphisms.items()
        }
        out["series"] = {n: series_to_json(f) for n, f in self.series.items()}
        return out

    @classmethod
    def from_json(cls, obj):
        if obj.get("schema") != WORKSPACE_SCHEMA:
            raise ParseError(f"unsupported workspace schema {obj.get('schema')!r}")
        ws = cls()
        ws.algebras = {n: algebra_from_json(a) for n, a in obj.get("algebras", {}).items()}
        ws.domains = {n: domain_from_json(d) for n, d in obj.get("domains", {}).items()}
        for n, entry in obj.get("sections", {}).items():
            domain = ws.domains[entry["domain"]]
            ws.sections[n] = Section(
                domain, ex.parse_expr(entry["expr"], domain.p, domain.q)
            )
        for n, entry in obj.get("points", {}).items():
            domain = ws.domains[entry["domain"]]
            algebra = ws.algebras[entry["algebra"]]
            ws.points[n] = make_apoint(
                domain,
                algebra,
                [coeff_map_from_json(algebra, v) for v in entry["even"]],
                [coeff_map_from_json(algebra, v) for v in entry["odd"]],
            )
        for n, entry in obj.get("morphisms", {}).items():
            ws.morphisms[n] = make_domain_morphism(
                ws.domains[entry["source"]],
                ws.domains[entry["target"]],
                entry["pullbacks"],
            )
        ws.series = {n: series_from_json(f) for n, f in obj.get("series", {}).items()}
        return ws

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


_WS_SLOTS = ("algebras", "domains", "sections", "points", "morphisms", "series")

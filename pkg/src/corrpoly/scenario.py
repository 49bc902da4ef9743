"""Scenario files: the package's on-disk interface.

A scenario is a line-oriented text file with explicit section headers
(SPACE / MARGINALS / ACTS / EVENTS / PRIOR / UTILITY / SWEEP).  All
probabilities and act payoffs are exact rationals written ``num/den`` (or
plain integers); floating literals are rejected outside the UTILITY
section.  Act payoffs and explicit prior vertices may be linear expressions
in the single sweep parameter.  ``serialize`` emits the canonical form;
loading a canonical file and serializing it again is byte-identical.

Event expressions combine atoms with ``~`` (complement), ``&`` and ``|``
and parentheses.  Atoms are either ``subspace=label`` cylinders or
bracketed state tuples like ``[H_infl,*,G]`` with ``*`` as a free
coordinate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import CorrpolyError, ScenarioError
from .independence import partition_factorize, product_of_components
from .polytope import CorrelationSet
from .preferences import PriorSet, RiskUtility
from .space import Act, Collection, Event, JointDistribution, Marginal, ProductSpace

_RATIONAL_RE = re.compile(r"-?\d+(/\d+)?$")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")

SECTIONS = ("SPACE", "MARGINALS", "ACTS", "EVENTS", "PRIOR", "UTILITY", "SWEEP")


def parse_rational(token: str, line: Optional[int] = None) -> Fraction:
    if not _RATIONAL_RE.match(token):
        raise ScenarioError(f"not an exact rational: {token!r}", line)
    if "/" in token:
        num, den = token.split("/")
        if int(den) == 0:
            raise ScenarioError(f"zero denominator in {token!r}", line)
        return Fraction(int(num), int(den))
    return Fraction(int(token))


@dataclass(frozen=True)
class LinExpr:
    """const + coeff * param, with at most one parameter name."""

    const: Fraction = Fraction(0)
    coeff: Fraction = Fraction(0)
    param: Optional[str] = None

    def evaluate(self, value: Optional[Fraction]) -> Fraction:
        if self.coeff == 0:
            return self.const
        if value is None:
            raise CorrpolyError(f"unbound parameter {self.param!r}")
        return self.const + self.coeff * Fraction(value)

    def __str__(self) -> str:
        if self.coeff == 0:
            return str(self.const)
        mag = abs(self.coeff)
        part = self.param if mag == 1 else f"{mag}*{self.param}"
        if self.const == 0:
            return part if self.coeff > 0 else f"-{part}"
        sign = "+" if self.coeff > 0 else "-"
        return f"{self.const}{sign}{part}"


def parse_expr(text: str, line: Optional[int] = None) -> LinExpr:
    """Parse a rational-linear expression like ``1/6+a``, ``1/2-a`` or ``2*a``."""
    s = text.strip()
    if not s:
        raise ScenarioError("empty expression", line)
    terms = re.findall(r"[+-]?[^+-]+", s)
    const = Fraction(0)
    coeff = Fraction(0)
    param: Optional[str] = None
    for term in terms:
        term = term.strip()
        sign = Fraction(1)
        if term.startswith("+"):
            term = term[1:].strip()
        elif term.startswith("-"):
            sign = Fraction(-1)
            term = term[1:].strip()
        if "*" in term:
            mag, name = (t.strip() for t in term.split("*", 1))
            if not _NAME_RE.match(name):
                raise ScenarioError(f"bad parameter name {name!r}", line)
            if param is not None and param != name:
                raise ScenarioError("at most one parameter per expression", line)
            param = name
            coeff += sign * parse_rational(mag, line)
        elif _NAME_RE.match(term):
            if param is not None and param != term:
                raise ScenarioError("at most one parameter per expression", line)
            param = term
            coeff += sign
        else:
            const += sign * parse_rational(term, line)
    if coeff == 0:
        param = None
    return LinExpr(const, coeff, param)


# ---------------------------------------------------------------------------
# event expressions


class _EventParser:
    def __init__(self, space: ProductSpace, text: str):
        self.space = space
        self.tokens = self._tokenize(text)
        self.pos = 0

    @staticmethod
    def _tokenize(text: str) -> list[str]:
        return re.findall(r"[A-Za-z_][A-Za-z0-9_]*|[=\[\],()|&~*]", text)

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: Optional[str] = None) -> str:
        tok = self.peek()
        if tok is None:
            raise CorrpolyError("unexpected end of event expression")
        if expected is not None and tok != expected:
            raise CorrpolyError(f"expected {expected!r}, found {tok!r}")
        self.pos += 1
        return tok

    def parse(self) -> Event:
        ev = self.expr()
        if self.peek() is not None:
            raise CorrpolyError(f"trailing tokens in event expression: {self.peek()!r}")
        return ev

    def expr(self) -> Event:
        ev = self.term()
        while self.peek() == "|":
            self.take()
            ev = ev | self.term()
        return ev

    def term(self) -> Event:
        ev = self.factor()
        while self.peek() == "&":
            self.take()
            ev = ev & self.factor()
        return ev

    def factor(self) -> Event:
        tok = self.peek()
        if tok == "~":
            self.take()
            return ~self.factor()
        if tok == "(":
            self.take()
            ev = self.expr()
            self.take(")")
            return ev
        if tok == "[":
            return self.tuple_atom()
        return self.cylinder_atom()

    def tuple_atom(self) -> Event:
        self.take("[")
        pattern: list[Optional[int]] = []
        for i in range(self.space.n_subspaces):
            if i > 0:
                self.take(",")
            tok = self.take()
            if tok == "*":
                pattern.append(None)
            else:
                pattern.append(self.space.coordinate_of_label(i, tok))
        self.take("]")
        members = [
            s
            for s in self.space.states()
            if all(p is None or s[i] == p for i, p in enumerate(pattern))
        ]
        return Event.from_states(self.space, members)

    def cylinder_atom(self) -> Event:
        name = self.take()
        if self.space.subspace_names is None or name not in self.space.subspace_names:
            raise CorrpolyError(f"unknown subspace {name!r} in event expression")
        i = self.space.subspace_names.index(name)
        self.take("=")
        label = self.take()
        coord = self.space.coordinate_of_label(i, label)
        members = [s for s in self.space.states() if s[i] == coord]
        return Event.from_states(self.space, members)


def parse_event(space: ProductSpace, text: str) -> Event:
    return _EventParser(space, text).parse()


def parse_collection_spec(text: str, n_subspaces: int) -> Collection:
    """Parse a collection written with 1-based indices, e.g. ``{1},{2,3}``."""
    groups = re.findall(r"\{([0-9,\s]+)\}", text)
    if not groups or "".join(text.split()) != ",".join("{%s}" % "".join(g.split()) for g in groups):
        raise CorrpolyError(f"malformed collection spec {text!r}")
    members = []
    for g in groups:
        idx = [int(t) - 1 for t in g.replace(" ", "").split(",") if t]
        if any(not 0 <= i < n_subspaces for i in idx):
            raise CorrpolyError(f"collection index out of range in {text!r}")
        members.append(frozenset(idx))
    return Collection(tuple(members))


def format_collection_spec(coll: Collection) -> str:
    return ",".join("{" + ",".join(str(i + 1) for i in sorted(m)) + "}" for m in coll.members)


# ---------------------------------------------------------------------------
# scenario model


@dataclass(frozen=True)
class PriorSpec:
    kind: str  # full | independent | vertices | partition
    vertex_exprs: tuple[tuple[LinExpr, ...], ...] = ()
    partition: Optional[Collection] = None


@dataclass(frozen=True)
class SweepSpec:
    param: str
    grid: tuple[Fraction, ...]


@dataclass
class Scenario:
    space: ProductSpace
    marginals: tuple[Marginal, ...]
    act_exprs: dict[str, tuple[LinExpr, ...]] = field(default_factory=dict)
    events: dict[str, str] = field(default_factory=dict)  # name -> expression text
    prior: PriorSpec = PriorSpec("full")
    utility: RiskUtility = RiskUtility()
    sweep: Optional[SweepSpec] = None

    def parameters(self) -> set[str]:
        used = set()
        for exprs in self.act_exprs.values():
            used |= {e.param for e in exprs if e.param}
        for vec in self.prior.vertex_exprs:
            used |= {e.param for e in vec if e.param}
        return used

    def event(self, name: str) -> Event:
        if name not in self.events:
            raise CorrpolyError(f"unknown event {name!r}")
        return parse_event(self.space, self.events[name])

    def acts(self, param_value: Optional[Fraction] = None) -> dict[str, Act]:
        return {
            name: Act(self.space, tuple(e.evaluate(param_value) for e in exprs))
            for name, exprs in self.act_exprs.items()
        }

    def correlation_set(self) -> CorrelationSet:
        return CorrelationSet(self.space, self.marginals)

    def prior_set(
        self, cs: Optional[CorrelationSet] = None, param_value: Optional[Fraction] = None
    ) -> PriorSet:
        if cs is None:
            cs = self.correlation_set()
        if self.prior.kind == "full":
            return PriorSet.from_correlation_set(cs)
        if self.prior.kind == "independent":
            return PriorSet.singleton(cs.independent_product)
        if self.prior.kind == "vertices":
            vertices = [
                JointDistribution(self.space, tuple(e.evaluate(param_value) for e in vec))
                for vec in self.prior.vertex_exprs
            ]
            for k, v in enumerate(vertices):
                if not cs.contains(v):
                    raise CorrpolyError(
                        f"prior vertex {k} does not have the declared marginals"
                    )
            return PriorSet(self.space, vertices)
        if self.prior.kind == "partition":
            components = partition_factorize(cs, self.prior.partition, verify=False)
            vertex_lists = [comp.vertices() for comp in components]
            joints = []
            stack = [([], 0)]
            while stack:
                chosen, k = stack.pop()
                if k == len(vertex_lists):
                    joints.append(
                        product_of_components(self.space, self.prior.partition, chosen)
                    )
                    continue
                for v in vertex_lists[k]:
                    stack.append((chosen + [v], k + 1))
            return PriorSet(self.space, joints)
        raise CorrpolyError(f"unknown prior kind {self.prior.kind!r}")


# ---------------------------------------------------------------------------
# loading


def _section_lines(text: str):
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line.strip() in SECTIONS:
            current = line.strip()
            yield lineno, current, None
            continue
        if current is None:
            raise ScenarioError("content before the first section header", lineno)
        yield lineno, current, line.strip()


def loads(text: str) -> Scenario:
    names: list[str] = []
    labels: list[tuple[str, ...]] = []
    marginal_rows: list[tuple[str, tuple[Fraction, ...], int]] = []
    act_rows: list[tuple[str, tuple[LinExpr, ...]]] = []
    event_rows: list[tuple[str, str]] = []
    prior_lines: list[tuple[int, str]] = []
    utility_lines: list[tuple[int, str]] = []
    sweep_lines: list[tuple[int, str]] = []
    seen_sections = []

    for lineno, section, payload in _section_lines(text):
        if payload is None:
            if section in seen_sections:
                raise ScenarioError(f"duplicate section {section}", lineno)
            seen_sections.append(section)
            continue
        if section == "SPACE":
            name, _, rest = payload.partition(":")
            name = name.strip()
            toks = rest.split()
            if not name or not toks:
                raise ScenarioError("SPACE lines read 'name: label label ...'", lineno)
            if not _NAME_RE.match(name) or any(not _NAME_RE.match(t) for t in toks):
                raise ScenarioError("subspace and state names must be identifiers", lineno)
            names.append(name)
            labels.append(tuple(toks))
        elif section == "MARGINALS":
            name, _, rest = payload.partition(":")
            weights = tuple(parse_rational(t, lineno) for t in rest.split())
            marginal_rows.append((name.strip(), weights, lineno))
        elif section == "ACTS":
            name, _, rest = payload.partition(":")
            exprs = tuple(parse_expr(t, lineno) for t in rest.split())
            act_rows.append((name.strip(), exprs))
        elif section == "EVENTS":
            name, _, rest = payload.partition(":")
            event_rows.append((name.strip(), rest.strip()))
        elif section == "PRIOR":
            prior_lines.append((lineno, payload))
        elif section == "UTILITY":
            utility_lines.append((lineno, payload))
        elif section == "SWEEP":
            sweep_lines.append((lineno, payload))

    if not names:
        raise ScenarioError("missing SPACE section")
    space = ProductSpace(
        tuple(len(ls) for ls in labels), tuple(labels), tuple(names)
    )

    if len(marginal_rows) != len(names):
        raise ScenarioError("need exactly one MARGINALS line per subspace")
    marginals = []
    for name, weights, lineno in marginal_rows:
        if name not in names:
            raise ScenarioError(f"unknown subspace {name!r} in MARGINALS", lineno)
        i = names.index(name)
        if len(weights) != space.subspace_sizes[i]:
            raise ScenarioError(f"marginal for {name!r} has wrong length", lineno)
        try:
            marginals.append(Marginal(i, weights))
        except CorrpolyError as exc:
            raise ScenarioError(str(exc), lineno) from exc
    marginals.sort(key=lambda m: m.subspace_index)

    scenario = Scenario(space, tuple(marginals))

    for name, exprs in act_rows:
        if len(exprs) != space.total_size:
            raise ScenarioError(
                f"act {name!r} needs {space.total_size} values, got {len(exprs)}"
            )
        if name in scenario.act_exprs:
            raise ScenarioError(f"duplicate act {name!r}")
        scenario.act_exprs[name] = exprs

    for name, expr_text in event_rows:
        if name in scenario.events:
            raise ScenarioError(f"duplicate event {name!r}")
        try:
            parse_event(space, expr_text)
        except CorrpolyError as exc:
            raise ScenarioError(f"bad event {name!r}: {exc}") from exc
        scenario.events[name] = expr_text

    if prior_lines:
        scenario.prior = _parse_prior(prior_lines, space)
    if utility_lines:
        scenario.utility = _parse_utility(utility_lines)
    if sweep_lines:
        scenario.sweep = _parse_sweep(sweep_lines)

    params = scenario.parameters()
    if len(params) > 1:
        raise ScenarioError(f"multiple sweep parameters used: {sorted(params)}")
    if params and (scenario.sweep is None or scenario.sweep.param not in params):
        raise ScenarioError(
            f"parameter {sorted(params)[0]!r} is used but not declared in SWEEP"
        )
    return scenario


def _parse_prior(prior_lines, space: ProductSpace) -> PriorSpec:
    first_line, first = prior_lines[0]
    if first in ("full", "independent"):
        if len(prior_lines) > 1:
            raise ScenarioError("extra lines after prior kind", prior_lines[1][0])
        return PriorSpec(first)
    if first.startswith("partition:"):
        spec = first.partition(":")[2].strip()
        try:
            coll = parse_collection_spec(spec, space.n_subspaces)
        except CorrpolyError as exc:
            raise ScenarioError(str(exc), first_line) from exc
        if not coll.is_partition_of(space):
            raise ScenarioError("prior partition must cover all subspaces", first_line)
        return PriorSpec("partition", partition=coll)
    vertices = []
    for lineno, payload in prior_lines:
        if not payload.startswith("vertex:"):
            raise ScenarioError(
                "PRIOR is 'full', 'independent', 'partition: ...' or 'vertex: ...' lines",
                lineno,
            )
        exprs = tuple(parse_expr(t, lineno) for t in payload.partition(":")[2].split())
        if len(exprs) != space.total_size:
            raise ScenarioError(
                f"prior vertex needs {space.total_size} weights", lineno
            )
        vertices.append(exprs)
    return PriorSpec("vertices", vertex_exprs=tuple(vertices))


def _parse_utility(utility_lines) -> RiskUtility:
    lineno, payload = utility_lines[0]
    if len(utility_lines) > 1:
        raise ScenarioError("UTILITY takes a single line", utility_lines[1][0])
    if payload == "identity":
        return RiskUtility()
    toks = payload.split()
    if toks[0] != "crra":
        raise ScenarioError("UTILITY is 'identity' or 'crra rho=... scale=...'", lineno)
    rho = None
    scale = 1.0
    for tok in toks[1:]:
        key, _, val = tok.partition("=")
        try:
            if key == "rho":
                rho = float(val)
            elif key == "scale":
                scale = float(val)
            else:
                raise ScenarioError(f"unknown utility field {key!r}", lineno)
        except ValueError:
            raise ScenarioError(f"bad utility number {val!r}", lineno) from None
    if rho is None:
        raise ScenarioError("crra utility needs rho=...", lineno)
    return RiskUtility(rho=rho, scale=scale)


def _parse_sweep(sweep_lines) -> SweepSpec:
    param = None
    grid = None
    for lineno, payload in sweep_lines:
        key, _, rest = payload.partition(":")
        key = key.strip()
        if key == "param":
            param = rest.strip()
            if not _NAME_RE.match(param):
                raise ScenarioError(f"bad parameter name {param!r}", lineno)
        elif key == "grid":
            grid = tuple(parse_rational(t, lineno) for t in rest.split())
        else:
            raise ScenarioError("SWEEP lines are 'param: name' and 'grid: r r ...'", lineno)
    if param is None or grid is None:
        raise ScenarioError("SWEEP needs both a param and a grid line")
    return SweepSpec(param, grid)


def load(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


# ---------------------------------------------------------------------------
# serialization


def serialize(scenario: Scenario) -> str:
    space = scenario.space
    names = space.subspace_names or tuple(f"s{i}" for i in range(space.n_subspaces))
    out = ["SPACE"]
    for i, name in enumerate(names):
        labels = (
            space.state_labels[i]
            if space.state_labels is not None
            else tuple(str(c) for c in range(space.subspace_sizes[i]))
        )
        out.append(f"{name}: {' '.join(labels)}")
    out.append("")
    out.append("MARGINALS")
    for i, m in enumerate(scenario.marginals):
        out.append(f"{names[i]}: {' '.join(str(w) for w in m.weights)}")
    if scenario.act_exprs:
        out.append("")
        out.append("ACTS")
        for name, exprs in scenario.act_exprs.items():
            out.append(f"{name}: {' '.join(str(e) for e in exprs)}")
    if scenario.events:
        out.append("")
        out.append("EVENTS")
        for name, expr_text in scenario.events.items():
            out.append(f"{name}: {expr_text}")
    out.append("")
    out.append("PRIOR")
    if scenario.prior.kind in ("full", "independent"):
        out.append(scenario.prior.kind)
    elif scenario.prior.kind == "partition":
        out.append(f"partition: {format_collection_spec(scenario.prior.partition)}")
    else:
        for vec in scenario.prior.vertex_exprs:
            out.append(f"vertex: {' '.join(str(e) for e in vec)}")
    out.append("")
    out.append("UTILITY")
    if scenario.utility.rho is None:
        out.append("identity")
    else:
        out.append(f"crra rho={scenario.utility.rho} scale={scenario.utility.scale}")
    if scenario.sweep is not None:
        out.append("")
        out.append("SWEEP")
        out.append(f"param: {scenario.sweep.param}")
        out.append(f"grid: {' '.join(str(g) for g in scenario.sweep.grid)}")
    return "\n".join(out) + "\n"

"""Run configuration: a YAML document, schema-checked with line anchors.

The loader walks the YAML node tree so every validation error points at
file:line. Unknown keys are rejected; kernels and coordinate maps arrive
as expression strings compiled through the restricted grammar.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import yaml

from .errors import ConfigError, DomainError
from .expressions import compile_expression
from .fracops import FracOrder
from .mesh import GradedMesh, default_grading
from .operators import (
    PantographKernel,
    RHSFunction,
    VolterraOperator,
    delay_operator,
    pantograph_operator,
    zero_operator,
)
from .psi import PsiMap, get_psi, validate_psi
from .solver import ProblemSpec


def _meta_tree(node):
    """Mirror of the YAML structure holding 1-based line numbers."""
    if isinstance(node, yaml.MappingNode):
        out = {"__line__": node.start_mark.line + 1}
        for k, v in node.value:
            out[k.value] = _meta_tree(v)
        return out
    if isinstance(node, yaml.SequenceNode):
        return {
            "__line__": node.start_mark.line + 1,
            "items": [_meta_tree(v) for v in node.value],
        }
    return node.start_mark.line + 1


def load_document(path: str):
    """Parse a config file into (data, line-metadata)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", str(path)) from None
    try:
        data = yaml.safe_load(text)
        node = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f"{path}:{mark.line + 1}" if mark else str(path)
        raise ConfigError(f"invalid YAML: {exc}", loc) from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", f"{path}:1")
    return data, _meta_tree(node)


class Section:
    """A mapping within the config, with typed access and line anchors."""

    def __init__(self, filename: str, data: dict, meta, path: str = ""):
        self.filename = filename
        self.data = data
        self.meta = meta if isinstance(meta, dict) else {"__line__": 1}
        self.path = path

    def _loc(self, key: Optional[str] = None) -> str:
        line = self.meta.get("__line__", 1)
        if key is not None:
            m = self.meta.get(key)
            if isinstance(m, int):
                line = m
            elif isinstance(m, dict):
                line = m.get("__line__", line)
        return f"{self.filename}:{line}"

    def _name(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def require_keys(self, allowed):
        for key in self.data:
            if key not in allowed:
                raise ConfigError(
                    f"unknown key {self._name(key)!r}", self._loc(key)
                )

    def has(self, key: str) -> bool:
        return key in self.data

    def child(self, key: str, required: bool = True) -> Optional["Section"]:
        if key not in self.data:
            if required:
                raise ConfigError(
                    f"missing section {self._name(key)!r}", self._loc()
                )
            return None
        val = self.data[key]
        if not isinstance(val, dict):
            raise ConfigError(
                f"{self._name(key)!r} must be a mapping", self._loc(key)
            )
        return Section(self.filename, val, self.meta.get(key), self._name(key))

    def children(self, key: str) -> list:
        if key not in self.data or not isinstance(self.data[key], list):
            raise ConfigError(
                f"{self._name(key)!r} must be a list of mappings", self._loc(key)
            )
        metas = self.meta.get(key, {})
        items = metas.get("items", []) if isinstance(metas, dict) else []
        out = []
        for i, val in enumerate(self.data[key]):
            if not isinstance(val, dict):
                raise ConfigError(
                    f"{self._name(key)}[{i}] must be a mapping", self._loc(key)
                )
            meta_i = items[i] if i < len(items) else {}
            out.append(
                Section(self.filename, val, meta_i, f"{self._name(key)}[{i}]")
            )
        return out

    def scalar(self, key: str, kind: type, required: bool = True, default=None,
               choices: Optional[tuple] = None):
        if key not in self.data:
            if required:
                raise ConfigError(f"missing key {self._name(key)!r}", self._loc())
            return default
        val = self.data[key]
        if kind is float and isinstance(val, int) and not isinstance(val, bool):
            val = float(val)
        if kind is float and isinstance(val, str):
            try:
                val = float(val)
            except ValueError:
                pass
        if not isinstance(val, kind) or isinstance(val, bool) and kind is not bool:
            raise ConfigError(
                f"{self._name(key)!r} must be of type {kind.__name__}",
                self._loc(key),
            )
        if choices is not None and val not in choices:
            raise ConfigError(
                f"{self._name(key)!r} must be one of {sorted(choices)}",
                self._loc(key),
            )
        return val

    def float_list(self, key: str) -> list:
        if key not in self.data or not isinstance(self.data[key], list):
            raise ConfigError(
                f"{self._name(key)!r} must be a list of numbers", self._loc(key)
            )
        out = []
        for i, v in enumerate(self.data[key]):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(
                    f"{self._name(key)}[{i}] must be a number", self._loc(key)
                )
            out.append(float(v))
        return out


def root_section(path: str) -> Section:
    data, meta = load_document(path)
    return Section(str(path), data, meta)


# --------------------------------------------------------------------------
# builders

def build_psi(sec: Section, key: str = "psi") -> PsiMap:
    val = sec.data.get(key)
    if val is None:
        raise ConfigError(f"missing key {sec._name(key)!r}", sec._loc())
    if isinstance(val, str):
        try:
            return get_psi(val)
        except DomainError as exc:
            raise ConfigError(str(exc), sec._loc(key)) from None
    child = sec.child(key)
    child.require_keys({"expr", "prime"})
    expr = child.scalar("expr", str)
    prime = child.scalar("prime", str)
    psi = PsiMap(
        compile_expression(expr, ("t",)),
        compile_expression(prime, ("t",)),
        f"user:{expr}",
    )
    return psi


def build_rhs(sec: Section) -> RHSFunction:
    sec.require_keys({"expr", "lipschitz", "monotone"})
    expr = sec.scalar("expr", str)
    lip = sec.scalar("lipschitz", float)
    if lip < 0:
        raise ConfigError("rhs.lipschitz must be nonnegative", sec._loc("lipschitz"))
    mono = sec.scalar("monotone", bool, required=False, default=False)
    fn = compile_expression(expr, ("t", "u1"))
    return RHSFunction(lambda t, u: fn(t, u), lip, mono, expr)


def build_operator(sec: Section, psi: PsiMap, mu: float, a: float, b: float) -> VolterraOperator:
    kind = sec.scalar("kind", str, choices=("zero", "delay", "pantograph"))
    # a constant offset is the uniform-gap perturbation the data-dependence
    # bounds quantify over
    offset = sec.scalar("offset", float, required=False, default=0.0)
    if kind == "zero":
        sec.require_keys({"kind", "offset"})
        op = zero_operator()
    elif kind == "delay":
        sec.require_keys(
            {"kind", "coefficient", "rho", "lipschitz", "increasing", "offset"}
        )
        coeff = compile_expression(sec.scalar("coefficient", str), ("t",))
        rho = sec.scalar("rho", float)
        lip = sec.scalar("lipschitz", float)
        inc = sec.scalar("increasing", bool, required=False, default=None)
        try:
            op = delay_operator(psi, coeff, rho, lip, inc)
        except DomainError as exc:
            raise ConfigError(str(exc), sec._loc("rho")) from None
    else:
        sec.require_keys(
            {"kind", "kernel", "lam", "lipschitz_kernel", "increasing", "offset"}
        )
        kern = compile_expression(sec.scalar("kernel", str), ("t", "s", "u1", "u2"))
        lam = sec.scalar("lam", float)
        lip = sec.scalar("lipschitz_kernel", float)
        inc = sec.scalar("increasing", bool, required=False, default=False)
        try:
            kernel = PantographKernel(lam, kern, lip, mu, psi, inc)
        except DomainError as exc:
            raise ConfigError(str(exc), sec._loc("lam")) from None
        op = pantograph_operator(kernel, a, b)
    if offset:
        from .operators import shifted_operator

        op = shifted_operator(op, offset)
    return op


def build_problem(sec: Section) -> ProblemSpec:
    sec.require_keys({"psi", "mu", "nu", "a", "b", "x0", "xi", "rhs", "operator"})
    psi = build_psi(sec)
    mu = sec.scalar("mu", float)
    nu = sec.scalar("nu", float)
    a = sec.scalar("a", float)
    b = sec.scalar("b", float)
    x0 = sec.scalar("x0", float)
    xi = sec.scalar("xi", float)
    try:
        order = FracOrder(mu, nu)
    except DomainError as exc:
        raise ConfigError(str(exc), sec._loc("mu")) from None
    rhs = build_rhs(sec.child("rhs"))
    op = build_operator(sec.child("operator"), psi, mu, a, b)
    try:
        problem = ProblemSpec(psi, order, a, b, x0, rhs, op, xi)
    except DomainError as exc:
        raise ConfigError(str(exc), sec._loc()) from None
    # user-supplied coordinate maps must pass the monotonicity check now
    probe = GradedMesh(a, b, 64, 1.0)
    try:
        validate_psi(psi, probe.nodes)
    except DomainError as exc:
        raise ConfigError(str(exc), sec._loc("psi")) from None
    return problem


@dataclass(frozen=True)
class MeshParams:
    n: int
    grading: Optional[float]

    def build(self, problem: ProblemSpec) -> GradedMesh:
        r = self.grading
        if r is None:
            r = default_grading(problem.order.eps)
        return GradedMesh(problem.a, problem.b, self.n, r)


def build_mesh_params(sec: Optional[Section], default_n: int = 512) -> MeshParams:
    if sec is None:
        return MeshParams(default_n, None)
    sec.require_keys({"n", "grading"})
    n = sec.scalar("n", int, required=False, default=default_n)
    if n < 2:
        raise ConfigError("mesh.n must be at least 2", sec._loc("n"))
    grading = sec.scalar("grading", float, required=False, default=None)
    if grading is not None and grading < 1.0:
        raise ConfigError("mesh.grading must be >= 1", sec._loc("grading"))
    return MeshParams(n, grading)


@dataclass(frozen=True)
class SolveParams:
    tol: float
    max_iter: int


def build_solve_params(sec: Optional[Section]) -> SolveParams:
    if sec is None:
        return SolveParams(1e-10, 200)
    sec.require_keys({"tol", "max_iter"})
    tol = sec.scalar("tol", float, required=False, default=1e-10)
    max_iter = sec.scalar("max_iter", int, required=False, default=200)
    if tol <= 0:
        raise ConfigError("solve.tol must be positive", sec._loc("tol"))
    if max_iter < 1:
        raise ConfigError("solve.max_iter must be positive", sec._loc("max_iter"))
    return SolveParams(tol, max_iter)

"""Registry of the cohomogeneity-two actions and case instantiation.

The registry ships as a versioned JSON document (``data/registry.json``) so
hypothetical (d, multiplicities) combinations can be explored by editing data
rather than code.  Parametric rows carry integer expressions in their
parameters plus explicit bounds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import BoundError, RegistryError
from .field import ADMISSIBLE_D


@dataclass(frozen=True)
class CaseSpec:
    """One concrete action: chamber type d, ambient dimension, multiplicities."""

    name: str
    group: str
    action: str
    n: int
    d: int
    multiplicities: tuple[int, ...]
    params: tuple[tuple[str, int], ...] = ()

    @property
    def params_dict(self) -> dict[str, int]:
        return dict(self.params)

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v}" for k, v in self.params)
        return f"{self.name}({inner})"


@dataclass(frozen=True)
class CaseTemplate:
    """A registry row; parametric rows instantiate to a CaseSpec."""

    name: str
    group: str
    action: str
    d: int
    n_expr: object
    multiplicity_exprs: tuple
    param_specs: tuple[tuple[str, int, int], ...] = ()  # (name, min, default)
    bounds: tuple[str, ...] = ()
    notes: str = ""
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def is_parametric(self) -> bool:
        return bool(self.param_specs)

    def default_params(self) -> dict[str, int]:
        return {name: default for name, _, default in self.param_specs}


def _eval_int(expr, params: dict[str, int], where: str) -> int:
    if isinstance(expr, int):
        return expr
    try:
        value = eval(expr, {"__builtins__": {}}, dict(params))
    except Exception as exc:
        raise RegistryError(f"{where}: cannot evaluate {expr!r}: {exc}") from exc
    if not isinstance(value, int):
        raise RegistryError(f"{where}: expression {expr!r} is not an integer")
    return value


def load_registry(path: str | Path | None = None) -> list[CaseTemplate]:
    """Parse the registry document into templates (packaged file by default)."""
    if path is None:
        source = resources.files("chamberlab").joinpath("data/registry.json")
        text = source.read_text(encoding="utf-8")
        where = "registry.json"
    else:
        where = str(path)
        text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RegistryError(f"{where}: line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or "cases" not in doc:
        raise RegistryError(f"{where}: missing top-level 'cases' list")
    templates = []
    for idx, row in enumerate(doc["cases"]):
        where_row = f"{where}: case[{idx}]"
        try:
            template = CaseTemplate(
                name=row["name"],
                group=row["group"],
                action=row.get("action", ""),
                d=int(row["d"]),
                n_expr=row["n"],
                multiplicity_exprs=tuple(row["multiplicities"]),
                param_specs=tuple((p["name"], int(p["min"]), int(p["default"]))
                                  for p in row.get("params", [])),
                bounds=tuple(row.get("bounds", [])),
                notes=row.get("notes", ""),
                metadata=row.get("metadata", {}),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise RegistryError(f"{where_row}: {exc}") from exc
        if template.d not in ADMISSIBLE_D:
            raise RegistryError(f"{where_row}: inadmissible d={template.d}")
        if len(template.multiplicity_exprs) != template.d:
            raise RegistryError(f"{where_row}: expected {template.d} multiplicities")
        templates.append(template)
    names = [t.name for t in templates]
    if len(set(names)) != len(names):
        raise RegistryError(f"{where}: duplicate case names")
    return templates


def instantiate_case(template: CaseTemplate, params: dict[str, int] | None = None) -> CaseSpec:
    """Fill a template's parameters (defaults where omitted) and check bounds."""
    values = template.default_params()
    for key, val in (params or {}).items():
        if key not in values:
            raise BoundError(f"case {template.name} has no parameter {key!r}")
        values[key] = int(val)
    for bound in template.bounds:
        try:
            ok = eval(bound, {"__builtins__": {}}, dict(values))
        except Exception as exc:
            raise RegistryError(f"case {template.name}: bad bound {bound!r}: {exc}") from exc
        if not ok:
            raise BoundError(f"case {template.name}: bound '{bound}' violated by {values}")
    for name, minimum, _ in template.param_specs:
        if values[name] < minimum:
            raise BoundError(f"case {template.name}: bound '{name} >= {minimum}' "
                             f"violated by {values}")
    n = _eval_int(template.n_expr, values, f"case {template.name} (n)")
    mults = tuple(_eval_int(expr, values, f"case {template.name} (multiplicity)")
                  for expr in template.multiplicity_exprs)
    return CaseSpec(
        name=template.name,
        group=template.group,
        action=template.action,
        n=n,
        d=template.d,
        multiplicities=mults,
        params=tuple(sorted(values.items())),
    )


def validate_case(case: CaseSpec) -> list[str]:
    """Consistency violations (empty list means the case is well formed)."""
    violations = []
    if case.d not in ADMISSIBLE_D:
        violations.append(f"inadmissible chamber type d={case.d}")
    if len(case.multiplicities) != case.d:
        violations.append(f"expected {case.d} multiplicities, got {len(case.multiplicities)}")
    if any(m < 1 for m in case.multiplicities):
        violations.append("multiplicities must be positive")
    if 1 + sum(case.multiplicities) != case.n - 1:
        violations.append(
            f"dimension identity fails: 1 + sum(m) = {1 + sum(case.multiplicities)} "
            f"but n - 1 = {case.n - 1}")
    return violations


def registry_case(name: str, params: dict[str, int] | None = None,
                  registry: list[CaseTemplate] | None = None) -> CaseSpec:
    """Look a case up by name and instantiate it (defaults for parameters)."""
    templates = registry if registry is not None else load_registry()
    for template in templates:
        if template.name.lower() == name.lower():
            return instantiate_case(template, params)
    known = ", ".join(t.name for t in templates)
    raise RegistryError(f"unknown case {name!r}; known cases: {known}")


def default_cases(registry: list[CaseTemplate] | None = None) -> list[CaseSpec]:
    """Every registry row, parametric ones at their smallest admissible values."""
    templates = registry if registry is not None else load_registry()
    return [instantiate_case(t) for t in templates]

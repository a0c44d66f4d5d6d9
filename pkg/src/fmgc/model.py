"""Feature-model representation: tree, groups, cross-tree constraints.

A model is a tree of features (mandatory/optional children plus or/alternative
groups) and an ordered list of propositional constraints over the features.
Models are immutable after construction; edits go through the ``with_*``
methods, which return new models.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Mapping

from .errors import (
    ModelEditError,
    ModelParseError,
    UnknownConstraintError,
    UnknownFeatureError,
)

FEATURE_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


class Relation(str, Enum):
    MANDATORY = "mandatory"
    OPTIONAL = "optional"


class GroupKind(str, Enum):
    OR = "or"
    ALTERNATIVE = "alt"


class Pref(str, Enum):
    """Ternary preference; INCLUDE/EXCLUDE double as decision values."""

    INCLUDE = "include"
    EXCLUDE = "exclude"
    UNSTATED = "unstated"


@dataclass(frozen=True)
class Decision:
    feature: str
    value: Pref

    def __post_init__(self) -> None:
        if self.value not in (Pref.INCLUDE, Pref.EXCLUDE):
            raise ValueError("a decision must be include or exclude")

    def __repr__(self) -> str:  # compact, used in test failure output
        sign = "+" if self.value is Pref.INCLUDE else "-"
        return f"{sign}{self.feature}"


# --------------------------------------------------------------------------
# Boolean expressions (cross-tree constraints)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class And:
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Or:
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Implies:
    lhs: "Expr"
    rhs: "Expr"


Expr = Var | Not | And | Or | Implies


def expr_atoms(expr: Expr) -> frozenset[str]:
    """Distinct feature names occurring in an expression."""
    if isinstance(expr, Var):
        return frozenset((expr.name,))
    if isinstance(expr, Not):
        return expr_atoms(expr.arg)
    if isinstance(expr, (And, Or)):
        out: frozenset[str] = frozenset()
        for a in expr.args:
            out |= expr_atoms(a)
        return out
    return expr_atoms(expr.lhs) | expr_atoms(expr.rhs)


def expr_eval(expr: Expr, assignment: Mapping[str, bool]) -> bool:
    if isinstance(expr, Var):
        return assignment[expr.name]
    if isinstance(expr, Not):
        return not expr_eval(expr.arg, assignment)
    if isinstance(expr, And):
        return all(expr_eval(a, assignment) for a in expr.args)
    if isinstance(expr, Or):
        return any(expr_eval(a, assignment) for a in expr.args)
    return (not expr_eval(expr.lhs, assignment)) or expr_eval(expr.rhs, assignment)


def expr_text(expr: Expr) -> str:
    """Render in the prefix notation accepted by the parser."""
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Not):
        return f"(not {expr_text(expr.arg)})"
    if isinstance(expr, And):
        return "(and " + " ".join(expr_text(a) for a in expr.args) + ")"
    if isinstance(expr, Or):
        return "(or " + " ".join(expr_text(a) for a in expr.args) + ")"
    return f"(implies {expr_text(expr.lhs)} {expr_text(expr.rhs)})"


def is_excludes_pair(expr: Expr, f: str, g: str) -> bool:
    """True iff ``expr`` is exactly ``(not (and f g))`` up to argument order."""
    return (
        isinstance(expr, Not)
        and isinstance(expr.arg, And)
        and len(expr.arg.args) == 2
        and {a.name for a in expr.arg.args if isinstance(a, Var)} == {f, g}
        and f != g
    )


@dataclass(frozen=True)
class Constraint:
    id: int  # 1-based ordinal in declaration order
    expr: Expr

    @property
    def atoms(self) -> frozenset[str]:
        return expr_atoms(self.expr)

    @property
    def text(self) -> str:
        return expr_text(self.expr)


# --------------------------------------------------------------------------
# The model itself
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Group:
    parent: str
    kind: GroupKind
    members: tuple[str, ...]


class FeatureModel:
    """Immutable feature tree plus cross-tree constraints.

    ``features`` preserves declaration order (root first); every non-root
    feature is declared exactly once, either as a mandatory/optional child
    or as a member of an or/alternative group.
    """

    def __init__(self, name: str, root: str):
        _check_feature_name(root)
        self.name = name
        self.root = root
        self.features: list[str] = [root]
        self.children: dict[str, list[tuple[str, Relation]]] = {root: []}
        self.groups: list[Group] = []
        self.constraints: list[Constraint] = []
        self._parent: dict[str, str] = {}
        self._group_of: dict[str, Group] = {}

    # -- construction ------------------------------------------------------

    def _declare(self, feature: str, parent: str) -> None:
        _check_feature_name(feature)
        if parent not in self.children:
            raise UnknownFeatureError(f"unknown parent feature '{parent}'")
        if feature == parent:
            raise ModelEditError(f"feature '{feature}' cannot be its own child")
        if feature in self.children:
            raise ModelEditError(f"duplicate feature '{feature}'")
        self.features.append(feature)
        self.children[feature] = []
        self._parent[feature] = parent

    def add_child(self, parent: str, child: str, relation: Relation) -> None:
        self._declare(child, parent)
        self.children[parent].append((child, relation))

    def add_group(self, parent: str, kind: GroupKind, members: list[str]) -> None:
        if len(members) < 2:
            raise ModelEditError("a group needs at least 2 members")
        if len(set(members)) != len(members):
            raise ModelEditError("duplicate member within group")
        for m in members:
            if m in self._group_of:
                raise ModelEditError(f"feature '{m}' already belongs to a group")
            self._declare(m, parent)
        group = Group(parent, kind, tuple(members))
        self.groups.append(group)
        for m in members:
            self._group_of[m] = group

    def add_constraint(self, expr: Expr) -> None:
        for atom in expr_atoms(expr):
            if atom not in self.children:
                raise UnknownFeatureError(f"constraint references unknown feature '{atom}'")
        self.constraints.append(Constraint(len(self.constraints) + 1, expr))

    # -- queries -----------------------------------------------------------

    def parent_of(self, feature: str) -> str | None:
        return self._parent.get(feature)

    def group_of(self, feature: str) -> Group | None:
        return self._group_of.get(feature)

    def has_feature(self, feature: str) -> bool:
        return feature in self.children

    def require_feature(self, feature: str) -> None:
        if feature not in self.children:
            raise UnknownFeatureError(f"unknown feature '{feature}'")

    def constraint(self, cid: int) -> Constraint:
        if not 1 <= cid <= len(self.constraints):
            raise UnknownConstraintError(f"unknown constraint id {cid}")
        return self.constraints[cid - 1]

    def constraints_mentioning(self, feature: str) -> list[Constraint]:
        self.require_feature(feature)
        return [c for c in self.constraints if feature in c.atoms]

    # -- editing (copy-on-write) --------------------------------------------

    def copy(self) -> "FeatureModel":
        clone = FeatureModel(self.name, self.root)
        clone.features = list(self.features)
        clone.children = {f: list(links) for f, links in self.children.items()}
        clone.groups = list(self.groups)
        clone.constraints = list(self.constraints)
        clone._parent = dict(self._parent)
        clone._group_of = dict(self._group_of)
        return clone

    def with_added_feature(self, feature: str, parent: str, relation: Relation) -> "FeatureModel":
        clone = self.copy()
        clone.add_child(parent, feature, relation)
        return clone

    def with_added_constraint(self, expr: Expr) -> "FeatureModel":
        clone = self.copy()
        clone.add_constraint(expr)
        return clone

    # -- equality / serialization -------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FeatureModel):
            return NotImplemented
        return (
            self.name == other.name
            and self.root == other.root
            and self.features == other.features
            and self.children == other.children
            and self.groups == other.groups
            and self.constraints == other.constraints
        )

    def __repr__(self) -> str:
        return (
            f"FeatureModel({self.name!r}, {len(self.features)} features, "
            f"{len(self.constraints)} constraints)"
        )


def constraint_importance(model: FeatureModel, cid: int) -> int:
    """Number of distinct features the constraint touches."""
    return len(model.constraint(cid).atoms)


def _check_feature_name(name: str) -> None:
    if not FEATURE_NAME_RE.match(name):
        raise ModelEditError(f"invalid feature name '{name}'")


# --------------------------------------------------------------------------
# Text format
# --------------------------------------------------------------------------


def parse_expr(text: str) -> Expr:
    """Parse a constraint expression in prefix notation.

    Grammar: ``(not E)``, ``(and E E ...)``, ``(or E E ...)``,
    ``(implies E E)``, or a bare feature name.
    """
    tokens = _tokenize_expr(text)
    expr, rest = _parse_expr_tokens(tokens)
    if rest:
        raise ModelParseError(f"unexpected trailing tokens in expression: {' '.join(rest)}")
    return expr


def _tokenize_expr(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _parse_expr_tokens(tokens: list[str]) -> tuple[Expr, list[str]]:
    if not tokens:
        raise ModelParseError("empty expression")
    head, rest = tokens[0], tokens[1:]
    if head == ")":
        raise ModelParseError("unexpected ')' in expression")
    if head != "(":
        if not FEATURE_NAME_RE.match(head):
            raise ModelParseError(f"invalid atom '{head}'")
        return Var(head), rest
    if not rest:
        raise ModelParseError("unterminated '('")
    op, rest = rest[0], rest[1:]
    args: list[Expr] = []
    while rest and rest[0] != ")":
        arg, rest = _parse_expr_tokens(rest)
        args.append(arg)
    if not rest:
        raise ModelParseError("unterminated '('")
    rest = rest[1:]  # drop ')'
    if op == "not":
        if len(args) != 1:
            raise ModelParseError("'not' takes exactly one argument")
        return Not(args[0]), rest
    if op == "and":
        if len(args) < 2:
            raise ModelParseError("'and' takes at least two arguments")
        return And(tuple(args)), rest
    if op == "or":
        if len(args) < 2:
            raise ModelParseError("'or' takes at least two arguments")
        return Or(tuple(args)), rest
    if op == "implies":
        if len(args) != 2:
            raise ModelParseError("'implies' takes exactly two arguments")
        return Implies(args[0], args[1]), rest
    raise ModelParseError(f"unknown operator '{op}'")


def parse_model(text: str) -> FeatureModel:
    """Parse the line-based model format.

    Directives: ``model <name>`` (first), ``root <F>``,
    ``mandatory <parent> <child>``, ``optional <parent> <child>``,
    ``or <parent> <c1> <c2> [...]``, ``alt <parent> <c1> <c2> [...]``,
    ``constraint <expr>``. ``#`` starts a comment; blank lines are ignored.
    """
    model: FeatureModel | None = None
    name: str | None = None
    pending_constraints: list[tuple[int, str]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        directive, args = parts[0], parts[1:]

        if name is None:
            if directive != "model":
                raise ModelParseError("first directive must be 'model <name>'", lineno)
            if len(args) != 1:
                raise ModelParseError("'model' takes exactly one name", lineno)
            name = args[0]
            continue

        if directive == "model":
            raise ModelParseError("duplicate 'model' directive", lineno)

        if directive == "root":
            if model is not None:
                raise ModelParseError("duplicate 'root' directive", lineno)
            if len(args) != 1:
                raise ModelParseError("'root' takes exactly one feature", lineno)
            try:
                model = FeatureModel(name, args[0])
            except ModelEditError as exc:
                raise ModelParseError(exc.message, lineno) from exc
            continue

        if directive == "constraint":
            pending_constraints.append((lineno, line.split(None, 1)[1] if len(args) else ""))
            continue

        if model is None:
            raise ModelParseError("'root' must come before feature declarations", lineno)

        try:
            if directive in ("mandatory", "optional"):
                if len(args) != 2:
                    raise ModelParseError(f"'{directive}' takes parent and child", lineno)
                model.add_child(args[0], args[1], Relation(directive))
            elif directive in ("or", "alt"):
                if len(args) < 3:
                    raise ModelParseError(f"'{directive}' takes parent and at least two members", lineno)
                model.add_group(args[0], GroupKind(directive), args[1:])
            else:
                raise ModelParseError(f"unknown directive '{directive}'", lineno)
        except (ModelEditError, UnknownFeatureError) as exc:
            raise ModelParseError(exc.message, lineno) from exc

    if name is None:
        raise ModelParseError("empty model text: missing 'model' directive")
    if model is None:
        raise ModelParseError("missing 'root' directive")

    for lineno, expr_src in pending_constraints:
        if not expr_src:
            raise ModelParseError("'constraint' needs an expression", lineno)
        try:
            model.add_constraint(parse_expr(expr_src))
        except (ModelParseError, UnknownFeatureError) as exc:
            message = exc.message if isinstance(exc, ModelParseError) else exc.message
            raise ModelParseError(message, lineno) from exc

    return model


def serialize_model(model: FeatureModel) -> str:
    """Canonical text form; ``parse_model(serialize_model(m)) == m``."""
    lines = [f"model {model.name}", f"root {model.root}"]
    emitted_groups: set[int] = set()
    for feature in model.features:
        if feature == model.root:
            continue
        group = model.group_of(feature)
        if group is not None:
            if id(group) not in emitted_groups:
                emitted_groups.add(id(group))
                lines.append(f"{group.kind.value} {group.parent} {' '.join(group.members)}")
            continue
        parent = model.parent_of(feature)
        relation = next(rel for child, rel in model.children[parent] if child == feature)
        lines.append(f"{relation.value} {parent} {feature}")
    for constraint in model.constraints:
        lines.append(f"constraint {constraint.text}")
    return "\n".join(lines) + "\n"


def iter_tree(model: FeatureModel) -> Iterator[tuple[str, str | None, str]]:
    """Yield (feature, parent, relation-label) in declaration order."""
    for feature in model.features:
        if feature == model.root:
            yield feature, None, "root"
        elif (group := model.group_of(feature)) is not None:
            yield feature, group.parent, group.kind.value
        else:
            parent = model.parent_of(feature)
            relation = next(rel for child, rel in model.children[parent] if child == feature)
            yield feature, parent, relation.value


PHONE_MODEL_TEXT = """\
model phone
root Phone
mandatory Phone Screen
optional Phone GPS
alt Screen Basic HD
constraint (not (and Basic GPS))
"""

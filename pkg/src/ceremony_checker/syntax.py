"""Process-calculus AST: expressions, statements, processes, model definitions.

All nodes are hash-consed: structurally equal trees are the same object, so
equality and hashing are identity-based and configurations compare fast.
Expression constructors constant-fold, which lets branches that commit to the
same behaviour merge in the state graph.
"""

from __future__ import annotations

from .errors import ModelError, TypeMismatch, UndeclaredName
from .values import Sym, value_text

TAU = "tau"  # label name reserved for internal steps

_pool: dict[tuple, object] = {}


def _intern(node):
    got = _pool.get(node._key)
    if got is None:
        _pool[node._key] = node
        return node
    return got


class _Node:
    __slots__ = ("_key", "_hash")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other

    def _seal(self, key):
        self._key = key
        self._hash = hash(key)


# ---------------------------------------------------------------- expressions


class Expr(_Node):
    __slots__ = ()


class EConst(Expr):
    __slots__ = ("value",)

    def __new__(cls, value):
        self = object.__new__(cls)
        self.value = value
        self._seal(("EConst", value if not isinstance(value, bool) else ("b", value)))
        return _intern(self)

    def __repr__(self):
        return value_text(self.value)


class EVar(Expr):
    __slots__ = ("name",)

    def __new__(cls, name: str):
        self = object.__new__(cls)
        self.name = name
        self._seal(("EVar", name))
        return _intern(self)

    def __repr__(self):
        return self.name


class EArr(Expr):
    __slots__ = ("name", "index")

    def __new__(cls, name: str, index: Expr):
        self = object.__new__(cls)
        self.name = name
        self.index = index
        self._seal(("EArr", name, index))
        return _intern(self)

    def __repr__(self):
        return f"{self.name}[{self.index!r}]"


class EIn(Expr):
    __slots__ = ("setname", "item")

    def __new__(cls, setname: str, item: Expr):
        self = object.__new__(cls)
        self.setname = setname
        self.item = item
        self._seal(("EIn", setname, item))
        return _intern(self)

    def __repr__(self):
        return f"{self.setname}.Contains({self.item!r})"


class EEq(Expr):
    __slots__ = ("left", "right", "negated")

    def __new__(cls, left: Expr, right: Expr, negated: bool = False):
        if isinstance(left, EConst) and isinstance(right, EConst):
            return EConst((left.value == right.value) != negated)
        self = object.__new__(cls)
        self.left = left
        self.right = right
        self.negated = negated
        self._seal(("EEq", left, right, negated))
        return _intern(self)

    def __repr__(self):
        op = "!=" if self.negated else "=="
        return f"{self.left!r}{op}{self.right!r}"


class EAnd(Expr):
    __slots__ = ("left", "right")

    def __new__(cls, left: Expr, right: Expr):
        if isinstance(left, EConst):
            _need_bool(left.value)
            return right if left.value else EConst(False)
        if isinstance(right, EConst):
            _need_bool(right.value)
            return left if right.value else EConst(False)
        self = object.__new__(cls)
        self.left = left
        self.right = right
        self._seal(("EAnd", left, right))
        return _intern(self)

    def __repr__(self):
        return f"({self.left!r} && {self.right!r})"


class EOr(Expr):
    __slots__ = ("left", "right")

    def __new__(cls, left: Expr, right: Expr):
        if isinstance(left, EConst):
            _need_bool(left.value)
            return EConst(True) if left.value else right
        if isinstance(right, EConst):
            _need_bool(right.value)
            return EConst(True) if right.value else left
        self = object.__new__(cls)
        self.left = left
        self.right = right
        self._seal(("EOr", left, right))
        return _intern(self)

    def __repr__(self):
        return f"({self.left!r} || {self.right!r})"


class ENot(Expr):
    __slots__ = ("operand",)

    def __new__(cls, operand: Expr):
        if isinstance(operand, EConst):
            _need_bool(operand.value)
            return EConst(not operand.value)
        if isinstance(operand, ENot):
            return operand.operand
        self = object.__new__(cls)
        self.operand = operand
        self._seal(("ENot", operand))
        return _intern(self)

    def __repr__(self):
        return f"!{self.operand!r}"


def _need_bool(v):
    if not isinstance(v, bool):
        raise TypeMismatch(f"boolean operator applied to non-boolean {value_text(v)}")


# ----------------------------------------------------------------- statements


class Stmt(_Node):
    __slots__ = ()


class SAssign(Stmt):
    """Assignment to a scalar (index is None) or an array cell."""

    __slots__ = ("name", "index", "value")

    def __new__(cls, name: str, index: Expr | None, value: Expr):
        self = object.__new__(cls)
        self.name = name
        self.index = index
        self.value = value
        self._seal(("SAssign", name, index, value))
        return _intern(self)

    def __repr__(self):
        tgt = self.name if self.index is None else f"{self.name}[{self.index!r}]"
        return f"{tgt}={self.value!r}"


class SAdd(Stmt):
    __slots__ = ("setname", "item")

    def __new__(cls, setname: str, item: Expr):
        self = object.__new__(cls)
        self.setname = setname
        self.item = item
        self._seal(("SAdd", setname, item))
        return _intern(self)

    def __repr__(self):
        return f"{self.setname}.Add({self.item!r})"


class SNop(Stmt):
    __slots__ = ()

    def __new__(cls):
        self = object.__new__(cls)
        self._seal(("SNop",))
        return _intern(self)

    def __repr__(self):
        return "nop"


class SIf(Stmt):
    """Conditional inside an atomic statement block (tau{if ...} in models)."""

    __slots__ = ("cond", "then", "els")

    def __new__(cls, cond: Expr, then: tuple, els: tuple = ()):
        self = object.__new__(cls)
        self.cond = cond
        self.then = tuple(then)
        self.els = tuple(els)
        self._seal(("SIf", cond, self.then, self.els))
        return _intern(self)

    def __repr__(self):
        return f"if({self.cond!r}){{{';'.join(map(repr, self.then))}}}"


# ------------------------------------------------------------------ processes


class Proc(_Node):
    __slots__ = ()


class PStop(Proc):
    __slots__ = ()

    def __new__(cls):
        self = object.__new__(cls)
        self._seal(("PStop",))
        return _intern(self)

    def __repr__(self):
        return "Stop"


class PSkip(Proc):
    __slots__ = ()

    def __new__(cls):
        self = object.__new__(cls)
        self._seal(("PSkip",))
        return _intern(self)

    def __repr__(self):
        return "Skip"


STOP = PStop()
SKIP = PSkip()


class PEvent(Proc):
    """Named activity or internal tau step with an attached statement block."""

    __slots__ = ("label", "stmts", "cont")

    def __new__(cls, label: str, stmts: tuple, cont: Proc):
        self = object.__new__(cls)
        self.label = label
        self.stmts = tuple(stmts)
        self.cont = cont
        self._seal(("PEvent", label, self.stmts, cont))
        return _intern(self)

    def __repr__(self):
        return f"{self.label} -> {self.cont!r}"


class POut(Proc):
    __slots__ = ("channel", "exprs", "stmts", "cont")

    def __new__(cls, channel: str, exprs: tuple, stmts: tuple, cont: Proc):
        self = object.__new__(cls)
        self.channel = channel
        self.exprs = tuple(exprs)
        self.stmts = tuple(stmts)
        self.cont = cont
        self._seal(("POut", channel, self.exprs, self.stmts, cont))
        return _intern(self)

    def __repr__(self):
        vals = ".".join(repr(e) for e in self.exprs)
        return f"{self.channel}!{vals} -> {self.cont!r}"


class PatConst(_Node):
    __slots__ = ("value",)

    def __new__(cls, value):
        self = object.__new__(cls)
        self.value = value
        self._seal(("PatConst", value if not isinstance(value, bool) else ("b", value)))
        return _intern(self)

    def __repr__(self):
        return value_text(self.value)


class PatBind(_Node):
    __slots__ = ("name",)

    def __new__(cls, name: str):
        self = object.__new__(cls)
        self.name = name
        self._seal(("PatBind", name))
        return _intern(self)

    def __repr__(self):
        return f"?{self.name}"


class PIn(Proc):
    __slots__ = ("channel", "pattern", "stmts", "cont")

    def __new__(cls, channel: str, pattern: tuple, stmts: tuple, cont: Proc):
        self = object.__new__(cls)
        self.channel = channel
        self.pattern = tuple(pattern)
        self.stmts = tuple(stmts)
        self.cont = cont
        self._seal(("PIn", channel, self.pattern, self.stmts, cont))
        return _intern(self)

    def __repr__(self):
        pats = ".".join(repr(p) for p in self.pattern)
        return f"{self.channel}?{pats} -> {self.cont!r}"


class PChoice(Proc):
    __slots__ = ("left", "right")

    def __new__(cls, left: Proc, right: Proc):
        self = object.__new__(cls)
        self.left = left
        self.right = right
        self._seal(("PChoice", left, right))
        return _intern(self)

    def __repr__(self):
        return f"({self.left!r} [] {self.right!r})"


class PIndexed(Proc):
    """Replicated external choice over a finite, nonempty domain."""

    __slots__ = ("var", "domain", "body")

    def __new__(cls, var: str, domain: tuple, body: Proc):
        if not domain:
            raise ModelError(f"indexed choice over empty domain for {var}")
        self = object.__new__(cls)
        self.var = var
        self.domain = tuple(domain)
        self.body = body
        self._seal(("PIndexed", var, self.domain, body))
        return _intern(self)

    def __repr__(self):
        dom = ",".join(value_text(v) for v in self.domain)
        return f"[]{self.var}:{{{dom}}}@ {self.body!r}"


class PCond(Proc):
    __slots__ = ("guard", "then", "els", "atomic")

    def __new__(cls, guard: Expr, then: Proc, els: Proc | None = None, atomic: bool = False):
        self = object.__new__(cls)
        self.guard = guard
        self.then = then
        self.els = els
        self.atomic = atomic
        self._seal(("PCond", guard, then, els, atomic))
        return _intern(self)

    def __repr__(self):
        kw = "ifa" if self.atomic else "if"
        e = f" else {{{self.els!r}}}" if self.els is not None else ""
        return f"{kw}({self.guard!r}){{{self.then!r}}}{e}"


class PSeq(Proc):
    __slots__ = ("first", "second")

    def __new__(cls, first: Proc, second: Proc):
        self = object.__new__(cls)
        self.first = first
        self.second = second
        self._seal(("PSeq", first, second))
        return _intern(self)

    def __repr__(self):
        return f"{self.first!r}; {self.second!r}"


class PPar(Proc):
    __slots__ = ("components",)

    def __new__(cls, components):
        self = object.__new__(cls)
        self.components = tuple(components)
        self._seal(("PPar", self.components))
        return _intern(self)

    def __repr__(self):
        return " ||| ".join(repr(c) for c in self.components)


class PCall(Proc):
    __slots__ = ("name", "args")

    def __new__(cls, name: str, args: tuple = ()):
        self = object.__new__(cls)
        self.name = name
        self.args = tuple(args)
        self._seal(("PCall", name, self.args))
        return _intern(self)

    def __repr__(self):
        a = ",".join(repr(x) for x in self.args)
        return f"{self.name}({a})"


# --------------------------------------------------------------- substitution

_subst_memo: dict[tuple, object] = {}


def _binds_key(binds: dict) -> tuple:
    return tuple(sorted(binds.items()))


def subst_expr(e: Expr, binds: dict) -> Expr:
    if isinstance(e, EConst):
        return e
    if isinstance(e, EVar):
        v = binds.get(e.name)
        return e if v is None else EConst(v)
    key = ("e", e, _binds_key(binds))
    got = _subst_memo.get(key)
    if got is not None:
        return got
    if isinstance(e, EArr):
        out = EArr(e.name, subst_expr(e.index, binds))
    elif isinstance(e, EIn):
        out = EIn(e.setname, subst_expr(e.item, binds))
    elif isinstance(e, EEq):
        out = EEq(subst_expr(e.left, binds), subst_expr(e.right, binds), e.negated)
    elif isinstance(e, EAnd):
        out = EAnd(subst_expr(e.left, binds), subst_expr(e.right, binds))
    elif isinstance(e, EOr):
        out = EOr(subst_expr(e.left, binds), subst_expr(e.right, binds))
    elif isinstance(e, ENot):
        out = ENot(subst_expr(e.operand, binds))
    else:
        raise ModelError(f"unknown expression node {e!r}")
    _subst_memo[key] = out
    return out


def subst_stmts(stmts: tuple, binds: dict) -> tuple:
    return tuple(_subst_stmt(s, binds) for s in stmts)


def _subst_stmt(s: Stmt, binds: dict) -> Stmt:
    if isinstance(s, SAssign):
        idx = None if s.index is None else subst_expr(s.index, binds)
        return SAssign(s.name, idx, subst_expr(s.value, binds))
    if isinstance(s, SAdd):
        return SAdd(s.setname, subst_expr(s.item, binds))
    if isinstance(s, SIf):
        return SIf(subst_expr(s.cond, binds), subst_stmts(s.then, binds), subst_stmts(s.els, binds))
    if isinstance(s, SNop):
        return s
    raise ModelError(f"unknown statement node {s!r}")


def subst_proc(p: Proc, binds: dict) -> Proc:
    if not binds:
        return p
    key = ("p", p, _binds_key(binds))
    got = _subst_memo.get(key)
    if got is not None:
        return got
    out = _subst_proc(p, binds)
    _subst_memo[key] = out
    return out


def _subst_proc(p: Proc, binds: dict) -> Proc:
    if isinstance(p, (PStop, PSkip)):
        return p
    if isinstance(p, PEvent):
        return PEvent(p.label, subst_stmts(p.stmts, binds), subst_proc(p.cont, binds))
    if isinstance(p, POut):
        return POut(p.channel, tuple(subst_expr(e, binds) for e in p.exprs),
                    subst_stmts(p.stmts, binds), subst_proc(p.cont, binds))
    if isinstance(p, PIn):
        inner = {k: v for k, v in binds.items()
                 if not any(isinstance(pt, PatBind) and pt.name == k for pt in p.pattern)}
        return PIn(p.channel, p.pattern, subst_stmts(p.stmts, inner), subst_proc(p.cont, inner))
    if isinstance(p, PChoice):
        return PChoice(subst_proc(p.left, binds), subst_proc(p.right, binds))
    if isinstance(p, PIndexed):
        inner = {k: v for k, v in binds.items() if k != p.var}
        return PIndexed(p.var, p.domain, subst_proc(p.body, inner))
    if isinstance(p, PCond):
        els = None if p.els is None else subst_proc(p.els, binds)
        return PCond(subst_expr(p.guard, binds), subst_proc(p.then, binds), els, p.atomic)
    if isinstance(p, PSeq):
        return PSeq(subst_proc(p.first, binds), subst_proc(p.second, binds))
    if isinstance(p, PPar):
        return PPar(tuple(subst_proc(c, binds) for c in p.components))
    if isinstance(p, PCall):
        return PCall(p.name, tuple(subst_expr(a, binds) for a in p.args))
    raise ModelError(f"unknown process node {p!r}")


# ------------------------------------------------------------------- modeldef


class VarDecl:
    __slots__ = ("name", "size", "init")

    def __init__(self, name: str, init, size: int | None = None):
        """Scalar when size is None, otherwise an array of `size` cells."""
        self.name = name
        self.size = size
        self.init = init


class SetDecl:
    __slots__ = ("name", "universe", "key_index")

    def __init__(self, name: str, universe: tuple, key_index: int | None = None):
        """Plain finite set, or (key_index set) an association keyed by a tuple field."""
        self.name = name
        self.universe = tuple(universe)
        self.key_index = key_index


class ModelDef:
    """Named process definitions plus globals, sets, channels, macros, entry."""

    def __init__(self, defs: dict, variables: list, sets: list, channels: tuple,
                 macros: dict, entry: str):
        self.defs = dict(defs)              # name -> (params tuple, Proc)
        self.variables = list(variables)    # VarDecl, declaration order
        self.sets = list(sets)              # SetDecl, declaration order
        self.channels = tuple(channels)
        self.macros = dict(macros)          # name -> Expr, declaration order
        self.entry = entry
        self._validate()

    def _validate(self):
        var_names = {d.name for d in self.variables}
        set_names = {d.name for d in self.sets}
        chans = set(self.channels)
        if self.entry not in self.defs:
            raise UndeclaredName(f"entry process {self.entry} is not defined")

        def chk_expr(e, ctx, bound):
            if isinstance(e, EConst):
                return
            if isinstance(e, EVar):
                if e.name not in var_names and e.name not in bound:
                    raise UndeclaredName(f"{ctx}: variable {e.name} not declared")
            elif isinstance(e, EArr):
                if e.name not in var_names:
                    raise UndeclaredName(f"{ctx}: array {e.name} not declared")
                chk_expr(e.index, ctx, bound)
            elif isinstance(e, EIn):
                if e.setname not in set_names:
                    raise UndeclaredName(f"{ctx}: set {e.setname} not declared")
                chk_expr(e.item, ctx, bound)
            elif isinstance(e, (EEq, EAnd, EOr)):
                chk_expr(e.left, ctx, bound)
                chk_expr(e.right, ctx, bound)
            elif isinstance(e, ENot):
                chk_expr(e.operand, ctx, bound)

        def chk_stmts(stmts, ctx, bound):
            for s in stmts:
                if isinstance(s, SAssign):
                    if s.name not in var_names:
                        raise UndeclaredName(f"{ctx}: assignment to undeclared {s.name}")
                    if s.index is not None:
                        chk_expr(s.index, ctx, bound)
                    chk_expr(s.value, ctx, bound)
                elif isinstance(s, SAdd):
                    if s.setname not in set_names:
                        raise UndeclaredName(f"{ctx}: add to undeclared set {s.setname}")
                    chk_expr(s.item, ctx, bound)
                elif isinstance(s, SIf):
                    chk_expr(s.cond, ctx, bound)
                    chk_stmts(s.then, ctx, bound)
                    chk_stmts(s.els, ctx, bound)

        def chk_proc(p, ctx, bound):
            if isinstance(p, (PStop, PSkip)):
                return
            if isinstance(p, PEvent):
                chk_stmts(p.stmts, ctx, bound)
                chk_proc(p.cont, ctx, bound)
            elif isinstance(p, POut):
                if p.channel not in chans:
                    raise UndeclaredName(f"{ctx}: channel {p.channel} not declared")
                for e in p.exprs:
                    chk_expr(e, ctx, bound)
                chk_stmts(p.stmts, ctx, bound)
                chk_proc(p.cont, ctx, bound)
            elif isinstance(p, PIn):
                if p.channel not in chans:
                    raise UndeclaredName(f"{ctx}: channel {p.channel} not declared")
                inner = bound | {pt.name for pt in p.pattern if isinstance(pt, PatBind)}
                chk_stmts(p.stmts, ctx, inner)
                chk_proc(p.cont, ctx, inner)
            elif isinstance(p, PChoice):
                chk_proc(p.left, ctx, bound)
                chk_proc(p.right, ctx, bound)
            elif isinstance(p, PIndexed):
                chk_proc(p.body, ctx, bound | {p.var})
            elif isinstance(p, PCond):
                chk_expr(p.guard, ctx, bound)
                chk_proc(p.then, ctx, bound)
                if p.els is not None:
                    chk_proc(p.els, ctx, bound)
            elif isinstance(p, PSeq):
                chk_proc(p.first, ctx, bound)
                chk_proc(p.second, ctx, bound)
            elif isinstance(p, PPar):
                for c in p.components:
                    chk_proc(c, ctx, bound)
            elif isinstance(p, PCall):
                if p.name not in self.defs:
                    raise UndeclaredName(f"{ctx}: call to undefined process {p.name}")
                params, _ = self.defs[p.name]
                if len(params) != len(p.args):
                    raise ModelError(f"{ctx}: {p.name} expects {len(params)} args, got {len(p.args)}")
                for a in p.args:
                    chk_expr(a, ctx, bound)

        for name, (params, body) in self.defs.items():
            chk_proc(body, name, set(params))
        for name, body in self.macros.items():
            chk_expr(body, f"macro {name}", set())

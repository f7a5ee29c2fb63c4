"""One-step operational semantics: enabled moves and the successor function.

Per-process move sets are static (computed once per process expression), so
the per-state work reduces to guard evaluation, statement execution, and
rendezvous matching, all memoized against interned valuations.
"""

from __future__ import annotations

from .errors import ModelError
from .state import GlobalState, Layout
from .syntax import (EConst, ModelDef, PatBind, PatConst, PCall, PChoice,
                     PCond, PEvent, PIn, PIndexed, POut, PPar, PSeq, PSkip,
                     PStop, Proc, SKIP, TAU, subst_expr, subst_proc,
                     subst_stmts)
from .values import value_text

# ------------------------------------------------------------------- labels


class EventLabel:
    __slots__ = ("kind", "name", "channel", "values", "text", "_hash")

    def __init__(self, kind, name=None, channel=None, values=None):
        self.kind = kind  # "tau" | "named" | "comm"
        self.name = name
        self.channel = channel
        self.values = values
        if kind == "tau":
            self.text = "tau"
        elif kind == "named":
            self.text = name
        else:
            self.text = channel + "." + ".".join(value_text(v) for v in values)
        self._hash = hash((kind, self.text))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other

    def __repr__(self):
        return self.text


TAU_LABEL = EventLabel("tau")
_named_labels: dict[str, EventLabel] = {}
_comm_labels: dict[tuple, EventLabel] = {}


def named_label(name: str) -> EventLabel:
    lab = _named_labels.get(name)
    if lab is None:
        lab = EventLabel("named", name=name)
        _named_labels[name] = lab
    return lab


def comm_label(channel: str, values: tuple) -> EventLabel:
    key = (channel, values)
    lab = _comm_labels.get(key)
    if lab is None:
        lab = EventLabel("comm", channel=channel, values=values)
        _comm_labels[key] = lab
    return lab


# ------------------------------------------------------------------- config


class Config:
    """Globals plus the current expression of each top-level component."""

    __slots__ = ("globals", "components", "_hash")

    def __init__(self, globals_: GlobalState, components: tuple):
        self.globals = globals_
        self.components = tuple(components)
        self._hash = hash((globals_.data, self.components))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return (isinstance(other, Config) and self.globals.data == other.globals.data
                and self.components == other.components)

    def is_terminated(self) -> bool:
        return all(isinstance(c, PSkip) for c in self.components)

    def __repr__(self):
        return f"Config({self.globals!r}, {self.components!r})"


# ---------------------------------------------------------------- move sets


class _LocalMove:
    __slots__ = ("label", "stmts", "cont")

    def __init__(self, label, stmts, cont):
        self.label = label
        self.stmts = stmts
        self.cont = cont


class _CondMove:
    __slots__ = ("guard", "then", "els")

    def __init__(self, guard, then, els):
        self.guard = guard
        self.then = then
        self.els = els


class _OutMove:
    __slots__ = ("channel", "exprs", "stmts", "cont")

    def __init__(self, channel, exprs, stmts, cont):
        self.channel = channel
        self.exprs = exprs
        self.stmts = stmts
        self.cont = cont


class _InMove:
    __slots__ = ("channel", "pattern", "stmts", "cont")

    def __init__(self, channel, pattern, stmts, cont):
        self.channel = channel
        self.pattern = pattern
        self.stmts = stmts
        self.cont = cont


class _MoveSet:
    __slots__ = ("locals", "conds", "outs", "ins", "splits")

    def __init__(self, locals_=(), conds=(), outs=(), ins=(), splits=()):
        self.locals = tuple(locals_)
        self.conds = tuple(conds)
        self.outs = tuple(outs)
        self.ins = tuple(ins)
        self.splits = tuple(splits)

    def merged(self, other: "_MoveSet") -> "_MoveSet":
        return _MoveSet(self.locals + other.locals, self.conds + other.conds,
                        self.outs + other.outs, self.ins + other.ins,
                        self.splits + other.splits)


_EMPTY = _MoveSet()


class Runtime:
    """Compiled model: layout, move tables, and memoized effect application."""

    def __init__(self, model: ModelDef):
        self.model = model
        self.layout = Layout(model)
        self._moves: dict[Proc, _MoveSet] = {}
        self._in_progress: set[Proc] = set()
        self._exec_memo: dict = {}
        self._eval_memo: dict = {}
        self._match_memo: dict = {}
        self._recv_stmt_memo: dict = {}
        self._recv_cont_memo: dict = {}

    # -- static move computation

    def moves(self, p: Proc) -> _MoveSet:
        ms = self._moves.get(p)
        if ms is None:
            if p in self._in_progress:
                raise ModelError(f"unguarded recursion through {p!r}")
            self._in_progress.add(p)
            try:
                ms = self._compute_moves(p)
            finally:
                self._in_progress.discard(p)
            self._moves[p] = ms
        return ms

    def _compute_moves(self, p: Proc) -> _MoveSet:
        if isinstance(p, (PStop, PSkip)):
            return _EMPTY
        if isinstance(p, PEvent):
            return _MoveSet(locals_=[_LocalMove(p.label, p.stmts, p.cont)])
        if isinstance(p, POut):
            return _MoveSet(outs=[_OutMove(p.channel, p.exprs, p.stmts, p.cont)])
        if isinstance(p, PIn):
            return _MoveSet(ins=[_InMove(p.channel, p.pattern, p.stmts, p.cont)])
        if isinstance(p, PChoice):
            return self.moves(p.left).merged(self.moves(p.right))
        if isinstance(p, PIndexed):
            ms = _EMPTY
            for v in p.domain:
                ms = ms.merged(self.moves(subst_proc(p.body, {p.var: v})))
            return ms
        if isinstance(p, PCond):
            return _MoveSet(conds=[_CondMove(p.guard, p.then, p.els if p.els is not None else SKIP)])
        if isinstance(p, PSeq):
            if isinstance(p.first, PSkip):
                return _MoveSet(locals_=[_LocalMove(TAU, (), p.second)])
            inner = self.moves(p.first)
            if inner.splits:
                raise ModelError("interleaving under sequential composition is not supported")
            wrap = lambda c: PSeq(c, p.second)
            return _MoveSet(
                locals_=[_LocalMove(m.label, m.stmts, wrap(m.cont)) for m in inner.locals],
                conds=[_CondMove(m.guard, wrap(m.then), wrap(m.els)) for m in inner.conds],
                outs=[_OutMove(m.channel, m.exprs, m.stmts, wrap(m.cont)) for m in inner.outs],
                ins=[_InMove(m.channel, m.pattern, m.stmts, wrap(m.cont)) for m in inner.ins],
            )
        if isinstance(p, PPar):
            return _MoveSet(splits=[p.components])
        if isinstance(p, PCall):
            return self.moves(self._unfold(p))
        raise ModelError(f"unknown process node {p!r}")

    def _unfold(self, call: PCall) -> Proc:
        params, body = self.model.defs[call.name]
        binds = {}
        for param, arg in zip(params, call.args):
            if not isinstance(arg, EConst):
                raise ModelError(f"{call.name}: call argument {arg!r} is not constant")
            binds[param] = arg.value
        return subst_proc(body, binds)

    # -- memoized effects

    def exec_stmts(self, stmts: tuple, g: tuple) -> tuple:
        if not stmts:
            return g
        key = (stmts, g)
        got = self._exec_memo.get(key)
        if got is None:
            fn = self.layout.compile_stmts(stmts)
            got = g if fn is None else fn(g)
            self._exec_memo[key] = got
        return got

    def eval_expr(self, e, g: tuple):
        key = (e, g)
        got = self._eval_memo.get(key)
        if got is None:
            got = self.layout.compile_expr(e)(g)
            self._eval_memo[key] = got
        return got

    def _match(self, pattern: tuple, values: tuple):
        key = (pattern, values)
        got = self._match_memo.get(key, False)
        if got is False:
            got = None
            if len(pattern) == len(values):
                binds = {}
                for pat, v in zip(pattern, values):
                    if isinstance(pat, PatConst):
                        if pat.value != v:
                            break
                    else:
                        binds[pat.name] = v
                else:
                    got = binds
            self._match_memo[key] = got
        return got

    def _recv_stmts(self, stmts: tuple, binds_key: tuple, binds: dict) -> tuple:
        key = (stmts, binds_key)
        got = self._recv_stmt_memo.get(key)
        if got is None:
            got = subst_stmts(stmts, binds)
            self._recv_stmt_memo[key] = got
        return got

    def _recv_cont(self, cont: Proc, binds_key: tuple, binds: dict) -> Proc:
        key = (cont, binds_key)
        got = self._recv_cont_memo.get(key)
        if got is None:
            got = subst_proc(cont, binds)
            self._recv_cont_memo[key] = got
        return got

    # -- successor computation on raw tuples

    def successors_raw(self, g: tuple, comps: tuple, proc_name: str = "") -> list:
        """All enabled one-step transitions as (label, globals', comps', moved, sender)."""
        try:
            movesets = [self.moves(c) for c in comps]
            out = []
            for i, ms in enumerate(movesets):
                pre, post = comps[:i], comps[i + 1:]
                for lm in ms.locals:
                    g2 = self.exec_stmts(lm.stmts, g)
                    lab = TAU_LABEL if lm.label == TAU else named_label(lm.label)
                    out.append((lab, g2, pre + (lm.cont,) + post, (i,), None))
                for cm in ms.conds:
                    cond = self.eval_expr(cm.guard, g)
                    if cond is not True and cond is not False:
                        raise ModelError(f"guard {cm.guard!r} is not boolean")
                    tgt = cm.then if cond else cm.els
                    out.append((TAU_LABEL, g, pre + (tgt,) + post, (i,), None))
                for sp in ms.splits:
                    out.append((TAU_LABEL, g, pre + sp + post, (i,), None))
            for ch in self.model.channels:
                for i, msi in enumerate(movesets):
                    for om in msi.outs:
                        if om.channel != ch:
                            continue
                        values = tuple(self.eval_expr(e, g) for e in om.exprs)
                        for j, msj in enumerate(movesets):
                            if j == i:
                                continue
                            for im in msj.ins:
                                if im.channel != ch:
                                    continue
                                binds = self._match(im.pattern, values)
                                if binds is None:
                                    continue
                                bkey = tuple(sorted(binds.items(), key=lambda kv: kv[0]))
                                g1 = self.exec_stmts(om.stmts, g)
                                g2 = self.exec_stmts(self._recv_stmts(im.stmts, bkey, binds), g1)
                                cont_j = self._recv_cont(im.cont, bkey, binds)
                                comps2 = list(comps)
                                comps2[i] = om.cont
                                comps2[j] = cont_j
                                out.append((comm_label(ch, values), g2, tuple(comps2), (i, j), i))
            return out
        except ModelError as err:
            if proc_name:
                raise ModelError(f"{proc_name}: {err}") from err
            raise


def compile_model(model: ModelDef) -> Runtime:
    return Runtime(model)


# ------------------------------------------------------------- public kernel


def initial_config(rt: Runtime) -> Config:
    return Config(GlobalState(rt.layout, rt.layout.initial), (PCall(rt.model.entry),))


def eval_expr(state: GlobalState, e) -> object:
    """Evaluate a pure expression under a valuation."""
    return state.layout.compile_expr(e)(state.data)


def exec_stmts(state: GlobalState, stmts) -> GlobalState:
    """Execute a statement list in order; the input state is not mutated."""
    fn = state.layout.compile_stmts(tuple(stmts))
    return state if fn is None else GlobalState(state.layout, fn(state.data))


def successors(rt: Runtime, config: Config) -> list[tuple[EventLabel, Config]]:
    """Every enabled one-step transition of the configuration, in fixed order."""
    raw = rt.successors_raw(config.globals.data, config.components)
    lay = rt.layout
    return [(lab, Config(GlobalState(lay, g2), comps2)) for lab, g2, comps2, _, _ in raw]


def successors_detailed(rt: Runtime, config: Config):
    """Like successors, but with (moved component indices, sender index)."""
    raw = rt.successors_raw(config.globals.data, config.components)
    lay = rt.layout
    return [(lab, Config(GlobalState(lay, g2), comps2), moved, sender)
            for lab, g2, comps2, moved, sender in raw]

"""Shared ceremony state: layout compilation and immutable global valuations.

The runtime representation of a valuation is a flat tuple with one entry per
declaration: scalars hold a value, arrays hold a tuple of cell values, plain
sets hold a bitmask over their declared universe, and keyed stores hold one
optional tuple per key. Evaluation and statement execution are compiled to
closures over slot indices once per model.
"""

from __future__ import annotations

from .errors import IndexOutOfRange, ModelError, TypeMismatch, UndeclaredName
from .syntax import (EAnd, EArr, EConst, EEq, EIn, ENot, EOr, EVar, Expr,
                     ModelDef, SAdd, SAssign, SIf, SNop, Stmt)
from .values import value_text


class Layout:
    """Slot assignment and compiled accessors for one model's globals."""

    def __init__(self, model: ModelDef):
        self.model = model
        self.slot = {}
        self.kinds = {}
        self.array_size = {}
        self.set_decl = {}
        self.plain_bit = {}     # set name -> {value: bit}
        self.key_pos = {}       # keyed set name -> {key value: position}
        init = []
        for d in model.variables:
            self.slot[d.name] = len(init)
            if d.size is None:
                self.kinds[d.name] = "scalar"
                init.append(d.init)
            else:
                self.kinds[d.name] = "array"
                self.array_size[d.name] = d.size
                cells = tuple(d.init) if isinstance(d.init, (tuple, list)) else (d.init,) * d.size
                if len(cells) != d.size:
                    raise ModelError(f"array {d.name} initialiser has wrong length")
                init.append(cells)
        for d in model.sets:
            self.slot[d.name] = len(init)
            self.set_decl[d.name] = d
            if d.key_index is None:
                self.kinds[d.name] = "set"
                self.plain_bit[d.name] = {v: i for i, v in enumerate(d.universe)}
                init.append(0)
            else:
                self.kinds[d.name] = "keyed"
                self.key_pos[d.name] = {v: i for i, v in enumerate(d.universe)}
                init.append((None,) * len(d.universe))
        self.initial = tuple(init)
        self._expr_cache = {}
        self._stmts_cache = {}

    # -------------------------------------------------------------- compiling

    def compile_expr(self, e: Expr):
        fn = self._expr_cache.get(e)
        if fn is None:
            fn = self._compile_expr(e)
            self._expr_cache[e] = fn
        return fn

    def _compile_expr(self, e: Expr):
        if isinstance(e, EConst):
            v = e.value
            return lambda g: v
        if isinstance(e, EVar):
            name = e.name
            if name not in self.slot:
                raise UndeclaredName(f"variable {name} not declared")
            if self.kinds[name] in ("set", "keyed"):
                raise TypeMismatch(f"{name} is a set; use Contains")
            i = self.slot[name]
            return lambda g: g[i]
        if isinstance(e, EArr):
            name = e.name
            if self.kinds.get(name) != "array":
                raise UndeclaredName(f"array {name} not declared")
            i = self.slot[name]
            size = self.array_size[name]
            idxf = self.compile_expr(e.index)

            def arr(g, i=i, idxf=idxf, size=size, name=name):
                k = idxf(g)
                if not isinstance(k, int) or isinstance(k, bool) or not 0 <= k < size:
                    raise IndexOutOfRange(f"{name}[{k}] out of range 0..{size - 1}")
                return g[i][k]

            return arr
        if isinstance(e, EIn):
            name = e.setname
            kind = self.kinds.get(name)
            itemf = self.compile_expr(e.item)
            i = self.slot[name]
            if kind == "set":
                bits = self.plain_bit[name]

                def contains(g, i=i, itemf=itemf, bits=bits):
                    b = bits.get(itemf(g))
                    return b is not None and (g[i] >> b) & 1 == 1

                return contains
            if kind == "keyed":
                pos = self.key_pos[name]
                ki = self.set_decl[name].key_index

                def kcontains(g, i=i, itemf=itemf, pos=pos, ki=ki):
                    item = itemf(g)
                    if not isinstance(item, tuple) or ki >= len(item):
                        raise TypeMismatch("keyed store membership needs a tuple item")
                    p = pos.get(item[ki])
                    return p is not None and g[i][p] == item

                return kcontains
            raise UndeclaredName(f"set {name} not declared")
        if isinstance(e, EEq):
            lf = self.compile_expr(e.left)
            rf = self.compile_expr(e.right)
            if e.negated:
                return lambda g: lf(g) != rf(g)
            return lambda g: lf(g) == rf(g)
        if isinstance(e, EAnd):
            lf = self.compile_expr(e.left)
            rf = self.compile_expr(e.right)

            def andf(g, lf=lf, rf=rf):
                a = lf(g)
                if a is not True and a is not False:
                    raise TypeMismatch(f"&& applied to {value_text(a)}")
                return a and _bool(rf(g), "&&")

            return andf
        if isinstance(e, EOr):
            lf = self.compile_expr(e.left)
            rf = self.compile_expr(e.right)

            def orf(g, lf=lf, rf=rf):
                a = lf(g)
                if a is not True and a is not False:
                    raise TypeMismatch(f"|| applied to {value_text(a)}")
                return a or _bool(rf(g), "||")

            return orf
        if isinstance(e, ENot):
            f = self.compile_expr(e.operand)
            return lambda g: not _bool(f(g), "!")
        raise ModelError(f"unknown expression {e!r}")

    def compile_stmts(self, stmts: tuple):
        fn = self._stmts_cache.get(stmts)
        if fn is None:
            steps = [self._compile_stmt(s) for s in stmts if not isinstance(s, SNop)]
            if not steps:
                fn = None  # identity
            elif len(steps) == 1:
                fn = steps[0]
            else:
                def run(g, steps=tuple(steps)):
                    for st in steps:
                        g = st(g)
                    return g
                fn = run
            self._stmts_cache[stmts] = fn
        return fn

    def _compile_stmt(self, s: Stmt):
        if isinstance(s, SAssign):
            name = s.name
            if name not in self.slot or self.kinds[name] in ("set", "keyed"):
                raise UndeclaredName(f"assignment target {name} not a variable")
            i = self.slot[name]
            vf = self.compile_expr(s.value)
            if s.index is None:
                if self.kinds[name] != "scalar":
                    raise TypeMismatch(f"{name} is an array; assign to a cell")
                return lambda g: g[:i] + (vf(g),) + g[i + 1:]
            size = self.array_size.get(name)
            if size is None:
                raise TypeMismatch(f"{name} is not an array")
            idxf = self.compile_expr(s.index)

            def setcell(g, i=i, idxf=idxf, vf=vf, size=size, name=name):
                k = idxf(g)
                if not isinstance(k, int) or isinstance(k, bool) or not 0 <= k < size:
                    raise IndexOutOfRange(f"{name}[{k}] out of range 0..{size - 1}")
                arr = g[i]
                arr = arr[:k] + (vf(g),) + arr[k + 1:]
                return g[:i] + (arr,) + g[i + 1:]

            return setcell
        if isinstance(s, SAdd):
            name = s.setname
            kind = self.kinds.get(name)
            i = self.slot[name] if name in self.slot else None
            itemf = self.compile_expr(s.item)
            if kind == "set":
                bits = self.plain_bit[name]

                def add(g, i=i, itemf=itemf, bits=bits, name=name):
                    v = itemf(g)
                    b = bits.get(v)
                    if b is None:
                        raise ModelError(f"{name}.Add({value_text(v)}): outside declared universe")
                    return g[:i] + (g[i] | (1 << b),) + g[i + 1:]

                return add
            if kind == "keyed":
                pos = self.key_pos[name]
                ki = self.set_decl[name].key_index

                def kadd(g, i=i, itemf=itemf, pos=pos, ki=ki, name=name):
                    item = itemf(g)
                    if not isinstance(item, tuple) or ki >= len(item):
                        raise TypeMismatch(f"{name}.Add needs a tuple item")
                    p = pos.get(item[ki])
                    if p is None:
                        raise ModelError(f"{name}.Add: key {value_text(item[ki])} outside universe")
                    slotv = g[i]
                    slotv = slotv[:p] + (item,) + slotv[p + 1:]
                    return g[:i] + (slotv,) + g[i + 1:]

                return kadd
            raise UndeclaredName(f"set {name} not declared")
        if isinstance(s, SIf):
            cf = self.compile_expr(s.cond)
            tf = self.compile_stmts(s.then)
            ef = self.compile_stmts(s.els)

            def iff(g, cf=cf, tf=tf, ef=ef):
                br = tf if _bool(cf(g), "if") else ef
                return g if br is None else br(g)

            return iff
        raise ModelError(f"unknown statement {s!r}")


def _bool(v, op):
    if v is not True and v is not False:
        raise TypeMismatch(f"{op} applied to {value_text(v)}")
    return v


class GlobalState:
    """Immutable valuation of a model's globals (value semantics)."""

    __slots__ = ("layout", "data")

    def __init__(self, layout: Layout, data: tuple):
        self.layout = layout
        self.data = data

    def get(self, name: str):
        lay = self.layout
        if name not in lay.slot:
            raise UndeclaredName(f"{name} not declared")
        raw = self.data[lay.slot[name]]
        kind = lay.kinds[name]
        if kind == "set":
            uni = lay.set_decl[name].universe
            return frozenset(v for i, v in enumerate(uni) if (raw >> i) & 1)
        if kind == "keyed":
            uni = lay.set_decl[name].universe
            return {k: raw[i] for i, k in enumerate(uni) if raw[i] is not None}
        return raw

    def with_values(self, **overrides) -> "GlobalState":
        lay = self.layout
        data = list(self.data)
        for name, v in overrides.items():
            if name not in lay.slot:
                raise UndeclaredName(f"{name} not declared")
            kind = lay.kinds[name]
            if kind == "set":
                mask = 0
                bits = lay.plain_bit[name]
                for item in v:
                    mask |= 1 << bits[item]
                data[lay.slot[name]] = mask
            elif kind == "keyed":
                uni = lay.set_decl[name].universe
                slotv = [None] * len(uni)
                for item in v:
                    slotv[lay.key_pos[name][item[lay.set_decl[name].key_index]]] = tuple(item)
                data[lay.slot[name]] = tuple(slotv)
            elif kind == "array":
                data[lay.slot[name]] = tuple(v)
            else:
                data[lay.slot[name]] = v
        return GlobalState(lay, tuple(data))

    def __eq__(self, other):
        return isinstance(other, GlobalState) and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __repr__(self):
        names = list(self.layout.slot)
        return "{" + ", ".join(f"{n}={value_text(self.data[self.layout.slot[n]])}" for n in names) + "}"

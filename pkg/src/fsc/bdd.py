"""Reduced ordered binary decision diagrams.

A single table of (level, low, high) nodes with a unique table guaranteeing
canonicity: two predicates over one store are logically equivalent iff their
node ids are equal. Terminals are ids 0 and 1. Levels are ranks in the fixed
variable order; smaller level means closer to the root.

State encodings interleave current and next ranks: bit pair ``k`` occupies
levels ``2k`` (current) and ``2k+1`` (next), which keeps frame/identity
relations linear and makes the current/next rename a local pair swap.

Effort accounting: ``ops`` counts every recursive operation step,
``cache_misses`` the steps that had to compute a fresh result, ``peak_nodes``
the largest node table seen (monotone until an explicit ``collect``).
"""

from __future__ import annotations

import sys

_TERMINAL_LEVEL = 1 << 60

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

# operation tags for the computed cache
_AND, _OR, _XOR, _DIFF, _NOT, _ITE, _EX, _ANDEX, _SWAP, _SAT, _ISOP, _RESTR = range(12)

_COMMUTATIVE = {_AND, _OR, _XOR}


class BDD:
    """Node store with apply/quantify/rename/count operations."""

    FALSE = 0
    TRUE = 1

    def __init__(self, levels: int = 0):
        self._var = [_TERMINAL_LEVEL, _TERMINAL_LEVEL]
        self._lo = [0, 1]
        self._hi = [0, 1]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._cache: dict[tuple, object] = {}
        self._cubes: dict[tuple[int, ...], int] = {}
        self._cube_list: list[tuple[int, ...]] = []
        self._cube_pos: list[dict[int, int]] = []
        self.levels = levels
        self.ops = 0
        self.cache_misses = 0
        self.peak_nodes = 2
        self._ensure_recursion(levels)

    def _ensure_recursion(self, levels: int):
        # recursion nests a few frames per level; small stores never get here
        need = 8 * levels + 1000
        if need > 20000 and sys.getrecursionlimit() < need:
            sys.setrecursionlimit(need)

    def add_levels(self, count: int) -> int:
        """Reserve ``count`` new levels; returns the first one."""
        first = self.levels
        self.levels += count
        self._ensure_recursion(self.levels)
        return first

    # -- structure ----------------------------------------------------------

    def mk(self, level: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (level, lo, hi)
        node = self._unique.get(key)
        if node is None:
            node = len(self._var)
            self._var.append(level)
            self._lo.append(lo)
            self._hi.append(hi)
            self._unique[key] = node
            if node + 1 > self.peak_nodes:
                self.peak_nodes = node + 1
        return node

    def var(self, level: int) -> int:
        return self.mk(level, 0, 1)

    def nvar(self, level: int) -> int:
        return self.mk(level, 1, 0)

    def level_of(self, node: int) -> int:
        return self._var[node]

    def node_count(self) -> int:
        return len(self._var)

    def size(self, node: int) -> int:
        """Number of nodes reachable from ``node``, terminals excluded."""
        seen = set()
        stack = [node]
        while stack:
            n = stack.pop()
            if n > 1 and n not in seen:
                seen.add(n)
                stack.append(self._lo[n])
                stack.append(self._hi[n])
        return len(seen)

    def support(self, node: int) -> set[int]:
        seen = set()
        levels = set()
        stack = [node]
        while stack:
            n = stack.pop()
            if n > 1 and n not in seen:
                seen.add(n)
                levels.add(self._var[n])
                stack.append(self._lo[n])
                stack.append(self._hi[n])
        return levels

    # -- boolean algebra ------------------------------------------------------

    def apply_and(self, a: int, b: int) -> int:
        return self._apply(_AND, a, b)

    def apply_or(self, a: int, b: int) -> int:
        return self._apply(_OR, a, b)

    def apply_xor(self, a: int, b: int) -> int:
        return self._apply(_XOR, a, b)

    def apply_diff(self, a: int, b: int) -> int:
        """a and not b."""
        return self._apply(_DIFF, a, b)

    def _apply(self, op: int, a: int, b: int) -> int:
        self.ops += 1
        if op == _AND:
            if a == 0 or b == 0:
                return 0
            if a == 1:
                return b
            if b == 1 or a == b:
                return a
        elif op == _OR:
            if a == 1 or b == 1:
                return 1
            if a == 0:
                return b
            if b == 0 or a == b:
                return a
        elif op == _XOR:
            if a == b:
                return 0
            if a == 0:
                return b
            if b == 0:
                return a
            if a == 1:
                return self.neg(b)
            if b == 1:
                return self.neg(a)
        else:  # _DIFF
            if a == 0 or b == 1 or a == b:
                return 0
            if b == 0:
                return a
            if a == 1:
                return self.neg(b)
        if op in _COMMUTATIVE and a > b:
            a, b = b, a
        key = (op, a, b)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self.cache_misses += 1
        va, vb = self._var[a], self._var[b]
        v = va if va < vb else vb
        a0, a1 = (self._lo[a], self._hi[a]) if va == v else (a, a)
        b0, b1 = (self._lo[b], self._hi[b]) if vb == v else (b, b)
        result = self.mk(v, self._apply(op, a0, b0), self._apply(op, a1, b1))
        self._cache[key] = result
        return result

    def neg(self, a: int) -> int:
        self.ops += 1
        if a < 2:
            return 1 - a
        key = (_NOT, a)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self.cache_misses += 1
        result = self.mk(self._var[a], self.neg(self._lo[a]), self.neg(self._hi[a]))
        self._cache[key] = result
        return result

    def ite(self, f: int, g: int, h: int) -> int:
        self.ops += 1
        if f == 1:
            return g
        if f == 0:
            return h
        if g == h:
            return g
        if g == 1 and h == 0:
            return f
        if g == 0 and h == 1:
            return self.neg(f)
        key = (_ITE, f, g, h)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self.cache_misses += 1
        v = min(self._var[f], self._var[g], self._var[h])
        f0, f1 = (self._lo[f], self._hi[f]) if self._var[f] == v else (f, f)
        g0, g1 = (self._lo[g], self._hi[g]) if self._var[g] == v else (g, g)
        h0, h1 = (self._lo[h], self._hi[h]) if self._var[h] == v else (h, h)
        result = self.mk(v, self.ite(f0, g0, h0), self.ite(f1, g1, h1))
        self._cache[key] = result
        return result

    # -- quantification ---------------------------------------------------------

    def register_cube(self, levels) -> int:
        """Intern a sorted level tuple for use with exists/and_exists/sat_count."""
        cube = tuple(sorted(levels))
        cid = self._cubes.get(cube)
        if cid is None:
            cid = len(self._cube_list)
            self._cubes[cube] = cid
            self._cube_list.append(cube)
            self._cube_pos.append({lvl: i for i, lvl in enumerate(cube)})
        return cid

    def exists(self, a: int, cube_id: int) -> int:
        return self._exists(a, cube_id, 0)

    def _exists(self, a: int, cid: int, i: int) -> int:
        self.ops += 1
        cube = self._cube_list[cid]
        if a < 2:
            return a
        v = self._var[a]
        while i < len(cube) and cube[i] < v:
            i += 1
        if i == len(cube):
            return a
        key = (_EX, a, cid, i)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self.cache_misses += 1
        if cube[i] == v:
            result = self._apply(_OR,
                                 self._exists(self._lo[a], cid, i + 1),
                                 self._exists(self._hi[a], cid, i + 1))
        else:
            result = self.mk(v,
                             self._exists(self._lo[a], cid, i),
                             self._exists(self._hi[a], cid, i))
        self._cache[key] = result
        return result

    def and_exists(self, a: int, b: int, cube_id: int) -> int:
        """exists cube: (a and b), fused into one pass (relational product)."""
        return self._and_exists(a, b, cube_id, 0)

    def _and_exists(self, a: int, b: int, cid: int, i: int) -> int:
        self.ops += 1
        if a == 0 or b == 0:
            return 0
        if a == 1 and b == 1:
            return 1
        cube = self._cube_list[cid]
        va, vb = self._var[a], self._var[b]
        v = va if va < vb else vb
        while i < len(cube) and cube[i] < v:
            i += 1
        if i == len(cube):
            return self._apply(_AND, a, b)
        if a > b:
            a, b = b, a
            va, vb = vb, va
        key = (_ANDEX, a, b, cid, i)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self.cache_misses += 1
        a0, a1 = (self._lo[a], self._hi[a]) if va == v else (a, a)
        b0, b1 = (self._lo[b], self._hi[b]) if vb == v else (b, b)
        if cube[i] == v:
            low = self._and_exists(a0, b0, cid, i + 1)
            if low == 1:
                result = 1
            else:
                result = self._apply(_OR, low, self._and_exists(a1, b1, cid, i + 1))
        else:
            result = self.mk(v,
                             self._and_exists(a0, b0, cid, i),
                             self._and_exists(a1, b1, cid, i))
        self._cache[key] = result
        return result

    # -- current/next rename -------------------------------------------------------

    def swap_pairs(self, a: int) -> int:
        """Exchange levels 2k and 2k+1 for every k (current <-> next rename)."""
        self.ops += 1
        if a < 2:
            return a
        key = (_SWAP, a)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self.cache_misses += 1
        base = self._var[a] & ~1
        f = [[None, None], [None, None]]
        for b0 in (0, 1):
            n = a
            if self._var[n] == base:
                n = self._hi[n] if b0 else self._lo[n]
            for b1 in (0, 1):
                x = n
                if x > 1 and self._var[x] == base + 1:
                    x = self._hi[x] if b1 else self._lo[x]
                f[b0][b1] = x
        result = self.mk(
            base,
            self.mk(base + 1, self.swap_pairs(f[0][0]), self.swap_pairs(f[1][0])),
            self.mk(base + 1, self.swap_pairs(f[0][1]), self.swap_pairs(f[1][1])))
        self._cache[key] = result
        return result

    # -- counting --------------------------------------------------------------------

    def sat_count(self, a: int, cube_id: int) -> int:
        """Exact number of assignments over the cube's levels satisfying ``a``.

        The support of ``a`` must lie within the cube. Arbitrary precision.
        """
        cube = self._cube_list[cube_id]
        pos = self._cube_pos[cube_id]
        n = len(cube)

        def count(node: int) -> int:
            # number of satisfying assignments over levels strictly below node's
            if node < 2:
                return node
            key = (_SAT, node, cube_id)
            hit = self._cache.get(key)
            if hit is not None:
                return hit
            v = pos.get(self._var[node])
            if v is None:
                raise ValueError("sat_count: node depends on a level outside the cube")
            lo, hi = self._lo[node], self._hi[node]
            total = 0
            for child in (lo, hi):
                if child < 2:
                    total += child << (n - v - 1)
                else:
                    w = pos[self._var[child]]
                    total += count(child) << (w - v - 1)
            self._cache[key] = total
            return total

        if a < 2:
            return a << n
        v = pos.get(self._var[a])
        if v is None:
            raise ValueError("sat_count: node depends on a level outside the cube")
        return count(a) << v

    # -- cubes and evaluation ------------------------------------------------------------

    def cube(self, literals: dict[int, bool]) -> int:
        node = 1
        for level in sorted(literals, reverse=True):
            node = self.mk(level, 0, node) if literals[level] else self.mk(level, node, 0)
        return node

    def eval(self, a: int, assignment) -> bool:
        node = a
        while node > 1:
            node = self._hi[node] if assignment[self._var[node]] else self._lo[node]
        return bool(node)

    def pick(self, a: int) -> dict[int, bool] | None:
        """One satisfying assignment over the support levels, or None."""
        if a == 0:
            return None
        out: dict[int, bool] = {}
        node = a
        while node > 1:
            if self._lo[node] != 0:
                out[self._var[node]] = False
                node = self._lo[node]
            else:
                out[self._var[node]] = True
                node = self._hi[node]
        return out

    # -- don't-care minimization ------------------------------------------------------

    def restrict(self, f: int, care: int) -> int:
        """Coudert-Madre restrict: agrees with f on care, smaller elsewhere."""
        self.ops += 1
        if care == 0:
            return 0
        if f < 2 or care == 1:
            return f
        key = (_RESTR, f, care)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self.cache_misses += 1
        vf, vc = self._var[f], self._var[care]
        if vc < vf:
            cid = self.register_cube((vc,))
            result = self.restrict(f, self.exists(care, cid))
        else:
            c0, c1 = (self._lo[care], self._hi[care]) if vc == vf else (care, care)
            if c0 == 0:
                result = self.restrict(self._hi[f], c1)
            elif c1 == 0:
                result = self.restrict(self._lo[f], c0)
            else:
                result = self.mk(vf, self.restrict(self._lo[f], c0),
                                 self.restrict(self._hi[f], c1))
        self._cache[key] = result
        return result

    def isop(self, lower: int, upper: int):
        """Minato-Morreale irredundant sum of products with lower <= F <= upper.

        Returns (bdd, cubes); each cube is a tuple of (level, polarity).
        """
        self.ops += 1
        if lower == 0:
            return 0, ()
        if upper == 1:
            return 1, ((),)
        key = (_ISOP, lower, upper)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self.cache_misses += 1
        v = min(self._var[lower], self._var[upper])
        l0, l1 = (self._lo[lower], self._hi[lower]) if self._var[lower] == v else (lower, lower)
        u0, u1 = (self._lo[upper], self._hi[upper]) if self._var[upper] == v else (upper, upper)
        f0, c0 = self.isop(self.apply_diff(l0, u1), u0)
        f1, c1 = self.isop(self.apply_diff(l1, u0), u1)
        rest = self.apply_or(self.apply_diff(l0, f0), self.apply_diff(l1, f1))
        fd, cd = self.isop(rest, self.apply_and(u0, u1))
        bdd = self.mk(v, self.apply_or(f0, fd), self.apply_or(f1, fd))
        cubes = tuple(((v, False),) + c for c in c0) \
            + tuple(((v, True),) + c for c in c1) + cd
        result = (bdd, cubes)
        self._cache[key] = result
        return result

    # -- persistence -------------------------------------------------------------------

    def dump(self, roots: list[int]) -> str:
        """Text format: one ``id level low high`` line per live node, then roots."""
        order: list[int] = []
        seen = set()

        def visit(n):
            if n > 1 and n not in seen:
                seen.add(n)
                visit(self._lo[n])
                visit(self._hi[n])
                order.append(n)

        for r in roots:
            visit(r)
        lines = [f"{n} {self._var[n]} {self._lo[n]} {self._hi[n]}" for n in order]
        lines.append("roots " + " ".join(str(r) for r in roots))
        return "\n".join(lines) + "\n"

    def load(self, text: str) -> list[int]:
        remap = {0: 0, 1: 1}
        roots: list[int] = []
        for line in text.strip().splitlines():
            parts = line.split()
            if parts[0] == "roots":
                roots = [remap[int(p)] for p in parts[1:]]
            else:
                nid, level, lo, hi = (int(p) for p in parts)
                remap[nid] = self.mk(level, remap[lo], remap[hi])
        return roots

    # -- garbage collection ----------------------------------------------------------------

    def collect(self, roots: list[int]) -> dict[int, int]:
        """Epoch sweep: drop nodes unreachable from roots, clear the op cache.

        Returns old-id -> new-id for the surviving nodes; callers must remap
        every node id they hold. ``peak_nodes`` keeps its high-water mark.
        """
        live: list[int] = []
        seen = {0, 1}
        stack = [r for r in roots if r > 1]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.append(self._lo[n])
            stack.append(self._hi[n])
            live.append(n)
        live.sort()
        remap = {0: 0, 1: 1}
        var = [_TERMINAL_LEVEL, _TERMINAL_LEVEL]
        lo = [0, 1]
        hi = [0, 1]
        unique: dict[tuple[int, int, int], int] = {}
        for n in live:
            new = len(var)
            var.append(self._var[n])
            lo.append(remap[self._lo[n]])
            hi.append(remap[self._hi[n]])
            unique[(var[new], lo[new], hi[new])] = new
            remap[n] = new
        self._var, self._lo, self._hi, self._unique = var, lo, hi, unique
        self._cache.clear()
        return remap

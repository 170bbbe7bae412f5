"""Reading and writing networks.

Two formats are supported:

* AIGER, combinational subset.  ASCII (``aag``) is read and written; binary
  (``aig``) is read only.  XOR nodes are lowered to three ANDs on write and can
  optionally be recovered on read.
* A native line format that keeps XOR nodes::

      pi <name>
      and <id> <lit> <lit>
      xor <id> <lit> <lit>
      po <lit> [<name>]

  Literals are ``2 * id + complemented``; PIs take ids 1, 2, ... in order and
  gates follow.  Writing always produces the canonical form, so
  ``write_xag(read_xag(write_xag(n))) == write_xag(n)``.
"""

from __future__ import annotations

from pathlib import Path

from .xag import AND, XOR, Network


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


# ----------------------------------------------------------------------
# AIGER


def _ints(parts, lineno):
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(parts)!r}", lineno) from None
    if any(v < 0 for v in vals):
        raise ParseError("negative literal", lineno)
    return vals


def _parse_header(line: str, lineno: int = 1):
    parts = line.split()
    if not parts or parts[0] not in ("aag", "aig"):
        raise ParseError("missing 'aag'/'aig' header", lineno)
    if len(parts) < 6:
        raise ParseError("header needs M I L O A", lineno)
    m, i, l, o, a = _ints(parts[1:6], lineno)
    extra = _ints(parts[6:], lineno)
    if l:
        raise ParseError("latches are not supported (combinational networks only)", lineno)
    if any(extra[:1]):
        raise ParseError("bad-state properties are not supported", lineno)
    if m < i + l + a:
        raise ParseError("M must be at least I + L + A", lineno)
    return parts[0], m, i, o, a


def _build_aig(m, inputs, outputs, ands, extract_xors, names=None, lineno_of=None):
    """Build a Network from AIG literals (``ands`` is a list of (lhs, r0, r1))."""
    names = names or {}
    lineno_of = lineno_of or {}
    defined = {}
    for idx, lit in enumerate(inputs):
        if lit & 1 or lit == 0:
            raise ParseError(f"input literal {lit} must be even and non-zero", lineno_of.get(("i", idx)))
        if lit >> 1 in defined:
            raise ParseError(f"variable {lit >> 1} defined twice", lineno_of.get(("i", idx)))
        defined[lit >> 1] = ("i", idx)
    for idx, (lhs, r0, r1) in enumerate(ands):
        ln = lineno_of.get(("a", idx))
        if lhs & 1 or lhs == 0:
            raise ParseError(f"AND lhs {lhs} must be even and non-zero", ln)
        if lhs >> 1 > m:
            raise ParseError(f"AND lhs {lhs} exceeds M", ln)
        if lhs >> 1 in defined:
            raise ParseError(f"variable {lhs >> 1} defined twice", ln)
        defined[lhs >> 1] = ("a", idx)
    for idx, (lhs, r0, r1) in enumerate(ands):
        for r in (r0, r1):
            if r >> 1 and r >> 1 not in defined:
                raise ParseError(f"literal {r} is undefined", lineno_of.get(("a", idx)))
    for idx, lit in enumerate(outputs):
        if lit >> 1 and lit >> 1 not in defined:
            raise ParseError(f"output literal {lit} is undefined", lineno_of.get(("o", idx)))

    gate_of = {lhs >> 1: (r0, r1) for lhs, r0, r1 in ands}
    skip = set()
    xor_of = {}
    if extract_xors:
        fanout = {}
        for lhs, r0, r1 in ands:
            for r in (r0, r1):
                fanout[r >> 1] = fanout.get(r >> 1, 0) + 1
        for lit in outputs:
            fanout[lit >> 1] = fanout.get(lit >> 1, 0) + 1
        for lhs, r0, r1 in ands:
            # lhs = !p & !q with p = x & y, q = !x & !y  ==>  lhs = x ^ y
            if not (r0 & 1 and r1 & 1):
                continue
            p, q = r0 >> 1, r1 >> 1
            if p not in gate_of or q not in gate_of or p == q:
                continue
            if fanout.get(p) != 1 or fanout.get(q) != 1 or p in skip or q in skip:
                continue
            x, y = gate_of[p]
            u, v = gate_of[q]
            if {u, v} == {x ^ 1, y ^ 1} and x >> 1 != y >> 1:
                xor_of[lhs >> 1] = (x, y)
                skip.update((p, q))

    net = Network()
    lit_map = {0: 0}
    for idx, lit in enumerate(inputs):
        lit_map[lit >> 1] = net.create_pi(names.get(("i", idx))).lit

    def conv(lit):
        return lit_map[lit >> 1] ^ (lit & 1)

    # gates may be listed out of order in ASCII files
    pending = [lhs >> 1 for lhs, _, _ in ands if lhs >> 1 not in skip]
    on_path = set()
    for root in pending:
        if root in lit_map:
            continue
        stack = [(root, False)]
        while stack:
            v, expanded = stack.pop()
            if v in lit_map:
                continue
            ins = xor_of.get(v) or gate_of[v]
            if expanded:
                on_path.discard(v)
                kind = XOR if v in xor_of else AND
                lit_map[v] = net.gate_lit(kind, conv(ins[0]), conv(ins[1]))
                continue
            if v in on_path:
                # reached again from one of its own fanins
                raise ParseError(f"combinational cycle through variable {v}")
            on_path.add(v)
            stack.append((v, True))
            for r in ins:
                if r >> 1 not in lit_map:
                    stack.append((r >> 1, False))
    for idx, lit in enumerate(outputs):
        net.create_po(conv(lit), names.get(("o", idx)))
    return net


def _parse_symbols(lines, start, lineno0):
    names = {}
    for k, line in enumerate(lines[start:]):
        line = line.strip()
        if not line:
            continue
        if line == "c":
            break
        kind = line[0]
        if kind in "io" and " " in line:
            pos, name = line[1:].split(" ", 1)
            try:
                names[(kind, int(pos))] = name
            except ValueError:
                raise ParseError(f"bad symbol line {line!r}", lineno0 + k) from None
    return names


def read_aiger(text, extract_xors: bool = False) -> Network:
    """Parse ASCII or binary AIGER (``str`` or ``bytes``)."""
    if isinstance(text, bytes):
        if text.startswith(b"aig"):
            return _read_binary_aiger(text, extract_xors)
        text = text.decode("ascii")
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    fmt, m, i, o, a = _parse_header(lines[0])
    if fmt != "aag":
        raise ParseError("binary AIGER must be read from bytes", 1)
    need = 1 + i + o + a
    if len(lines) < need:
        raise ParseError(f"expected {i} inputs, {o} outputs and {a} ANDs", len(lines))
    lineno_of = {}
    inputs = []
    for k in range(i):
        ln = 2 + k
        vals = _ints(lines[ln - 1].split(), ln)
        if len(vals) != 1:
            raise ParseError("input line must hold one literal", ln)
        inputs.append(vals[0])
        lineno_of[("i", k)] = ln
    outputs = []
    for k in range(o):
        ln = 2 + i + k
        vals = _ints(lines[ln - 1].split(), ln)
        if len(vals) != 1:
            raise ParseError("output line must hold one literal", ln)
        if vals[0] >> 1 > m:
            raise ParseError(f"output literal {vals[0]} exceeds M", ln)
        outputs.append(vals[0])
        lineno_of[("o", k)] = ln
    ands = []
    for k in range(a):
        ln = 2 + i + o + k
        vals = _ints(lines[ln - 1].split(), ln)
        if len(vals) != 3:
            raise ParseError("AND line must hold three literals", ln)
        if vals[1] >> 1 > m or vals[2] >> 1 > m:
            raise ParseError("AND input literal exceeds M", ln)
        ands.append(tuple(vals))
        lineno_of[("a", k)] = ln
    names = _parse_symbols(lines, need, need + 1)
    return _build_aig(m, inputs, outputs, ands, extract_xors, names, lineno_of)


def _read_binary_aiger(data: bytes, extract_xors: bool) -> Network:
    nl = data.find(b"\n")
    if nl < 0:
        raise ParseError("truncated header", 1)
    fmt, m, i, o, a = _parse_header(data[:nl].decode("ascii"))
    pos = nl + 1
    outputs = []
    for k in range(o):
        end = data.find(b"\n", pos)
        if end < 0:
            raise ParseError("truncated output section", 2 + k)
        vals = _ints(data[pos:end].split(), 2 + k)
        if len(vals) != 1:
            raise ParseError("output line must hold one literal", 2 + k)
        outputs.append(vals[0])
        pos = end + 1

    def decode():
        nonlocal pos
        x = 0
        shift = 0
        while True:
            if pos >= len(data):
                raise ParseError("truncated AND section")
            ch = data[pos]
            pos += 1
            x |= (ch & 0x7F) << shift
            if not ch & 0x80:
                return x
            shift += 7

    inputs = [2 * (k + 1) for k in range(i)]
    ands = []
    for k in range(a):
        lhs = 2 * (i + k + 1)
        d0 = decode()
        d1 = decode()
        r0 = lhs - d0
        r1 = r0 - d1
        if r0 < 0 or r1 < 0:
            raise ParseError(f"bad delta encoding for AND {k}")
        ands.append((lhs, r0, r1))
    rest = data[pos:].decode("ascii", errors="replace").splitlines()
    names = _parse_symbols(rest, 0, 0)
    return _build_aig(m, inputs, outputs, ands, extract_xors, names)


def write_aiger(net: Network) -> str:
    """ASCII AIGER; every XOR becomes three ANDs."""
    var_of = [0] * net.size
    for k, pi in enumerate(net.pis):
        var_of[pi] = 2 * (k + 1)
    ands = []
    nxt = net.num_pis + 1
    kinds, f0s, f1s = net._kind, net._fanin0, net._fanin1

    def lit(l):
        return var_of[l >> 1] ^ (l & 1)

    def new_and(a, b):
        nonlocal nxt
        lhs = 2 * nxt
        nxt += 1
        if a < b:
            a, b = b, a
        ands.append((lhs, a, b))
        return lhs

    for n in net.topo_order():
        k = kinds[n]
        if k == AND:
            var_of[n] = new_and(lit(f0s[n]), lit(f1s[n]))
        elif k == XOR:
            x, y = lit(f0s[n]), lit(f1s[n])
            p = new_and(x, y ^ 1)
            q = new_and(x ^ 1, y)
            var_of[n] = new_and(p ^ 1, q ^ 1) ^ 1
    outs = [lit(l) for l in net._pos]
    m = nxt - 1
    lines = [f"aag {m} {net.num_pis} 0 {len(outs)} {len(ands)}"]
    lines += [str(2 * (k + 1)) for k in range(net.num_pis)]
    lines += [str(o) for o in outs]
    lines += [f"{lhs} {a} {b}" for lhs, a, b in ands]
    lines += [f"i{k} {name}" for k, name in enumerate(net.pi_names)]
    lines += [f"o{k} {name}" for k, name in enumerate(net.po_names)]
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# native format


def write_xag(net: Network) -> str:
    canon, _ = net.rebuilt()
    lines = [f"pi {name}" for name in canon.pi_names]
    names = {AND: "and", XOR: "xor"}
    for n in range(canon.num_pis + 1, canon.size):
        lines.append(f"{names[canon._kind[n]]} {n} {canon._fanin0[n]} {canon._fanin1[n]}")
    for lit, name in zip(canon._pos, canon.po_names):
        lines.append(f"po {lit} {name}")
    return "\n".join(lines) + "\n"


def read_xag(text: str) -> Network:
    net = Network()
    lit_of = {0: 0}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        op = parts[0]
        if op == "pi":
            if len(parts) > 2:
                raise ParseError("pi takes at most a name", lineno)
            if net.size - 1 != net.num_pis:
                raise ParseError("pi after gates", lineno)
            sig = net.create_pi(parts[1] if len(parts) == 2 else None)
            lit_of[sig.node] = sig.lit
        elif op in ("and", "xor"):
            if len(parts) != 4:
                raise ParseError(f"{op} needs <id> <lit> <lit>", lineno)
            nid, a, b = _ints(parts[1:], lineno)
            if nid in lit_of:
                raise ParseError(f"node {nid} defined twice", lineno)
            for x in (a, b):
                if x >> 1 not in lit_of:
                    raise ParseError(f"literal {x} refers to undefined node {x >> 1}", lineno)
                if x >> 1 >= nid:
                    raise ParseError(f"literal {x} is a forward reference", lineno)
            kind = AND if op == "and" else XOR
            lit_of[nid] = net.gate_lit(kind, lit_of[a >> 1] ^ (a & 1), lit_of[b >> 1] ^ (b & 1))
        elif op == "po":
            if len(parts) not in (2, 3):
                raise ParseError("po takes a literal and an optional name", lineno)
            (x,) = _ints(parts[1:2], lineno)
            if x >> 1 not in lit_of:
                raise ParseError(f"literal {x} refers to undefined node {x >> 1}", lineno)
            net.create_po(lit_of[x >> 1] ^ (x & 1), parts[2] if len(parts) == 3 else None)
        else:
            raise ParseError(f"unknown statement {op!r}", lineno)
    return net


# ----------------------------------------------------------------------


def load(path, extract_xors: bool = False) -> Network:
    """Read a network, choosing the format by content."""
    data = Path(path).read_bytes()
    if data.startswith(b"aig "):
        return _read_binary_aiger(data, extract_xors)
    text = data.decode("ascii")
    if text.lstrip().startswith("aag"):
        return read_aiger(text, extract_xors)
    return read_xag(text)


def save(net: Network, path) -> None:
    """Write ASCII AIGER for ``.aag`` and the native format otherwise."""
    path = Path(path)
    if path.suffix == ".aig":
        raise ValueError("binary AIGER output is not supported; use .aag")
    if path.suffix == ".aag":
        path.write_text(write_aiger(net))
    else:
        path.write_text(write_xag(net))

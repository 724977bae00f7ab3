"""Formal logarithmic/meromorphic forms on polydisc coordinates.

A coordinate system splits variables into boundary ones (cutting out the
divisor) and interior ones.  Forms are finite sums of monomial terms
coeff * prod v^{e_v} * dv_{i_1} ^ ... ^ dv_{i_s} with exact rational-complex
coefficients; boundary exponents may be negative, interior exponents are
non-negative.

Classification is termwise on the canonical expansion:
  * a term is log iff every boundary exponent is >= -1, and an exponent of
    exactly -1 occurs only when that variable's differential divides the
    wedge part;
  * the Q-level of a term adds 1 for each boundary variable whose
    differential appears with an at-worst-log pole (exponent >= -1), and 1
    per interior wedge factor; the Q-level of a form is the minimum over
    terms;
  * the F-level is the minimum wedge degree when the form is log, else -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import QC


@dataclass(frozen=True)
class CoordSystem:
    boundary_vars: tuple
    interior_vars: tuple

    def __post_init__(self):
        object.__setattr__(self, "boundary_vars", tuple(self.boundary_vars))
        object.__setattr__(self, "interior_vars", tuple(self.interior_vars))
        names = self.boundary_vars + self.interior_vars
        if len(set(names)) != len(names):
            raise ValueError("coordinate names must be distinct")
        for nm in names:
            if not nm.isidentifier():
                raise ValueError(f"bad variable name {nm!r}")

    @property
    def names(self) -> tuple:
        return self.boundary_vars + self.interior_vars

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}")

    def is_boundary(self, i: int) -> bool:
        return i < len(self.boundary_vars)


def _sort_wedge(wedge):
    """Sort differential indices, returning (sorted tuple, sign); sign 0 on
    a repeat."""
    w = list(wedge)
    if len(set(w)) != len(w):
        return (), 0
    sign = 1
    for i in range(len(w)):
        for j in range(i + 1, len(w)):
            if w[i] > w[j]:
                w[i], w[j] = w[j], w[i]
                sign = -sign
    return tuple(w), sign


class LogMeroForm:
    """Canonical sum of monomial meromorphic terms over a CoordSystem."""

    def __init__(self, coords: CoordSystem, terms: dict = None):
        self.coords = coords
        clean = {}
        nb = len(coords.boundary_vars)
        for (exps, wedge), c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(coords.names):
                raise ValueError("exponent tuple length mismatch")
            for i, e in enumerate(exps):
                if i >= nb and e < 0:
                    raise ValueError(
                        f"interior variable {coords.names[i]!r} has "
                        f"negative exponent {e}")
            wedge, sign = _sort_wedge(wedge)
            if sign == 0:
                continue
            c = c if isinstance(c, QC) else QC.coerce(c)
            if sign < 0:
                c = -c
            key = (exps, wedge)
            acc = clean.get(key, QC(0)) + c
            if acc == QC(0):
                clean.pop(key, None)
            else:
                clean[key] = acc
        self.terms = clean

    # -- algebra ----------------------------------------------------------

    def _check(self, other):
        if self.coords != other.coords:
            raise ValueError("forms live over different coordinate systems")

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, QC(0)) + c
        return LogMeroForm(self.coords, t)

    def __neg__(self):
        return LogMeroForm(self.coords,
                           {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = c if isinstance(c, QC) else QC.coerce(c)
        return LogMeroForm(self.coords,
                           {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        return (isinstance(other, LogMeroForm)
                and self.coords == other.coords
                and self.terms == other.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def wedge(self, other) -> "LogMeroForm":
        self._check(other)
        out = {}
        for (e1, w1), c1 in self.terms.items():
            for (e2, w2), c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                key = (exps, w1 + w2)
                out[key] = out.get(key, QC(0)) + c1 * c2
        return LogMeroForm(self.coords, out)

    def d(self) -> "LogMeroForm":
        out = {}
        for (exps, wedge), c in self.terms.items():
            for i, e in enumerate(exps):
                if e == 0:
                    continue
                new_e = list(exps)
                new_e[i] = e - 1
                key = (tuple(new_e), (i,) + wedge)
                out[key] = out.get(key, QC(0)) + c * QC(e)
        return LogMeroForm(self.coords, out)

    # -- classification ---------------------------------------------------

    def _term_is_log(self, exps, wedge) -> bool:
        nb = len(self.coords.boundary_vars)
        for i in range(nb):
            if exps[i] < -1:
                return False
            if exps[i] == -1 and i not in wedge:
                return False
        return True

    def is_log(self) -> bool:
        return all(self._term_is_log(e, w) for (e, w) in self.terms)

    def _term_q_level(self, exps, wedge) -> int:
        nb = len(self.coords.boundary_vars)
        level = 0
        for i in wedge:
            if i < nb:
                if exps[i] >= -1:
                    level += 1
            else:
                level += 1
        return level

    def q_level(self):
        """Largest p with the form in Q^p (termwise minimum); the zero form
        is in every Q^p and returns None."""
        if not self.terms:
            return None
        return min(self._term_q_level(e, w) for (e, w) in self.terms)

    def f_level(self) -> int:
        """Largest p with the form in F^p of the log complex, or -1 when
        the form is not log; the zero form returns None."""
        if not self.terms:
            return None
        if not self.is_log():
            return -1
        return min(len(w) for (_, w) in self.terms)

    # -- substitution -----------------------------------------------------

    def restrict_diagonal(self, v1: str, v2: str,
                          new_var: str) -> "LogMeroForm":
        """Substitute v1 = v2 = new_var (and dv1 = dv2 = d new_var)."""
        i1 = self.coords.index(v1)
        i2 = self.coords.index(v2)
        if not (self.coords.is_boundary(i1) and self.coords.is_boundary(i2)):
            raise ValueError("diagonal restriction needs boundary variables")
        survivors = [nm for nm in self.coords.names if nm not in (v1, v2)]
        if new_var in survivors:
            raise ValueError(f"name clash: {new_var!r} already in use")
        new_boundary = (new_var,) + tuple(
            nm for nm in self.coords.boundary_vars if nm not in (v1, v2))
        new_interior = tuple(nm for nm in self.coords.interior_vars)
        nc = CoordSystem(new_boundary, new_interior)
        old_to_new = {}
        for i, nm in enumerate(self.coords.names):
            old_to_new[i] = nc.index(new_var if nm in (v1, v2) else nm)
        out = {}
        for (exps, wedge), c in self.terms.items():
            new_e = [0] * len(nc.names)
            for i, e in enumerate(exps):
                new_e[old_to_new[i]] += e
            new_w = tuple(old_to_new[i] for i in wedge)
            key = (tuple(new_e), new_w)
            out[key] = out.get(key, QC(0)) + c
        return LogMeroForm(nc, out)

    # -- printing ---------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (exps, wedge), c in sorted(self.terms.items()):
            factors = []
            for i, e in enumerate(exps):
                if e != 0:
                    factors.append(f"{self.coords.names[i]}^{e}")
            mono = " ".join(factors)
            dpart = "^".join("d" + self.coords.names[i] for i in wedge)
            coeffs = [QC(c.re), QC(0, c.im)] if c.re and c.im else [c]
            for cc in coeffs:
                pieces = [p for p in (_print_qc(cc), mono, dpart) if p]
                parts.append(" ".join(pieces) if pieces else "1")
        return " + ".join(parts)

    def __repr__(self):
        return f"LogMeroForm({self})"


def _print_qc(c: QC) -> str:
    """Print an exact pure-real or pure-imaginary coefficient in the
    parser's grammar; '' means 1."""
    if c == QC(1):
        return ""
    re, im = c.re, c.im
    if im == 0:
        return _print_frac(re)
    if im == 1:
        return "i"
    return f"{_print_frac(im)}*i"


def _print_frac(f: Fraction) -> str:
    f = Fraction(f)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


# ---------------------------------------------------------------------------
# Parser


class FormSyntaxError(ValueError):
    def __init__(self, text, pos, msg):
        self.pos = pos
        caret = " " * pos + "^"
        super().__init__(f"{msg} at position {pos}\n  {text}\n  {caret}")


class _Tokenizer:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        if self.pos >= len(self.text):
            return ("end", "", self.pos)
        ch = self.text[self.pos]
        if ch.isdigit():
            j = self.pos
            while j < len(self.text) and self.text[j].isdigit():
                j += 1
            return ("num", self.text[self.pos:j], self.pos)
        if ch.isalpha() or ch == "_":
            j = self.pos
            while j < len(self.text) and (self.text[j].isalnum()
                                          or self.text[j] == "_"):
                j += 1
            return ("name", self.text[self.pos:j], self.pos)
        if ch in "+-*/^()":
            return (ch, ch, self.pos)
        raise FormSyntaxError(self.text, self.pos,
                              f"unexpected character {ch!r}")

    def take(self):
        tok = self.peek()
        self.pos = tok[2] + len(tok[1])
        return tok


def parse_form(text: str, coords: CoordSystem) -> LogMeroForm:
    """Parse the monomial-sum grammar: terms joined by +/-, each a product
    of an optional coefficient, variable powers v^k, and a wedge of
    differentials dv^dw^...; '/' divides by the following factor
    (so "dz/w^2" is w^-2 dz)."""
    tz = _Tokenizer(text)
    form = LogMeroForm(coords, {})
    sign = 1
    tok = tz.peek()
    if tok[0] in "+-":
        tz.take()
        sign = -1 if tok[0] == "-" else 1
    while True:
        term = _parse_term(tz, coords)
        form = form + (term if sign > 0 else -term)
        tok = tz.take()
        if tok[0] == "end":
            return form
        if tok[0] not in "+-":
            raise FormSyntaxError(text, tok[2], "expected '+' or '-'")
        sign = -1 if tok[0] == "-" else 1


def _parse_int(tz, allow_sign=True):
    tok = tz.take()
    sgn = 1
    if allow_sign and tok[0] in "+-":
        sgn = -1 if tok[0] == "-" else 1
        tok = tz.take()
    if tok[0] == "(":
        v = _parse_int(tz)
        close = tz.take()
        if close[0] != ")":
            raise FormSyntaxError(tz.text, close[2], "expected ')'")
        return sgn * v
    if tok[0] != "num":
        raise FormSyntaxError(tz.text, tok[2], "expected an integer")
    return sgn * int(tok[1])


def _parse_term(tz, coords):
    coeff = QC(1)
    exps = [0] * len(coords.names)
    wedge = []
    invert = False
    saw_factor = False

    # leading signs belong to the term's coefficient
    while tz.peek()[0] in "+-":
        if tz.take()[0] == "-":
            coeff = -coeff

    def apply_power(idx, k):
        exps[idx] += -k if invert else k

    while True:
        tok = tz.peek()
        if tok[0] == "num":
            tz.take()
            val = Fraction(int(tok[1]))
            nxt = tz.peek()
            if nxt[0] == "/":
                save = tz.pos
                tz.take()
                after = tz.peek()
                if after[0] == "num":
                    tz.take()
                    val = val / int(after[1])
                else:
                    tz.pos = save
            q = QC(val)
            coeff = coeff / q if invert else coeff * q
            invert = False
            saw_factor = True
        elif tok[0] == "name":
            tz.take()
            name = tok[1]
            if name == "i":
                q = QC(0, 1)
                coeff = coeff / q if invert else coeff * q
                invert = False
                saw_factor = True
            elif (name.startswith("d") and len(name) > 1
                  and name[1:] in coords.names):
                if invert:
                    raise FormSyntaxError(tz.text, tok[2],
                                          "cannot divide by a differential")
                wedge.append(coords.index(name[1:]))
                saw_factor = True
                # wedge chain dv^dw^...
                while True:
                    nxt = tz.peek()
                    if nxt[0] != "^":
                        break
                    save = tz.pos
                    tz.take()
                    after = tz.peek()
                    if (after[0] == "name" and after[1].startswith("d")
                            and len(after[1]) > 1
                            and after[1][1:] in coords.names):
                        tz.take()
                        wedge.append(coords.index(after[1][1:]))
                    else:
                        tz.pos = save
                        break
            elif name in coords.names:
                idx = coords.index(name)
                k = 1
                nxt = tz.peek()
                if nxt[0] == "^":
                    tz.take()
                    k = _parse_int(tz)
                apply_power(idx, k)
                invert = False
                saw_factor = True
            else:
                raise FormSyntaxError(tz.text, tok[2],
                                      f"unknown variable {name!r}")
        elif tok[0] == "*":
            tz.take()
        elif tok[0] == "/":
            tz.take()
            invert = True
        else:
            break
    if not saw_factor:
        raise FormSyntaxError(tz.text, tz.peek()[2], "expected a term")
    if invert:
        raise FormSyntaxError(tz.text, tz.peek()[2],
                              "dangling '/' in term")
    if coeff == QC(0):
        return LogMeroForm(coords, {})
    return LogMeroForm(coords, {(tuple(exps), tuple(wedge)): coeff})


def classify(form: LogMeroForm) -> str:
    """One-line classification: membership in Q^p \\ Q^{p+1}, F-level,
    log-ness."""
    if form.is_zero():
        return "form = 0 (in every Q^p and F^p)"
    q = form.q_level()
    f = form.f_level()
    log = "yes" if form.is_log() else "no"
    return f"form ∈ Q^{q} \\ Q^{q + 1}, F-level {f}, log: {log}"

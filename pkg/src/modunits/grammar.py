"""Recursive-descent parser and printer for unit products.

    product  := "1" | factor ("*" factor)*
    factor   := siegel | zeta
    siegel   := "g" "[" rational "," rational "]" power?
    zeta     := "zeta" "[" rational "]" power?
    power    := "^" integer
    rational := integer ("/" digits)?
    integer  := "-"? digits

Whitespace is allowed between tokens.  Siegel entries must already lie in [0, 1).
"""

from __future__ import annotations

from fractions import Fraction

from .arith import RootOfUnity, format_rational
from .units import SiegelSymbol, UnitProduct


class UnitParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.pos = len(text[:pos].encode("utf-8"))  # byte offset
        self.text = text
        self.reason = message
        super().__init__(f"{message} at byte {self.pos}")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def error(self, msg, pos=None):
        raise UnitParseError(msg, self.text, self.i if pos is None else pos)

    def ws(self):
        while self.i < len(self.text) and self.text[self.i] in " \t\r\n":
            self.i += 1

    def peek(self) -> str:
        self.ws()
        return self.text[self.i] if self.i < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            found = repr(self.text[self.i]) if self.i < len(self.text) else "end of input"
            self.error(f"expected {ch!r}, found {found}")
        self.i += 1

    def digits(self) -> str:
        start = self.i
        while self.i < len(self.text) and self.text[self.i].isdigit() and self.text[self.i].isascii():
            self.i += 1
        if start == self.i:
            self.error("expected digits")
        return self.text[start:self.i]

    def integer(self) -> int:
        self.ws()
        sign = 1
        if self.i < len(self.text) and self.text[self.i] == "-":
            sign = -1
            self.i += 1
        return sign * int(self.digits())

    def rational(self) -> Fraction:
        self.ws()
        start = self.i
        num = self.integer()
        if self.peek() == "/":
            self.i += 1
            self.ws()
            den_pos = self.i
            den = int(self.digits())
            if den == 0:
                self.error("zero denominator", den_pos)
            return Fraction(num, den)
        if start == self.i:
            self.error("expected a rational")
        return Fraction(num)

    def power(self) -> int:
        if self.peek() == "^":
            self.i += 1
            return self.integer()
        return 1

    def product(self) -> UnitProduct:
        factors: dict[SiegelSymbol, int] = {}
        scalar = RootOfUnity(0)
        if self.peek() == "1" and not self._more_digits():
            self.i += 1
            if self.peek():
                self.error("unexpected input after constant 1")
            return UnitProduct()
        while True:
            self.ws()
            start = self.i
            if self.text.startswith("zeta", self.i):
                self.i += 4
                self.expect("[")
                r = self.rational()
                self.expect("]")
                scalar = scalar * RootOfUnity(r * self.power())
            elif self.text.startswith("g", self.i):
                self.i += 1
                self.expect("[")
                p1 = self.i
                a1 = self.rational()
                self.expect(",")
                p2 = self.i
                a2 = self.rational()
                self.expect("]")
                for a, pos in ((a1, p1), (a2, p2)):
                    if not 0 <= a < 1:
                        self.error(f"Siegel entry {format_rational(a)} outside [0,1)", self._skip_ws(pos))
                if a1 == 0 and a2 == 0:
                    self.error("Siegel symbol g[0,0] is not allowed", start)
                e = self.power()
                s = SiegelSymbol(a1, a2)
                factors[s] = factors.get(s, 0) + e
            else:
                self.error("expected 'g[' or 'zeta['" if self.i < len(self.text) else "unexpected end of input")
            if not self.peek():
                break
            self.expect("*")
        return UnitProduct(factors, scalar)

    def _more_digits(self) -> bool:
        j = self.i + 1
        return j < len(self.text) and (self.text[j].isdigit() or self.text[j] == "/")

    def _skip_ws(self, pos: int) -> int:
        while pos < len(self.text) and self.text[pos] in " \t\r\n":
            pos += 1
        return pos


def parse_unit(text: str) -> UnitProduct:
    p = _Parser(text)
    if not p.peek():
        p.error("empty expression")
    return p.product()


def format_unit(f: UnitProduct) -> str:
    parts = []
    for s, e in f.factors.items():
        parts.append(str(s) if e == 1 else f"{s}^{e}")
    if not f.scalar.is_one():
        parts.append(f"zeta[{format_rational(f.scalar.exponent)}]")
    return " * ".join(parts) if parts else "1"

"""Integer Laurent polynomials in one variable t."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Laurent:
    coeffs: tuple = field(default=())  # sorted (exponent, coefficient), no zeros

    @classmethod
    def from_dict(cls, d: dict) -> "Laurent":
        return cls(tuple(sorted((int(e), int(c)) for e, c in d.items() if c)))

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> "Laurent":
        return cls.from_dict({exp: coeff})

    @classmethod
    def parse(cls, text: str) -> "Laurent":
        """Read forms like 't^2-1+t^-2' or '3t - 2'."""
        s = text.replace(" ", "").replace("**", "^")
        if not s:
            raise ValueError("empty polynomial")
        terms, cur = [], ""
        for k, ch in enumerate(s):
            if ch in "+-" and k > 0 and s[k - 1] != "^":
                terms.append(cur)
                cur = ch
            else:
                cur += ch
        terms.append(cur)
        acc: dict[int, int] = {}
        for term in terms:
            sign = -1 if term.startswith("-") else 1
            term = term.lstrip("+-")
            if "t" in term:
                coef, _, exp = term.partition("t")
                coef = coef.rstrip("*")
                c = int(coef) if coef else 1
                e = int(exp[1:]) if exp.startswith("^") else (1 if not exp else None)
                if e is None:
                    raise ValueError(f"cannot read term {term!r}")
            else:
                c, e = int(term), 0
            acc[e] = acc.get(e, 0) + sign * c
        return cls.from_dict(acc)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def __add__(self, other: "Laurent") -> "Laurent":
        d = self.as_dict()
        for e, c in other.coeffs:
            d[e] = d.get(e, 0) + c
        return Laurent.from_dict(d)

    def __neg__(self) -> "Laurent":
        return Laurent(tuple((e, -c) for e, c in self.coeffs))

    def __sub__(self, other: "Laurent") -> "Laurent":
        return self + (-other)

    def __mul__(self, other: "Laurent") -> "Laurent":
        d: dict[int, int] = {}
        for e1, c1 in self.coeffs:
            for e2, c2 in other.coeffs:
                d[e1 + e2] = d.get(e1 + e2, 0) + c1 * c2
        return Laurent.from_dict(d)

    def substitute_power(self, k: int) -> "Laurent":
        """f(t^k)."""
        return Laurent.from_dict({e * k: c for e, c in self.coeffs})

    def shift(self, k: int) -> "Laurent":
        return Laurent.from_dict({e + k: c for e, c in self.coeffs})

    def divmod(self, other: "Laurent") -> tuple["Laurent", "Laurent"]:
        if not other.coeffs:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = self.as_dict()
        lead_e, lead_c = other.coeffs[-1]
        low_e = other.coeffs[0][0]
        quot: dict[int, int] = {}
        while rem:
            top = max(rem)
            if top - lead_e < min(rem, default=0) - low_e:
                break
            if rem[top] % lead_c:
                break
            qe, qc = top - lead_e, rem[top] // lead_c
            quot[qe] = qc
            for e, c in other.coeffs:
                rem[e + qe] = rem.get(e + qe, 0) - qc * c
                if rem[e + qe] == 0:
                    del rem[e + qe]
        return Laurent.from_dict(quot), Laurent.from_dict(rem)

    @property
    def min_degree(self) -> int:
        return self.coeffs[0][0] if self.coeffs else 0

    @property
    def max_degree(self) -> int:
        return self.coeffs[-1][0] if self.coeffs else 0

    def symmetrize(self) -> "Laurent":
        """Shift so that the exponent range is centred on 0."""
        span = self.min_degree + self.max_degree
        if span % 2:
            raise ValueError(f"{self} cannot be centred")
        return self.shift(-span // 2)

    def is_symmetric(self) -> bool:
        d = self.as_dict()
        return all(d.get(-e) == c for e, c in d.items())

    def evaluate(self, value: int):
        return sum(c * value**e for e, c in self.coeffs)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e, c in reversed(self.coeffs):
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                body = ("" if mag == 1 else str(mag)) + ("t" if e == 1 else f"t^{e}")
            parts.append(("-" if c < 0 else "+") + body)
        out = "".join(parts)
        return out[1:] if out.startswith("+") else out

import logging
import re
from fractions import Fraction

from cyclic import TensorChain
from forms import FormElement, merge_masks
from weyl import MatrixElement, WeylElement

logger = logging.getLogger(__name__)

TOKEN_PATTERN = re.compile(r"""
    (?P<space>\s+)
  | (?P<hbar>h\^-?\d+)
  | (?P<u>u\^-?\d+)
  | (?P<dy>dy\d+)
  | (?P<y>y\d+(?:\^\d+)?)
  | (?P<keyword>mat|chain|args)\b
  | (?P<number>\d+(?:/\d+)?)
  | (?P<sign>[+-])
  | (?P<punct>[\[\];,])
""", re.VERBOSE)


class LiteralSyntaxError(ValueError):
    """Raised on malformed literals; carries the 1-based line and column."""
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class LiteralDimensionError(ValueError):
    """Raised when a literal does not fit the configured 2n or rank."""


class Token:
    __slots__ = ("kind", "text", "offset")

    def __init__(self, kind, text, offset):
        self.kind = kind
        self.text = text
        self.offset = offset


def tokenize(text):
    tokens, offset = [], 0
    while offset < len(text):
        match = TOKEN_PATTERN.match(text, offset)
        if not match:
            line, column = _position(text, offset)
            raise LiteralSyntaxError(f"unexpected character {text[offset]!r}", line, column)
        if match.lastgroup != "space":
            tokens.append(Token(match.lastgroup, match.group(), offset))
        offset = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


def _position(text, offset):
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


class LiteralParser:
    """
    Recursive-descent parser for element, matrix, chain and args literals.

    element := sign? term (sign term)*
    term    := rational? factor*      factor := h^k | u^k | y<i>[^e] | dy<i>
    matrix  := 'mat' r '[' row (',' row)* ']'      row := '[' element (',' element)* ']'
    chain   := [rational] [h^k] [u^j] 'chain' '[' entry (';' entry)* ']', summed with signs
    args    := 'args' '[' [entry (';' entry)*] ']'
    """
    def __init__(self, n, rank=1):
        self.dim = 2 * n
        self.rank = rank

    def parse(self, text):
        """
        Parse one literal.

        Args:
            text (str): Literal text

        Returns:
            WeylElement, FormElement, MatrixElement, TensorChain or list of MatrixElement
        """
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0
        first = self._peek()
        if any(token.kind == "keyword" and token.text == "chain" for token in self.tokens):
            value = self._chain_sum()
        elif first.kind == "keyword" and first.text == "args":
            value = self._args()
        elif first.kind == "keyword" and first.text == "mat":
            value = self._matrix()
        else:
            value = self._element()
        self._expect("end")
        logger.debug(f"parsed {type(value).__name__} from {text!r}")
        return value

    def _peek(self):
        return self.tokens[self.index]

    def _advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _error(self, message, token=None):
        token = token or self._peek()
        line, column = _position(self.text, token.offset)
        return LiteralSyntaxError(message, line, column)

    def _expect(self, kind, text=None):
        token = self._peek()
        if token.kind != kind or (text is not None and token.text != text):
            wanted = text or kind
            found = token.text or "end of input"
            raise self._error(f"expected {wanted!r}, found {found!r}")
        return self._advance()

    def _at(self, kind, text=None):
        token = self._peek()
        return token.kind == kind and (text is None or token.text == text)

    def _signs(self):
        sign = 1
        while self._at("sign"):
            if self._advance().text == "-":
                sign = -sign
        return sign

    def _element(self):
        terms = {}
        first = True
        while True:
            if not first and not self._at("sign"):
                break
            sign = self._signs()
            key, coef = self._term()
            if key is not None:
                terms[key] = terms.get(key, 0) + sign * coef
            first = False
        if any(mask or u for (_, _, mask, u) in terms):
            return FormElement(self.dim, terms)
        return WeylElement(self.dim, {(exps, h): coef for (exps, h, _, _), coef in terms.items()})

    def _index(self, token, digits):
        index = int(digits)
        if not 1 <= index <= self.dim:
            line, column = _position(self.text, token.offset)
            raise LiteralDimensionError(
                f"line {line}, column {column}: index {index} outside 1..{self.dim}")
        return index - 1

    def _rational(self):
        token = self._expect("number")
        numerator, _, denominator = token.text.partition("/")
        if denominator and int(denominator) == 0:
            raise self._error("zero denominator", token)
        return Fraction(int(numerator), int(denominator or 1))

    def _term(self):
        start = self._peek()
        coef = Fraction(1)
        seen = False
        if self._at("number"):
            coef = self._rational()
            seen = True
        exps, h, u, dys = [0] * self.dim, 0, 0, []
        while self._peek().kind in ("hbar", "u", "y", "dy"):
            token = self._advance()
            seen = True
            if token.kind == "hbar":
                h += int(token.text[2:])
            elif token.kind == "u":
                u += int(token.text[2:])
            elif token.kind == "dy":
                dys.append(self._index(token, token.text[2:]))
            else:
                name, _, power = token.text.partition("^")
                exps[self._index(token, name[1:])] += int(power or 1)
        if not seen:
            raise self._error(f"expected a term, found {start.text or 'end of input'!r}", start)
        sign, mask = 1, ()
        for k in dys:
            merged = merge_masks(mask, (k,))
            if merged is None:
                return None, 0
            step, mask = merged
            sign *= step
        return (tuple(exps), h, mask, u), sign * coef

    def _weyl_entry(self):
        token = self._peek()
        value = self._element()
        if isinstance(value, FormElement):
            raise self._error("matrix entries cannot carry dy or u factors", token)
        return value

    def _matrix(self):
        self._expect("keyword", "mat")
        size_token = self._expect("number")
        size = int(size_token.text)
        if self.rank is not None and size != self.rank:
            raise LiteralDimensionError(f"matrix of rank {size} given, configured rank is {self.rank}")
        rows = []
        self._expect("punct", "[")
        while True:
            self._expect("punct", "[")
            row = [self._weyl_entry()]
            while self._at("punct", ","):
                self._advance()
                row.append(self._weyl_entry())
            self._expect("punct", "]")
            rows.append(row)
            if not self._at("punct", ","):
                break
            self._advance()
        self._expect("punct", "]")
        if len(rows) != size or any(len(row) != size for row in rows):
            raise self._error(f"matrix declared {size} x {size} has a different shape", size_token)
        return MatrixElement.from_rows(rows)

    def _entry(self):
        if self._at("keyword", "mat"):
            return self._matrix()
        return MatrixElement.scalar(self._weyl_entry(), self.rank or 1)

    def _entries(self, allow_empty=False):
        self._expect("punct", "[")
        entries = []
        if not (allow_empty and self._at("punct", "]")):
            entries.append(self._entry())
            while self._at("punct", ";"):
                self._advance()
                entries.append(self._entry())
        self._expect("punct", "]")
        return entries

    def _chain_term(self):
        coef, h, u = Fraction(1), 0, 0
        if self._at("number"):
            coef = self._rational()
        while self._peek().kind in ("hbar", "u"):
            token = self._advance()
            if token.kind == "hbar":
                h += int(token.text[2:])
            else:
                u += int(token.text[2:])
        self._expect("keyword", "chain")
        entries = self._entries()
        return TensorChain.from_entries(entries, coefficient=coef, h=h, u=u)

    def _chain_sum(self):
        total = TensorChain.zero(self.dim, self.rank or 1)
        first = True
        while first or self._at("sign"):
            sign = self._signs()
            term = self._chain_term()
            total = total + (term if sign > 0 else -term)
            first = False
        return total

    def _args(self):
        self._expect("keyword", "args")
        return self._entries(allow_empty=True)


def parse_literal(text, n, rank=1):
    """Parse an element, matrix, chain or args literal for half-dimension n and rank r."""
    return LiteralParser(n, rank).parse(text)


def format_literal(value):
    """Canonical text of a parsed value; parse_literal inverts it."""
    if isinstance(value, list):
        return "args [ " + " ; ".join(str(M) for M in value) + " ]" if value else "args [ ]"
    return str(value)

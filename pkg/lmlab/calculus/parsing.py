"""
Recursive-descent parser for the expression grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' ['-'] integer)?
    atom   := number | ident | func '(' expr ')' | '(' expr ')'

Unary minus binds looser than '^', so ``-x^2`` is -(x^2) as in ordinary notation; a
grammar with ``base := '-' base`` would read it as (-x)^2, which this parser does not.
Parentheses, function calls and unary signs may nest at most ``MAX_NESTING`` levels deep.

Numbers are integers or decimals and are stored as exact fractions; ``p/q`` is an ordinary
quotient that ``simplify`` folds.  Identifiers resolve, in order, to chart coordinates, named
parameters (real constants) and previously defined named expressions.
"""

import re
from fractions import Fraction

from .exceptions import ExpressionSyntaxError, UnknownIdentifierError
from .expressions import FUNCTIONS, Const, Div, Func, Mul, Neg, Param, Pow, ScalarExpr, Add

__all__ = ["parse_scalar", "tokenize", "MAX_NESTING"]

MAX_NESTING = 100

TOKEN_PATTERN = re.compile(
    r"\s*(?:(?P<number>\d+\.\d*|\.\d+|\d+)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def tokenize(source):
    """Returns a list of ``(kind, text, position)`` triples, ending with an 'end' token."""
    tokens = []
    position = 0
    stripped_length = len(source.rstrip())
    while position < stripped_length:
        match = TOKEN_PATTERN.match(source, position)
        if match is None or match.end() == position:
            offset = position + (len(source[position:]) - len(source[position:].lstrip()))
            raise ExpressionSyntaxError(
                f"Unexpected character {source[offset]!r}", offset, source
            )
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        position = match.end()
    tokens.append(("end", "", len(source)))
    return tokens


class Parser(object):
    def __init__(self, source, chart, parameters=None, names=None):
        self.source = source
        self.chart = chart
        self.parameters = parameters or {}
        self.names = names or {}
        self.tokens = tokenize(source)
        self.position = 0
        self.depth = 0

    @property
    def current(self):
        return self.tokens[self.position]

    def advance(self):
        token = self.tokens[self.position]
        self.position += 1
        return token

    def expect(self, text):
        kind, value, position = self.current
        if value != text or kind == "end":
            found = "end of input" if kind == "end" else repr(value)
            raise ExpressionSyntaxError(
                f"Expected {text!r} but found {found}", position, self.source
            )
        return self.advance()

    def descend(self):
        self.depth += 1
        if self.depth > MAX_NESTING:
            self.error(f"Expression nests deeper than {MAX_NESTING} levels")

    def ascend(self):
        self.depth -= 1

    def error(self, detail):
        raise ExpressionSyntaxError(detail, self.current[2], self.source)

    def parse(self):
        if self.current[0] == "end":
            self.error("Empty expression")
        expr = self.expr()
        if self.current[0] != "end":
            self.error(f"Unexpected token {self.current[1]!r}")
        return expr

    def expr(self):
        terms = [self.term()]
        while self.current[1] in ("+", "-") and self.current[0] == "op":
            operator = self.advance()[1]
            term = self.term()
            terms.append(term if operator == "+" else Neg(term))
        return terms[0] if len(terms) == 1 else Add(tuple(terms))

    def term(self):
        # a/b*c/d is parsed as (a*c)/(b*d) so long runs stay flat
        numerator, denominator = [self.unary()], []
        while self.current[1] in ("*", "/") and self.current[0] == "op":
            operator = self.advance()[1]
            (numerator if operator == "*" else denominator).append(self.unary())
        result = numerator[0] if len(numerator) == 1 else Mul(tuple(numerator))
        if not denominator:
            return result
        return Div(result, denominator[0] if len(denominator) == 1 else Mul(tuple(denominator)))

    def unary(self):
        if self.current[0] == "op" and self.current[1] == "-":
            self.advance()
            self.descend()
            operand = self.unary()
            self.ascend()
            return Neg(operand)
        if self.current[0] == "op" and self.current[1] == "+":
            self.advance()
            self.descend()
            operand = self.unary()
            self.ascend()
            return operand
        return self.power()

    def power(self):
        base = self.atom()
        if self.current[0] == "op" and self.current[1] == "^":
            self.advance()
            sign = 1
            if self.current[0] == "op" and self.current[1] in ("-", "+"):
                sign = -1 if self.advance()[1] == "-" else 1
            kind, text, position = self.current
            if kind != "number" or not text.isdigit():
                self.error("Exponent must be an integer constant")
            self.advance()
            base = Pow(base, sign * int(text))
            if self.current[0] == "op" and self.current[1] == "^":
                self.error("Chained exponents need parentheses")
        return base

    def atom(self):
        kind, text, position = self.current
        if kind == "number":
            self.advance()
            return Const(Fraction(text))
        if kind == "ident":
            self.advance()
            if text in FUNCTIONS:
                self.expect("(")
                self.descend()
                operand = self.expr()
                self.ascend()
                self.expect(")")
                return Func(text, operand)
            return self.identifier(text, position)
        if kind == "op" and text == "(":
            self.advance()
            self.descend()
            inner = self.expr()
            self.ascend()
            self.expect(")")
            return inner
        if kind == "end":
            self.error("Unexpected end of input")
        self.error(f"Unexpected token {text!r}")

    def identifier(self, name, position):
        if name in self.chart.coord_names:
            return self.chart.coordinate(name)
        if name in self.parameters:
            return Param(name, self.parameters[name])
        if name in self.names:
            return self.names[name]
        raise UnknownIdentifierError(name, position)


def parse_scalar(source, chart, parameters=None, names=None) -> ScalarExpr:
    """
    Parses ``source`` against ``chart``.  ``parameters`` maps names to real constants and
    ``names`` maps names to already-parsed expressions that are substituted in place.
    """
    if not isinstance(source, str):
        source = str(source)
    return Parser(source, chart, parameters=parameters, names=names).parse()

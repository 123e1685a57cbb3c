"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

-------------------------------------------------------------------

Closed-form expressions in one complex variable, implemented as an
immutable tree of Expr(op, args) nodes, together with the structural
operations

    evaluate: (expr, z) -> complex or ndarray
    log_abs: (expr, z) -> real or ndarray     log|expr(z)| without overflow
    shift: (expr, c) -> expr                  evaluates like expr(z + c)
    differentiate: expr -> expr               exact symbolic derivative
    substitute_scale: (expr, eps) -> expr     evaluates like expr(t / eps)
    parse: text -> expr
    to_text: expr -> text                     parse(to_text(e)) == e pointwise

The node kinds are

    const   (value,)                  complex constant
    var     (name,)                   the variable, printed as z or t
    add, sub, mul, div (left, right)
    pow     (base, n)                 integer exponent, possibly negative
    exp, sin, cos (child,)
    affine  (child, scale, offset)    child evaluated at scale * z + offset

All constructors fold constant subtrees, so a printed tree never contains
an operation between two literals. Division by an exact zero evaluates to
INFINITY (or DOMAIN_ERROR for 0/0) instead of raising.
"""

from collections import namedtuple
from numbers import Number

import math
import re

import numpy as np

from diffnev.errors import ExprSyntaxError


CONST, VAR = 'const', 'var'
ADD, SUB, MUL, DIV = 'add', 'sub', 'mul', 'div'
POW, EXP, SIN, COS, AFFINE = 'pow', 'exp', 'sin', 'cos', 'affine'

INFINITY = complex(math.inf, 0.0)
DOMAIN_ERROR = complex(math.nan, math.nan)

_BINARY = {ADD: '+', SUB: '-', MUL: '*', DIV: '/'}
_UNARY = {EXP: np.exp, SIN: np.sin, COS: np.cos}


class Expr(namedtuple('Expr', ['op', 'args'])):
    '''
    A node of an expression tree. Arithmetic operators build new trees
    through the folding constructors below, so that

        f = (1 + b*exp(1j*pi*z) - exp(2j*pi*z)) / (exp(2j*pi*z) - 1)

    reads like the formula it represents.
    '''
    __slots__ = ()

    # numpy scalars on the left must defer to the reflected operators
    __array_ufunc__ = None

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        return power(self, n)

    def __call__(self, z):
        return evaluate(self, z)

    def __str__(self):
        return to_text(self)


def as_expr(x):
    if isinstance(x, Expr):
        return x
    if isinstance(x, (Number, np.number)):
        return const(x)
    raise TypeError('Cannot convert {!r} to an expression.'.format(x))


def const(value):
    return Expr(CONST, (complex(value),))


def var(name='z'):
    return Expr(VAR, (name,))


ZERO = const(0)
ONE = const(1)


def is_const(expr, value=None):
    if expr.op != CONST:
        return False
    return value is None or expr.args[0] == value


def _fold(op, *args):
    '''Evaluates a constant-only node with the same arithmetic as evaluate.'''
    return const(evaluate(Expr(op, args), 0))


def add(a, b):
    a, b = as_expr(a), as_expr(b)
    if is_const(a) and is_const(b):
        return _fold(ADD, a, b)
    if is_const(a, 0):
        return b
    if is_const(b, 0):
        return a
    return Expr(ADD, (a, b))


def sub(a, b):
    a, b = as_expr(a), as_expr(b)
    if is_const(a) and is_const(b):
        return _fold(SUB, a, b)
    if is_const(b, 0):
        return a
    return Expr(SUB, (a, b))


def mul(a, b):
    a, b = as_expr(a), as_expr(b)
    if is_const(a) and is_const(b):
        return _fold(MUL, a, b)
    if is_const(a, 0) or is_const(b, 0):
        return ZERO
    if is_const(a, 1):
        return b
    if is_const(b, 1):
        return a
    return Expr(MUL, (a, b))


def div(a, b):
    a, b = as_expr(a), as_expr(b)
    if is_const(a) and is_const(b):
        return _fold(DIV, a, b)
    if is_const(b, 1):
        return a
    return Expr(DIV, (a, b))


def neg(a):
    return mul(-1, a)


def power(base, n):
    base = as_expr(base)
    if int(n) != n:
        raise ValueError('Exponents must be integers, got {}.'.format(n))
    n = int(n)
    if n == 0:
        return ONE
    if n == 1:
        return base
    if is_const(base):
        return _fold(POW, base, n)
    return Expr(POW, (base, n))


def _function(op, child):
    child = as_expr(child)
    if is_const(child):
        return _fold(op, child)
    return Expr(op, (child,))


def exp(child):
    return _function(EXP, child)


def sin(child):
    return _function(SIN, child)


def cos(child):
    return _function(COS, child)


def affine(child, scale, offset):
    '''
    Substitutes scale * z + offset for the variable of child. Nested affine
    substitutions compose into a single map.
    '''
    child = as_expr(child)
    scale, offset = complex(scale), complex(offset)
    if is_const(child) or (scale == 1 and offset == 0):
        return child
    if child.op == AFFINE:
        inner, inner_scale, inner_offset = child.args
        return affine(inner,
                      inner_scale * scale,
                      inner_scale * offset + inner_offset)
    return Expr(AFFINE, (child, scale, offset))


##############
# Evaluation #
##############

def evaluate(expr, z):
    '''
    Evaluates expr at z, a complex scalar or array. Scalars give a complex,
    arrays give an ndarray of the same shape.
    '''
    z = np.asarray(z, dtype=complex)
    with np.errstate(all='ignore'):
        value = np.broadcast_to(_evaluate(expr, z), z.shape)
    return complex(value) if value.ndim == 0 else np.array(value)


def _evaluate(expr, z):
    op, args = expr
    if op == CONST:
        return np.complex128(args[0])
    if op == VAR:
        return z
    if op == AFFINE:
        child, scale, offset = args
        return _evaluate(child, scale * z + offset)
    if op in _UNARY:
        return _UNARY[op](_evaluate(args[0], z))
    if op == POW:
        return _integer_power(_evaluate(args[0], z), args[1])
    left, right = _evaluate(args[0], z), _evaluate(args[1], z)
    if op == ADD:
        return left + right
    if op == SUB:
        return left - right
    if op == MUL:
        return left * right
    if op == DIV:
        return _divide(left, right)
    raise ValueError('Unknown node kind {}.'.format(op))


def _divide(num, den):
    num, den = np.broadcast_arrays(np.asarray(num, dtype=complex),
                                   np.asarray(den, dtype=complex))
    quotient = num / den
    at_zero = den == 0
    if np.any(at_zero):
        quotient = np.where(at_zero,
                            np.where(num == 0, DOMAIN_ERROR, INFINITY),
                            quotient)
    return quotient


def _integer_power(base, n):
    '''Binary exponentiation, so that e.g. (1+i)^2 is exactly 2i.'''
    base = np.asarray(base, dtype=complex)
    result, square, k = np.ones_like(base), base, abs(n)
    while k:
        if k & 1:
            result = result * square
        k >>= 1
        if k:
            square = square * square
    return _divide(np.ones_like(result), result) if n < 0 else result


def log_abs(expr, z):
    '''
    log|expr(z)|, evaluated in log-polar form so that values far outside the
    floating point range, such as exp(10 pi i z) at Im z = 50, still give
    their logarithm. Poles give +inf, zeros -inf and indeterminate points nan.
    '''
    z = np.asarray(z, dtype=complex)
    with np.errstate(all='ignore'):
        L, _ = _log_polar(expr, z)
        L = np.broadcast_to(L, z.shape)
    return float(L) if L.ndim == 0 else np.array(L, dtype=float)


def _polar(value):
    value = np.asarray(value, dtype=complex)
    return np.log(np.abs(value)), np.exp(1j * np.angle(value))


def _from_polar(L, s):
    return np.exp(L) * s


def _log_add(L1, s1, L2, s2):
    '''Log-polar form of s1 e^L1 + s2 e^L2, scaled by the larger term.'''
    M = np.maximum(L1, L2)
    shift = np.where(np.isfinite(M), M, 0.0)
    L, s = _polar(s1 * np.exp(L1 - shift) + s2 * np.exp(L2 - shift))
    infinite = np.isposinf(M)
    return (np.where(infinite, np.inf, L + shift),
            np.where(infinite, np.where(L1 >= L2, s1, s2), s))


def _log_exp(w):
    return w.real, np.exp(1j * w.imag)


def _log_polar(expr, z):
    op, args = expr
    if op == CONST:
        return _polar(args[0])
    if op == VAR:
        return _polar(z)
    if op == AFFINE:
        child, scale, offset = args
        return _log_polar(child, scale * z + offset)
    if op == POW:
        L, s = _log_polar(args[0], z)
        return args[1] * L, s**args[1]
    if op in _UNARY:
        w = np.asarray(_from_polar(*_log_polar(args[0], z)), dtype=complex)
        if op == EXP:
            return _log_exp(w)
        # e^{iw} and e^{-iw} separately where the direct value overflows
        direct = _UNARY[op](w)
        La, sa = _log_exp(1j * w)
        Lb, sb = _log_exp(-1j * w)
        if op == SIN:
            L, s = _log_add(La, sa, Lb, -sb)
            L, s = L - math.log(2), -1j * s
        else:
            L, s = _log_add(La, sa, Lb, sb)
            L = L - math.log(2)
        Ld, sd = _polar(direct)
        finite = np.isfinite(direct)
        return np.where(finite, Ld, L), np.where(finite, sd, s)
    (L1, s1), (L2, s2) = _log_polar(args[0], z), _log_polar(args[1], z)
    if op == ADD:
        return _log_add(L1, s1, L2, s2)
    if op == SUB:
        return _log_add(L1, s1, L2, -s2)
    if op == MUL:
        return L1 + L2, s1 * s2
    if op == DIV:
        return L1 - L2, s1 / s2
    raise ValueError('Unknown node kind {}.'.format(op))


def is_infinite(value):
    return np.isinf(value) & ~np.isnan(value)


def is_domain_error(value):
    return np.isnan(value)


##############################
# Structural transformations #
##############################

def shift(expr, c):
    '''Returns a tree whose value at z is the value of expr at z + c.'''
    return affine(expr, 1, c)


def substitute_scale(expr, eps):
    '''
    Rewrites expr(z) as a tree in t = eps * z, i.e. the returned tree
    evaluates at t to expr(t / eps).
    '''
    eps = complex(eps)
    if eps == 0:
        raise ValueError('The scaling parameter eps must be non-zero.')
    return affine(rename(expr, 't'), 1 / eps, 0)


def rename(expr, name):
    '''Renames the variable, which only affects printing.'''
    return substitute(expr, var(name))


def substitute(expr, inner):
    '''Composition expr(inner(z)).'''
    inner = as_expr(inner)
    op, args = expr
    if op == CONST:
        return expr
    if op == VAR:
        return inner
    if op == AFFINE:
        child, scale, offset = args
        return substitute(child, add(mul(scale, inner), offset))
    if op == POW:
        return power(substitute(args[0], inner), args[1])
    if op in _UNARY:
        return _function(op, substitute(args[0], inner))
    left, right = substitute(args[0], inner), substitute(args[1], inner)
    return {ADD: add, SUB: sub, MUL: mul, DIV: div}[op](left, right)


def differentiate(expr):
    '''Exact derivative with respect to the variable.'''
    op, args = expr
    if op == CONST:
        return ZERO
    if op == VAR:
        return ONE
    if op == AFFINE:
        child, scale, offset = args
        return mul(scale, affine(differentiate(child), scale, offset))
    if op == POW:
        base, n = args
        return mul(mul(n, power(base, n - 1)), differentiate(base))
    if op == EXP:
        return mul(expr, differentiate(args[0]))
    if op == SIN:
        return mul(cos(args[0]), differentiate(args[0]))
    if op == COS:
        return mul(neg(sin(args[0])), differentiate(args[0]))
    a, b = args
    da, db = differentiate(a), differentiate(b)
    if op == ADD:
        return add(da, db)
    if op == SUB:
        return sub(da, db)
    if op == MUL:
        return add(mul(da, b), mul(a, db))
    return sub(div(da, b), div(mul(a, db), power(b, 2)))


###############
# Polynomials #
###############

def polynomial_degree(expr):
    '''Structural degree bound, or None if expr is not a polynomial.'''
    op, args = expr
    if op == CONST:
        return 0
    if op == VAR:
        return 1
    if op == AFFINE:
        return polynomial_degree(args[0])
    if op == POW:
        degree = polynomial_degree(args[0])
        return None if degree is None or args[1] < 0 else degree * args[1]
    if op in (ADD, SUB, MUL):
        degrees = [polynomial_degree(arg) for arg in args]
        if None in degrees:
            return None
        return max(degrees) if op != MUL else sum(degrees)
    if op == DIV and is_const(args[1]):
        return polynomial_degree(args[0])
    return None


def polynomial_coefficients(expr):
    '''
    Ascending coefficients of a polynomial tree, recovered by a discrete
    Fourier transform of its values on the unit circle.
    '''
    degree = polynomial_degree(expr)
    if degree is None:
        raise ValueError('{} is not a polynomial.'.format(to_text(expr)))
    size = max(8, 1 << int(np.ceil(np.log2(degree + 1))))
    nodes = np.exp(2j * np.pi * np.arange(size) / size)
    coeffs = np.fft.fft(evaluate(expr, nodes))[:degree + 1] / size
    top = np.max(np.abs(coeffs))
    coeffs[np.abs(coeffs) <= 1e-12 * top] = 0
    nonzero = np.flatnonzero(coeffs)
    return coeffs[:nonzero[-1] + 1] if len(nonzero) else coeffs[:1]


def polynomial_roots(expr, tol=1e-6):
    '''Roots of a polynomial tree as (location, multiplicity), clustered.'''
    coeffs = polynomial_coefficients(expr)
    roots = sorted(np.roots(coeffs[::-1]), key=lambda r: (r.real, r.imag))
    clusters = []
    for root in roots:
        for cluster in clusters:
            if abs(np.mean(cluster) - root) <= tol:
                cluster.append(root)
                break
        else:
            clusters.append([root])
    return [(complex(np.mean(c)), len(c)) for c in clusters]


def vanishing_order(expr, point, tol=1e-9, max_order=4, radius=0.1):
    '''
    Order of the zero of expr at point, judged from Cauchy-scaled Taylor
    coefficients e^(k)(p) radius^k / k! against the size of expr nearby.
    '''
    circle = point + radius * np.exp(2j * np.pi * np.arange(64) / 64)
    scale = 1 + np.max(np.abs(evaluate(expr, circle)))
    derivative = expr
    for k in range(max_order + 1):
        taylor = abs(evaluate(derivative, point)) * radius**k / math.factorial(k)
        if taylor > tol * scale:
            return k
        derivative = differentiate(derivative)
    return max_order + 1


############
# Printing #
############

def _format_const(value):
    value = complex(value)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError('Cannot print the non-finite constant {}.'.format(value))
    if value.imag == 0:
        text = repr(value.real)
        return '({})'.format(text) if text.startswith('-') else text
    return '({!r} + {!r} * i)'.format(value.real, value.imag)


def to_text(expr, variable=None):
    '''Canonical, fully parenthesized text of expr in the parse grammar.'''
    op, args = expr
    if op == CONST:
        return _format_const(args[0])
    if op == VAR:
        return variable or args[0]
    if op == AFFINE:
        child, scale, offset = args
        inner = '(({} * {}) + {})'.format(
            _format_const(scale), variable or _variable_name(child),
            _format_const(offset))
        return to_text(child, inner)
    if op == POW:
        return '({}^{})'.format(to_text(args[0], variable), args[1])
    if op in _UNARY:
        return '{}({})'.format(op, to_text(args[0], variable))
    return '({} {} {})'.format(to_text(args[0], variable),
                               _BINARY[op],
                               to_text(args[1], variable))


def _variable_name(expr):
    op, args = expr
    if op == VAR:
        return args[0]
    for arg in args:
        if isinstance(arg, Expr) and arg.op != CONST:
            return _variable_name(arg)
    return 'z'


###########
# Parsing #
###########

_TOKEN = re.compile(r'''\s*(?:
    (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
)''', re.VERBOSE)

_FUNCTIONS = {'exp': exp, 'sin': sin, 'cos': cos}
_LITERALS = {'i': 1j, 'pi': math.pi}


def _tokenize(text):
    tokens, position = [], 0
    while position < len(text):
        if text[position:].strip() == '':
            break
        match = _TOKEN.match(text, position)
        if not match:
            rest = text[position:].lstrip()
            raise ExprSyntaxError('Unexpected character {!r}'.format(rest[0]),
                                  len(text) - len(rest))
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        position = match.end()
    tokens.append(('end', '', len(text)))
    return tokens


class _Parser:
    def __init__(self, text, params, variables):
        self.tokens = _tokenize(text)
        self.index = 0
        self.params = params
        self.variables = variables

    def peek(self):
        return self.tokens[self.index]

    def take(self, value=None):
        kind, text, position = self.tokens[self.index]
        if value is not None and text != value:
            raise ExprSyntaxError(
                'Expected {!r} but found {!r}'.format(value, text or 'end'),
                position)
        self.index += 1
        return kind, text, position

    def expression(self):
        tree = self.term()
        while self.peek()[1] in ('+', '-'):
            _, op, _ = self.take()
            tree = add(tree, self.term()) if op == '+' else sub(tree, self.term())
        return tree

    def term(self):
        tree = self.unary()
        while self.peek()[1] in ('*', '/'):
            _, op, _ = self.take()
            tree = mul(tree, self.unary()) if op == '*' else div(tree, self.unary())
        return tree

    def unary(self):
        if self.peek()[1] == '-':
            self.take()
            return neg(self.unary())
        if self.peek()[1] == '+':
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] != '^':
            return base
        self.take()
        sign = 1
        if self.peek()[1] in ('+', '-'):
            sign = -1 if self.take()[1] == '-' else 1
        kind, text, position = self.take()
        if kind != 'number' or not text.isdigit():
            raise ExprSyntaxError('Integer exponent expected', position)
        return power(base, sign * int(text))

    def atom(self):
        kind, text, position = self.take()
        if kind == 'number':
            return const(float(text))
        if text == '(':
            tree = self.expression()
            self.take(')')
            return tree
        if kind == 'name':
            if text in _FUNCTIONS:
                self.take('(')
                tree = self.expression()
                self.take(')')
                return _FUNCTIONS[text](tree)
            if text in self.variables:
                return var(text)
            if text in self.params:
                return as_expr(self.params[text])
            if text in _LITERALS:
                return const(_LITERALS[text])
            raise ExprSyntaxError('Unknown name {!r}'.format(text), position)
        raise ExprSyntaxError('Unexpected {!r}'.format(text or 'end'), position)


def parse(text, params=None, variables=('z', 't')):
    '''
    Parses text in the expression grammar: the variables z and t, named
    parameters bound through params (numbers or trees), decimal literals,
    i and pi, the operators + - * / and ^ (integer exponent), the functions
    exp, sin and cos, and parentheses.
    '''
    parser = _Parser(text, params or {}, variables)
    tree = parser.expression()
    kind, rest, position = parser.peek()
    if kind != 'end':
        raise ExprSyntaxError('Unexpected {!r}'.format(rest), position)
    return tree


def bind_params(params, variables=('z', 't')):
    '''
    Parameter bindings from a mapping of names to numbers, [re, im] pairs
    or text. Text is parsed with the bindings made so far.
    '''
    bound = {}
    for name, value in (params or {}).items():
        if isinstance(value, str):
            bound[name] = parse(value, bound, variables)
        elif isinstance(value, (list, tuple)):
            bound[name] = complex(*value)
        else:
            bound[name] = value
    return bound

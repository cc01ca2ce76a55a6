import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from math import factorial, perm

from configspace import PropagatorPattern, pattern_integral
from cyclic import TensorChain, matrix_basis, shuffle_positions
from forms import FormElement, lower, merge_masks
from liealg import certify_all
from weyl import accumulate, symplectic_pairs

logger = logging.getLogger(__name__)


class EmptyChainError(ValueError):
    """Raised when a chain term has no slot 0."""


@dataclass(frozen=True)
class PositionedTensor:
    """
    One summand of e^{hbar dP} applied to O_0 (x) dO_1 (x) ... (x) dO_m.

    Slots are (a, b, exps, mask) at points 0..m; edges are the propagators
    picked up by the contractions, to be integrated over the simplex.
    """
    slots: tuple
    edges: tuple
    coefficient: Fraction
    hbar: int

    @property
    def m(self):
        return len(self.slots) - 1

    def weight(self):
        return pattern_integral(PropagatorPattern(self.m, self.edges))


def _differentiated_slots(slots):
    """Options for each slot: slot 0 as is, later slots with d applied."""
    options = []
    for position, (a, b, exps) in enumerate(slots):
        if position == 0:
            options.append(((a, b, exps, (), 1),))
            continue
        options.append(tuple((a, b, lower(exps, k), (k,), e) for k, e in enumerate(exps) if e))
    return options


def _closes_under_trace(slots):
    for position, slot in enumerate(slots):
        following = slots[(position + 1) % len(slots)]
        if slot[1] != following[0]:
            return False
    return True


@lru_cache(maxsize=None)
def _contraction_terms(exps_list, n):
    """
    Expand e^{hbar dP} on the y-exponents of every slot.

    For slots alpha < beta the operator is hbar W omega^{ij} L_i(alpha) L_j(beta),
    with weight W the propagator from beta to alpha.

    Returns:
        tuple: (exponents per slot, hbar order, coefficient, edges)
    """
    width = len(exps_list)
    channels = [
        (alpha, beta, i, j, w)
        for alpha in range(width)
        for beta in range(alpha + 1, width)
        for i, j, w in symplectic_pairs(n)
    ]
    results = []

    def expand(index, current, order, coef, edges):
        if index == len(channels):
            results.append((current, order, coef, edges))
            return
        alpha, beta, i, j, w = channels[index]
        top = min(current[alpha][i], current[beta][j])
        for k in range(top + 1):
            updated = list(current)
            factor = Fraction(w) ** k / factorial(k) * perm(current[alpha][i], k)
            updated[alpha] = current[alpha][:i] + (current[alpha][i] - k,) + current[alpha][i + 1:]
            factor *= perm(updated[beta][j], k)
            updated[beta] = updated[beta][:j] + (updated[beta][j] - k,) + updated[beta][j + 1:]
            expand(index + 1, tuple(updated), order + k, coef * factor, edges + ((beta, alpha),) * k)

    expand(0, tuple(exps_list), 0, Fraction(1), ())
    return tuple(results)


def positioned_tensors(slots, n):
    """
    Yield the positioned summands of one basis chain term.

    Args:
        slots (tuple): (a, b, exps) per slot
        n (int): Half-dimension

    Yields:
        PositionedTensor: With edges still to be integrated
    """
    if not _closes_under_trace(slots):
        return
    for choice in product(*_differentiated_slots(slots)):
        coef = Fraction(1)
        for *_, c in choice:
            coef *= c
        exps_list = tuple(exps for _, _, exps, _, _ in choice)
        for new_exps, order, factor, edges in _contraction_terms(exps_list, n):
            new_slots = tuple((a, b, exps, mask) for (a, b, _, mask, _), exps in zip(choice, new_exps))
            yield PositionedTensor(new_slots, edges, coef * factor, order)


def _multiply_slots(slots):
    mask, sign = (), 1
    for _, _, _, slot_mask in slots:
        merged = merge_masks(mask, slot_mask)
        if merged is None:
            return None
        step, mask = merged
        sign *= step
    exps = tuple(map(sum, zip(*(s[2] for s in slots))))
    return sign, exps, mask


def free_expectation(c):
    """
    Free expectation value <O_0 (x) ... (x) O_m>.

    Applies d to slots 1..m, expands the contraction exponential, integrates
    each propagator pattern over the simplex, multiplies the slots in order
    and takes the matrix trace. u exponents pass through.

    Args:
        c (TensorChain): Chain to evaluate

    Returns:
        FormElement: Element of degree -m
    """
    n = c.dim // 2
    terms = {}
    expanded = 0
    for (h, u, slots), coef in c.terms.items():
        if not slots:
            raise EmptyChainError("chain term without slot 0")
        for tensor in positioned_tensors(slots, n):
            expanded += 1
            product_ = _multiply_slots(tensor.slots)
            if product_ is None:
                continue
            weight = tensor.weight()
            if not weight:
                continue
            sign, exps, mask = product_
            accumulate(terms, (exps, h + tensor.hbar, mask, u), coef * tensor.coefficient * weight * sign)
    logger.debug(f"free expectation expanded {expanded} positioned tensors")
    return FormElement(c.dim, terms)


def permutation_sign(order):
    inversions = sum(1 for i in range(len(order)) for j in range(i + 1, len(order)) if order[i] > order[j])
    return (-1) ** inversions


def insert_arguments(args, c):
    """
    Shuffle the arguments, each divided by hbar, into slots 1.. of every chain term.

    Every arrangement carries sign(epsilon) times (-1) to the number of chain
    entries standing before each insertion. There is no 1/k! factor.

    Args:
        args (list): Certified MatrixElements
        c (TensorChain): Chain

    Returns:
        TensorChain: Sum over interleavings and arg-to-slot bijections
    """
    k = len(args)
    bases = [[(slot, h - 1, coef) for slot, h, coef in matrix_basis(a)] for a in args]
    terms = {}
    for (h, u, slots), coef in c.terms.items():
        if not slots:
            raise EmptyChainError("chain term without slot 0")
        head, tail = slots[0], slots[1:]
        m = len(tail)
        for positions in shuffle_positions(m, k):
            koszul = (-1) ** sum(position - t for t, position in enumerate(positions))
            for order in permutations(range(k)):
                sign = koszul * permutation_sign(order)
                for picked in product(*(bases[index] for index in order)):
                    inserted = dict(zip(positions, picked))
                    merged, rest = [head], iter(tail)
                    for place in range(m + k):
                        merged.append(inserted[place][0] if place in inserted else next(rest))
                    extra_h = sum(hh for _, hh, _ in picked)
                    value = coef * sign
                    for _, _, cc in picked:
                        value *= cc
                    accumulate(terms, (h + extra_h, u, tuple(merged)), value)
    return TensorChain(c.dim, c.rank, terms)


def interacting_expectation(args, c):
    """
    Interacting expectation: the free expectation of all insertions of args / hbar.

    Args:
        args (list): Elements of g (MatrixElement or WeylElement)
        c (TensorChain): Chain

    Returns:
        FormElement: Antisymmetric in args
    """
    matrices = certify_all(args, c.rank)
    if not matrices:
        return free_expectation(c)
    return free_expectation(insert_arguments(matrices, c))

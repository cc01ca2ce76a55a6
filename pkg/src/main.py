#!/usr/bin/env python3
import argparse
import logging
import os
import sys
from dataclasses import dataclass

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.config import (
    DEFAULT_CASES,
    DEFAULT_MAX_K,
    DEFAULT_MAX_WEIGHT,
    DEFAULT_N,
    DEFAULT_RANK,
    DEFAULT_SEED,
    LOG_FILE,
    LOG_LEVEL,
    MAX_CHAIN_LENGTH,
    SUITE_NAMES,
)
from configspace import bernoulli_wheel, wheel_coefficient
from cyclic import TensorChain
from expectation import interacting_expectation
from literals import format_literal, parse_literal
from suites import ElementSampler, run_suite
from tracemap import index_report, universal_trace
from weyl import MatrixElement, WeylElement

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2


class UsageError(ValueError):
    """Raised for command lines argparse accepts but the run cannot use."""


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit status 1."""
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    """Parsed command line plus the environment defaults it overrides."""
    command: str
    n: int = DEFAULT_N
    rank: int = DEFAULT_RANK
    seed: int = DEFAULT_SEED
    max_weight: int = DEFAULT_MAX_WEIGHT
    cases: int = DEFAULT_CASES
    max_chain_length: int = MAX_CHAIN_LENGTH
    suite: str = None
    max_k: int = DEFAULT_MAX_K
    reference: bool = False
    degree: int = 2
    chain: str = None
    args: str = None
    gamma: bool = False

    @property
    def dim(self):
        return 2 * self.n

    def validate(self):
        """Check the ranges every command relies on."""
        if self.n < 1:
            raise UsageError(f"--n must be at least 1, got {self.n}")
        if self.rank < 1:
            raise UsageError(f"--r must be at least 1, got {self.rank}")
        if self.max_weight < 1:
            raise UsageError(f"--max-weight must be at least 1, got {self.max_weight}")
        if self.cases < 1:
            raise UsageError(f"--cases must be at least 1, got {self.cases}")
        if self.max_chain_length < 0:
            raise UsageError(f"--max-chain-length must be nonnegative, got {self.max_chain_length}")
        if self.command == "wheel" and self.max_k < 2:
            raise UsageError(f"--max-k must be at least 2, got {self.max_k}")
        if self.command == "index" and self.degree < 0:
            raise UsageError(f"--degree must be nonnegative, got {self.degree}")


def build_parser():
    parser = ArgumentParser(prog="weyltrace", description="Universal trace map on Weyl algebras")
    common = ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=DEFAULT_N, help="half-dimension of W_2n")
    common.add_argument("--r", dest="rank", type=int, default=DEFAULT_RANK, help="matrix rank")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    verify = subparsers.add_parser("verify", parents=[common], help="run an identity suite")
    verify.add_argument("--suite", required=True, choices=SUITE_NAMES)
    verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    verify.add_argument("--max-weight", type=int, default=DEFAULT_MAX_WEIGHT)
    verify.add_argument("--cases", type=int, default=DEFAULT_CASES)
    verify.add_argument("--max-chain-length", type=int, default=MAX_CHAIN_LENGTH,
                        help="longest sampled chain; the interacting and trace suites stop at 2")

    wheel = subparsers.add_parser("wheel", help="print the wheel coefficient table")
    wheel.add_argument("--max-k", type=int, default=DEFAULT_MAX_K)
    wheel.add_argument("--reference", action="store_true", help="append the -B_k/k! column")

    expect = subparsers.add_parser("expect", parents=[common], help="interacting expectation of a chain")
    expect.add_argument("chain", help="chain literal")
    expect.add_argument("--args", help="args literal")

    trace = subparsers.add_parser("trace", parents=[common], help="universal trace of a chain")
    trace.add_argument("chain", help="chain literal")
    trace.add_argument("--args", help="args literal")
    trace.add_argument("--gamma", action="store_true", help="insert gamma_hat(a) instead of a")

    index = subparsers.add_parser("index", parents=[common], help="compare Tr(1) with the index formula")
    index.add_argument("--degree", type=int, default=2)
    index.add_argument("--args", help="args literal")
    return parser


def config_from_args(namespace):
    values = {key: value for key, value in vars(namespace).items() if value is not None}
    return RunConfig(**values)


def setup_logging(level=LOG_LEVEL, log_file=LOG_FILE):
    """Log to the log file and stderr; stdout is reserved for reports."""
    directory = os.path.dirname(log_file)
    if directory:
        os.makedirs(directory, exist_ok=True)
    logging.basicConfig(
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        level=getattr(logging, level.upper(), logging.INFO),
        handlers=[
            logging.FileHandler(log_file),
            logging.StreamHandler(sys.stderr)
        ]
    )


def _chain_literal(config):
    value = parse_literal(config.chain, config.n, config.rank)
    if isinstance(value, (WeylElement, MatrixElement)):
        value = TensorChain.from_entries([value])
    if not isinstance(value, TensorChain):
        raise UsageError(f"expected a chain literal, got {type(value).__name__}")
    return value


def _args_literal(config):
    if config.args is None:
        return None
    value = parse_literal(config.args, config.n, config.rank)
    if not isinstance(value, list):
        raise UsageError(f"expected an args literal, got {type(value).__name__}")
    return value


def default_index_args(degree, n, rank):
    """(p, q) or (p Id, hbar q E_11) at degree 2; (p, p q^2, q, p^2 q) at degree 4."""
    dim = 2 * n
    p = WeylElement.variable(dim, 0)
    q = WeylElement.variable(dim, n)
    if degree == 0:
        return []
    if degree == 2:
        if rank >= 2:
            return [MatrixElement.scalar(p, rank), MatrixElement.unit(dim, rank, 0, 0, q.shift_hbar(1))]
        return [p, q]
    if degree == 4:
        q2 = WeylElement.variable(dim, n, 2)
        p2 = WeylElement.variable(dim, 0, 2)
        return [MatrixElement.scalar(f, rank) for f in (p, p.commutative_mul(q2), q, p2.commutative_mul(q))]
    raise UsageError(f"no default arguments at degree {degree}; pass --args")


def run_verify(config):
    sampler = ElementSampler(config.seed, config.n, config.rank, config.max_weight, config.max_chain_length)
    logger.info(f"verify {config.suite}: seed {config.seed}, {config.cases} cases per identity")
    results = run_suite(config.suite, sampler, config.cases)
    lines = [result.line() for result in results]
    failed = [result for result in results if not result.passed]
    if failed:
        lines.append(f"smallest failing instance\t{failed[0].suite}.{failed[0].name}\t{failed[0].smallest_failure()}")
        return EXIT_VIOLATION, lines
    return EXIT_OK, lines


def run_wheel(config):
    status, lines = EXIT_OK, []
    for k in range(2, config.max_k + 1):
        value = wheel_coefficient(k)
        reference = bernoulli_wheel(k)
        if value != reference:
            logger.error(f"wheel({k}) = {value} differs from -B_k/k! = {reference}")
            status = EXIT_VIOLATION
        lines.append(f"{k}\t{value}\t{reference}" if config.reference else f"{k}\t{value}")
    return status, lines


def run_expect(config):
    chain = _chain_literal(config)
    args = _args_literal(config) or []
    return EXIT_OK, [str(interacting_expectation(args, chain))]


def run_trace(config):
    chain = _chain_literal(config)
    args = _args_literal(config) or []
    return EXIT_OK, [str(universal_trace(args, chain, use_gamma=config.gamma))]


def run_index(config):
    args = _args_literal(config)
    if args is None:
        args = default_index_args(config.degree, config.n, config.rank)
    report = index_report(config.degree, args, config.dim, config.rank)
    if config.degree <= 2 and not report.holds():
        logger.error(f"index identity fails at {format_literal(args)}")
        return EXIT_VIOLATION, report.lines()
    return EXIT_OK, report.lines()


COMMANDS = {
    "verify": run_verify,
    "wheel": run_wheel,
    "expect": run_expect,
    "trace": run_trace,
    "index": run_index,
}


def run(config):
    """
    Run one command.

    Args:
        config (RunConfig): Validated run configuration

    Returns:
        tuple: (exit status, report lines for stdout)
    """
    config.validate()
    return COMMANDS[config.command](config)


def main(argv=None):
    """Parse the command line, run the command and print its report."""
    parser = build_parser()
    config = config_from_args(parser.parse_args(argv))
    setup_logging()
    try:
        status, lines = run(config)
    except ValueError as e:
        logger.error(f"{config.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    for line in lines:
        print(line)
    return status


if __name__ == "__main__":
    sys.exit(main())

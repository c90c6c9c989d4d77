"""Subcommand implementations. Each takes parsed arguments and returns an OutputRecord."""

import logging
from argparse import Namespace

from cumubound.asymptotics import (
    cgf_radius_lower_bound,
    crude_radius_lower_bound,
    efficiency_gap,
    egf_coefficient_table,
    log_asymptotic_coefficient,
    rate,
)
from cumubound.bounds import bound_report, converse_sweep
from cumubound.cli.output import OutputRecord
from cumubound.combinatorics import coefficient_table
from cumubound.constants import (
    CLASS_BY_NAME,
    CLASS_NAMES,
    PartitionClass,
    Provenance,
)
from cumubound.distributions import (
    cumulant_sequence,
    empirical_moments,
    make_law,
    moment_sequence,
    sample,
)
from cumubound.errors import InvalidOrderError, ParameterError
from cumubound.tail import BernsteinParams, bernstein_tail, chernoff_point, derive_params
from cumubound.transforms import (
    CumulantSequence,
    MomentSequence,
    cumulants_to_moments,
    moments_to_cumulants,
)
from cumubound.utils import mp, parse_law_spec, parse_rational, parse_rational_list

logger = logging.getLogger(__name__)

ALL_THREE = "all-three"

_PROVENANCES = {
    "recurrence": Provenance.RECURRENCE,
    "egf": Provenance.EGF_SERIES,
    "brute-force": Provenance.BRUTE_FORCE,
}


def _table(partition_class: PartitionClass, args: Namespace):
    provenance = _PROVENANCES[args.provenance]
    if provenance == Provenance.EGF_SERIES:
        return egf_coefficient_table(partition_class, args.max_n)
    return coefficient_table(partition_class, args.max_n, provenance, limit=args.enum_limit)


def _asymptotic_cells(partition_class: PartitionClass, n: int, exact: int, scientific: bool) -> dict:
    log_value = log_asymptotic_coefficient(partition_class, n)
    if log_value == mp.ninf:
        return {"asymptotic": 0.0, "ratio": None}
    value = mp.exp(log_value)
    ratio = float(mp.mpf(exact) / value)
    if scientific:
        asymptotic = mp.nstr(value, 17, min_fixed=0, max_fixed=0)
    else:
        asymptotic = float(value)
    return {"asymptotic": asymptotic, "ratio": ratio}


def cmd_coeffs(args: Namespace) -> OutputRecord:
    """Coefficient masses for n = 2..max_n.

    all-three without --asymptotic prints one row per family with one column
    per order; every other combination prints long rows.
    """
    if args.max_n < 2:
        raise InvalidOrderError(f"--max-n must be >= 2, got {args.max_n}")
    record = OutputRecord("coeffs", format=args.format)
    if args.partition_class == ALL_THREE:
        classes = list(PartitionClass)
    else:
        classes = [CLASS_BY_NAME[args.partition_class]]
    wide = args.partition_class == ALL_THREE and not args.asymptotic
    for partition_class in classes:
        table = _table(partition_class, args)
        if wide:
            row = {"class": CLASS_NAMES[partition_class]}
            row.update({str(n): table[n] for n in range(2, args.max_n + 1)})
            record.rows.append(row)
            continue
        for n in range(2, args.max_n + 1):
            row = {"n": n, "coefficient": table[n]}
            if len(classes) > 1:
                row = {"class": CLASS_NAMES[partition_class], **row}
            if args.asymptotic:
                row.update(_asymptotic_cells(partition_class, n, table[n], args.scientific))
            record.rows.append(row)
    return record


def cmd_transform(args: Namespace) -> OutputRecord:
    if args.moments is not None:
        if args.direction == "to-moments":
            raise ParameterError("--direction to-moments needs --cumulants")
        moments = MomentSequence(tuple(parse_rational_list(args.moments)))
        cumulants = moments_to_cumulants(moments)
    else:
        if args.direction == "to-cumulants":
            raise ParameterError("--direction to-cumulants needs --moments")
        cumulants = CumulantSequence(tuple(parse_rational_list(args.cumulants)))
        moments = cumulants_to_moments(cumulants)
    record = OutputRecord("transform", format=args.format)
    for n in range(1, len(moments) + 1):
        record.rows.append({"n": n, "moment": moments.moment(n), "cumulant": cumulants.cumulant(n)})
    return record


def _moments_from_args(args: Namespace) -> tuple[MomentSequence, CumulantSequence, str]:
    if args.law is not None:
        name, params = parse_law_spec(args.law)
        law = make_law(name, params)
        return moment_sequence(law, args.max_n), cumulant_sequence(law, args.max_n), law.label
    values = tuple(parse_rational_list(args.moments))
    if args.abs_moments is None:
        raise ParameterError("--moments needs --abs-moments (E|X|^n for each order)")
    abs_values = tuple(parse_rational_list(args.abs_moments))
    if len(abs_values) != len(values):
        raise ParameterError(f"Got {len(values)} moments but {len(abs_values)} absolute moments")
    moments = MomentSequence(values, abs_values, mean_known_zero=args.centered, symmetric=args.symmetric)
    return moments, moments_to_cumulants(moments), "moments"


def cmd_bound(args: Namespace) -> OutputRecord:
    moments, cumulants, source = _moments_from_args(args)
    n_max = min(args.max_n, len(moments))
    record = OutputRecord("bound", format=args.format)
    for report in bound_report(moments, n_max):
        record.rows.append({"source": source, "check": "forward", **report.as_row()})
        record.failed |= report.violated
    if args.converse:
        for converse in converse_sweep(cumulants, moments, n_max):
            record.rows.append({"source": source, **converse.as_row()})
            record.failed |= not (converse.raw_ok and converse.central_ok)
    if record.failed:
        logger.error("A bound check failed for %s", source)
    return record


def cmd_tail(args: Namespace) -> OutputRecord:
    record = OutputRecord("tail", format=args.format)
    xs = parse_rational_list(args.x) if args.x is not None else []
    if args.derive is not None:
        if args.v is not None or args.b is not None:
            raise ParameterError("--derive cannot be combined with --v/--b")
        pair = parse_rational_list(args.derive)
        if len(pair) != 2:
            raise ParameterError(f"--derive takes 'v,L', got '{args.derive}'")
        law = None
        if args.law is not None:
            law = make_law(*parse_law_spec(args.law))
        derived = derive_params(pair[0], pair[1], n_max=args.sweep, law=law)
        base = {
            "v": derived.v,
            "L": derived.L,
            "A_cen": derived.A_cen,
            "v_prime": derived.v_prime,
            "b": derived.b,
        }
        params = derived.bernstein()
    else:
        if args.v is None or args.b is None or not xs:
            raise ParameterError("tail needs --v, --b and --x, or --derive v,L")
        params = BernsteinParams(parse_rational(args.v), parse_rational(args.b))
        base = {"v": params.v, "b": params.b}
    if not xs:
        record.rows.append(base)
    for x in xs:
        record.rows.append(
            {
                **base,
                "x": x,
                "t_star": chernoff_point(params, x),
                "two_sided": args.two_sided,
                "bound": bernstein_tail(params, x, two_sided=args.two_sided),
            }
        )
    return record


def cmd_rates(args: Namespace) -> OutputRecord:
    if not 1 <= args.precision <= 15:
        raise ParameterError(f"--precision must be in 1..15, got {args.precision}")
    digits = args.precision
    record = OutputRecord("rates", format=args.format)
    for partition_class in PartitionClass:
        constant = rate(partition_class)
        record.rows.append(
            {
                "class": CLASS_NAMES[partition_class],
                "rho": round(constant.rho, digits),
                "equation": constant.defining_equation,
                "residual": constant.residual,
                "radius_unit_scale": round(cgf_radius_lower_bound(constant.rho, 1.0), digits),
                "crude_radius_unit_scale": round(crude_radius_lower_bound(1.0), digits),
            }
        )
    gap = efficiency_gap()
    record.rows.append(
        {
            "class": "rademacher",
            "rho": round(gap.pi_half, digits),
            "equation": "cos(rho) = 0",
            "eta": round(gap.eta, digits),
            "rate_at_order": round(gap.rademacher_rate, digits),
            "order": gap.order,
        }
    )
    return record


def cmd_sample(args: Namespace) -> OutputRecord:
    law = make_law(*parse_law_spec(args.law))
    draws = sample(law, args.count, seed=args.seed)
    estimates = empirical_moments(draws, args.max_n)
    record = OutputRecord("sample", format=args.format)
    for n in range(1, args.max_n + 1):
        exact = law.moment(n)
        record.rows.append(
            {
                "law": law.label,
                "n": n,
                "moment": estimates.moment(n),
                "abs_moment": estimates.abs_moment(n),
                "central_abs_moment": estimates.central_abs_moment(n),
                "exact_moment": exact,
                "error": abs(estimates.moment(n) - float(exact)),
            }
        )
    return record

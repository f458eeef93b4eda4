"""Sup-ratio of the trace map between Sobolev-weighted modulation spaces."""
from _common import parser, run

from modspace.trace import DimSplit, TraceExperimentConfig, trace_bound_experiment

if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("--split", type=int, nargs=3, default=(1, 1, 0))
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--s0", type=float, default=0.0)
    p.add_argument("--lenient-theta", action="store_true",
                   help="report an infinite trace-weight constant instead of raising")
    args = p.parse_args()
    cfg = TraceExperimentConfig(split=DimSplit(*args.split), s=args.s, s0=args.s0, seed=args.seed,
                                strict_theta=not args.lenient_theta)
    if args.resolutions:
        cfg.resolutions = tuple(args.resolutions)
    run(lambda: trace_bound_experiment(cfg), args)

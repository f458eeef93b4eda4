"""Run a verify suite and write its report, without going through the CLI table."""
from _common import parser, run

from modspace.verify import SUITES, run_suite

if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("suite", choices=sorted(SUITES) + ["all"])
    args = p.parse_args()
    run(lambda: run_suite(args.suite, {"seed": args.seed}, args.deterministic), args)

from morseig.cli.cli_main import __doc__ as cli_doc

HELP_PAGE = (
    (cli_doc or "")
    + """
Every command that analyzes a family takes `--family` (a builtin name or a JSON spec path)
and `--k` (the eigenvalue branch, counted from the bottom). Results go to stdout as JSON,
Markdown or CSV, or to a file with `--out`.

Exit codes: 0 when the checks pass, 2 when an inequality is violated, 3 when some
critical point is outside the reach of the theory (borderline, non-generic) so the
verdict is only indicative, and 1 on errors.

Typical usage:

```shell
# Table of non-smooth Morse contributions for multiplicities up to 8
mig table --nu 8 --field real --format md

# Classify the cone tip of a two-band family
mig classify --family cone-symmetric --point 0,0 --k 1

# Find all critical points of the lower band on T^2 and check the Morse inequalities
mig scan --family real2band-t2 --k 1 --grid 32 --format md

# Saddle point (van Hove) bounds for every band of a Weyl semimetal model on T^3
mig vanhove --family weyl-t3 --grid 24 --format text

# Follow a nodal line and save it as a polyline
mig trace --family nodal-ring-t3 --point 0,0,0 --k 1 --out ring.csv

# Sample a band for plotting
mig contour --family real2band-t2 --k 2 --grid 64 --out band2.csv

# Cross-check Hellmann-Feynman slopes on random families
mig hf-check --trials 200
```

Defaults for tolerances, seed and worker threads: `mig setup --show`.

For all commands: `mig --help`
"""
)

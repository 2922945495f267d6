"""Error type shared by every module.

Each failure carries a short machine-readable ``code`` (e.g. ``"no-root-in-bracket"``)
so callers and the CLI can dispatch on it without parsing messages.
"""


class CddError(ValueError):
    def __init__(self, code: str, message: str = ""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)


# codes the CLI maps to "analytically divergent / undefined" (exit 3)
DIVERGENT_CODES = frozenset(
    {
        "infinite-mass",
        "zero-mass",
        "fm-divergent",
        "pathological-case",
        "no-case",
        "equality-not-asserted",
        "outside-domain",
        "outside-positivity-interval",
        "not-cd-certified",
        "degenerate-profile",
        "no-crossing",
        "quadrature-failed",
    }
)

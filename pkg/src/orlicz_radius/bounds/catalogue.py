"""The inequality catalogue: case identifiers, parameters and metadata.

A :class:`BoundCase` is an identifier plus the parameters that inequality
uses.  Cases are written and parsed with the key syntax
``id[name=value;name=value]`` (names sorted), e.g.
``th4_gh_alpha[alpha=0.5;phi=expm1;s=0.25;variant=A]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..orlicz import OrliczFn, parse_phi, registered


class CaseError(ValueError):
    """Unknown case identifier or parameters outside the admissible range."""


PARAM_NAMES = ("phi", "alpha", "v", "s", "r", "n", "variant")


@dataclass(frozen=True)
class CaseInfo:
    id: str
    params: tuple[str, ...]
    anchor: str
    members: str
    kind: str = "operator"  # or "vector"
    pair: bool = False
    submult: bool = False
    open_v: bool = False  # v restricted to the open interval (0, 1)
    defaults: dict = field(default_factory=dict)


def _info(id, params, anchor, members, **kw) -> CaseInfo:
    return CaseInfo(id, tuple(params), anchor, members, **kw)


_PHI1 = {"phi": "power:p=1"}

CATALOGUE: dict[str, CaseInfo] = {
    c.id: c
    for c in [
        # -- classical baselines ------------------------------------------------
        _info("base_norm", (), "norm equivalence of w and the operator norm", "||T||/2 <= w(T) <= ||T||"),
        _info("base_kittaneh", (), "mean of |T| and |T*|", "w(T) <= ||(|T|+|T*|)||/2"),
        _info("base_elhaddad", ("r",), "power mean of |T| and |T*|", "w^2r(T) <= ||(|T|^2r+|T*|^2r)||/2", defaults={"r": 1.0}),
        _info("base_abuomar", (), "square bound with w(T^2)", "w^2(T) <= ||(|T|^2+|T*|^2)||/4 + w(T^2)/2"),
        _info("base_bhunia", (), "square bound with w(|T||T*|)", "w^2(T) <= ||(|T|^2+|T*|^2)||/4 + w(|T||T*|)/2"),
        _info("dragomir_product", ("r",), "product bound for S*T", "w^r(S*T) <= ||(|T|^2r+|S|^2r)||/2", pair=True, defaults={"r": 1.0}),
        # -- vector lemmas ----------------------------------------------------------
        _info("buzano_vec", (), "Buzano refinement of Cauchy-Schwarz", "|<x,e><e,y>| <= (|x||y| + |<x,y>|)/2", kind="vector"),
        _info("gen_cauchy_vec", ("v",), "weighted Cauchy-Schwarz refinement", "|<x,y>|^2 <= mix(v) <= |x|^2|y|^2", kind="vector", defaults={"v": 0.5}),
        _info("mccarthy_vec", ("r",), "McCarthy inequality for positive operators", "<Ax,x>^r <= <A^r x,x>", kind="vector", defaults={"r": 2.0}),
        _info("mixed_schwarz_vec", ("s",), "mixed Schwarz inequality with power split", "|<Tx,y>| <= ||T|^s x| ||T*|^(1-s) y|", kind="vector", defaults={"s": 0.5}),
        _info("op_jensen_vec", ("phi",), "operator Jensen inequality", "phi(<Ax,x>) <= <phi(A)x,x>", kind="vector", defaults=_PHI1),
        _info("ext_buzano_vec", ("n",), "Buzano inequality for n vectors", "|prod <x_k,e>| <= (|<x1,x2> prod_k>2 <x_k,e>| + prod |x_k|)/2", kind="vector", defaults={"n": 3}),
        _info("orlicz_buzano_vec", ("phi",), "Orlicz form of the Buzano inequality", "phi(|<x,e><e,y>|) <= (phi(|x||y|) + phi(|<x,y>|))/2", kind="vector", defaults={"phi": "expm1"}),
        # -- single-operator results ------------------------------------------------
        _info("power_norm", ("phi",), "Orlicz mean of ||T|| and ||T^2||^(1/2)", "phi(w) <= (phi(||T||) + phi(||T^2||^(1/2)))/2 <= phi(||T||)", defaults={"phi": "expm1"}),
        _info("th2_gh", ("phi", "v", "s"), "sub-multiplicative bound with g(t)=t^s, h(t)=t^(1-s)", "phi(w^2) <= g/h mixture", submult=True, defaults={"phi": "power:p=1", "v": 0.5, "s": 0.5}),
        _info("cor_22", (), "square-root split of the g/h bound", "w^2 <= refined <= norm-only tail"),
        _info("th3_alpha", ("phi", "alpha", "variant"), "alpha-mixture with w(T^2)", "phi(w^2) <= alpha/2 phi(w(T^2)) + ||mixture||", defaults={"phi": "power:p=1", "alpha": 0.5, "variant": "A"}),
        _info("th4_gh_alpha", ("phi", "alpha", "s", "variant"), "alpha-mixture with g/h powers", "phi(w^2) <= ||alpha/2 [phi(g^4)+phi(h^4)] + (1-alpha) phi(|.|^2)||", defaults={"phi": "power:p=1", "alpha": 0.5, "s": 0.5, "variant": "A"}),
        _info("cor_halfsum_sq", ("phi",), "Orlicz mean of |T|^2 and |T*|^2", "phi(w^2) <= ||phi(|T|^2)+phi(|T*|^2)||/2", defaults=_PHI1),
        _info("th5", ("phi",), "Cartesian-type bound with |T| + i|T*|", "phi(w^2) <= phi(w^2(|T|+i|T*|)/2)/2 + phi(w(|T||T*|))/4 + ||..||/8", defaults=_PHI1),
        _info("cor_halfsum", ("phi",), "Orlicz mean of |T| and |T*|", "phi(w) <= ||phi(|T|)+phi(|T*|)||/2", defaults=_PHI1),
        _info("th6", ("phi",), "minimum of w(|T||T*|) and w(T^2)", "phi(w^2) <= min{..}/2 + ||phi(|T|^2)+phi(|T*|^2)||/4", defaults=_PHI1),
        _info("th8", ("phi",), "minimum with Orlicz mean of the norm", "phi(w^2) <= min{..}/2 + phi(||(|T|^2+|T*|^2)||/2)/2", defaults=_PHI1),
        _info("cor_1_1", (), "exponential mean with w(T^2)", "w^2 <= log(e^w(T^2)/2 + e^h/2) <= h"),
        _info("cor_1_2", (), "exponential mean with w(|T||T*|)", "w^2 <= log(e^w(|T||T*|)/2 + e^h/2) <= h"),
        _info("cor_prop1", (), "fourth-power exponential mean", "w^4 <= log(e^w^2(T^2)/2 + e^h4/2) <= h4"),
        _info("th7_power", ("phi", "n"), "power bound by repeated Buzano steps", "phi(w^n) <= sum form <= 2^(1-n) phi(w(T^n)) + (1-2^(1-n)) phi(||T||^n)", defaults={"phi": "expm1", "n": 2}),
        _info("cor_nil", ("n",), "exponential power bound", "w <= (log[2^(1-n) e^w(T^n) + (1-2^(1-n)) e^||T||^n])^(1/n) <= ||T||", defaults={"n": 2}),
        _info("cor_N222", (), "exponential power bound, n = 2", "w <= (log[e^w(T^2)/2 + e^||T||^2/2])^(1/2) <= ||T||"),
        _info("cor_nilpotent", ("n",), "bound for operators with T^n = 0", "w <= c_n ||T|| <= ||T||", defaults={"n": 2}),
        # -- two-operator results ---------------------------------------------------
        _info("th1_product", ("phi", "v"), "sub-multiplicative bound for T*S", "phi(w^2(T*S)) <= f-weighted mixture", pair=True, submult=True, defaults={"phi": "power:p=1", "v": 0.5}),
        _info("th1_power", ("r", "v"), "power-r form of the T*S bound", "w^2r(T*S) <= mixture <= ||(|T|^4r+|S|^4r)||/2", pair=True, defaults={"r": 1.0, "v": 0.5}),
        _info("th1_power_t", ("r", "v"), "power-r form with f(t) = t", "w^2r(T*S) <= mixture(v = t)", pair=True, open_v=True, defaults={"r": 1.0, "v": 0.5}),
        _info("cor_N1", (), "f = 1/2 form of the T*S bound", "w^2(T*S) <= refined <= norm-only tail", pair=True),
        _info("cor_11", ("v",), "f(t) = t form of the T*S bound", "w^2(T*S) <= refined <= norm-only tail", pair=True, open_v=True, defaults={"v": 0.5}),
    ]
}

# every operator case takes its input through evaluate_bound; vector cases
# through check_vector_lemma
VECTOR_CASES = tuple(k for k, c in CATALOGUE.items() if c.kind == "vector")
OPERATOR_CASES = tuple(k for k, c in CATALOGUE.items() if c.kind == "operator")
PAIR_CASES = tuple(k for k, c in CATALOGUE.items() if c.pair)


def fmt_number(x) -> str:
    """Shortest round-tripping decimal, without a trailing ``.``."""
    return np.format_float_positional(float(x), trim="-")


@dataclass(frozen=True)
class BoundCase:
    """One inequality of the catalogue with concrete parameters.

    Only the parameters the case uses may be set; the rest stay ``None``.
    Missing parameters take the case's defaults.
    """

    id: str
    phi: OrliczFn | None = None
    alpha: float | None = None
    v: float | None = None
    s: float | None = None
    r: float | None = None
    n: int | None = None
    variant: str | None = None

    def __post_init__(self):
        info = CATALOGUE.get(self.id)
        if info is None:
            raise CaseError(f"unknown bound case {self.id!r}")
        for name in PARAM_NAMES:
            value = getattr(self, name)
            if name not in info.params:
                if value is not None:
                    raise CaseError(f"{self.id} does not take parameter {name!r}")
                continue
            if value is None:
                value = info.defaults[name]
            if name == "phi" and isinstance(value, str):
                value = parse_phi(value)
            object.__setattr__(self, name, value)
        self._validate(info)

    def _validate(self, info: CaseInfo) -> None:
        def need(cond, msg):
            if not cond:
                raise CaseError(f"{self.id}: {msg}")

        for name in ("alpha", "v", "s", "r"):
            value = getattr(self, name)
            if value is not None:
                need(np.isfinite(value), f"{name} must be finite")
                object.__setattr__(self, name, float(value))
        if self.alpha is not None:
            need(0.0 <= self.alpha <= 1.0, "alpha must lie in [0, 1]")
        if self.s is not None:
            need(0.0 <= self.s <= 1.0, "s must lie in [0, 1]")
        if self.v is not None:
            if info.open_v:
                need(0.0 < self.v < 1.0, "t must lie in the open interval (0, 1)")
            else:
                need(self.v >= 0.0, "v = f(t) must be nonnegative")
        if self.r is not None:
            need(self.r >= 1.0, "r must be >= 1")
        if self.n is not None:
            need(float(self.n) == int(self.n), "n must be an integer")
            object.__setattr__(self, "n", int(self.n))
            need(2 <= self.n <= 16, "n must lie in 2..16")
        if self.variant is not None:
            need(self.variant in ("A", "B"), "variant must be 'A' or 'B'")
        if self.phi is not None:
            need(isinstance(self.phi, OrliczFn), "phi must be an OrliczFn")
            if info.submult:
                need(
                    self.phi.submult.admissible,
                    f"needs a sub-multiplicative phi; {self.phi.name} is {self.phi.submult.describe()}",
                )

    @property
    def info(self) -> CaseInfo:
        return CATALOGUE[self.id]

    def params(self) -> dict:
        """Parameters in use, with ``phi`` given by name."""
        out = {}
        for name in self.info.params:
            value = getattr(self, name)
            out[name] = value.name if name == "phi" else value
        return dict(sorted(out.items()))

    @property
    def key(self) -> str:
        params = self.params()
        if not params:
            return self.id
        parts = []
        for name, value in params.items():
            text = fmt_number(value) if isinstance(value, (int, float)) and not isinstance(value, bool) else str(value)
            parts.append(f"{name}={text}")
        return f"{self.id}[{';'.join(parts)}]"

    def __str__(self) -> str:
        return self.key

    @classmethod
    def parse(cls, key: str) -> "BoundCase":
        """Inverse of :attr:`key`; missing parameters take defaults."""
        key = key.strip()
        if "[" in key:
            if not key.endswith("]"):
                raise CaseError(f"malformed case key {key!r}")
            ident, body = key[:-1].split("[", 1)
        else:
            ident, body = key, ""
        kwargs = {}
        for item in filter(None, (p.strip() for p in body.split(";"))):
            name, eq, value = item.partition("=")
            if not eq or name not in PARAM_NAMES:
                raise CaseError(f"bad parameter {item!r} in {key!r}")
            kwargs[name] = _coerce(name, value)
        try:
            return cls(ident, **kwargs)
        except ValueError as exc:
            if isinstance(exc, CaseError):
                raise
            raise CaseError(str(exc)) from None


def _coerce(name: str, value: str):
    if name == "phi":
        return parse_phi(value)
    if name == "variant":
        return value
    try:
        number = float(value)
    except ValueError:
        raise CaseError(f"parameter {name} needs a number, got {value!r}") from None
    return int(number) if name == "n" else number


def make_case(id: str, **params) -> BoundCase:
    """Build a case, accepting ``phi`` by name."""
    if isinstance(params.get("phi"), str):
        params["phi"] = parse_phi(params["phi"])
    return BoundCase(id, **params)


def catalogue_rows() -> list[dict]:
    """Rows for the catalogue listing: id, parameters, anchor, chain members."""
    return [
        {
            "id": info.id,
            "params": ",".join(info.params) or "-",
            "needs": "T,S" if info.pair else ("vectors" if info.kind == "vector" else "T"),
            "anchor": info.anchor,
            "chain": info.members,
        }
        for info in CATALOGUE.values()
    ]


# Grids swept by the default suite.
GRID_UNIT = (0.0, 0.25, 0.5, 0.75, 1.0)
GRID_OPEN_UNIT = (0.25, 0.5, 0.75)
GRID_R = (1.0, 1.5, 2.0)
GRID_N = (2, 3, 4, 5)


def default_phis(submult: bool = False) -> list[OrliczFn]:
    phis = registered()
    if submult:
        phis = [p for p in phis if p.submult.admissible]
    return phis


def default_grid(case_id: str) -> dict[str, list]:
    """Parameter grid used for ``case_id`` by the default suite."""
    info = CATALOGUE[case_id]
    grid: dict[str, list] = {}
    for name in info.params:
        if name == "phi":
            if case_id in ("orlicz_buzano_vec", "op_jensen_vec", "power_norm"):
                grid[name] = [p.name for p in default_phis()]
            else:
                grid[name] = [p.name for p in default_phis(info.submult)]
        elif name in ("alpha", "s"):
            grid[name] = list(GRID_UNIT)
        elif name == "v":
            grid[name] = list(GRID_OPEN_UNIT if info.open_v else GRID_UNIT)
        elif name == "r":
            grid[name] = list(GRID_R)
        elif name == "n":
            grid[name] = list(GRID_N)
        elif name == "variant":
            grid[name] = ["A", "B"]
    return grid


def expand_grid(case_id: str, grid: dict[str, list]) -> list[BoundCase]:
    """All cases on the Cartesian product of ``grid`` (sorted by key)."""
    info = CATALOGUE.get(case_id)
    if info is None:
        raise CaseError(f"unknown bound case {case_id!r}")
    unknown = set(grid) - set(info.params)
    if unknown:
        raise CaseError(f"{case_id} does not take parameter(s) {sorted(unknown)}")
    combos: list[dict] = [{}]
    for name in sorted(grid):
        values = grid[name]
        if not isinstance(values, (list, tuple)):
            values = [values]
        values = [_coerce(name, v) if isinstance(v, str) else v for v in values]
        combos = [dict(c, **{name: v}) for c in combos for v in values]
    cases = {BoundCase(case_id, **c).key: BoundCase(case_id, **c) for c in combos}
    return [cases[k] for k in sorted(cases)]

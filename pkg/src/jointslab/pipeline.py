"""End-to-end verification runs and their reports."""
from __future__ import annotations

import time
from fractions import Fraction
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field

from . import configs as C
from . import polymethod as P
from . import variational as V
from .errors import JointsLabError

MODES = ("weights", "orders", "polymethod", "all")
_STAGES = {"weights": 1, "orders": 2, "polymethod": 3, "all": 4}


@dataclass
class CheckRecord:
    name: str
    ref: str
    passed: bool
    values: dict = dc_field(default_factory=dict)
    clause: str | None = None
    required: bool = True


@dataclass
class RunReport:
    digest: str
    kind: str
    n: int | None
    checks: list = dc_field(default_factory=list)
    telemetry: list = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.required)

    def add(self, *records) -> None:
        self.checks.extend(records)

    def to_json(self) -> dict:
        return {"digest": self.digest, "kind": self.kind, "n": self.n, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks], "telemetry": self.telemetry}

    @classmethod
    def from_json(cls, doc: dict) -> "RunReport":
        rep = cls(doc["digest"], doc["kind"], doc.get("n"), telemetry=doc.get("telemetry", []))
        rep.checks = [CheckRecord(**c) for c in doc.get("checks", [])]
        return rep

    def to_text(self) -> str:
        width = max((len(c.name) for c in self.checks), default=10)
        lines = [f"input {self.digest[:16]}  kind={self.kind}  n={self.n}"]
        for c in self.checks:
            mark = "PASS" if c.passed else ("FAIL" if c.required else "info")
            vals = "  ".join(f"{k}={_short(v)}" for k, v in c.values.items())
            line = f"{mark}  {c.name:<{width}}  {vals}"
            if c.clause and not c.passed:
                line += f"  [{c.clause}]"
            lines.append(line)
        for t in self.telemetry:
            lines.append("      " + "  ".join(f"{k}={_short(v)}" for k, v in t.items()))
        lines.append("ALL CHECKS PASSED" if self.passed else "SOME CHECKS FAILED")
        return "\n".join(lines)


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    s = str(v)
    return s if len(s) <= 40 else s[:37] + "..."


def default_n(cfg) -> int:
    """Ten times the largest number of chosen joints on a line."""
    return 10 * max((len(js) for js in cfg.line_joints), default=1)


def certificate_record(cert: V.BoundCertificate, ref: str, required: bool = True) -> CheckRecord:
    return CheckRecord(f"bound:{cert.theorem}", ref, cert.holds,
                       {"lhs": str(cert.lhs), "rhs": str(cert.rhs), "ratio": cert.ratio,
                        "equality": cert.equality},
                       None if cert.holds else f"{cert.lhs} > {cert.rhs}", required)


def _chain_records(prefix: str, chain: V.ChainReport, ref: str, tol: float) -> list:
    return [CheckRecord(f"{prefix}:{x.name}", ref, x.slack >= -tol,
                        {"lhs": x.lhs, "rhs": x.rhs, "slack": x.slack},
                        None if x.slack >= -tol else "link fails beyond tolerance")
            for x in chain.links]


def _degree_records(prefix, cs, ref) -> list:
    t = time.perf_counter()
    cert = P.certify_degree_bound(cs)
    return [CheckRecord(f"{prefix}:kernel", ref, cert.kernel_trivial,
                        {"rows": cs.nrows, "cols": cs.ncols, "rank": cert.rank,
                         "seconds": round(time.perf_counter() - t, 4)},
                        None if cert.kernel_trivial else f"witness {cert.witness!r}")]


def _orders_records(prefix, cfg, ord, ref_valid, ref_count) -> list:
    try:
        chk = P.validate_orders(cfg, ord)
    except JointsLabError as exc:
        return [CheckRecord(f"{prefix}:hypotheses", ref_valid, False, {"n": ord.n},
                            getattr(exc, "clause", None) or str(exc))]
    out = [CheckRecord(f"{prefix}:hypotheses", ref_valid, True,
                       {"n": ord.n, "equality_form": chk.equality_form})]
    try:
        rep = P.check_counting_inequality(cfg, ord)
        out.append(CheckRecord(f"{prefix}:counting", ref_count, True,
                               {"lhs": str(rep.lhs), "rhs": str(rep.rhs)}))
    except AssertionError as exc:
        out.append(CheckRecord(f"{prefix}:counting", ref_count, False, {}, str(exc)))
    return out


def verify_component(cfg: C.JointsConfiguration, n: int, n_poly: int, stage: int,
                     families=None, label: str = "component") -> tuple:
    """Checks for one connected joints component; returns ``(records, telemetry)``."""
    records = []
    tele = {"component": label, "J": cfg.num_joints, "L": cfg.num_lines}
    t = time.perf_counter()
    try:
        res = V.balance_products(cfg)
    except JointsLabError as exc:
        records.append(CheckRecord(f"{label}:balance", "balancing lemma", False,
                                   {"best_spread": getattr(exc, "best_spread", None)}, str(exc)))
        return records, tele
    tele.update(iterations=res.iterations, newton_steps=res.newton_steps, spread=res.spread,
                seconds=round(time.perf_counter() - t, 4))
    w = res.weights
    total = sum(w.products)
    records.append(CheckRecord(f"{label}:balance", "balancing lemma", res.spread <= V.SPREAD_TOL,
                               {"spread": res.spread, "W": res.common_value}))
    viol = V.feasibility_violations(cfg, w)
    records.append(CheckRecord(f"{label}:feasibility", "continuous inequality hypotheses",
                               all(v <= 1e-9 for v in viol.values()), viol))
    records.append(CheckRecord(f"{label}:sum of products", "continuous inequality",
                               total >= 1 / V.factorial(cfg.d) - 1e-9,
                               {"sum": total, "bound": 1 / V.factorial(cfg.d)}))
    records += _chain_records(label, V.verify_amgm_chain(cfg, w, families), "AM-GM chain", 1e-9)
    if stage >= 2:
        ord = V.round_to_orders(cfg, w, n)
        records += _orders_records(f"{label}:orders", cfg, ord, "vanishing lemma hypotheses",
                                   "dimension counting")
    if stage >= 3:
        ord = ord if n_poly == n else V.round_to_orders(cfg, w, n_poly)
        records += _degree_records(f"{label}:degree", P.assemble_joint_constraints(cfg, ord),
                                   "vanishing-degree lemma")
    return records, tele


def _run_component(args):
    return verify_component(*args)


def _map(fn, jobs, items):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def verify(cfg, digest: str, mode: str = "all", n: int | None = None,
           n_cap: int | None = None, jobs: int = 1) -> RunReport:
    """Full verification of a configuration.

    ``n`` drives rounding and the counting checks; constraint matrices are
    built at ``min(n, n_cap)`` so they stay within the column budget.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    stage = _STAGES[mode]
    if isinstance(cfg, C.FlatJointsConfiguration):
        return _verify_flats(cfg, digest, stage, n, n_cap)
    families = None
    kind = "joints"
    if isinstance(cfg, C.MultijointsConfiguration):
        multi = cfg
        cfg, families = cfg.as_joints_configuration()
        kind = "multijoints"
    n = default_n(cfg) if n is None else n
    n_cap = P.max_degree_for_budget(cfg.d) if n_cap is None else n_cap
    n_poly = min(n, n_cap)
    report = RunReport(digest, kind, n)
    comps = [] if cfg.num_joints == 0 else C.connected_components(cfg)
    report.telemetry.append({"components": len(comps), "n_matrix": n_poly})
    items = []
    for i, comp in enumerate(comps):
        fam = None if families is None else _component_families(cfg, comp, families)
        items.append((comp, n, n_poly, stage, fam, f"c{i}"))
    for recs, tele in _map(_run_component, jobs, items):
        report.add(*recs)
        report.telemetry.append(tele)
    if stage >= 4:
        if kind == "joints":
            report.add(certificate_record(V.certify_bound("main", cfg.num_joints, cfg.num_lines, cfg.d),
                                    "main theorem"))
        else:
            sizes = list(multi.family_sizes)
            report.add(certificate_record(V.certify_bound("multijoints", multi.num_joints, sizes),
                                    "multijoints theorem"))
            if multi.d == 3:
                report.add(certificate_record(V.certify_bound("conj34", multi.num_joints, sizes),
                                        "multijoints conjecture (d = 3)", required=False))
    return report


def _component_families(cfg, comp, families):
    """Family label of each line of ``comp`` (a restriction of ``cfg``)."""
    index = {pt: p for p, pt in enumerate(cfg.joints)}
    fam = [None] * comp.num_lines
    for q, pt in enumerate(comp.joints):
        for new, old in zip(comp.incidence[q], cfg.incidence[index[pt]]):
            fam[new] = families[old]
    return tuple(fam)


def _verify_flats(cfg: C.FlatJointsConfiguration, digest: str, stage: int, n, n_cap) -> RunReport:
    n = default_n(cfg) if n is None else n
    n_cap = P.max_degree_for_budget(cfg.d) if n_cap is None else n_cap
    n_poly = min(n, n_cap)
    report = RunReport(digest, "flatjoints", n)
    report.telemetry.append({"n_matrix": n_poly})
    if cfg.num_joints == 0:
        return report
    try:
        aug = C.augment_with_flat_lines(cfg, n)
        report.add(CheckRecord("augmentation", "flat line augmentation", True,
                               {"new_lines": len(aug.new_lines), "L": aug.config.num_lines}))
    except (JointsLabError, ValueError) as exc:
        report.add(CheckRecord("augmentation", "flat line augmentation", False, {}, str(exc)))
    t = time.perf_counter()
    try:
        res = V.balance_sums_with_subsets(cfg)
    except JointsLabError as exc:
        report.add(CheckRecord("balance", "subset balancing lemma", False,
                               {"best_spread": getattr(exc, "best_spread", None)}, str(exc)))
        return report
    report.telemetry.append({"iterations": res.iterations, "extractions": res.extractions,
                             "J'": len(res.joint_ids), "L'": len(res.line_ids),
                             "s": res.s, "seconds": round(time.perf_counter() - t, 4)})
    sub, w = res.config, res.weights
    ratio_ok = res.ratio >= Fraction(cfg.num_joints, len(cfg.lines))
    report.add(CheckRecord("subset ratio", "subset balancing lemma (a)", ratio_ok,
                           {"J'/L'": str(res.ratio), "J/L": str(Fraction(cfg.num_joints, len(cfg.lines)))}))
    report.add(CheckRecord("equal sums", "subset balancing lemma (b)",
                           w.spread("sums") <= V.SPREAD_TOL, {"spread": w.spread("sums"), "s": res.s}))
    viol = V.feasibility_violations(sub, w, "inequality")
    report.add(CheckRecord("feasibility", "flat continuous inequality hypotheses",
                           all(v <= 1e-9 for v in viol.values()), viol))
    report.add(*_chain_records("chain", V.verify_flat_chain(cfg, res), "flats bound chain", 1e-6))
    if stage >= 2:
        ord = V.round_flat_orders(sub, w, n)
        report.add(*_orders_records("orders", sub, ord, "flat vanishing lemma hypotheses",
                                    "flat dimension counting"))
        aug = C.augment_with_flat_lines(sub, n)
        lifted = P.lift_flat_orders(aug, ord)
        report.add(*_orders_records("augmented orders", aug.config, lifted,
                                    "vanishing lemma hypotheses", "dimension counting"))
    if stage >= 3:
        ord = ord if n_poly == n else V.round_flat_orders(sub, w, n_poly)
        report.add(*_degree_records("flat degree", P.assemble_flat_constraints(sub, ord),
                                    "flat vanishing-degree lemma"))
    if stage >= 4:
        report.add(certificate_record(V.certify_bound("flats", cfg.num_joints, len(cfg.lines), cfg.d,
                                                cfg.m, len(cfg.flats)), "flats theorem"))
    return report

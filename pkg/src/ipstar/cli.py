"""Experiment front door: config files in, reports and certificates out.

Experiments are described by a line-oriented ``key = value`` config (with
optional ``[section]`` headers, which group lines but do not rename keys)
and run through subcommands named after the config's ``command`` value.
Bare ``key=value`` arguments override the file.  Outputs land in the
``output`` directory and re-running a completed experiment reproduces them
byte for byte, except for one timestamp line in reports.

Exit codes: 0 for any completed verdict (counterexamples included), 2 when
a search ran out of budget (a checkpoint file is written), 1 for config or
system errors.  ``--resume <checkpoint>`` continues an interrupted search;
a checkpoint names the config it came from by hash, and resuming with a
modified config is refused.  The IPSTAR_BUDGET environment variable sets
the default candidate budget; an explicit ``budget`` key wins.  Budgets
count examined candidates; there is no wall-clock cap.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .algebra import (
    DegreeWindow,
    FullWindow,
    IntegerWindow,
    RationalWindow,
    Rationals,
    VectorSpace,
)
from .halesjewett import hj_number
from .ipsets import (
    example_a,
    example_a_checks,
    fk_density_experiment,
    fk_odds_certificate,
    fu_ramsey_check,
)
from .recurrence import (
    classify_ipstar,
    fp_probe,
    isometric_recurrence_search,
    recurrence_set,
)
from .search import available_workers
from .systems import FinitePermSystem, RotationSystem, dlim_probe
from .textio import (
    TextFormatError,
    _content_lines,
    _parse_int,
    _split_top,
    check_certificate,
    describe_system,
    fu_certificate,
    hj_stage_certificate,
    parse_certificate,
    parse_element,
    parse_fraction,
    parse_monomial,
    parse_poly_map,
    parse_system_text,
    render_certificate,
    render_element,
    render_family,
    render_fraction,
    render_recurrence_csv,
    render_report_json,
    render_subset_config,
    report_tree,
)

BUDGET_ENV = "IPSTAR_BUDGET"


# ---------------------------------------------------------------------------
# config parsing


@dataclass(frozen=True)
class ConfigError:
    line: int | None
    message: str

    def __str__(self):
        return self.message if self.line is None else f"line {self.line}: {self.message}"


@dataclass
class ExperimentConfig:
    command: str
    values: dict
    lines: dict  # key -> source line number (None for overrides/defaults)


def _kind_posint(text: str) -> int:
    v = _parse_int(text)
    if v < 1:
        raise TextFormatError("must be >= 1")
    return v


def _kind_posfrac(text: str):
    q = parse_fraction(text)
    if q <= 0:
        raise TextFormatError("must be positive")
    return q


def _kind_str(text: str) -> str:
    if not text:
        raise TextFormatError("empty value")
    return text


def _convert(kind: str, text: str):
    if kind.startswith("choice:"):
        allowed = kind.split(":", 1)[1].split(",")
        if text not in allowed:
            raise TextFormatError(f"must be one of {', '.join(allowed)}")
        return text
    return {"posint": _kind_posint, "posfrac": _kind_posfrac, "str": _kind_str}[kind](text)


# key -> (kind, required, default); None default means "absent unless given"
_SPECS: dict[str, dict] = {
    "hj": {
        "k": ("posint", True, None),
        "t": ("posint", True, None),
        "m_max": ("posint", False, 6),
        "budget": ("posint", False, None),
        "output": ("str", False, "."),
    },
    "fu-ramsey": {
        "r": ("posint", False, None),
        "s": ("posint", True, None),
        "k": ("posint", True, None),
        "r_limit": ("posint", False, None),
        "budget": ("posint", False, None),
        "output": ("str", False, "."),
    },
    "fk-density": {
        "r": ("posint", True, None),
        "N": ("posint", True, None),
        "budget": ("posint", False, None),
        "output": ("str", False, "."),
    },
    "example-a": {
        "r_max": ("posint", True, None),
    },
    "recurrence": {
        "system": ("str", True, None),
        "set": ("str", False, "B"),
        "phi": ("str", True, None),
        "epsilon": ("posfrac", True, None),
        "window": ("str", True, None),
        "format": ("choice:csv,report", False, "csv"),
        "output": ("str", False, "."),
    },
    "classify": {
        "system": ("str", True, None),
        "set": ("str", False, "B"),
        "phi": ("str", True, None),
        "epsilon": ("posfrac", True, None),
        "window": ("str", True, None),
        "r_max": ("posint", False, 4),
        "density_N": ("posint", False, 6),
        "budget": ("posint", False, None),
        "workers": ("posint", False, None),
        "output": ("str", False, "."),
    },
    "search": {
        "system": ("str", True, None),
        "x": ("str", True, None),
        "m": ("str", True, None),
        "epsilon": ("posfrac", True, None),
        "gens": ("str", True, None),
        "workers": ("posint", False, None),
    },
    "density": {
        "system": ("str", True, None),
        "set": ("str", False, "B"),
        "phi": ("str", True, None),
        "N": ("posint", True, None),
    },
    "probe": {
        "system": ("str", True, None),
        "set": ("str", False, "B"),
        "phi": ("str", True, None),
        "epsilon": ("posfrac", True, None),
        "window": ("str", True, None),
        "gens": ("str", True, None),
    },
}


def _post_validate(command: str, values: dict) -> list[str]:
    if command == "fu-ramsey":
        if (values.get("r") is None) == (values.get("r_limit") is None):
            return ["give exactly one of 'r' (single check) or 'r_limit' (minimal-r search)"]
    return []


def parse_config(text: str, command: str | None = None, overrides=()):
    """Collect every problem, not just the first.

    Returns (config, errors); config is None whenever errors is non-empty.
    """
    errors: list[ConfigError] = []
    raw: dict[str, tuple[str, int | None]] = {}

    for no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not (line.endswith("]") and line[1:-1].strip()):
                errors.append(ConfigError(no, f"malformed section header {line!r}"))
            continue  # sections group lines visually; keys stay file-global
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            errors.append(ConfigError(no, f"expected 'key = value', got {line!r}"))
            continue
        if key in raw:
            errors.append(ConfigError(no, f"duplicate key {key!r}"))
            continue
        raw[key] = (value, no)

    for token in overrides:
        key, sep, value = token.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            errors.append(ConfigError(None, f"override {token!r}: expected key=value"))
            continue
        raw[key] = (value, None)  # overrides replace file entries

    file_command = None
    if "command" in raw:
        file_command, cmd_line = raw.pop("command")
        if command is not None and file_command != command:
            errors.append(
                ConfigError(cmd_line, f"config says command = {file_command}, invoked as {command}")
            )
    command = command or file_command
    if command is None:
        errors.append(ConfigError(None, "no command given"))
        return None, errors
    if command not in _SPECS:
        errors.append(ConfigError(None, f"unknown command {command!r}"))
        return None, errors

    spec = _SPECS[command]
    values: dict = {}
    lines: dict = {}
    broken: set[str] = set()
    for key, (value, no) in raw.items():
        if key not in spec:
            errors.append(ConfigError(no, f"unknown key {key!r} for command {command}"))
            continue
        try:
            values[key] = _convert(spec[key][0], value)
            lines[key] = no
        except TextFormatError as exc:
            errors.append(ConfigError(no, f"{key}: {exc}"))
            broken.add(key)
    for key, (_kind, required, default) in spec.items():
        if key in values or key in broken:
            continue
        if required:
            errors.append(ConfigError(None, f"missing required key {key!r}"))
        elif default is not None:
            values[key] = default
            lines[key] = None
    for msg in _post_validate(command, values):
        errors.append(ConfigError(None, msg))
    errors.sort(key=lambda e: (e.line is None, e.line or 0))
    if errors:
        return None, errors
    return ExperimentConfig(command, values, lines), errors


def render_config(cfg: ExperimentConfig) -> str:
    """Canonical form: command first, remaining keys sorted, defaults filled."""
    out = [f"command = {cfg.command}"]
    for key in sorted(cfg.values):
        v = cfg.values[key]
        text = render_fraction(v) if not isinstance(v, (str, int)) else str(v)
        out.append(f"{key} = {text}")
    return "\n".join(out) + "\n"


# operational knobs: changing them changes how far or where a run goes, not
# what is being computed, so checkpoints stay valid across them (raising the
# budget to finish an interrupted search is the whole point of resuming)
_HASH_EXCLUDE = frozenset({"budget", "workers", "output"})


def config_hash(cfg: ExperimentConfig) -> str:
    keep = {k: v for k, v in cfg.values.items() if k not in _HASH_EXCLUDE}
    text = render_config(ExperimentConfig(cfg.command, keep, {}))
    return hashlib.sha256(text.encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# shared plumbing


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _out_dir(cfg) -> Path:
    path = Path(cfg.values.get("output", "."))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _resolve_budget(cfg):
    if cfg.values.get("budget") is not None:
        return cfg.values["budget"]
    env = os.environ.get(BUDGET_ENV)
    if env is None or not env.strip():
        return None
    try:
        val = int(env)
    except ValueError:
        raise ValueError(f"{BUDGET_ENV} must be an integer, got {env!r}")
    if val < 1:
        raise ValueError(f"{BUDGET_ENV} must be >= 1")
    return val


def _workers(cfg) -> int:
    return cfg.values.get("workers") or available_workers()


def _resolve(cfg, key, fn):
    # attach the config location to value errors surfacing at run time
    try:
        return fn(cfg.values[key])
    except ValueError as exc:
        line = cfg.lines.get(key)
        where = f"config key {key!r}" + (f" (line {line})" if line else "")
        raise ValueError(f"{where}: {exc}") from None


def _load_system(cfg):
    path = cfg.values["system"]
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read system file {path!r}: {exc.strerror or exc}")
    try:
        return parse_system_text(text)
    except TextFormatError as exc:
        raise ValueError(f"system file {path!r}: {exc}")


def _named_event(cfg, events):
    name = cfg.values["set"]
    if name not in events:
        known = ", ".join(sorted(events)) or "none"
        raise ValueError(f"system file defines no set named {name!r} (sets: {known})")
    return events[name]


def _domain_ring(sys_):
    if isinstance(sys_, FinitePermSystem):
        return sys_.field
    if isinstance(sys_, RotationSystem):
        return Rationals()
    return sys_.ring


def _parse_window(text: str):
    parts = text.split()
    try:
        if parts[0] == "full" and len(parts) == 1:
            return FullWindow()
        if parts[0] == "deg" and len(parts) == 2:
            return DegreeWindow(_parse_int(parts[1]))
        if parts[0] == "int" and len(parts) == 2:
            return IntegerWindow(_parse_int(parts[1]))
        if parts[0] == "rat" and len(parts) == 3:
            return RationalWindow(_parse_int(parts[1]), _parse_int(parts[2]))
    except IndexError:
        pass
    raise TextFormatError(
        f"unknown window {text!r}; use 'full', 'deg N', 'int N', or 'rat A B'"
    )


def _parse_gens(ring, n: int, text: str):
    group = ring if n == 1 else VectorSpace(ring, n)
    parts = [p for p in (q.strip() for q in _split_top(text, ",")) if p]
    if not parts:
        raise TextFormatError("empty generator list")
    return tuple(parse_element(group, p) for p in parts)


def _experiment_inputs(cfg):
    sys_, events = _load_system(cfg)
    B = _named_event(cfg, events)
    ring = _domain_ring(sys_)
    phi = _resolve(cfg, "phi", lambda t: parse_poly_map(ring, sys_.acting, t))
    window = _resolve(cfg, "window", _parse_window)
    return sys_, B, phi, cfg.values["epsilon"], window


def _write_checkpoint(outd: Path, cfg, fields: dict) -> Path:
    h = config_hash(cfg)
    lines = [f"checkpoint {cfg.command}", f"config {h}"]
    for key in sorted(fields):
        lines.append(f"{key} {fields[key]}")
    path = outd / f"checkpoint-{h}.txt"
    path.write_text("\n".join(lines) + "\n")
    return path


def _load_checkpoint(path: str, cfg) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read checkpoint {path!r}: {exc.strerror or exc}")
    command = None
    fields: dict[str, str] = {}
    for no, line in _content_lines(text):
        key, _, rest = line.partition(" ")
        if command is None:
            if key != "checkpoint" or not rest.strip():
                raise ValueError(f"checkpoint {path!r}: line {no}: not a checkpoint file")
            command = rest.strip()
        else:
            fields[key] = rest.strip()
    if command is None:
        raise ValueError(f"checkpoint {path!r}: empty file")
    if command != cfg.command:
        raise ValueError(f"checkpoint is for command {command!r}, not {cfg.command!r}")
    if fields.get("config") != config_hash(cfg):
        raise ValueError("checkpoint was written by a different config; resume refused")
    return fields


def _fmt_path(path) -> str:
    return ",".join(str(c) for c in path or ())


def _read_path(text: str):
    if not text:
        return None
    return tuple(_parse_int(t) for t in text.split(","))


# ---------------------------------------------------------------------------
# runners


def _run_hj(cfg, resume_file) -> int:
    k, t, m_max = cfg.values["k"], cfg.values["t"], cfg.values["m_max"]
    outd = _out_dir(cfg)
    resume = None
    if resume_file is not None:
        ck = _load_checkpoint(resume_file, cfg)
        resume = (int(ck["m"]), _read_path(ck.get("path", "")))
        print(f"resumed at stage m={ck['m']}")
    res = hj_number(k, t, m_max, budget=_resolve_budget(cfg), resume=resume)
    for st in res.stages:
        if st.kind == "budget_exceeded":
            print(f"stage m={st.m}: budget exceeded after {st.candidates} candidates")
            ck_path = _write_checkpoint(
                outd, cfg, {"m": st.m, "path": _fmt_path(st.resume_path), "candidates": st.candidates}
            )
            print(f"checkpoint -> {ck_path}")
            return 2
        cert = hj_stage_certificate(k, t, st)
        tag = "cover" if st.kind == "all-colorings-ok" else "counterexample"
        path = outd / f"hj-k{k}-t{t}-m{st.m}-{tag}.txt"
        path.write_text(render_certificate(cert))
        label = "all colorings forced a line" if tag == "cover" else "counterexample"
        print(f"stage m={st.m}: {label} -> {path}")
    if res.value is None:
        print(f"HJ({k},{t}) > {m_max} (m_max reached)")
    else:
        print(f"HJ({k},{t}) = {res.value}")
    return 0


def _run_fu(cfg, resume_file) -> int:
    s, k = cfg.values["s"], cfg.values["k"]
    single = cfg.values.get("r")
    outd = _out_dir(cfg)
    budget = _resolve_budget(cfg)
    path0 = None
    if single is not None:
        rs = [single]
    else:
        rs = list(range(1, cfg.values["r_limit"] + 1))
    if resume_file is not None:
        ck = _load_checkpoint(resume_file, cfg)
        start_r = int(ck["r"])
        if start_r not in rs:
            raise ValueError(f"checkpoint resumes r={start_r}, outside this run")
        rs = [r for r in rs if r >= start_r]
        path0 = _read_path(ck.get("path", ""))
        print(f"resumed at r={start_r}")
    remaining = budget
    for r in rs:
        res = fu_ramsey_check(r, s, k, budget=remaining, resume_path=path0)
        path0 = None
        if res.kind == "budget_exceeded":
            print(f"fu r={r} s={s} k={k}: budget exceeded after {res.candidates} candidates")
            ck_path = _write_checkpoint(
                outd, cfg, {"r": r, "path": _fmt_path(res.resume_path), "candidates": res.candidates}
            )
            print(f"checkpoint -> {ck_path}")
            return 2
        if remaining is not None:
            remaining = max(remaining - res.candidates, 1)
        cert = fu_certificate(res)
        tag = "cover" if res.kind == "all-colorings-ok" else "counterexample"
        path = outd / f"fu-r{r}-s{s}-k{k}-{tag}.txt"
        path.write_text(render_certificate(cert))
        label = (
            "every coloring contains a monochromatic family"
            if tag == "cover"
            else "counterexample"
        )
        print(f"fu r={r} s={s} k={k}: {label} -> {path}")
        if res.kind == "all-colorings-ok":
            if single is None:
                print(f"minimal r = {r}")
            return 0
    if single is None:
        print(f"no universal r found up to r_limit {cfg.values['r_limit']}")
    return 0


def _run_fk(cfg, resume_file) -> int:
    if resume_file is not None:
        raise ValueError("fk-density runs are not resumable; raise the budget and rerun")
    r, N = cfg.values["r"], cfg.values["N"]
    res = fk_density_experiment(r, N, budget=_resolve_budget(cfg))
    if res.status == "budget_exceeded":
        print(f"fk r={r} N={N}: budget exceeded after {res.candidates} candidates")
        ck_path = _write_checkpoint(_out_dir(cfg), cfg, {"candidates": res.candidates})
        print(f"checkpoint -> {ck_path}")
        return 2
    print(f"fk r={r} N={N}: minimum blocking density {render_fraction(res.value)}")
    print(f"witness: {render_family(res.witness)}")
    if r == 2:
        _A, dens, valid = fk_odds_certificate(N)
        print(
            f"even-blocker certificate: density {render_fraction(dens)}, "
            f"complement sum-free: {'true' if valid else 'false'}"
        )
    return 0


def _run_example_a(cfg, resume_file) -> int:
    if resume_file is not None:
        raise ValueError("example-a does not support --resume")
    ex = example_a(cfg.values["r_max"])
    for r, vals in ex.blocks:
        print(f"block {r}: " + " ".join(str(v) for v in vals))
    for name, ok in example_a_checks(ex).items():
        print(f"{name}: {'pass' if ok else 'fail'}")
    return 0


def _print_recurrence_summary(sys_, rep):
    print(f"system: {describe_system(sys_)}")
    print(f"phi: {rep.phi.describe()}")
    print(f"mu(B) = {render_fraction(rep.mu)}")
    print(f"threshold = {render_fraction(rep.threshold)}")
    print(f"R: {len(rep.R.members)} of {len(rep.elements)} window elements")


def _run_recurrence(cfg, resume_file) -> int:
    if resume_file is not None:
        raise ValueError("recurrence does not support --resume")
    sys_, B, phi, eps, window = _experiment_inputs(cfg)
    rep = recurrence_set(sys_, B, phi, eps, window)
    _print_recurrence_summary(sys_, rep)
    outd = _out_dir(cfg)
    if cfg.values["format"] == "csv":
        path = outd / "recurrence.csv"
        path.write_text(render_recurrence_csv(rep, generated=_now()))
    else:
        path = outd / "recurrence.json"
        path.write_text(render_report_json(report_tree(rep, generated=_now())))
    print(f"wrote {path}")
    return 0


def _run_classify(cfg, resume_file) -> int:
    sys_, B, phi, eps, window = _experiment_inputs(cfg)
    resume = None
    if resume_file is not None:
        ck = _load_checkpoint(resume_file, cfg)
        resume = (int(ck["r"]), int(ck["index"]))
        print(f"resumed at r={ck['r']}")
    rep = recurrence_set(sys_, B, phi, eps, window)
    rep = classify_ipstar(
        rep,
        cfg.values["r_max"],
        density_N=cfg.values["density_N"],
        budget=_resolve_budget(cfg),
        workers=_workers(cfg),
        resume=resume,
    )
    _print_recurrence_summary(sys_, rep)
    stalled = None
    for r in sorted(rep.classification):
        v = rep.classification[r]
        note = " (window-limited)" if v.window_limited else ""
        if v.kind == "holds":
            print(f"r={r}: holds{note}")
        elif v.kind == "fails":
            w = ",".join(render_element(rep.domain, g) for g in v.witness)
            print(f"r={r}: fails{note} witness={w}")
        else:
            print(f"r={r}: budget exceeded after {v.candidates} candidates")
            stalled = (r, v.resume_index)
    outd = _out_dir(cfg)
    path = outd / "classify.json"
    path.write_text(render_report_json(report_tree(rep, generated=_now())))
    print(f"wrote {path}")
    if stalled is not None:
        ck_path = _write_checkpoint(outd, cfg, {"r": stalled[0], "index": stalled[1]})
        print(f"checkpoint -> {ck_path}")
        return 2
    return 0


def _run_search(cfg, resume_file) -> int:
    if resume_file is not None:
        raise ValueError("search does not support --resume")
    sys_, events = _load_system(cfg)
    ring = _domain_ring(sys_)
    if not isinstance(sys_, (FinitePermSystem, RotationSystem)):
        raise ValueError("constructive search needs a compact backend (finite-perm or rotation)")
    if isinstance(sys_, RotationSystem):
        x = _resolve(cfg, "x", parse_fraction)
    else:
        name = cfg.values["x"]
        if name not in events:
            known = ", ".join(sorted(events)) or "none"
            raise ValueError(f"system file defines no set named {name!r} (sets: {known})")
        x = events[name]
    m = _resolve(cfg, "m", lambda t: parse_monomial(ring, t))
    gens = _resolve(cfg, "gens", lambda t: _parse_gens(ring, m.n, t))
    res = isometric_recurrence_search(
        sys_, x, m, cfg.values["epsilon"], gens, workers=_workers(cfg)
    )
    print(f"status: {res.status}")
    print(f"words scanned: {res.words_scanned}")
    print(f"proof bound: {res.proof_bound}")
    print("cells: " + ",".join(str(c) for c in res.cells))
    if res.found:
        domain = ring if m.n == 1 else VectorSpace(ring, m.n)
        print(f"gamma: {render_family(res.gamma)}")
        print(f"u_gamma: {render_element(domain, res.u_gamma)}")
        # scalar monomials give scalar exponents, whatever the acting group
        print("exponents: " + ",".join(render_element(ring, e) for e in res.exponents))
        print(f"distance_sq: {render_fraction(res.distance_sq)}")
        print(f"config: {render_subset_config(res.config)}")
        if res.sufficient_length is not None:
            print(f"sufficient length: {res.sufficient_length}")
    return 0


def _run_density(cfg, resume_file) -> int:
    if resume_file is not None:
        raise ValueError("density does not support --resume")
    sys_, events = _load_system(cfg)
    B = _named_event(cfg, events)
    ring = _domain_ring(sys_)
    phi = _resolve(cfg, "phi", lambda t: parse_poly_map(ring, sys_.acting, t))
    N = cfg.values["N"]
    print(f"dlim over N=1..{N}")
    for n in range(1, N + 1):
        print(f"N={n}: {render_fraction(dlim_probe(sys_, B, phi, n))}")
    return 0


def _run_probe(cfg, resume_file) -> int:
    if resume_file is not None:
        raise ValueError("probe does not support --resume")
    sys_, B, phi, eps, window = _experiment_inputs(cfg)
    rep = recurrence_set(sys_, B, phi, eps, window)
    ring = rep.domain
    if isinstance(ring, VectorSpace):
        raise ValueError("finite products need a one-variable map (the domain is a vector group)")
    gens = _resolve(cfg, "gens", lambda t: _parse_gens(ring, 1, t))
    out = fp_probe(rep, gens)
    print("products: " + ",".join(render_element(ring, v) for v in out.products))
    print("witnesses: " + ",".join(render_element(ring, v) for v in out.witnesses))
    print(f"intersects: {'true' if out.intersects else 'false'}")
    return 0


_RUNNERS = {
    "hj": _run_hj,
    "fu-ramsey": _run_fu,
    "fk-density": _run_fk,
    "example-a": _run_example_a,
    "recurrence": _run_recurrence,
    "classify": _run_classify,
    "search": _run_search,
    "density": _run_density,
    "probe": _run_probe,
}

_HELP = {
    "hj": "least word length forcing a monochromatic line",
    "fu-ramsey": "universal-coloring claim for finite-union families",
    "fk-density": "minimum blocking density over {1..N}",
    "example-a": "the doubly-exponential block set and its checks",
    "recurrence": "compute a return set and emit the per-element table",
    "classify": "return set plus dual-family classification report",
    "search": "cover-and-color search for a recurrent finite union",
    "density": "Cesaro decay of the non-compact correlation part",
    "probe": "finite-products intersection probe of a return set",
}


# ---------------------------------------------------------------------------
# entry


def _emit_errors(errors) -> None:
    for e in errors:
        print(f"error: {e}", file=sys.stderr)
    record = {"errors": [{"line": e.line, "message": e.message} for e in errors]}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def _run_check(path: str) -> int:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        _emit_errors([ConfigError(None, f"cannot read certificate {path!r}: {exc.strerror or exc}")])
        return 1
    try:
        cert = parse_certificate(text)
    except TextFormatError as exc:
        _emit_errors([ConfigError(None, f"certificate {path!r}: {exc}")])
        return 1
    desc = cert.kind + " " + " ".join(f"{n}={v}" for n, v in cert.params)
    if check_certificate(cert):
        print(f"certificate valid: {desc}")
        return 0
    print(f"certificate INVALID: {desc}")
    return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ipstar",
        description="exact finite-sums structure, coloring claims, and return sets",
    )
    parser.add_argument(
        "--check",
        metavar="CERT",
        help="re-validate a certificate file through verification-only paths",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name, help_text in _HELP.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("-c", "--config", help="experiment config file")
        sp.add_argument("--resume", metavar="CKPT", help="resume from a checkpoint file")
        sp.add_argument(
            "overrides", nargs="*", metavar="key=value", help="override config entries"
        )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.check is not None:
        return _run_check(args.check)
    if args.command is None:
        _emit_errors([ConfigError(None, "no command given (see ipstar --help)")])
        return 1
    text = ""
    if args.config is not None:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            _emit_errors(
                [ConfigError(None, f"cannot read config {args.config!r}: {exc.strerror or exc}")]
            )
            return 1
    cfg, errors = parse_config(text, command=args.command, overrides=args.overrides)
    if errors:
        _emit_errors(errors)
        return 1
    try:
        rc = _RUNNERS[cfg.command](cfg, args.resume)
    except ValueError as exc:
        _emit_errors([ConfigError(None, str(exc))])
        return 1
    if rc == 0 and args.resume is not None:
        Path(args.resume).unlink(missing_ok=True)  # consumed
    return rc


if __name__ == "__main__":
    raise SystemExit(main())

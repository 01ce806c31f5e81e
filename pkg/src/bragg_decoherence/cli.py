"""Command-line front end.

Exit codes: 0 success, 2 configuration or usage error, 3 numerical-domain error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import amplitudes, decoherence, density, oracle
from .density import BeamSet
from .io import (ConfigError, ResultRecord, RunConfig, dumps_csv, dumps_json, load_config,
                 matrix_to_list, parse_config, write_text)
from .sample import AtomWavefunction, SampleState, cm_state_from_lattice, linear_chain

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN = 0, 2, 3

DOMAIN_ERRORS = (decoherence.AlreadyDecohered, density.DegenerateNormalization,
                 density.DensityMatrixError, oracle.QuadratureError)


def build_rho(cfg: RunConfig, drift_time: float | None = None) -> density.DensityMatrix:
    state = cfg.state
    t = cfg.drift_time if drift_time is None else drift_time
    if t:
        state = decoherence.drifted(state, t)
    if cfg.lattice is not None:
        return density.build_rho_asymptotic(state, cfg.lattice, cfg.wavefunction, cfg.beams)
    f = cfg.amplitudes if cfg.amplitudes is not None else np.ones(cfg.beams.d)
    return density.rho_from_amplitudes(state, cfg.beams, f)


def tau_per_beam(cfg: RunConfig) -> list[dict]:
    rows = []
    for q in cfg.beams.transfers:
        qn = float(np.linalg.norm(q))
        try:
            rows.append({"q_per_nm": qn, "tau_s": decoherence.decoherence_time(cfg.state, qn),
                         "status": "ok"})
        except ValueError:  # already decohered, or sigma0 = 0 (never decoheres)
            rows.append({"q_per_nm": qn, "tau_s": None, "status": "undefined"})
    return rows


def cmd_rho(cfg: RunConfig, entropy_base: str | None = None,
            drift_time: float | None = None) -> ResultRecord:
    """Build the density matrix of a config and summarize it."""
    base = entropy_base or cfg.entropy_base
    rho = build_rho(cfg, drift_time)
    t = cfg.drift_time if drift_time is None else drift_time
    sigma0 = decoherence.dispersed_sigma0(cfg.state, t) if t else cfg.state.sigma0
    contrast = None
    if rho.d == 2:
        dq = rho.basis.transfers[0] - rho.basis.transfers[1]
        contrast = density.fringe_contrast(rho, dq)
    inputs = dict(cfg.raw)
    if drift_time is not None:
        inputs["drift_time_s"] = drift_time
    if entropy_base is not None:
        inputs["entropy_base"] = entropy_base
    return ResultRecord(
        inputs=inputs,
        sigma0_pm=float(sigma0),
        purity=density.purity(rho),
        entropy=density.von_neumann_entropy(rho, base),
        entropy_base=base,
        contrast=contrast,
        tau_per_beam=tau_per_beam(cfg),
        matrix=matrix_to_list(rho.gamma),
    )


def cmd_tau(masses=None, sigma0s=None, qs=None, benchmark=False, cfg: RunConfig | None = None):
    if benchmark:
        return decoherence.benchmark_tau_rows()
    if cfg is not None:
        masses = masses or [cfg.state.total_mass]
        sigma0s = sigma0s or [cfg.state.sigma0]
        qs = qs or sorted({float(np.linalg.norm(q)) for q in cfg.beams.transfers})
    if not masses or not sigma0s or not qs:
        raise ConfigError("tau: need non-empty --masses, --sigma0s and --qs (or --benchmark / --config)")
    return decoherence.sweep_tau(masses, sigma0s, qs)


def intensity_direction(cfg: RunConfig) -> np.ndarray:
    qs = cfg.beams.transfers
    g = qs[0] - qs[1] if len(qs) >= 2 else qs[0]
    return g / np.linalg.norm(g)


def cmd_intensity(cfg: RunConfig, r_min=None, r_max=None, samples=201, drift_time=None,
                  contrast=False):
    """Intensity profile along the fringe direction; returns ``(r, I, contrast | None)``."""
    if samples < 2:
        raise ConfigError("intensity: --samples must be >= 2")
    rho = build_rho(cfg, drift_time)
    u = intensity_direction(cfg)
    c = None
    if contrast:
        if rho.d != 2:
            raise ConfigError(f"intensity: contrast needs a two-beam basis, got {rho.d} beams")
        c = density.fringe_contrast(rho, u)
    if r_min is None:
        r_min = 0.0
    if r_max is None:
        r_max = density.fringe_period(rho, u) if rho.d == 2 else 1.0
    r = np.linspace(r_min, r_max, samples)
    return r, density.intensity(rho, r[:, None] * u), c


def make_wavefunction(kind: str, width_pm: float) -> AtomWavefunction:
    return AtomWavefunction(kind, width_pm)


def cmd_clt(kind="box", n_list=(1, 2, 4, 8), k_sigma=1.0, width_pm=10.0):
    wf = make_wavefunction(kind, width_pm)
    return oracle.clt_convergence(wf, n_list, k_sigma, max_atoms=max(max(n_list), oracle.MAX_ATOMS))


def cmd_oracle_compare(n_values=(1, 2, 4), qs=(-10.0, 10.0, 20.0), sigma_pm=5.0, spacing_nm=0.2):
    """Oracle against both closed forms for Gaussian chains.

    Returns rows ``(n, sigma0_pm, frob_vs_asymptotic, frob_vs_gaussian_exact)``.
    """
    wf = AtomWavefunction.gaussian(sigma_pm)
    beams = BeamSet.along_z(qs)
    rows = []
    for n in n_values:
        lat = linear_chain(int(n), spacing_nm)
        state = cm_state_from_lattice(lat, wf)
        ps = oracle.ProductState.from_lattice(lat, wf)
        g_oracle = oracle.build_rho_oracle(ps, beams).gamma
        g_asym = density.build_rho_asymptotic(state, lat, wf, beams).gamma
        g_exact = density.build_rho_gaussian_exact(lat, wf, beams).gamma
        rows.append((int(n), state.sigma0, float(np.linalg.norm(g_oracle - g_asym)),
                     float(np.linalg.norm(g_oracle - g_exact))))
    return rows


ORACLE_HEADER = ("n", "sigma0_pm", "frobenius_vs_asymptotic", "frobenius_vs_gaussian_exact")


def cmd_report(outdir) -> list[Path]:
    """Reproduce the headline numbers as CSV tables with matching figures."""
    from . import plotting

    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name, text):
        p = out / name
        write_text(text, p)
        written.append(p)

    rows = decoherence.benchmark_tau_rows()
    emit("tau_benchmark.csv", dumps_csv(decoherence.TauRow.CSV_HEADER,
                                    [tuple(vars(r).values()) for r in rows]))
    sweep = decoherence.sweep_tau(np.logspace(2, 10, 17), [decoherence.BENCHMARK_SIGMA0_PM],
                                  [decoherence.BENCHMARK_Q_PER_NM])
    plotting.plot_tau(sweep, out / "tau_vs_mass.png")
    written.append(out / "tau_vs_mass.png")

    g = decoherence.BENCHMARK_Q_PER_NM
    x = np.linspace(0.0, 2.0, 41)
    table = []
    for xi in x:
        sigma0 = math.sqrt(xi) / g * 1e3  # pm
        rho = density.rho_from_amplitudes(SampleState(np.zeros(3), sigma0, 720.0),
                                          BeamSet.two_beam([0, 0, g]), [1.0, 1.0])
        table.append((xi, sigma0, density.purity(rho), density.von_neumann_entropy(rho),
                      density.fringe_contrast(rho, [0, 0, 1])))
    emit("two_beam.csv", dumps_csv(("g2_sigma0_2", "sigma0_pm", "purity", "entropy_nats", "contrast"),
                                   table))
    arr = np.array(table)
    plotting.plot_two_beam(arr[:, 0], arr[:, 2], arr[:, 3], arr[:, 4], out / "two_beam.png")
    written.append(out / "two_beam.png")

    profiles = []
    for t in (0.0, 1e-12, 3.4e-12, 1e-11):
        cfg = parse_config(benchmark_two_beam_config(drift_time=t))
        r, inten, _ = cmd_intensity(cfg, samples=201)
        profiles.append((t, r, inten))
    emit("intensity.csv", dumps_csv(("drift_time_s", "r_nm", "intensity"),
                                    [(t, ri, ii) for t, r, inten in profiles for ri, ii in zip(r, inten)]))
    for t, r, inten in profiles:
        name = f"intensity_t{t:.1e}s.png".replace("+", "")
        plotting.plot_intensity(r, inten, out / name, title=f"drift {t:g} s, C60")
        written.append(out / name)

    clt_rows = cmd_clt("box", (1, 2, 4, 8), 1.0)
    emit("clt_box.csv", dumps_csv(oracle.CLTRow.CSV_HEADER, [tuple(vars(r).values()) for r in clt_rows]))
    plotting.plot_clt(clt_rows, out / "clt_box.png", label="box atoms, $k\\sigma_0 = 1$")
    written.append(out / "clt_box.png")

    emit("oracle_compare.csv", dumps_csv(ORACLE_HEADER, cmd_oracle_compare()))
    return written


def benchmark_two_beam_config(sigma0_pm=3.0, g_per_nm=10.0, mass_amu=720.0, drift_time=None) -> dict:
    cfg = {
        "version": 1,
        "sample": {"state": {"sigma0_pm": sigma0_pm, "total_mass_amu": mass_amu,
                             "cm_mean_nm": [0.0, 0.0, 0.0]}},
        "beams": {"transfers_per_nm": [[0.0, 0.0, -g_per_nm], [0.0, 0.0, g_per_nm]]},
    }
    if drift_time:
        cfg["drift_time_s"] = drift_time
    return cfg


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bragg-decoherence",
                                description="Entanglement-induced decoherence in elastic electron scattering.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=False):
        sp.add_argument("--config", required=config_required, help="JSON run configuration")
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), help="output encoding")

    sp = sub.add_parser("rho", help="build the density matrix and report purity/entropy/contrast")
    common(sp, config_required=True)
    sp.add_argument("--entropy-base", choices=("nats", "bits"))
    sp.add_argument("--drift-time", type=float, help="free CM dispersion time in seconds")

    sp = sub.add_parser("tau", help="decoherence-time sweep")
    common(sp)
    sp.add_argument("--benchmark", action="store_true", help="the three benchmark scatterers")
    sp.add_argument("--masses", type=float, nargs="+", help="amu")
    sp.add_argument("--sigma0s", type=float, nargs="+", help="pm")
    sp.add_argument("--qs", type=float, nargs="+", help="nm^-1")
    sp.add_argument("--figure", help="also render tau vs mass to this image file")

    sp = sub.add_parser("intensity", help="real-space intensity profile along the fringe direction")
    common(sp, config_required=True)
    sp.add_argument("--r-min", type=float, help="nm")
    sp.add_argument("--r-max", type=float, help="nm (default: one fringe period)")
    sp.add_argument("--samples", type=int, default=201)
    sp.add_argument("--drift-time", type=float)
    sp.add_argument("--contrast", action="store_true", help="also report the fringe contrast")
    sp.add_argument("--figure")

    sp = sub.add_parser("clt", help="CM characteristic-function convergence to the Gaussian limit")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("csv", "json"))
    sp.add_argument("--wf", choices=("box", "triangle", "gaussian"), default="box")
    sp.add_argument("--width-pm", type=float, default=10.0)
    sp.add_argument("--n", type=int, nargs="+", default=[1, 2, 4, 8])
    sp.add_argument("--k-sigma", type=float, default=1.0, help="fixed k * sigma0")
    sp.add_argument("--figure")

    sp = sub.add_parser("oracle-compare", help="quadrature oracle versus the closed forms")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("csv", "json"))
    sp.add_argument("--n", type=int, nargs="+", default=[1, 2, 4])
    sp.add_argument("--qs", type=float, nargs="+", default=[-10.0, 10.0, 20.0], help="nm^-1 along z")
    sp.add_argument("--sigma-pm", type=float, default=5.0, help="single-atom density std")

    sp = sub.add_parser("report", help="write benchmark tables and figures to a directory")
    sp.add_argument("--outdir", required=True)
    return p


def _emit_table(header, rows, args, default="csv"):
    fmt = args.format or default
    if fmt == "json":
        text = dumps_json([dict(zip(header, r)) for r in rows])
    else:
        text = dumps_csv(header, rows)
    write_text(text, args.out)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, density.UnsupportedBasis) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DOMAIN_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, amplitudes.ForwardBeamError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _dispatch(args) -> int:
    cfg = load_config(args.config) if getattr(args, "config", None) else None

    if args.command == "rho":
        rec = cmd_rho(cfg, args.entropy_base, args.drift_time)
        fmt = args.format or cfg.output_format
        out = args.out or cfg.output_path
        if fmt == "json":
            write_text(dumps_json(rec.to_dict()), out)
        else:
            write_text(dumps_csv(ResultRecord.CSV_HEADER, [rec.csv_row()]), out)
        return EXIT_OK

    if args.command == "tau":
        rows = cmd_tau(args.masses, args.sigma0s, args.qs, args.benchmark, cfg)
        _emit_table(decoherence.TauRow.CSV_HEADER, [tuple(vars(r).values()) for r in rows], args)
        if args.figure:
            from .plotting import plot_tau

            plot_tau(rows, args.figure)
        return EXIT_OK

    if args.command == "intensity":
        r, inten, c = cmd_intensity(cfg, args.r_min, args.r_max, args.samples, args.drift_time,
                                    args.contrast)
        _emit_table(("r_nm", "intensity"), list(zip(r, inten)), args)
        if c is not None:
            print(f"contrast: {c!r}", file=sys.stderr)
        if args.figure:
            from .plotting import plot_intensity

            plot_intensity(r, inten, args.figure)
        return EXIT_OK

    if args.command == "clt":
        if args.wf == "gaussian":
            print("note: Gaussian atoms are exactly Gaussian at every n; deviations are zero "
                  "up to rounding", file=sys.stderr)
        rows = cmd_clt(args.wf, args.n, args.k_sigma, args.width_pm)
        _emit_table(oracle.CLTRow.CSV_HEADER, [tuple(vars(r).values()) for r in rows], args)
        if args.figure:
            from .plotting import plot_clt

            plot_clt(rows, args.figure, label=f"{args.wf} atoms")
        return EXIT_OK

    if args.command == "oracle-compare":
        rows = cmd_oracle_compare(args.n, args.qs, args.sigma_pm)
        _emit_table(ORACLE_HEADER, rows, args)
        print(f"max deviation vs asymptotic form: {max(r[2] for r in rows):.3e}; "
              f"vs exact Gaussian form: {max(r[3] for r in rows):.3e}", file=sys.stderr)
        return EXIT_OK

    if args.command == "report":
        for p in cmd_report(args.outdir):
            print(p)
        return EXIT_OK
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())

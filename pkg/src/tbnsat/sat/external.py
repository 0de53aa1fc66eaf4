"""Adapter for external DIMACS solvers speaking the SAT-competition protocol."""
from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import time

import numpy as np

from .solver import SolveOutcome, SolverError, Verdict, check_model


class ExternalSolverError(SolverError):
    def __init__(self, msg: str, stdout: str = "", stderr: str = "", returncode: int | None = None):
        super().__init__(msg)
        self.stdout = stdout
        self.stderr = stderr
        self.returncode = returncode


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    """Parse DIMACS CNF text into (num_vars, clauses)."""
    nvars = None
    clauses, cur = [], []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {line!r}")
            nvars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(lit)
    if cur:
        clauses.append(cur)
    if nvars is None:
        nvars = max((abs(l) for c in clauses for l in c), default=0)
    return nvars, clauses


def parse_competition_output(stdout: str, num_vars: int) -> tuple[Verdict, np.ndarray | None]:
    status = None
    values: list[int] = []
    for line in stdout.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word == "SATISFIABLE":
                status = Verdict.SAT
            elif word == "UNSATISFIABLE":
                status = Verdict.UNSAT
            elif word == "UNKNOWN":
                status = Verdict.UNKNOWN
            else:
                raise ValueError(f"unrecognised status line {line!r}")
        elif line.startswith("v "):
            values.extend(int(t) for t in line[2:].split())
    if status is None:
        raise ValueError("no 's' status line in solver output")
    if status is not Verdict.SAT:
        return status, None
    model = np.zeros(num_vars + 1, dtype=bool)
    for lit in values:
        if lit == 0:
            continue
        if abs(lit) > num_vars:
            raise ValueError(f"model literal {lit} exceeds variable count {num_vars}")
        model[abs(lit)] = lit > 0
    return status, model


def _csr(clauses):
    flat = np.fromiter((l for c in clauses for l in c), dtype=np.int64)
    offsets = np.zeros(len(clauses) + 1, dtype=np.int64)
    np.cumsum([len(c) for c in clauses], out=offsets[1:])
    return flat, offsets


def solve_external(dimacs: str, solver_cmd: str, timeout: float | None = None) -> SolveOutcome:
    """Run ``solver_cmd`` (a template containing ``{file}``) on ``dimacs`` text.

    The returned model is re-checked against the clauses before SAT is
    reported.
    """
    if "{file}" not in solver_cmd:
        raise ValueError("solver command template must contain a {file} placeholder")
    nvars, clauses = parse_dimacs(dimacs)
    fd, path = tempfile.mkstemp(suffix=".cnf", prefix="tbnsat-")
    t0 = time.perf_counter()
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(dimacs)
        argv = [a.replace("{file}", path) for a in shlex.split(solver_cmd)]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        except FileNotFoundError as exc:
            raise ExternalSolverError(f"solver executable not found: {argv[0]}") from exc
        except subprocess.TimeoutExpired:
            return SolveOutcome(Verdict.UNKNOWN, None, {"time": time.perf_counter() - t0})
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass

    if proc.returncode not in (0, 10, 20):
        raise ExternalSolverError(f"solver exited with status {proc.returncode}",
                                  proc.stdout, proc.stderr, proc.returncode)
    try:
        verdict, model = parse_competition_output(proc.stdout, nvars)
    except ValueError as exc:
        raise ExternalSolverError(f"unparseable solver output: {exc}",
                                  proc.stdout, proc.stderr, proc.returncode) from exc
    if (verdict is Verdict.SAT and proc.returncode == 20) or (verdict is Verdict.UNSAT and proc.returncode == 10):
        raise ExternalSolverError("exit code contradicts status line", proc.stdout, proc.stderr, proc.returncode)
    if verdict is Verdict.SAT:
        flat, offsets = _csr(clauses)
        if not check_model(flat, offsets, model):
            raise ExternalSolverError("external solver model fails verification",
                                      proc.stdout, proc.stderr, proc.returncode)
    return SolveOutcome(verdict, model, {"time": time.perf_counter() - t0, "returncode": proc.returncode})

"""
Dense two-phase simplex for small standard-form programs.

Programs have the form `minimize c.x subject to A x = b, x >= 0`. Pivoting follows
Bland's rule (lowest entering index, lowest leaving basis index on ratio ties),
which rules out cycling on the heavily degenerate membership programs.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from sdi_lab.enums import LinearProgramStatus
from sdi_lab.errors import DimensionMismatchError, SolverStall
from sdi_lab.lab_types import FloatArray
from sdi_lab.lazy_logger import LazyLogger

__all__ = ("LinearProgramResult", "SimplexSolver")


@dataclass(frozen=True, eq=False)
class LinearProgramResult:
    """
    Outcome of a `SimplexSolver` run.

    Arguments:
        status -- Termination status.
        x -- Primal point. For infeasible programs, the phase one point.
        objective -- `c.x` at the optimum, `nan` unless optimal.
        infeasibility -- Phase one optimum, the L1 norm of the residual `b - A x`.
        duals -- Phase one dual vector `y` in the orientation of the original rows.
            If the program is infeasible, `y.A <= 0` column-wise and `y.b > 0`.
        iterations -- Number of pivots over both phases.
    """

    status: LinearProgramStatus
    x: FloatArray
    objective: float
    infeasibility: float
    duals: FloatArray
    iterations: int

    @property
    def is_optimal(self) -> bool:
        return self.status is LinearProgramStatus.OPTIMAL


class SimplexSolver(LazyLogger):
    """
    Two-phase dense tableau simplex.

    ```python
    solver = SimplexSolver()
    result = solver.minimize(c=[-1, 0], A_eq=[[1, 1]], b_eq=[1])
    result.x  # array([1., 0.])
    ```

    Arguments:
        max_iterations -- Pivot cap, `SolverStall` is raised beyond it.
        feasibility_tolerance -- Phase one optimum below this value means feasible.
        logger -- `logging.Logger` instance.
    """

    MAX_ITERATIONS = 10 ** 6
    PIVOT_TOLERANCE = 1e-9
    FEASIBILITY_TOLERANCE = 1e-9

    def __init__(
        self,
        max_iterations: Optional[int] = None,
        feasibility_tolerance: Optional[float] = None,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        self._lazy_logger = logger
        self.max_iterations = max_iterations or self.MAX_ITERATIONS
        self.feasibility_tolerance = (
            self.FEASIBILITY_TOLERANCE if feasibility_tolerance is None else feasibility_tolerance
        )
        self._iterations = 0

    @staticmethod
    def _as_program(A_eq: FloatArray, b_eq: FloatArray) -> Tuple[FloatArray, FloatArray]:
        matrix = np.atleast_2d(np.asarray(A_eq, dtype=float))
        rhs = np.asarray(b_eq, dtype=float).ravel()
        if matrix.shape[0] != rhs.shape[0]:
            raise DimensionMismatchError(
                f"Constraint matrix has {matrix.shape[0]} rows, right hand side has {rhs.shape[0]}"
            )
        return matrix, rhs

    def _pivot(self, tableau: FloatArray, row: int, column: int) -> None:
        tableau[row] /= tableau[row, column]
        factors = tableau[:, column].copy()
        factors[row] = 0.0
        tableau -= np.outer(factors, tableau[row])
        rhs = tableau[:-1, -1]
        rhs[(rhs < 0.0) & (rhs > -self.PIVOT_TOLERANCE)] = 0.0

    def _iterate(self, tableau: FloatArray, basis: List[int], allowed: int) -> LinearProgramStatus:
        tol = self.PIVOT_TOLERANCE
        while True:
            entering = np.flatnonzero(tableau[-1, :allowed] < -tol)
            if not entering.size:
                return LinearProgramStatus.OPTIMAL

            column = int(entering[0])
            column_values = tableau[:-1, column]
            rows = np.flatnonzero(column_values > tol)
            if not rows.size:
                return LinearProgramStatus.UNBOUNDED

            ratios = tableau[rows, -1] / column_values[rows]
            ties = rows[ratios <= ratios.min() + tol]
            row = int(min(ties, key=lambda i: basis[i]))

            self._pivot(tableau, row, column)
            basis[row] = column
            self._iterations += 1
            if self._iterations > self.max_iterations:
                raise SolverStall(
                    f"Simplex exceeded {self.max_iterations} iterations",
                    {"rows": tableau.shape[0] - 1, "columns": tableau.shape[1] - 1},
                )

    def _phase_one(
        self, matrix: FloatArray, rhs: FloatArray
    ) -> Tuple[FloatArray, List[int], float, FloatArray]:
        rows, columns = matrix.shape
        signs = np.where(rhs < 0.0, -1.0, 1.0)
        tableau = np.zeros((rows + 1, columns + rows + 1))
        tableau[:rows, :columns] = matrix * signs[:, None]
        tableau[:rows, columns : columns + rows] = np.eye(rows)
        tableau[:rows, -1] = rhs * signs
        tableau[rows, :columns] = -tableau[:rows, :columns].sum(axis=0)
        tableau[rows, -1] = -tableau[:rows, -1].sum()
        basis = list(range(columns, columns + rows))

        self._iterate(tableau, basis, columns + rows)
        infeasibility = max(0.0, float(-tableau[rows, -1]))
        # reduced cost of artificial k is 1 - y_k
        duals = signs * (1.0 - tableau[rows, columns : columns + rows])
        self._logger.debug(
            f"Phase one finished after {self._iterations} pivots, infeasibility {infeasibility:.3g}"
        )
        return tableau, basis, infeasibility, duals

    @staticmethod
    def _primal(tableau: FloatArray, basis: List[int], columns: int) -> FloatArray:
        x = np.zeros(columns)
        for row, variable in enumerate(basis):
            if variable < columns:
                x[variable] = max(0.0, tableau[row, -1])
        return x

    def find_feasible(self, A_eq: FloatArray, b_eq: FloatArray) -> LinearProgramResult:
        """
        Run phase one only.

        Arguments:
            A_eq -- Constraint matrix.
            b_eq -- Right hand side.

        Returns:
            Result with status `OPTIMAL` if a feasible point was found,
            `INFEASIBLE` otherwise. Duals are always set.
        """
        matrix, rhs = self._as_program(A_eq, b_eq)
        self._iterations = 0
        tableau, basis, infeasibility, duals = self._phase_one(matrix, rhs)
        status = (
            LinearProgramStatus.OPTIMAL
            if infeasibility <= self.feasibility_tolerance
            else LinearProgramStatus.INFEASIBLE
        )
        return LinearProgramResult(
            status=status,
            x=self._primal(tableau, basis, matrix.shape[1]),
            objective=0.0 if status is LinearProgramStatus.OPTIMAL else float("nan"),
            infeasibility=infeasibility,
            duals=duals,
            iterations=self._iterations,
        )

    def minimize(self, c: FloatArray, A_eq: FloatArray, b_eq: FloatArray) -> LinearProgramResult:
        """
        Minimize `c.x` subject to `A_eq x = b_eq`, `x >= 0`.

        Arguments:
            c -- Cost vector.
            A_eq -- Constraint matrix.
            b_eq -- Right hand side.

        Returns:
            Result with the optimal point, or status `INFEASIBLE`/`UNBOUNDED`.
        """
        matrix, rhs = self._as_program(A_eq, b_eq)
        cost = np.asarray(c, dtype=float).ravel()
        rows, columns = matrix.shape
        if cost.shape[0] != columns:
            raise DimensionMismatchError(
                f"Cost vector has {cost.shape[0]} entries, program has {columns} variables"
            )

        self._iterations = 0
        tableau, basis, infeasibility, duals = self._phase_one(matrix, rhs)
        if infeasibility > self.feasibility_tolerance:
            self._logger.debug(f"Program is infeasible, residual {infeasibility:.3g}")
            return LinearProgramResult(
                status=LinearProgramStatus.INFEASIBLE,
                x=self._primal(tableau, basis, columns),
                objective=float("nan"),
                infeasibility=infeasibility,
                duals=duals,
                iterations=self._iterations,
            )

        # drive artificial variables out of the basis, drop redundant rows
        kept_rows: List[int] = []
        for row in range(rows):
            if basis[row] >= columns:
                candidates = np.flatnonzero(np.abs(tableau[row, :columns]) > self.PIVOT_TOLERANCE)
                if not candidates.size:
                    continue
                self._pivot(tableau, row, int(candidates[0]))
                basis[row] = int(candidates[0])
            kept_rows.append(row)

        phase_two = np.zeros((len(kept_rows) + 1, columns + 1))
        phase_two[:-1, :columns] = tableau[kept_rows, :columns]
        phase_two[:-1, -1] = tableau[kept_rows, -1]
        phase_two_basis = [basis[row] for row in kept_rows]
        basic_costs = cost[phase_two_basis]
        phase_two[-1, :columns] = cost - basic_costs @ phase_two[:-1, :columns]
        phase_two[-1, -1] = -basic_costs @ phase_two[:-1, -1]

        status = self._iterate(phase_two, phase_two_basis, columns)
        x = self._primal(phase_two, phase_two_basis, columns)
        objective = float(cost @ x) if status is LinearProgramStatus.OPTIMAL else float("nan")
        self._logger.debug(f"Phase two finished: {status.value} after {self._iterations} pivots")
        return LinearProgramResult(
            status=status,
            x=x,
            objective=objective,
            infeasibility=infeasibility,
            duals=duals,
            iterations=self._iterations,
        )

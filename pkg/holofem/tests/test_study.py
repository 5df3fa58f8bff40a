import json
import logging
import math
from unittest.mock import patch

import pytest

from holofem import study
from holofem.base import AmbiguousTargetError, InvalidArgument
from holofem.mesh import UNIT_SQUARE
from holofem.sim.boxes import EigenvalueEstimate
from holofem.sim.search import SearchResult
from holofem.study import (
    ConvergenceRecord,
    convergence_study,
    exact_eigenfunction,
    exact_eigenvalue,
    exact_spectrum,
    format_records,
    rate_slope,
    search_window,
)

PI2 = math.pi**2

#: smallest discrete eigenvalue of the unit square, n = 10, 20, 40, one diagonal per cell
DIAGONAL_VALUES = (20.228426522815454, 19.8611, 19.7697)
#: the same with both diagonals in every cell
CRISSCROSS_VALUES = (19.875105, 19.773069, 19.747667)

RECORDS = [
    ConvergenceRecord(10, 0.1, 19.928, 0.18879, None),
    ConvergenceRecord(20, 0.05, 19.787, 0.04779, 1.982),
]


class TestExactSolutions:
    def test_unit_square(self):
        assert exact_eigenvalue(UNIT_SQUARE, 1, 1) == pytest.approx(2 * PI2)
        assert exact_eigenvalue(UNIT_SQUARE, 2, 3) == pytest.approx(13 * PI2)

    def test_rectangle(self):
        assert exact_eigenvalue((0, 0, 2, 1), 1, 1) == pytest.approx(1.25 * PI2)
        assert exact_eigenvalue((1, 1, 3, 2), 2, 1) == pytest.approx(2 * PI2)

    @pytest.mark.parametrize("m,n", [(0, 1), (1, -1), (1.5, 1), (True, 1)])
    def test_invalid_indices(self, m, n):
        with pytest.raises(InvalidArgument):
            exact_eigenvalue(UNIT_SQUARE, m, n)

    def test_eigenfunction(self):
        u = exact_eigenfunction((1, 0, 3, 1), 2, 1)
        assert u(1.5, 0.5) == pytest.approx(1.0)
        assert u(1.0, 0.3) == pytest.approx(0.0)
        assert u(3.0, 0.3) == pytest.approx(0.0, abs=1e-12)
        assert u(2.0, 0.5) == pytest.approx(0.0, abs=1e-12)

    def test_spectrum(self):
        spectrum = exact_spectrum(UNIT_SQUARE, 4)
        assert [(m, n) for _, m, n in spectrum] == [(1, 1), (1, 2), (2, 1), (2, 2)]
        assert [value for value, _, _ in spectrum] == pytest.approx(
            [2 * PI2, 5 * PI2, 5 * PI2, 8 * PI2]
        )

    def test_search_window(self):
        value, window = search_window(UNIT_SQUARE, (1, 1))
        assert value == pytest.approx(2 * PI2)
        half = 0.2 * 3 * PI2
        assert window == pytest.approx((value - half, value + half, -half, half))

    def test_search_window_skips_repeated_value(self):
        # (1, 2) and (2, 1) coincide; the gap is to (2, 2) and (1, 1)
        value, window = search_window(UNIT_SQUARE, (1, 2))
        assert value == pytest.approx(5 * PI2)
        assert window[1] - window[0] == pytest.approx(0.4 * 3 * PI2)


class TestConvergenceStudy:
    def test_small_meshes(self, oracle_spectrum, caplog):
        with caplog.at_level(logging.INFO, logger="holofem.study"):
            records = convergence_study(n_list=(2, 4))
        assert [record.n for record in records] == [2, 4]
        assert [record.h for record in records] == [0.5, 0.25]
        assert records[0].lambda_h == pytest.approx(32.0, rel=1e-10)
        assert records[1].lambda_h == pytest.approx(oracle_spectrum(4)[0], rel=1e-10)
        assert records[0].order is None
        assert records[1].order > 0
        # 32 lies above the n=2 window, which is extended
        assert "extending upward" in caplog.text
        for record in records:
            assert record.error == pytest.approx(record.lambda_h - 2 * PI2)

    def test_monotone_from_above(self):
        records = convergence_study(n_list=(4, 8, 16))
        assert all(record.lambda_h > 2 * PI2 for record in records)
        errors = [record.error for record in records]
        assert errors == sorted(errors, reverse=True)

    def test_rectangle_target(self, caplog):
        rect = (0, 0, 2, 1)
        with caplog.at_level(logging.WARNING, logger="holofem.study"):
            records = convergence_study(rect, n_list=(8, 12), target=(1, 1))
        assert "not successive doublings" in caplog.text
        assert records[-1].lambda_h > exact_eigenvalue(rect, 1, 1)
        assert records[-1].error < records[0].error

    @pytest.mark.parametrize("n_list", [(), (8, 4), (4, 4), (0, 2)])
    def test_invalid_grid_counts(self, n_list):
        with pytest.raises(InvalidArgument):
            convergence_study(n_list=n_list)

    def test_empty_windows(self):
        with patch.object(study, "search", return_value=SearchResult([])) as mock_search:
            with pytest.raises(AmbiguousTargetError) as excinfo:
                convergence_study(n_list=(4,))
        assert excinfo.value.n == 4
        assert excinfo.value.count == 0
        assert mock_search.call_count == study.WINDOW_EXTENSIONS + 1
        regions = [call.args[1] for call in mock_search.call_args_list]
        side = regions[0][1] - regions[0][0]
        assert [region[1] for region in regions] == pytest.approx(
            [regions[0][1] + k * side for k in range(4)]
        )
        assert {region[0] for region in regions} == {regions[0][0]}

    def test_two_estimates(self):
        result = SearchResult([EigenvalueEstimate(19.8, 1e-5), EigenvalueEstimate(20.1, 1e-5)])
        with patch.object(study, "search", return_value=result):
            with pytest.raises(AmbiguousTargetError, match="holds 2 eigenvalue estimates"):
                convergence_study(n_list=(4,))

    def test_progress(self):
        with patch.object(study.progressbar, "ProgressBar") as mock_progbar:
            convergence_study(n_list=(2, 4), progress=True)
        mock_progbar.assert_called_once_with(redirect_stdout=True, max_value=2)
        progbar = mock_progbar.return_value
        assert [call.args[0] for call in progbar.update.call_args_list] == [1, 2]
        progbar.finish.assert_called_once_with()

    def test_no_progress_by_default(self):
        with patch.object(study.progressbar, "ProgressBar") as mock_progbar:
            convergence_study(n_list=(2,))
        mock_progbar.assert_not_called()

    @pytest.mark.slow
    def test_diagonal_table(self):
        records = convergence_study(n_list=(10, 20, 40, 80))
        assert records[0].lambda_h == pytest.approx(DIAGONAL_VALUES[0], rel=1e-9)
        assert [record.lambda_h for record in records[1:3]] == pytest.approx(
            DIAGONAL_VALUES[1:], abs=2e-4
        )
        orders = [record.order for record in records[1:]]
        assert all(1.95 <= order <= 2.10 for order in orders)
        assert rate_slope(records) == pytest.approx(2.0, abs=0.1)
        assert all(record.lambda_h > 2 * PI2 for record in records)

    def test_crisscross(self):
        records = convergence_study(n_list=(10, 20), pattern="crisscross")
        assert [record.lambda_h for record in records] == pytest.approx(
            CRISSCROSS_VALUES[:2], abs=2e-4
        )
        assert 1.95 <= records[1].order <= 2.10
        # both diagonals give a smaller error than one on the same grid
        assert records[0].lambda_h < DIAGONAL_VALUES[0]

    @pytest.mark.slow
    def test_crisscross_n40(self):
        records = convergence_study(n_list=(20, 40), pattern="crisscross")
        assert records[1].lambda_h == pytest.approx(CRISSCROSS_VALUES[2], abs=2e-4)
        assert records[1].lambda_h > 2 * PI2

    def test_unknown_pattern(self):
        with pytest.raises(InvalidArgument, match="unknown mesh pattern"):
            convergence_study(n_list=(2, 4), pattern="union-jack")


class TestReporting:
    def test_rate_slope(self):
        records = [
            ConvergenceRecord(n, 1.0 / n, 0.0, 3.0 / n**2, None) for n in (10, 20, 40)
        ]
        assert rate_slope(records) == pytest.approx(2.0)
        with pytest.raises(InvalidArgument):
            rate_slope(records[:1])

    def test_csv(self):
        assert format_records(RECORDS, "csv") == (
            "h,lambda_h,error,order\n"
            "0.1,19.928,0.18879,\n"
            "0.05,19.787,0.04779,1.982\n"
        )

    def test_markdown(self):
        assert format_records(RECORDS, "md") == (
            "| h | lambda_h | error | order |\n"
            "|---|---|---|---|\n"
            "| 1/10 | 19.9280 | 0.1888 | - |\n"
            "| 1/20 | 19.7870 | 0.0478 | 1.9820 |\n"
        )

    def test_json(self):
        data = json.loads(format_records(RECORDS, "json"))
        assert data[0] == {
            "n": 10,
            "h": 0.1,
            "lambda_h": 19.928,
            "error": 0.18879,
            "order": None,
        }
        assert data[1]["order"] == 1.982

    def test_unknown_format(self):
        with pytest.raises(InvalidArgument):
            format_records(RECORDS, "xlsx")

"""
CSV and plain-text writers for sweep grids, latency budgets and shot runs.
"""
import csv
import logging
from contextlib import nullcontext
from pathlib import Path

logger = logging.getLogger(__name__)

GRID_HEADER = ['tau1_ns', 'tau2_ns', 'p_excited', 'shots']
LATENCY_HEADER = ['component', 'delay_ns']
SHOTS_HEADER = ['shot', 'outcome', 'p_excited']


def _sig9(value):
    return f"{value:.9g}"


def _open_output(path):
    """``path`` may also be an open text stream, which is written to and left open."""
    if hasattr(path, 'write'):
        return nullcontext(path)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path.open('w', newline='', encoding='utf-8')


def _writer(handle):
    return csv.writer(handle, lineterminator='\n')


def write_grid_csv(path, *grids):
    """One row per cell, tau1-major, 9 significant digits; several grids share one header."""
    rows = 0
    with _open_output(path) as handle:
        writer = _writer(handle)
        writer.writerow(GRID_HEADER)
        for grid in grids:
            for i, tau1 in enumerate(grid.axes[0]):
                for j, tau2 in enumerate(grid.axes[1]):
                    writer.writerow([
                        _sig9(tau1 * 1e9), _sig9(tau2 * 1e9), _sig9(grid.p_excited[i, j]), grid.shots,
                    ])
            rows += grid.p_excited.size
    logger.debug("wrote %d grid rows", rows)


def write_latency_csv(path, *budgets):
    """Components and total per budget; names get a ``mode.`` prefix when several budgets are written."""
    with _open_output(path) as handle:
        writer = _writer(handle)
        writer.writerow(LATENCY_HEADER)
        for budget in budgets:
            prefix = f"{budget.mode}." if len(budgets) > 1 else ''
            for name, delay in budget.components + (('total', budget.total),):
                writer.writerow([prefix + name, _sig9(delay * 1e9)])


def write_shots_csv(path, results):
    """Per-shot reported outcome and the final excited population."""
    with _open_output(path) as handle:
        writer = _writer(handle)
        writer.writerow(SHOTS_HEADER)
        for shot, result in enumerate(results):
            outcome = result.record.outcome if result.record is not None else ''
            writer.writerow([shot, outcome, _sig9(result.final_state.p_excited)])


def format_latency_table(*budgets):
    """Side-by-side table of one or more budgets in ns."""
    names = []
    for budget in budgets:
        names.extend(name for name, _ in budget.components if name not in names)
    width = max([len(name) for name in names] + [len('total')])
    header = ' ' * width + ''.join(f"  {budget.mode.label:>12}" for budget in budgets)
    lines = [header]
    for name in names + ['total']:
        cells = []
        for budget in budgets:
            values = dict(budget.components)
            delay = budget.total if name == 'total' else values.get(name)
            cells.append(f"  {'-':>12}" if delay is None else f"  {delay * 1e9:>9.4g} ns")
        lines.append(f"{name:<{width}}" + ''.join(cells))
    return '\n'.join(lines)

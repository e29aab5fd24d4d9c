"""Display utilities using Rich."""

from rich.console import Console
from rich.table import Table

console = Console()


def print_success(message: str) -> None:
    """Print a success message."""
    console.print(f'[green]✓[/green] {message}')


def print_error(message: str) -> None:
    """Print an error message."""
    console.print(f'[red]✗[/red] {message}')


def print_warning(message: str) -> None:
    """Print a warning message."""
    console.print(f'[yellow]![/yellow] {message}')


def print_info(message: str) -> None:
    """Print an info message."""
    console.print(f'[blue]ℹ[/blue] {message}')


def create_rmse_table(title: str = 'AoA RMSE') -> Table:
    """Create a table for RMSE records."""
    table = Table(title=title, show_header=True, header_style='bold')
    table.add_column('Sweep', style='cyan')
    table.add_column('Value', justify='right')
    table.add_column('Method', style='magenta')
    table.add_column('K', justify='right')
    table.add_column('Trials', justify='right')
    table.add_column('RMSE (deg)', justify='right', style='yellow')
    table.add_column('95% CI', justify='right')
    table.add_column('Flagged', justify='right')
    return table


def create_trial_table(title: str = 'Trial') -> Table:
    """Create a table comparing true and estimated angles."""
    table = Table(title=title, show_header=True, header_style='bold')
    table.add_column('Method', style='magenta')
    table.add_column('True (deg)', style='cyan')
    table.add_column('Estimated (deg)', style='yellow')
    table.add_column('Max error (deg)', justify='right')
    table.add_column('Flagged', justify='center')
    return table


def create_selftest_table(title: str = 'Self-test') -> Table:
    """Create a table for invariant checks."""
    table = Table(title=title, show_header=True, header_style='bold')
    table.add_column('Check', style='cyan')
    table.add_column('Status', justify='center')
    table.add_column('Detail')
    return table


def status_style(passed: bool) -> str:
    """Get the markup for a pass/fail value."""
    return '[green]PASS[/green]' if passed else '[red]FAIL[/red]'


def format_angles(degrees: list[float]) -> str:
    """Format a list of angles for a table cell."""
    return ', '.join(f'{angle:.4f}' for angle in degrees)

"""
**check** runs the small-scale property checks (projection norms, bounded
operator norms, consistency of the operator function, operator gap) and
prints one line per check. Exits with status 2 if any check fails.

Example usage::

    holofem check
    holofem check -v 2

"""

from holofem import properties
from holofem.base import NumericalError
from holofem.commands.base import BaseCommand


class Command(BaseCommand):
    """Run property checks"""

    name = "check"
    help = __doc__

    def handle(self, **options):
        results = properties.run_checks()
        for result in results:
            self.stdout.write(
                "%-18s %s  %s\n"
                % (result.name, "ok" if result.passed else "FAILED", result.detail)
            )
        failed = [result.name for result in results if not result.passed]
        if failed:
            raise NumericalError("property checks failed: %s" % ", ".join(failed))

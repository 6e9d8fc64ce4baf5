"""
Harness Module

Scenario runner, property catalog and reference stack.
"""

from app.modules import BaseModule


class HarnessModule(BaseModule):
    """Harness module implementation"""

    def get_module_name(self) -> str:
        """Return the module name"""
        return "harness"

    def get_description(self) -> str:
        return "scenario runs, property verdicts, sweeps and differential runs"

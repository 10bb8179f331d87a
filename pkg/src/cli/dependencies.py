from src.cli.service import CliService

_cli_service_instance: CliService | None = None


def get_cli_service() -> CliService:
    """Get a shared CliService instance (singleton per process)."""
    global _cli_service_instance
    if _cli_service_instance is None:
        _cli_service_instance = CliService()
    return _cli_service_instance

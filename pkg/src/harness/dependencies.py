from src.harness.service import HarnessService

_harness_service_instance: HarnessService | None = None


def get_harness_service() -> HarnessService:
    """Get a shared HarnessService instance (singleton per process)."""
    global _harness_service_instance
    if _harness_service_instance is None:
        _harness_service_instance = HarnessService()
    return _harness_service_instance

from src.engines.service import EngineService

# Singleton instance
_engine_service_instance: EngineService | None = None


def get_engine_service() -> EngineService:
    """Get EngineService singleton instance"""
    global _engine_service_instance
    if _engine_service_instance is None:
        _engine_service_instance = EngineService()
    return _engine_service_instance

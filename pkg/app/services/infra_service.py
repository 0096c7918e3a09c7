from app.api.models import SUITES, ConfigResponse, HealthCheckResponse
from app.poset import cached_sizes
from app.utils.config_loader import CONFIG
import structlog

logger = structlog.get_logger(__name__)


class InfraService:
    def health_check(self) -> HealthCheckResponse:
        """Report configuration state and which posets are already built."""
        try:
            details = {}
            if CONFIG:
                details['configuration'] = "Loaded successfully"
            else:
                logger.error("Configuration not loaded")
                details['configuration'] = "Failed to load"
                return HealthCheckResponse(status="unhealthy", details=details)

            cached = cached_sizes()
            details['cached_posets'] = ", ".join(str(n) for n in cached) or "none"
            details['max_poset_n'] = str(CONFIG['MAX_POSET_N'])
            return HealthCheckResponse(status="healthy", details=details)

        except Exception as e:
            logger.error("Health check failed", error=str(e))
            return HealthCheckResponse(status="unhealthy", details={"error": str(e)})

    def get_config(self) -> ConfigResponse:
        """Retrieve the size guards and version."""
        config_data = {
            "version": CONFIG.get("version", "unknown"),
            "max_poset_n": CONFIG['MAX_POSET_N'],
            "max_enum_n": CONFIG['MAX_ENUM_N'],
            "el_verify_max_n": CONFIG['EL_VERIFY_MAX_N'],
            "face_count_max_n": CONFIG['FACE_COUNT_MAX_N'],
            "rank_selected_max_n": CONFIG['RANK_SELECTED_MAX_N'],
            "census_max_n": CONFIG['census']['max_n'],
            "suites": SUITES + ["all"],
        }
        logger.info("Configuration retrieved", version=config_data["version"])
        return ConfigResponse(**config_data)

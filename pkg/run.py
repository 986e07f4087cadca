"""
Start the HankelRank API server with the configured host, port and budget
"""

import logging

import uvicorn

from app.config import settings

logger = logging.getLogger("run")


def main() -> None:
    logging.basicConfig(level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO))
    logger.info(
        f"HankelRank API on http://{settings.HOST}:{settings.PORT} "
        f"(docs at /docs, bit budget {settings.BIT_BUDGET}, environment {settings.ENVIRONMENT})"
    )
    uvicorn.run(
        "app.main:app",
        host=settings.HOST,
        port=settings.PORT,
        reload=settings.DEBUG,
        log_level=settings.LOG_LEVEL.lower(),
    )


if __name__ == "__main__":
    main()

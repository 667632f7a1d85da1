from contextlib import asynccontextmanager

from fastapi import FastAPI

from database import init_db, close_db
from routes import motional_router


@asynccontextmanager
async def lifespan(app: FastAPI):
    await init_db()
    yield
    await close_db()


app = FastAPI(
    title="Motional qubit-oscillator simulator",
    description="Spectra, layout solves, gate plans and stored simulation runs",
    lifespan=lifespan
)

api_version_prefix = "/api/v1"

app.include_router(motional_router, prefix=f"{api_version_prefix}/motional", tags=["motional"])

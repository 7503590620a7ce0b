"""
FastAPI main application
"""
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from api.routes import chemistry, experiments, tuning
from model.chemistry import IonInvariants, default_constants, ph_of
from utility.settings import configure_logging

configure_logging()

# Create FastAPI app
app = FastAPI(
    title="pH Neutralization Simulation API",
    description="Chemistry, controller tuning and closed-loop experiments for a pH neutralization plant",
    version="1.0.0"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(chemistry.router)
app.include_router(tuning.router)
app.include_router(experiments.router)


@app.get("/")
async def root():
    """Root endpoint"""
    return {
        "message": "pH Neutralization Simulation API",
        "version": "1.0.0",
        "docs": "/docs"
    }


@app.get("/health")
async def health_check():
    """Health check: the solver must put pure water at pH 7"""
    try:
        ph = ph_of(IonInvariants(alpha=0.0, beta=0.0), default_constants())
        return {"status": "healthy", "neutral_ph": round(ph, 6)}
    except Exception as e:
        return {"status": "unhealthy", "error": str(e)}


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)

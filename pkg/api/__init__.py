# FastAPI application for the pH simulation toolkit

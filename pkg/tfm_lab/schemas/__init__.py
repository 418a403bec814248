"""
Schemas module for the TFM laboratory.

Contains Pydantic models for:
- Mechanism parameter records (JSON discriminated on ``mechanism``)
- Audit and bound-checker reports
- Experiment configuration
- Protocol transcripts
"""

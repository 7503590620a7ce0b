"""Chemistry and plant models"""

"""
Graph documents: schemas, parsers and serializers
"""
